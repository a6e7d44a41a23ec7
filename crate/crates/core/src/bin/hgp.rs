use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use hgp::active_learning::LoopConfig;
use hgp::benchmarks::{bruteforce_pf, Benchmark, TJUNCTION_PF_REFERENCE};
use hgp::experiment::{run_experiment, table_from_dir, ExperimentConfig, Mode};
use hgp::surrogate::Method;
use hgp::{Error, Result};

#[derive(Parser)]
#[command(version, about = "Failure probability of systems with undefined outputs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Hgp,
    Masked,
    Gpc,
}

#[derive(Subcommand)]
enum Command {
    /// Run repeated active-learning experiments and write traces and a table.
    Run {
        #[arg(long)]
        benchmark: Benchmark,
        #[arg(long, value_enum)]
        method: MethodArg,
        /// Mask value for undefined outputs (masked method only).
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, default_value_t = 5)]
        repeats: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "terminating")]
        mode: Mode,
        #[arg(long, env = "HGP_OUT_DIR", default_value = "results")]
        out: PathBuf,
        #[arg(long, default_value_t = 150)]
        max_iter: usize,
        #[arg(long, default_value_t = 0.02)]
        eta: f64,
        #[arg(long, default_value_t = 0.1)]
        cov_threshold: f64,
        #[arg(long, default_value_t = 5000)]
        n_mc: usize,
        #[arg(long, default_value_t = 100_000)]
        test_size: usize,
        /// Score F1/AP every this many steps (default: 5 in fixed-iterations
        /// mode, only at the end otherwise).
        #[arg(long)]
        metrics_every: Option<usize>,
    },
    /// Recompute the aggregate table from the traces under a directory.
    Table {
        #[arg(long, env = "HGP_OUT_DIR", default_value = "results")]
        out: PathBuf,
    },
    /// Brute-force Monte Carlo failure probability of a benchmark.
    Oracle {
        #[arg(long)]
        benchmark: Benchmark,
        #[arg(long, default_value_t = 10_000_000)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn method(m: MethodArg, alpha: Option<f64>) -> Result<Method> {
    match (m, alpha) {
        (MethodArg::Masked, Some(alpha)) => Ok(Method::Masked { alpha }),
        (MethodArg::Masked, None) => Err(Error::InvalidArgument(
            "--alpha is required for the masked method".into(),
        )),
        (_, Some(_)) => Err(Error::InvalidArgument(
            "--alpha only applies to the masked method".into(),
        )),
        (MethodArg::Hgp, None) => Ok(Method::Hgp),
        (MethodArg::Gpc, None) => Ok(Method::Gpc),
    }
}

fn execute(cmd: Command) -> Result<serde_json::Value> {
    match cmd {
        Command::Run {
            benchmark,
            method: m,
            alpha,
            repeats,
            seed,
            mode,
            out,
            max_iter,
            eta,
            cov_threshold,
            n_mc,
            test_size,
            metrics_every,
        } => {
            let config = ExperimentConfig {
                repeats,
                mode,
                loop_config: LoopConfig {
                    eta,
                    cov_threshold,
                    n_mc,
                    max_iterations: max_iter,
                    seed,
                    metrics_every: metrics_every.unwrap_or(match mode {
                        Mode::FixedIterations => 5,
                        Mode::Terminating => 0,
                    }),
                    ..LoopConfig::default()
                },
                test_size,
                out_dir: Some(out),
                ..ExperimentConfig::new(benchmark, method(m, alpha)?)
            };
            let exp = run_experiment(&config)?;
            Ok(json!({
                "dir": config.run_dir(),
                "row": exp.table.row,
            }))
        }
        Command::Table { out } => Ok(serde_json::to_value(table_from_dir(&out)?)
            .expect("table rows serialise")),
        Command::Oracle { benchmark, n, seed } => {
            let start = Instant::now();
            let (pf, stderr) = bruteforce_pf(benchmark.system().as_ref(), &benchmark.sampler(), n, seed)?;
            let mut v = json!({
                "benchmark": benchmark.name(),
                "n": n,
                "seed": seed,
                "pf": pf,
                "stderr": stderr,
                "exact": benchmark.pf_exact(),
                "seconds": start.elapsed().as_secs_f64(),
            });
            if benchmark == Benchmark::Tjunction {
                v["reference"] = json!(TJUNCTION_PF_REFERENCE);
            }
            Ok(v)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!("{}", json!({ "error": { "kind": "usage", "message": e.to_string() } }));
            return ExitCode::from(2);
        }
    };
    match execute(cli.command) {
        Ok(v) => {
            println!("{}", serde_json::to_string_pretty(&v).expect("json output"));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", json!({ "error": { "kind": e.kind(), "message": e.to_string() } }));
            ExitCode::FAILURE
        }
    }
}
