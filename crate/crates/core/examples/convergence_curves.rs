//! Fixed-budget runs written to disk: per-repeat traces plus a
//! `convergence.csv` with min/mean/max bands across repeats.
//!
//! `cargo run --release --example convergence_curves -- <out-dir>`

use std::path::PathBuf;

use hgp::benchmarks::Benchmark;
use hgp::experiment::{run_experiment, ExperimentConfig, Mode};
use hgp::surrogate::Method;

pub fn run_example() -> hgp::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("hgp-convergence"));
    let mut cfg = ExperimentConfig::new(Benchmark::Toy, Method::Hgp);
    cfg.repeats = 3;
    cfg.mode = Mode::FixedIterations;
    cfg.loop_config.max_iterations = 60;
    cfg.loop_config.metrics_every = 10;
    cfg.out_dir = Some(out);
    run_experiment(&cfg)?;
    let path = cfg.run_dir().expect("output directory set").join("convergence.csv");
    println!("wrote {}", path.display());
    let text = std::fs::read_to_string(&path).map_err(|e| hgp::Error::Io { path, source: e })?;
    for line in text.lines().step_by(10) {
        println!("{line}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> hgp::Result<()> {
    run_example()
}
