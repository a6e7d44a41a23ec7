//! Run an experiment into a directory, then rebuild its table from the
//! persisted traces alone.

use hgp::benchmarks::Benchmark;
use hgp::experiment::{run_experiment, table_from_dir, ExperimentConfig};
use hgp::surrogate::Method;

pub fn run_example() -> hgp::Result<()> {
    let out = std::env::temp_dir().join("hgp-results-table");
    let mut cfg = ExperimentConfig::new(Benchmark::Toy, Method::Hgp);
    cfg.repeats = 3;
    cfg.out_dir = Some(out.clone());
    let exp = run_experiment(&cfg)?;
    let rows = table_from_dir(&out)?;
    let row = &exp.table.row;
    println!(
        "{} / {}: p_f {:.4} ± {:.4}, F1 {:.3}, evaluations {:.1} ± {:.1}, DNT {}",
        row.benchmark,
        row.method,
        row.pf.mean,
        row.pf.std.unwrap_or(0.0),
        row.f1.map_or(f64::NAN, |s| s.mean),
        row.evaluations.mean,
        row.evaluations.std.unwrap_or(0.0),
        row.dnt
    );
    println!("recomputed from traces: {}", rows.iter().any(|r| r == row));
    Ok(())
}

#[allow(dead_code)]
fn main() -> hgp::Result<()> {
    run_example()
}
