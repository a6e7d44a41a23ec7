//! Masked-GP sensitivity to the mask value on the toy benchmark.

use hgp::benchmarks::Benchmark;
use hgp::experiment::{run_experiment, ExperimentConfig};
use hgp::surrogate::Method;

pub fn run_example() -> hgp::Result<()> {
    for alpha in [0.1, 0.5, 1.0] {
        let mut cfg = ExperimentConfig::new(Benchmark::Toy, Method::Masked { alpha });
        cfg.repeats = 3;
        let row = run_experiment(&cfg)?.table.row;
        println!(
            "α = {alpha}: p_f {:.4}, F1 {:.3}, evaluations {:.1}, {}/{} terminated",
            row.pf.mean,
            row.f1.map_or(f64::NAN, |s| s.mean),
            row.evaluations.mean,
            row.terminated,
            row.repeats
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> hgp::Result<()> {
    run_example()
}
