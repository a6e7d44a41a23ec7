//! One seeded repeat of each surrogate on the toy benchmark: hierarchical GP,
//! masked regression GP and direct GP classification.

use hgp::active_learning::{run, LoopConfig};
use hgp::benchmarks::Benchmark;
use hgp::metrics::TestSet;
use hgp::surrogate::{Method, MethodFactory, SurrogateConfig};

pub fn run_example() -> hgp::Result<()> {
    let b = Benchmark::Toy;
    let system = b.system();
    let sampler = b.sampler();
    let test = TestSet::generate(system.as_ref(), &sampler, 100_000, 1)?;
    let config = LoopConfig {
        seed: 4,
        ..Default::default()
    };
    for method in [Method::Hgp, Method::Masked { alpha: 1.0 }, Method::Gpc] {
        let factory = MethodFactory::new(method, SurrogateConfig::default());
        let r = run(&factory, system.as_ref(), &sampler, &config, Some(&test))?;
        let s = &r.final_state;
        println!(
            "{:>10}: {:<13} evaluations {:>3}  p_f {:.4}  F1 {:.3}  AP {:.3}",
            method.label(),
            format!("{:?}", r.termination),
            s.evaluations,
            s.pf,
            s.f1.unwrap_or(f64::NAN),
            s.ap.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> hgp::Result<()> {
    run_example()
}
