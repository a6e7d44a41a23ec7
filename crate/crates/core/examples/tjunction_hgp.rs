//! The T-junction merge: the ego vehicle's closest approach is undefined when
//! it never merges. Runs one hierarchical-GP repeat and compares with brute
//! force.

use hgp::active_learning::{run, LoopConfig};
use hgp::benchmarks::{bruteforce_pf, Benchmark, TJunctionSystem};
use hgp::metrics::TestSet;
use hgp::surrogate::{Method, MethodFactory, SurrogateConfig};

pub fn run_example() -> hgp::Result<()> {
    let b = Benchmark::Tjunction;
    let system = b.system();
    let sampler = b.sampler();

    let tj = TJunctionSystem::default();
    for (x_a, v_a) in [(-100.0, 10.0), (-30.0, 10.0), (-70.0, 15.0)] {
        println!("g({x_a}, {v_a}) = {:?}", tj.g(x_a, v_a)?);
    }

    let (truth, se) = bruteforce_pf(system.as_ref(), &sampler, 2_000_000, 0)?;
    let test = TestSet::generate(system.as_ref(), &sampler, 100_000, 1)?;
    let factory = MethodFactory::new(Method::Hgp, SurrogateConfig::default());
    let record = run(&factory, system.as_ref(), &sampler, &LoopConfig::default(), Some(&test))?;
    let s = &record.final_state;
    println!(
        "{:?} after {} evaluations ({} undefined): p_f {:.4} vs brute force {truth:.4} ± {se:.1e}, F1 {:.4}",
        record.termination,
        s.evaluations,
        record
            .initial
            .iter()
            .map(|e| e.y)
            .chain(record.iterations.iter().map(|i| i.chosen.y))
            .filter(|y| !y.is_defined())
            .count(),
        s.pf,
        s.f1.unwrap_or(f64::NAN)
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> hgp::Result<()> {
    run_example()
}
