//! Active learning with the hierarchical GP on the toy benchmark, whose
//! output is undefined on a band next to one of the failure regions.

use hgp::active_learning::{run, LoopConfig};
use hgp::benchmarks::Benchmark;
use hgp::metrics::TestSet;
use hgp::surrogate::{Method, MethodFactory, SurrogateConfig};

pub fn run_example() -> hgp::Result<()> {
    let b = Benchmark::Toy;
    let system = b.system();
    let sampler = b.sampler();
    let test = TestSet::generate(system.as_ref(), &sampler, 100_000, 1)?;
    let factory = MethodFactory::new(Method::Hgp, SurrogateConfig::default());
    let record = run(&factory, system.as_ref(), &sampler, &LoopConfig::default(), Some(&test))?;

    for it in &record.iterations {
        println!(
            "step {:>3}: x = {:.4}, y = {:>9}, max misclassification {:.4}, p_f {:.4}",
            it.iteration,
            it.chosen.x[0],
            it.chosen.y.value().map_or("undefined".into(), |v| format!("{v:+.4}")),
            it.max_misclassification,
            it.pf
        );
    }
    let s = &record.final_state;
    println!(
        "{:?} after {} evaluations: p_f {:.4} (exact {:.4}), CoV {:.3}, F1 {:.4}, AP {:.4}",
        record.termination,
        s.evaluations,
        s.pf,
        b.pf_exact(),
        s.cov.unwrap_or(f64::INFINITY),
        s.f1.unwrap_or(f64::NAN),
        s.ap.unwrap_or(f64::NAN)
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> hgp::Result<()> {
    run_example()
}
