//! Plugging in a user-defined system: a 2-D function that is undefined
//! inside a disc, with failures on a thin ring just outside it.

use hgp::active_learning::{run, LoopConfig};
use hgp::benchmarks::{bruteforce_pf, PerformanceValue, System, UniformUnitBox};
use hgp::surrogate::{Method, MethodFactory, SurrogateConfig};

struct Ring;

impl System for Ring {
    fn name(&self) -> &str {
        "ring"
    }

    fn dim(&self) -> usize {
        2
    }

    fn evaluate(&self, u: &[f64]) -> hgp::Result<PerformanceValue> {
        let r = ((u[0] - 0.5).powi(2) + (u[1] - 0.5).powi(2)).sqrt();
        Ok(if r < 0.2 {
            PerformanceValue::Undefined
        } else {
            PerformanceValue::Defined(8.0 * (r - 0.25))
        })
    }
}

pub fn run_example() -> hgp::Result<()> {
    let sampler = UniformUnitBox { dim: 2 };
    let (truth, se) = bruteforce_pf(&Ring, &sampler, 1_000_000, 0)?;
    let factory = MethodFactory::new(Method::Hgp, SurrogateConfig::default());
    let config = LoopConfig {
        max_iterations: 100,
        ..Default::default()
    };
    let r = run(&factory, &Ring, &sampler, &config, None)?;
    println!(
        "{:?} after {} evaluations: p_f {:.4} vs brute force {truth:.4} ± {se:.1e}",
        r.termination, r.final_state.evaluations, r.final_state.pf
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> hgp::Result<()> {
    run_example()
}
