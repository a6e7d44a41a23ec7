//! Ground-truth failure probabilities of both benchmarks: brute-force Monte
//! Carlo against the closed form (toy) and quadrature (T-junction).

use hgp::benchmarks::{bruteforce_pf, Benchmark, TJUNCTION_PF_REFERENCE};

pub fn run_example() -> hgp::Result<()> {
    let n = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(1_000_000);
    for b in [Benchmark::Toy, Benchmark::Tjunction] {
        let (pf, se) = bruteforce_pf(b.system().as_ref(), &b.sampler(), n, 0)?;
        println!(
            "{:>9}: Monte Carlo {pf:.5} ± {se:.1e} (n = {n}), exact {:.6}",
            b.name(), b.pf_exact()
        );
    }
    println!("T-junction reference value: {TJUNCTION_PF_REFERENCE}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> hgp::Result<()> {
    run_example()
}
