//! Fit a Matérn-5/2 regression GP to a handful of noisy-free samples and
//! print its predictions.

use hgp::regression::{fit, FitOptions, HyperBounds, RegressionDataset};

pub fn run_example() -> hgp::Result<()> {
    let xs = [0.05, 0.2, 0.35, 0.5, 0.7, 0.9];
    let data = RegressionDataset::new(
        xs.iter().map(|&x| vec![x]).collect(),
        xs.iter().map(|&x| (8.0 * x).cos()).collect(),
    )?;
    let post = fit(&data, &HyperBounds::default(), 0.005 * 0.005, &FitOptions::default())?;
    let p = post.params();
    println!(
        "lengthscale {:.4}, variance {:.4}, log evidence {:.3}",
        p.lengthscale,
        p.variance,
        post.log_marginal_likelihood()
    );
    for i in 0..=10 {
        let x = i as f64 / 10.0;
        let pred = post.predict(&[x])?;
        println!(
            "x = {x:.1}  mean {:+.4} ± {:.4}  (truth {:+.4})",
            pred.mean,
            2.0 * pred.std,
            (8.0 * x).cos()
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> hgp::Result<()> {
    run_example()
}
