//! Probit GP classification by expectation propagation, with the lengthscale
//! picked by the EP evidence.

use hgp::classification::{fit_ep_lengthscale, ClassificationDataset, EpOptions};
use hgp::regression::Bounds;

pub fn run_example() -> hgp::Result<()> {
    // +1 inside (0.3, 0.6), −1 elsewhere
    let xs: Vec<f64> = (0..16).map(|i| (i as f64 + 0.5) / 16.0).collect();
    let events: Vec<bool> = xs.iter().map(|&x| x > 0.3 && x < 0.6).collect();
    let data = ClassificationDataset::from_events(xs.iter().map(|&x| vec![x]).collect(), &events)?;
    let post = fit_ep_lengthscale(&data, 1e5, Bounds::new(1e-6, 0.2), &EpOptions::default())?;
    println!(
        "lengthscale {:.4}, log evidence {:.3}, {} sweeps",
        post.params().lengthscale,
        post.log_evidence(),
        post.sweeps()
    );
    for i in 0..=20 {
        let x = i as f64 / 20.0;
        println!("x = {x:.2}  p(+1) = {:.4}", post.predict_prob(&[x])?);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> hgp::Result<()> {
    run_example()
}
