#![allow(dead_code)]

use std::io::Write;

use hgp::kernels::{matern52, std_normal_cdf, KernelParams};
use nalgebra::{DMatrix, DVector};

/// Writes one line straight to stderr so it shows even when the harness
/// captures test output.
pub fn report(criterion: &str, name: &str, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "criterion {criterion} [{name}]: {verdict} — {detail}");
}

/// Moments of `Φ(y f) N(f | m, v)` by composite Simpson quadrature.
pub fn tilted_by_quadrature(y: f64, m: f64, v: f64) -> (f64, f64, f64) {
    let sd = v.sqrt();
    let (a, b) = (m - 12.0 * sd, m + 12.0 * sd);
    let n = 8000;
    let h = (b - a) / n as f64;
    let (mut z, mut z1, mut z2) = (0.0, 0.0, 0.0);
    for k in 0..=n {
        let f = a + k as f64 * h;
        let w = if k == 0 || k == n {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let g = w * std_normal_cdf(y * f) * (-(f - m).powi(2) / (2.0 * v)).exp();
        z += g;
        z1 += g * f;
        z2 += g * f * f;
    }
    let mean = z1 / z;
    (
        z * h / 3.0 / (2.0 * std::f64::consts::PI * v).sqrt(),
        mean,
        z2 / z - mean * mean,
    )
}

/// Dense EP with explicit inverses and quadrature moments; returns the
/// predictive `p(+1)` at each query.
pub fn dense_ep_oracle(x: &[f64], y: &[f64], params: KernelParams, queries: &[f64]) -> Vec<f64> {
    let n = x.len();
    let k = DMatrix::from_fn(n, n, |i, j| matern52(&[x[i]], &[x[j]], &params).unwrap());
    let k_inv = k.try_inverse().unwrap();
    let mut tau = vec![0.0; n];
    let mut nu = vec![0.0; n];
    let posterior = |tau: &[f64], nu: &[f64]| {
        let sigma = (&k_inv + DMatrix::from_diagonal(&DVector::from_column_slice(tau)))
            .try_inverse()
            .unwrap();
        let mu = &sigma * DVector::from_column_slice(nu);
        (sigma, mu)
    };
    for _ in 0..200 {
        let mut change: f64 = 0.0;
        for i in 0..n {
            let (sigma, mu) = posterior(&tau, &nu);
            let tau_c = 1.0 / sigma[(i, i)] - tau[i];
            let nu_c = mu[i] / sigma[(i, i)] - nu[i];
            let (_, m, v) = tilted_by_quadrature(y[i], nu_c / tau_c, 1.0 / tau_c);
            let (t, u) = ((1.0 / v - tau_c).max(0.0), m / v - nu_c);
            change = change.max((t - tau[i]).abs()).max((u - nu[i]).abs());
            tau[i] = t;
            nu[i] = u;
        }
        if change < 1e-10 {
            break;
        }
    }
    let (sigma, mu) = posterior(&tau, &nu);
    let a = &k_inv * &mu;
    let c = &k_inv - &k_inv * &sigma * &k_inv;
    queries
        .iter()
        .map(|&q| {
            let ks = DVector::from_fn(n, |i, _| matern52(&[q], &[x[i]], &params).unwrap());
            let mean = ks.dot(&a);
            let var = params.variance - ks.dot(&(&c * &ks));
            std_normal_cdf(mean / (1.0 + var).sqrt())
        })
        .collect()
}
