//! Matérn 5/2 covariance and the Gaussian helpers shared by the GP models.
//!
//! Distances are Euclidean in the (normalised) input space and a single
//! isotropic lengthscale is used for every dimension.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SQRT_5: f64 = 2.236_067_977_499_79;
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_7;

/// Hyperparameters of a stationary Matérn 5/2 kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    pub lengthscale: f64,
    pub variance: f64,
}

impl KernelParams {
    pub fn new(lengthscale: f64, variance: f64) -> Result<Self> {
        if !(lengthscale.is_finite() && lengthscale > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "lengthscale must be positive and finite, got {lengthscale}"
            )));
        }
        if !(variance.is_finite() && variance > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "variance must be positive and finite, got {variance}"
            )));
        }
        Ok(Self {
            lengthscale,
            variance,
        })
    }
}

fn distance(x1: &[f64], x2: &[f64]) -> f64 {
    x1.iter()
        .zip(x2)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

/// Matérn 5/2 covariance as a function of distance.
#[inline]
pub(crate) fn matern52_at(r: f64, params: &KernelParams) -> f64 {
    let s = SQRT_5 * r / params.lengthscale;
    params.variance * (1.0 + s + s * s / 3.0) * (-s).exp()
}

/// Derivative of the Matérn 5/2 covariance with respect to log-lengthscale.
#[inline]
pub(crate) fn matern52_dlog_lengthscale_at(r: f64, params: &KernelParams) -> f64 {
    let s = SQRT_5 * r / params.lengthscale;
    params.variance * s * s * (1.0 + s) * (-s).exp() / 3.0
}

/// Matérn 5/2 kernel `σ² (1 + √5 r/ℓ + 5r²/(3ℓ²)) exp(−√5 r/ℓ)`.
pub fn matern52(x1: &[f64], x2: &[f64], params: &KernelParams) -> Result<f64> {
    if x1.len() != x2.len() || x1.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "kernel inputs must share a nonzero dimension, got {} and {}",
            x1.len(),
            x2.len()
        )));
    }
    if x1.iter().chain(x2).any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(
            "kernel inputs must be finite".into(),
        ));
    }
    Ok(matern52_at(distance(x1, x2), params))
}

/// Pairwise distance matrix of the rows of `x`.
pub(crate) fn distance_matrix(x: &[Vec<f64>]) -> DMatrix<f64> {
    let n = x.len();
    let mut d = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..i {
            let r = distance(&x[i], &x[j]);
            d[(i, j)] = r;
            d[(j, i)] = r;
        }
    }
    d
}

/// Gram matrix from a precomputed distance matrix.
pub(crate) fn gram_from_distances(
    dist: &DMatrix<f64>,
    params: &KernelParams,
    noise_var: f64,
) -> DMatrix<f64> {
    let n = dist.nrows();
    DMatrix::from_fn(n, n, |i, j| {
        matern52_at(dist[(i, j)], params) + if i == j { noise_var } else { 0.0 }
    })
}

/// `k(X, X) + noise_var · I` for the rows of `x`.
pub fn gram_matrix(x: &[Vec<f64>], params: &KernelParams, noise_var: f64) -> Result<DMatrix<f64>> {
    let dim = check_rows(x)?;
    if dim == 0 {
        return Err(Error::InvalidArgument("inputs must have dimension ≥ 1".into()));
    }
    if !(noise_var >= 0.0 && noise_var.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "noise variance must be nonnegative, got {noise_var}"
        )));
    }
    Ok(gram_from_distances(&distance_matrix(x), params, noise_var))
}

/// Covariance vector `k(x*, X)`.
pub(crate) fn cross_covariance(query: &[f64], x: &[Vec<f64>], params: &KernelParams) -> Vec<f64> {
    x.iter()
        .map(|xi| matern52_at(distance(query, xi), params))
        .collect()
}

/// Validates that `x` is a nonempty set of finite rows of equal length and
/// returns that length.
pub(crate) fn check_rows(x: &[Vec<f64>]) -> Result<usize> {
    let first = x
        .first()
        .ok_or_else(|| Error::Precondition("input matrix has no rows".into()))?;
    let dim = first.len();
    for (i, row) in x.iter().enumerate() {
        if row.len() != dim {
            return Err(Error::InvalidArgument(format!(
                "row {i} has dimension {} but row 0 has {dim}",
                row.len()
            )));
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("row {i} is not finite")));
        }
    }
    Ok(dim)
}

/// Standard normal density.
#[inline]
pub fn std_normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z - LN_SQRT_2PI).exp()
}

/// Standard normal CDF, evaluated through `erfc` so both tails keep their
/// relative accuracy.
#[inline]
pub fn std_normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

/// `ln Φ(z)`, stable far into the lower tail.
pub fn ln_std_normal_cdf(z: f64) -> f64 {
    if z > 0.0 {
        (-std_normal_cdf(-z)).ln_1p()
    } else if z > -30.0 {
        std_normal_cdf(z).ln()
    } else {
        let t = -z;
        let t2 = t * t;
        -0.5 * t2 - LN_SQRT_2PI - t.ln() + (1.0 - 1.0 / t2 + 3.0 / (t2 * t2)).ln()
    }
}

/// Inverse Mills ratio `φ(z) / Φ(z)`.
pub fn inverse_mills_ratio(z: f64) -> f64 {
    if z > -30.0 {
        std_normal_pdf(z) / std_normal_cdf(z)
    } else {
        // asymptotic series of Φ(z)/φ(z) in 1/z
        let t = -z;
        let t2 = t * t;
        t / (1.0 - 1.0 / t2 + 3.0 / (t2 * t2) - 15.0 / (t2 * t2 * t2))
    }
}

/// `P(Y < 0)` for `Y ~ N(mean, std²)`; the degenerate `std = 0` case is a
/// step function with value 1/2 at the origin.
pub fn prob_below_zero(mean: f64, std: f64) -> f64 {
    if std > 0.0 {
        std_normal_cdf(-mean / std)
    } else if mean < 0.0 {
        1.0
    } else if mean == 0.0 {
        0.5
    } else {
        0.0
    }
}
