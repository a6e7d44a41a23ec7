//! Exact zero-mean GP regression with a Matérn 5/2 kernel.
//!
//! Hyperparameters are fitted by maximising the log marginal likelihood inside
//! a box, using several Latin-hypercube starts and a projected gradient ascent
//! in log-parameter space.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{
    check_rows, cross_covariance, distance_matrix, gram_from_distances, matern52_at,
    matern52_dlog_lengthscale_at, KernelParams,
};

const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// Jitter ladder tried when the Gram matrix does not factorise.
const JITTER_LADDER: [f64; 5] = [1e-10, 1e-9, 1e-8, 1e-7, 1e-6];

/// Inputs and real-valued targets. Undefined observations never reach here.
#[derive(Debug, Clone)]
pub struct RegressionDataset {
    x: Vec<Vec<f64>>,
    y: Vec<f64>,
}

impl RegressionDataset {
    pub fn new(x: Vec<Vec<f64>>, y: Vec<f64>) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::Precondition("regression dataset is empty".into()));
        }
        if x.len() != y.len() {
            return Err(Error::InvalidArgument(format!(
                "{} inputs but {} targets",
                x.len(),
                y.len()
            )));
        }
        check_rows(&x)?;
        if let Some(i) = y.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("target {i} is not finite")));
        }
        Ok(Self { x, y })
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.x[0].len()
    }

    pub fn inputs(&self) -> &[Vec<f64>] {
        &self.x
    }

    pub fn targets(&self) -> &[f64] {
        &self.y
    }
}

/// Closed interval used as a hyperparameter constraint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub low: f64,
    pub high: f64,
}

impl Bounds {
    pub const fn new(low: f64, high: f64) -> Self {
        Self { low, high }
    }

    pub fn validate(&self, what: &str) -> Result<()> {
        if !(self.low > 0.0 && self.low < self.high && self.high.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "{what} bounds must satisfy 0 < low < high, got [{}, {}]",
                self.low, self.high
            )));
        }
        Ok(())
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.low && v <= self.high
    }
}

/// Box constraints on the regression kernel hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperBounds {
    pub lengthscale: Bounds,
    pub variance: Bounds,
}

impl Default for HyperBounds {
    /// `ℓ ∈ [1e-6, 0.2]`, `σ² ∈ [0.5, 1]`.
    fn default() -> Self {
        Self {
            lengthscale: Bounds::new(1e-6, 0.2),
            variance: Bounds::new(0.5, 1.0),
        }
    }
}

/// Settings of the multi-start marginal-likelihood search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub restarts: usize,
    pub max_steps: usize,
    pub seed: u64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            restarts: 5,
            max_steps: 60,
            seed: 0x5eed_0f_9b,
        }
    }
}

/// Predictive mean and standard deviation at one query point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub mean: f64,
    pub std: f64,
}

/// Fitted regression GP with its cached Cholesky factor.
#[derive(Debug, Clone)]
pub struct RegressionPosterior {
    params: KernelParams,
    noise_var: f64,
    jitter: f64,
    log_marginal_likelihood: f64,
    x: Vec<Vec<f64>>,
    chol: Cholesky<f64, Dyn>,
    weights: DVector<f64>,
}

/// Cholesky that also rejects numerically zero pivots.
pub(crate) fn strict_cholesky(k: DMatrix<f64>) -> Option<Cholesky<f64, Dyn>> {
    let max_diag = k.diagonal().max();
    let chol = Cholesky::new(k)?;
    let l = chol.l_dirty();
    let floor = 1e-14 * max_diag.max(f64::MIN_POSITIVE);
    if (0..l.nrows()).all(|i| l[(i, i)] * l[(i, i)] > floor) {
        Some(chol)
    } else {
        None
    }
}

fn factor_with_jitter(k: &DMatrix<f64>) -> Option<(Cholesky<f64, Dyn>, f64)> {
    if let Some(c) = strict_cholesky(k.clone()) {
        return Some((c, 0.0));
    }
    JITTER_LADDER.iter().find_map(|&j| {
        let mut kj = k.clone();
        for i in 0..kj.nrows() {
            kj[(i, i)] += j;
        }
        strict_cholesky(kj).map(|c| (c, j))
    })
}

fn lml_from_factor(chol: &Cholesky<f64, Dyn>, y: &DVector<f64>) -> (f64, DVector<f64>) {
    let alpha = chol.solve(y);
    let l = chol.l_dirty();
    let log_det_half: f64 = (0..l.nrows()).map(|i| l[(i, i)].ln()).sum();
    let n = y.len() as f64;
    let lml = -0.5 * y.dot(&alpha) - log_det_half - 0.5 * n * LN_2PI;
    (lml, alpha)
}

/// Log marginal likelihood `log N(Y | 0, K + σ²_noise I)`.
///
/// Errors when the Gram matrix is not numerically positive definite; no jitter
/// is added here.
pub fn log_marginal_likelihood(
    data: &RegressionDataset,
    params: &KernelParams,
    noise_var: f64,
) -> Result<f64> {
    if !(noise_var >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "noise variance must be nonnegative, got {noise_var}"
        )));
    }
    let k = gram_from_distances(&distance_matrix(&data.x), params, noise_var);
    let chol = strict_cholesky(k).ok_or_else(|| {
        Error::Numerical(format!(
            "Gram matrix of {} points is not positive definite",
            data.len()
        ))
    })?;
    let y = DVector::from_column_slice(&data.y);
    Ok(lml_from_factor(&chol, &y).0)
}

/// Objective in log-parameter coordinates `(ln ℓ, ln σ²)`: value and gradient.
struct Evidence<'a> {
    dist: DMatrix<f64>,
    y: DVector<f64>,
    noise_var: f64,
    data: &'a RegressionDataset,
}

impl Evidence<'_> {
    fn value_and_grad(&self, theta: [f64; 2]) -> Option<(f64, [f64; 2])> {
        let params = KernelParams {
            lengthscale: theta[0].exp(),
            variance: theta[1].exp(),
        };
        let k = gram_from_distances(&self.dist, &params, self.noise_var);
        let (chol, _) = factor_with_jitter(&k)?;
        let (lml, alpha) = lml_from_factor(&chol, &self.y);
        let kinv = chol.inverse();
        let n = self.data.len();
        let mut g = [0.0; 2];
        for i in 0..n {
            for j in 0..n {
                let r = self.dist[(i, j)];
                let w = alpha[i] * alpha[j] - kinv[(i, j)];
                g[0] += w * matern52_dlog_lengthscale_at(r, &params);
                g[1] += w * matern52_at(r, &params);
            }
        }
        Some((lml, [0.5 * g[0], 0.5 * g[1]]))
    }
}

fn project(theta: [f64; 2], lo: [f64; 2], hi: [f64; 2]) -> [f64; 2] {
    [theta[0].clamp(lo[0], hi[0]), theta[1].clamp(lo[1], hi[1])]
}

/// Projected gradient ascent with Barzilai-Borwein steps and Armijo backtracking.
fn ascend(
    objective: &Evidence<'_>,
    start: [f64; 2],
    lo: [f64; 2],
    hi: [f64; 2],
    max_steps: usize,
) -> Option<([f64; 2], f64)> {
    let mut theta = project(start, lo, hi);
    let (mut f, mut g) = objective.value_and_grad(theta)?;
    let mut step = 0.1 / (g[0].abs() + g[1].abs()).max(1e-12);
    step = step.min(1.0);
    let mut prev: Option<([f64; 2], [f64; 2])> = None;
    for _ in 0..max_steps {
        if let Some((pt, pg)) = prev {
            let s = [theta[0] - pt[0], theta[1] - pt[1]];
            let yv = [g[0] - pg[0], g[1] - pg[1]];
            let sy = s[0] * yv[0] + s[1] * yv[1];
            let ss = s[0] * s[0] + s[1] * s[1];
            // ascent on a locally concave objective has s·y < 0
            if sy < 0.0 && ss > 0.0 {
                step = (ss / -sy).clamp(1e-8, 100.0);
            }
        }
        let mut accepted = None;
        let mut t = step;
        for _ in 0..30 {
            let cand = project([theta[0] + t * g[0], theta[1] + t * g[1]], lo, hi);
            let d = [cand[0] - theta[0], cand[1] - theta[1]];
            let dir = d[0] * g[0] + d[1] * g[1];
            if dir <= 0.0 {
                break;
            }
            if let Some((fc, gc)) = objective.value_and_grad(cand) {
                if fc >= f + 1e-4 * dir {
                    accepted = Some((cand, fc, gc));
                    break;
                }
            }
            t *= 0.3;
        }
        let Some((cand, fc, gc)) = accepted else {
            break;
        };
        let moved = (cand[0] - theta[0]).abs().max((cand[1] - theta[1]).abs());
        prev = Some((theta, g));
        let gain = fc - f;
        theta = cand;
        f = fc;
        g = gc;
        if moved < 1e-7 || gain.abs() < 1e-10 * (1.0 + f.abs()) {
            break;
        }
    }
    Some((theta, f))
}

/// Fits kernel hyperparameters within `bounds` and returns the posterior.
pub fn fit(
    data: &RegressionDataset,
    bounds: &HyperBounds,
    noise_var: f64,
    options: &FitOptions,
) -> Result<RegressionPosterior> {
    bounds.lengthscale.validate("lengthscale")?;
    bounds.variance.validate("variance")?;
    if !(noise_var >= 0.0 && noise_var.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "noise variance must be nonnegative, got {noise_var}"
        )));
    }
    let objective = Evidence {
        dist: distance_matrix(&data.x),
        y: DVector::from_column_slice(&data.y),
        noise_var,
        data,
    };
    let lo = [bounds.lengthscale.low.ln(), bounds.variance.low.ln()];
    let hi = [bounds.lengthscale.high.ln(), bounds.variance.high.ln()];

    let starts = latin_hypercube(options.restarts.max(1), bounds, options.seed);
    let mut best: Option<([f64; 2], f64)> = None;
    for start in starts {
        let theta0 = [start[0].ln(), start[1].ln()];
        if let Some((theta, f)) = ascend(&objective, theta0, lo, hi, options.max_steps) {
            if best.is_none_or(|(_, bf)| f > bf) {
                best = Some((theta, f));
            }
        }
    }
    let (theta, _) = best.ok_or_else(|| {
        Error::Numerical(format!(
            "Gram matrix of {} points could not be factorised for any start",
            data.len()
        ))
    })?;
    let params = KernelParams {
        lengthscale: theta[0].exp().clamp(bounds.lengthscale.low, bounds.lengthscale.high),
        variance: theta[1].exp().clamp(bounds.variance.low, bounds.variance.high),
    };
    RegressionPosterior::condition(data, params, noise_var)
}

/// `count` Latin-hypercube samples over the box, in natural coordinates.
fn latin_hypercube(count: usize, bounds: &HyperBounds, seed: u64) -> Vec<[f64; 2]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut strata: [Vec<usize>; 2] = [(0..count).collect(), (0..count).collect()];
    for s in strata.iter_mut() {
        for i in (1..s.len()).rev() {
            let j = rng.random_range(0..=i);
            s.swap(i, j);
        }
    }
    let ranges = [bounds.lengthscale, bounds.variance];
    (0..count)
        .map(|i| {
            let mut p = [0.0; 2];
            for d in 0..2 {
                let u = (strata[d][i] as f64 + rng.random::<f64>()) / count as f64;
                p[d] = ranges[d].low + u * (ranges[d].high - ranges[d].low);
            }
            p
        })
        .collect()
}

impl RegressionPosterior {
    /// Conditions the GP on `data` with fixed hyperparameters, escalating
    /// diagonal jitter from 1e-10 to 1e-6 if the factorisation fails.
    pub fn condition(
        data: &RegressionDataset,
        params: KernelParams,
        noise_var: f64,
    ) -> Result<Self> {
        let k = gram_from_distances(&distance_matrix(&data.x), &params, noise_var);
        let (chol, jitter) = factor_with_jitter(&k).ok_or_else(|| {
            Error::Numerical(format!(
                "Gram matrix of {} points is not positive definite even with jitter 1e-6",
                data.len()
            ))
        })?;
        let y = DVector::from_column_slice(&data.y);
        let (lml, weights) = lml_from_factor(&chol, &y);
        Ok(Self {
            params,
            noise_var,
            jitter,
            log_marginal_likelihood: lml,
            x: data.x.clone(),
            chol,
            weights,
        })
    }

    pub fn params(&self) -> KernelParams {
        self.params
    }

    pub fn noise_var(&self) -> f64 {
        self.noise_var
    }

    /// Diagonal jitter that was needed on top of the noise variance.
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    pub fn log_marginal_likelihood(&self) -> f64 {
        self.log_marginal_likelihood
    }

    pub fn dim(&self) -> usize {
        self.x[0].len()
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn predict(&self, query: &[f64]) -> Result<Prediction> {
        if query.len() != self.dim() {
            return Err(Error::InvalidArgument(format!(
                "query has dimension {} but the model was trained on {}",
                query.len(),
                self.dim()
            )));
        }
        Ok(self.predict_unchecked(query))
    }

    pub(crate) fn predict_unchecked(&self, query: &[f64]) -> Prediction {
        let kstar = DVector::from_vec(cross_covariance(query, &self.x, &self.params));
        let mean = kstar.dot(&self.weights);
        let mut v = kstar;
        self.chol.l_dirty().solve_lower_triangular_mut(&mut v);
        let var = (self.params.variance - v.norm_squared())
            .clamp(0.0, self.params.variance + self.noise_var);
        Prediction {
            mean,
            std: var.sqrt(),
        }
    }

    /// Predictions for many queries, evaluated in parallel.
    pub fn predict_many(&self, queries: &[Vec<f64>]) -> Result<Vec<Prediction>> {
        if let Some(q) = queries.iter().find(|q| q.len() != self.dim()) {
            return Err(Error::InvalidArgument(format!(
                "query has dimension {} but the model was trained on {}",
                q.len(),
                self.dim()
            )));
        }
        Ok(queries
            .par_iter()
            .map(|q| self.predict_unchecked(q))
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::matern52;
    use approx::assert_abs_diff_eq;

    const NOISE: f64 = 0.005 * 0.005;

    fn ds(x: &[f64], y: &[f64]) -> RegressionDataset {
        RegressionDataset::new(x.iter().map(|&v| vec![v]).collect(), y.to_vec()).unwrap()
    }

    #[test]
    fn empty_dataset_is_rejected() {
        assert!(matches!(
            RegressionDataset::new(vec![], vec![]),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn single_point_fit_interpolates() {
        let data = ds(&[0.5], &[0.3]);
        let post = fit(&data, &HyperBounds::default(), NOISE, &FitOptions::default()).unwrap();
        let p = post.predict(&[0.5]).unwrap();
        assert_abs_diff_eq!(p.mean, 0.3, epsilon = 1e-3);
        assert!(HyperBounds::default().lengthscale.contains(post.params().lengthscale));
        assert!(HyperBounds::default().variance.contains(post.params().variance));
    }

    #[test]
    fn lml_single_point_closed_form() {
        let data = ds(&[0.1], &[0.0]);
        let params = KernelParams::new(0.2, 1.0).unwrap();
        let lml = log_marginal_likelihood(&data, &params, 0.0).unwrap();
        assert_abs_diff_eq!(lml, -0.5 * LN_2PI, epsilon = 1e-14);
    }

    #[test]
    fn lml_two_point_matches_dense_gaussian_density() {
        let data = ds(&[0.1, 0.25], &[0.4, -0.7]);
        let params = KernelParams::new(0.15, 0.8).unwrap();
        let lml = log_marginal_likelihood(&data, &params, NOISE).unwrap();
        // direct 2x2 evaluation
        let k01 = matern52_at(0.15, &params);
        let (a, b, c) = (0.8 + NOISE, k01, 0.8 + NOISE);
        let det = a * c - b * b;
        let (y0, y1) = (0.4, -0.7);
        let quad = (c * y0 * y0 - 2.0 * b * y0 * y1 + a * y1 * y1) / det;
        let expected = -0.5 * quad - 0.5 * det.ln() - LN_2PI;
        assert_abs_diff_eq!(lml, expected, epsilon = 1e-10);
    }

    #[test]
    fn lml_rejects_duplicate_points_without_noise() {
        let data = ds(&[0.3, 0.3], &[1.0, 1.0]);
        let params = KernelParams::new(0.2, 1.0).unwrap();
        assert!(matches!(
            log_marginal_likelihood(&data, &params, 0.0),
            Err(Error::Numerical(_))
        ));
        // conditioning escalates jitter instead
        let post = RegressionPosterior::condition(&data, params, 0.0).unwrap();
        assert!(post.jitter() > 0.0);
    }

    #[test]
    fn analytic_gradient_matches_finite_differences() {
        let xs: Vec<f64> = (0..9).map(|i| i as f64 / 8.0).collect();
        let ys: Vec<f64> = xs.iter().map(|x| (8.0 * x).cos()).collect();
        let data = ds(&xs, &ys);
        let obj = Evidence {
            dist: distance_matrix(&data.x),
            y: DVector::from_column_slice(&data.y),
            noise_var: NOISE,
            data: &data,
        };
        for theta in [[(0.1f64).ln(), (0.7f64).ln()], [(0.03f64).ln(), (0.95f64).ln()]] {
            let (_, g) = obj.value_and_grad(theta).unwrap();
            for d in 0..2 {
                let h = 1e-5;
                let mut tp = theta;
                let mut tm = theta;
                tp[d] += h;
                tm[d] -= h;
                let fd = (obj.value_and_grad(tp).unwrap().0 - obj.value_and_grad(tm).unwrap().0)
                    / (2.0 * h);
                assert!(
                    (fd - g[d]).abs() <= 1e-5 * fd.abs().max(1.0),
                    "dim {d}: analytic {} vs fd {fd}",
                    g[d]
                );
            }
        }
    }

    #[test]
    fn fit_on_toy_samples_respects_bounds() {
        // 12 evenly spread points of cos(8x) outside the undefined band
        let xs: Vec<f64> = (0..12)
            .map(|i| i as f64 / 11.0)
            .map(|x| if x > 0.215 && x < 0.6 { x * 0.4 } else { x })
            .collect();
        let ys: Vec<f64> = xs.iter().map(|x| (8.0 * x).cos()).collect();
        let data = ds(&xs, &ys);
        let bounds = HyperBounds::default();
        let post = fit(&data, &bounds, NOISE, &FitOptions::default()).unwrap();
        assert!(post.params().lengthscale <= 0.2 + 1e-12);
        assert!(bounds.variance.contains(post.params().variance));
        // the fitted optimum is at least as good as every start corner
        for l in [0.01, 0.05, 0.2] {
            for v in [0.5, 1.0] {
                let p = KernelParams::new(l, v).unwrap();
                let other = log_marginal_likelihood(&data, &p, NOISE).unwrap();
                assert!(post.log_marginal_likelihood() >= other - 1e-6);
            }
        }
    }

    #[test]
    fn far_query_reverts_to_prior() {
        let data = ds(&[0.0, 0.1], &[0.5, -0.2]);
        let params = KernelParams::new(0.05, 0.9).unwrap();
        let post = RegressionPosterior::condition(&data, params, NOISE).unwrap();
        let p = post.predict(&[5.0]).unwrap();
        assert_abs_diff_eq!(p.mean, 0.0, epsilon = 1e-3);
        assert_abs_diff_eq!(p.std * p.std, 0.9, epsilon = 1e-3);
    }

    #[test]
    fn training_point_is_nearly_interpolated() {
        let xs = [0.05, 0.2, 0.45, 0.7, 0.9];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| (8.0 * x).cos()).collect();
        let data = ds(&xs, &ys);
        let post = RegressionPosterior::condition(&data, KernelParams::new(0.2, 1.0).unwrap(), NOISE)
            .unwrap();
        for (x, y) in xs.iter().zip(&ys) {
            let p = post.predict(&[*x]).unwrap();
            assert!((p.mean - y).abs() <= 0.01);
        }
    }

    #[test]
    fn training_std_below_midpoint_std() {
        let data = ds(&[0.2, 0.8], &[0.1, 0.3]);
        let post = RegressionPosterior::condition(&data, KernelParams::new(0.1, 1.0).unwrap(), NOISE)
            .unwrap();
        let at = post.predict(&[0.2]).unwrap().std;
        let mid = post.predict(&[0.5]).unwrap().std;
        assert!(at <= mid);
    }

    #[test]
    fn predict_rejects_dimension_mismatch() {
        let data = ds(&[0.2], &[0.1]);
        let post = RegressionPosterior::condition(&data, KernelParams::new(0.1, 1.0).unwrap(), NOISE)
            .unwrap();
        assert!(post.predict(&[0.1, 0.2]).is_err());
    }

    #[test]
    fn two_point_posterior_matches_dense_inverse() {
        let params = KernelParams::new(0.2, 0.8).unwrap();
        let noise = 1e-4;
        let (x1, x2, y1, y2) = (0.1, 0.3, 0.7, -0.4);
        let post = RegressionPosterior::condition(&ds(&[x1, x2], &[y1, y2]), params, noise).unwrap();
        let k = |a: f64, b: f64| matern52(&[a], &[b], &params).unwrap();
        // explicit 2×2 inverse
        let (a, b, d) = (k(x1, x1) + noise, k(x1, x2), k(x2, x2) + noise);
        let det = a * d - b * b;
        let inv = [[d / det, -b / det], [-b / det, a / det]];
        for i in 0..=50 {
            let q = -0.2 + 1.4 * i as f64 / 50.0;
            let ks = [k(q, x1), k(q, x2)];
            let w = [
                inv[0][0] * ks[0] + inv[0][1] * ks[1],
                inv[1][0] * ks[0] + inv[1][1] * ks[1],
            ];
            let mean = w[0] * y1 + w[1] * y2;
            let var = params.variance - (w[0] * ks[0] + w[1] * ks[1]);
            let p = post.predict(&[q]).unwrap();
            assert_abs_diff_eq!(p.mean, mean, epsilon = 1e-10);
            assert_abs_diff_eq!(p.std * p.std, var.max(0.0), epsilon = 1e-10);
        }
    }

    #[test]
    fn variances_are_nonnegative_on_many_queries() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let x: Vec<Vec<f64>> = (0..40).map(|_| vec![rng.random(), rng.random()]).collect();
        let y: Vec<f64> = x.iter().map(|p| (6.0 * p[0]).sin() - p[1]).collect();
        let post = fit(
            &RegressionDataset::new(x.clone(), y).unwrap(),
            &HyperBounds::default(),
            NOISE,
            &FitOptions::default(),
        )
        .unwrap();
        let mut queries: Vec<Vec<f64>> = (0..9_960)
            .map(|_| vec![rng.random_range(-0.5..1.5), rng.random_range(-0.5..1.5)])
            .collect();
        queries.extend(x);
        for p in post.predict_many(&queries).unwrap() {
            assert!(p.std >= 0.0 && p.std.is_finite() && p.mean.is_finite());
        }
    }
}
