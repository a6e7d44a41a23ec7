//! Binary GP classification with a probit likelihood, fitted by sequential
//! expectation propagation.
//!
//! The updates follow the usual site formulation: each sweep visits the sites
//! in index order, applies a rank-one update to the approximate posterior
//! covariance, and the covariance is then rebuilt from the sites through the
//! well-conditioned `B = I + S^½ K S^½` factorisation.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{
    check_rows, cross_covariance, distance_matrix, gram_from_distances, inverse_mills_ratio,
    ln_std_normal_cdf, std_normal_cdf, KernelParams,
};
use crate::regression::{strict_cholesky, Bounds};

/// Smallest and largest probability returned by the classifier.
const PROB_FLOOR: f64 = f64::MIN_POSITIVE;
const PROB_CEIL: f64 = 1.0 - f64::EPSILON / 2.0;

/// Inputs with ±1 labels; `+1` marks the event being modelled.
#[derive(Debug, Clone)]
pub struct ClassificationDataset {
    x: Vec<Vec<f64>>,
    labels: Vec<f64>,
}

impl ClassificationDataset {
    pub fn new(x: Vec<Vec<f64>>, labels: Vec<i8>) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::Precondition("classification dataset is empty".into()));
        }
        if x.len() != labels.len() {
            return Err(Error::InvalidArgument(format!(
                "{} inputs but {} labels",
                x.len(),
                labels.len()
            )));
        }
        check_rows(&x)?;
        if let Some(i) = labels.iter().position(|&l| l != 1 && l != -1) {
            return Err(Error::InvalidArgument(format!(
                "label {i} is {}, expected +1 or -1",
                labels[i]
            )));
        }
        Ok(Self {
            x,
            labels: labels.into_iter().map(f64::from).collect(),
        })
    }

    /// Builds a dataset from boolean events (`true` ↦ `+1`).
    pub fn from_events(x: Vec<Vec<f64>>, events: &[bool]) -> Result<Self> {
        Self::new(x, events.iter().map(|&e| if e { 1 } else { -1 }).collect())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.x[0].len()
    }

    pub fn inputs(&self) -> &[Vec<f64>] {
        &self.x
    }

    pub fn labels(&self) -> impl Iterator<Item = i8> + '_ {
        self.labels.iter().map(|&l| l as i8)
    }

    /// Same inputs with every label negated.
    pub fn flipped(&self) -> Self {
        Self {
            x: self.x.clone(),
            labels: self.labels.iter().map(|l| -l).collect(),
        }
    }
}

/// Convergence controls for the EP sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpOptions {
    /// Maximum absolute change of any site parameter in a sweep.
    pub tolerance: f64,
    pub max_sweeps: usize,
}

impl Default for EpOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-6,
            max_sweeps: 100,
        }
    }
}

/// Site parameters in natural form: precision `τ̃ ≥ 0` and precision-scaled
/// mean `ν̃`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sites {
    pub precision: Vec<f64>,
    pub scaled_mean: Vec<f64>,
}

impl Sites {
    fn zeros(n: usize) -> Self {
        Self {
            precision: vec![0.0; n],
            scaled_mean: vec![0.0; n],
        }
    }
}

/// Converged EP approximation of a probit GP classifier.
#[derive(Debug, Clone)]
pub struct EpPosterior {
    params: KernelParams,
    x: Vec<Vec<f64>>,
    sites: Sites,
    sqrt_precision: DVector<f64>,
    /// Cholesky factor of `I + S^½ K S^½`.
    chol_b: Cholesky<f64, Dyn>,
    /// `ν̃ − S^½ B⁻¹ S^½ K ν̃`, so the latent mean is `k*ᵀ · weights`.
    weights: DVector<f64>,
    log_evidence: f64,
    sweeps: usize,
}

/// Posterior state rebuilt from the sites.
struct Rebuilt {
    sqrt_precision: DVector<f64>,
    chol_b: Cholesky<f64, Dyn>,
    sigma: DMatrix<f64>,
    mu: DVector<f64>,
}

fn rebuild(k: &DMatrix<f64>, sites: &Sites) -> Result<Rebuilt> {
    let n = k.nrows();
    let sw = DVector::from_iterator(n, sites.precision.iter().map(|t| t.max(0.0).sqrt()));
    let mut b = DMatrix::from_fn(n, n, |i, j| sw[i] * k[(i, j)] * sw[j]);
    for i in 0..n {
        b[(i, i)] += 1.0;
    }
    let chol_b = strict_cholesky(b).ok_or_else(|| {
        Error::Numerical(format!("EP matrix I + S^½KS^½ of size {n} did not factorise"))
    })?;
    // V = L⁻¹ S^½ K, Σ = K − VᵀV
    let mut v = DMatrix::from_fn(n, n, |i, j| sw[i] * k[(i, j)]);
    chol_b.l_dirty().solve_lower_triangular_mut(&mut v);
    let sigma = k - v.transpose() * &v;
    let nu = DVector::from_column_slice(&sites.scaled_mean);
    let mu = &sigma * nu;
    Ok(Rebuilt {
        sqrt_precision: sw,
        chol_b,
        sigma,
        mu,
    })
}

/// Moments of the tilted distribution `Φ(y f) N(f | m, s²)`.
fn tilted_moments(y: f64, cav_mean: f64, cav_var: f64) -> (f64, f64, f64) {
    let denom = (1.0 + cav_var).sqrt();
    let z = y * cav_mean / denom;
    let ratio = inverse_mills_ratio(z);
    let mean = cav_mean + y * cav_var * ratio / denom;
    let var = cav_var - cav_var * cav_var * ratio * (z + ratio) / (1.0 + cav_var);
    (ln_std_normal_cdf(z), mean, var)
}

/// Approximate log evidence `log Z_EP` for a zero-mean prior.
fn log_evidence(labels: &[f64], sites: &Sites, state: &Rebuilt) -> Result<f64> {
    let n = labels.len();
    let mut total = 0.0;
    let l = state.chol_b.l_dirty();
    for i in 0..n {
        total -= l[(i, i)].ln();
    }
    let nu = DVector::from_column_slice(&sites.scaled_mean);
    total += 0.5 * nu.dot(&(&state.sigma * &nu));
    for i in 0..n {
        let s_ii = state.sigma[(i, i)];
        let tau_t = sites.precision[i];
        let nu_t = sites.scaled_mean[i];
        let tau_c = 1.0 / s_ii - tau_t;
        let nu_c = state.mu[i] / s_ii - nu_t;
        if !(tau_c > 0.0) {
            return Err(Error::Numerical(format!(
                "nonpositive cavity precision {tau_c:e} at site {i}"
            )));
        }
        let (ln_z, _, _) = tilted_moments(labels[i], nu_c / tau_c, 1.0 / tau_c);
        total += ln_z;
        total += nu_c * ((tau_t / tau_c) * nu_c - 2.0 * nu_t) / (tau_t + tau_c) / 2.0;
        total -= nu_t * nu_t / (tau_c + tau_t) / 2.0;
        total += (tau_t / tau_c).ln_1p() / 2.0;
    }
    Ok(total)
}

fn run_ep(
    data: &ClassificationDataset,
    params: KernelParams,
    init: Option<&Sites>,
    options: &EpOptions,
) -> Result<EpPosterior> {
    let n = data.len();
    let k = gram_from_distances(&distance_matrix(&data.x), &params, 0.0);
    let mut sites = match init {
        Some(s) if s.precision.len() == n => s.clone(),
        _ => Sites::zeros(n),
    };
    let mut state = rebuild(&k, &sites)?;
    let labels = &data.labels;
    let mut sweeps = 0;
    let mut residual = f64::INFINITY;
    while sweeps < options.max_sweeps {
        sweeps += 1;
        residual = 0.0;
        for i in 0..n {
            let s_ii = state.sigma[(i, i)];
            let tau_c = 1.0 / s_ii - sites.precision[i];
            let nu_c = state.mu[i] / s_ii - sites.scaled_mean[i];
            if !(tau_c > 0.0 && tau_c.is_finite()) {
                return Err(Error::Numerical(format!(
                    "nonpositive cavity precision {tau_c:e} at site {i}"
                )));
            }
            let (_, hat_mean, hat_var) = tilted_moments(labels[i], nu_c / tau_c, 1.0 / tau_c);
            if !(hat_var > 0.0 && hat_mean.is_finite()) {
                return Err(Error::Numerical(format!(
                    "degenerate tilted moments at site {i} (variance {hat_var:e})"
                )));
            }
            let new_tau = (1.0 / hat_var - tau_c).max(0.0);
            let new_nu = hat_mean / hat_var - nu_c;
            let d_tau = new_tau - sites.precision[i];
            let d_nu = new_nu - sites.scaled_mean[i];
            residual = residual.max(d_tau.abs()).max(d_nu.abs());
            sites.precision[i] = new_tau;
            sites.scaled_mean[i] = new_nu;

            let col = state.sigma.column(i).clone_owned();
            let scale = d_tau / (1.0 + d_tau * s_ii);
            state.sigma.ger(-scale, &col, &col, 1.0);
            let nu = DVector::from_column_slice(&sites.scaled_mean);
            state.mu = &state.sigma * nu;
        }
        state = rebuild(&k, &sites)?;
        if residual < options.tolerance {
            break;
        }
    }
    if !(residual < options.tolerance) {
        return Err(Error::Convergence { sweeps, residual });
    }

    let log_evidence = log_evidence(labels, &sites, &state)?;
    let nu = DVector::from_column_slice(&sites.scaled_mean);
    // weights = ν̃ − S^½ B⁻¹ S^½ K ν̃
    let mut t = state.sqrt_precision.component_mul(&(&k * &nu));
    t = state.chol_b.solve(&t);
    let weights = nu - state.sqrt_precision.component_mul(&t);
    Ok(EpPosterior {
        params,
        x: data.x.clone(),
        sites,
        sqrt_precision: state.sqrt_precision,
        chol_b: state.chol_b,
        weights,
        log_evidence,
        sweeps,
    })
}

/// Fits EP with fixed kernel hyperparameters.
pub fn fit_ep(data: &ClassificationDataset, params: KernelParams) -> Result<EpPosterior> {
    run_ep(data, params, None, &EpOptions::default())
}

/// [`fit_ep`] with explicit convergence options and optional warm-start sites.
pub fn fit_ep_with(
    data: &ClassificationDataset,
    params: KernelParams,
    init: Option<&Sites>,
    options: &EpOptions,
) -> Result<EpPosterior> {
    run_ep(data, params, init, options)
}

/// Fits EP with fixed `variance`, choosing the lengthscale in `bounds` that
/// maximises the EP approximate evidence.
///
/// The search is a log-spaced grid followed by golden-section refinement
/// around the best grid point. Lengthscales at which EP fails are skipped.
pub fn fit_ep_lengthscale(
    data: &ClassificationDataset,
    variance: f64,
    bounds: Bounds,
    options: &EpOptions,
) -> Result<EpPosterior> {
    bounds.validate("lengthscale")?;
    let lo = bounds.low.ln();
    let hi = bounds.high.ln();
    const GRID: usize = 8;
    let mut last_sites: Option<Sites> = None;
    let evaluate = |log_l: f64, warm: &mut Option<Sites>| -> Option<EpPosterior> {
        let params = KernelParams::new(log_l.exp(), variance).ok()?;
        let post = run_ep(data, params, warm.as_ref(), options)
            .or_else(|_| run_ep(data, params, None, options))
            .ok()?;
        *warm = Some(post.sites.clone());
        Some(post)
    };

    // grid from the long end down, warm-starting each fit from its neighbour
    let grid: Vec<f64> = (0..GRID)
        .map(|i| hi - (hi - lo) * i as f64 / (GRID - 1) as f64)
        .collect();
    let mut evaluated: Vec<(f64, EpPosterior)> = Vec::with_capacity(GRID + 12);
    for &g in &grid {
        if let Some(post) = evaluate(g, &mut last_sites) {
            evaluated.push((g, post));
        }
    }
    let best_idx = evaluated
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .1.log_evidence.total_cmp(&b.1 .1.log_evidence))
        .map(|(i, _)| i)
        .ok_or_else(|| {
            Error::Numerical(format!(
                "EP failed at every lengthscale for {} points",
                data.len()
            ))
        })?;
    let center = evaluated[best_idx].0;
    let step = (hi - lo) / (GRID - 1) as f64;
    let (mut a, mut b) = ((center - step).max(lo), (center + step).min(hi));
    let mut best = evaluated.swap_remove(best_idx).1;
    let mut warm = Some(best.sites.clone());

    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = evaluate(c, &mut warm);
    let mut fd = evaluate(d, &mut warm);
    let score = |p: &Option<EpPosterior>| p.as_ref().map_or(f64::NEG_INFINITY, |p| p.log_evidence);
    for _ in 0..10 {
        if score(&fc) >= score(&fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = evaluate(c, &mut warm);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = evaluate(d, &mut warm);
        }
    }
    for cand in [fc, fd].into_iter().flatten() {
        if cand.log_evidence > best.log_evidence {
            best = cand;
        }
    }
    Ok(best)
}

impl EpPosterior {
    pub fn params(&self) -> KernelParams {
        self.params
    }

    pub fn sites(&self) -> &Sites {
        &self.sites
    }

    pub fn log_evidence(&self) -> f64 {
        self.log_evidence
    }

    pub fn sweeps(&self) -> usize {
        self.sweeps
    }

    pub fn dim(&self) -> usize {
        self.x[0].len()
    }

    /// Latent predictive mean and variance at `query`.
    pub fn latent(&self, query: &[f64]) -> Result<(f64, f64)> {
        self.check_dim(query)?;
        Ok(self.latent_unchecked(query))
    }

    fn check_dim(&self, query: &[f64]) -> Result<()> {
        if query.len() != self.dim() {
            return Err(Error::InvalidArgument(format!(
                "query has dimension {} but the classifier was trained on {}",
                query.len(),
                self.dim()
            )));
        }
        Ok(())
    }

    fn latent_unchecked(&self, query: &[f64]) -> (f64, f64) {
        let kstar = DVector::from_vec(cross_covariance(query, &self.x, &self.params));
        let mean = kstar.dot(&self.weights);
        let mut v = self.sqrt_precision.component_mul(&kstar);
        self.chol_b.l_dirty().solve_lower_triangular_mut(&mut v);
        let var = (self.params.variance - v.norm_squared()).max(0.0);
        (mean, var)
    }

    fn probit_argument(&self, query: &[f64]) -> f64 {
        let (mean, var) = self.latent_unchecked(query);
        mean / (1.0 + var).sqrt()
    }

    /// `p(label = +1 | query)`, strictly inside (0, 1).
    pub fn predict_prob(&self, query: &[f64]) -> Result<f64> {
        self.check_dim(query)?;
        Ok(clamp_prob(std_normal_cdf(self.probit_argument(query))))
    }

    /// `p(label = −1 | query)`, computed without cancellation.
    pub fn predict_prob_negative(&self, query: &[f64]) -> Result<f64> {
        self.check_dim(query)?;
        Ok(clamp_prob(std_normal_cdf(-self.probit_argument(query))))
    }

    /// Positive-class probabilities for many queries, evaluated in parallel.
    pub fn predict_prob_many(&self, queries: &[Vec<f64>]) -> Result<Vec<f64>> {
        for q in queries {
            self.check_dim(q)?;
        }
        Ok(queries
            .par_iter()
            .map(|q| clamp_prob(std_normal_cdf(self.probit_argument(q))))
            .collect())
    }

    /// `(p(+1), p(−1))` pairs for many queries.
    pub(crate) fn predict_both_many(&self, queries: &[Vec<f64>]) -> Vec<(f64, f64)> {
        queries
            .par_iter()
            .map(|q| {
                let z = self.probit_argument(q);
                (clamp_prob(std_normal_cdf(z)), clamp_prob(std_normal_cdf(-z)))
            })
            .collect()
    }
}

fn clamp_prob(p: f64) -> f64 {
    p.clamp(PROB_FLOOR, PROB_CEIL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::matern52;
    use approx::assert_abs_diff_eq;

    fn one_d(x: &[f64], labels: &[i8]) -> ClassificationDataset {
        ClassificationDataset::new(x.iter().map(|&v| vec![v]).collect(), labels.to_vec()).unwrap()
    }

    #[test]
    fn rejects_bad_labels_and_empty_data() {
        assert!(ClassificationDataset::new(vec![vec![0.0]], vec![0]).is_err());
        assert!(matches!(
            ClassificationDataset::new(vec![], vec![]),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn one_class_predicts_above_half_in_hull() {
        let data = one_d(&[0.1, 0.3, 0.5, 0.7, 0.9], &[1, 1, 1, 1, 1]);
        let post = fit_ep(&data, KernelParams::new(0.2, 1.0).unwrap()).unwrap();
        for i in 0..=80 {
            let x = 0.1 + 0.8 * i as f64 / 80.0;
            assert!(post.predict_prob(&[x]).unwrap() > 0.5);
        }
    }

    #[test]
    fn symmetric_pair_gives_half_at_midpoint() {
        let data = one_d(&[-1.0, 1.0], &[-1, 1]);
        let post = fit_ep(&data, KernelParams::new(1.0, 1.0).unwrap()).unwrap();
        assert_abs_diff_eq!(post.predict_prob(&[0.0]).unwrap(), 0.5, epsilon = 1e-6);
    }

    #[test]
    fn far_query_reverts_to_half() {
        let data = one_d(&[0.1, 0.2, 0.3], &[1, 1, -1]);
        let post = fit_ep(&data, KernelParams::new(0.1, 4.0).unwrap()).unwrap();
        assert_abs_diff_eq!(post.predict_prob(&[50.0]).unwrap(), 0.5, epsilon = 1e-9);
    }

    #[test]
    fn large_prior_variance_is_near_deterministic_inside_cluster() {
        let xs: Vec<f64> = (0..8).map(|i| 0.4 + 0.02 * i as f64).collect();
        let mut x = xs.clone();
        x.extend([0.0, 0.05, 0.95, 1.0]);
        let mut labels = vec![1i8; 8];
        labels.extend([-1, -1, -1, -1]);
        let data = one_d(&x, &labels);
        let post = fit_ep(&data, KernelParams::new(0.2, 1e5).unwrap()).unwrap();
        assert!(post.predict_prob(&[0.47]).unwrap() > 0.99);
    }

    #[test]
    fn site_precisions_are_nonnegative() {
        let data = one_d(&[0.0, 0.01, 0.02, 0.5, 0.51], &[1, -1, 1, -1, 1]);
        let post = fit_ep(&data, KernelParams::new(0.2, 100.0).unwrap()).unwrap();
        assert!(post.sites().precision.iter().all(|&t| t >= 0.0));
    }

    #[test]
    fn non_convergence_reports_residual() {
        let data = one_d(&[0.0, 0.3, 0.6], &[1, -1, 1]);
        let opts = EpOptions {
            tolerance: 1e-300,
            max_sweeps: 2,
        };
        match fit_ep_with(&data, KernelParams::new(0.2, 1.0).unwrap(), None, &opts) {
            Err(Error::Convergence { sweeps, residual }) => {
                assert_eq!(sweeps, 2);
                assert!(residual > 0.0);
            }
            other => panic!("expected convergence error, got {other:?}"),
        }
    }

    #[test]
    fn warm_start_reaches_the_same_fixed_point() {
        let data = one_d(&[0.0, 0.1, 0.2, 0.3, 0.4], &[1, 1, -1, -1, 1]);
        let params = KernelParams::new(0.15, 10.0).unwrap();
        let cold = fit_ep(&data, params).unwrap();
        let other = fit_ep(&data, KernelParams::new(0.05, 10.0).unwrap()).unwrap();
        let warm = fit_ep_with(&data, params, Some(other.sites()), &EpOptions::default()).unwrap();
        for q in [0.05, 0.17, 0.33] {
            assert_abs_diff_eq!(
                cold.predict_prob(&[q]).unwrap(),
                warm.predict_prob(&[q]).unwrap(),
                epsilon = 1e-6
            );
        }
    }

    #[test]
    fn evidence_search_stays_in_bounds() {
        let x: Vec<f64> = (0..15).map(|i| i as f64 / 14.0).collect();
        let labels: Vec<i8> = x.iter().map(|&v| if v > 0.215 && v < 0.6 { 1 } else { -1 }).collect();
        let data = one_d(&x, &labels);
        let bounds = Bounds::new(1e-6, 0.2);
        let post = fit_ep_lengthscale(&data, 1e5, bounds, &EpOptions::default()).unwrap();
        assert!(bounds.contains(post.params().lengthscale));
        assert!(post.predict_prob(&[0.4]).unwrap() > 0.5);
        assert!(post.predict_prob(&[0.9]).unwrap() < 0.5);
        // no grid point beats the refined optimum
        for l in [1e-3, 0.01, 0.05, 0.1, 0.2] {
            let other = fit_ep(&data, KernelParams::new(l, 1e5).unwrap()).unwrap();
            assert!(post.log_evidence() >= other.log_evidence() - 1e-6);
        }
    }

    /// Moments of `Φ(y f) N(f | m, v)` by composite Simpson quadrature.
    fn tilted_by_quadrature(y: f64, m: f64, v: f64) -> (f64, f64, f64) {
        let sd = v.sqrt();
        let (a, b) = (m - 12.0 * sd, m + 12.0 * sd);
        let n = 8000;
        let h = (b - a) / n as f64;
        let (mut z, mut z1, mut z2) = (0.0, 0.0, 0.0);
        for k in 0..=n {
            let f = a + k as f64 * h;
            let w = if k == 0 || k == n { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 };
            let g = w * std_normal_cdf(y * f) * (-(f - m).powi(2) / (2.0 * v)).exp();
            z += g;
            z1 += g * f;
            z2 += g * f * f;
        }
        let mean = z1 / z;
        (z * h / 3.0 / (2.0 * std::f64::consts::PI * v).sqrt(), mean, z2 / z - mean * mean)
    }

    /// Dense EP with explicit inverses and quadrature moments; returns the
    /// predictive `p(+1)` at `queries`.
    fn dense_ep_oracle(x: &[f64], y: &[f64], params: KernelParams, queries: &[f64]) -> Vec<f64> {
        let n = x.len();
        let k = DMatrix::from_fn(n, n, |i, j| matern52(&[x[i]], &[x[j]], &params).unwrap());
        let k_inv = k.clone().try_inverse().unwrap();
        let mut tau = vec![0.0; n];
        let mut nu = vec![0.0; n];
        for _ in 0..200 {
            let mut change: f64 = 0.0;
            for i in 0..n {
                let sigma = (&k_inv + DMatrix::from_diagonal(&DVector::from_vec(tau.clone())))
                    .try_inverse()
                    .unwrap();
                let mu = &sigma * DVector::from_vec(nu.clone());
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
        let sigma = (&k_inv + DMatrix::from_diagonal(&DVector::from_vec(tau)))
            .try_inverse()
            .unwrap();
        let mu = &sigma * DVector::from_vec(nu);
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

    #[test]
    fn matches_dense_quadrature_oracle() {
        let cases: [(&[f64], &[i8], f64, f64); 4] = [
            (&[0.4], &[1], 0.2, 1.0),
            (&[0.1, 0.3], &[1, -1], 0.2, 4.0),
            (&[0.1, 0.25, 0.6], &[1, -1, 1], 0.3, 1.0),
            (&[0.2, 0.5, 0.55], &[-1, 1, 1], 0.15, 10.0),
        ];
        for (x, labels, l, v) in cases {
            let params = KernelParams::new(l, v).unwrap();
            let post = fit_ep(&one_d(x, labels), params).unwrap();
            let y: Vec<f64> = labels.iter().map(|&l| l as f64).collect();
            let queries: Vec<f64> = (0..=40).map(|i| -0.1 + 1.2 * i as f64 / 40.0).collect();
            let oracle = dense_ep_oracle(x, &y, params, &queries);
            for (q, o) in queries.iter().zip(oracle) {
                assert_abs_diff_eq!(post.predict_prob(&[*q]).unwrap(), o, epsilon = 1e-3);
            }
        }
    }

    #[test]
    fn single_site_evidence_is_exact() {
        // Z = P(y f > ε) = ½ for any prior variance
        for v in [0.5, 1.0, 100.0] {
            let post = fit_ep(&one_d(&[0.3], &[-1]), KernelParams::new(0.2, v).unwrap()).unwrap();
            assert_abs_diff_eq!(post.log_evidence(), 0.5f64.ln(), epsilon = 1e-9);
        }
        let (ln_z, _, _) = tilted_moments(1.0, 0.3, 2.0);
        let (z, _, _) = tilted_by_quadrature(1.0, 0.3, 2.0);
        assert_abs_diff_eq!(ln_z.exp(), z, epsilon = 1e-9);
    }

    fn mixed_data() -> ClassificationDataset {
        one_d(
            &[0.05, 0.12, 0.3, 0.33, 0.5, 0.61, 0.7, 0.92],
            &[1, 1, -1, -1, 1, -1, -1, 1],
        )
    }

    #[test]
    fn label_flip_is_antisymmetric() {
        let params = KernelParams::new(0.1, 5.0).unwrap();
        let data = mixed_data();
        let a = fit_ep(&data, params).unwrap();
        let b = fit_ep(&data.flipped(), params).unwrap();
        for i in 0..=100 {
            let q = [i as f64 / 100.0];
            assert_abs_diff_eq!(
                b.predict_prob(&q).unwrap(),
                a.predict_prob_negative(&q).unwrap(),
                epsilon = 1e-9
            );
        }
    }

    #[test]
    fn permutation_invariant() {
        let params = KernelParams::new(0.1, 5.0).unwrap();
        let data = mixed_data();
        let mut idx: Vec<usize> = (0..data.len()).collect();
        idx.reverse();
        idx.swap(0, 3);
        let labels: Vec<i8> = data.labels().collect();
        let permuted = ClassificationDataset::new(
            idx.iter().map(|&i| data.inputs()[i].clone()).collect(),
            idx.iter().map(|&i| labels[i]).collect(),
        )
        .unwrap();
        // sweep order only moves the stopping point, not the fixed point
        let tight = EpOptions {
            tolerance: 1e-12,
            max_sweeps: 1000,
        };
        let a = fit_ep_with(&data, params, None, &tight).unwrap();
        let b = fit_ep_with(&permuted, params, None, &tight).unwrap();
        assert_abs_diff_eq!(a.log_evidence(), b.log_evidence(), epsilon = 1e-9);
        for i in 0..=100 {
            let q = [i as f64 / 100.0];
            assert_abs_diff_eq!(
                a.predict_prob(&q).unwrap(),
                b.predict_prob(&q).unwrap(),
                epsilon = 1e-9
            );
        }
    }

    #[test]
    fn predictions_are_finite_probabilities_everywhere() {
        let post = fit_ep_lengthscale(
            &mixed_data(),
            1e5,
            Bounds::new(1e-6, 0.2),
            &EpOptions::default(),
        )
        .unwrap();
        let queries: Vec<Vec<f64>> = (0..10_000).map(|i| vec![-1.0 + 3.0 * i as f64 / 9_999.0]).collect();
        for q in &queries {
            let (_, var) = post.latent(q).unwrap();
            assert!(var >= 0.0 && var.is_finite());
        }
        for p in post.predict_prob_many(&queries).unwrap() {
            assert!(p > 0.0 && p < 1.0, "{p}");
        }
    }
}
