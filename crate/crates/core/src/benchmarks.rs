//! Systems under test with known failure probabilities, and a plain Monte
//! Carlo estimator used as ground truth.
//!
//! Systems are evaluated in normalised coordinates: every benchmark input
//! domain is mapped affinely onto `[0, 1]^k`, and `p(x)` is uniform on it.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Output of a system: a real safety margin, or no value at all.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "Option<f64>", into = "Option<f64>")]
pub enum PerformanceValue {
    Defined(f64),
    Undefined,
}

impl PerformanceValue {
    pub fn is_defined(&self) -> bool {
        matches!(self, PerformanceValue::Defined(_))
    }

    pub fn value(&self) -> Option<f64> {
        match *self {
            PerformanceValue::Defined(v) => Some(v),
            PerformanceValue::Undefined => None,
        }
    }

    /// The failure event: defined and strictly negative.
    pub fn is_failure(&self) -> bool {
        matches!(*self, PerformanceValue::Defined(v) if v < 0.0)
    }
}

impl From<Option<f64>> for PerformanceValue {
    fn from(v: Option<f64>) -> Self {
        match v {
            Some(v) => PerformanceValue::Defined(v),
            None => PerformanceValue::Undefined,
        }
    }
}

impl From<PerformanceValue> for Option<f64> {
    fn from(v: PerformanceValue) -> Self {
        v.value()
    }
}

/// A deterministic performance function over the normalised unit box.
pub trait System: Send + Sync {
    fn name(&self) -> &str;

    fn dim(&self) -> usize;

    /// Evaluates the system at `u ∈ [0, 1]^dim`.
    fn evaluate(&self, u: &[f64]) -> Result<PerformanceValue>;
}

/// Draws i.i.d. inputs from `p(x)` in normalised coordinates.
pub trait Sampler: Send + Sync {
    fn dim(&self) -> usize;

    fn sample(&self, rng: &mut dyn RngCore) -> Vec<f64>;
}

/// Uniform distribution on `[0, 1]^dim`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UniformUnitBox {
    pub dim: usize,
}

impl Sampler for UniformUnitBox {
    fn dim(&self) -> usize {
        self.dim
    }

    fn sample(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        (0..self.dim).map(|_| rng.random::<f64>()).collect()
    }
}

fn check_unit(u: &[f64], dim: usize) -> Result<()> {
    if u.len() != dim {
        return Err(Error::InvalidArgument(format!(
            "expected a {dim}-dimensional input, got {}",
            u.len()
        )));
    }
    if u.iter().any(|v| !(0.0..=1.0).contains(v)) {
        return Err(Error::InvalidArgument(format!(
            "normalised input {u:?} outside [0, 1]^{dim}"
        )));
    }
    Ok(())
}

/// One-dimensional function, undefined on an open band:
/// `g(x) = cos(8x)` outside `(0.215, 0.6)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToySystem {
    pub band: (f64, f64),
}

impl Default for ToySystem {
    fn default() -> Self {
        Self { band: (0.215, 0.6) }
    }
}

/// The toy performance function on `x ∈ [0, 1]`.
pub fn toy_g(x: f64) -> Result<PerformanceValue> {
    ToySystem::default().g(x)
}

impl ToySystem {
    pub fn g(&self, x: f64) -> Result<PerformanceValue> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::InvalidArgument(format!("toy input {x} outside [0, 1]")));
        }
        if x > self.band.0 && x < self.band.1 {
            Ok(PerformanceValue::Undefined)
        } else {
            Ok(PerformanceValue::Defined((8.0 * x).cos()))
        }
    }
}

impl System for ToySystem {
    fn name(&self) -> &str {
        "toy"
    }

    fn dim(&self) -> usize {
        1
    }

    fn evaluate(&self, u: &[f64]) -> Result<PerformanceValue> {
        check_unit(u, 1)?;
        self.g(u[0])
    }
}

/// Exact failure probability of the toy system:
/// the measure of `(π/16, 0.215] ∪ [5π/16, 1]`.
pub fn toy_pf_analytic() -> f64 {
    use std::f64::consts::PI;
    (0.215 - PI / 16.0) + (1.0 - 5.0 * PI / 16.0)
}

/// Vehicle joining a main road at a T-junction, in a point-mass model.
///
/// The oncoming vehicle starts at `x_a ∈ [−100, 0]` m with speed
/// `v_a ∈ [10, 15]` m/s; the ego vehicle accelerates at `a_ego`.
/// The performance is the closest approach minus `d_threshold`, divided by
/// `rescale`, and is undefined when the ego vehicle sees the other car and
/// declines to merge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TJunctionSystem {
    pub x_a_range: (f64, f64),
    pub v_a_range: (f64, f64),
    pub d_threshold: f64,
    pub a_ego: f64,
    pub x_lim: f64,
    pub rescale: f64,
}

impl Default for TJunctionSystem {
    fn default() -> Self {
        Self {
            x_a_range: (-100.0, 0.0),
            v_a_range: (10.0, 15.0),
            d_threshold: 20.0,
            a_ego: 2.0,
            x_lim: 60.0,
            rescale: 20.0,
        }
    }
}

impl TJunctionSystem {
    /// Closest approach `max(−(x_a + v_a²/(2 a_ego)), 0)`.
    pub fn d_min(&self, x_a: f64, v_a: f64) -> f64 {
        (-(x_a + v_a * v_a / (2.0 * self.a_ego))).max(0.0)
    }

    pub fn g(&self, x_a: f64, v_a: f64) -> Result<PerformanceValue> {
        let (xl, xh) = self.x_a_range;
        let (vl, vh) = self.v_a_range;
        if !(xl..=xh).contains(&x_a) || !(vl..=vh).contains(&v_a) {
            return Err(Error::InvalidArgument(format!(
                "T-junction input (x_a={x_a}, v_a={v_a}) outside [{xl}, {xh}] x [{vl}, {vh}]"
            )));
        }
        let d = self.d_min(x_a, v_a);
        if d < self.d_threshold && x_a.abs() < self.x_lim {
            Ok(PerformanceValue::Undefined)
        } else {
            Ok(PerformanceValue::Defined((d - self.d_threshold) / self.rescale))
        }
    }

    /// Maps normalised coordinates to `(x_a, v_a)`.
    pub fn to_physical(&self, u: &[f64]) -> (f64, f64) {
        let (xl, xh) = self.x_a_range;
        let (vl, vh) = self.v_a_range;
        (xl + (xh - xl) * u[0], vl + (vh - vl) * u[1])
    }

    /// Failure probability by integrating the failure-interval length in
    /// `x_a` over `v_a`.
    ///
    /// For the default parameters the failure set is
    /// `x_a ∈ (−(d_threshold + v_a²/(2 a_ego)), −x_lim]`, non-empty once
    /// `v_a² > 2 a_ego (x_lim − d_threshold)`.
    pub fn pf_semi_analytic(&self) -> f64 {
        let (xl, xh) = self.x_a_range;
        let (vl, vh) = self.v_a_range;
        let c = 1.0 / (2.0 * self.a_ego);
        // failure interval length in x_a for a given v_a, clipped to the domain
        let length = |v: f64| {
            let lower = (-(self.d_threshold + c * v * v)).max(xl);
            let upper = (-self.x_lim).min(xh);
            (upper - lower).max(0.0)
        };
        // composite Simpson; the integrand is piecewise quadratic, so split at
        // the kinks
        let mut knots = vec![vl, vh];
        let onset = (2.0 * self.a_ego * (self.x_lim - self.d_threshold)).sqrt();
        let clip = (2.0 * self.a_ego * (-xl - self.d_threshold)).max(0.0).sqrt();
        for k in [onset, clip] {
            if k > vl && k < vh {
                knots.push(k);
            }
        }
        knots.sort_by(f64::total_cmp);
        let mut total = 0.0;
        for w in knots.windows(2) {
            let (a, b) = (w[0], w[1]);
            total += (b - a) / 6.0 * (length(a) + 4.0 * length(0.5 * (a + b)) + length(b));
        }
        total / ((xh - xl) * (vh - vl))
    }
}

/// The T-junction performance function in physical units.
pub fn tjunction_g(x_a: f64, v_a: f64) -> Result<PerformanceValue> {
    TJunctionSystem::default().g(x_a, v_a)
}

impl System for TJunctionSystem {
    fn name(&self) -> &str {
        "tjunction"
    }

    fn dim(&self) -> usize {
        2
    }

    fn evaluate(&self, u: &[f64]) -> Result<PerformanceValue> {
        check_unit(u, 2)?;
        let (x_a, v_a) = self.to_physical(u);
        self.g(x_a, v_a)
    }
}

/// Reference failure probability for the T-junction model, reported next to
/// computed estimates. Not used by any computation.
pub const TJUNCTION_PF_REFERENCE: f64 = 0.0382;

/// Monte Carlo estimate of `P(g(x) < 0, g(x) defined)` with its binomial
/// standard error.
pub fn bruteforce_pf(
    system: &dyn System,
    sampler: &dyn Sampler,
    n: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::InvalidArgument("Monte Carlo sample size must be ≥ 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0usize;
    for _ in 0..n {
        let u = sampler.sample(&mut rng);
        if system.evaluate(&u)?.is_failure() {
            failures += 1;
        }
    }
    let pf = failures as f64 / n as f64;
    Ok((pf, (pf * (1.0 - pf) / n as f64).sqrt()))
}

/// The benchmarks shipped with the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Benchmark {
    Toy,
    Tjunction,
}

impl Benchmark {
    pub fn system(&self) -> Box<dyn System> {
        match self {
            Benchmark::Toy => Box::new(ToySystem::default()),
            Benchmark::Tjunction => Box::new(TJunctionSystem::default()),
        }
    }

    pub fn sampler(&self) -> UniformUnitBox {
        UniformUnitBox {
            dim: match self {
                Benchmark::Toy => 1,
                Benchmark::Tjunction => 2,
            },
        }
    }

    /// Closed-form (or quadrature) failure probability of the implemented
    /// system.
    pub fn pf_exact(&self) -> f64 {
        match self {
            Benchmark::Toy => toy_pf_analytic(),
            Benchmark::Tjunction => TJunctionSystem::default().pf_semi_analytic(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Benchmark::Toy => "toy",
            Benchmark::Tjunction => "tjunction",
        }
    }
}

impl std::str::FromStr for Benchmark {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "toy" => Ok(Benchmark::Toy),
            "tjunction" | "t-junction" | "ad" => Ok(Benchmark::Tjunction),
            other => Err(Error::InvalidArgument(format!("unknown benchmark `{other}`"))),
        }
    }
}

impl std::fmt::Display for Benchmark {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}
