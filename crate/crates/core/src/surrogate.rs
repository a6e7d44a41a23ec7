//! The interface shared by every surrogate that can drive the active-learning
//! loop, and the factory that rebuilds one from the evaluated samples.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{GpcSurrogate, MaskedSurrogate};
use crate::benchmarks::PerformanceValue;
use crate::classification::EpOptions;
use crate::error::{Error, Result};
use crate::hierarchical::HierarchicalSurrogate;
use crate::regression::{Bounds, FitOptions, HyperBounds};

/// An evaluated input and what the system returned there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledSample {
    pub x: Vec<f64>,
    pub y: PerformanceValue,
}

impl LabeledSample {
    pub fn new(x: Vec<f64>, y: PerformanceValue) -> Self {
        Self { x, y }
    }
}

/// Failure probability at a point together with the probability that the
/// induced failure/non-failure decision is wrong.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Assessment {
    pub failure_prob: f64,
    pub misclassification: f64,
}

impl Assessment {
    /// Derives the misclassification probability `min(p, 1 − p)`.
    pub fn from_failure_prob(p: f64) -> Self {
        Self {
            failure_prob: p,
            misclassification: misclassification(p),
        }
    }

    /// The decision rule: failure iff `p > 0.5`, ties are non-failures.
    pub fn is_failure(&self) -> bool {
        self.failure_prob > 0.5
    }
}

/// `p` if `p < 0.5`, else `1 − p`.
pub fn misclassification(p: f64) -> f64 {
    if p < 0.5 {
        p
    } else {
        1.0 - p
    }
}

/// A fitted surrogate of the failure event.
pub trait Surrogate: Send + Sync {
    fn dim(&self) -> usize;

    fn assess(&self, x: &[f64]) -> Result<Assessment>;

    /// Assessments for many points; implementations may evaluate in parallel.
    fn assess_many(&self, xs: &[Vec<f64>]) -> Result<Vec<Assessment>> {
        xs.par_iter().map(|x| self.assess(x)).collect()
    }

    fn failure_prob(&self, x: &[f64]) -> Result<f64> {
        Ok(self.assess(x)?.failure_prob)
    }

    fn misclassification_prob(&self, x: &[f64]) -> Result<f64> {
        Ok(self.assess(x)?.misclassification)
    }

    fn classify_failure(&self, x: &[f64]) -> Result<bool> {
        Ok(self.assess(x)?.is_failure())
    }
}

/// Rebuilds a surrogate from scratch on the current evaluated set.
pub trait SurrogateFactory: Send + Sync {
    fn name(&self) -> String;

    fn build(&self, samples: &[LabeledSample]) -> Result<Box<dyn Surrogate>>;

    /// Whether building requires at least one defined observation.
    fn needs_defined_sample(&self) -> bool {
        false
    }
}

/// Hyperparameter settings shared by all GP surrogates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurrogateConfig {
    /// Gaussian likelihood variance of every regression GP.
    pub noise_var: f64,
    pub regression_bounds: HyperBounds,
    pub regression_fit: FitOptions,
    /// Fixed prior variance of the undefined-value classifier.
    pub nan_classifier_variance: f64,
    /// Fixed prior variance of the GPC baseline.
    pub gpc_variance: f64,
    pub classifier_lengthscale: Bounds,
    pub ep: EpOptions,
}

impl Default for SurrogateConfig {
    fn default() -> Self {
        Self {
            noise_var: 0.005 * 0.005,
            regression_bounds: HyperBounds::default(),
            regression_fit: FitOptions::default(),
            nan_classifier_variance: 1e5,
            gpc_variance: 100.0,
            classifier_lengthscale: Bounds::new(1e-6, 0.2),
            ep: EpOptions::default(),
        }
    }
}

/// The surrogate families compared in the experiments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Method {
    /// Undefined-value classifier composed with a regression GP.
    Hgp,
    /// Regression GP with undefined values replaced by `alpha`.
    Masked { alpha: f64 },
    /// GP classifier of the failure event itself.
    Gpc,
}

impl Method {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Method::Masked { alpha } if !(alpha > 0.0 && alpha.is_finite()) => Err(
                Error::InvalidArgument(format!("mask value must be positive, got {alpha}")),
            ),
            _ => Ok(()),
        }
    }

    /// Stable identifier used for output directories and tables.
    pub fn label(&self) -> String {
        match self {
            Method::Hgp => "hgp".into(),
            Method::Masked { alpha } => format!("masked-{alpha:?}"),
            Method::Gpc => "gpc".into(),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.label())
    }
}

/// Builds the surrogate for a [`Method`] with a fixed configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MethodFactory {
    pub method: Method,
    pub config: SurrogateConfig,
}

impl MethodFactory {
    pub fn new(method: Method, config: SurrogateConfig) -> Self {
        Self { method, config }
    }
}

impl SurrogateFactory for MethodFactory {
    fn name(&self) -> String {
        self.method.label()
    }

    fn build(&self, samples: &[LabeledSample]) -> Result<Box<dyn Surrogate>> {
        Ok(match self.method {
            Method::Hgp => Box::new(HierarchicalSurrogate::build(samples, &self.config)?),
            Method::Masked { alpha } => {
                Box::new(MaskedSurrogate::build(samples, alpha, &self.config)?)
            }
            Method::Gpc => Box::new(GpcSurrogate::build(samples, &self.config)?),
        })
    }

    fn needs_defined_sample(&self) -> bool {
        matches!(self.method, Method::Hgp)
    }
}
