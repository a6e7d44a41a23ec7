//! Comparison surrogates: a regression GP on masked targets, and a GP
//! classifier of the failure event.

use crate::classification::{fit_ep_lengthscale, ClassificationDataset, EpPosterior};
use crate::error::{Error, Result};
use crate::kernels::{prob_below_zero, std_normal_cdf};
use crate::regression::{fit, RegressionDataset, RegressionPosterior};
use crate::surrogate::{Assessment, LabeledSample, Surrogate, SurrogateConfig};

/// Regression GP with every undefined output replaced by `alpha > 0`.
#[derive(Debug, Clone)]
pub struct MaskedSurrogate {
    alpha: f64,
    regression: RegressionPosterior,
}

/// Regression targets with undefined values masked by `alpha`.
pub fn masked_targets(samples: &[LabeledSample], alpha: f64) -> Vec<f64> {
    samples.iter().map(|s| s.y.value().unwrap_or(alpha)).collect()
}

fn masked_assessment(mean: f64, std: f64) -> Assessment {
    let misclassification = if std > 0.0 {
        std_normal_cdf(-mean.abs() / std)
    } else {
        0.0
    };
    Assessment {
        failure_prob: prob_below_zero(mean, std),
        misclassification,
    }
}

impl MaskedSurrogate {
    pub fn build(samples: &[LabeledSample], alpha: f64, config: &SurrogateConfig) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "mask value must be positive, got {alpha}"
            )));
        }
        let data = RegressionDataset::new(
            samples.iter().map(|s| s.x.clone()).collect(),
            masked_targets(samples, alpha),
        )?;
        let regression = fit(
            &data,
            &config.regression_bounds,
            config.noise_var,
            &config.regression_fit,
        )?;
        Ok(Self { alpha, regression })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn regression(&self) -> &RegressionPosterior {
        &self.regression
    }
}

impl Surrogate for MaskedSurrogate {
    fn dim(&self) -> usize {
        self.regression.dim()
    }

    fn assess(&self, x: &[f64]) -> Result<Assessment> {
        let p = self.regression.predict(x)?;
        Ok(masked_assessment(p.mean, p.std))
    }

    fn assess_many(&self, xs: &[Vec<f64>]) -> Result<Vec<Assessment>> {
        Ok(self
            .regression
            .predict_many(xs)?
            .into_iter()
            .map(|p| masked_assessment(p.mean, p.std))
            .collect())
    }
}

/// EP classifier trained directly on the failure event.
#[derive(Debug, Clone)]
pub struct GpcSurrogate {
    classifier: EpPosterior,
}

impl GpcSurrogate {
    /// Labels are `+1` for defined negative outputs and `−1` otherwise.
    pub fn build(samples: &[LabeledSample], config: &SurrogateConfig) -> Result<Self> {
        let data = ClassificationDataset::from_events(
            samples.iter().map(|s| s.x.clone()).collect(),
            &samples.iter().map(|s| s.y.is_failure()).collect::<Vec<_>>(),
        )?;
        let classifier = fit_ep_lengthscale(
            &data,
            config.gpc_variance,
            config.classifier_lengthscale,
            &config.ep,
        )?;
        Ok(Self { classifier })
    }

    pub fn classifier(&self) -> &EpPosterior {
        &self.classifier
    }
}

impl Surrogate for GpcSurrogate {
    fn dim(&self) -> usize {
        self.classifier.dim()
    }

    fn assess(&self, x: &[f64]) -> Result<Assessment> {
        Ok(Assessment::from_failure_prob(self.classifier.predict_prob(x)?))
    }

    fn assess_many(&self, xs: &[Vec<f64>]) -> Result<Vec<Assessment>> {
        Ok(self
            .classifier
            .predict_prob_many(xs)?
            .into_iter()
            .map(Assessment::from_failure_prob)
            .collect())
    }
}
