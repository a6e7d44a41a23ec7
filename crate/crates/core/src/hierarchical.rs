//! Hierarchical surrogate: a classifier for whether the performance is
//! defined, composed with a regression GP trained on the defined values only.
//!
//! The failure event `{y < 0, y defined}` then has probability
//! `Φ(−μ/σ) · (1 − p_nan)`.

use crate::classification::{fit_ep_lengthscale, ClassificationDataset, EpPosterior};
use crate::error::{Error, Result};
use crate::kernels::prob_below_zero;
use crate::regression::{fit, Prediction, RegressionDataset, RegressionPosterior};
use crate::surrogate::{Assessment, LabeledSample, Surrogate, SurrogateConfig};

/// `Φ(−μ/σ) · (1 − p_nan)`.
pub fn hierarchical_failure_prob(mean: f64, std: f64, p_nan: f64) -> f64 {
    prob_below_zero(mean, std) * (1.0 - p_nan)
}

/// Misclassification probability of the hierarchical failure event.
///
/// Above one half, `1 − Φ(−μ/σ)(1 − p_nan)` is expanded as
/// `Φ(μ/σ) + Φ(−μ/σ) p_nan` so that it is exact when `p_nan = 0`.
pub fn hierarchical_misclassification(mean: f64, std: f64, p_nan: f64) -> f64 {
    assess(mean, std, p_nan, 1.0 - p_nan).misclassification
}

fn assess(mean: f64, std: f64, p_nan: f64, p_defined: f64) -> Assessment {
    let below = prob_below_zero(mean, std);
    let p = below * p_defined;
    let misclassification = if p < 0.5 {
        p
    } else {
        prob_below_zero(-mean, std) + below * p_nan
    };
    Assessment {
        failure_prob: p,
        misclassification,
    }
}

#[derive(Debug, Clone)]
pub struct HierarchicalSurrogate {
    regression: RegressionPosterior,
    /// `None` while no undefined output has been observed; `p_nan ≡ 0` then.
    nan_classifier: Option<EpPosterior>,
    n_defined: usize,
    n_undefined: usize,
}

impl HierarchicalSurrogate {
    /// Fits the regression GP on the defined samples and the classifier on
    /// every sample, labelling undefined outputs `+1`.
    ///
    /// Without any undefined sample there is nothing to classify and the
    /// model reduces to the regression GP.
    pub fn build(samples: &[LabeledSample], config: &SurrogateConfig) -> Result<Self> {
        let (defined, undefined): (Vec<_>, Vec<_>) =
            samples.iter().partition(|s| s.y.is_defined());
        if defined.is_empty() {
            return Err(Error::Unbuildable(format!(
                "none of the {} samples has a defined value",
                samples.len()
            )));
        }
        let reg_data = RegressionDataset::new(
            defined.iter().map(|s| s.x.clone()).collect(),
            defined.iter().filter_map(|s| s.y.value()).collect(),
        )?;
        let regression = fit(
            &reg_data,
            &config.regression_bounds,
            config.noise_var,
            &config.regression_fit,
        )?;
        let nan_classifier = if undefined.is_empty() {
            None
        } else {
            let cls_data = ClassificationDataset::from_events(
                samples.iter().map(|s| s.x.clone()).collect(),
                &samples.iter().map(|s| !s.y.is_defined()).collect::<Vec<_>>(),
            )?;
            Some(fit_ep_lengthscale(
                &cls_data,
                config.nan_classifier_variance,
                config.classifier_lengthscale,
                &config.ep,
            )?)
        };
        Ok(Self {
            regression,
            nan_classifier,
            n_defined: defined.len(),
            n_undefined: undefined.len(),
        })
    }

    pub fn regression(&self) -> &RegressionPosterior {
        &self.regression
    }

    pub fn nan_classifier(&self) -> Option<&EpPosterior> {
        self.nan_classifier.as_ref()
    }

    pub fn n_defined(&self) -> usize {
        self.n_defined
    }

    pub fn n_undefined(&self) -> usize {
        self.n_undefined
    }

    /// Probability that the performance at `x` is undefined.
    pub fn p_nan(&self, x: &[f64]) -> Result<f64> {
        match &self.nan_classifier {
            Some(c) => c.predict_prob(x),
            None => self.regression.predict(x).map(|_| 0.0),
        }
    }
}

impl Surrogate for HierarchicalSurrogate {
    fn dim(&self) -> usize {
        self.regression.dim()
    }

    fn assess(&self, x: &[f64]) -> Result<Assessment> {
        let Prediction { mean, std } = self.regression.predict(x)?;
        let (p_nan, p_def) = match &self.nan_classifier {
            Some(c) => (c.predict_prob(x)?, c.predict_prob_negative(x)?),
            None => (0.0, 1.0),
        };
        Ok(assess(mean, std, p_nan, p_def))
    }

    fn assess_many(&self, xs: &[Vec<f64>]) -> Result<Vec<Assessment>> {
        let reg = self.regression.predict_many(xs)?;
        let cls = match &self.nan_classifier {
            Some(c) => c.predict_both_many(xs),
            None => vec![(0.0, 1.0); xs.len()],
        };
        Ok(reg
            .iter()
            .zip(cls)
            .map(|(r, (p_nan, p_def))| assess(r.mean, r.std, p_nan, p_def))
            .collect())
    }
}
