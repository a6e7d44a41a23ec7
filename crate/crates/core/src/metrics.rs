//! Accuracy metrics of a surrogate against labels from the true system.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::benchmarks::{Sampler, System};
use crate::error::{Error, Result};
use crate::surrogate::{Assessment, Surrogate};

/// Inputs drawn from `p(x)` with their true failure indicators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestSet {
    pub points: Vec<Vec<f64>>,
    pub labels: Vec<bool>,
}

impl TestSet {
    pub fn new(points: Vec<Vec<f64>>, labels: Vec<bool>) -> Result<Self> {
        if points.len() != labels.len() {
            return Err(Error::InvalidArgument(format!(
                "{} test points but {} labels",
                points.len(),
                labels.len()
            )));
        }
        if points.is_empty() {
            return Err(Error::Precondition("test set is empty".into()));
        }
        Ok(Self { points, labels })
    }

    /// Draws `n` points and labels them with the true system; undefined
    /// outputs are labelled non-failure.
    pub fn generate(system: &dyn System, sampler: &dyn Sampler, n: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let points: Vec<Vec<f64>> = (0..n).map(|_| sampler.sample(&mut rng)).collect();
        let labels = points
            .iter()
            .map(|p| system.evaluate(p).map(|y| y.is_failure()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(points, labels)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn positives(&self) -> usize {
        self.labels.iter().filter(|&&l| l).count()
    }
}

/// F1 and AP of one surrogate on one test set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scores {
    pub f1: f64,
    /// `None` when the test set has no failures.
    pub ap: Option<f64>,
}

/// Standard F1 with failure as the positive class.
///
/// Returns 0 when there are neither positive predictions nor positives.
pub fn f1_from_predictions(predicted: &[bool], truth: &[bool]) -> Result<f64> {
    if predicted.len() != truth.len() {
        return Err(Error::InvalidArgument(format!(
            "{} predictions for {} labels",
            predicted.len(),
            truth.len()
        )));
    }
    if truth.is_empty() {
        return Err(Error::Precondition("no labels to score".into()));
    }
    let (mut tp, mut fp, mut fn_) = (0usize, 0usize, 0usize);
    for (&p, &t) in predicted.iter().zip(truth) {
        match (p, t) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            _ => {}
        }
    }
    if tp + fp + fn_ == 0 {
        return Ok(0.0);
    }
    Ok(2.0 * tp as f64 / (2 * tp + fp + fn_) as f64)
}

/// Area under the precision–recall curve by the step sum
/// `Σ_k (R_k − R_{k−1}) P_k` over scores sorted in decreasing order.
///
/// Equal scores are ranked by position, so every item is its own threshold.
pub fn average_precision_from_scores(scores: &[f64], truth: &[bool]) -> Result<f64> {
    if scores.len() != truth.len() {
        return Err(Error::InvalidArgument(format!(
            "{} scores for {} labels",
            scores.len(),
            truth.len()
        )));
    }
    if let Some(s) = scores.iter().find(|s| s.is_nan()) {
        return Err(Error::InvalidArgument(format!("score {s} is not comparable")));
    }
    let positives = truth.iter().filter(|&&t| t).count();
    if positives == 0 {
        return Err(Error::UndefinedMetric(
            "average precision needs at least one positive".into(),
        ));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    let mut tp = 0usize;
    let mut sum = 0.0;
    for (rank, &i) in order.iter().enumerate() {
        if truth[i] {
            tp += 1;
            sum += tp as f64 / (rank + 1) as f64;
        }
    }
    Ok(sum / positives as f64)
}

pub fn f1_score(surrogate: &dyn Surrogate, test: &TestSet) -> Result<f64> {
    let a = surrogate.assess_many(&test.points)?;
    f1_from_assessments(&a, test)
}

pub fn average_precision(surrogate: &dyn Surrogate, test: &TestSet) -> Result<f64> {
    let a = surrogate.assess_many(&test.points)?;
    average_precision_from_scores(&failure_probs(&a), &test.labels)
}

/// Both scores from a single pass over the test set.
pub fn score(surrogate: &dyn Surrogate, test: &TestSet) -> Result<Scores> {
    let a = surrogate.assess_many(&test.points)?;
    let ap = match average_precision_from_scores(&failure_probs(&a), &test.labels) {
        Ok(v) => Some(v),
        Err(Error::UndefinedMetric(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(Scores {
        f1: f1_from_assessments(&a, test)?,
        ap,
    })
}

fn failure_probs(a: &[Assessment]) -> Vec<f64> {
    a.iter().map(|a| a.failure_prob).collect()
}

fn f1_from_assessments(a: &[Assessment], test: &TestSet) -> Result<f64> {
    let predicted: Vec<bool> = a.iter().map(Assessment::is_failure).collect();
    f1_from_predictions(&predicted, &test.labels)
}

/// Largest misclassification probability among the points not yet
/// evaluated, with the lowest index winning ties.
///
/// Returns `None` when every point has been evaluated.
pub fn max_misclassification(assessments: &[Assessment], evaluated: &[bool]) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, (a, &done)) in assessments.iter().zip(evaluated).enumerate() {
        if done {
            continue;
        }
        match best {
            Some((_, m)) if a.misclassification <= m => {}
            _ => best = Some((i, a.misclassification)),
        }
    }
    best
}
