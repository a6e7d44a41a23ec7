//! The adaptive-Kriging Monte Carlo loop: refine a surrogate at its most
//! uncertain proposal point until the misclassification risk is small, then
//! grow the proposal pool until the Monte Carlo estimate is precise enough.

use log::{debug, info};
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::benchmarks::{PerformanceValue, Sampler, System};
use crate::error::{Error, Result};
use crate::metrics::{max_misclassification, score, Scores, TestSet};
use crate::surrogate::{Assessment, LabeledSample, Surrogate, SurrogateFactory};

/// The Monte Carlo pool `S` and the evaluated subset.
#[derive(Debug, Clone, PartialEq)]
pub struct ProposalSet {
    points: Vec<Vec<f64>>,
    evaluated: Vec<bool>,
    samples: Vec<LabeledSample>,
    indices: Vec<usize>,
}

impl ProposalSet {
    pub fn new(points: Vec<Vec<f64>>) -> Self {
        let n = points.len();
        Self {
            points,
            evaluated: vec![false; n],
            samples: Vec::new(),
            indices: Vec::new(),
        }
    }

    /// `n` i.i.d. draws from `sampler`.
    pub fn sample(sampler: &dyn Sampler, n: usize, rng: &mut dyn rand::RngCore) -> Self {
        Self::new((0..n).map(|_| sampler.sample(rng)).collect())
    }

    /// Appends `n` fresh draws; existing indices are unchanged.
    pub fn enrich(&mut self, sampler: &dyn Sampler, n: usize, rng: &mut dyn rand::RngCore) {
        for _ in 0..n {
            self.points.push(sampler.sample(rng));
            self.evaluated.push(false);
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn evaluated_mask(&self) -> &[bool] {
        &self.evaluated
    }

    pub fn is_evaluated(&self, i: usize) -> bool {
        self.evaluated[i]
    }

    /// Evaluated samples in evaluation order.
    pub fn samples(&self) -> &[LabeledSample] {
        &self.samples
    }

    /// Proposal indices of [`samples`](Self::samples).
    pub fn evaluated_indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn unevaluated(&self) -> usize {
        self.len() - self.samples.len()
    }

    /// Evaluates the system at proposal point `i` and records the result.
    pub fn evaluate(&mut self, i: usize, system: &dyn System) -> Result<PerformanceValue> {
        if i >= self.len() {
            return Err(Error::InvalidArgument(format!(
                "proposal index {i} out of range for {} points",
                self.len()
            )));
        }
        if self.evaluated[i] {
            return Err(Error::Precondition(format!(
                "proposal point {i} was already evaluated"
            )));
        }
        let y = system.evaluate(&self.points[i])?;
        self.evaluated[i] = true;
        self.samples.push(LabeledSample::new(self.points[i].clone(), y));
        self.indices.push(i);
        Ok(y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoopConfig {
    /// Inner loop stops once the largest misclassification is at most this.
    pub eta: f64,
    pub cov_threshold: f64,
    /// Size of the initial pool and of every enrichment.
    pub n_mc: usize,
    pub n_initial: usize,
    /// Cap on active-learning evaluations after the initial design.
    pub max_iterations: usize,
    pub seed: u64,
    /// When false, neither `eta` nor the CoV ends the run; only the cap does.
    pub cov_exit: bool,
    /// Cap on pool enrichments, reached only when `p_f` stays at zero or the
    /// CoV target is out of reach.
    pub max_enrichments: usize,
    /// Score against the test set every this many iterations (0: final only).
    pub metrics_every: usize,
}

impl Default for LoopConfig {
    fn default() -> Self {
        Self {
            eta: 0.02,
            cov_threshold: 0.1,
            n_mc: 5000,
            n_initial: 12,
            max_iterations: 150,
            seed: 0,
            cov_exit: true,
            max_enrichments: 20,
            metrics_every: 0,
        }
    }
}

impl LoopConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..0.5).contains(&self.eta) {
            return Err(Error::InvalidArgument(format!(
                "eta must lie in [0, 0.5), got {}",
                self.eta
            )));
        }
        if !(self.cov_threshold > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "CoV threshold must be positive, got {}",
                self.cov_threshold
            )));
        }
        if self.n_initial < 2 {
            return Err(Error::InvalidArgument(format!(
                "initial design needs at least 2 points, got {}",
                self.n_initial
            )));
        }
        if self.n_mc < self.n_initial {
            return Err(Error::InvalidArgument(format!(
                "proposal pool of {} cannot hold an initial design of {}",
                self.n_mc, self.n_initial
            )));
        }
        Ok(())
    }
}

/// `√((1 − p_f) / (p_f · n))`.
pub fn coefficient_of_variation(pf: f64, n: usize) -> Result<f64> {
    if n == 0 || !(0.0..=1.0).contains(&pf) {
        return Err(Error::InvalidArgument(format!(
            "CoV needs p_f in (0, 1] and n ≥ 1, got p_f = {pf}, n = {n}"
        )));
    }
    if pf == 0.0 {
        return Err(Error::UndefinedMetric("CoV of a zero failure estimate".into()));
    }
    Ok(((1.0 - pf) / (pf * n as f64)).sqrt())
}

/// Fraction of the pool classified as failure.
pub fn estimate_pf(surrogate: &dyn Surrogate, proposals: &ProposalSet) -> Result<f64> {
    if proposals.is_empty() {
        return Err(Error::InvalidArgument("empty proposal set".into()));
    }
    Ok(pf_of(&surrogate.assess_many(proposals.points())?))
}

fn pf_of(a: &[Assessment]) -> f64 {
    a.iter().filter(|a| a.is_failure()).count() as f64 / a.len() as f64
}

/// Initial design point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub index: usize,
    pub x: Vec<f64>,
    pub y: PerformanceValue,
}

/// State of the surrogate at one active-learning step and the point it chose.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    /// 1-based step number.
    pub iteration: usize,
    /// Evaluations after this step's evaluation, initial design included.
    pub evaluations: usize,
    pub proposal_size: usize,
    pub pf: f64,
    /// `None` when `p_f = 0`.
    pub cov: Option<f64>,
    pub max_misclassification: f64,
    pub chosen: Evaluation,
    pub f1: Option<f64>,
    pub ap: Option<f64>,
}

/// Surrogate state when the run stopped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinalState {
    pub evaluations: usize,
    pub proposal_size: usize,
    pub pf: f64,
    pub cov: Option<f64>,
    pub max_misclassification: f64,
    pub f1: Option<f64>,
    pub ap: Option<f64>,
}

/// Outcome of an outer-loop check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovCheck {
    pub evaluations: usize,
    pub proposal_size: usize,
    pub pf: f64,
    pub cov: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminationReason {
    /// Misclassification and CoV targets both met.
    Converged,
    /// Evaluation budget exhausted (did not terminate).
    IterationCap,
    /// Enrichment budget exhausted (did not terminate).
    ProposalCap,
}

impl TerminationReason {
    pub fn terminated(&self) -> bool {
        matches!(self, TerminationReason::Converged)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub method: String,
    pub system: String,
    pub seed: u64,
    pub config: LoopConfig,
    pub initial: Vec<Evaluation>,
    pub iterations: Vec<IterationRecord>,
    pub cov_checks: Vec<CovCheck>,
    pub final_state: FinalState,
    pub termination: TerminationReason,
}

impl RunRecord {
    pub fn total_evaluations(&self) -> usize {
        self.initial.len() + self.iterations.len()
    }
}

fn scores_at(
    surrogate: &dyn Surrogate,
    test: Option<&TestSet>,
    due: bool,
) -> Result<(Option<f64>, Option<f64>)> {
    match test {
        Some(t) if due => {
            let Scores { f1, ap } = score(surrogate, t)?;
            Ok((Some(f1), ap))
        }
        _ => Ok((None, None)),
    }
}

fn cov_of(pf: f64, n: usize) -> Option<f64> {
    coefficient_of_variation(pf, n).ok()
}

/// Runs the loop to termination.
///
/// Surrogates are rebuilt from scratch on every new evaluation. If `test` is
/// given, F1 and AP are recorded at the end and every
/// `config.metrics_every` iterations.
pub fn run(
    factory: &dyn SurrogateFactory,
    system: &dyn System,
    sampler: &dyn Sampler,
    config: &LoopConfig,
    test: Option<&TestSet>,
) -> Result<RunRecord> {
    config.validate()?;
    if system.dim() != sampler.dim() {
        return Err(Error::InvalidArgument(format!(
            "system is {}-dimensional but the sampler draws {} coordinates",
            system.dim(),
            sampler.dim()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut pool = ProposalSet::sample(sampler, config.n_mc, &mut rng);

    for i in index::sample(&mut rng, pool.len(), config.n_initial) {
        pool.evaluate(i, system)?;
    }
    // a hierarchical model needs one defined value; keep drawing until found
    if factory.needs_defined_sample() {
        while !pool.samples().iter().any(|s| s.y.is_defined()) {
            if pool.unevaluated() == 0 {
                return Err(Error::Unbuildable(
                    "no defined value anywhere in the proposal pool".into(),
                ));
            }
            let i = loop {
                let i = rng.random_range(0..pool.len());
                if !pool.is_evaluated(i) {
                    break i;
                }
            };
            debug!("initial design has no defined value, adding proposal {i}");
            pool.evaluate(i, system)?;
        }
    }
    let initial: Vec<Evaluation> = pool
        .evaluated_indices()
        .iter()
        .zip(pool.samples())
        .map(|(&index, s)| Evaluation {
            index,
            x: s.x.clone(),
            y: s.y,
        })
        .collect();

    let mut iterations = Vec::new();
    let mut cov_checks = Vec::new();
    let mut enrichments = 0;
    let mut surrogate = factory.build(pool.samples())?;
    let termination = loop {
        let assessments = surrogate.assess_many(pool.points())?;
        let pf = pf_of(&assessments);
        let cov = cov_of(pf, pool.len());
        let best = max_misclassification(&assessments, pool.evaluated_mask());
        let max_mis = best.map_or(0.0, |b| b.1);

        if best.is_none() || (config.cov_exit && max_mis <= config.eta) {
            cov_checks.push(CovCheck {
                evaluations: pool.samples().len(),
                proposal_size: pool.len(),
                pf,
                cov,
            });
            if config.cov_exit && cov.is_some_and(|c| c <= config.cov_threshold) {
                break TerminationReason::Converged;
            }
            if enrichments == config.max_enrichments {
                break TerminationReason::ProposalCap;
            }
            info!(
                "{}: p_f {pf:.5}, CoV {cov:?} after {} evaluations; enriching pool of {}",
                factory.name(),
                pool.samples().len(),
                pool.len()
            );
            pool.enrich(sampler, config.n_mc, &mut rng);
            enrichments += 1;
            continue;
        }
        if iterations.len() == config.max_iterations {
            break TerminationReason::IterationCap;
        }
        let (index, _) = best.expect("checked above");
        let step = iterations.len() + 1;
        let due = config.metrics_every > 0 && step % config.metrics_every == 0;
        let (f1, ap) = scores_at(surrogate.as_ref(), test, due)?;
        let y = pool.evaluate(index, system)?;
        debug!(
            "{} step {step}: max misclassification {max_mis:.4} at {index}, y = {y:?}",
            factory.name()
        );
        iterations.push(IterationRecord {
            iteration: step,
            evaluations: pool.samples().len(),
            proposal_size: pool.len(),
            pf,
            cov,
            max_misclassification: max_mis,
            chosen: Evaluation {
                index,
                x: pool.points()[index].clone(),
                y,
            },
            f1,
            ap,
        });
        surrogate = factory.build(pool.samples())?;
    };

    let assessments = surrogate.assess_many(pool.points())?;
    let pf = pf_of(&assessments);
    let (f1, ap) = scores_at(surrogate.as_ref(), test, true)?;
    let final_state = FinalState {
        evaluations: pool.samples().len(),
        proposal_size: pool.len(),
        pf,
        cov: cov_of(pf, pool.len()),
        max_misclassification: max_misclassification(&assessments, pool.evaluated_mask())
            .map_or(0.0, |b| b.1),
        f1,
        ap,
    };
    info!(
        "{} on {}: {:?} after {} evaluations, p_f {:.5}",
        factory.name(),
        system.name(),
        termination,
        final_state.evaluations,
        final_state.pf
    );
    Ok(RunRecord {
        method: factory.name(),
        system: system.name().to_string(),
        seed: config.seed,
        config: *config,
        initial,
        iterations,
        cov_checks,
        final_state,
        termination,
    })
}
