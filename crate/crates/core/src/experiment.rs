//! Seeded multi-repeat experiments, their on-disk traces and the aggregate
//! results table.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use log::warn;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::active_learning::{run, LoopConfig, RunRecord};
use crate::benchmarks::Benchmark;
use crate::error::{Error, Result};
use crate::metrics::TestSet;
use crate::surrogate::{Method, MethodFactory, SurrogateConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Stop on the misclassification and CoV criteria or at the cap.
    Terminating,
    /// Ignore both criteria and always run to the cap.
    FixedIterations,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "terminating" => Ok(Mode::Terminating),
            "fixed-iterations" | "fixed" => Ok(Mode::FixedIterations),
            _ => Err(Error::InvalidArgument(format!(
                "unknown mode {s:?} (expected terminating or fixed-iterations)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub benchmark: Benchmark,
    pub method: Method,
    pub repeats: usize,
    pub mode: Mode,
    /// `seed` is the master seed every repeat seed is derived from.
    pub loop_config: LoopConfig,
    pub surrogate: SurrogateConfig,
    pub test_size: usize,
    pub out_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(benchmark: Benchmark, method: Method) -> Self {
        Self {
            benchmark,
            method,
            repeats: 5,
            mode: Mode::Terminating,
            loop_config: LoopConfig::default(),
            surrogate: SurrogateConfig::default(),
            test_size: 100_000,
            out_dir: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.repeats == 0 {
            return Err(Error::InvalidArgument("repeats must be at least 1".into()));
        }
        if self.test_size == 0 {
            return Err(Error::InvalidArgument("test set must be nonempty".into()));
        }
        self.method.validate()?;
        self.loop_config.validate()
    }

    /// Loop settings of one repeat: its own seed, and in fixed-iterations
    /// mode `η = 0` with the CoV exit disabled.
    pub fn repeat_config(&self, repeat: usize) -> LoopConfig {
        let mut c = self.loop_config;
        c.seed = derive_seed(self.loop_config.seed, repeat as u64 + 1);
        if self.mode == Mode::FixedIterations {
            c.eta = 0.0;
            c.cov_exit = false;
        }
        c
    }

    /// Seed of the test set, shared by every repeat.
    pub fn test_seed(&self) -> u64 {
        derive_seed(self.loop_config.seed, 0)
    }

    /// `<out>/<benchmark>/<method>`.
    pub fn run_dir(&self) -> Option<PathBuf> {
        self.out_dir
            .as_ref()
            .map(|d| d.join(self.benchmark.name()).join(self.method.label()))
    }
}

/// Independent stream `stream` of the master seed.
pub fn derive_seed(master: u64, stream: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(stream);
    rng.next_u64()
}

/// Sample mean and `n − 1` standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    /// `None` for a single value.
    pub std: Option<f64>,
}

impl Stat {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = (values.len() > 1).then(|| {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        });
        Some(Self { mean, std })
    }

    /// Like [`of`](Self::of), but `None` if any value is missing.
    fn of_all(values: &[Option<f64>]) -> Option<Self> {
        values.iter().copied().collect::<Option<Vec<_>>>().and_then(|v| Self::of(&v))
    }
}

/// Aggregate over the successful repeats of one benchmark/method pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub benchmark: String,
    pub method: String,
    pub repeats: usize,
    /// Repeats that raised an error and are excluded below.
    pub failed: usize,
    pub pf: Stat,
    pub cov: Option<Stat>,
    pub f1: Option<Stat>,
    pub ap: Option<Stat>,
    pub evaluations: Stat,
    pub terminated: usize,
    /// Did not terminate: at least one repeat hit a cap.
    pub dnt: bool,
}

impl TableRow {
    pub fn from_records(records: &[RunRecord], failed: usize) -> Result<Self> {
        let first = records
            .first()
            .ok_or_else(|| Error::Precondition("no successful repeat to aggregate".into()))?;
        if let Some(r) = records
            .iter()
            .find(|r| r.method != first.method || r.system != first.system)
        {
            return Err(Error::InvalidArgument(format!(
                "cannot aggregate {}/{} with {}/{}",
                first.system, first.method, r.system, r.method
            )));
        }
        let col = |f: &dyn Fn(&RunRecord) -> Option<f64>| -> Vec<Option<f64>> {
            records.iter().map(f).collect()
        };
        let terminated = records.iter().filter(|r| r.termination.terminated()).count();
        Ok(Self {
            benchmark: first.system.clone(),
            method: first.method.clone(),
            repeats: records.len(),
            failed,
            pf: Stat::of_all(&col(&|r| Some(r.final_state.pf))).expect("nonempty"),
            cov: Stat::of_all(&col(&|r| r.final_state.cov)),
            f1: Stat::of_all(&col(&|r| r.final_state.f1)),
            ap: Stat::of_all(&col(&|r| r.final_state.ap)),
            evaluations: Stat::of_all(&col(&|r| Some(r.total_evaluations() as f64)))
                .expect("nonempty"),
            terminated,
            dnt: terminated < records.len(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultsTable {
    pub config: ExperimentConfig,
    pub row: TableRow,
}

/// A finished experiment: the aggregate and every repeat's outcome.
#[derive(Debug)]
pub struct Experiment {
    pub table: ResultsTable,
    pub records: Vec<RunRecord>,
    pub errors: Vec<(usize, Error)>,
}

/// Runs every repeat (in parallel), aggregates them and, if an output
/// directory is set, writes
///
/// * `repeat_<i>.json` and `repeat_<i>.csv` per repeat,
/// * `convergence.csv` across repeats,
/// * `table.json` with the config echo and the aggregate row.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Experiment> {
    config.validate()?;
    let system = config.benchmark.system();
    let sampler = config.benchmark.sampler();
    let test = TestSet::generate(system.as_ref(), &sampler, config.test_size, config.test_seed())?;
    let factory = MethodFactory::new(config.method, config.surrogate);

    let outcomes: Vec<Result<RunRecord>> = (0..config.repeats)
        .into_par_iter()
        .map(|i| run(&factory, system.as_ref(), &sampler, &config.repeat_config(i), Some(&test)))
        .collect();
    let mut records = Vec::new();
    let mut errors = Vec::new();
    for (i, o) in outcomes.into_iter().enumerate() {
        match o {
            Ok(r) => records.push((i, r)),
            Err(e) => {
                warn!("repeat {i} of {} failed and is excluded: {e}", factory.method);
                errors.push((i, e));
            }
        }
    }
    if records.is_empty() {
        let (_, e) = errors.swap_remove(0);
        return Err(e);
    }
    let runs: Vec<RunRecord> = records.iter().map(|(_, r)| r.clone()).collect();
    let table = ResultsTable {
        config: config.clone(),
        row: TableRow::from_records(&runs, errors.len())?,
    };

    if let Some(dir) = config.run_dir() {
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        for (i, r) in &records {
            write_json(&dir.join(format!("repeat_{i}.json")), r)?;
            write_trace_csv(&dir.join(format!("repeat_{i}.csv")), r)?;
        }
        for (i, e) in &errors {
            write_json(
                &dir.join(format!("repeat_{i}.error.json")),
                &serde_json::json!({ "repeat": i, "kind": e.kind(), "message": e.to_string() }),
            )?;
        }
        emit_convergence_csv(&runs, &dir.join("convergence.csv"))?;
        write_json(&dir.join("table.json"), &table)?;
    }
    Ok(Experiment {
        table,
        records: runs,
        errors,
    })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Serialization {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    writeln!(f, "{text}").map_err(|e| Error::io(path, e))
}

pub fn read_run_record(path: &Path) -> Result<RunRecord> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Serialization {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Serialization {
            path: path.to_path_buf(),
            message: format!("{other:?}"),
        },
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// One row per active-learning step of a single run.
pub fn write_trace_csv(path: &Path, record: &RunRecord) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    w.write_record([
        "iteration",
        "evaluations",
        "proposal_size",
        "index",
        "y",
        "pf",
        "cov",
        "max_misclassification",
        "f1",
        "ap",
    ])
    .map_err(|e| csv_err(path, e))?;
    for it in &record.iterations {
        w.write_record([
            it.iteration.to_string(),
            it.evaluations.to_string(),
            it.proposal_size.to_string(),
            it.chosen.index.to_string(),
            opt(it.chosen.y.value()),
            it.pf.to_string(),
            opt(it.cov),
            it.max_misclassification.to_string(),
            opt(it.f1),
            opt(it.ap),
        ])
        .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

const CURVES: [&str; 5] = ["pf", "cov", "max_misclassification", "f1", "ap"];

fn curve_value(it: &crate::active_learning::IterationRecord, name: &str) -> Option<f64> {
    match name {
        "pf" => Some(it.pf),
        "cov" => it.cov,
        "max_misclassification" => Some(it.max_misclassification),
        "f1" => it.f1,
        "ap" => it.ap,
        _ => unreachable!(),
    }
}

/// Per-step band (min, mean, max) of every curve across repeats.
///
/// Row `k` aggregates the repeats that reached step `k`; a curve's cells are
/// empty when no such repeat recorded it.
pub fn emit_convergence_csv(records: &[RunRecord], path: &Path) -> Result<()> {
    if records.is_empty() {
        return Err(Error::Precondition("no runs to summarise".into()));
    }
    let steps = records.iter().map(|r| r.iterations.len()).max().unwrap_or(0);
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    let mut header = vec!["iteration".to_string(), "evaluations".into(), "repeats".into()];
    for c in CURVES {
        for s in ["min", "mean", "max"] {
            header.push(format!("{c}_{s}"));
        }
    }
    w.write_record(&header).map_err(|e| csv_err(path, e))?;
    for k in 0..steps {
        let its: Vec<_> = records.iter().filter_map(|r| r.iterations.get(k)).collect();
        let evals = its.iter().map(|it| it.evaluations as f64).sum::<f64>() / its.len() as f64;
        let mut row = vec![(k + 1).to_string(), evals.to_string(), its.len().to_string()];
        for c in CURVES {
            let v: Vec<f64> = its.iter().filter_map(|it| curve_value(it, c)).collect();
            if v.is_empty() {
                row.extend([String::new(), String::new(), String::new()]);
            } else {
                let min = v.iter().copied().fold(f64::INFINITY, f64::min);
                let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let mean = v.iter().sum::<f64>() / v.len() as f64;
                // the mean of a constant column can round outside [min, max]
                row.extend([min, mean.clamp(min, max), max].map(|x| x.to_string()));
            }
        }
        w.write_record(&row).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Rebuilds the aggregate rows from the `repeat_*.json` traces found under
/// `dir`, one row per directory holding them.
pub fn table_from_dir(dir: &Path) -> Result<Vec<TableRow>> {
    let mut rows = Vec::new();
    collect_rows(dir, &mut rows)?;
    if rows.is_empty() {
        return Err(Error::Precondition(format!(
            "no repeat_*.json traces under {}",
            dir.display()
        )));
    }
    Ok(rows)
}

fn collect_rows(dir: &Path, rows: &mut Vec<TableRow>) -> Result<()> {
    let mut entries: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .map(|e| e.map(|e| e.path()).map_err(|e| Error::io(dir, e)))
        .collect::<Result<_>>()?;
    entries.sort();
    let mut traces = Vec::new();
    let mut failed = 0;
    for p in &entries {
        let name = p.file_name().and_then(|n| n.to_str()).unwrap_or("");
        if p.is_dir() {
            collect_rows(p, rows)?;
        } else if name.starts_with("repeat_") && name.ends_with(".error.json") {
            failed += 1;
        } else if name.starts_with("repeat_") && name.ends_with(".json") {
            traces.push((repeat_number(name), p));
        }
    }
    if !traces.is_empty() {
        traces.sort();
        let records = traces
            .iter()
            .map(|(_, p)| read_run_record(p))
            .collect::<Result<Vec<_>>>()?;
        rows.push(TableRow::from_records(&records, failed)?);
    }
    Ok(())
}

fn repeat_number(name: &str) -> usize {
    name.trim_start_matches("repeat_")
        .trim_end_matches(".json")
        .parse()
        .unwrap_or(usize::MAX)
}
