//! Monte Carlo experiments: trial `t` runs on seed stream `(master_seed, t)`;
//! records are aggregated in trial order so the summary does not depend on
//! the number of worker threads.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use softrgg_core::analysis::{component_summary, small_component_counts, thresholds_for_points};
use softrgg_core::points::{sample_binomial, sample_poisson};
use softrgg_core::quadrature::{expected_isolated_with, IntegralResult, Kernel, QuadratureOptions};
use softrgg_core::regimes::RegimeSolution;
use softrgg_core::softgraph::{sample_graph, SamplerMode};
use softrgg_core::stats::tv_distance;
use softrgg_core::{ConnectionFunction, SeedSpec};

use crate::config::{ExperimentConfig, GraphModel, PointModel, Statistic};
use crate::error::{HarnessError, Result};
use crate::io::{read_json, write_json};

const POINTS_TAG: u64 = 0;
const EDGES_TAG: u64 = 1;
const COUPLING_TAG: u64 = 2;

/// One row of `records.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial_id: u64,
    pub n_points: usize,
    pub n_edges: usize,
    pub n0: usize,
    pub l1: usize,
    pub l2: usize,
    pub connected: bool,
    pub min_degree: usize,
    pub sigma: Option<f64>,
    pub tau: Option<f64>,
    /// `T_k` for `k ≤ k_max`; stored in `small_components.csv`.
    #[serde(skip)]
    pub small_components: Option<BTreeMap<usize, usize>>,
}

/// Everything in the summary that is not derived from trial records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub master_seed: u64,
    pub first_trial: u64,
    pub trials: usize,
    pub points: PointModel,
    pub connection: ConnectionFunction,
    pub regime_solution: Option<RegimeSolution>,
    pub sampler: SamplerMode,
    pub statistics: Vec<Statistic>,
    pub k_max: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    /// Fraction of trials with each value of `N0`.
    pub n0_histogram: Option<BTreeMap<usize, f64>>,
    pub mean_n0: f64,
    pub freq_n0_zero: f64,
    pub freq_connected: Option<f64>,
    pub freq_n0_zero_but_disconnected: Option<f64>,
    pub freq_l2_gt_1: Option<f64>,
    pub freq_sigma_eq_tau: Option<f64>,
    pub freq_sigma_lt_tau: Option<f64>,
    /// Mean `T_k` per trial, `k ≤ k_max`.
    pub mean_small_components: Option<BTreeMap<usize, f64>>,
    /// Against `Poisson(quadrature_reference.value)`.
    pub tv_to_poisson: Option<f64>,
    pub quadrature_reference: Option<IntegralResult>,
    pub metadata: RunMetadata,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub summary: ExperimentSummary,
    pub records: Vec<TrialRecord>,
}

struct Resolved {
    connection: ConnectionFunction,
    regime_solution: Option<RegimeSolution>,
    threshold_p: Option<f64>,
}

fn resolve(config: &ExperimentConfig) -> Result<Resolved> {
    let bad = |msg: String| Err(HarnessError::Config(msg));
    if config.trials == 0 {
        return bad("trials must be at least 1".into());
    }
    if config.first_trial.checked_add(config.trials as u64).is_none() {
        return bad("trial range overflows".into());
    }
    match config.points {
        PointModel::Poisson { lambda } if !(lambda > 0.0 && lambda.is_finite()) => {
            return bad(format!("poisson intensity {lambda} must be positive and finite"));
        }
        PointModel::Binomial { n: 0 } => return bad("binomial point count must be positive".into()),
        _ => {}
    }
    if let SamplerMode::CellList { tail_eps } = config.sampler {
        if !(tail_eps > 0.0 && tail_eps < 1.0) {
            return bad(format!("tail_eps {tail_eps} not in (0, 1)"));
        }
    }
    if config.wants(Statistic::SmallComponents) && config.k_max == 0 {
        return bad("k_max must be at least 1".into());
    }
    if !(config.rel_tol > 0.0 && config.rel_tol < 1.0) {
        return bad(format!("rel_tol {} not in (0, 1)", config.rel_tol));
    }
    let (connection, regime_solution) = match &config.graph {
        GraphModel::Connection(f) => (f.clone(), None),
        GraphModel::Regime(m) => {
            let (f, sol) = m.resolve(config.points.intensity()).map_err(|e| match e {
                HarnessError::Core(c) => HarnessError::Config(c.to_string()),
                other => other,
            })?;
            (f, Some(sol))
        }
    };
    let threshold_p = connection.step_probability();
    if config.wants(Statistic::Thresholds) && threshold_p.is_none() {
        return bad("thresholds need a step connection function (retention probability p)".into());
    }
    Ok(Resolved { connection, regime_solution, threshold_p })
}

/// Checks a configuration without running anything.
pub fn validate(config: &ExperimentConfig) -> Result<()> {
    resolve(config).map(|_| ())
}

fn run_trial(config: &ExperimentConfig, res: &Resolved, trial_id: u64) -> Result<TrialRecord> {
    let seed = SeedSpec::new(config.master_seed, trial_id);
    let d = res.connection.dimension();
    let points = match config.points {
        PointModel::Binomial { n } => sample_binomial(n, d, seed.child(POINTS_TAG))?,
        PointModel::Poisson { lambda } => sample_poisson(lambda, d, seed.child(POINTS_TAG))?,
    };
    let graph = sample_graph(&points, &res.connection, seed.child(EDGES_TAG), config.sampler)?;
    let s = component_summary(&graph);
    let (sigma, tau) = match res.threshold_p {
        Some(p) if config.wants(Statistic::Thresholds) && points.len() >= 2 => {
            let t = thresholds_for_points(&points, p, seed.child(COUPLING_TAG), None)?;
            (Some(t.sigma), Some(t.tau))
        }
        _ => (None, None),
    };
    let small_components = if config.wants(Statistic::SmallComponents) {
        Some(small_component_counts(&graph, config.k_max)?)
    } else {
        None
    };
    Ok(TrialRecord {
        trial_id,
        n_points: points.len(),
        n_edges: graph.n_edges(),
        n0: s.n0,
        l1: s.l1,
        l2: s.l2,
        connected: s.connected,
        min_degree: s.min_degree,
        sigma,
        tau,
        small_components,
    })
}

/// `I_n` with the kernel matching the point model.
pub fn quadrature_reference(config: &ExperimentConfig, f: &ConnectionFunction) -> Result<IntegralResult> {
    let kernel = match config.points {
        PointModel::Binomial { .. } => Kernel::Binomial,
        PointModel::Poisson { .. } => Kernel::Poisson,
    };
    let opts = QuadratureOptions { rel_tol: config.rel_tol, ..QuadratureOptions::default() };
    Ok(expected_isolated_with(config.points.intensity(), f, kernel, &opts)?)
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<RunOutput> {
    let res = resolve(config)?;
    let reference = if config.reference { Some(quadrature_reference(config, &res.connection)?) } else { None };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads.unwrap_or(0))
        .build()
        .map_err(|e| HarnessError::Config(format!("thread pool: {e}")))?;
    let first = config.first_trial;
    let records = pool.install(|| {
        (first..first + config.trials as u64)
            .into_par_iter()
            .map(|t| run_trial(config, &res, t))
            .collect::<Result<Vec<_>>>()
    })?;
    let metadata = RunMetadata {
        master_seed: config.master_seed,
        first_trial: first,
        trials: config.trials,
        points: config.points,
        connection: res.connection,
        regime_solution: res.regime_solution,
        sampler: config.sampler,
        statistics: config.statistics.iter().copied().collect(),
        k_max: config.k_max,
    };
    let summary = summarize(&records, metadata, reference)?;
    Ok(RunOutput { summary, records })
}

/// Folds trial records (in trial order) into a summary.
pub fn summarize(
    records: &[TrialRecord],
    metadata: RunMetadata,
    reference: Option<IntegralResult>,
) -> Result<ExperimentSummary> {
    let m = records.len();
    if m == 0 || m != metadata.trials {
        return Err(HarnessError::Config(format!("{} records for {} trials", m, metadata.trials)));
    }
    let wants = |s: Statistic| metadata.statistics.contains(&s);
    let total = m as f64;
    let freq = |pred: &dyn Fn(&TrialRecord) -> bool| records.iter().filter(|r| pred(r)).count() as f64 / total;

    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for r in records {
        *counts.entry(r.n0).or_insert(0) += 1;
    }
    let histogram: BTreeMap<usize, f64> = counts.iter().map(|(&k, &c)| (k, c as f64 / total)).collect();
    let n0_sum: usize = records.iter().map(|r| r.n0).sum();

    let tv_to_poisson = match (&reference, wants(Statistic::N0Histogram)) {
        (Some(q), true) => Some(tv_distance(&histogram, q.value)?),
        _ => None,
    };
    let threshold = wants(Statistic::Thresholds);
    let pair = |r: &TrialRecord| r.sigma.zip(r.tau);
    let mean_small_components = if wants(Statistic::SmallComponents) {
        let mut sums: BTreeMap<usize, usize> = (1..=metadata.k_max).map(|k| (k, 0)).collect();
        for r in records {
            let counts = r.small_components.as_ref().ok_or_else(|| {
                HarnessError::Config(format!("trial {} has no small-component counts", r.trial_id))
            })?;
            for (k, c) in counts {
                *sums.entry(*k).or_insert(0) += c;
            }
        }
        Some(sums.into_iter().map(|(k, s)| (k, s as f64 / total)).collect())
    } else {
        None
    };
    let connectivity = wants(Statistic::Connectivity);

    Ok(ExperimentSummary {
        n0_histogram: wants(Statistic::N0Histogram).then_some(histogram),
        mean_n0: n0_sum as f64 / total,
        freq_n0_zero: freq(&|r| r.n0 == 0),
        freq_connected: connectivity.then(|| freq(&|r| r.connected)),
        freq_n0_zero_but_disconnected: connectivity.then(|| freq(&|r| r.n0 == 0 && !r.connected)),
        freq_l2_gt_1: wants(Statistic::L2).then(|| freq(&|r| r.l2 > 1)),
        freq_sigma_eq_tau: threshold.then(|| freq(&|r| pair(r).is_some_and(|(s, t)| s == t))),
        freq_sigma_lt_tau: threshold.then(|| freq(&|r| pair(r).is_some_and(|(s, t)| s < t))),
        mean_small_components,
        tv_to_poisson,
        quadrature_reference: reference,
        metadata,
    })
}

/// Summary JSON as written by [`persist`].
pub fn summary_json(summary: &ExperimentSummary) -> String {
    serde_json::to_string_pretty(summary).expect("summary serializes")
}

#[derive(Debug, Serialize, Deserialize)]
struct SmallComponentRow {
    trial_id: u64,
    k: usize,
    count: usize,
}

/// Writes `records.csv`, `summary.json` and, when tracked,
/// `small_components.csv` into `dir` (created if missing).
pub fn persist(output: &RunOutput, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|source| HarnessError::Io { path: dir.to_path_buf(), source })?;
    let path = dir.join("records.csv");
    let csv_err = |source| HarnessError::Csv { path: path.clone(), source };
    let mut w = csv::Writer::from_path(&path).map_err(csv_err)?;
    for r in &output.records {
        w.serialize(r).map_err(csv_err)?;
    }
    w.flush().map_err(|source| HarnessError::Io { path: path.clone(), source })?;

    if output.summary.mean_small_components.is_some() {
        let path = dir.join("small_components.csv");
        let csv_err = |source| HarnessError::Csv { path: path.clone(), source };
        let mut w = csv::Writer::from_path(&path).map_err(csv_err)?;
        for r in &output.records {
            for (&k, &count) in r.small_components.iter().flatten() {
                w.serialize(SmallComponentRow { trial_id: r.trial_id, k, count }).map_err(csv_err)?;
            }
        }
        w.flush().map_err(|source| HarnessError::Io { path: path.clone(), source })?;
    }
    write_json(&dir.join("summary.json"), &output.summary)
}

/// Reads a persisted run and re-derives the summary from the records;
/// fails if the two disagree.
pub fn load(dir: &Path) -> Result<RunOutput> {
    let stored: ExperimentSummary = read_json(&dir.join("summary.json"))?;
    let path = dir.join("records.csv");
    let csv_err = |source| HarnessError::Csv { path: path.clone(), source };
    let mut records: Vec<TrialRecord> = csv::Reader::from_path(&path)
        .map_err(csv_err)?
        .deserialize()
        .collect::<std::result::Result<_, _>>()
        .map_err(csv_err)?;
    if stored.mean_small_components.is_some() {
        let path = dir.join("small_components.csv");
        let csv_err = |source| HarnessError::Csv { path: path.clone(), source };
        let rows: Vec<SmallComponentRow> = csv::Reader::from_path(&path)
            .map_err(csv_err)?
            .deserialize()
            .collect::<std::result::Result<_, _>>()
            .map_err(csv_err)?;
        let mut by_trial: BTreeMap<u64, BTreeMap<usize, usize>> = BTreeMap::new();
        for row in rows {
            by_trial.entry(row.trial_id).or_default().insert(row.k, row.count);
        }
        for r in &mut records {
            r.small_components = Some(by_trial.remove(&r.trial_id).unwrap_or_default());
        }
    }
    let summary = summarize(&records, stored.metadata.clone(), stored.quadrature_reference)?;
    if summary != stored {
        return Err(HarnessError::Format {
            path: dir.join("summary.json"),
            message: "summary does not match the trial records".into(),
        });
    }
    Ok(RunOutput { summary, records })
}

/// Combines two runs of the same experiment over adjacent trial ranges.
pub fn merge(a: &RunOutput, b: &RunOutput) -> Result<RunOutput> {
    let (first, second) = if a.summary.metadata.first_trial <= b.summary.metadata.first_trial { (a, b) } else { (b, a) };
    let (ma, mb) = (&first.summary.metadata, &second.summary.metadata);
    let same_experiment = RunMetadata { first_trial: 0, trials: 0, ..ma.clone() }
        == RunMetadata { first_trial: 0, trials: 0, ..mb.clone() };
    if !same_experiment || first.summary.quadrature_reference != second.summary.quadrature_reference {
        return Err(HarnessError::Config("runs belong to different experiments".into()));
    }
    if ma.first_trial + ma.trials as u64 != mb.first_trial {
        return Err(HarnessError::Config(format!(
            "trial ranges {}..{} and {}..{} are not adjacent",
            ma.first_trial,
            ma.first_trial + ma.trials as u64,
            mb.first_trial,
            mb.first_trial + mb.trials as u64
        )));
    }
    let records: Vec<TrialRecord> = first.records.iter().chain(&second.records).cloned().collect();
    let metadata = RunMetadata { trials: ma.trials + mb.trials, ..ma.clone() };
    let summary = summarize(&records, metadata, first.summary.quadrature_reference)?;
    Ok(RunOutput { summary, records })
}
