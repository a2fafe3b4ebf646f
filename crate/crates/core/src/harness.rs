//! Coverage trials and repeated-trial experiments.
//!
//! A trial draws paths one at a time from a prepared strategy and records
//! after how many paths each coverage threshold was first reached. An
//! experiment prepares every strategy once, runs independent seeded trials
//! and aggregates them in trial order, so the report depends only on the
//! seed and never on the number of workers.

use std::fmt::Write as _;
use std::sync::Arc;
use std::time::Instant;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::Serialize;

use crate::automaton::{Automaton, StateId};
use crate::count::num_paths;
use crate::error::{Error, Result};
use crate::rng::{RngHandle, DEFAULT_SEED, TRIAL_STREAM};
use crate::strategy::{ModelContext, PathGenerator, PathStrategy, Uniform};

pub const DEFAULT_THRESHOLDS: [f64; 5] = [50.0, 90.0, 95.0, 99.0, 100.0];

/// Lower limit of the default per-trial cap.
pub const MIN_DEFAULT_CAP: u64 = 100_000;

/// Longest calibration run used to derive the default cap.
pub const CALIBRATION_LIMIT: u64 = 1_000_000;

const CALIBRATION_STREAM: u64 = u64::MAX - 1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageTrialResult {
    pub thresholds: Vec<f64>,
    /// Paths generated when each threshold was first reached, `None` if the
    /// cap was hit first.
    pub hits: Vec<Option<u64>>,
    pub total_states: usize,
    pub covered: usize,
    pub paths: u64,
    /// `(path number, states it covered first)`, for paths that covered
    /// something new. Path numbers start at 1.
    pub trace: Vec<(u64, Vec<StateId>)>,
}

impl CoverageTrialResult {
    /// Number of the path that first visited `q`.
    pub fn first_visit(&self, q: StateId) -> Option<u64> {
        self.trace
            .iter()
            .find(|(_, states)| states.contains(&q))
            .map(|&(k, _)| k)
    }

    pub fn exhausted(&self) -> bool {
        self.hits.iter().any(Option::is_none)
    }
}

fn check_thresholds(thresholds: &[f64]) -> Result<()> {
    if thresholds.is_empty() {
        return Err(Error::Domain(
            "at least one coverage threshold is required".into(),
        ));
    }
    for t in thresholds {
        if !(*t > 0.0 && *t <= 100.0) {
            return Err(Error::Domain(format!("threshold {t} is outside (0, 100]")));
        }
    }
    if thresholds.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain(
            "thresholds must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// States needed to reach `percent` coverage of `n` states.
fn required_states(percent: f64, n: usize) -> usize {
    ((percent * n as f64 / 100.0) - 1e-9).ceil().max(1.0) as usize
}

/// Generates paths until the largest threshold is reached or `cap` paths
/// have been drawn.
pub fn run_coverage_trial(
    a: &Automaton,
    generator: &dyn PathGenerator,
    thresholds: &[f64],
    cap: u64,
    rng: &mut RngHandle,
) -> Result<CoverageTrialResult> {
    check_thresholds(thresholds)?;
    if cap == 0 {
        return Err(Error::Domain("trial cap must be at least 1".into()));
    }
    let n = a.num_states();
    let needed: Vec<usize> = thresholds.iter().map(|&t| required_states(t, n)).collect();
    let mut seen = vec![false; n];
    let mut covered = 0;
    let mut hits = vec![None; thresholds.len()];
    let mut next = 0;
    let mut trace = Vec::new();
    let mut paths = 0;
    while next < needed.len() && paths < cap {
        let path = generator.generate(rng)?;
        paths += 1;
        let fresh: Vec<StateId> = path
            .visited_states()
            .into_iter()
            .filter(|&s| !std::mem::replace(&mut seen[s as usize], true))
            .collect();
        if fresh.is_empty() {
            continue;
        }
        covered += fresh.len();
        trace.push((paths, fresh));
        while next < needed.len() && covered >= needed[next] {
            hits[next] = Some(paths);
            next += 1;
        }
    }
    Ok(CoverageTrialResult {
        thresholds: thresholds.to_vec(),
        hits,
        total_states: n,
        covered,
        paths,
        trace,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub thresholds: Vec<f64>,
    pub trials: usize,
    /// Per-trial path cap; derived from a calibration run when unset.
    pub cap: Option<u64>,
    pub seed: u64,
    /// Worker threads for trials. Does not affect results.
    #[serde(skip)]
    pub workers: usize,
    /// Path length bound; twice the eccentricity when unset.
    pub length_bound: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            thresholds: DEFAULT_THRESHOLDS.to_vec(),
            trials: 100,
            cap: None,
            seed: DEFAULT_SEED,
            workers: 1,
            length_bound: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelInfo {
    pub name: String,
    pub states: usize,
    pub transitions: usize,
    pub eccentricity: usize,
    pub length_bound: usize,
    /// Exact number of successful paths of length `1..=length_bound`.
    pub paths: String,
    /// The same count in short scientific form.
    pub paths_approx: String,
}

impl ModelInfo {
    pub fn new(name: &str, a: &Automaton, bound: usize) -> Self {
        let total = num_paths(a, bound).grand_total();
        Self {
            name: name.to_string(),
            states: a.num_states(),
            transitions: a.num_transitions(),
            eccentricity: a.eccentricity(),
            length_bound: bound,
            paths: total.to_string(),
            paths_approx: scientific(&total),
        }
    }
}

/// `5.63e153` style rendering, truncated to three significant digits.
pub fn scientific(v: &BigUint) -> String {
    let digits = v.to_string();
    if digits.len() <= 6 {
        return digits;
    }
    format!("{}.{}e{}", &digits[..1], &digits[1..3], digits.len() - 1)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdStats {
    pub threshold: f64,
    /// Trials that reached the threshold; the statistics cover only these.
    pub reached: usize,
    pub avg: Option<f64>,
    pub min: Option<u64>,
    pub max: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrategyReport {
    pub strategy: String,
    /// Optimal minimum visit probability, for LP-biased strategies.
    pub p_min: Option<f64>,
    pub stats: Vec<ThresholdStats>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub model: ModelInfo,
    pub trials: usize,
    pub thresholds: Vec<f64>,
    pub cap: u64,
    pub seed: u64,
    pub strategies: Vec<StrategyReport>,
}

impl ExperimentReport {
    pub fn strategy(&self, label: &str) -> Option<&StrategyReport> {
        self.strategies.iter().find(|s| s.strategy == label)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("strategy,threshold,avg,min,max,reached\n");
        let opt = |v: Option<String>| v.unwrap_or_default();
        for s in &self.strategies {
            for t in &s.stats {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    s.strategy,
                    t.threshold,
                    opt(t.avg.map(|v| format!("{v:.3}"))),
                    opt(t.min.map(|v| v.to_string())),
                    opt(t.max.map(|v| v.to_string())),
                    t.reached
                );
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is serializable")
    }
}

/// Wall-clock seconds, kept apart from the report so reports stay
/// reproducible.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Timings {
    /// Cap calibration, when the cap was derived.
    pub calibration: Option<f64>,
    /// `(strategy, preprocessing seconds)`, covering alpha and the LP.
    pub preparation: Vec<(String, f64)>,
    /// `(strategy, seconds spent in trials)`.
    pub trials: Vec<(String, f64)>,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub report: ExperimentReport,
    pub timings: Timings,
    /// Per strategy, per trial, in trial order.
    pub results: Vec<Vec<CoverageTrialResult>>,
}

/// `max(MIN_DEFAULT_CAP, 10 * paths uniform needed for full coverage)` on
/// one calibration run.
pub fn default_cap(a: &Arc<Automaton>, bound: usize, seed: u64) -> Result<u64> {
    let ctx = ModelContext::new(a.clone(), bound, seed);
    let generator = Uniform.prepare(&ctx)?;
    let mut rng = RngHandle::with_stream(seed, CALIBRATION_STREAM);
    let run = run_coverage_trial(a, generator.as_ref(), &[100.0], CALIBRATION_LIMIT, &mut rng)?;
    let needed = run.hits[0].unwrap_or(CALIBRATION_LIMIT);
    Ok(MIN_DEFAULT_CAP.max(10 * needed))
}

pub fn summarize(thresholds: &[f64], results: &[CoverageTrialResult]) -> Vec<ThresholdStats> {
    thresholds
        .iter()
        .enumerate()
        .map(|(k, &threshold)| {
            let hits: Vec<u64> = results.iter().filter_map(|r| r.hits[k]).collect();
            let reached = hits.len();
            ThresholdStats {
                threshold,
                reached,
                avg: (reached > 0).then(|| hits.iter().sum::<u64>() as f64 / reached as f64),
                min: hits.iter().min().copied(),
                max: hits.iter().max().copied(),
            }
        })
        .collect()
}

fn warnings_for(a: &Automaton, generator: &dyn PathGenerator) -> Vec<String> {
    let mut warnings = Vec::new();
    if let Some(stats) = generator.alpha().and_then(|m| m.stats()) {
        if !stats.zero_columns.is_empty() {
            let names: Vec<&str> = stats
                .zero_columns
                .iter()
                .map(|&j| a.state_name(j))
                .collect();
            warnings.push(format!(
                "{} states never seen while estimating alpha, the biased sampler may miss them: {}",
                names.len(),
                names.join(" ")
            ));
        }
    }
    warnings
}

pub fn run_experiment(
    name: &str,
    a: Arc<Automaton>,
    strategies: &[Box<dyn PathStrategy>],
    config: &ExperimentConfig,
) -> Result<ExperimentOutcome> {
    check_thresholds(&config.thresholds)?;
    if config.trials == 0 {
        return Err(Error::Domain("at least one trial is required".into()));
    }
    let bound = config
        .length_bound
        .unwrap_or_else(|| a.default_length_bound());
    if bound == 0 {
        return Err(Error::Domain("length bound must be at least 1".into()));
    }
    let mut timings = Timings::default();
    let cap = match config.cap {
        Some(c) => c,
        None => {
            let start = Instant::now();
            let c = default_cap(&a, bound, config.seed)?;
            timings.calibration = Some(start.elapsed().as_secs_f64());
            c
        }
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers.max(1))
        .build()
        .map_err(|e| Error::Domain(format!("cannot start workers: {e}")))?;
    let ctx = ModelContext::new(a.clone(), bound, config.seed);

    let mut reports = Vec::with_capacity(strategies.len());
    let mut results = Vec::with_capacity(strategies.len());
    for strategy in strategies {
        let label = strategy.label();
        let start = Instant::now();
        let generator = strategy.prepare(&ctx)?;
        timings
            .preparation
            .push((label.clone(), start.elapsed().as_secs_f64()));

        let start = Instant::now();
        let run = |t: usize| {
            let mut rng = RngHandle::with_stream(config.seed.wrapping_add(t as u64), TRIAL_STREAM);
            run_coverage_trial(&a, generator.as_ref(), &config.thresholds, cap, &mut rng)
        };
        let trials: Vec<CoverageTrialResult> = if config.workers <= 1 {
            (0..config.trials).map(run).collect::<Result<_>>()?
        } else {
            pool.install(|| {
                (0..config.trials)
                    .into_par_iter()
                    .map(run)
                    .collect::<Result<_>>()
            })?
        };
        timings
            .trials
            .push((label.clone(), start.elapsed().as_secs_f64()));

        reports.push(StrategyReport {
            strategy: label,
            p_min: generator.distribution().map(|d| d.p_min),
            stats: summarize(&config.thresholds, &trials),
            warnings: warnings_for(&a, generator.as_ref()),
        });
        results.push(trials);
    }

    Ok(ExperimentOutcome {
        report: ExperimentReport {
            model: ModelInfo::new(name, &a, bound),
            trials: config.trials,
            thresholds: config.thresholds.clone(),
            cap,
            seed: config.seed,
            strategies: reports,
        },
        timings,
        results,
    })
}
