//! Trial orchestration, aggregation across trials, and parameter sweeps.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{ConfigError, SimulationConfig};
use crate::engine::{run_simulation, SimulationOutcome};
use crate::metrics::MeasurementRow;
use crate::strategy::PolicyKind;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("trial {trial} failed: {source}")]
    Trial {
        trial: u32,
        #[source]
        source: ConfigError,
    },
    #[error("sweep needs at least one tau value")]
    EmptySweep,
    #[error("sweep needs at least one gamma value")]
    NoGammas,
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub trial: u32,
    pub convergence_time: Option<u64>,
    /// Highest population-mean complexity seen during the trial.
    pub peak_complexity_mean: f64,
    pub final_tcs: f64,
}

impl TrialSummary {
    fn from_outcome(o: &SimulationOutcome) -> Self {
        let peak = o.rows.iter().map(|r| r.complexity_mean).fold(0.0, f64::max);
        Self {
            trial: o.trial,
            convergence_time: o.convergence_time,
            peak_complexity_mean: peak,
            final_tcs: o.rows.last().map_or(0.0, |r| r.tcs),
        }
    }
}

/// Trial-mean observables at one measurement tick.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub t: u64,
    pub tcs: f64,
    pub complexity_mean: f64,
    pub complexity_max: f64,
    pub complexity_min: f64,
    /// Fraction of trials converged at this tick.
    pub converged: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceStats {
    pub trials: u32,
    pub converged_trials: u32,
    /// Mean over converged trials.
    pub convergence_time_mean: Option<f64>,
    /// Sample standard deviation over converged trials.
    pub convergence_time_std: Option<f64>,
}

impl ConvergenceStats {
    fn from_summaries(summaries: &[TrialSummary]) -> Self {
        let times: Vec<f64> = summaries
            .iter()
            .filter_map(|s| s.convergence_time.map(|t| t as f64))
            .collect();
        let n = times.len();
        let mean = (n > 0).then(|| times.iter().sum::<f64>() / n as f64);
        let std = mean.map(|mu| {
            if n < 2 {
                0.0
            } else {
                (times.iter().map(|t| (t - mu).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
            }
        });
        Self {
            trials: summaries.len() as u32,
            converged_trials: n as u32,
            convergence_time_mean: mean,
            convergence_time_std: std,
        }
    }

    pub fn all_converged(&self) -> bool {
        self.trials > 0 && self.converged_trials == self.trials
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub config: SimulationConfig,
    /// All measurement rows ordered by `(trial, t)`.
    pub rows: Vec<MeasurementRow>,
    pub summaries: Vec<TrialSummary>,
    pub aggregate: Vec<AggregateRow>,
    pub convergence: ConvergenceStats,
}

impl ExperimentResult {
    /// Peak over time of the trial-mean complexity.
    pub fn peak_mean_complexity(&self) -> f64 {
        self.aggregate
            .iter()
            .map(|r| r.complexity_mean)
            .fold(0.0, f64::max)
    }
}

/// Element-wise mean of per-trial series at matching `t`.
///
/// Every trial must have the same tick sequence, which holds because early
/// stops are padded to full length.
pub fn aggregate_series(per_trial: &[Vec<MeasurementRow>]) -> Vec<AggregateRow> {
    let Some(first) = per_trial.first() else {
        return Vec::new();
    };
    let n = per_trial.len() as f64;
    (0..first.len())
        .map(|k| {
            let at = |f: fn(&MeasurementRow) -> f64| {
                per_trial.iter().map(|rows| f(&rows[k])).sum::<f64>() / n
            };
            debug_assert!(per_trial.iter().all(|rows| rows[k].t == first[k].t));
            AggregateRow {
                t: first[k].t,
                tcs: at(|r| r.tcs),
                complexity_mean: at(|r| r.complexity_mean),
                complexity_max: at(|r| r.complexity_max),
                complexity_min: at(|r| r.complexity_min),
                converged: at(|r| if r.converged { 1.0 } else { 0.0 }),
            }
        })
        .collect()
}

/// Runs `config.trials` independent trials (in parallel) and aggregates them.
pub fn run_experiment(config: &SimulationConfig) -> Result<ExperimentResult, ExperimentError> {
    config.validate()?;
    let outcomes: Vec<SimulationOutcome> = (0..config.trials)
        .into_par_iter()
        .map(|trial| {
            run_simulation(config, trial).map_err(|source| ExperimentError::Trial { trial, source })
        })
        .collect::<Result<_, _>>()?;

    let summaries: Vec<TrialSummary> = outcomes.iter().map(TrialSummary::from_outcome).collect();
    let per_trial: Vec<Vec<MeasurementRow>> = outcomes.into_iter().map(|o| o.rows).collect();
    let aggregate = aggregate_series(&per_trial);
    let convergence = ConvergenceStats::from_summaries(&summaries);
    Ok(ExperimentResult {
        config: config.clone(),
        rows: per_trial.into_iter().flatten().collect(),
        summaries,
        aggregate,
        convergence,
    })
}

/// One cell of a sweep table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub policy: PolicyKind,
    /// `None` for the random baseline.
    pub tau: Option<usize>,
    pub gamma: Option<f64>,
    pub bandit_n: Option<f64>,
    pub trials: u32,
    pub converged_trials: u32,
    pub convergence_time_mean: Option<f64>,
    pub convergence_time_std: Option<f64>,
    pub peak_complexity: f64,
}

impl SweepRow {
    fn from_result(r: &ExperimentResult) -> Self {
        let lapsmax = r.config.policy == PolicyKind::LapsMax;
        Self {
            policy: r.config.policy,
            tau: lapsmax.then_some(r.config.tau),
            gamma: lapsmax.then_some(r.config.gamma),
            bandit_n: lapsmax.then(|| r.config.effective_bandit_n()),
            trials: r.convergence.trials,
            converged_trials: r.convergence.converged_trials,
            convergence_time_mean: r.convergence.convergence_time_mean,
            convergence_time_std: r.convergence.convergence_time_std,
            peak_complexity: r.peak_mean_complexity(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepCell {
    /// Directory-friendly label, e.g. `lapsmax_tau2_gamma0.01`.
    pub label: String,
    pub result: ExperimentResult,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub cells: Vec<SweepCell>,
}

impl SweepResult {
    pub fn baseline(&self) -> Option<&SweepRow> {
        self.rows.iter().find(|r| r.policy == PolicyKind::Random)
    }

    pub fn row(&self, tau: usize, gamma: f64) -> Option<&SweepRow> {
        self.rows
            .iter()
            .find(|r| r.tau == Some(tau) && r.gamma == Some(gamma))
    }
}

/// One LAPS-max experiment per `(gamma, tau)` pair, plus an optional random
/// topic choice baseline, all sharing the base seed.
pub fn run_sweep(
    base: &SimulationConfig,
    taus: &[usize],
    gammas: &[f64],
    include_random: bool,
) -> Result<SweepResult, ExperimentError> {
    if taus.is_empty() {
        return Err(ExperimentError::EmptySweep);
    }
    if gammas.is_empty() {
        return Err(ExperimentError::NoGammas);
    }
    let mut configs = Vec::new();
    if include_random {
        configs.push((
            "random".to_string(),
            SimulationConfig {
                policy: PolicyKind::Random,
                ..base.clone()
            },
        ));
    }
    for &gamma in gammas {
        for &tau in taus {
            configs.push((
                format!("lapsmax_tau{tau}_gamma{gamma}"),
                SimulationConfig {
                    policy: PolicyKind::LapsMax,
                    tau,
                    gamma,
                    ..base.clone()
                },
            ));
        }
    }
    for (_, c) in &configs {
        c.validate()?;
    }
    let cells: Vec<SweepCell> = configs
        .into_iter()
        .map(|(label, c)| run_experiment(&c).map(|result| SweepCell { label, result }))
        .collect::<Result<_, _>>()?;
    Ok(SweepResult {
        rows: cells
            .iter()
            .map(|c| SweepRow::from_result(&c.result))
            .collect(),
        cells,
    })
}
