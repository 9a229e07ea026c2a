//! CSV and JSON serialization of experiment results.
//!
//! `series.csv` is the per-trial time series contract read by the plotting
//! scripts. Floats use Rust's shortest round-trip decimal form, so values
//! parse back bit-exactly.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;

use crate::config::SimulationConfig;
use crate::experiment::{
    AggregateRow, ConvergenceStats, ExperimentError, ExperimentResult, SweepResult, SweepRow,
    TrialSummary,
};
use crate::metrics::MeasurementRow;

pub const SERIES_HEADER: &str =
    "trial,t,tcs,tcs_method,complexity_mean,complexity_max,complexity_min,converged,padded";
pub const AGGREGATE_HEADER: &str =
    "t,tcs,complexity_mean,complexity_max,complexity_min,converged_fraction";
pub const SWEEP_HEADER: &str = "policy,tau,gamma,bandit_n,trials,converged_trials,convergence_time_mean,convergence_time_std,peak_complexity";

pub fn write_series<W: Write>(mut out: W, rows: &[MeasurementRow]) -> io::Result<()> {
    writeln!(out, "{SERIES_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.trial,
            r.t,
            r.tcs,
            r.tcs_method.as_str(),
            r.complexity_mean,
            r.complexity_max,
            r.complexity_min,
            r.converged,
            r.padded
        )?;
    }
    Ok(())
}

pub fn write_aggregate<W: Write>(mut out: W, rows: &[AggregateRow]) -> io::Result<()> {
    writeln!(out, "{AGGREGATE_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.t, r.tcs, r.complexity_mean, r.complexity_max, r.complexity_min, r.converged
        )?;
    }
    Ok(())
}

fn opt<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_sweep<W: Write>(mut out: W, rows: &[SweepRow]) -> io::Result<()> {
    writeln!(out, "{SWEEP_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.policy,
            opt(r.tau),
            opt(r.gamma),
            opt(r.bandit_n),
            r.trials,
            r.converged_trials,
            opt(r.convergence_time_mean),
            opt(r.convergence_time_std),
            r.peak_complexity
        )?;
    }
    Ok(())
}

#[derive(Serialize)]
struct ConfigEcho<'a> {
    #[serde(flatten)]
    config: &'a SimulationConfig,
    effective_bandit_n: f64,
}

#[derive(Serialize)]
struct Summary<'a> {
    config: ConfigEcho<'a>,
    trials: &'a [TrialSummary],
    aggregate: &'a ConvergenceStats,
    peak_mean_complexity: f64,
}

pub fn summary_json(result: &ExperimentResult) -> String {
    let summary = Summary {
        config: ConfigEcho {
            config: &result.config,
            effective_bandit_n: result.config.effective_bandit_n(),
        },
        trials: &result.summaries,
        aggregate: &result.convergence,
        peak_mean_complexity: result.peak_mean_complexity(),
    };
    let mut s = serde_json::to_string_pretty(&summary).expect("summary is serializable");
    s.push('\n');
    s
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> ExperimentError + '_ {
    move |source| ExperimentError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn write_file(
    path: &Path,
    write: impl FnOnce(&mut Vec<u8>) -> io::Result<()>,
) -> Result<(), ExperimentError> {
    let mut buf = Vec::new();
    write(&mut buf).map_err(io_err(path))?;
    fs::write(path, buf).map_err(io_err(path))
}

/// Writes `series.csv`, `aggregate.csv` and `summary.json` into `dir`.
pub fn write_experiment(dir: &Path, result: &ExperimentResult) -> Result<(), ExperimentError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    write_file(&dir.join("series.csv"), |b| write_series(b, &result.rows))?;
    write_file(&dir.join("aggregate.csv"), |b| {
        write_aggregate(b, &result.aggregate)
    })?;
    write_file(&dir.join("summary.json"), |b| {
        b.extend_from_slice(summary_json(result).as_bytes());
        Ok(())
    })
}

/// Writes `sweep.csv` and one experiment directory per cell into `dir`.
pub fn write_sweep_dir(dir: &Path, sweep: &SweepResult) -> Result<(), ExperimentError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    write_file(&dir.join("sweep.csv"), |b| write_sweep(b, &sweep.rows))?;
    for cell in &sweep.cells {
        write_experiment(&dir.join(&cell.label), &cell.result)?;
    }
    Ok(())
}
