use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use naming_game::output::{write_experiment, write_sweep_dir};
use naming_game::{
    run_experiment, run_sweep, ConfigError, ConfigOverrides, ExperimentError, PolicyKind,
    SimulationConfig,
};

/// Naming Game simulations with random or LAPS-max topic choice.
#[derive(Parser)]
#[command(name = "naming-game", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write series.csv, aggregate.csv, summary.json.
    Run(RunArgs),
    /// Run LAPS-max over a grid of window lengths and exploration rates,
    /// plus a random topic choice baseline.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    agents: Option<usize>,
    #[arg(long)]
    meanings: Option<usize>,
    #[arg(long)]
    words: Option<usize>,
    /// Bandit decay time scale (defaults to tau).
    #[arg(long)]
    bandit_n: Option<f64>,
    #[arg(long)]
    max_interactions: Option<u64>,
    #[arg(long)]
    measure_every: Option<u64>,
    /// Monte Carlo probes per measurement; 0 computes TCS exactly.
    #[arg(long)]
    mc_samples: Option<usize>,
    #[arg(long)]
    trials: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    /// Stop each trial at convergence and pad the remaining rows.
    #[arg(long)]
    stop_on_convergence: bool,
    /// TOML file with defaults; command-line flags take precedence.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    #[arg(long, value_name = "DIR", default_value = "results")]
    out: PathBuf,
}

impl Common {
    fn overrides(&self) -> ConfigOverrides {
        ConfigOverrides {
            agents: self.agents,
            meanings: self.meanings,
            words: self.words,
            bandit_n: self.bandit_n,
            max_interactions: self.max_interactions,
            measure_every: self.measure_every,
            mc_samples: self.mc_samples,
            trials: self.trials,
            seed: self.seed,
            stop_on_convergence: self.stop_on_convergence.then_some(true),
            ..ConfigOverrides::default()
        }
    }

    fn resolve(&self, extra: ConfigOverrides) -> Result<SimulationConfig, ConfigError> {
        let file = self
            .config
            .as_deref()
            .map(ConfigOverrides::load)
            .transpose()?;
        let mut flags = self.overrides();
        flags.policy = extra.policy.or(flags.policy);
        flags.tau = extra.tau.or(flags.tau);
        flags.gamma = extra.gamma.or(flags.gamma);
        SimulationConfig::resolve(file.as_ref(), &flags)
    }
}

#[derive(Args)]
struct RunArgs {
    /// `random` or `lapsmax`.
    #[arg(long)]
    policy: Option<PolicyKind>,
    #[arg(long)]
    tau: Option<usize>,
    #[arg(long)]
    gamma: Option<f64>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct SweepArgs {
    /// Window lengths, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [1, 2, 5, 10, 20, 50])]
    tau: Vec<usize>,
    /// Exploration rates, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [0.01, 1.0])]
    gamma: Vec<f64>,
    /// Skip the random topic choice baseline.
    #[arg(long)]
    no_baseline: bool,
    #[command(flatten)]
    common: Common,
}

fn fmt_time(t: Option<f64>) -> String {
    t.map(|x| format!("{x:.0}")).unwrap_or_else(|| "-".into())
}

fn run(args: &RunArgs) -> anyhow::Result<()> {
    let cfg = args.common.resolve(ConfigOverrides {
        policy: args.policy,
        tau: args.tau,
        gamma: args.gamma,
        ..ConfigOverrides::default()
    })?;
    let result = run_experiment(&cfg)?;
    write_experiment(&args.common.out, &result)?;
    let c = &result.convergence;
    println!(
        "{} trials, {} converged, mean convergence time {}, peak mean complexity {:.2}",
        c.trials,
        c.converged_trials,
        fmt_time(c.convergence_time_mean),
        result.peak_mean_complexity()
    );
    println!("wrote {}", args.common.out.display());
    Ok(())
}

fn sweep(args: &SweepArgs) -> anyhow::Result<()> {
    // Validate the shared part once; per-cell values are checked by the sweep.
    let base = args.common.resolve(ConfigOverrides::default())?;
    let result = run_sweep(&base, &args.tau, &args.gamma, !args.no_baseline)?;
    write_sweep_dir(&args.common.out, &result)?;
    for r in &result.rows {
        let label = match (r.tau, r.gamma) {
            (Some(t), Some(g)) => format!("{} tau={t} gamma={g}", r.policy),
            _ => r.policy.to_string(),
        };
        println!(
            "{label}: {}/{} converged, mean time {}, peak complexity {:.2}",
            r.converged_trials,
            r.trials,
            fmt_time(r.convergence_time_mean),
            r.peak_complexity
        );
    }
    println!("wrote {}", args.common.out.display());
    Ok(())
}

fn is_config_error(e: &anyhow::Error) -> bool {
    e.is::<ConfigError>()
        || matches!(
            e.downcast_ref::<ExperimentError>(),
            Some(
                ExperimentError::Config(_)
                    | ExperimentError::EmptySweep
                    | ExperimentError::NoGammas
            )
        )
}

fn out_dir_check(dir: &Path) -> anyhow::Result<()> {
    if dir.is_file() {
        anyhow::bail!("output path {} is a file", dir.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.command {
        Command::Run(a) => out_dir_check(&a.common.out).and_then(|_| run(a)),
        Command::Sweep(a) => out_dir_check(&a.common.out).and_then(|_| sweep(a)),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if is_config_error(&e) {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
