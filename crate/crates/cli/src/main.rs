use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use photonic_qrc::experiment::{emit_plot_scripts, ExperimentKind, ExperimentSpec, ForecastTask};

/// Run reservoir-computing sweeps and write their CSV tables.
#[derive(Debug, Parser)]
#[command(name = "pqrc", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Linear memory capacity versus feedback strength.
    MemoryCapacity(SweepArgs),
    /// Test NMSE for Mackey-Glass, NARMA or Ising forecasting.
    Forecast {
        #[arg(long, value_enum)]
        task: TaskArg,
        /// NARMA orders to evaluate.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        orders: Option<Vec<usize>>,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Memory capacity under a finite number of measurements.
    ShotNoise(SweepArgs),
    /// Write gnuplot scripts for existing result tables.
    Plot {
        #[arg(required = true)]
        csv: Vec<PathBuf>,
        /// Directory for the scripts (defaults to the first CSV's directory).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TaskArg {
    Mg,
    Narma,
    Ising,
}

impl From<TaskArg> for ForecastTask {
    fn from(t: TaskArg) -> Self {
        match t {
            TaskArg::Mg => ForecastTask::Mg,
            TaskArg::Narma => ForecastTask::Narma,
            TaskArg::Ising => ForecastTask::Ising,
        }
    }
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// TOML experiment file; flags given here override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    realizations: Option<usize>,
    /// Use expectation-value coincidences.
    #[arg(long, conflicts_with = "shots")]
    exact: bool,
    /// Measurement budgets. A single budget switches memory-capacity and
    /// forecast runs to finite-shot mode.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    shots: Option<Vec<u64>>,
    #[arg(long, value_delimiter = ',', num_args = 1.., allow_negative_numbers = true)]
    alpha_fb: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', num_args = 1.., allow_negative_numbers = true)]
    alpha_in: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    horizons: Option<Vec<usize>>,
    /// Print the effective experiment file and exit.
    #[arg(long)]
    print_spec: bool,
}

impl SweepArgs {
    fn spec(&self, kind: ExperimentKind) -> anyhow::Result<ExperimentSpec> {
        let mut spec = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                let spec: ExperimentSpec =
                    toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
                if spec.kind != kind {
                    bail!(
                        "{} describes a {} experiment, not {}",
                        path.display(),
                        spec.kind.as_str(),
                        kind.as_str()
                    );
                }
                spec
            }
            None => ExperimentSpec::for_kind(kind),
        };
        if let Some(seed) = self.seed {
            spec.master_seed = seed;
        }
        if let Some(out) = &self.out {
            spec.output_dir = out.clone();
        }
        if let Some(n) = self.realizations {
            spec.realizations = Some(n);
        }
        if let Some(shots) = &self.shots {
            spec.shots = shots.clone();
            if kind != ExperimentKind::ShotNoise {
                spec.exact = false;
            }
        }
        if self.exact {
            spec.exact = true;
        }
        if let Some(v) = &self.alpha_fb {
            spec.alpha_fb = v.clone();
        }
        if let Some(v) = &self.alpha_in {
            spec.alpha_in = v.clone();
        }
        if let Some(v) = &self.horizons {
            spec.horizons = v.clone();
        }
        Ok(spec)
    }
}

fn run_sweep(spec: ExperimentSpec, print_spec: bool) -> anyhow::Result<()> {
    if print_spec {
        print!("{}", toml::to_string(&spec).context("serializing the experiment")?);
        return Ok(());
    }
    spec.validate()?;
    let output = spec.run()?;
    let failures = output.metadata.failures.len();
    if failures > 0 {
        eprintln!("warning: {failures} diverging instance(s) excluded from the means (see metadata)");
    }
    for path in output.write_to(&spec.output_dir)? {
        println!("{}", path.display());
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::MemoryCapacity(args) => run_sweep(args.spec(ExperimentKind::MemoryCapacity)?, args.print_spec),
        Command::ShotNoise(args) => run_sweep(args.spec(ExperimentKind::ShotNoise)?, args.print_spec),
        Command::Forecast { task, orders, sweep } => {
            let mut spec = sweep.spec(ExperimentKind::Forecast)?;
            // The flag wins over any task named in the file.
            spec.task = task.into();
            if let Some(orders) = orders {
                spec.narma_orders = orders;
            }
            run_sweep(spec, sweep.print_spec)
        }
        Command::Plot { csv, out } => {
            let dir = out
                .or_else(|| csv[0].parent().map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from("."));
            for path in emit_plot_scripts(&csv, &dir)? {
                println!("{}", path.display());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
