//! `madde`: simulate and analyse the delay logistic models and write CSV datasets.
//!
//! Exit status is 0 on success, 2 for invalid input and 3 for numerical failure
//! (blow-up, or an inconclusive root count, in which case output is still written).

mod commands;
mod error;
mod figures;
mod output;
mod params;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::builder::PossibleValuesParser;
use clap::{Args, Parser, Subcommand};
use madde_core::ModelId;

use commands::Status;
use error::CliResult;
use params::{build_model, build_tradeoff, DelayFlags, ParamRecord};

#[derive(Debug, Parser)]
#[command(
    name = "madde",
    version,
    about = "Delay logistic models: simulation, equilibria, stability, bifurcation and ESS datasets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct ModelArgs {
    /// hutchinson, adde, madde or competition.
    #[arg(long, default_value = "madde", value_parser = parse_model)]
    model: ModelId,
    /// Parameter file: `key = value` lines or a JSON object.
    #[arg(long)]
    params: Option<PathBuf>,
    /// Delay of a single-species model.
    #[arg(long)]
    tau: Option<f64>,
    /// Delay of species 1 (competition).
    #[arg(long)]
    tau1: Option<f64>,
    /// Delay of species 2 (competition).
    #[arg(long)]
    tau2: Option<f64>,
}

impl ModelArgs {
    fn build(&self) -> CliResult<madde_core::Model> {
        let rec = match &self.params {
            Some(p) => ParamRecord::load(p)?,
            None => ParamRecord::default(),
        };
        build_model(self.model, &rec, DelayFlags { tau: self.tau, tau1: self.tau1, tau2: self.tau2 })
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate a model and write the sampled trajectory.
    Simulate {
        #[command(flatten)]
        model: ModelArgs,
        /// Constant initial history, one value per species.
        #[arg(long, value_delimiter = ',')]
        history_const: Option<Vec<f64>>,
        /// Integration step; defaults to the smallest positive delay / 100.
        #[arg(long)]
        step: Option<f64>,
        #[arg(long, default_value_t = 100.0)]
        t_end: f64,
        /// Spacing of output rows.
        #[arg(long, default_value_t = 0.1)]
        sample_dt: f64,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Equilibria, their residuals and the survival thresholds.
    Equilibria {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Local stability of every equilibrium.
    Stability {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Equilibrium branches over the delay, or the delay-plane region map for competition.
    Bifurcate {
        #[command(flatten)]
        model: ModelArgs,
        /// Points per delay axis.
        #[arg(long, default_value_t = 200)]
        grid: usize,
        /// Delays range over [0, tau-max].
        #[arg(long, default_value_t = 3.0)]
        tau_max: f64,
        /// Output file; competition also writes `<stem>_curves.csv` beside it.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evolutionarily stable delay under the growth trade-off.
    Ess {
        /// Parameter file with gamma0, c and mu.
        #[arg(long)]
        params: Option<PathBuf>,
        /// Samples of the x*(tau) curve.
        #[arg(long, default_value_t = 1000)]
        grid: usize,
        /// Curve file; the summary goes to `<stem>_summary.csv`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the datasets behind one figure.
    ReproduceFigure {
        #[arg(long, value_parser = PossibleValuesParser::new(figures::FIGURE_IDS))]
        figure: String,
        /// Output directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides the figure's grid resolution.
        #[arg(long)]
        grid: Option<usize>,
    },
}

fn parse_model(s: &str) -> Result<ModelId, String> {
    s.parse().map_err(|e: madde_core::Error| e.to_string())
}

fn run(cli: Cli) -> CliResult<Status> {
    match cli.command {
        Command::Simulate { model, history_const, step, t_end, sample_dt, out } => {
            let m = model.build()?;
            let history = history_const.unwrap_or_else(|| commands::default_history(&m));
            let cfg = commands::integrator_config(&m, step, t_end);
            commands::simulate(&m, &history, &cfg, sample_dt)?.write(out.as_deref())?;
            Ok(Status::Done)
        }
        Command::Equilibria { model, out } => {
            commands::equilibria_table(&model.build()?)?.write(out.as_deref())?;
            Ok(Status::Done)
        }
        Command::Stability { model, out } => {
            let (table, status) = commands::stability_table(&model.build()?)?;
            table.write(out.as_deref())?;
            Ok(status)
        }
        Command::Bifurcate { model, grid, tau_max, out } => {
            commands::bifurcate(&model.build()?, tau_max, grid, out.as_deref())
        }
        Command::Ess { params, grid, out } => {
            let rec = match &params {
                Some(p) => ParamRecord::load(p)?,
                None => ParamRecord::default(),
            };
            commands::ess(&build_tradeoff(&rec)?, grid, out.as_deref())
        }
        Command::ReproduceFigure { figure, out, grid } => {
            figures::reproduce(&figure, &out.unwrap_or_else(figures::default_dir), grid)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Status::Done) => ExitCode::SUCCESS,
        Ok(Status::Inconclusive(msg)) => {
            eprintln!("warning: {msg}");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
