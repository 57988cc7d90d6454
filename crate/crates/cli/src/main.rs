use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mg_opcon::ems::Controller;

mod commands;
mod sweep;

#[derive(Parser, Debug)]
#[command(name = "mg-opcon", version, about = "Operation control for islanded microgrids")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Fleet file; the built-in four-unit reference fleet when omitted.
#[derive(Args, Debug, Clone)]
pub struct FleetArg {
    #[arg(long, value_name = "FILE")]
    pub fleet: Option<PathBuf>,
}

/// Where the forecast bounds come from.
#[derive(Args, Debug, Clone)]
pub struct BoundsArgs {
    /// Bounds CSV (`k,wr_min_..,wr_max_..,wd_min_..,wd_max_..`).
    #[arg(long, value_name = "FILE", conflicts_with = "seed")]
    pub bounds: Option<PathBuf>,
    /// Spacing of the rows in `--bounds`, in hours. Rows are resampled onto
    /// the fleet sampling time when this differs. Defaults to the fleet
    /// sampling time.
    #[arg(long, value_name = "HOURS", requires = "bounds")]
    pub step_hours: Option<f64>,
    /// Seed for synthetic bounds (used when `--bounds` is absent).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Days of synthetic bounds.
    #[arg(long, default_value_t = 8)]
    pub days: usize,
}

#[derive(Args, Debug, Clone)]
pub struct EmsArgs {
    /// Prediction horizon in steps.
    #[arg(long, default_value_t = 32)]
    pub np: usize,
    /// Simulated steps.
    #[arg(long, default_value_t = 672)]
    pub nsim: usize,
    /// Cap on commitment switches per horizon; `none` disables it.
    #[arg(long, default_value = "4", value_parser = parse_cap)]
    pub max_switches: Cap,
    /// Use `m + 1` interpolated scenarios instead of the two extremes.
    #[arg(long, value_name = "M")]
    pub scenario_grid: Option<usize>,
}

#[derive(Debug, Clone, Copy)]
pub struct Cap(pub Option<usize>);

fn parse_cap(s: &str) -> Result<Cap, String> {
    if s == "none" {
        return Ok(Cap(None));
    }
    s.parse().map(|v| Cap(Some(v))).map_err(|e| format!("{e}"))
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ControllerArg {
    UcEms,
    Prescient,
    FixedOn,
}

impl From<ControllerArg> for Controller {
    fn from(c: ControllerArg) -> Self {
        match c {
            ControllerArg::UcEms => Controller::UcEms,
            ControllerArg::Prescient => Controller::Prescient,
            ControllerArg::FixedOn => Controller::FixedOn,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve the power balance for one step.
    Dispatch {
        #[command(flatten)]
        fleet: FleetArg,
        /// JSON record `{setpoints, disturbance, state}`.
        #[arg(long, value_name = "FILE")]
        input: PathBuf,
    },
    /// Print the constant optimal setpoints.
    Setpoints {
        #[command(flatten)]
        fleet: FleetArg,
        /// Rated renewable powers, overriding the fleet file.
        #[arg(long, value_delimiter = ',')]
        rated: Option<Vec<f64>>,
    },
    /// Check load bounds against the thermal limits and the droop regions
    /// for overlap. Exits with 1 when a check fails.
    Check {
        #[command(flatten)]
        fleet: FleetArg,
        #[arg(long, value_name = "FILE")]
        forecast: PathBuf,
        #[arg(long, value_name = "HOURS")]
        step_hours: Option<f64>,
    },
    /// Emit an interpolated scenario trajectory, or the bounds themselves.
    Scenarios {
        #[command(flatten)]
        fleet: FleetArg,
        #[command(flatten)]
        source: BoundsArgs,
        /// Interpolation weight in [0, 1].
        #[arg(long, required_unless_present = "emit_bounds")]
        alpha: Option<f64>,
        /// Write the (resampled) bounds instead of a trajectory.
        #[arg(long)]
        emit_bounds: bool,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Run one closed-loop simulation and print a JSON cost summary.
    Simulate {
        #[command(flatten)]
        fleet: FleetArg,
        #[command(flatten)]
        source: BoundsArgs,
        #[arg(long, value_enum, default_value = "uc-ems")]
        controller: ControllerArg,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        #[command(flatten)]
        ems: EmsArgs,
        /// Replace the bounds by the realization itself.
        #[arg(long)]
        degenerate: bool,
        /// Log CSV destination.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Closed-loop cost of each controller over the eleven scenarios
    /// `alpha = 0.0, 0.1, ..., 1.0`.
    Compare {
        #[command(flatten)]
        fleet: FleetArg,
        #[command(flatten)]
        source: BoundsArgs,
        #[arg(long, value_enum, value_delimiter = ',', default_value = "uc-ems,prescient,fixed-on")]
        controllers: Vec<ControllerArg>,
        #[command(flatten)]
        ems: EmsArgs,
        #[arg(long)]
        degenerate: bool,
        /// Leave `runtime_ms` empty so repeated runs are byte-identical.
        #[arg(long)]
        no_timing: bool,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Regret of the constant setpoints and a solver cross-check on one
    /// forecast window.
    Oracle {
        #[command(flatten)]
        fleet: FleetArg,
        #[command(flatten)]
        source: BoundsArgs,
        /// First forecast step of the window.
        #[arg(long, default_value_t = 0)]
        start: usize,
        /// Horizon of the regret oracle (at most 4).
        #[arg(long, default_value_t = 2)]
        np: usize,
        /// Horizon of the commitment cross-check.
        #[arg(long, default_value_t = 10)]
        uc_np: usize,
        /// Let the regret oracle choose commitments instead of keeping
        /// every thermal unit on.
        #[arg(long)]
        free_commitment: bool,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Dispatch { fleet, input } => commands::dispatch(&fleet, &input),
        Command::Setpoints { fleet, rated } => commands::setpoints(&fleet, rated.as_deref()),
        Command::Check {
            fleet,
            forecast,
            step_hours,
        } => commands::check(&fleet, &forecast, step_hours),
        Command::Scenarios {
            fleet,
            source,
            alpha,
            emit_bounds,
            out,
        } => commands::scenarios(&fleet, &source, alpha, emit_bounds, out.as_deref()),
        Command::Simulate {
            fleet,
            source,
            controller,
            alpha,
            ems,
            degenerate,
            out,
        } => commands::simulate(
            &fleet,
            &source,
            controller.into(),
            alpha,
            &ems,
            degenerate,
            out.as_deref(),
        ),
        Command::Compare {
            fleet,
            source,
            controllers,
            ems,
            degenerate,
            no_timing,
            out,
        } => {
            let controllers: Vec<Controller> = controllers.into_iter().map(Into::into).collect();
            sweep::compare(&fleet, &source, &controllers, &ems, degenerate, no_timing, out.as_deref())
        }
        Command::Oracle {
            fleet,
            source,
            start,
            np,
            uc_np,
            free_commitment,
        } => commands::oracle(&fleet, &source, start, np, uc_np, free_commitment),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_infeasibility() { 2 } else { 1 })
        }
    }
}
