use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::process::ExitCode;

use mg_opcon::cost::{closed_loop_cost, CostWeights};
use mg_opcon::dispatch::{step, Dispatch};
use mg_opcon::ems::regret::{regret, CommitmentSpace, OracleOptions};
use mg_opcon::ems::{
    receding_horizon_run, solve_unit_commitment, Controller, EmsOptions, ScenarioPolicy, Solver,
};
use mg_opcon::scenario::{
    interpolate, load_bounds_csv, scenario_alphas, synth_profiles, write_bounds_csv,
    write_trajectory_csv, ForecastBounds,
};
use mg_opcon::setpoint::{
    check_nonoverlap, check_requirements, constant_setpoints, resolve_rated, OverlapReport,
    RequirementReport,
};
use mg_opcon::{DisturbanceSample, Error, FleetConfig, GridState, Result, Setpoints};
use serde::{Deserialize, Serialize};

use crate::{BoundsArgs, EmsArgs, FleetArg};

/// Synthetic bounds seed when neither `--bounds` nor `--seed` is given.
pub const DEFAULT_SEED: u64 = 42;

pub fn load_fleet(arg: &FleetArg) -> Result<FleetConfig> {
    match &arg.fleet {
        Some(path) => FleetConfig::load(path),
        None => Ok(FleetConfig::case_study()),
    }
}

fn read_bounds(path: &Path, step_hours: Option<f64>, cfg: &FleetConfig) -> Result<ForecastBounds> {
    let ts = cfg.params.ts;
    let b = load_bounds_csv(path, step_hours.unwrap_or(ts))?;
    if (b.step_hours - ts).abs() > 1e-12 {
        b.resample(ts)
    } else {
        Ok(b)
    }
}

/// Bounds from `--bounds` (resampled onto the fleet sampling time) or the
/// synthetic generator.
pub fn load_bounds(src: &BoundsArgs, cfg: &FleetConfig) -> Result<ForecastBounds> {
    match &src.bounds {
        Some(path) => read_bounds(path, src.step_hours, cfg),
        None => {
            if src.days == 0 {
                return Err(Error::InvalidArgument("--days must be at least 1".into()));
            }
            Ok(synth_profiles(
                src.seed.unwrap_or(DEFAULT_SEED),
                src.days,
                &cfg.params,
            ))
        }
    }
}

pub fn u_star(cfg: &FleetConfig, bounds: Option<&ForecastBounds>) -> Result<Setpoints> {
    let rated = resolve_rated(&cfg.params, bounds)?;
    constant_setpoints(&cfg.params, &rated, &cfg.limits)
}

pub fn ems_options(args: &EmsArgs) -> EmsOptions {
    EmsOptions {
        np: args.np,
        scenarios: args
            .scenario_grid
            .map_or(ScenarioPolicy::Extremes, ScenarioPolicy::AlphaGrid),
        solver: Solver::BranchAndBound,
        max_switches: args.max_switches.0,
        ..EmsOptions::default()
    }
}

pub fn check_alpha(alpha: f64) -> Result<()> {
    if (0.0..=1.0).contains(&alpha) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "alpha must lie in [0, 1], got {alpha}"
        )))
    }
}

pub fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

#[derive(Deserialize)]
struct StepInput {
    setpoints: Setpoints,
    disturbance: DisturbanceSample,
    state: GridState,
}

#[derive(Serialize)]
struct StepOutput {
    #[serde(flatten)]
    dispatch: Dispatch,
    next_state: GridState,
}

pub fn dispatch(fleet: &FleetArg, input: &Path) -> Result<ExitCode> {
    let cfg = load_fleet(fleet)?;
    let rec: StepInput = serde_json::from_str(&std::fs::read_to_string(input)?)?;
    let (dispatch, next_state) = step(&rec.state, &rec.setpoints, &rec.disturbance, &cfg.params)?;
    print_json(&StepOutput {
        dispatch,
        next_state,
    })?;
    Ok(ExitCode::SUCCESS)
}

pub fn setpoints(fleet: &FleetArg, rated: Option<&[f64]>) -> Result<ExitCode> {
    let cfg = load_fleet(fleet)?;
    let sp = match rated {
        Some(r) => constant_setpoints(&cfg.params, r, &cfg.limits)?,
        None => u_star(&cfg, None)?,
    };
    print_json(&sp)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct CheckOutput {
    passed: bool,
    requirements: RequirementReport,
    overlap: OverlapReport,
}

pub fn check(fleet: &FleetArg, forecast: &Path, step_hours: Option<f64>) -> Result<ExitCode> {
    let cfg = load_fleet(fleet)?;
    let p = &cfg.params;
    let bounds = read_bounds(forecast, step_hours, &cfg)?;
    if bounds.n_d() != p.n_loads {
        return Err(Error::InvalidArgument(format!(
            "forecast has {} load columns, fleet has {}",
            bounds.n_d(),
            p.n_loads
        )));
    }
    // A load-only forecast leaves renewables anywhere between dark and rated.
    let load_only = bounds.n_r() == 0 && p.n_r() > 0;
    if !load_only && bounds.n_r() != p.n_r() {
        return Err(Error::InvalidArgument(format!(
            "forecast has {} renewable columns, fleet has {}",
            bounds.n_r(),
            p.n_r()
        )));
    }
    let rated = resolve_rated(p, (!load_only).then_some(&bounds))?;
    let sp = constant_setpoints(p, &rated, &cfg.limits)?;
    let w_r_range: Vec<(f64, f64)> = if load_only {
        rated.iter().map(|&r| (0.0, r)).collect()
    } else {
        (0..p.n_r())
            .map(|i| {
                let lo = bounds.lower.iter().map(|s| s.w_r[i]).fold(f64::INFINITY, f64::min);
                let hi = bounds.upper.iter().map(|s| s.w_r[i]).fold(0.0, f64::max);
                (lo.min(hi), hi)
            })
            .collect()
    };
    let state_range: Vec<(f64, f64)> = p.storage.iter().map(|s| (s.x_min, s.x_max)).collect();
    let requirements = check_requirements(p, &bounds);
    let overlap = check_nonoverlap(&sp, p, &w_r_range, &state_range)?;
    let passed = requirements.passed() && overlap.passed();
    print_json(&CheckOutput {
        passed,
        requirements,
        overlap,
    })?;
    Ok(if passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

pub fn scenarios(
    fleet: &FleetArg,
    src: &BoundsArgs,
    alpha: Option<f64>,
    emit_bounds: bool,
    out: Option<&Path>,
) -> Result<ExitCode> {
    let cfg = load_fleet(fleet)?;
    let bounds = load_bounds(src, &cfg)?;
    let mut w = output(out)?;
    if emit_bounds {
        write_bounds_csv(&bounds, &mut w)?;
    } else {
        let alpha = alpha.expect("clap requires --alpha");
        write_trajectory_csv(&interpolate(&bounds, alpha)?, &mut w)?;
    }
    w.flush()?;
    Ok(ExitCode::SUCCESS)
}

/// Everything a closed-loop run needs, resolved from the arguments.
pub struct RunSetup {
    pub cfg: FleetConfig,
    pub weights: CostWeights,
    pub bounds: ForecastBounds,
    pub u: Setpoints,
    pub state0: GridState,
    pub opts: EmsOptions,
    pub nsim: usize,
}

impl RunSetup {
    pub fn new(fleet: &FleetArg, src: &BoundsArgs, ems: &EmsArgs) -> Result<Self> {
        let cfg = load_fleet(fleet)?;
        let bounds = load_bounds(src, &cfg)?;
        bounds.check_dims(&cfg.params)?;
        let u = u_star(&cfg, Some(&bounds))?;
        Ok(Self {
            weights: CostWeights::from_params(&cfg.params),
            state0: cfg.initial_state(),
            opts: ems_options(ems),
            nsim: ems.nsim,
            bounds,
            u,
            cfg,
        })
    }

    /// Run `controller` on the scenario `alpha`; with `degenerate` the
    /// forecast collapses onto the realization.
    pub fn run(
        &self,
        controller: Controller,
        alpha: f64,
        degenerate: bool,
    ) -> Result<mg_opcon::SimLog> {
        check_alpha(alpha)?;
        let realization = interpolate(&self.bounds, alpha)?;
        let exact;
        let bounds = if degenerate {
            exact = ForecastBounds::degenerate(self.bounds.step_hours, &realization)?;
            &exact
        } else {
            &self.bounds
        };
        receding_horizon_run(
            controller,
            bounds,
            &realization,
            &self.state0,
            &self.cfg.params,
            &self.weights,
            &self.u,
            &self.opts,
            self.nsim,
        )
    }
}

#[derive(Serialize)]
struct SimulateOutput {
    controller: Controller,
    alpha: f64,
    np: usize,
    nsim: usize,
    total_cost: f64,
    thermal_energy: f64,
    renewable_energy: f64,
    committed_steps: usize,
    stage_costs: Vec<f64>,
}

pub fn simulate(
    fleet: &FleetArg,
    src: &BoundsArgs,
    controller: Controller,
    alpha: f64,
    ems: &EmsArgs,
    degenerate: bool,
    out: Option<&Path>,
) -> Result<ExitCode> {
    let setup = RunSetup::new(fleet, src, ems)?;
    let log = setup.run(controller, alpha, degenerate)?;
    if let Some(path) = out {
        let mut w = BufWriter::new(File::create(path)?);
        log.write_csv(&setup.weights, &mut w)?;
        w.flush()?;
    }
    print_json(&SimulateOutput {
        controller,
        alpha,
        np: setup.opts.np,
        nsim: setup.nsim,
        total_cost: closed_loop_cost(&log, &setup.weights),
        thermal_energy: log.thermal_energy(),
        renewable_energy: log.renewable_energy(),
        committed_steps: log
            .steps
            .iter()
            .map(|s| s.delta.iter().filter(|&&d| d).count())
            .sum(),
        stage_costs: log.stage_costs(&setup.weights),
    })?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct CommitmentCheck {
    np: usize,
    branch_and_bound: f64,
    exhaustive: f64,
    nodes_branch_and_bound: u64,
    nodes_exhaustive: u64,
    agree: bool,
}

#[derive(Serialize)]
struct OracleOutput {
    start: usize,
    np: usize,
    fixed_commitment: bool,
    max_regret: f64,
    regret: mg_opcon::ems::regret::RegretReport,
    commitment: CommitmentCheck,
}

pub fn oracle(
    fleet: &FleetArg,
    src: &BoundsArgs,
    start: usize,
    np: usize,
    uc_np: usize,
    free_commitment: bool,
) -> Result<ExitCode> {
    let cfg = load_fleet(fleet)?;
    let p = &cfg.params;
    let bounds = load_bounds(src, &cfg)?;
    bounds.check_dims(p)?;
    let u = u_star(&cfg, Some(&bounds))?;
    let weights = CostWeights::from_params(p);
    let state0 = cfg.initial_state();

    let window = bounds.window(start, np)?;
    let scenarios: Vec<_> = scenario_alphas()
        .into_iter()
        .map(|a| interpolate(&window, a))
        .collect::<Result<_>>()?;
    let all_on = vec![vec![true; p.n_t()]; np];
    let space = if free_commitment {
        CommitmentSpace::All
    } else {
        CommitmentSpace::Only(all_on)
    };
    let candidate = vec![u.clone(); np];
    let report = regret(
        &candidate,
        &scenarios,
        &state0,
        p,
        &weights,
        &OracleOptions::new(np, space),
    )?;

    let uc_window = bounds.window(start, uc_np)?;
    let solve = |solver| {
        let opts = EmsOptions {
            np: uc_np,
            solver,
            max_switches: None,
            ..EmsOptions::default()
        };
        solve_unit_commitment(&state0, &uc_window, &u, p, &weights, &opts)
    };
    let bnb = solve(Solver::BranchAndBound)?;
    let exh = solve(Solver::Exhaustive)?;
    print_json(&OracleOutput {
        start,
        np,
        fixed_commitment: !free_commitment,
        max_regret: report.max_regret,
        regret: report,
        commitment: CommitmentCheck {
            np: uc_np,
            branch_and_bound: bnb.worst_case_cost,
            exhaustive: exh.worst_case_cost,
            nodes_branch_and_bound: bnb.nodes,
            nodes_exhaustive: exh.nodes,
            agree: bnb.worst_case_cost == exh.worst_case_cost,
        },
    })?;
    Ok(ExitCode::SUCCESS)
}
