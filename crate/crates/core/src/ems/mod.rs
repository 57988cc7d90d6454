//! Energy management: robust unit commitment over a prediction horizon with
//! the setpoints held at their constant optimal values.
//!
//! A commitment plan is a sequence of columns, one per horizon step, each
//! holding the on/off state of every thermal unit. Its cost under a
//! scenario is obtained by rolling the droop dispatch forward; the robust
//! cost is the maximum over the scenario set.

mod closed_loop;
pub mod regret;
mod search;

use serde::Serialize;

pub use closed_loop::{receding_horizon_run, Controller};
pub use search::{prescient_plan, solve_scenarios, solve_unit_commitment};

use crate::cost::{stage_cost_raw, CostWeights};
use crate::dispatch::{build_lines, dispatch_from_lines, solve_lines, DroopLine};
use crate::error::{Error, Result};
use crate::model::{next_energy, DisturbanceSample, FleetParams, GridState, Setpoints};
use crate::scenario::{LogStep, SimLog};

/// How the uncertainty interval is turned into a finite scenario set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioPolicy {
    /// The lower and upper bound trajectories.
    Extremes,
    /// Trajectories at `alpha = i / m`, `i = 0..=m`.
    AlphaGrid(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Solver {
    BranchAndBound,
    Exhaustive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmsOptions {
    /// Prediction horizon in steps.
    pub np: usize,
    pub scenarios: ScenarioPolicy,
    pub solver: Solver,
    /// Cap on on/off transitions per horizon, counted from the current
    /// commitment. `None` searches every plan. Ignored by the exhaustive
    /// solver.
    pub max_switches: Option<usize>,
    /// Absolute slack used when pruning against the incumbent.
    pub tolerance: f64,
}

impl Default for EmsOptions {
    fn default() -> Self {
        Self {
            np: 32,
            scenarios: ScenarioPolicy::Extremes,
            solver: Solver::BranchAndBound,
            max_switches: Some(4),
            tolerance: 1e-9,
        }
    }
}

impl EmsOptions {
    pub fn check(&self) -> Result<()> {
        if self.np == 0 {
            return Err(Error::InvalidArgument("horizon must be at least one step".into()));
        }
        if !(self.tolerance >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "tolerance must be >= 0, got {}",
                self.tolerance
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommitmentPlan {
    /// One column of thermal commitments per horizon step.
    pub delta: Vec<Vec<bool>>,
    pub worst_case_cost: f64,
    pub per_scenario_costs: Vec<f64>,
    pub nodes: u64,
    /// False when the switch cap may have excluded a cheaper plan.
    pub optimal: bool,
}

impl CommitmentPlan {
    pub fn first(&self) -> &[bool] {
        &self.delta[0]
    }
}

/// Reusable buffers for stepping the dispatch without allocation.
pub(crate) struct Stepper<'a> {
    pub params: &'a FleetParams,
    pub u: &'a Setpoints,
    pub weights: &'a CostWeights,
    pub lines: Vec<DroopLine>,
    breakpoints: Vec<f64>,
    p_t: Vec<f64>,
    p_s: Vec<f64>,
}

impl<'a> Stepper<'a> {
    pub fn new(params: &'a FleetParams, u: &'a Setpoints, weights: &'a CostWeights) -> Self {
        Self {
            params,
            u,
            weights,
            lines: Vec::with_capacity(params.n_t() + params.n_s() + params.n_r()),
            breakpoints: Vec::new(),
            p_t: vec![0.0; params.n_t()],
            p_s: vec![0.0; params.n_s()],
        }
    }

    /// Dispatch one step, advance `x` in place and return `(rho, stage cost)`.
    ///
    /// On infeasibility `x` is left untouched and the aggregate range is
    /// returned. Gives bit-identical results to [`crate::dispatch::step`]
    /// followed by [`crate::cost::stage_cost`].
    #[inline]
    pub fn advance(
        &mut self,
        delta: &[bool],
        delta_prev: &[bool],
        w: &DisturbanceSample,
        x: &mut [f64],
    ) -> std::result::Result<(f64, f64), (f64, f64)> {
        build_lines(self.u, delta, w, x, self.params, &mut self.lines);
        let rho = solve_lines(&self.lines, w.demand(), &mut self.breakpoints)?;
        let n_t = self.params.n_t();
        for (p, l) in self.p_t.iter_mut().zip(&self.lines[..n_t]) {
            *p = l.power(rho);
        }
        for (i, l) in self.lines[n_t..n_t + self.params.n_s()].iter().enumerate() {
            self.p_s[i] = l.power(rho);
        }
        let cost = stage_cost_raw(&self.p_t, &self.p_s, delta, delta_prev, self.weights);
        for ((x, unit), &p) in x.iter_mut().zip(&self.params.storage).zip(&self.p_s) {
            *x = next_energy(unit, *x, p, self.params.ts);
        }
        Ok((rho, cost))
    }
}

fn check_rollout_inputs(
    delta: &[Vec<bool>],
    u: &Setpoints,
    w_traj: &[DisturbanceSample],
    state0: &GridState,
    params: &FleetParams,
    weights: &CostWeights,
) -> Result<()> {
    u.check_dims(params)?;
    state0.check(params)?;
    if weights.n_t() != params.n_t() || weights.n_s() != params.n_s() {
        return Err(Error::InvalidArgument(
            "cost weights do not match the fleet".into(),
        ));
    }
    if delta.is_empty() {
        return Err(Error::InvalidArgument("empty commitment plan".into()));
    }
    if w_traj.len() < delta.len() {
        return Err(Error::InvalidArgument(format!(
            "trajectory has {} steps, plan has {}",
            w_traj.len(),
            delta.len()
        )));
    }
    if let Some(c) = delta.iter().find(|c| c.len() != params.n_t()) {
        return Err(Error::InvalidArgument(format!(
            "commitment column has {} entries for {} thermal units",
            c.len(),
            params.n_t()
        )));
    }
    for w in &w_traj[..delta.len()] {
        w.check(params)?;
    }
    Ok(())
}

/// Simulate the plan on one trajectory with fixed setpoints `u`.
///
/// Returns the horizon cost and the log. An infeasible step is reported as
/// [`Error::PlanInfeasible`] with scenario index 0.
pub fn rollout(
    delta: &[Vec<bool>],
    u: &Setpoints,
    w_traj: &[DisturbanceSample],
    state0: &GridState,
    params: &FleetParams,
    weights: &CostWeights,
) -> Result<(f64, SimLog)> {
    check_rollout_inputs(delta, u, w_traj, state0, params, weights)?;
    let mut stepper = Stepper::new(params, u, weights);
    let mut log = SimLog::new(params.ts, state0.clone());
    let mut x = state0.x.clone();
    let mut prev = state0.delta_prev.clone();
    let mut total = 0.0;
    for (j, (col, w)) in delta.iter().zip(w_traj).enumerate() {
        let (rho, cost) = stepper
            .advance(col, &prev, w, &mut x)
            .map_err(|(min, max)| Error::PlanInfeasible {
                step: j + 1,
                scenario: 0,
                demand: w.demand(),
                min,
                max,
            })?;
        total += cost;
        // The stepper still holds the lines built at the pre-step energies.
        log.steps.push(LogStep {
            dispatch: dispatch_from_lines(&stepper.lines, rho, col, w, params),
            delta: col.clone(),
            state: GridState::new(x.clone(), col.clone()),
            disturbance: w.clone(),
        });
        prev.clone_from(col);
    }
    Ok((total, log))
}

/// Horizon cost only; `Err` carries `(step, demand, min, max)` of the first
/// infeasible step.
pub(crate) fn rollout_cost(
    stepper: &mut Stepper<'_>,
    delta: &[Vec<bool>],
    w_traj: &[DisturbanceSample],
    state0: &GridState,
) -> std::result::Result<f64, (usize, f64, f64, f64)> {
    let mut x = state0.x.clone();
    let mut prev: &[bool] = &state0.delta_prev;
    let mut total = 0.0;
    for (j, (col, w)) in delta.iter().zip(w_traj).enumerate() {
        let (_, cost) = stepper
            .advance(col, prev, w, &mut x)
            .map_err(|(min, max)| (j + 1, w.demand(), min, max))?;
        total += cost;
        prev = col;
    }
    Ok(total)
}

/// Largest rollout cost over the scenario set. Any infeasible scenario
/// rejects the plan with [`Error::PlanInfeasible`].
pub fn worst_case_cost(
    delta: &[Vec<bool>],
    u: &Setpoints,
    scenarios: &[Vec<DisturbanceSample>],
    state0: &GridState,
    params: &FleetParams,
    weights: &CostWeights,
) -> Result<f64> {
    if scenarios.is_empty() {
        return Err(Error::InvalidArgument("empty scenario set".into()));
    }
    for traj in scenarios {
        check_rollout_inputs(delta, u, traj, state0, params, weights)?;
    }
    let mut stepper = Stepper::new(params, u, weights);
    let mut worst = f64::NEG_INFINITY;
    for (s, traj) in scenarios.iter().enumerate() {
        let j = rollout_cost(&mut stepper, delta, traj, state0).map_err(
            |(step, demand, min, max)| Error::PlanInfeasible {
                step,
                scenario: s,
                demand,
                min,
                max,
            },
        )?;
        worst = worst.max(j);
    }
    Ok(worst)
}
