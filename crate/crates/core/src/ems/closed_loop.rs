//! Receding-horizon simulation: plan, apply the first commitment column,
//! step the true system, shift and repeat.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::search::solve_scenarios;
use super::{CommitmentPlan, EmsOptions, ScenarioPolicy, Stepper};
use crate::cost::CostWeights;
use crate::dispatch::dispatch_from_lines;
use crate::error::{Error, Result};
use crate::model::{DisturbanceSample, FleetParams, GridState, Setpoints};
use crate::scenario::{alpha_grid, extreme_set, ForecastBounds, LogStep, SimLog};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Controller {
    /// Robust commitment over the forecast bounds.
    UcEms,
    /// Commitment with exact knowledge of the realization.
    Prescient,
    /// Every thermal unit always on.
    FixedOn,
}

impl Controller {
    pub const ALL: [Controller; 3] = [Controller::UcEms, Controller::Prescient, Controller::FixedOn];

    pub fn as_str(self) -> &'static str {
        match self {
            Controller::UcEms => "uc-ems",
            Controller::Prescient => "prescient",
            Controller::FixedOn => "fixed-on",
        }
    }
}

impl fmt::Display for Controller {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Controller {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Controller::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "unknown controller `{s}` (expected uc-ems, prescient or fixed-on)"
                ))
            })
    }
}

/// Previous plan advanced by one step, repeating its last column.
fn shifted(plan: &CommitmentPlan) -> Vec<Vec<bool>> {
    let mut next: Vec<Vec<bool>> = plan.delta[1..].to_vec();
    next.push(plan.delta.last().expect("nonempty plan").clone());
    next
}

/// Simulate `nsim` steps on `realization`.
///
/// At step `k` the controller plans over samples `k..k + np` (the forecast
/// window for uc-ems, the realization itself for prescient), the first
/// column is applied with the constant setpoints `u`, and the grid is
/// stepped on `realization[k]`.
#[allow(clippy::too_many_arguments)]
pub fn receding_horizon_run(
    controller: Controller,
    bounds: &ForecastBounds,
    realization: &[DisturbanceSample],
    state0: &GridState,
    params: &FleetParams,
    weights: &CostWeights,
    u: &Setpoints,
    opts: &EmsOptions,
    nsim: usize,
) -> Result<SimLog> {
    opts.check()?;
    u.check_dims(params)?;
    state0.check(params)?;
    if weights.n_t() != params.n_t() || weights.n_s() != params.n_s() {
        return Err(Error::InvalidArgument("cost weights do not match the fleet".into()));
    }
    let needed = nsim + opts.np;
    if realization.len() < needed {
        return Err(Error::InvalidArgument(format!(
            "realization has {} steps, {nsim} simulated steps with horizon {} need {needed}",
            realization.len(),
            opts.np
        )));
    }
    if controller == Controller::UcEms {
        bounds.check_dims(params)?;
        if bounds.len() < needed {
            return Err(Error::InvalidArgument(format!(
                "forecast has {} steps, {needed} needed",
                bounds.len()
            )));
        }
    }
    for w in &realization[..needed] {
        w.check(params)?;
    }

    let all_on = vec![true; params.n_t()];
    let mut log = SimLog::new(params.ts, state0.clone());
    let mut stepper = Stepper::new(params, u, weights);
    let mut state = state0.clone();
    let mut previous: Option<CommitmentPlan> = None;
    for k in 0..nsim {
        let at = |e: Error| Error::AtStep {
            step: k + 1,
            source: Box::new(e),
        };
        let delta = match controller {
            Controller::FixedOn => all_on.clone(),
            Controller::UcEms | Controller::Prescient => {
                let scenarios = if controller == Controller::Prescient {
                    vec![realization[k..k + opts.np].to_vec()]
                } else {
                    let window = bounds.window(k, opts.np).map_err(at)?;
                    match opts.scenarios {
                        ScenarioPolicy::Extremes => extreme_set(&window),
                        ScenarioPolicy::AlphaGrid(m) => alpha_grid(&window, m),
                    }
                };
                let hint = previous.as_ref().map(shifted);
                let plan = solve_scenarios(
                    &state,
                    &scenarios,
                    u,
                    params,
                    weights,
                    opts,
                    hint.as_deref(),
                )
                .map_err(at)?;
                let first = plan.first().to_vec();
                previous = Some(plan);
                first
            }
        };

        let w = &realization[k];
        let mut x = state.x.clone();
        let (rho, _) = stepper
            .advance(&delta, &state.delta_prev, w, &mut x)
            .map_err(|(min, max)| {
                at(Error::Infeasible {
                    demand: w.demand(),
                    min,
                    max,
                })
            })?;
        let dispatch = dispatch_from_lines(&stepper.lines, rho, &delta, w, params);
        state = GridState::new(x, delta.clone());
        log.steps.push(LogStep {
            dispatch,
            delta,
            state: state.clone(),
            disturbance: w.clone(),
        });
    }
    Ok(log)
}
