//! Small-scale regret oracle.
//!
//! For a fixed disturbance trajectory the best achievable horizon cost is
//! found by dynamic programming over a storage-power grid. Any dispatch that
//! balances the grid within the unit limits is realized by the setpoints
//! `u = p` at `rho = 0`, so searching over powers covers every setpoint
//! choice. Given the storage powers and the commitment of a step, the rest
//! is allocated optimally: renewables first (they cost nothing), then
//! thermal output above the committed minima in order of fuel cost.
//!
//! The state space grows with the horizon and the number of storage units;
//! this is a validation tool, not a production solver.

use std::collections::HashMap;

use serde::Serialize;

use crate::cost::{stage_cost_raw, CostWeights};
use crate::dispatch::step;
use crate::error::{Error, Result};
use crate::model::{storage_unit_bounds, DisturbanceSample, FleetParams, GridState, Setpoints};

/// Commitments the oracle may choose from.
#[derive(Debug, Clone, PartialEq)]
pub enum CommitmentSpace {
    /// Every on/off combination at every step.
    All,
    /// One fixed column per step.
    Only(Vec<Vec<bool>>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleOptions {
    pub np: usize,
    /// Storage power grid spacing in pu.
    pub grid_step: f64,
    pub commitments: CommitmentSpace,
}

impl OracleOptions {
    pub fn new(np: usize, commitments: CommitmentSpace) -> Self {
        Self {
            np,
            grid_step: 0.01,
            commitments,
        }
    }
}

/// Largest horizon the oracle accepts.
pub const MAX_ORACLE_HORIZON: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioOptimum {
    pub cost: f64,
    /// Setpoints realizing the optimum, one record per step.
    pub setpoints: Vec<Setpoints>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegretReport {
    /// Candidate cost per scenario; `None` where the candidate is infeasible.
    pub candidate_costs: Vec<Option<f64>>,
    pub optimal_costs: Vec<f64>,
    /// Candidate cost minus optimum; infinite where the candidate is
    /// infeasible.
    pub regrets: Vec<f64>,
    pub max_regret: f64,
}

/// Horizon cost of per-step setpoints (commitment taken from each record).
pub fn rollout_setpoints(
    seq: &[Setpoints],
    w_traj: &[DisturbanceSample],
    state0: &GridState,
    params: &FleetParams,
    weights: &CostWeights,
) -> Result<f64> {
    if w_traj.len() < seq.len() {
        return Err(Error::InvalidArgument(format!(
            "trajectory has {} steps, candidate has {}",
            w_traj.len(),
            seq.len()
        )));
    }
    let mut state = state0.clone();
    let mut total = 0.0;
    for (sp, w) in seq.iter().zip(w_traj) {
        let (d, next) = step(&state, sp, w, params)?;
        total += stage_cost_raw(&d.p_t, &d.p_s, &sp.delta_t, &state.delta_prev, weights);
        state = next;
    }
    Ok(total)
}

#[derive(Clone)]
struct Node {
    cost: f64,
    /// Index of the predecessor node at the previous depth.
    parent: usize,
    p_t: Vec<f64>,
    p_s: Vec<f64>,
    p_r: Vec<f64>,
    delta: Vec<bool>,
}

type Key = (Vec<i64>, usize);

fn columns(n_t: usize) -> Vec<Vec<bool>> {
    (0..1usize << n_t)
        .map(|bits| (0..n_t).map(|i| bits >> i & 1 == 1).collect())
        .collect()
}

/// Renewable and thermal powers completing a step, or `None` if the
/// remaining demand cannot be met.
fn allocate(
    need: f64,
    delta: &[bool],
    w: &DisturbanceSample,
    params: &FleetParams,
    fuel_order: &[usize],
) -> Option<(Vec<f64>, Vec<f64>)> {
    const SLACK: f64 = 1e-12;
    let r_lo: Vec<f64> = params
        .renewable
        .iter()
        .zip(&w.w_r)
        .map(|(r, &a)| r.p_min.min(a))
        .collect();
    let t_lo: Vec<f64> = params
        .thermal
        .iter()
        .zip(delta)
        .map(|(t, &on)| if on { t.p_min } else { 0.0 })
        .collect();
    let t_hi: Vec<f64> = params
        .thermal
        .iter()
        .zip(delta)
        .map(|(t, &on)| if on { t.p_max } else { 0.0 })
        .collect();
    let floor = r_lo.iter().sum::<f64>() + t_lo.iter().sum::<f64>();
    let ceil = w.w_r.iter().sum::<f64>() + t_hi.iter().sum::<f64>();
    if need < floor - SLACK || need > ceil + SLACK {
        return None;
    }
    let mut rest = need - floor;
    let mut p_r = r_lo;
    for (p, &avail) in p_r.iter_mut().zip(&w.w_r) {
        let take = rest.clamp(0.0, avail - *p);
        *p += take;
        rest -= take;
    }
    let mut p_t = t_lo;
    for &i in fuel_order {
        let take = rest.clamp(0.0, t_hi[i] - p_t[i]);
        p_t[i] += take;
        rest -= take;
    }
    Some((p_t, p_r))
}

/// Cheapest horizon cost on one trajectory and setpoints achieving it.
pub fn scenario_optimum(
    state0: &GridState,
    w_traj: &[DisturbanceSample],
    params: &FleetParams,
    weights: &CostWeights,
    opts: &OracleOptions,
) -> Result<ScenarioOptimum> {
    let np = opts.np;
    if np == 0 || np > MAX_ORACLE_HORIZON {
        return Err(Error::InvalidArgument(format!(
            "oracle horizon must be in 1..={MAX_ORACLE_HORIZON}, got {np}"
        )));
    }
    if !(opts.grid_step > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "grid step must be positive, got {}",
            opts.grid_step
        )));
    }
    if w_traj.len() < np {
        return Err(Error::InvalidArgument(format!(
            "trajectory has {} steps, horizon needs {np}",
            w_traj.len()
        )));
    }
    state0.check(params)?;
    for w in &w_traj[..np] {
        w.check(params)?;
    }
    let all = columns(params.n_t());
    let allowed: Vec<Vec<Vec<bool>>> = match &opts.commitments {
        CommitmentSpace::All => vec![all; np],
        CommitmentSpace::Only(plan) => {
            if plan.len() < np || plan.iter().any(|c| c.len() != params.n_t()) {
                return Err(Error::InvalidArgument(
                    "fixed commitment plan does not match horizon and fleet".into(),
                ));
            }
            plan[..np].iter().map(|c| vec![c.clone()]).collect()
        }
    };
    let mut fuel_order: Vec<usize> = (0..params.n_t()).collect();
    fuel_order.sort_by(|&a, &b| weights.c_fuel[a].total_cmp(&weights.c_fuel[b]));

    let g = opts.grid_step;
    let ts = params.ts;
    let energy = |m: &[i64]| -> Vec<f64> {
        state0
            .x
            .iter()
            .zip(m)
            .map(|(&x0, &mi)| x0 - ts * g * mi as f64)
            .collect()
    };
    // Power window of each storage unit at energy `x`, and the grid indices
    // inside it.
    let windows = |x: &[f64]| -> Vec<(f64, f64)> {
        params
            .storage
            .iter()
            .zip(x)
            .map(|(unit, &x)| storage_unit_bounds(unit, x.clamp(unit.x_min, unit.x_max), ts))
            .collect()
    };

    let mut layers: Vec<Vec<Node>> = Vec::with_capacity(np + 1);
    let start = Node {
        cost: 0.0,
        parent: 0,
        p_t: vec![],
        p_s: vec![],
        p_r: vec![],
        delta: state0.delta_prev.clone(),
    };
    layers.push(vec![start]);
    let mut keys: Vec<Key> = vec![(vec![0; params.n_s()], usize::MAX)];

    for (j, w) in w_traj[..np].iter().enumerate() {
        let mut index: HashMap<Key, usize> = HashMap::new();
        let mut next: Vec<Node> = Vec::new();
        let mut next_keys: Vec<Key> = Vec::new();
        for (ni, node) in layers[j].iter().enumerate() {
            let m = &keys[ni].0;
            let win = windows(&energy(m));
            let r: Vec<(i64, i64)> = win
                .iter()
                .map(|&(lo, hi)| ((lo / g - 1e-9).ceil() as i64, (hi / g + 1e-9).floor() as i64))
                .collect();
            for (ci, delta) in allowed[j].iter().enumerate() {
                // Odometer over the storage power grid.
                let mut idx: Vec<i64> = r.iter().map(|&(a, _)| a).collect();
                if r.iter().any(|&(a, b)| a > b) {
                    continue;
                }
                loop {
                    let p_s: Vec<f64> = idx
                        .iter()
                        .zip(&win)
                        .map(|(&k, &(lo, hi))| (k as f64 * g).clamp(lo, hi))
                        .collect();
                    let need = w.demand() - p_s.iter().sum::<f64>();
                    if let Some((p_t, p_r)) =
                        allocate(need, delta, w, params, &fuel_order)
                    {
                        let cost = node.cost
                            + stage_cost_raw(&p_t, &p_s, delta, &node.delta, weights);
                        let key_m: Vec<i64> = m.iter().zip(&idx).map(|(a, b)| a + b).collect();
                        let col_key = if matches!(opts.commitments, CommitmentSpace::All) {
                            ci
                        } else {
                            0
                        };
                        let key = (key_m, col_key);
                        let cand = Node {
                            cost,
                            parent: ni,
                            p_t,
                            p_s,
                            p_r,
                            delta: delta.clone(),
                        };
                        match index.get(&key) {
                            Some(&at) => {
                                if cost < next[at].cost {
                                    next[at] = cand;
                                }
                            }
                            None => {
                                index.insert(key.clone(), next.len());
                                next.push(cand);
                                next_keys.push(key);
                            }
                        }
                    }
                    // Advance the odometer.
                    let mut d = 0;
                    loop {
                        if d == idx.len() {
                            break;
                        }
                        if idx[d] < r[d].1 {
                            idx[d] += 1;
                            break;
                        }
                        idx[d] = r[d].0;
                        d += 1;
                    }
                    if d == idx.len() {
                        break;
                    }
                }
            }
        }
        if next.is_empty() {
            return Err(Error::NoFeasiblePlan);
        }
        layers.push(next);
        keys = next_keys;
    }

    let last = &layers[np];
    let (mut at, best) = last
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.cost.total_cmp(&b.1.cost))
        .expect("nonempty layer");
    let cost = best.cost;
    let mut setpoints = Vec::with_capacity(np);
    for j in (1..=np).rev() {
        let node = &layers[j][at];
        setpoints.push(Setpoints {
            u_t: node.p_t.clone(),
            u_s: node.p_s.clone(),
            u_r: node.p_r.clone(),
            delta_t: node.delta.clone(),
        });
        at = node.parent;
    }
    setpoints.reverse();
    Ok(ScenarioOptimum { cost, setpoints })
}

/// Regret of a candidate over a scenario set.
pub fn regret(
    candidate: &[Setpoints],
    scenarios: &[Vec<DisturbanceSample>],
    state0: &GridState,
    params: &FleetParams,
    weights: &CostWeights,
    opts: &OracleOptions,
) -> Result<RegretReport> {
    if scenarios.is_empty() {
        return Err(Error::InvalidArgument("empty scenario set".into()));
    }
    if candidate.len() != opts.np {
        return Err(Error::InvalidArgument(format!(
            "candidate covers {} steps, horizon is {}",
            candidate.len(),
            opts.np
        )));
    }
    let mut report = RegretReport {
        candidate_costs: Vec::new(),
        optimal_costs: Vec::new(),
        regrets: Vec::new(),
        max_regret: f64::NEG_INFINITY,
    };
    for traj in scenarios {
        let opt = scenario_optimum(state0, traj, params, weights, opts)?;
        let cand = match rollout_setpoints(candidate, traj, state0, params, weights) {
            Ok(c) => Some(c),
            Err(e) if e.is_infeasibility() => None,
            Err(e) => return Err(e),
        };
        let r = cand.map_or(f64::INFINITY, |c| c - opt.cost);
        report.max_regret = report.max_regret.max(r);
        report.candidate_costs.push(cand);
        report.optimal_costs.push(opt.cost);
        report.regrets.push(r);
    }
    Ok(report)
}
