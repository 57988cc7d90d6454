//! Commitment search: depth-first branch and bound and plain enumeration.
//!
//! Both solvers step every scenario with the same [`Stepper`] arithmetic and
//! rank plans by the same total order (worst-case cost, then number of
//! committed unit-steps, then lexicographically earliest off), so they agree
//! exactly whenever the bound never prunes the optimum.

use std::cmp::Ordering;

use super::{CommitmentPlan, EmsOptions, ScenarioPolicy, Solver, Stepper};
use crate::cost::CostWeights;
use crate::error::{Error, Result};
use crate::model::{DisturbanceSample, FleetParams, GridState, Setpoints};
use crate::scenario::{alpha_grid, extreme_set, ForecastBounds, Trajectory};

/// Largest `n_t * np` the exhaustive solver accepts.
pub const EXHAUSTIVE_LIMIT: usize = 20;

/// Robust commitment plan over the first `opts.np` steps of `bounds`.
pub fn solve_unit_commitment(
    state0: &GridState,
    bounds: &ForecastBounds,
    u: &Setpoints,
    params: &FleetParams,
    weights: &CostWeights,
    opts: &EmsOptions,
) -> Result<CommitmentPlan> {
    let window = bounds.window(0, opts.np)?;
    let scenarios = match opts.scenarios {
        ScenarioPolicy::Extremes => extreme_set(&window),
        ScenarioPolicy::AlphaGrid(m) => alpha_grid(&window, m),
    };
    solve_scenarios(state0, &scenarios, u, params, weights, opts, None)
}

/// Plan for a known disturbance trajectory.
pub fn prescient_plan(
    state0: &GridState,
    w_actual: &[DisturbanceSample],
    u: &Setpoints,
    params: &FleetParams,
    weights: &CostWeights,
    opts: &EmsOptions,
) -> Result<CommitmentPlan> {
    if w_actual.len() < opts.np {
        return Err(Error::InvalidArgument(format!(
            "trajectory has {} steps, horizon needs {}",
            w_actual.len(),
            opts.np
        )));
    }
    let scenarios = [w_actual[..opts.np].to_vec()];
    solve_scenarios(state0, &scenarios, u, params, weights, opts, None)
}

/// Minimize the worst-case horizon cost over an explicit scenario set.
///
/// `hint` is an optional plan tried as the first incumbent, typically the
/// previous plan shifted by one step.
pub fn solve_scenarios(
    state0: &GridState,
    scenarios: &[Trajectory],
    u: &Setpoints,
    params: &FleetParams,
    weights: &CostWeights,
    opts: &EmsOptions,
    hint: Option<&[Vec<bool>]>,
) -> Result<CommitmentPlan> {
    opts.check()?;
    if scenarios.is_empty() {
        return Err(Error::InvalidArgument("empty scenario set".into()));
    }
    for traj in scenarios {
        if traj.len() < opts.np {
            return Err(Error::InvalidArgument(format!(
                "scenario has {} steps, horizon needs {}",
                traj.len(),
                opts.np
            )));
        }
        for w in &traj[..opts.np] {
            w.check(params)?;
        }
    }
    u.check_dims(params)?;
    state0.check(params)?;
    if weights.n_t() != params.n_t() || weights.n_s() != params.n_s() {
        return Err(Error::InvalidArgument("cost weights do not match the fleet".into()));
    }
    let mut search = Search::new(state0, scenarios, u, params, weights, opts);
    match opts.solver {
        Solver::Exhaustive => {
            if params.n_t() * opts.np > EXHAUSTIVE_LIMIT {
                return Err(Error::InvalidArgument(format!(
                    "exhaustive search over {} binaries exceeds the limit of {EXHAUSTIVE_LIMIT}",
                    params.n_t() * opts.np
                )));
            }
            search.enumerate();
        }
        Solver::BranchAndBound => {
            if let Some(h) = hint {
                search.try_incumbent(h);
            }
            search.try_incumbent(&vec![vec![true; params.n_t()]; opts.np]);
            search.branch();
        }
    }
    search.finish()
}

struct Incumbent {
    cost: f64,
    committed: usize,
    plan: Vec<usize>,
    per_scenario: Vec<f64>,
}

/// One LP-relaxation item: an energy amount in `[lo, hi]` at a unit rate.
#[derive(Clone, Copy)]
struct Item {
    rate: f64,
    lo: f64,
    hi: f64,
}

struct Search<'a> {
    stepper: Stepper<'a>,
    params: &'a FleetParams,
    state0: &'a GridState,
    scenarios: &'a [Trajectory],
    np: usize,
    n_t: usize,
    /// Candidate columns, fewest units on first, then lexicographically.
    columns: Vec<Vec<bool>>,
    on_count: Vec<usize>,
    max_switches: Option<usize>,
    tolerance: f64,
    /// Per scenario, suffix sums from step `j`: demand, renewable floor and
    /// renewable availability, each times `ts`.
    suffix: Vec<Vec<[f64; 3]>>,
    thermal_items: Vec<Item>,
    storage_rates: Vec<f64>,
    items: Vec<Item>,
    best: Option<Incumbent>,
    /// Smallest parent bound among subtrees cut by the switch cap.
    capped_bound: f64,
    nodes: u64,
    // Per depth: storage energies of every scenario, flattened, and the
    // accumulated cost of every scenario.
    xs: Vec<Vec<f64>>,
    acc: Vec<Vec<f64>>,
    path: Vec<usize>,
}

impl<'a> Search<'a> {
    fn new(
        state0: &'a GridState,
        scenarios: &'a [Trajectory],
        u: &'a Setpoints,
        params: &'a FleetParams,
        weights: &'a CostWeights,
        opts: &EmsOptions,
    ) -> Self {
        let n_t = params.n_t();
        let mut columns: Vec<Vec<bool>> = (0..1usize << n_t)
            .map(|bits| (0..n_t).map(|i| bits >> (n_t - 1 - i) & 1 == 1).collect())
            .collect();
        columns.sort_by(|a, b| {
            let on = |c: &[bool]| c.iter().filter(|&&v| v).count();
            on(a).cmp(&on(b)).then_with(|| a.cmp(b))
        });
        let on_count = columns.iter().map(|c| c.iter().filter(|&&v| v).count()).collect();

        let ts = params.ts;
        let np = opts.np;
        let suffix = scenarios
            .iter()
            .map(|traj| {
                let mut out = vec![[0.0; 3]; np + 1];
                for j in (0..np).rev() {
                    let w = &traj[j];
                    let floor: f64 = params
                        .renewable
                        .iter()
                        .zip(&w.w_r)
                        .map(|(r, &a)| r.p_min.min(a))
                        .sum();
                    let avail: f64 = w.w_r.iter().sum();
                    out[j] = [
                        out[j + 1][0] + ts * w.demand(),
                        out[j + 1][1] + ts * floor,
                        out[j + 1][2] + ts * avail,
                    ];
                }
                out
            })
            .collect();
        // Committed output p costs c_fuel * p + c_on >= (c_fuel + c_on / p_max) * p.
        let thermal_items = params
            .thermal
            .iter()
            .zip(&weights.c_fuel)
            .zip(&weights.c_on)
            .filter(|((t, _), _)| t.p_max > 0.0)
            .map(|((t, &f), &on)| Item {
                rate: (f + on / t.p_max) / ts,
                lo: 0.0,
                hi: ts * t.p_max,
            })
            .collect();
        let storage_rates = weights.c_st.iter().map(|c| c / ts).collect();
        let n_sc = scenarios.len();
        let n_s = params.n_s();
        Self {
            stepper: Stepper::new(params, u, weights),
            params,
            state0,
            scenarios,
            np,
            n_t,
            columns,
            on_count,
            max_switches: opts.max_switches,
            tolerance: opts.tolerance,
            suffix,
            thermal_items,
            storage_rates,
            items: Vec::new(),
            best: None,
            capped_bound: f64::INFINITY,
            nodes: 0,
            xs: vec![vec![0.0; n_sc * n_s]; np + 1],
            acc: vec![vec![0.0; n_sc]; np + 1],
            path: Vec::with_capacity(np),
        }
    }

    fn prune_margin(&self) -> f64 {
        // Covers the balance tolerance the dispatch allows per step.
        let best = self.best.as_ref().map_or(0.0, |b| b.cost.abs());
        self.tolerance + 1e-9 * (1.0 + best) * self.np as f64
    }

    fn reset_root(&mut self) {
        let n_s = self.params.n_s();
        for s in 0..self.scenarios.len() {
            self.xs[0][s * n_s..(s + 1) * n_s].copy_from_slice(&self.state0.x);
            self.acc[0][s] = 0.0;
        }
    }

    fn prev_column(&self, depth: usize) -> &[bool] {
        if depth == 0 {
            &self.state0.delta_prev
        } else {
            &self.columns[self.path[depth - 1]]
        }
    }

    /// Step every scenario from `depth` with column `c` into `depth + 1`.
    fn expand(&mut self, depth: usize, c: usize) -> bool {
        let n_s = self.params.n_s();
        let (head, tail) = self.xs.split_at_mut(depth + 1);
        let (src, dst) = (&head[depth], &mut tail[0]);
        dst.copy_from_slice(src);
        let prev: &[bool] = if depth == 0 {
            &self.state0.delta_prev
        } else {
            &self.columns[self.path[depth - 1]]
        };
        let col = &self.columns[c];
        for (s, traj) in self.scenarios.iter().enumerate() {
            let x = &mut dst[s * n_s..(s + 1) * n_s];
            match self.stepper.advance(col, prev, &traj[depth], x) {
                Ok((_, cost)) => self.acc[depth + 1][s] = self.acc[depth][s] + cost,
                Err(_) => return false,
            }
        }
        true
    }

    /// Lower bound on the remaining cost of scenario `s` from `depth` on.
    ///
    /// Relaxes the remaining steps into one energy balance: renewable,
    /// storage and thermal energies within their horizon totals must cover
    /// the demand energy, filled cheapest first. Switching costs and thermal
    /// minimum output are dropped.
    fn relaxation(&mut self, s: usize, depth: usize) -> f64 {
        let remaining = self.np - depth;
        if remaining == 0 {
            return 0.0;
        }
        let ts = self.params.ts;
        let n = remaining as f64;
        let [demand, r_floor, r_avail] = self.suffix[s][depth];
        let n_s = self.params.n_s();
        let x = &self.xs[depth][s * n_s..(s + 1) * n_s];

        let items = &mut self.items;
        items.clear();
        items.push(Item {
            rate: 0.0,
            lo: r_floor,
            hi: r_avail,
        });
        for ((unit, &x), &rate) in self.params.storage.iter().zip(x).zip(&self.storage_rates) {
            let a = (x - unit.x_max).max(ts * n * unit.p_min);
            let b = (x - unit.x_min).min(ts * n * unit.p_max);
            items.push(Item {
                rate,
                lo: a.min(b),
                hi: a.max(b),
            });
        }
        items.extend(self.thermal_items.iter().map(|it| Item {
            hi: it.hi * n,
            ..*it
        }));

        // Rates are nonnegative, so the all-lower corner is the cheapest
        // point of the box; it doubles as the bound when the relaxed
        // balance has no solution.
        let base: f64 = items.iter().map(|i| i.rate * i.lo).sum();
        let mut rest = demand - items.iter().map(|i| i.lo).sum::<f64>();
        if rest <= 0.0 {
            return base;
        }
        items.sort_unstable_by(|a, b| a.rate.total_cmp(&b.rate));
        let mut cost = base;
        for it in items.iter() {
            let take = rest.min(it.hi - it.lo);
            cost += it.rate * take;
            rest -= take;
            if rest <= 0.0 {
                break;
            }
        }
        cost
    }

    fn bound(&mut self, depth: usize) -> f64 {
        let mut lb = f64::NEG_INFINITY;
        for s in 0..self.scenarios.len() {
            lb = lb.max(self.acc[depth][s] + self.relaxation(s, depth));
        }
        lb
    }

    fn leaf(&self) -> Incumbent {
        let per_scenario = self.acc[self.np].clone();
        Incumbent {
            cost: per_scenario.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            committed: self.path.iter().map(|&c| self.on_count[c]).sum(),
            plan: self.path.clone(),
            per_scenario,
        }
    }

    fn rank(&self, a: &Incumbent, b: &Incumbent) -> Ordering {
        a.cost
            .total_cmp(&b.cost)
            .then(a.committed.cmp(&b.committed))
            .then_with(|| {
                let bits = |p: &[usize]| p.iter().flat_map(|&c| self.columns[c].iter().copied()).collect::<Vec<_>>();
                bits(&a.plan).cmp(&bits(&b.plan))
            })
    }

    fn offer(&mut self, cand: Incumbent) {
        let better = match &self.best {
            None => true,
            Some(b) => self.rank(&cand, b) == Ordering::Less,
        };
        if better {
            self.best = Some(cand);
        }
    }

    fn switches(&self, depth: usize, c: usize) -> usize {
        self.prev_column(depth)
            .iter()
            .zip(&self.columns[c])
            .filter(|(a, b)| a != b)
            .count()
    }

    fn try_incumbent(&mut self, plan: &[Vec<bool>]) {
        if plan.len() < self.np || plan.iter().any(|c| c.len() != self.n_t) {
            return;
        }
        self.reset_root();
        self.path.clear();
        let mut switches = 0;
        for depth in 0..self.np {
            let Some(c) = self.columns.iter().position(|col| col == &plan[depth]) else {
                return;
            };
            switches += self.switches(depth, c);
            if self.max_switches.is_some_and(|cap| switches > cap) {
                return;
            }
            if !self.expand(depth, c) {
                return;
            }
            self.path.push(c);
        }
        let leaf = self.leaf();
        self.offer(leaf);
    }

    fn branch(&mut self) {
        self.reset_root();
        self.path.clear();
        self.descend(0, 0, f64::NEG_INFINITY);
    }

    fn descend(&mut self, depth: usize, switches: usize, parent_bound: f64) {
        self.nodes += 1;
        for c in 0..self.columns.len() {
            let sw = switches + self.switches(depth, c);
            if self.max_switches.is_some_and(|cap| sw > cap) {
                self.capped_bound = self.capped_bound.min(parent_bound);
                continue;
            }
            if !self.expand(depth, c) {
                continue;
            }
            self.path.push(c);
            if depth + 1 == self.np {
                let leaf = self.leaf();
                self.offer(leaf);
            } else {
                let lb = self.bound(depth + 1).max(parent_bound);
                let keep = self
                    .best
                    .as_ref()
                    .is_none_or(|b| lb <= b.cost + self.prune_margin());
                if keep {
                    self.descend(depth + 1, sw, lb);
                }
            }
            self.path.pop();
        }
    }

    fn enumerate(&mut self) {
        let k = self.columns.len();
        let total = k.pow(self.np as u32);
        for index in 0..total {
            self.nodes += 1;
            self.reset_root();
            self.path.clear();
            let mut rem = index;
            let mut digits = vec![0; self.np];
            for d in digits.iter_mut().rev() {
                *d = rem % k;
                rem /= k;
            }
            let mut feasible = true;
            for (depth, &c) in digits.iter().enumerate() {
                if !self.expand(depth, c) {
                    feasible = false;
                    break;
                }
                self.path.push(c);
            }
            if feasible {
                let leaf = self.leaf();
                self.offer(leaf);
            }
        }
    }

    fn finish(self) -> Result<CommitmentPlan> {
        let best = self.best.ok_or(Error::NoFeasiblePlan)?;
        let margin = self.tolerance;
        Ok(CommitmentPlan {
            delta: best.plan.iter().map(|&c| self.columns[c].clone()).collect(),
            worst_case_cost: best.cost,
            per_scenario_costs: best.per_scenario,
            nodes: self.nodes,
            optimal: self.capped_bound > best.cost + margin,
        })
    }
}
