//! Steady-state power balance under saturating droop control.
//!
//! Every unit responds to the balancing variable `rho` with a clamped droop
//! line `p = sat(lo, u + chi * rho, hi)`. The sum of these lines is a
//! monotone nondecreasing piecewise-linear function of `rho`, so the balance
//! `sum(p) = demand` is solved exactly by sorting the breakpoints, bracketing
//! the demand by binary search and interpolating on the bracketing segment.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{
    clamp, storage_unit_bounds, DisturbanceSample, FleetParams, GridState, Setpoints,
    StoragePowerBounds,
};

/// Demands this close to the aggregate range are treated as on it.
pub const BALANCE_TOL: f64 = 1e-10;

/// One unit's clamped droop response.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct DroopLine {
    pub u: f64,
    pub chi: f64,
    pub lo: f64,
    pub hi: f64,
}

impl DroopLine {
    pub(crate) const OFF: DroopLine = DroopLine {
        u: 0.0,
        chi: 0.0,
        lo: 0.0,
        hi: 0.0,
    };

    #[inline]
    pub(crate) fn power(&self, rho: f64) -> f64 {
        clamp(self.lo, self.u + self.chi * rho, self.hi)
    }

    fn is_sloped(&self) -> bool {
        self.chi > 0.0 && self.lo < self.hi
    }

    /// Output as `rho -> -inf`.
    fn floor(&self) -> f64 {
        if self.chi > 0.0 {
            self.lo
        } else {
            clamp(self.lo, self.u, self.hi)
        }
    }

    /// Output as `rho -> +inf`.
    fn ceil(&self) -> f64 {
        if self.chi > 0.0 {
            self.hi
        } else {
            clamp(self.lo, self.u, self.hi)
        }
    }

    fn saturation(&self, rho: f64) -> Saturation {
        let v = self.u + self.chi * rho;
        if v <= self.lo {
            Saturation::Lower
        } else if v >= self.hi {
            Saturation::Upper
        } else {
            Saturation::Interior
        }
    }
}

/// Append the droop lines of all units (thermal, storage, renewable order).
///
/// `x` must satisfy the storage energy limits; this is not rechecked.
pub(crate) fn build_lines(
    sp: &Setpoints,
    delta: &[bool],
    w: &DisturbanceSample,
    x: &[f64],
    params: &FleetParams,
    out: &mut Vec<DroopLine>,
) {
    out.clear();
    for ((unit, &u), &on) in params.thermal.iter().zip(&sp.u_t).zip(delta) {
        out.push(if on {
            DroopLine {
                u,
                chi: unit.chi,
                lo: unit.p_min,
                hi: unit.p_max,
            }
        } else {
            DroopLine::OFF
        });
    }
    for ((unit, &u), &x) in params.storage.iter().zip(&sp.u_s).zip(x) {
        let (lo, hi) = storage_unit_bounds(unit, x, params.ts);
        out.push(DroopLine {
            u,
            chi: unit.chi,
            lo,
            hi,
        });
    }
    for ((unit, &u), &avail) in params.renewable.iter().zip(&sp.u_r).zip(&w.w_r) {
        // Curtailment at available power also caps the minimum output.
        out.push(DroopLine {
            u,
            chi: unit.chi,
            lo: unit.p_min.min(avail),
            hi: avail,
        });
    }
}

#[inline]
fn total(lines: &[DroopLine], rho: f64) -> f64 {
    lines.iter().map(|l| l.power(rho)).sum()
}

pub(crate) fn range(lines: &[DroopLine]) -> (f64, f64) {
    (
        lines.iter().map(DroopLine::floor).sum(),
        lines.iter().map(DroopLine::ceil).sum(),
    )
}

/// Find `rho` with `total(lines, rho) = demand`.
///
/// On a flat stretch of the aggregate curve the midpoint of the solution
/// interval is returned; if the interval is unbounded on one side its finite
/// end is returned. `Err` carries the aggregate range when the demand lies
/// outside it.
pub(crate) fn solve_lines(
    lines: &[DroopLine],
    demand: f64,
    breakpoints: &mut Vec<f64>,
) -> std::result::Result<f64, (f64, f64)> {
    let (min, max) = range(lines);
    if !(demand >= min - BALANCE_TOL && demand <= max + BALANCE_TOL) {
        return Err((min, max));
    }
    let target = clamp(min, demand, max);

    breakpoints.clear();
    for l in lines.iter().filter(|l| l.is_sloped()) {
        breakpoints.push((l.lo - l.u) / l.chi);
        breakpoints.push((l.hi - l.u) / l.chi);
    }
    if breakpoints.is_empty() {
        return Ok(0.0);
    }
    breakpoints.sort_unstable_by(f64::total_cmp);
    breakpoints.dedup();
    let bp = &breakpoints[..];
    let m = bp.len();

    let interp = |i: usize, v_i: f64| -> f64 {
        let v_next = total(lines, bp[i + 1]);
        bp[i] + (target - v_i) * (bp[i + 1] - bp[i]) / (v_next - v_i)
    };

    // Smallest rho reaching the target.
    let first_ge = bp.partition_point(|&b| total(lines, b) < target);
    let rho_lo = match first_ge {
        0 => f64::NEG_INFINITY,
        i if i == m => bp[m - 1],
        i => interp(i - 1, total(lines, bp[i - 1])),
    };
    // Largest rho not exceeding the target.
    let count_le = bp.partition_point(|&b| total(lines, b) <= target);
    let rho_hi = match count_le {
        0 => bp[0],
        c if c == m => f64::INFINITY,
        c => interp(c - 1, total(lines, bp[c - 1])),
    };

    Ok(match (rho_lo.is_finite(), rho_hi.is_finite()) {
        (true, true) => 0.5 * (rho_lo + rho_hi),
        (true, false) => rho_lo,
        (false, true) => rho_hi,
        (false, false) => 0.0,
    })
}

/// Position of a unit on its droop line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Saturation {
    /// Thermal unit not committed.
    Off,
    Lower,
    Interior,
    Upper,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnitSaturation {
    pub thermal: Vec<Saturation>,
    pub storage: Vec<Saturation>,
    pub renewable: Vec<Saturation>,
}

/// Realized unit powers for one step.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Dispatch {
    pub p_t: Vec<f64>,
    pub p_s: Vec<f64>,
    pub p_r: Vec<f64>,
    pub rho: f64,
    pub saturated: UnitSaturation,
    /// `sum(p) + sum(w_d)`.
    pub residual: f64,
}

fn check_inputs(
    sp: &Setpoints,
    w: &DisturbanceSample,
    state: &GridState,
    params: &FleetParams,
) -> Result<()> {
    sp.check_dims(params)?;
    w.check(params)?;
    state.check(params)
}

/// Total unit output at `rho`.
pub fn aggregate_power(
    rho: f64,
    sp: &Setpoints,
    w: &DisturbanceSample,
    bounds: &StoragePowerBounds,
    params: &FleetParams,
) -> f64 {
    let thermal: f64 = params
        .thermal
        .iter()
        .zip(&sp.u_t)
        .zip(&sp.delta_t)
        .map(|((t, &u), &on)| {
            if on {
                clamp(t.p_min, u + t.chi * rho, t.p_max)
            } else {
                0.0
            }
        })
        .sum();
    let storage: f64 = params
        .storage
        .iter()
        .enumerate()
        .map(|(i, s)| clamp(bounds.lo[i], sp.u_s[i] + s.chi * rho, bounds.hi[i]))
        .sum();
    let renewable: f64 = params
        .renewable
        .iter()
        .zip(&sp.u_r)
        .zip(&w.w_r)
        .map(|((r, &u), &avail)| clamp(r.p_min.min(avail), u + r.chi * rho, avail))
        .sum();
    thermal + storage + renewable
}

/// Aggregate output with every unit in lower and in upper saturation. The
/// balance is solvable iff the demand lies in this interval.
pub fn feasible_range(
    sp: &Setpoints,
    w: &DisturbanceSample,
    state: &GridState,
    params: &FleetParams,
) -> Result<(f64, f64)> {
    check_inputs(sp, w, state, params)?;
    let mut lines = Vec::new();
    build_lines(sp, &sp.delta_t, w, &state.x, params, &mut lines);
    Ok(range(&lines))
}

/// Unit powers at a given `rho`, balanced or not; `residual` reports the
/// mismatch.
pub fn powers_at(
    rho: f64,
    sp: &Setpoints,
    w: &DisturbanceSample,
    state: &GridState,
    params: &FleetParams,
) -> Result<Dispatch> {
    check_inputs(sp, w, state, params)?;
    if !rho.is_finite() {
        return Err(Error::InvalidArgument(format!("rho must be finite, got {rho}")));
    }
    let mut lines = Vec::new();
    build_lines(sp, &sp.delta_t, w, &state.x, params, &mut lines);
    Ok(dispatch_from_lines(&lines, rho, &sp.delta_t, w, params))
}

/// Solve the power balance for `rho` and return the realized powers.
pub fn solve_balance(
    sp: &Setpoints,
    w: &DisturbanceSample,
    state: &GridState,
    params: &FleetParams,
) -> Result<Dispatch> {
    check_inputs(sp, w, state, params)?;
    let mut lines = Vec::with_capacity(params.n_t() + params.n_s() + params.n_r());
    let mut scratch = Vec::new();
    build_lines(sp, &sp.delta_t, w, &state.x, params, &mut lines);
    let demand = w.demand();
    let rho = solve_lines(&lines, demand, &mut scratch)
        .map_err(|(min, max)| Error::Infeasible { demand, min, max })?;
    Ok(dispatch_from_lines(&lines, rho, &sp.delta_t, w, params))
}

pub(crate) fn dispatch_from_lines(
    lines: &[DroopLine],
    rho: f64,
    delta: &[bool],
    w: &DisturbanceSample,
    params: &FleetParams,
) -> Dispatch {
    let (n_t, n_s) = (params.n_t(), params.n_s());
    let (thermal, rest) = lines.split_at(n_t);
    let (storage, renewable) = rest.split_at(n_s);
    let powers = |ls: &[DroopLine]| ls.iter().map(|l| l.power(rho)).collect::<Vec<_>>();
    let flags = |ls: &[DroopLine]| ls.iter().map(|l| l.saturation(rho)).collect::<Vec<_>>();
    let p_t = powers(thermal);
    let p_s = powers(storage);
    let p_r = powers(renewable);
    let residual = p_t.iter().sum::<f64>()
        + p_s.iter().sum::<f64>()
        + p_r.iter().sum::<f64>()
        + w.w_d.iter().sum::<f64>();
    let thermal_flags = thermal
        .iter()
        .zip(delta)
        .map(|(l, &on)| if on { l.saturation(rho) } else { Saturation::Off })
        .collect();
    Dispatch {
        p_t,
        p_s,
        p_r,
        rho,
        saturated: UnitSaturation {
            thermal: thermal_flags,
            storage: flags(storage),
            renewable: flags(renewable),
        },
        residual,
    }
}

/// Dispatch one step and advance the storage energies.
pub fn step(
    state: &GridState,
    sp: &Setpoints,
    w: &DisturbanceSample,
    params: &FleetParams,
) -> Result<(Dispatch, GridState)> {
    let dispatch = solve_balance(sp, w, state, params)?;
    let next = GridState {
        x: advance_energies(&state.x, &dispatch.p_s, params),
        delta_prev: sp.delta_t.clone(),
    };
    Ok((dispatch, next))
}

pub(crate) fn advance_energies(x: &[f64], p_s: &[f64], params: &FleetParams) -> Vec<f64> {
    params
        .storage
        .iter()
        .zip(x.iter().zip(p_s))
        .map(|(unit, (&x, &p))| crate::model::next_energy(unit, x, p, params.ts))
        .collect()
}
