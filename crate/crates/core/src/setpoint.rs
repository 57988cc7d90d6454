//! Constant prioritizing setpoints and the operability checks behind them.
//!
//! The setpoints place the linear droop regions of the unit types side by
//! side on the `rho` axis: renewables below the storage region, storage
//! around zero, thermal units above it. Under rising demand the grid then
//! exhausts renewables first, then storage, then thermal headroom.

use serde::Serialize;

use crate::config::SetpointLimits;
use crate::error::{Error, Result};
use crate::model::{storage_unit_bounds, FleetParams, Setpoints, UnitRef};
use crate::scenario::ForecastBounds;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StorageRhoBounds {
    pub rho_min_s: f64,
    pub rho_max_s: f64,
}

/// Smallest `p_min / chi` and largest `p_max / chi` over the storage units.
pub fn storage_rho_bounds(params: &FleetParams) -> Result<StorageRhoBounds> {
    if params.storage.is_empty() {
        return Err(Error::InvalidArgument(
            "prioritizing setpoints need at least one storage unit".into(),
        ));
    }
    let mut b = StorageRhoBounds {
        rho_min_s: f64::INFINITY,
        rho_max_s: f64::NEG_INFINITY,
    };
    for (i, s) in params.storage.iter().enumerate() {
        if !(s.chi > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "storage[{i}] has droop gain {}; rho bounds need chi > 0",
                s.chi
            )));
        }
        b.rho_min_s = b.rho_min_s.min(s.p_min / s.chi);
        b.rho_max_s = b.rho_max_s.max(s.p_max / s.chi);
    }
    Ok(b)
}

/// The constant optimal setpoints with every thermal unit committed.
///
/// Fails with a configuration error when a setpoint falls outside `limits`.
pub fn constant_setpoints(
    params: &FleetParams,
    p_rated: &[f64],
    limits: &SetpointLimits,
) -> Result<Setpoints> {
    if p_rated.len() != params.n_r() {
        return Err(Error::InvalidArgument(format!(
            "{} rated powers given for {} renewable units",
            p_rated.len(),
            params.n_r()
        )));
    }
    if let Some(v) = p_rated.iter().find(|v| !(**v >= 0.0)) {
        return Err(Error::InvalidArgument(format!(
            "rated power must be >= 0, got {v}"
        )));
    }
    let rho = storage_rho_bounds(params)?;
    let sp = Setpoints {
        u_t: params
            .thermal
            .iter()
            .map(|t| t.p_min - rho.rho_max_s * t.chi)
            .collect(),
        u_s: vec![0.0; params.n_s()],
        u_r: params
            .renewable
            .iter()
            .zip(p_rated)
            .map(|(r, &rated)| rated - rho.rho_min_s * r.chi)
            .collect(),
        delta_t: vec![true; params.n_t()],
    };
    let named = sp
        .u_t
        .iter()
        .enumerate()
        .map(|(i, &u)| (UnitRef::Thermal(i), u))
        .chain(sp.u_r.iter().enumerate().map(|(i, &u)| (UnitRef::Renewable(i), u)));
    for (unit, u) in named {
        if u < limits.u_min {
            return Err(Error::Config(format!(
                "{unit}: setpoint {u} below u_min = {}",
                limits.u_min
            )));
        }
        if u > limits.u_max {
            return Err(Error::Config(format!(
                "{unit}: setpoint {u} above u_max = {}",
                limits.u_max
            )));
        }
    }
    Ok(sp)
}

/// Rated renewable powers: the configured value, or else the largest upper
/// forecast bound for the unit.
pub fn resolve_rated(params: &FleetParams, bounds: Option<&ForecastBounds>) -> Result<Vec<f64>> {
    let forecast = bounds.map(ForecastBounds::max_renewable);
    params
        .renewable
        .iter()
        .enumerate()
        .map(|(i, r)| match (r.p_rated, &forecast) {
            (Some(v), _) => Ok(v),
            (None, Some(f)) if i < f.len() => Ok(f[i]),
            _ => Err(Error::Config(format!(
                "renewable[{i}] has no p_rated and no forecast to derive it from"
            ))),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepRequirement {
    pub k: usize,
    /// Total load magnitude under the lower and the upper bound profile.
    pub demand: [f64; 2],
    /// Load never above the summed thermal maxima.
    pub max_ok: bool,
    /// Load never below the summed thermal minima.
    pub min_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RequirementReport {
    /// Permanent thermal commitment is a usage condition, not checked here.
    pub always_on: &'static str,
    pub thermal_min: f64,
    pub thermal_max: f64,
    pub steps: Vec<StepRequirement>,
}

impl RequirementReport {
    pub fn passed(&self) -> bool {
        self.steps.iter().all(|s| s.max_ok && s.min_ok)
    }

    pub fn failures(&self) -> impl Iterator<Item = &StepRequirement> {
        self.steps.iter().filter(|s| !(s.max_ok && s.min_ok))
    }
}

/// Check that every load in both bound profiles lies within the summed
/// thermal limits.
pub fn check_requirements(params: &FleetParams, bounds: &ForecastBounds) -> RequirementReport {
    let (lo, hi) = (params.thermal_min_total(), params.thermal_max_total());
    let steps = bounds
        .lower
        .iter()
        .zip(&bounds.upper)
        .enumerate()
        .map(|(k, (a, b))| {
            let demand = [a.demand(), b.demand()];
            StepRequirement {
                k,
                demand,
                max_ok: demand.iter().all(|&d| d <= hi),
                min_ok: demand.iter().all(|&d| d >= lo),
            }
        })
        .collect();
    RequirementReport {
        always_on: "assumed",
        thermal_min: lo,
        thermal_max: hi,
        steps,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum UnitType {
    Renewable,
    Storage,
    Thermal,
}

/// Linear droop region of one unit on the `rho` axis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DroopInterval {
    pub unit: UnitRef,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TypeInterval {
    pub kind: UnitType,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OverlapReport {
    pub units: Vec<DroopInterval>,
    /// Hull of each type's non-degenerate intervals, in priority order.
    pub types: Vec<TypeInterval>,
    /// Pairs of types whose regions overlap or appear out of order.
    pub conflicts: Vec<(UnitType, UnitType)>,
}

impl OverlapReport {
    pub fn passed(&self) -> bool {
        self.conflicts.is_empty()
    }
}

/// Check that the linear droop regions of renewables, storage and thermal
/// units are disjoint and ordered along `rho`. Touching endpoints count as
/// disjoint.
///
/// `w_r_range` gives the span of available power per renewable unit and
/// `state_range` the span of energies per storage unit; each interval is
/// widened to the worst case over these spans. Units without droop
/// (`chi = 0`) or with a zero-width power window have no linear region and
/// are ignored.
pub fn check_nonoverlap(
    sp: &Setpoints,
    params: &FleetParams,
    w_r_range: &[(f64, f64)],
    state_range: &[(f64, f64)],
) -> Result<OverlapReport> {
    sp.check_dims(params)?;
    if w_r_range.len() != params.n_r() || state_range.len() != params.n_s() {
        return Err(Error::InvalidArgument(format!(
            "ranges cover {} renewable / {} storage units, fleet has {} / {}",
            w_r_range.len(),
            state_range.len(),
            params.n_r(),
            params.n_s()
        )));
    }
    let mut units = Vec::new();
    let mut push = |unit, u: f64, chi: f64, lo: f64, hi: f64| {
        if chi > 0.0 && lo < hi {
            units.push(DroopInterval {
                unit,
                lo: (lo - u) / chi,
                hi: (hi - u) / chi,
            });
        }
    };
    for (i, (t, &u)) in params.thermal.iter().zip(&sp.u_t).enumerate() {
        push(UnitRef::Thermal(i), u, t.chi, t.p_min, t.p_max);
    }
    for (i, ((s, &u), &(x_a, x_b))) in params
        .storage
        .iter()
        .zip(&sp.u_s)
        .zip(state_range)
        .enumerate()
    {
        // Both window limits grow with the energy, so the widest window over
        // the range spans from the emptiest lower to the fullest upper limit.
        let x_lo = x_a.min(x_b).clamp(s.x_min, s.x_max);
        let x_hi = x_a.max(x_b).clamp(s.x_min, s.x_max);
        let lo = storage_unit_bounds(s, x_lo, params.ts).0;
        let hi = storage_unit_bounds(s, x_hi, params.ts).1;
        push(UnitRef::Storage(i), u, s.chi, lo, hi);
    }
    for (i, ((r, &u), &(w_a, w_b))) in params
        .renewable
        .iter()
        .zip(&sp.u_r)
        .zip(w_r_range)
        .enumerate()
    {
        let w_hi = w_a.max(w_b);
        let w_lo = w_a.min(w_b);
        push(UnitRef::Renewable(i), u, r.chi, r.p_min.min(w_lo), w_hi);
    }

    let kind_of = |u: UnitRef| match u {
        UnitRef::Renewable(_) => UnitType::Renewable,
        UnitRef::Storage(_) => UnitType::Storage,
        _ => UnitType::Thermal,
    };
    let types: Vec<TypeInterval> = [UnitType::Renewable, UnitType::Storage, UnitType::Thermal]
        .into_iter()
        .filter_map(|kind| {
            let mut it = units.iter().filter(|d| kind_of(d.unit) == kind);
            let first = it.next()?;
            let (lo, hi) = it.fold((first.lo, first.hi), |(a, b), d| (a.min(d.lo), b.max(d.hi)));
            Some(TypeInterval { kind, lo, hi })
        })
        .collect();
    let mut conflicts = Vec::new();
    for (i, a) in types.iter().enumerate() {
        for b in &types[i + 1..] {
            if a.hi > b.lo {
                conflicts.push((a.kind, b.kind));
            }
        }
    }
    Ok(OverlapReport {
        units,
        types,
        conflicts,
    })
}
