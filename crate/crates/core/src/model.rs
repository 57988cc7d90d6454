//! Unit parameters, grid state, and the saturation primitives every other
//! module builds on.
//!
//! Units and conventions: power in pu, energy in pu·h, time in hours.
//! Loads are non-positive, renewable availability is non-negative, and a
//! positive storage power means discharging.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Clamp `x` into `[lo, hi]` without checking the bound order.
///
/// Callers must guarantee `lo <= hi`.
#[inline]
pub(crate) fn clamp(lo: f64, x: f64, hi: f64) -> f64 {
    if x > hi {
        hi
    } else if x < lo {
        lo
    } else {
        x
    }
}

/// Saturation operator: `hi` above the range, `lo` below it, `x` inside.
pub fn sat(lo: f64, x: f64, hi: f64) -> Result<f64> {
    if !(lo <= hi) {
        return Err(Error::InvalidArgument(format!(
            "saturation bounds out of order: lo={lo} > hi={hi}"
        )));
    }
    Ok(clamp(lo, x, hi))
}

/// Element-wise [`sat`].
pub fn sat_vec(lo: &[f64], x: &[f64], hi: &[f64]) -> Result<Vec<f64>> {
    if lo.len() != x.len() || hi.len() != x.len() {
        return Err(Error::InvalidArgument(format!(
            "saturation operands differ in length: {}, {}, {}",
            lo.len(),
            x.len(),
            hi.len()
        )));
    }
    lo.iter()
        .zip(x)
        .zip(hi)
        .enumerate()
        .map(|(i, ((&l, &v), &h))| {
            sat(l, v, h).map_err(|_| {
                Error::InvalidArgument(format!(
                    "saturation bounds out of order at element {i}: lo={l} > hi={h}"
                ))
            })
        })
        .collect()
}

/// Conventional (thermal) generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThermalUnit {
    pub p_min: f64,
    pub p_max: f64,
    /// Inverse droop gain.
    pub chi: f64,
    /// Fuel cost per pu of output.
    pub c_fuel: f64,
    /// Fixed cost per step while committed.
    pub c_on: f64,
    /// Cost per on/off transition.
    pub c_sw: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StorageUnit {
    /// Most negative (charging) power; may be below zero.
    pub p_min: f64,
    pub p_max: f64,
    pub chi: f64,
    pub x_min: f64,
    pub x_max: f64,
    /// Cost per pu discharged; negative contribution while charging.
    pub c_st: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RenewableKind {
    #[default]
    Wind,
    Pv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RenewableUnit {
    pub p_min: f64,
    pub chi: f64,
    /// Rated power used by the prioritizing setpoints. When absent, the
    /// largest forecast upper bound for the unit is used.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_rated: Option<f64>,
    #[serde(default)]
    pub kind: RenewableKind,
}

/// Physical limits, droop gains and cost weights of the whole fleet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FleetParams {
    pub thermal: Vec<ThermalUnit>,
    pub storage: Vec<StorageUnit>,
    pub renewable: Vec<RenewableUnit>,
    pub n_loads: usize,
    /// Sampling time in hours.
    #[serde(rename = "ts_hours")]
    pub ts: f64,
}

impl FleetParams {
    pub fn n_t(&self) -> usize {
        self.thermal.len()
    }

    pub fn n_s(&self) -> usize {
        self.storage.len()
    }

    pub fn n_r(&self) -> usize {
        self.renewable.len()
    }

    pub fn thermal_min_total(&self) -> f64 {
        self.thermal.iter().map(|t| t.p_min).sum()
    }

    pub fn thermal_max_total(&self) -> f64 {
        self.thermal.iter().map(|t| t.p_max).sum()
    }

    /// Error unless [`validate_params`] reports nothing.
    pub fn ensure_valid(&self) -> Result<()> {
        let report = validate_params(self);
        if report.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(report.to_string()))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "type", content = "index", rename_all = "lowercase")]
pub enum UnitRef {
    Fleet,
    Thermal(usize),
    Storage(usize),
    Renewable(usize),
}

impl std::fmt::Display for UnitRef {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            UnitRef::Fleet => write!(f, "fleet"),
            UnitRef::Thermal(i) => write!(f, "thermal[{i}]"),
            UnitRef::Storage(i) => write!(f, "storage[{i}]"),
            UnitRef::Renewable(i) => write!(f, "renewable[{i}]"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub unit: UnitRef,
    pub rule: &'static str,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, rule: &str) -> bool {
        self.violations.iter().any(|v| v.rule == rule)
    }

    fn push(&mut self, unit: UnitRef, rule: &'static str) {
        self.violations.push(Violation { unit, rule });
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{}: {}", v.unit, v.rule)?;
        }
        Ok(())
    }
}

/// List every violated parameter invariant. An empty report means the fleet
/// is usable.
pub fn validate_params(params: &FleetParams) -> ValidationReport {
    // `!(a <= b)` so NaN fails as well.
    let mut report = ValidationReport::default();
    if !(params.ts > 0.0) {
        report.push(UnitRef::Fleet, "ts > 0");
    }
    for (i, t) in params.thermal.iter().enumerate() {
        let unit = UnitRef::Thermal(i);
        if !(t.p_min <= t.p_max) {
            report.push(unit, "p_min <= p_max");
        }
        if !(t.p_min >= 0.0) {
            report.push(unit, "p_min >= 0");
        }
        if !(t.chi >= 0.0) {
            report.push(unit, "chi >= 0");
        }
        if !(t.c_fuel >= 0.0 && t.c_on >= 0.0 && t.c_sw >= 0.0) {
            report.push(unit, "cost weights >= 0");
        }
    }
    for (i, s) in params.storage.iter().enumerate() {
        let unit = UnitRef::Storage(i);
        if !(s.p_min <= s.p_max) {
            report.push(unit, "p_min <= p_max");
        }
        if !(s.chi >= 0.0) {
            report.push(unit, "chi >= 0");
        }
        if !(s.x_min >= 0.0) {
            report.push(unit, "x_min >= 0");
        }
        if !(s.x_min < s.x_max) {
            report.push(unit, "x_min < x_max");
        }
        if !(s.c_st >= 0.0) {
            report.push(unit, "cost weights >= 0");
        }
    }
    for (i, r) in params.renewable.iter().enumerate() {
        let unit = UnitRef::Renewable(i);
        if !(r.p_min >= 0.0) {
            report.push(unit, "p_min >= 0");
        }
        if !(r.chi >= 0.0) {
            report.push(unit, "chi >= 0");
        }
        if let Some(rated) = r.p_rated {
            if !(rated >= r.p_min) {
                report.push(unit, "p_min <= p_rated");
            }
        }
    }
    report
}

/// (De)serialize binary vectors as `0`/`1` integers.
pub(crate) mod bits {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[bool], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|&b| u8::from(b)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<bool>, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Bit {
            Bool(bool),
            Int(u8),
        }
        Vec::<Bit>::deserialize(d)?
            .into_iter()
            .map(|b| match b {
                Bit::Bool(v) => Ok(v),
                Bit::Int(0) => Ok(false),
                Bit::Int(1) => Ok(true),
                Bit::Int(n) => Err(serde::de::Error::custom(format!(
                    "binary entry must be 0 or 1, got {n}"
                ))),
            })
            .collect()
    }
}

/// Storage energies and the previous commitment at one sampling instant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridState {
    pub x: Vec<f64>,
    #[serde(with = "bits")]
    pub delta_prev: Vec<bool>,
}

impl GridState {
    pub fn new(x: Vec<f64>, delta_prev: Vec<bool>) -> Self {
        Self { x, delta_prev }
    }

    /// Check dimensions and energy limits against the fleet.
    pub fn check(&self, params: &FleetParams) -> Result<()> {
        if self.x.len() != params.n_s() {
            return Err(Error::InvalidArgument(format!(
                "state has {} storage energies, fleet has {} storage units",
                self.x.len(),
                params.n_s()
            )));
        }
        if self.delta_prev.len() != params.n_t() {
            return Err(Error::InvalidArgument(format!(
                "state has {} commitment entries, fleet has {} thermal units",
                self.delta_prev.len(),
                params.n_t()
            )));
        }
        check_energies(&self.x, params)
    }
}

fn check_energies(x: &[f64], params: &FleetParams) -> Result<()> {
    for (unit, (&x, s)) in x.iter().zip(&params.storage).enumerate() {
        if !(s.x_min <= x && x <= s.x_max) {
            return Err(Error::StateViolation {
                unit,
                x,
                x_min: s.x_min,
                x_max: s.x_max,
            });
        }
    }
    Ok(())
}

/// Power setpoints and thermal commitment for one step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Setpoints {
    pub u_t: Vec<f64>,
    pub u_s: Vec<f64>,
    pub u_r: Vec<f64>,
    #[serde(with = "bits")]
    pub delta_t: Vec<bool>,
}

impl Setpoints {
    pub fn with_commitment(&self, delta_t: &[bool]) -> Self {
        Self {
            delta_t: delta_t.to_vec(),
            ..self.clone()
        }
    }

    pub fn check_dims(&self, params: &FleetParams) -> Result<()> {
        let ok = self.u_t.len() == params.n_t()
            && self.delta_t.len() == params.n_t()
            && self.u_s.len() == params.n_s()
            && self.u_r.len() == params.n_r();
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "setpoint dimensions (u_t={}, u_s={}, u_r={}, delta_t={}) do not match fleet (n_t={}, n_s={}, n_r={})",
                self.u_t.len(),
                self.u_s.len(),
                self.u_r.len(),
                self.delta_t.len(),
                params.n_t(),
                params.n_s(),
                params.n_r()
            )))
        }
    }
}

/// Available renewable power (`w_r >= 0`) and load (`w_d <= 0`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisturbanceSample {
    pub w_r: Vec<f64>,
    pub w_d: Vec<f64>,
}

impl DisturbanceSample {
    /// Total power the units must supply: `-sum(w_d)`.
    pub fn demand(&self) -> f64 {
        -self.w_d.iter().sum::<f64>()
    }

    pub fn check(&self, params: &FleetParams) -> Result<()> {
        if self.w_r.len() != params.n_r() || self.w_d.len() != params.n_loads {
            return Err(Error::InvalidArgument(format!(
                "disturbance has {} renewable and {} load entries, fleet expects {} and {}",
                self.w_r.len(),
                self.w_d.len(),
                params.n_r(),
                params.n_loads
            )));
        }
        if let Some(v) = self.w_r.iter().find(|v| !(**v >= 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "available renewable power must be >= 0, got {v}"
            )));
        }
        if let Some(v) = self.w_d.iter().find(|v| !(**v <= 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "load must be <= 0, got {v}"
            )));
        }
        Ok(())
    }
}

/// Admissible storage powers for the coming step.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StoragePowerBounds {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

/// Power window of one storage unit at energy `x_prev`.
///
/// When power and energy limits cross (possible only if `p_min > 0` or
/// `p_max < 0`), the energy-derived limit wins so the next energy stays in
/// range.
#[inline]
pub(crate) fn storage_unit_bounds(unit: &StorageUnit, x_prev: f64, ts: f64) -> (f64, f64) {
    let lo_energy = (x_prev - unit.x_max) / ts;
    let hi_energy = (x_prev - unit.x_min) / ts;
    let lo = unit.p_min.max(lo_energy);
    let hi = unit.p_max.min(hi_energy);
    if lo <= hi {
        (lo, hi)
    } else if lo == unit.p_min {
        (hi, hi)
    } else {
        (lo, lo)
    }
}

/// Time-varying storage power limits that keep the next energy within
/// `[x_min, x_max]`.
pub fn storage_power_bounds(x_prev: &[f64], params: &FleetParams) -> Result<StoragePowerBounds> {
    if x_prev.len() != params.n_s() {
        return Err(Error::InvalidArgument(format!(
            "{} storage energies given for {} storage units",
            x_prev.len(),
            params.n_s()
        )));
    }
    check_energies(x_prev, params)?;
    let (lo, hi) = params
        .storage
        .iter()
        .zip(x_prev)
        .map(|(s, &x)| storage_unit_bounds(s, x, params.ts))
        .unzip();
    Ok(StoragePowerBounds { lo, hi })
}

/// Storage energy after one step at power `p_s`.
///
/// For `p_s` inside [`storage_power_bounds`] the result lies in
/// `[x_min, x_max]` by construction; the clamp only absorbs the rounding of
/// `x - ts * ((x - x_min) / ts)`.
#[inline]
pub fn next_energy(unit: &StorageUnit, x_prev: f64, p_s: f64, ts: f64) -> f64 {
    clamp(unit.x_min, x_prev - ts * p_s, unit.x_max)
}
