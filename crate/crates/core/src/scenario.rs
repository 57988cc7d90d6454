//! Interval forecasts and scenario trajectories.
//!
//! A [`ForecastBounds`] holds, for every step, a lower and an upper
//! [`DisturbanceSample`]. The lower profile is the worst case (least
//! renewable power, largest load magnitude since loads are negative), the
//! upper profile the best case. Scenarios in between are obtained by linear
//! interpolation.
//!
//! `bounds.csv` layout (header required, one row per step):
//!
//! ```text
//! k,wr_min_1..wr_min_R,wr_max_1..wr_max_R,wd_min_1..wd_min_D,wd_max_1..wd_max_D
//! ```

use std::f64::consts::PI;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::cost::{stage_cost_raw, CostWeights};
use crate::dispatch::Dispatch;
use crate::error::{Error, Result};
use crate::model::{DisturbanceSample, FleetParams, GridState, RenewableKind};

/// Load bounds of the first day of the reference study, hourly, 25 points.
pub const DAY1_LOAD_CSV: &str = include_str!("../data/day1_load.csv");

/// A disturbance trajectory, one sample per step.
pub type Trajectory = Vec<DisturbanceSample>;

#[derive(Debug, Clone, PartialEq)]
pub struct ForecastBounds {
    /// Spacing of the samples in hours.
    pub step_hours: f64,
    pub lower: Vec<DisturbanceSample>,
    pub upper: Vec<DisturbanceSample>,
}

impl ForecastBounds {
    pub fn new(
        step_hours: f64,
        lower: Vec<DisturbanceSample>,
        upper: Vec<DisturbanceSample>,
    ) -> Result<Self> {
        let b = Self {
            step_hours,
            lower,
            upper,
        };
        b.check().map_err(|(k, msg)| {
            Error::InvalidArgument(format!("forecast bounds at step {k}: {msg}"))
        })?;
        Ok(b)
    }

    /// Bounds collapsed onto a known trajectory.
    pub fn degenerate(step_hours: f64, traj: &[DisturbanceSample]) -> Result<Self> {
        Self::new(step_hours, traj.to_vec(), traj.to_vec())
    }

    fn check(&self) -> std::result::Result<(), (usize, String)> {
        if !(self.step_hours > 0.0) {
            return Err((0, format!("step must be positive, got {}", self.step_hours)));
        }
        if self.lower.len() != self.upper.len() {
            return Err((
                0,
                format!(
                    "{} lower and {} upper samples",
                    self.lower.len(),
                    self.upper.len()
                ),
            ));
        }
        let (n_r, n_d) = self
            .lower
            .first()
            .map(|s| (s.w_r.len(), s.w_d.len()))
            .unwrap_or((0, 0));
        for (k, (lo, hi)) in self.lower.iter().zip(&self.upper).enumerate() {
            check_pair(lo, hi, n_r, n_d).map_err(|m| (k, m))?;
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.lower.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lower.is_empty()
    }

    pub fn n_r(&self) -> usize {
        self.lower.first().map_or(0, |s| s.w_r.len())
    }

    pub fn n_d(&self) -> usize {
        self.lower.first().map_or(0, |s| s.w_d.len())
    }

    pub fn is_degenerate(&self) -> bool {
        self.lower == self.upper
    }

    /// Steps `start..start + len`.
    pub fn window(&self, start: usize, len: usize) -> Result<Self> {
        let end = start + len;
        if end > self.len() {
            return Err(Error::InvalidArgument(format!(
                "window {start}..{end} exceeds forecast of {} steps",
                self.len()
            )));
        }
        Ok(Self {
            step_hours: self.step_hours,
            lower: self.lower[start..end].to_vec(),
            upper: self.upper[start..end].to_vec(),
        })
    }

    /// Largest upper renewable bound per unit.
    pub fn max_renewable(&self) -> Vec<f64> {
        let mut out = vec![0.0f64; self.n_r()];
        for s in &self.upper {
            for (o, &v) in out.iter_mut().zip(&s.w_r) {
                *o = o.max(v);
            }
        }
        out
    }

    /// Linearly resample onto a grid of `to_step` hours spanning the same time
    /// range. Samples beyond the last input point are not extrapolated.
    pub fn resample(&self, to_step: f64) -> Result<Self> {
        if !(to_step > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "resampling step must be positive, got {to_step}"
            )));
        }
        if self.len() < 2 || (to_step - self.step_hours).abs() < 1e-12 {
            return Ok(Self {
                step_hours: to_step,
                ..self.clone()
            });
        }
        let span = (self.len() - 1) as f64 * self.step_hours;
        let n = (span / to_step + 1e-9).floor() as usize + 1;
        let sample = |profile: &[DisturbanceSample], t: f64| {
            let pos = t / self.step_hours;
            let i = (pos.floor() as usize).min(profile.len() - 2);
            let frac = pos - i as f64;
            lerp_sample(&profile[i], &profile[i + 1], frac)
        };
        let times = (0..n).map(|j| j as f64 * to_step);
        Ok(Self {
            step_hours: to_step,
            lower: times.clone().map(|t| sample(&self.lower, t)).collect(),
            upper: times.map(|t| sample(&self.upper, t)).collect(),
        })
    }

    /// Check against the fleet's renewable and load counts.
    pub fn check_dims(&self, params: &FleetParams) -> Result<()> {
        if !self.is_empty() && (self.n_r() != params.n_r() || self.n_d() != params.n_loads) {
            return Err(Error::InvalidArgument(format!(
                "forecast has {} renewable / {} load columns, fleet has {} / {}",
                self.n_r(),
                self.n_d(),
                params.n_r(),
                params.n_loads
            )));
        }
        Ok(())
    }
}

fn check_pair(
    lo: &DisturbanceSample,
    hi: &DisturbanceSample,
    n_r: usize,
    n_d: usize,
) -> std::result::Result<(), String> {
    if lo.w_r.len() != n_r || hi.w_r.len() != n_r || lo.w_d.len() != n_d || hi.w_d.len() != n_d {
        return Err("inconsistent number of renewable or load entries".into());
    }
    for (i, (&a, &b)) in lo.w_r.iter().zip(&hi.w_r).enumerate() {
        if !(a >= 0.0) {
            return Err(format!("renewable {} lower bound {a} is negative", i + 1));
        }
        if !(a <= b) {
            return Err(format!("renewable {} lower bound {a} above upper bound {b}", i + 1));
        }
    }
    for (i, (&a, &b)) in lo.w_d.iter().zip(&hi.w_d).enumerate() {
        if !(b <= 0.0) {
            return Err(format!("load {} bound {b} is positive", i + 1));
        }
        if !(a <= b) {
            return Err(format!("load {} lower bound {a} above upper bound {b}", i + 1));
        }
    }
    Ok(())
}

fn lerp_sample(a: &DisturbanceSample, b: &DisturbanceSample, t: f64) -> DisturbanceSample {
    let lerp = |x: &[f64], y: &[f64]| -> Vec<f64> {
        x.iter().zip(y).map(|(&p, &q)| p + t * (q - p)).collect()
    };
    DisturbanceSample {
        w_r: lerp(&a.w_r, &b.w_r),
        w_d: lerp(&a.w_d, &b.w_d),
    }
}

/// `w(k) = w_min(k) + alpha * (w_max(k) - w_min(k))` for every step.
pub fn interpolate(bounds: &ForecastBounds, alpha: f64) -> Result<Trajectory> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidArgument(format!(
            "alpha must lie in [0, 1], got {alpha}"
        )));
    }
    Ok(bounds
        .lower
        .iter()
        .zip(&bounds.upper)
        .map(|(lo, hi)| lerp_sample(lo, hi, alpha))
        .collect())
}

/// The eleven interpolation weights `0.0, 0.1, ..., 1.0`.
pub fn scenario_alphas() -> Vec<f64> {
    (0..=10).map(|s| s as f64 / 10.0).collect()
}

/// Worst- and best-case trajectories; a single trajectory when the bounds
/// coincide.
pub fn extreme_set(bounds: &ForecastBounds) -> Vec<Trajectory> {
    if bounds.is_degenerate() {
        vec![bounds.lower.clone()]
    } else {
        vec![bounds.lower.clone(), bounds.upper.clone()]
    }
}

/// Trajectories at `alpha = i / m` for `i = 0..=m`.
pub fn alpha_grid(bounds: &ForecastBounds, m: usize) -> Vec<Trajectory> {
    if m == 0 || bounds.is_degenerate() {
        return extreme_set(bounds);
    }
    (0..=m)
        .map(|i| interpolate(bounds, i as f64 / m as f64).expect("alpha in range"))
        .collect()
}

fn bounds_header(n_r: usize, n_d: usize) -> Vec<String> {
    let mut h = vec!["k".to_string()];
    for prefix in ["wr_min", "wr_max"] {
        h.extend((1..=n_r).map(|i| format!("{prefix}_{i}")));
    }
    for prefix in ["wd_min", "wd_max"] {
        h.extend((1..=n_d).map(|i| format!("{prefix}_{i}")));
    }
    h
}

/// Parse `bounds.csv` content sampled every `step_hours`.
pub fn parse_bounds_csv(
    reader: impl Read,
    source: impl Into<PathBuf>,
    step_hours: f64,
) -> Result<ForecastBounds> {
    let source = source.into();
    let parse_err = |row: usize, msg: String| Error::Parse {
        path: source.clone(),
        row,
        msg,
    };
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let n_r = header.iter().filter(|h| h.starts_with("wr_min_")).count();
    let n_d = header.iter().filter(|h| h.starts_with("wd_min_")).count();
    if header != bounds_header(n_r, n_d) {
        return Err(parse_err(
            1,
            format!(
                "expected header `{}`, found `{}`",
                bounds_header(n_r, n_d).join(","),
                header.join(",")
            ),
        ));
    }
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let row = i + 2;
        let record = record?;
        let values = record
            .iter()
            .skip(1)
            .map(|v| {
                v.parse::<f64>()
                    .map_err(|e| parse_err(row, format!("`{v}`: {e}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        if values.len() != 2 * (n_r + n_d) {
            return Err(parse_err(
                row,
                format!("expected {} values, found {}", 2 * (n_r + n_d), values.len()),
            ));
        }
        let (wr, wd) = values.split_at(2 * n_r);
        let lo = DisturbanceSample {
            w_r: wr[..n_r].to_vec(),
            w_d: wd[..n_d].to_vec(),
        };
        let hi = DisturbanceSample {
            w_r: wr[n_r..].to_vec(),
            w_d: wd[n_d..].to_vec(),
        };
        check_pair(&lo, &hi, n_r, n_d).map_err(|m| parse_err(row, m))?;
        lower.push(lo);
        upper.push(hi);
    }
    ForecastBounds::new(step_hours, lower, upper)
}

pub fn load_bounds_csv(path: impl AsRef<Path>, step_hours: f64) -> Result<ForecastBounds> {
    let path = path.as_ref();
    let file = std::fs::File::open(path)?;
    parse_bounds_csv(file, path, step_hours)
}

/// The bundled day-1 load bounds (hourly, no renewable columns).
pub fn day1_load() -> ForecastBounds {
    parse_bounds_csv(DAY1_LOAD_CSV.as_bytes(), "day1_load.csv", 1.0)
        .expect("bundled fixture parses")
}

pub fn write_bounds_csv(bounds: &ForecastBounds, writer: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(bounds_header(bounds.n_r(), bounds.n_d()))?;
    for (k, (lo, hi)) in bounds.lower.iter().zip(&bounds.upper).enumerate() {
        let mut rec = vec![k.to_string()];
        rec.extend(lo.w_r.iter().chain(&hi.w_r).map(f64::to_string));
        rec.extend(lo.w_d.iter().chain(&hi.w_d).map(f64::to_string));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Write a trajectory as `k,wr_1..,wd_1..`.
pub fn write_trajectory_csv(traj: &[DisturbanceSample], writer: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let (n_r, n_d) = traj
        .first()
        .map_or((0, 0), |s| (s.w_r.len(), s.w_d.len()));
    let mut header = vec!["k".to_string()];
    header.extend((1..=n_r).map(|i| format!("wr_{i}")));
    header.extend((1..=n_d).map(|i| format!("wd_{i}")));
    w.write_record(&header)?;
    for (k, s) in traj.iter().enumerate() {
        let mut rec = vec![k.to_string()];
        rec.extend(s.w_r.iter().chain(&s.w_d).map(f64::to_string));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Seeded synthetic forecast bounds: diurnal wind, PV and load profiles at
/// the fleet's sampling time.
///
/// Load magnitudes are kept inside the summed thermal limits (with a small
/// margin) so both bound profiles satisfy the operability requirements. PV
/// is zero between 20:00 and 06:00.
pub fn synth_profiles(seed: u64, days: usize, params: &FleetParams) -> ForecastBounds {
    const LOAD_BAND: f64 = 0.075;
    const LOAD_MARGIN: f64 = 0.02;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let per_day = (24.0 / params.ts).round().max(1.0) as usize;
    let n = days.max(1) * per_day;
    let noise = Normal::new(0.0, 1.0).expect("unit normal");

    let t_min = params.thermal_min_total();
    let t_max = params.thermal_max_total();
    let has_thermal = params.n_t() > 0;

    let caps: Vec<f64> = params
        .renewable
        .iter()
        .map(|r| r.p_rated.unwrap_or(1.0))
        .collect();
    let mut wind_state = vec![0.0f64; params.n_r()];
    let mut wind_level = vec![0.45f64; params.n_r()];
    let mut cloud = vec![1.0f64; params.n_r()];
    let mut load_noise = 0.0f64;
    let mut load_day = 0.0f64;

    let mut lower = Vec::with_capacity(n);
    let mut upper = Vec::with_capacity(n);
    for i in 0..n {
        let hour = (i % per_day) as f64 * params.ts;
        if i % per_day == 0 {
            for r in 0..params.n_r() {
                wind_level[r] = (0.6 * wind_level[r] + 0.4 * rng.random_range(0.1..0.8)).clamp(0.05, 0.9);
                cloud[r] = rng.random_range(0.35..1.0);
            }
            load_day = rng.random_range(-0.05..0.05);
        }

        let mut w_r_lo = Vec::with_capacity(params.n_r());
        let mut w_r_hi = Vec::with_capacity(params.n_r());
        for (r, unit) in params.renewable.iter().enumerate() {
            let cap = caps[r];
            let (nominal, spread) = match unit.kind {
                RenewableKind::Wind => {
                    wind_state[r] = 0.93 * wind_state[r] + 0.05 * noise.sample(&mut rng);
                    let diurnal = 0.12 * (2.0 * PI * (hour - 15.0) / 24.0).cos();
                    let f = (wind_level[r] + diurnal + wind_state[r]).clamp(0.0, 1.0);
                    (cap * f, 0.25 * cap)
                }
                RenewableKind::Pv => {
                    if (6.0..20.0).contains(&hour) {
                        let shape = (PI * (hour - 6.0) / 14.0).sin();
                        let f = (shape * cloud[r] * (1.0 + 0.05 * noise.sample(&mut rng))).clamp(0.0, 1.0);
                        (cap * f, 0.35 * cap * shape)
                    } else {
                        (0.0, 0.0)
                    }
                }
            };
            w_r_lo.push((nominal - 0.5 * spread).clamp(0.0, cap));
            w_r_hi.push((nominal + 0.5 * spread).clamp(0.0, cap));
        }

        load_noise = 0.8 * load_noise + 0.03 * noise.sample(&mut rng);
        let evening = 0.12 * (-((hour - 19.0) / 2.5).powi(2)).exp();
        let diurnal = 0.1 * (2.0 * PI * (hour - 14.0) / 24.0).cos();
        let nominal = 0.58 + load_day + diurnal + evening + load_noise;
        let (mut mag_lo, mut mag_hi) = (nominal - LOAD_BAND, nominal + LOAD_BAND);
        if has_thermal {
            let floor = t_min + LOAD_MARGIN.min(0.5 * (t_max - t_min));
            let ceil = t_max - LOAD_MARGIN.min(0.5 * (t_max - t_min));
            mag_lo = mag_lo.clamp(floor, ceil);
            mag_hi = mag_hi.clamp(floor, ceil);
        } else {
            mag_lo = mag_lo.max(0.0);
            mag_hi = mag_hi.max(mag_lo);
        }
        let share = params.n_loads.max(1) as f64;
        lower.push(DisturbanceSample {
            w_r: w_r_lo,
            w_d: vec![-mag_hi / share; params.n_loads],
        });
        upper.push(DisturbanceSample {
            w_r: w_r_hi,
            w_d: vec![-mag_lo / share; params.n_loads],
        });
    }
    ForecastBounds::new(params.ts, lower, upper).expect("synthetic bounds are ordered")
}

/// One simulated step.
#[derive(Debug, Clone, PartialEq)]
pub struct LogStep {
    pub dispatch: Dispatch,
    pub delta: Vec<bool>,
    /// State after the step.
    pub state: GridState,
    pub disturbance: DisturbanceSample,
}

/// A simulated run: the initial state and every step after it.
#[derive(Debug, Clone, PartialEq)]
pub struct SimLog {
    pub ts: f64,
    pub initial: GridState,
    pub steps: Vec<LogStep>,
}

impl SimLog {
    pub fn new(ts: f64, initial: GridState) -> Self {
        Self {
            ts,
            initial,
            steps: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn stage_costs(&self, w: &CostWeights) -> Vec<f64> {
        let mut prev = &self.initial.delta_prev;
        self.steps
            .iter()
            .map(|s| {
                let c = stage_cost_raw(&s.dispatch.p_t, &s.dispatch.p_s, &s.delta, prev, w);
                prev = &s.delta;
                c
            })
            .collect()
    }

    /// Thermal infeed energy `ts * sum(p_t)` over the run.
    pub fn thermal_energy(&self) -> f64 {
        self.ts * self.steps.iter().flat_map(|s| &s.dispatch.p_t).sum::<f64>()
    }

    /// Renewable infeed energy `ts * sum(p_r)` over the run.
    pub fn renewable_energy(&self) -> f64 {
        self.ts * self.steps.iter().flat_map(|s| &s.dispatch.p_r).sum::<f64>()
    }

    /// Largest deviation from `x(k) = x(k-1) - ts * p_s(k)` along the run.
    pub fn chain_error(&self) -> f64 {
        let mut prev = &self.initial.x;
        let mut worst = 0.0f64;
        for s in &self.steps {
            for ((&x0, &x1), &p) in prev.iter().zip(&s.state.x).zip(&s.dispatch.p_s) {
                worst = worst.max((x1 - (x0 - self.ts * p)).abs());
            }
            prev = &s.state.x;
        }
        worst
    }

    pub fn write_csv(&self, w: &CostWeights, writer: impl Write) -> Result<()> {
        write_log_csv(self, w, writer)
    }
}

fn log_header(n_t: usize, n_s: usize, n_r: usize) -> Vec<String> {
    let mut h = vec!["k".to_string(), "rho".to_string()];
    h.extend((1..=n_t).map(|i| format!("p_t_{i}")));
    h.extend((1..=n_s).map(|i| format!("p_s_{i}")));
    h.extend((1..=n_r).map(|i| format!("p_r_{i}")));
    h.extend((1..=n_s).map(|i| format!("x_{i}")));
    h.extend((1..=n_t).map(|i| format!("delta_{i}")));
    h.push("stage_cost".to_string());
    h
}

/// Write `k,rho,p_t..,p_s..,p_r..,x..,delta..,stage_cost`.
///
/// Row `k = 0` carries the initial state with zero powers and cost; rows
/// `1..` are the simulated steps with the state after each step. Values use
/// the shortest round-trip float representation.
pub fn write_log_csv(log: &SimLog, weights: &CostWeights, writer: impl Write) -> Result<()> {
    let n_t = log.initial.delta_prev.len();
    let n_s = log.initial.x.len();
    let n_r = log.steps.first().map_or(0, |s| s.dispatch.p_r.len());
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(log_header(n_t, n_s, n_r))?;
    let bit = |b: &bool| if *b { "1".to_string() } else { "0".to_string() };

    let mut rec = vec!["0".to_string(), "0".to_string()];
    rec.extend(std::iter::repeat_n("0".to_string(), n_t + n_s + n_r));
    rec.extend(log.initial.x.iter().map(f64::to_string));
    rec.extend(log.initial.delta_prev.iter().map(bit));
    rec.push("0".to_string());
    w.write_record(&rec)?;

    for (k, (s, cost)) in log.steps.iter().zip(log.stage_costs(weights)).enumerate() {
        let d = &s.dispatch;
        let mut rec = vec![(k + 1).to_string(), d.rho.to_string()];
        rec.extend(d.p_t.iter().chain(&d.p_s).chain(&d.p_r).map(f64::to_string));
        rec.extend(s.state.x.iter().map(f64::to_string));
        rec.extend(s.delta.iter().map(bit));
        rec.push(cost.to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// One row of a log CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct LogRow {
    pub k: usize,
    pub rho: f64,
    pub p_t: Vec<f64>,
    pub p_s: Vec<f64>,
    pub p_r: Vec<f64>,
    pub x: Vec<f64>,
    pub delta: Vec<bool>,
    pub stage_cost: f64,
}

/// A log CSV read back: the initial row and the step rows.
#[derive(Debug, Clone, PartialEq)]
pub struct LoggedRun {
    pub initial: LogRow,
    pub steps: Vec<LogRow>,
}

impl LoggedRun {
    /// Recompute the closed-loop cost from the logged powers and commitments.
    pub fn total_cost(&self, w: &CostWeights) -> f64 {
        let mut prev = &self.initial.delta;
        let mut stages = Vec::with_capacity(self.steps.len());
        for row in &self.steps {
            stages.push(stage_cost_raw(&row.p_t, &row.p_s, &row.delta, prev, w));
            prev = &row.delta;
        }
        stages.iter().sum()
    }
}

pub fn read_log_csv(reader: impl Read, source: impl Into<PathBuf>) -> Result<LoggedRun> {
    let source = source.into();
    let parse_err = |row: usize, msg: String| Error::Parse {
        path: source.clone(),
        row,
        msg,
    };
    let mut rdr = csv::Reader::from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let count = |p: &str| {
        header
            .iter()
            .filter(|h| h.strip_prefix(p).is_some_and(|r| r.parse::<usize>().is_ok()))
            .count()
    };
    let (n_t, n_s, n_r) = (count("p_t_"), count("p_s_"), count("p_r_"));
    if header != log_header(n_t, n_s, n_r) {
        return Err(parse_err(1, format!("unexpected log header `{}`", header.join(","))));
    }
    let mut rows = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let row = i + 2;
        let record = record?;
        let num = |j: usize| -> Result<f64> {
            let v = &record[j];
            v.parse::<f64>()
                .map_err(|e| parse_err(row, format!("column {}: `{v}`: {e}", j + 1)))
        };
        let k = record[0]
            .parse::<usize>()
            .map_err(|e| parse_err(row, format!("k: {e}")))?;
        let mut j = 1;
        let mut take = |n: usize| -> Result<Vec<f64>> {
            let out = (j..j + n).map(&num).collect();
            j += n;
            out
        };
        let rho = take(1)?[0];
        let p_t = take(n_t)?;
        let p_s = take(n_s)?;
        let p_r = take(n_r)?;
        let x = take(n_s)?;
        let delta = take(n_t)?
            .into_iter()
            .map(|v| match v {
                0.0 => Ok(false),
                1.0 => Ok(true),
                other => Err(parse_err(row, format!("commitment must be 0 or 1, got {other}"))),
            })
            .collect::<Result<Vec<bool>>>()?;
        let stage_cost = take(1)?[0];
        rows.push(LogRow {
            k,
            rho,
            p_t,
            p_s,
            p_r,
            x,
            delta,
            stage_cost,
        });
    }
    let mut rows = rows.into_iter();
    let initial = rows
        .next()
        .ok_or_else(|| parse_err(2, "log has no initial row".into()))?;
    Ok(LoggedRun {
        initial,
        steps: rows.collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::case_study;

    fn sample(w_r: f64, w_d: f64) -> DisturbanceSample {
        DisturbanceSample {
            w_r: vec![w_r],
            w_d: vec![w_d],
        }
    }

    #[test]
    fn interpolation_endpoints_and_midpoint() {
        let b = day1_load();
        assert_eq!(interpolate(&b, 0.0).unwrap(), b.lower);
        assert_eq!(interpolate(&b, 1.0).unwrap(), b.upper);
        let mid = interpolate(&b, 0.5).unwrap();
        assert!((mid[0].w_d[0] - -0.816024125753995).abs() < 1e-12);
        assert!(interpolate(&b, 1.5).is_err());
        assert!(interpolate(&b, -0.1).is_err());
    }

    #[test]
    fn day1_fixture_shape() {
        let b = day1_load();
        assert_eq!(b.len(), 25);
        assert_eq!(b.n_r(), 0);
        assert_eq!(b.n_d(), 1);
        assert_eq!(b.lower[0].w_d[0], -0.891024125753995);
        assert_eq!(b.upper[0].w_d[0], -0.741024125753995);
        assert_eq!(extreme_set(&b), vec![b.lower.clone(), b.upper.clone()]);
    }

    #[test]
    fn csv_rejects_bad_rows() {
        let inverted = "k,wr_min_1,wr_max_1,wd_min_1,wd_max_1\n0,0.5,0.6,-0.9,-0.8\n1,0.7,0.6,-0.9,-0.8\n";
        match parse_bounds_csv(inverted.as_bytes(), "b.csv", 1.0) {
            Err(Error::Parse { row, msg, .. }) => {
                assert_eq!(row, 3);
                assert!(msg.contains("above upper"), "{msg}");
            }
            other => panic!("unexpected {other:?}"),
        }
        let positive = "k,wd_min_1,wd_max_1\n0,-0.9,0.1\n";
        match parse_bounds_csv(positive.as_bytes(), "b.csv", 1.0) {
            Err(Error::Parse { row: 2, msg, .. }) => assert!(msg.contains("positive")),
            other => panic!("unexpected {other:?}"),
        }
        let bad_header = "k,wd_max_1,wd_min_1\n0,-0.8,-0.9\n";
        assert!(parse_bounds_csv(bad_header.as_bytes(), "b.csv", 1.0).is_err());
        let short = "k,wd_min_1,wd_max_1\n0,-0.9\n";
        assert!(parse_bounds_csv(short.as_bytes(), "b.csv", 1.0).is_err());
    }

    #[test]
    fn bounds_csv_round_trip() {
        let b = synth_profiles(7, 1, &case_study());
        let mut buf = Vec::new();
        write_bounds_csv(&b, &mut buf).unwrap();
        let back = parse_bounds_csv(buf.as_slice(), "mem", b.step_hours).unwrap();
        assert_eq!(back, b);
    }

    #[test]
    fn resample_hourly_to_quarter_hour() {
        let b = day1_load();
        let r = b.resample(0.25).unwrap();
        assert_eq!(r.len(), 97);
        assert_eq!(r.lower[0], b.lower[0]);
        assert_eq!(r.lower[4], b.lower[1]);
        assert_eq!(r.upper[96], b.upper[24]);
        let expected = b.lower[0].w_d[0] + 0.5 * (b.lower[1].w_d[0] - b.lower[0].w_d[0]);
        assert!((r.lower[2].w_d[0] - expected).abs() < 1e-15);
    }

    #[test]
    fn degenerate_bounds_have_one_extreme() {
        let traj = vec![sample(0.3, -0.5), sample(0.2, -0.4)];
        let b = ForecastBounds::degenerate(0.25, &traj).unwrap();
        assert_eq!(extreme_set(&b), vec![traj]);
        assert_eq!(alpha_grid(&b, 10).len(), 1);
    }

    #[test]
    fn alpha_grid_includes_extremes() {
        let b = ForecastBounds::new(
            0.25,
            vec![sample(0.0, -0.9)],
            vec![sample(1.0, -0.5)],
        )
        .unwrap();
        let g = alpha_grid(&b, 4);
        assert_eq!(g.len(), 5);
        assert_eq!(g[0], b.lower);
        assert_eq!(g[4], b.upper);
        assert!((g[2][0].w_r[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn window_bounds_checked() {
        let b = day1_load();
        let w = b.window(20, 5).unwrap();
        assert_eq!(w.len(), 5);
        assert_eq!(w.lower[0], b.lower[20]);
        assert!(b.window(21, 5).is_err());
    }

    #[test]
    fn synthetic_profiles_are_deterministic_and_operable() {
        let p = case_study();
        let a = synth_profiles(42, 2, &p);
        let b = synth_profiles(42, 2, &p);
        assert_eq!(a, b);
        assert_ne!(a, synth_profiles(43, 2, &p));
        assert_eq!(a.len(), 2 * 96);
        for (k, (lo, hi)) in a.lower.iter().zip(&a.upper).enumerate() {
            for s in [lo, hi] {
                let mag = s.demand();
                assert!((0.2..=1.0).contains(&mag), "step {k}: load {mag}");
            }
            let hour = (k % 96) as f64 * 0.25;
            if !(6.0..20.0).contains(&hour) {
                assert_eq!(hi.w_r[1], 0.0, "PV at {hour}h");
            }
            assert!(hi.w_r[0] <= 1.2 && hi.w_r[1] <= 0.55);
        }
    }

    #[test]
    fn interpolation_is_monotone_in_alpha() {
        let b = synth_profiles(3, 1, &case_study());
        let alphas = scenario_alphas();
        let trajs: Vec<_> = alphas.iter().map(|&a| interpolate(&b, a).unwrap()).collect();
        for pair in trajs.windows(2) {
            for (x, y) in pair[0].iter().zip(&pair[1]) {
                for (a, c) in x.w_r.iter().zip(&y.w_r).chain(x.w_d.iter().zip(&y.w_d)) {
                    assert!(a <= c);
                }
            }
        }
    }
}
