//! Browser demo: droop curves of the reference fleet, the balance point for
//! a chosen operating condition, and the day-1 load scenario band.
//!
//! The computations live in [`Demo`] and return plain serializable records
//! so they can be tested natively; the `wasm_bindgen` wrappers only turn
//! them into JSON strings for the page.

use mg_opcon::dispatch::{feasible_range, powers_at, step};
use mg_opcon::scenario::{day1_load, interpolate};
use mg_opcon::setpoint::{constant_setpoints, resolve_rated};
use mg_opcon::{Dispatch, DisturbanceSample, FleetConfig, FleetParams, GridState, Result, Setpoints};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Operating condition picked on the page.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Condition {
    /// Stored energy of the single storage unit.
    pub x: f64,
    pub wind: f64,
    pub pv: f64,
    /// Load, as a positive number.
    pub load: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Curve {
    pub name: String,
    pub power: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DroopCurves {
    pub rho: Vec<f64>,
    pub units: Vec<Curve>,
    pub total: Vec<f64>,
    pub load: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BalancePoint {
    pub dispatch: Dispatch,
    pub next_x: f64,
    /// Load range that the fleet can balance at this condition.
    pub feasible: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LoadProfile {
    pub hour: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub scenario: Vec<f64>,
}

pub struct Demo {
    params: FleetParams,
    u: Setpoints,
}

impl Default for Demo {
    fn default() -> Self {
        let cfg = FleetConfig::case_study();
        let rated = resolve_rated(&cfg.params, None).expect("reference fleet has rated powers");
        let u = constant_setpoints(&cfg.params, &rated, &cfg.limits)
            .expect("reference fleet has valid setpoints");
        Self { params: cfg.params, u }
    }
}

impl Demo {
    pub fn setpoints(&self) -> &Setpoints {
        &self.u
    }

    fn sample(&self, c: &Condition) -> (DisturbanceSample, GridState) {
        let w = DisturbanceSample {
            w_r: vec![c.wind, c.pv],
            w_d: vec![-c.load],
        };
        (w, GridState::new(vec![c.x], vec![true]))
    }

    /// Unit powers and their sum over `samples` values of `rho` in
    /// `[rho_min, rho_max]`.
    pub fn droop_curves(
        &self,
        c: &Condition,
        rho_min: f64,
        rho_max: f64,
        samples: usize,
    ) -> Result<DroopCurves> {
        if samples < 2 || !(rho_min < rho_max) {
            return Err(mg_opcon::Error::InvalidArgument(
                "need at least two samples on a nonempty rho range".into(),
            ));
        }
        let (w, state) = self.sample(c);
        let names = ["thermal", "storage", "wind", "pv"];
        let mut units: Vec<Curve> = names
            .iter()
            .map(|n| Curve {
                name: n.to_string(),
                power: Vec::with_capacity(samples),
            })
            .collect();
        let mut rho = Vec::with_capacity(samples);
        let mut total = Vec::with_capacity(samples);
        for i in 0..samples {
            let r = rho_min + (rho_max - rho_min) * i as f64 / (samples - 1) as f64;
            let d = powers_at(r, &self.u, &w, &state, &self.params)?;
            let p: Vec<f64> = d.p_t.iter().chain(&d.p_s).chain(&d.p_r).copied().collect();
            for (curve, v) in units.iter_mut().zip(&p) {
                curve.power.push(*v);
            }
            total.push(p.iter().sum());
            rho.push(r);
        }
        Ok(DroopCurves {
            rho,
            units,
            total,
            load: c.load,
        })
    }

    /// Balance the fleet at the given condition and advance the storage.
    pub fn dispatch_at(&self, c: &Condition) -> Result<BalancePoint> {
        let (w, state) = self.sample(c);
        let feasible = feasible_range(&self.u, &w, &state, &self.params)?;
        let (dispatch, next) = step(&state, &self.u, &w, &self.params)?;
        Ok(BalancePoint {
            dispatch,
            next_x: next.x[0],
            feasible,
        })
    }

    /// Day-1 load band and the scenario `alpha` between its bounds, as
    /// positive loads.
    pub fn scenario_profile(&self, alpha: f64) -> Result<LoadProfile> {
        let b = day1_load();
        let traj = interpolate(&b, alpha)?;
        let load = |s: &DisturbanceSample| -s.w_d[0];
        Ok(LoadProfile {
            hour: (0..b.len()).map(|k| k as f64 * b.step_hours).collect(),
            // The load magnitude bounds swap with the sign.
            lower: b.upper.iter().map(load).collect(),
            upper: b.lower.iter().map(load).collect(),
            scenario: traj.iter().map(load).collect(),
        })
    }
}

fn to_js<T: Serialize>(r: Result<T>) -> std::result::Result<String, JsError> {
    let v = r.map_err(|e| JsError::new(&e.to_string()))?;
    serde_json::to_string(&v).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen(js_name = Demo)]
pub struct JsDemo(Demo);

#[wasm_bindgen(js_class = Demo)]
impl JsDemo {
    #[wasm_bindgen(constructor)]
    pub fn new() -> JsDemo {
        JsDemo(Demo::default())
    }

    pub fn setpoints(&self) -> std::result::Result<String, JsError> {
        to_js(Ok(self.0.setpoints()))
    }

    #[wasm_bindgen(js_name = droopCurves)]
    #[allow(clippy::too_many_arguments)]
    pub fn droop_curves(
        &self,
        x: f64,
        wind: f64,
        pv: f64,
        load: f64,
        rho_min: f64,
        rho_max: f64,
        samples: usize,
    ) -> std::result::Result<String, JsError> {
        let c = Condition { x, wind, pv, load };
        to_js(self.0.droop_curves(&c, rho_min, rho_max, samples))
    }

    #[wasm_bindgen(js_name = dispatchAt)]
    pub fn dispatch_at(
        &self,
        x: f64,
        wind: f64,
        pv: f64,
        load: f64,
    ) -> std::result::Result<String, JsError> {
        to_js(self.0.dispatch_at(&Condition { x, wind, pv, load }))
    }

    #[wasm_bindgen(js_name = scenarioProfile)]
    pub fn scenario_profile(&self, alpha: f64) -> std::result::Result<String, JsError> {
        to_js(self.0.scenario_profile(alpha))
    }
}

impl Default for JsDemo {
    fn default() -> Self {
        Self::new()
    }
}
