//! `fleet.json`: unit parameters plus setpoint limits and initial state.
//!
//! ```json
//! {
//!   "thermal":   [{"p_min": 0.2, "p_max": 1, "chi": 1, "c_fuel": 1, "c_on": 0.2, "c_sw": 0.3}],
//!   "storage":   [{"p_min": -1, "p_max": 1, "chi": 1, "x_min": 0, "x_max": 6, "c_st": 0.9}],
//!   "renewable": [{"p_min": 0, "chi": 1, "p_rated": 1.2, "kind": "wind"}],
//!   "n_loads": 1,
//!   "ts_hours": 0.25,
//!   "u_min": -5,
//!   "u_max": 5,
//!   "x0": [2],
//!   "delta0": [0]
//! }
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    FleetParams, GridState, RenewableKind, RenewableUnit, StorageUnit, ThermalUnit,
};

/// Setpoint limits shared by every unit. They only need to be wide enough
/// for the prioritizing setpoints; they may exceed the physical limits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SetpointLimits {
    pub u_min: f64,
    pub u_max: f64,
}

impl Default for SetpointLimits {
    fn default() -> Self {
        Self {
            u_min: -5.0,
            u_max: 5.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FleetConfig {
    #[serde(flatten)]
    pub params: FleetParams,
    #[serde(flatten, default)]
    pub limits: SetpointLimits,
    /// Initial storage energies; defaults to the middle of each range.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
    #[serde(
        default,
        skip_serializing_if = "Option::is_none",
        with = "opt_bits"
    )]
    pub delta0: Option<Vec<bool>>,
}

mod opt_bits {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Wrap(#[serde(with = "crate::model::bits")] Vec<bool>);

    pub fn serialize<S: Serializer>(v: &Option<Vec<bool>>, s: S) -> Result<S::Ok, S::Error> {
        v.as_ref().map(|v| Wrap(v.clone())).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<bool>>, D::Error> {
        Ok(Option::<Wrap>::deserialize(d)?.map(|w| w.0))
    }
}

impl FleetConfig {
    /// One diesel unit, one battery, a wind turbine and a PV plant, with the
    /// cost weights of the reference study and a 15-minute sampling time.
    pub fn case_study() -> Self {
        Self {
            params: FleetParams {
                thermal: vec![ThermalUnit {
                    p_min: 0.2,
                    p_max: 1.0,
                    chi: 1.0,
                    c_fuel: 1.0,
                    c_on: 0.2,
                    c_sw: 0.3,
                }],
                storage: vec![StorageUnit {
                    p_min: -1.0,
                    p_max: 1.0,
                    chi: 1.0,
                    x_min: 0.0,
                    x_max: 6.0,
                    c_st: 0.9,
                }],
                renewable: vec![
                    RenewableUnit {
                        p_min: 0.0,
                        chi: 1.0,
                        p_rated: Some(1.2),
                        kind: RenewableKind::Wind,
                    },
                    RenewableUnit {
                        p_min: 0.0,
                        chi: 1.0,
                        p_rated: Some(0.55),
                        kind: RenewableKind::Pv,
                    },
                ],
                n_loads: 1,
                ts: 0.25,
            },
            limits: SetpointLimits::default(),
            x0: Some(vec![2.0]),
            delta0: Some(vec![false]),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.params.ensure_valid()?;
        if !(self.limits.u_min < self.limits.u_max) {
            return Err(Error::Config(format!(
                "u_min ({}) must be below u_max ({})",
                self.limits.u_min, self.limits.u_max
            )));
        }
        self.initial_state().check(&self.params)
    }

    pub fn initial_state(&self) -> GridState {
        let x = self.x0.clone().unwrap_or_else(|| {
            self.params
                .storage
                .iter()
                .map(|s| 0.5 * (s.x_min + s.x_max))
                .collect()
        });
        let delta = self
            .delta0
            .clone()
            .unwrap_or_else(|| vec![false; self.params.n_t()]);
        GridState::new(x, delta)
    }
}
