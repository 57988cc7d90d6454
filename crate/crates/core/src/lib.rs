//! Operation control for islanded microgrids with saturating droop control.
//!
//! The crate is organised bottom-up:
//!
//! - [`model`]: unit parameters, the saturation operator and the
//!   state-dependent storage power limits.
//! - [`dispatch`]: steady-state power balance. Given setpoints and a
//!   disturbance, finds the balancing variable `rho` and the realized unit
//!   powers.
//! - [`setpoint`]: constant prioritizing setpoints and the operability checks
//!   that make them optimal.
//! - [`cost`]: stage, horizon and closed-loop operating cost.
//! - [`scenario`]: interval forecasts, scenario interpolation, CSV IO and a
//!   seeded synthetic profile generator.
//! - [`ems`]: robust unit-commitment MPC, the prescient baseline, receding
//!   horizon simulation and a small-scale regret oracle.
//! - [`config`]: the `fleet.json` configuration file.

pub mod config;
pub mod cost;
pub mod dispatch;
pub mod ems;
pub mod error;
pub mod model;
pub mod scenario;
pub mod setpoint;

pub use config::{FleetConfig, SetpointLimits};
pub use cost::CostWeights;
pub use dispatch::{Dispatch, Saturation};
pub use error::{Error, Result};
pub use model::{
    DisturbanceSample, FleetParams, GridState, RenewableKind, RenewableUnit, Setpoints,
    StorageUnit, ThermalUnit,
};
pub use scenario::{ForecastBounds, SimLog};
