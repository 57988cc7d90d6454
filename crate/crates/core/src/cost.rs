//! Operating cost: fuel, fixed on-cost and switching for thermal units plus a
//! linear storage term. Renewables carry no cost.

use serde::{Deserialize, Serialize};

use crate::dispatch::Dispatch;
use crate::error::{Error, Result};
use crate::model::FleetParams;
use crate::scenario::SimLog;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostWeights {
    pub c_fuel: Vec<f64>,
    pub c_on: Vec<f64>,
    pub c_sw: Vec<f64>,
    pub c_st: Vec<f64>,
}

impl CostWeights {
    pub fn from_params(params: &FleetParams) -> Self {
        Self {
            c_fuel: params.thermal.iter().map(|t| t.c_fuel).collect(),
            c_on: params.thermal.iter().map(|t| t.c_on).collect(),
            c_sw: params.thermal.iter().map(|t| t.c_sw).collect(),
            c_st: params.storage.iter().map(|s| s.c_st).collect(),
        }
    }

    pub fn n_t(&self) -> usize {
        self.c_fuel.len()
    }

    pub fn n_s(&self) -> usize {
        self.c_st.len()
    }

    fn check(&self, n_t: usize, n_s: usize) -> Result<()> {
        let thermal_ok = [&self.c_fuel, &self.c_on, &self.c_sw]
            .iter()
            .all(|v| v.len() == n_t);
        if !thermal_ok || self.c_st.len() != n_s {
            return Err(Error::InvalidArgument(format!(
                "weights cover {} thermal / {} storage units, expected {n_t} / {n_s}",
                self.c_fuel.len(),
                self.c_st.len()
            )));
        }
        Ok(())
    }
}

/// Unchecked stage cost; all slices must match the weight dimensions.
///
/// The accumulation order is fixed so that every caller summing the same
/// stage obtains bit-identical results.
#[inline]
pub(crate) fn stage_cost_raw(
    p_t: &[f64],
    p_s: &[f64],
    delta: &[bool],
    delta_prev: &[bool],
    w: &CostWeights,
) -> f64 {
    let mut cost = 0.0;
    for i in 0..w.c_fuel.len() {
        cost += w.c_fuel[i] * p_t[i];
    }
    for i in 0..w.c_on.len() {
        if delta[i] {
            cost += w.c_on[i];
        }
    }
    for i in 0..w.c_sw.len() {
        if delta[i] != delta_prev[i] {
            cost += w.c_sw[i];
        }
    }
    for i in 0..w.c_st.len() {
        cost += w.c_st[i] * p_s[i];
    }
    cost
}

/// Stage cost of one dispatched step. Negative when storage charging
/// outweighs the thermal terms.
pub fn stage_cost(
    dispatch: &Dispatch,
    delta: &[bool],
    delta_prev: &[bool],
    w: &CostWeights,
) -> Result<f64> {
    w.check(dispatch.p_t.len(), dispatch.p_s.len())?;
    if delta.len() != w.n_t() || delta_prev.len() != w.n_t() {
        return Err(Error::InvalidArgument(format!(
            "commitment vectors have {} and {} entries for {} thermal units",
            delta.len(),
            delta_prev.len(),
            w.n_t()
        )));
    }
    Ok(stage_cost_raw(
        &dispatch.p_t,
        &dispatch.p_s,
        delta,
        delta_prev,
        w,
    ))
}

/// Sum of stage costs over a predicted trajectory starting from `delta_0`.
pub fn horizon_cost(
    trajectory: &[(Dispatch, Vec<bool>)],
    delta_0: &[bool],
    w: &CostWeights,
) -> Result<f64> {
    if trajectory.is_empty() {
        return Err(Error::InvalidArgument("empty trajectory".into()));
    }
    let mut prev = delta_0;
    let mut total = 0.0;
    for (dispatch, delta) in trajectory {
        total += stage_cost(dispatch, delta, prev, w)?;
        prev = delta;
    }
    Ok(total)
}

/// Total cost of a simulated run.
pub fn closed_loop_cost(log: &SimLog, w: &CostWeights) -> f64 {
    log.stage_costs(w).iter().sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispatch::{Saturation, UnitSaturation};
    use crate::model::fixtures::case_study;

    fn dispatch(p_t: f64, p_s: f64) -> Dispatch {
        Dispatch {
            p_t: vec![p_t],
            p_s: vec![p_s],
            p_r: vec![0.0, 0.0],
            rho: 0.0,
            saturated: UnitSaturation {
                thermal: vec![Saturation::Interior],
                storage: vec![Saturation::Interior],
                renewable: vec![Saturation::Lower; 2],
            },
            residual: 0.0,
        }
    }

    fn weights() -> CostWeights {
        CostWeights::from_params(&case_study())
    }

    #[test]
    fn stage_cost_examples() {
        let w = weights();
        let c = stage_cost(&dispatch(0.2, 0.3), &[true], &[false], &w).unwrap();
        assert!((c - 0.97).abs() < 1e-12);
        assert_eq!(stage_cost(&dispatch(0.0, 0.0), &[false], &[false], &w).unwrap(), 0.0);
        let c = stage_cost(&dispatch(0.0, -0.5), &[false], &[false], &w).unwrap();
        assert!((c + 0.45).abs() < 1e-12);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let w = weights();
        assert!(stage_cost(&dispatch(0.2, 0.3), &[true, true], &[false], &w).is_err());
        let mut short = w.clone();
        short.c_st.clear();
        assert!(stage_cost(&dispatch(0.2, 0.3), &[true], &[false], &short).is_err());
    }

    #[test]
    fn horizon_cost_examples() {
        let w = weights();
        let step = (dispatch(0.2, 0.3), vec![true]);
        let one = horizon_cost(std::slice::from_ref(&step), &[false], &w).unwrap();
        assert_eq!(one, stage_cost(&step.0, &[true], &[false], &w).unwrap());

        // Switching counted once, at the first step.
        let two = horizon_cost(&[step.clone(), step.clone()], &[false], &w).unwrap();
        let per_step = 1.0 * 0.2 + 0.2 + 0.9 * 0.3;
        assert!((two - (2.0 * per_step + 0.3)).abs() < 1e-12);

        // 0 -> 1 -> 0 pays two switches.
        let toggle = [(dispatch(0.2, 0.0), vec![true]), (dispatch(0.0, 0.0), vec![false])];
        let c = horizon_cost(&toggle, &[false], &w).unwrap();
        assert!((c - (0.2 + 0.2 + 2.0 * 0.3)).abs() < 1e-12);

        assert!(horizon_cost(&[], &[false], &w).is_err());
    }

    #[test]
    fn cost_is_linear_in_power() {
        let w = weights();
        let base = stage_cost(&dispatch(0.4, -0.2), &[false], &[false], &w).unwrap();
        let scaled = stage_cost(&dispatch(1.2, -0.6), &[false], &[false], &w).unwrap();
        assert!((scaled - 3.0 * base).abs() < 1e-12);
    }
}
