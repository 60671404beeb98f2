//! Ego vehicle with an adaptive cruise controller following an adversarial
//! agent on a single lane.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::input::{interpolate_input, InputTrace};
use super::ScenarioError;
use crate::trace::{Sample, SignalSpace, Trace};

pub const TWO_CAR_DT: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoCarState {
    pub z_ego: f64,
    pub v_ego: f64,
    pub z_agent: f64,
    pub v_agent: f64,
}

impl TwoCarState {
    pub fn gap(&self) -> f64 {
        self.z_agent - self.z_ego
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AccParams {
    pub standstill_gap: f64,
    pub time_gap: f64,
    pub kp: f64,
    pub kd: f64,
    pub min_acc: f64,
    pub max_acc: f64,
    pub emergency_gap: f64,
}

impl Default for AccParams {
    fn default() -> Self {
        Self {
            standstill_gap: 5.0,
            time_gap: 1.2,
            kp: 0.3,
            kd: 0.8,
            min_acc: -6.0,
            max_acc: 3.0,
            emergency_gap: 2.0,
        }
    }
}

/// PD law on the gap error with the default gains.
pub fn ego_acc_controller(state: &TwoCarState) -> f64 {
    acc_command(state, &AccParams::default())
}

pub fn acc_command(s: &TwoCarState, p: &AccParams) -> f64 {
    let gap = s.gap();
    if gap < p.emergency_gap {
        return p.min_acc;
    }
    let desired = p.standstill_gap + p.time_gap * s.v_ego;
    let a = p.kp * (gap - desired) + p.kd * (s.v_agent - s.v_ego);
    a.clamp(p.min_acc, p.max_acc)
}

pub fn two_car_space() -> SignalSpace {
    SignalSpace::new(["z_ego", "z_agent", "v_ego", "v_agent"], ["xi", "mu"], [])
}

/// Sample times `0, dt, 2dt, ...` ending exactly at `duration`.
pub(crate) fn time_grid(duration: f64, dt: f64) -> Vec<f64> {
    let n = (duration / dt - 1e-9).ceil().max(1.0) as usize;
    (0..=n)
        .map(|k| if k == n { duration } else { k as f64 * dt })
        .collect()
}

/// `dt` except for a shorter final step.
pub(crate) fn step_length(t: f64, next: f64, dt: f64) -> f64 {
    if next - t < dt - 1e-9 {
        next - t
    } else {
        dt
    }
}

/// Forward-Euler simulation with the default controller. `u` must provide
/// `xi` (agent acceleration, within [-1, 1]) and `mu` (agent speed factor,
/// 1 or 2).
pub fn simulate_two_car(
    x0: TwoCarState,
    u: &InputTrace,
    duration: f64,
) -> Result<Trace, ScenarioError> {
    simulate_two_car_with(x0, u, duration, &AccParams::default(), TWO_CAR_DT)
}

pub fn simulate_two_car_with(
    x0: TwoCarState,
    u: &InputTrace,
    duration: f64,
    acc: &AccParams,
    dt: f64,
) -> Result<Trace, ScenarioError> {
    if !(duration > 0.0 && duration.is_finite()) {
        return Err(ScenarioError::Duration(duration));
    }
    if x0.gap() <= 0.0 || x0.v_ego < 0.0 || x0.v_agent < 0.0 {
        return Err(ScenarioError::InvalidState(format!(
            "need z_agent > z_ego and non-negative speeds, got {x0:?}"
        )));
    }
    u.validate(duration)?;
    for (name, lo, hi) in [("xi", -1.0, 1.0), ("mu", 1.0, 2.0)] {
        let s = u
            .signals
            .get(name)
            .ok_or_else(|| ScenarioError::MissingInput(name.to_owned()))?;
        if s.values().any(|v| v < lo || v > hi) {
            return Err(ScenarioError::InvalidInput {
                channel: name.to_owned(),
                message: format!("values must lie in [{lo}, {hi}]"),
            });
        }
    }
    if u.signals["mu"].values().any(|v| v != 1.0 && v != 2.0) {
        return Err(ScenarioError::InvalidInput {
            channel: "mu".into(),
            message: "values must be 1 or 2".into(),
        });
    }

    let times = time_grid(duration, dt);
    let mut s = x0;
    let mut samples = Vec::with_capacity(times.len());
    for (k, &t) in times.iter().enumerate() {
        let xi = interpolate_input(u, t, "xi")?;
        let mu = interpolate_input(u, t, "mu")?;
        samples.push(Sample {
            time: t,
            values: vec![s.z_ego, s.z_agent, s.v_ego, s.v_agent, xi, mu],
        });
        let Some(&next) = times.get(k + 1) else { break };
        let h = step_length(t, next, dt);
        let a = acc_command(&s, acc);
        s.z_ego += s.v_ego * h;
        s.v_ego = (s.v_ego + a * h).max(0.0);
        s.z_agent += mu * s.v_agent * h;
        s.v_agent = (s.v_agent + xi * h).max(0.0);
    }
    Ok(Trace::new(two_car_space(), samples, BTreeMap::new()))
}
