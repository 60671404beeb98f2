//! Deterministic desk-scale simulators `sim(x0, u, p, T) -> trace`.

mod ctrv;
mod input;
mod perception;
mod two_car;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use ctrv::{ctrv_min_future_distance, ctrv_predict, CtrvState};
pub use input::{interpolate_input, InputSignal, InputTrace, Interpolation};
pub use perception::{
    simulate_perception_scenario, speed_scale_channel, EgoSpec, FaultKind, FaultWindow, ObjectSpec,
    PerceptionInit, PerceptionParams, SensorKind, SensorSpec, COMBINED, SENSOR_TAGS,
};
pub use two_car::{
    acc_command, ego_acc_controller, simulate_two_car, simulate_two_car_with, two_car_space,
    AccParams, TwoCarState, TWO_CAR_DT,
};

use crate::trace::{SignalSpace, Trace};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScenarioError {
    #[error("end time must be positive and finite, got {0}")]
    Duration(f64),
    #[error("input `{channel}` is not defined at t = {t}")]
    InputTime { channel: String, t: f64 },
    #[error("missing input `{0}`")]
    MissingInput(String),
    #[error("input `{channel}`: {message}")]
    InvalidInput { channel: String, message: String },
    #[error("invalid initial state: {0}")]
    InvalidState(String),
    #[error("object `{0}` overlaps the ego vehicle at t = 0")]
    Overlap(String),
    #[error("{sensor} fault window [{start}, {end}) is outside [0, {duration}]")]
    FaultWindow {
        sensor: String,
        start: f64,
        end: f64,
        duration: f64,
    },
    #[error("unknown sensor `{0}`")]
    UnknownSensor(String),
    #[error("scenario has no variable `{0}`")]
    UnknownVariable(String),
}

/// Values chosen by a search for one simulation: named scalars plus whole
/// input signals.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct Assignment {
    pub scalars: BTreeMap<String, f64>,
    pub signals: BTreeMap<String, InputSignal>,
}

impl Assignment {
    pub fn scalar(mut self, name: impl Into<String>, v: f64) -> Self {
        self.scalars.insert(name.into(), v);
        self
    }

    pub fn signal(mut self, name: impl Into<String>, s: InputSignal) -> Self {
        self.signals.insert(name.into(), s);
        self
    }
}

/// A simulator with named variables that a search can set.
pub trait Scenario: Sync {
    fn space(&self) -> SignalSpace;
    fn simulate(&self, a: &Assignment) -> Result<Trace, ScenarioError>;
}

/// Two-car scenario. Scalars `z_ego0`, `v_ego0`, `z_agent0`, `v_agent0`
/// override the initial state; `xi` and `mu` may be scalars (constant
/// inputs) or signals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoCarScenario {
    pub x0: TwoCarState,
    pub duration: f64,
    #[serde(default)]
    pub acc: Option<AccParams>,
}

impl TwoCarScenario {
    pub fn new(x0: TwoCarState, duration: f64) -> Self {
        Self {
            x0,
            duration,
            acc: None,
        }
    }
}

impl Scenario for TwoCarScenario {
    fn space(&self) -> SignalSpace {
        two_car_space()
    }

    fn simulate(&self, a: &Assignment) -> Result<Trace, ScenarioError> {
        let mut x0 = self.x0;
        let mut u = InputTrace::new()
            .with("xi", InputSignal::constant(0.0))
            .with("mu", InputSignal::constant(1.0));
        for (name, &v) in &a.scalars {
            match name.as_str() {
                "z_ego0" => x0.z_ego = v,
                "v_ego0" => x0.v_ego = v,
                "z_agent0" => x0.z_agent = v,
                "v_agent0" => x0.v_agent = v,
                "xi" | "mu" => {
                    u.signals.insert(name.clone(), InputSignal::constant(v));
                }
                _ => return Err(ScenarioError::UnknownVariable(name.clone())),
            }
        }
        for (name, s) in &a.signals {
            if name != "xi" && name != "mu" {
                return Err(ScenarioError::UnknownVariable(name.clone()));
            }
            let mut s = s.clone();
            if name == "mu" {
                s.interpolation = Interpolation::Hold;
            }
            u.signals.insert(name.clone(), s);
        }
        let acc = self.acc.unwrap_or_default();
        simulate_two_car_with(x0, &u, self.duration, &acc, TWO_CAR_DT)
    }
}

/// Perception-fault scenario. Scalars: `ego_speed`, `<id>_x`, `<id>_y`,
/// `<id>_speed`, `fault<k>_start`, `fault<k>_duration`,
/// `fault<k>_magnitude`; signals: `speed_scale_<id>`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerceptionScenario {
    pub init: PerceptionInit,
    #[serde(default)]
    pub params: PerceptionParams,
    pub duration: f64,
}

impl PerceptionScenario {
    fn bind(&self, a: &Assignment) -> Result<(PerceptionInit, PerceptionParams), ScenarioError> {
        let mut init = self.init.clone();
        let mut p = self.params.clone();
        for (name, &v) in &a.scalars {
            if name == "ego_speed" {
                init.ego.speed = v;
                continue;
            }
            if let Some(rest) = name.strip_prefix("fault") {
                if let Some((k, field)) = rest.split_once('_') {
                    if let Some(f) = k.parse::<usize>().ok().and_then(|k| p.faults.get_mut(k)) {
                        match (field, &mut f.kind) {
                            ("start", _) => f.start = v,
                            ("duration", _) => f.duration = v,
                            ("magnitude", FaultKind::ErrorSpike { magnitude }) => *magnitude = v,
                            _ => return Err(ScenarioError::UnknownVariable(name.clone())),
                        }
                        continue;
                    }
                }
            }
            let target = init.objects.iter_mut().find_map(|o| {
                let field = name.strip_prefix(o.id.as_str())?.strip_prefix('_')?;
                Some((o, field.to_owned()))
            });
            match target {
                Some((o, f)) if f == "x" => o.x = v,
                Some((o, f)) if f == "y" => o.y = v,
                Some((o, f)) if f == "speed" => o.speed = v,
                _ => return Err(ScenarioError::UnknownVariable(name.clone())),
            }
        }
        Ok((init, p))
    }
}

impl Scenario for PerceptionScenario {
    fn space(&self) -> SignalSpace {
        // Channel names do not depend on the assignment.
        let u = InputTrace::new();
        simulate_perception_scenario(&self.init, &u, &self.params, self.duration)
            .map(|t| t.space)
            .unwrap_or_default()
    }

    fn simulate(&self, a: &Assignment) -> Result<Trace, ScenarioError> {
        let (init, p) = self.bind(a)?;
        let u = InputTrace {
            signals: a.signals.clone(),
        };
        simulate_perception_scenario(&init, &u, &p, self.duration)
    }
}

/// Scenario selection for configuration files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScenarioConfig {
    TwoCar(TwoCarScenario),
    Perception(PerceptionScenario),
}

impl ScenarioConfig {
    pub fn duration(&self) -> f64 {
        match self {
            ScenarioConfig::TwoCar(s) => s.duration,
            ScenarioConfig::Perception(s) => s.duration,
        }
    }
}

impl Scenario for ScenarioConfig {
    fn space(&self) -> SignalSpace {
        match self {
            ScenarioConfig::TwoCar(s) => s.space(),
            ScenarioConfig::Perception(s) => s.space(),
        }
    }

    fn simulate(&self, a: &Assignment) -> Result<Trace, ScenarioError> {
        match self {
            ScenarioConfig::TwoCar(s) => s.simulate(a),
            ScenarioConfig::Perception(s) => s.simulate(a),
        }
    }
}
