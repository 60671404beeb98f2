//! Abstract perception scenario: an ego vehicle driving along +x past
//! objects on straight (or constant-turn) paths, observed by range/bearing
//! sensors whose detections can be dropped or corrupted in fault windows.
//!
//! Each sample exposes, per object `i` and sensor `s`, the channels
//! `W_i_s`, `D_i_s` (Boolean, +1/-1) and `E_i_s` (meters), the sensor tag
//! `combined` fusing all sensors, and `dist_i` (center distance minus both
//! radii). The ego channels are `x_ego`, `v_ego`, `br`, `B`, `FC` and
//! `dfmin`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::ctrv::{ctrv_min_future_distance, CtrvState};
use super::input::InputTrace;
use super::two_car::{step_length, time_grid};
use super::ScenarioError;
use crate::trace::{ChannelKind, Sample, SignalSpace, Trace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SensorKind {
    Ccd,
    Lidar,
    Radar,
}

impl SensorKind {
    pub fn tag(self) -> &'static str {
        match self {
            SensorKind::Ccd => "ccd",
            SensorKind::Lidar => "lidar",
            SensorKind::Radar => "radar",
        }
    }
}

impl fmt::Display for SensorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Tag of the fused pseudo-sensor.
pub const COMBINED: &str = "combined";

/// Every sensor tag a channel name may carry.
pub const SENSOR_TAGS: [&str; 4] = ["ccd", "lidar", "radar", COMBINED];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensorSpec {
    pub kind: SensorKind,
    #[serde(default = "default_range")]
    pub range: f64,
    #[serde(default = "default_half_angle")]
    pub half_angle_deg: f64,
}

fn default_range() -> f64 {
    60.0
}

fn default_half_angle() -> f64 {
    60.0
}

impl SensorSpec {
    pub fn new(kind: SensorKind) -> Self {
        Self {
            kind,
            range: default_range(),
            half_angle_deg: default_half_angle(),
        }
    }

    /// Range and bearing test from the ego center, heading along +x.
    pub fn sees(&self, dx: f64, dy: f64) -> bool {
        dx.hypot(dy) <= self.range && dy.atan2(dx).abs() <= self.half_angle_deg.to_radians()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectSpec {
    pub id: String,
    pub x: f64,
    pub y: f64,
    /// Radians, 0 along +x.
    pub heading: f64,
    pub speed: f64,
    #[serde(default)]
    pub yaw_rate: f64,
    #[serde(default = "default_object_radius")]
    pub radius: f64,
}

fn default_object_radius() -> f64 {
    0.5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "fault", rename_all = "snake_case")]
pub enum FaultKind {
    Dropout,
    ErrorSpike { magnitude: f64 },
}

/// A fault active on `[start, start + duration)`, hitting every object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaultWindow {
    pub sensor: SensorKind,
    pub start: f64,
    pub duration: f64,
    #[serde(flatten)]
    pub kind: FaultKind,
}

impl FaultWindow {
    pub fn active(&self, t: f64) -> bool {
        t >= self.start && t < self.start + self.duration
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EgoSpec {
    pub speed: f64,
    #[serde(default = "default_ego_radius")]
    pub radius: f64,
}

fn default_ego_radius() -> f64 {
    1.0
}

/// Initial positions and motions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerceptionInit {
    pub ego: EgoSpec,
    pub objects: Vec<ObjectSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PerceptionParams {
    pub sensors: Vec<SensorSpec>,
    pub faults: Vec<FaultWindow>,
    pub dt: f64,
    pub baseline_error: f64,
    pub max_decel: f64,
    /// Predicted clearance below which a detected object is a threat.
    pub threat_margin: f64,
    /// Distance kept in front of a threat when stopping.
    pub stop_margin: f64,
    pub fc_threshold: f64,
    pub horizon: f64,
    pub predict_dt: f64,
}

impl Default for PerceptionParams {
    fn default() -> Self {
        Self {
            sensors: vec![
                SensorSpec::new(SensorKind::Ccd),
                SensorSpec::new(SensorKind::Lidar),
                SensorSpec::new(SensorKind::Radar),
            ],
            faults: Vec::new(),
            dt: 0.05,
            baseline_error: 0.1,
            max_decel: 8.0,
            threat_margin: 1.0,
            stop_margin: 1.0,
            fc_threshold: 0.5,
            horizon: 3.0,
            predict_dt: 0.1,
        }
    }
}

pub fn speed_scale_channel(id: &str) -> String {
    format!("speed_scale_{id}")
}

fn validate(
    init: &PerceptionInit,
    p: &PerceptionParams,
    u: &InputTrace,
    duration: f64,
) -> Result<(), ScenarioError> {
    if !(duration > 0.0 && duration.is_finite()) {
        return Err(ScenarioError::Duration(duration));
    }
    if !(p.dt > 0.0) || init.ego.speed < 0.0 {
        return Err(ScenarioError::InvalidState(
            "need dt > 0 and ego speed >= 0".into(),
        ));
    }
    let mut ids = std::collections::BTreeSet::new();
    for o in &init.objects {
        if !ids.insert(o.id.as_str()) || o.id.is_empty() {
            return Err(ScenarioError::InvalidState(format!(
                "object id `{}` empty or repeated",
                o.id
            )));
        }
        if o.speed < 0.0 || o.radius < 0.0 {
            return Err(ScenarioError::InvalidState(format!(
                "object `{}` has negative speed or radius",
                o.id
            )));
        }
        if o.x.hypot(o.y) - o.radius - init.ego.radius < 0.0 {
            return Err(ScenarioError::Overlap(o.id.clone()));
        }
    }
    for f in &p.faults {
        let end = f.start + f.duration;
        if !(f.start >= 0.0 && f.duration >= 0.0 && end <= duration + 1e-9) {
            return Err(ScenarioError::FaultWindow {
                sensor: f.sensor.tag().into(),
                start: f.start,
                end,
                duration,
            });
        }
        if !p.sensors.iter().any(|s| s.kind == f.sensor) {
            return Err(ScenarioError::UnknownSensor(f.sensor.tag().into()));
        }
        if let FaultKind::ErrorSpike { magnitude } = f.kind {
            if !(magnitude >= 0.0 && magnitude.is_finite()) {
                return Err(ScenarioError::InvalidState(
                    "error spike magnitude must be >= 0".into(),
                ));
            }
        }
    }
    u.validate(duration)?;
    for name in u.signals.keys() {
        let known = init
            .objects
            .iter()
            .any(|o| speed_scale_channel(&o.id) == *name);
        if !known {
            return Err(ScenarioError::InvalidInput {
                channel: name.clone(),
                message: "not a speed_scale_<object> channel".into(),
            });
        }
        if u.signals[name].values().any(|v| v < 0.0) {
            return Err(ScenarioError::InvalidInput {
                channel: name.clone(),
                message: "speed scale must be non-negative".into(),
            });
        }
    }
    Ok(())
}

fn space(init: &PerceptionInit, p: &PerceptionParams) -> SignalSpace {
    let mut outputs = vec!["x_ego".to_owned(), "v_ego".to_owned()];
    let mut boolean = Vec::new();
    let tags: Vec<&str> = p
        .sensors
        .iter()
        .map(|s| s.kind.tag())
        .chain(std::iter::once(COMBINED))
        .collect();
    for o in &init.objects {
        outputs.push(format!("x_{}", o.id));
        outputs.push(format!("y_{}", o.id));
        outputs.push(format!("dist_{}", o.id));
        for tag in &tags {
            for ch in ["W", "D"] {
                boolean.push(format!("{ch}_{}_{tag}", o.id));
                outputs.push(format!("{ch}_{}_{tag}", o.id));
            }
            outputs.push(format!("E_{}_{tag}", o.id));
        }
    }
    outputs.extend(["br", "B", "FC", "dfmin"].map(String::from));
    boolean.extend(["B", "FC"].map(String::from));
    let inputs: Vec<String> = init
        .objects
        .iter()
        .map(|o| speed_scale_channel(&o.id))
        .collect();
    let params: Vec<String> = fault_params(p).into_keys().collect();
    let mut space = SignalSpace::new(outputs, inputs, params);
    for b in boolean {
        space = space.with_kind(b, ChannelKind::Boolean);
    }
    space
}

fn fault_params(p: &PerceptionParams) -> BTreeMap<String, f64> {
    let mut out = BTreeMap::new();
    for (k, f) in p.faults.iter().enumerate() {
        out.insert(format!("fault{k}_start"), f.start);
        out.insert(format!("fault{k}_duration"), f.duration);
        if let FaultKind::ErrorSpike { magnitude } = f.kind {
            out.insert(format!("fault{k}_magnitude"), magnitude);
        }
    }
    out
}

fn boolean(b: bool) -> f64 {
    if b {
        1.0
    } else {
        -1.0
    }
}

struct Reading {
    visible: bool,
    detected: bool,
    error: f64,
}

pub fn simulate_perception_scenario(
    init: &PerceptionInit,
    u: &InputTrace,
    p: &PerceptionParams,
    duration: f64,
) -> Result<Trace, ScenarioError> {
    validate(init, p, u, duration)?;
    let times = time_grid(duration, p.dt);
    let r_ego = init.ego.radius;
    let mut x_ego = 0.0;
    let mut v_ego = init.ego.speed;
    let mut objects: Vec<CtrvState> = init
        .objects
        .iter()
        .map(|o| CtrvState {
            x: o.x,
            y: o.y,
            heading: o.heading,
            speed: o.speed,
            yaw_rate: o.yaw_rate,
        })
        .collect();
    let scale_at = |id: &str, t: f64| {
        u.signals
            .get(&speed_scale_channel(id))
            .map_or(Some(1.0), |s| s.at(t))
            .ok_or_else(|| ScenarioError::InputTime {
                channel: speed_scale_channel(id),
                t,
            })
    };

    let mut samples = Vec::with_capacity(times.len());
    for (k, &t) in times.iter().enumerate() {
        let ego = CtrvState::straight(x_ego, 0.0, 0.0, v_ego);
        let mut scaled = Vec::with_capacity(objects.len());
        for (o, spec) in objects.iter().zip(&init.objects) {
            scaled.push(CtrvState {
                speed: spec.speed * scale_at(&spec.id, t)?,
                ..*o
            });
        }

        let mut values = vec![x_ego, v_ego];
        let mut br: f64 = 0.0;
        let mut dfmin = f64::INFINITY;
        for (o, spec) in scaled.iter().zip(&init.objects) {
            let radii = r_ego + spec.radius;
            let (dx, dy) = (o.x - x_ego, o.y);
            values.extend([o.x, o.y, dx.hypot(dy) - radii]);

            let readings: Vec<Reading> = p
                .sensors
                .iter()
                .map(|s| {
                    let visible = s.sees(dx, dy);
                    let mut dropped = false;
                    let mut error = p.baseline_error;
                    for f in p
                        .faults
                        .iter()
                        .filter(|f| f.sensor == s.kind && f.active(t))
                    {
                        match f.kind {
                            FaultKind::Dropout => dropped = true,
                            FaultKind::ErrorSpike { magnitude } => error += magnitude,
                        }
                    }
                    Reading {
                        visible,
                        detected: visible && !dropped,
                        error,
                    }
                })
                .collect();
            let fused_error = readings
                .iter()
                .filter(|r| r.detected)
                .map(|r| r.error)
                .reduce(f64::min)
                .unwrap_or_else(|| {
                    readings
                        .iter()
                        .map(|r| r.error)
                        .fold(f64::INFINITY, f64::min)
                });
            let fused = Reading {
                visible: readings.iter().any(|r| r.visible),
                detected: readings.iter().any(|r| r.detected),
                error: if readings.is_empty() {
                    p.baseline_error
                } else {
                    fused_error
                },
            };
            for r in readings.iter().chain(std::iter::once(&fused)) {
                values.extend([boolean(r.visible), boolean(r.detected), r.error]);
            }

            // Ground-truth predicted clearance drives FC.
            let d = ctrv_min_future_distance(&ego, o, p.horizon, p.predict_dt) - radii;
            dfmin = dfmin.min(d);

            // Braking reacts to the fused estimate, displaced along the
            // lane by the localization error.
            if fused.detected {
                let est = CtrvState {
                    x: o.x + fused.error,
                    ..*o
                };
                let clearance =
                    ctrv_min_future_distance(&ego, &est, p.horizon, p.predict_dt) - radii;
                if clearance < p.threat_margin {
                    let gap = est.x - x_ego - radii;
                    let demand = if gap > 0.0 {
                        let room = (gap - p.stop_margin).max(0.1);
                        (v_ego * v_ego / (2.0 * room) / p.max_decel).min(1.0)
                    } else if est.x > x_ego {
                        1.0
                    } else {
                        0.0
                    };
                    br = br.max(demand);
                }
            }
        }
        let fc = dfmin < p.fc_threshold;
        values.extend([br, boolean(br > 0.5), boolean(fc), dfmin]);
        for spec in &init.objects {
            values.push(scale_at(&spec.id, t)?);
        }
        samples.push(Sample { time: t, values });

        let Some(&next) = times.get(k + 1) else { break };
        let h = step_length(t, next, p.dt);
        x_ego += v_ego * h;
        v_ego = (v_ego - br * p.max_decel * h).max(0.0);
        for (o, s) in objects.iter_mut().zip(&scaled) {
            let moved = s.step(h);
            *o = CtrvState {
                speed: o.speed,
                ..moved
            };
        }
    }
    Ok(Trace::new(space(init, p), samples, fault_params(p)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn visibility_cone() {
        let s = SensorSpec::new(SensorKind::Lidar);
        assert!(s.sees(10.0, 0.0));
        assert!(s.sees(10.0, 17.0));
        assert!(!s.sees(10.0, 18.0));
        assert!(!s.sees(-5.0, 0.0));
        assert!(!s.sees(61.0, 0.0));
    }

    #[test]
    fn fault_window_is_half_open() {
        let f = FaultWindow {
            sensor: SensorKind::Ccd,
            start: 1.0,
            duration: 0.5,
            kind: FaultKind::Dropout,
        };
        assert!(!f.active(0.99));
        assert!(f.active(1.0));
        assert!(f.active(1.49));
        assert!(!f.active(1.5));
    }
}
