use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::ScenarioError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interpolation {
    #[default]
    Linear,
    /// Zero-order hold: the value of the latest control point.
    Hold,
}

/// Control points `(t, value)` with strictly increasing times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputSignal {
    pub points: Vec<(f64, f64)>,
    #[serde(default)]
    pub interpolation: Interpolation,
}

impl InputSignal {
    pub fn new(points: Vec<(f64, f64)>, interpolation: Interpolation) -> Self {
        Self {
            points,
            interpolation,
        }
    }

    pub fn constant(value: f64) -> Self {
        Self::new(vec![(0.0, value)], Interpolation::Hold)
    }

    pub fn linear(points: Vec<(f64, f64)>) -> Self {
        Self::new(points, Interpolation::Linear)
    }

    pub fn hold(points: Vec<(f64, f64)>) -> Self {
        Self::new(points, Interpolation::Hold)
    }

    pub fn validate(&self, channel: &str) -> Result<(), ScenarioError> {
        let bad = |message: &str| ScenarioError::InvalidInput {
            channel: channel.to_owned(),
            message: message.to_owned(),
        };
        if self.points.is_empty() {
            return Err(bad("no control points"));
        }
        if self
            .points
            .iter()
            .any(|(t, v)| !t.is_finite() || !v.is_finite())
        {
            return Err(bad("non-finite control point"));
        }
        if self.points.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(bad("control point times must strictly increase"));
        }
        Ok(())
    }

    pub fn start(&self) -> f64 {
        self.points[0].0
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.1)
    }

    /// Value at `t`; `None` before the first control point.
    pub fn at(&self, t: f64) -> Option<f64> {
        let pts = &self.points;
        if pts.is_empty() || t < pts[0].0 {
            return None;
        }
        let k = pts.partition_point(|p| p.0 <= t) - 1;
        if k + 1 == pts.len() || self.interpolation == Interpolation::Hold {
            return Some(pts[k].1);
        }
        let ((t0, v0), (t1, v1)) = (pts[k], pts[k + 1]);
        Some(v0 + (v1 - v0) * (t - t0) / (t1 - t0))
    }
}

/// Input signals by channel name.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct InputTrace {
    pub signals: BTreeMap<String, InputSignal>,
}

impl InputTrace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, channel: impl Into<String>, signal: InputSignal) -> Self {
        self.signals.insert(channel.into(), signal);
        self
    }

    pub fn validate(&self, duration: f64) -> Result<(), ScenarioError> {
        for (name, s) in &self.signals {
            s.validate(name)?;
            if s.points.iter().any(|p| p.0 > duration) {
                return Err(ScenarioError::InvalidInput {
                    channel: name.clone(),
                    message: format!("control point after the end time {duration}"),
                });
            }
        }
        Ok(())
    }
}

pub fn interpolate_input(u: &InputTrace, t: f64, channel: &str) -> Result<f64, ScenarioError> {
    let s = u
        .signals
        .get(channel)
        .ok_or_else(|| ScenarioError::MissingInput(channel.to_owned()))?;
    s.at(t).ok_or_else(|| ScenarioError::InputTime {
        channel: channel.to_owned(),
        t,
    })
}
