//! Constant turn rate and velocity prediction.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CtrvState {
    pub x: f64,
    pub y: f64,
    pub heading: f64,
    pub speed: f64,
    pub yaw_rate: f64,
}

impl CtrvState {
    pub fn straight(x: f64, y: f64, heading: f64, speed: f64) -> Self {
        Self {
            x,
            y,
            heading,
            speed,
            yaw_rate: 0.0,
        }
    }

    /// Exact state after `dt` seconds.
    pub fn step(&self, dt: f64) -> Self {
        let (v, w, th) = (self.speed, self.yaw_rate, self.heading);
        let (x, y) = if w.abs() > 1e-6 {
            (
                self.x + v / w * ((th + w * dt).sin() - th.sin()),
                self.y + v / w * (th.cos() - (th + w * dt).cos()),
            )
        } else {
            (self.x + v * dt * th.cos(), self.y + v * dt * th.sin())
        };
        Self {
            x,
            y,
            heading: th + w * dt,
            ..*self
        }
    }
}

/// States at `0, dt, ..., horizon`, starting with `s` itself.
pub fn ctrv_predict(s: &CtrvState, horizon: f64, dt: f64) -> Vec<CtrvState> {
    assert!(
        dt > 0.0 && horizon >= 0.0,
        "ctrv_predict needs dt > 0 and horizon >= 0"
    );
    let steps = (horizon / dt - 1e-9).ceil().max(0.0) as usize;
    let mut out = Vec::with_capacity(steps + 1);
    out.push(*s);
    for k in 1..=steps {
        let h = if k == steps {
            horizon - (k - 1) as f64 * dt
        } else {
            dt
        };
        let next = out[k - 1].step(h);
        out.push(next);
    }
    out
}

/// Smallest center distance over synchronized predictions of both states.
pub fn ctrv_min_future_distance(ego: &CtrvState, agent: &CtrvState, horizon: f64, dt: f64) -> f64 {
    ctrv_predict(ego, horizon, dt)
        .iter()
        .zip(ctrv_predict(agent, horizon, dt))
        .map(|(a, b)| (a.x - b.x).hypot(a.y - b.y))
        .fold(f64::INFINITY, f64::min)
}
