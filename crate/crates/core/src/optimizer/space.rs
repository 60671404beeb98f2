use rand::Rng;
use serde::{Deserialize, Serialize};

use super::OptimizerError;
use crate::scenario::{Assignment, InputSignal, Interpolation};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuousVar {
    pub name: String,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteVar {
    pub name: String,
    pub levels: Vec<f64>,
}

/// An input signal parameterized by `control_points` values spread evenly
/// over `[0, span]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalVar {
    pub channel: String,
    pub control_points: usize,
    pub lo: f64,
    pub hi: f64,
    #[serde(default)]
    pub interpolation: Interpolation,
    pub span: f64,
}

impl SignalVar {
    pub fn times(&self) -> Vec<f64> {
        let n = self.control_points;
        (0..n)
            .map(|k| {
                if n == 1 {
                    0.0
                } else if k == n - 1 {
                    self.span
                } else {
                    self.span * k as f64 / (n - 1) as f64
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchSpace {
    pub continuous: Vec<ContinuousVar>,
    pub discrete: Vec<DiscreteVar>,
    pub signals: Vec<SignalVar>,
}

/// One coordinate of a flattened point.
#[derive(Debug, Clone, PartialEq)]
pub enum Dim {
    Range { name: String, lo: f64, hi: f64 },
    Levels { name: String, levels: Vec<f64> },
}

impl Dim {
    pub fn name(&self) -> &str {
        match self {
            Dim::Range { name, .. } | Dim::Levels { name, .. } => name,
        }
    }

    pub fn midpoint(&self) -> f64 {
        match self {
            Dim::Range { lo, hi, .. } => 0.5 * (lo + hi),
            Dim::Levels { levels, .. } => levels[0],
        }
    }

    pub fn sample(&self, rng: &mut impl Rng) -> f64 {
        match self {
            Dim::Range { lo, hi, .. } => rng.random_range(*lo..=*hi),
            Dim::Levels { levels, .. } => levels[rng.random_range(0..levels.len())],
        }
    }

    pub fn contains(&self, v: f64) -> bool {
        match self {
            Dim::Range { lo, hi, .. } => v >= *lo && v <= *hi,
            Dim::Levels { levels, .. } => levels.contains(&v),
        }
    }
}

impl SearchSpace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn continuous(mut self, name: impl Into<String>, lo: f64, hi: f64) -> Self {
        self.continuous.push(ContinuousVar {
            name: name.into(),
            lo,
            hi,
        });
        self
    }

    pub fn discrete(
        mut self,
        name: impl Into<String>,
        levels: impl IntoIterator<Item = f64>,
    ) -> Self {
        self.discrete.push(DiscreteVar {
            name: name.into(),
            levels: levels.into_iter().collect(),
        });
        self
    }

    pub fn signal(
        mut self,
        channel: impl Into<String>,
        control_points: usize,
        lo: f64,
        hi: f64,
        interpolation: Interpolation,
        span: f64,
    ) -> Self {
        self.signals.push(SignalVar {
            channel: channel.into(),
            control_points,
            lo,
            hi,
            interpolation,
            span,
        });
        self
    }

    pub fn validate(&self) -> Result<(), OptimizerError> {
        let bad = |m: String| Err(OptimizerError::InvalidSpace(m));
        for v in &self.continuous {
            if !(v.lo.is_finite() && v.hi.is_finite() && v.lo < v.hi) {
                return bad(format!("`{}` needs finite lo < hi", v.name));
            }
        }
        for v in &self.discrete {
            if v.levels.is_empty() || v.levels.iter().any(|l| !l.is_finite()) {
                return bad(format!("`{}` needs at least one finite level", v.name));
            }
        }
        for s in &self.signals {
            if s.control_points == 0 {
                return bad(format!("`{}` needs at least one control point", s.channel));
            }
            if !(s.lo.is_finite() && s.hi.is_finite() && s.lo < s.hi) {
                return bad(format!("`{}` needs finite lo < hi", s.channel));
            }
            if s.control_points > 1 && !(s.span > 0.0) {
                return bad(format!("`{}` needs a positive span", s.channel));
            }
        }
        let dims = self.dims();
        for (k, d) in dims.iter().enumerate() {
            if dims[..k].iter().any(|e| e.name() == d.name()) {
                return bad(format!("`{}` declared twice", d.name()));
            }
        }
        if dims.is_empty() {
            return bad("no variables".into());
        }
        Ok(())
    }

    /// Continuous variables, then discrete ones, then signal control values
    /// named `channel[k]`.
    pub fn dims(&self) -> Vec<Dim> {
        let mut out: Vec<Dim> = self
            .continuous
            .iter()
            .map(|v| Dim::Range {
                name: v.name.clone(),
                lo: v.lo,
                hi: v.hi,
            })
            .collect();
        out.extend(self.discrete.iter().map(|v| Dim::Levels {
            name: v.name.clone(),
            levels: v.levels.clone(),
        }));
        for s in &self.signals {
            out.extend((0..s.control_points).map(|k| Dim::Range {
                name: format!("{}[{k}]", s.channel),
                lo: s.lo,
                hi: s.hi,
            }));
        }
        out
    }

    pub fn dim_names(&self) -> Vec<String> {
        self.dims().iter().map(|d| d.name().to_owned()).collect()
    }

    pub fn sample(&self, rng: &mut impl Rng) -> Vec<f64> {
        self.dims().iter().map(|d| d.sample(rng)).collect()
    }

    pub fn midpoint(&self) -> Vec<f64> {
        self.dims().iter().map(Dim::midpoint).collect()
    }

    pub fn assignment(&self, point: &[f64]) -> Assignment {
        let mut a = Assignment::default();
        let mut k = 0;
        for v in &self.continuous {
            a.scalars.insert(v.name.clone(), point[k]);
            k += 1;
        }
        for v in &self.discrete {
            a.scalars.insert(v.name.clone(), point[k]);
            k += 1;
        }
        for s in &self.signals {
            let values = &point[k..k + s.control_points];
            k += s.control_points;
            let points = s.times().into_iter().zip(values.iter().copied()).collect();
            a.signals
                .insert(s.channel.clone(), InputSignal::new(points, s.interpolation));
        }
        a
    }

    /// The same space with discrete variable `name` pinned to `value`.
    pub fn freeze(&self, name: &str, value: f64) -> Self {
        let mut out = self.clone();
        for v in &mut out.discrete {
            if v.name == name {
                v.levels = vec![value];
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flattening_and_assignment() {
        let s = SearchSpace::new()
            .continuous("v", 10.0, 30.0)
            .discrete("mu", [1.0, 2.0])
            .signal("xi", 2, -1.0, 1.0, Interpolation::Linear, 10.0);
        s.validate().unwrap();
        assert_eq!(s.dim_names(), ["v", "mu", "xi[0]", "xi[1]"]);
        let a = s.assignment(&[20.0, 2.0, -1.0, 0.5]);
        assert_eq!(a.scalars["mu"], 2.0);
        assert_eq!(a.signals["xi"].points, vec![(0.0, -1.0), (10.0, 0.5)]);
        assert_eq!(s.midpoint(), vec![20.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn invalid_spaces() {
        assert!(SearchSpace::new()
            .continuous("x", 1.0, 1.0)
            .validate()
            .is_err());
        assert!(SearchSpace::new().discrete("d", []).validate().is_err());
        assert!(SearchSpace::new()
            .signal("xi", 0, 0.0, 1.0, Interpolation::Linear, 1.0)
            .validate()
            .is_err());
        assert!(SearchSpace::new()
            .continuous("x", 0.0, 1.0)
            .discrete("x", [1.0])
            .validate()
            .is_err());
    }
}
