//! Requirement formulas over the perception channel conventions
//! (`dist_<i>`, `W_<i>_<s>`, `D_<i>_<s>`, `E_<i>_<s>`, `B`, `FC`).
//!
//! Boolean channels are read through their ±1 encoding, so subformulas built
//! only from them have robustness in `[-1, 1]`.

use serde::{Deserialize, Serialize};

use crate::scenario::SENSOR_TAGS;
use crate::stl::{Formula, Interval, Predicate, Relation};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RequirementError {
    #[error("unknown sensor `{0}`")]
    UnknownSensor(String),
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("no objects to check")]
    NoObjects,
    #[error("need t2 > t1, got t1 = {t1}, t2 = {t2}")]
    Timing { t1: f64, t2: f64 },
    #[error("invalid requirement parameters: {0}")]
    Invalid(String),
    #[error("unknown requirement `{0}`")]
    UnknownName(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RequirementParams {
    pub eps_dist: f64,
    pub eps_err: f64,
    pub t1: f64,
    pub t2: f64,
    pub object_ids: Vec<String>,
    pub sensors: Vec<String>,
}

impl Default for RequirementParams {
    fn default() -> Self {
        Self {
            eps_dist: 0.0,
            eps_err: 1.0,
            t1: 0.6,
            t2: 0.5,
            object_ids: Vec::new(),
            sensors: SENSOR_TAGS.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl RequirementParams {
    pub fn for_objects<S: Into<String>>(ids: impl IntoIterator<Item = S>) -> Self {
        Self {
            object_ids: ids.into_iter().map(Into::into).collect(),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), RequirementError> {
        if !(self.eps_dist >= 0.0 && self.eps_err > 0.0 && self.t1 > 0.0 && self.t2 > 0.0) {
            return Err(RequirementError::Invalid(
                "need eps_dist >= 0 and eps_err, t1, t2 > 0".into(),
            ));
        }
        if let Some(s) = self
            .sensors
            .iter()
            .find(|s| !SENSOR_TAGS.contains(&s.as_str()))
        {
            return Err(RequirementError::UnknownSensor(s.clone()));
        }
        Ok(())
    }

    fn check_pair(&self, object: &str, sensor: &str) -> Result<(), RequirementError> {
        self.validate()?;
        if !self.sensors.iter().any(|s| s == sensor) {
            return Err(RequirementError::UnknownSensor(sensor.to_owned()));
        }
        if !self.object_ids.iter().any(|o| o == object) {
            return Err(RequirementError::UnknownObject(object.to_owned()));
        }
        Ok(())
    }
}

fn channel(name: String) -> Formula {
    Formula::pred(Predicate::channel(name))
}

fn w(i: &str, s: &str) -> Formula {
    channel(format!("W_{i}_{s}"))
}

fn d(i: &str, s: &str) -> Formula {
    channel(format!("D_{i}_{s}"))
}

fn e(i: &str, s: &str, rel: Relation, eps: f64) -> Formula {
    Formula::pred(Predicate::cmp(format!("E_{i}_{s}"), rel, eps))
}

fn collision(i: &str, eps: f64) -> Formula {
    Formula::pred(Predicate::cmp(format!("dist_{i}"), Relation::Lt, eps))
}

fn globally(f: Formula) -> Formula {
    Formula::always(Interval::unbounded(), f)
}

fn within(t: f64) -> Result<Interval, RequirementError> {
    Interval::closed(0.0, t).map_err(|e| RequirementError::Invalid(e.to_string()))
}

/// No collision with any object.
pub fn build_r1(p: &RequirementParams) -> Result<Formula, RequirementError> {
    p.validate()?;
    if p.object_ids.is_empty() {
        return Err(RequirementError::NoObjects);
    }
    Ok(Formula::conjunction(
        p.object_ids
            .iter()
            .map(|i| globally(Formula::not(collision(i, p.eps_dist)))),
    ))
}

/// A visible but undetected object is detected (or leaves view) within t1.
pub fn build_r2(p: &RequirementParams, i: &str, s: &str) -> Result<Formula, RequirementError> {
    p.check_pair(i, s)?;
    let missed = Formula::and(w(i, s), Formula::not(d(i, s)));
    let recovered = Formula::or(d(i, s), Formula::not(w(i, s)));
    Ok(globally(Formula::implies(
        missed,
        Formula::eventually(within(p.t1)?, recovered),
    )))
}

/// Poor localization of a visible object ends within t1.
pub fn build_r3(p: &RequirementParams, i: &str, s: &str) -> Result<Formula, RequirementError> {
    p.check_pair(i, s)?;
    let poor = Formula::and(
        w(i, s),
        Formula::or(Formula::not(d(i, s)), e(i, s, Relation::Gt, p.eps_err)),
    );
    let good = Formula::or(
        Formula::not(w(i, s)),
        Formula::and(d(i, s), e(i, s, Relation::Lt, p.eps_err)),
    );
    Ok(globally(Formula::implies(
        poor,
        Formula::eventually(within(p.t1)?, good),
    )))
}

/// Poor perception sustained for t1 is not followed by a collision in
/// `(t1, t2]`.
pub fn build_r4(p: &RequirementParams, i: &str, s: &str) -> Result<Formula, RequirementError> {
    p.check_pair(i, s)?;
    if p.t2 <= p.t1 {
        return Err(RequirementError::Timing { t1: p.t1, t2: p.t2 });
    }
    let degraded = Formula::conjunction([
        Formula::not(collision(i, p.eps_dist)),
        w(i, s),
        Formula::or(Formula::not(d(i, s)), e(i, s, Relation::Gt, p.eps_err)),
    ]);
    let later = Interval::new(p.t1, p.t2, false, true)
        .map_err(|e| RequirementError::Invalid(e.to_string()))?;
    Ok(globally(Formula::not(Formula::and(
        Formula::always(within(p.t1)?, degraded),
        Formula::eventually(later, collision(i, p.eps_dist)),
    ))))
}

/// No braking for t1 without a predicted collision, and no three brake
/// releases with gaps of at most t2.
pub fn build_r5(p: &RequirementParams) -> Result<Formula, RequirementError> {
    p.validate()?;
    let b = || channel("B".into());
    let release = || Formula::and(b(), Formula::next(Formula::not(b())));
    let soon = || {
        Interval::new(0.0, p.t2, false, true).map_err(|e| RequirementError::Invalid(e.to_string()))
    };
    let unneeded = Formula::always(
        within(p.t1)?,
        Formula::and(b(), Formula::not(channel("FC".into()))),
    );
    let chatter = Formula::and(
        release(),
        Formula::eventually(
            soon()?,
            Formula::and(release(), Formula::eventually(soon()?, release())),
        ),
    );
    Ok(globally(Formula::and(
        Formula::not(unneeded),
        Formula::not(chatter),
    )))
}

fn all_pairs(
    p: &RequirementParams,
    build: fn(&RequirementParams, &str, &str) -> Result<Formula, RequirementError>,
) -> Result<Formula, RequirementError> {
    if p.object_ids.is_empty() {
        return Err(RequirementError::NoObjects);
    }
    let mut parts = Vec::new();
    for i in &p.object_ids {
        for s in &p.sensors {
            parts.push(build(p, i, s)?);
        }
    }
    Ok(Formula::conjunction(parts))
}

/// `R1`..`R5` by name; R2 to R4 are conjoined over every object and sensor.
pub fn build_by_name(name: &str, p: &RequirementParams) -> Result<Formula, RequirementError> {
    match name.to_ascii_uppercase().as_str() {
        "R1" => build_r1(p),
        "R2" => all_pairs(p, build_r2),
        "R3" => all_pairs(p, build_r3),
        "R4" => all_pairs(p, build_r4),
        "R5" => build_r5(p),
        _ => Err(RequirementError::UnknownName(name.to_owned())),
    }
}
