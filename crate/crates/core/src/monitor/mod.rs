//! Robustness monitoring of STL formulas over finite traces.

mod boolean;
mod robust;

use serde::{Deserialize, Serialize};

use crate::stl::{Formula, TIME_EPS};
use crate::trace::{Metric, Trace, TraceError, TraceIssue};
use boolean::BooleanEvaluator;
use robust::RobustEvaluator;

#[derive(Debug, thiserror::Error)]
pub enum MonitorError {
    #[error("formula references `{0}`, which is neither a trace channel nor a parameter")]
    UnknownChannel(String),
    #[error("sample index {index} out of range for a trace of {len} samples")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("invalid trace: {0}")]
    InvalidTrace(TraceIssue),
    #[error(transparent)]
    Distance(TraceError),
}

impl From<TraceError> for MonitorError {
    fn from(e: TraceError) -> Self {
        match e {
            TraceError::MissingChannel(n) => MonitorError::UnknownChannel(n),
            TraceError::Invalid(issue) => MonitorError::InvalidTrace(issue),
            other => MonitorError::Distance(other),
        }
    }
}

/// Outcome of monitoring a formula at sample 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    #[serde(with = "crate::ext_real")]
    pub robustness: f64,
    pub satisfied: bool,
    pub worst_time: f64,
    /// Robustness is exactly zero; the sign carries no verdict.
    pub inconclusive: bool,
    /// Some operator looks past the end of the trace, so a longer trace
    /// could change the value.
    pub extension_may_change: bool,
}

fn check(f: &Formula, tr: &Trace, i: usize) -> Result<(), MonitorError> {
    tr.ensure_valid()?;
    if i >= tr.len() {
        return Err(MonitorError::IndexOutOfRange {
            index: i,
            len: tr.len(),
        });
    }
    if let Some(name) = f
        .free_channels()
        .into_iter()
        .find(|c| tr.space.channel_index(c).is_none() && !tr.params.contains_key(c))
    {
        return Err(MonitorError::UnknownChannel(name));
    }
    Ok(())
}

/// Robustness of `f` on `tr` at sample `i`.
pub fn robustness(f: &Formula, tr: &Trace, i: usize) -> Result<f64, MonitorError> {
    check(f, tr, i)?;
    let (values, _) = RobustEvaluator::new(tr, Metric::Euclidean).eval(f)?;
    Ok(values[i])
}

/// Robustness at every sample index.
pub fn robustness_signal(f: &Formula, tr: &Trace) -> Result<Vec<f64>, MonitorError> {
    check(f, tr, 0)?;
    Ok(RobustEvaluator::new(tr, Metric::Euclidean).eval(f)?.0)
}

/// Time of the sample that determines the robustness at sample 0: the worst
/// violation for falsified formulas, the least robust witness otherwise.
pub fn worst_time(f: &Formula, tr: &Trace) -> Result<f64, MonitorError> {
    check(f, tr, 0)?;
    let (_, witness) = RobustEvaluator::new(tr, Metric::Euclidean).eval(f)?;
    Ok(tr.time(witness[0]))
}

/// Boolean semantics at sample `i`, computed by membership tests only.
pub fn boolean_satisfaction(f: &Formula, tr: &Trace, i: usize) -> Result<bool, MonitorError> {
    check(f, tr, i)?;
    Ok(BooleanEvaluator::new(tr).eval(f)?[i])
}

/// Whether `f` evaluated at `i` reads samples that `tr` does not contain.
pub fn extension_may_change(f: &Formula, tr: &Trace, i: usize) -> bool {
    let h = f.horizon();
    let last = tr.len().saturating_sub(1);
    !h.time.is_finite() || tr.time(i) + h.time > tr.duration + TIME_EPS || i + h.next_steps > last
}

pub fn monitor(f: &Formula, tr: &Trace) -> Result<Verdict, MonitorError> {
    check(f, tr, 0)?;
    let (values, witness) = RobustEvaluator::new(tr, Metric::Euclidean).eval(f)?;
    let robustness = values[0];
    Ok(Verdict {
        robustness,
        satisfied: robustness > 0.0,
        worst_time: tr.time(witness[0]),
        inconclusive: robustness == 0.0,
        extension_may_change: extension_may_change(f, tr, 0),
    })
}
