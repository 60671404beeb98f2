use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::TraceError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelKind {
    #[default]
    Real,
    /// Encoded as `+1` (true) / `-1` (false).
    Boolean,
}

/// Names of the output, input and parameter components of a trace.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SignalSpace {
    pub outputs: Vec<String>,
    pub inputs: Vec<String>,
    pub params: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub kinds: BTreeMap<String, ChannelKind>,
}

impl SignalSpace {
    pub fn new<S: Into<String>>(
        outputs: impl IntoIterator<Item = S>,
        inputs: impl IntoIterator<Item = S>,
        params: impl IntoIterator<Item = S>,
    ) -> Self {
        Self {
            outputs: outputs.into_iter().map(Into::into).collect(),
            inputs: inputs.into_iter().map(Into::into).collect(),
            params: params.into_iter().map(Into::into).collect(),
            kinds: BTreeMap::new(),
        }
    }

    pub fn with_kind(mut self, name: impl Into<String>, kind: ChannelKind) -> Self {
        self.kinds.insert(name.into(), kind);
        self
    }

    pub fn kind(&self, name: &str) -> ChannelKind {
        self.kinds.get(name).copied().unwrap_or_default()
    }

    /// Sampled channels: outputs followed by inputs.
    pub fn channels(&self) -> impl Iterator<Item = &str> {
        self.outputs
            .iter()
            .chain(self.inputs.iter())
            .map(String::as_str)
    }

    pub fn channel_count(&self) -> usize {
        self.outputs.len() + self.inputs.len()
    }

    pub fn channel_index(&self, name: &str) -> Option<usize> {
        self.channels().position(|c| c == name)
    }

    /// Every name a formula may reference: channels and parameters.
    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.channels()
            .chain(self.params.iter().map(String::as_str))
    }

    pub fn duplicate_names(&self) -> Vec<String> {
        let mut seen = BTreeSet::new();
        let mut dups = Vec::new();
        for n in self.names() {
            if !seen.insert(n) && !dups.iter().any(|d| d == n) {
                dups.push(n.to_owned());
            }
        }
        dups
    }
}

/// One time instant: values aligned with [`SignalSpace::channels`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub time: f64,
    pub values: Vec<f64>,
}

/// `sigma = (y, u, p)`: sampled outputs and inputs on shared timestamps plus
/// constant parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub space: SignalSpace,
    pub samples: Vec<Sample>,
    pub params: BTreeMap<String, f64>,
    pub duration: f64,
}

impl Trace {
    /// A trace whose duration is the last timestamp.
    pub fn new(space: SignalSpace, samples: Vec<Sample>, params: BTreeMap<String, f64>) -> Self {
        let duration = samples.last().map_or(0.0, |s| s.time);
        Self {
            space,
            samples,
            params,
            duration,
        }
    }

    /// Builds a trace of real channels from named columns; the outputs are
    /// the column names in the given order.
    pub fn from_columns<S: AsRef<str>>(times: &[f64], columns: &[(S, Vec<f64>)]) -> Self {
        let space = SignalSpace::new(
            columns.iter().map(|(n, _)| n.as_ref().to_owned()),
            Vec::<String>::new(),
            Vec::<String>::new(),
        );
        let samples = times
            .iter()
            .enumerate()
            .map(|(i, &time)| Sample {
                time,
                values: columns.iter().map(|(_, c)| c[i]).collect(),
            })
            .collect();
        Self::new(space, samples, BTreeMap::new())
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.time)
    }

    pub fn time(&self, i: usize) -> f64 {
        self.samples[i].time
    }

    /// Column of a sampled channel.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.space.channel_index(name)?;
        Some(self.samples.iter().map(|s| s.values[idx]).collect())
    }

    /// Value of a channel or parameter at sample `i`.
    pub fn value(&self, i: usize, name: &str) -> Option<f64> {
        match self.space.channel_index(name) {
            Some(idx) => self.samples.get(i).and_then(|s| s.values.get(idx).copied()),
            None => self.params.get(name).copied(),
        }
    }

    pub fn validate(&self) -> ValidationReport {
        validate_trace(self)
    }

    /// Fails with the first violated invariant.
    pub fn ensure_valid(&self) -> Result<(), TraceError> {
        match validate_trace(self).issues.into_iter().next() {
            None => Ok(()),
            Some(issue) => Err(TraceError::Invalid(issue)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TraceIssue {
    DuplicateName(String),
    Empty,
    WidthMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },
    NonFiniteTime {
        index: usize,
    },
    NonMonotonic {
        index: usize,
    },
    DurationMismatch {
        last: f64,
        duration: f64,
    },
    MissingParam(String),
    UnknownParam(String),
}

impl fmt::Display for TraceIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceIssue::DuplicateName(n) => write!(f, "name `{n}` declared more than once"),
            TraceIssue::Empty => write!(f, "trace has no samples"),
            TraceIssue::WidthMismatch {
                index,
                expected,
                found,
            } => write!(f, "sample {index} has {found} values, expected {expected}"),
            TraceIssue::NonFiniteTime { index } => {
                write!(f, "sample {index} has a non-finite time")
            }
            TraceIssue::NonMonotonic { index } => {
                write!(f, "timestamp at index {index} does not strictly increase")
            }
            TraceIssue::DurationMismatch { last, duration } => write!(
                f,
                "last timestamp {last} does not equal duration {duration}"
            ),
            TraceIssue::MissingParam(n) => write!(f, "parameter `{n}` has no value"),
            TraceIssue::UnknownParam(n) => write!(f, "value given for undeclared parameter `{n}`"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub issues: Vec<TraceIssue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }
}

/// Checks every trace invariant and reports all violations.
pub fn validate_trace(tr: &Trace) -> ValidationReport {
    let mut issues: Vec<TraceIssue> = tr
        .space
        .duplicate_names()
        .into_iter()
        .map(TraceIssue::DuplicateName)
        .collect();
    if tr.samples.is_empty() {
        issues.push(TraceIssue::Empty);
    }
    let width = tr.space.channel_count();
    for (index, s) in tr.samples.iter().enumerate() {
        if s.values.len() != width {
            issues.push(TraceIssue::WidthMismatch {
                index,
                expected: width,
                found: s.values.len(),
            });
        }
        if !s.time.is_finite() {
            issues.push(TraceIssue::NonFiniteTime { index });
        } else if index > 0 && s.time <= tr.samples[index - 1].time {
            issues.push(TraceIssue::NonMonotonic { index });
        }
    }
    if let Some(last) = tr.samples.last() {
        if last.time != tr.duration {
            issues.push(TraceIssue::DurationMismatch {
                last: last.time,
                duration: tr.duration,
            });
        }
    }
    for p in &tr.space.params {
        if !tr.params.contains_key(p) {
            issues.push(TraceIssue::MissingParam(p.clone()));
        }
    }
    for p in tr.params.keys() {
        if !tr.space.params.contains(p) {
            issues.push(TraceIssue::UnknownParam(p.clone()));
        }
    }
    ValidationReport { issues }
}
