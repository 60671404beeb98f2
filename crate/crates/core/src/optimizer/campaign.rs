use serde::{Deserialize, Serialize};

use super::objective::{Objective, Outcome};
use super::space::SearchSpace;
use super::OptimizerError;
use crate::trace::Trace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Random,
    Annealing,
    CoveringArray,
    Refinement,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub index: usize,
    pub phase: Phase,
    pub point: Vec<f64>,
    #[serde(with = "crate::ext_real")]
    pub robustness: f64,
    /// Covering-array row that produced or seeded this evaluation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub row: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Best {
    pub index: usize,
    pub point: Vec<f64>,
    #[serde(with = "crate::ext_real")]
    pub robustness: f64,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct CampaignResult {
    pub dims: Vec<String>,
    pub evaluations: Vec<Evaluation>,
    pub best: Option<Best>,
    /// Running minimum of robustness after each evaluation.
    pub min_envelope: Vec<f64>,
    pub falsified: bool,
    pub falsifying_count: usize,
    #[serde(skip)]
    pub best_trace: Option<Trace>,
}

impl CampaignResult {
    pub fn new(space: &SearchSpace) -> Self {
        Self {
            dims: space.dim_names(),
            ..Self::default()
        }
    }

    pub fn len(&self) -> usize {
        self.evaluations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.evaluations.is_empty()
    }

    pub fn best_robustness(&self) -> f64 {
        self.best.as_ref().map_or(f64::INFINITY, |b| b.robustness)
    }

    pub fn record(&mut self, phase: Phase, point: Vec<f64>, outcome: Outcome, row: Option<usize>) {
        let r = outcome.robustness;
        let index = self.evaluations.len();
        let improved = match &self.best {
            None => !r.is_nan(),
            Some(b) => r < b.robustness,
        };
        if improved {
            self.best = Some(Best {
                index,
                point: point.clone(),
                robustness: r,
            });
            if outcome.trace.is_some() {
                self.best_trace = outcome.trace;
            }
        }
        let prev = self.min_envelope.last().copied().unwrap_or(f64::INFINITY);
        self.min_envelope.push(if r < prev { r } else { prev });
        if r < 0.0 {
            self.falsifying_count += 1;
        }
        self.falsified = self.best_robustness() < 0.0;
        self.evaluations.push(Evaluation {
            index,
            phase,
            point,
            robustness: r,
            row,
        });
    }

    /// Appends another campaign's evaluations, renumbered after ours.
    pub fn absorb(&mut self, other: CampaignResult, row: Option<usize>) {
        let mut trace = other.best_trace;
        let best_index = other.best.map(|b| b.index);
        for e in other.evaluations {
            let t = if Some(e.index) == best_index {
                trace.take()
            } else {
                None
            };
            self.record(
                e.phase,
                e.point,
                Outcome {
                    robustness: e.robustness,
                    trace: t,
                },
                row.or(e.row),
            );
        }
    }
}

pub(crate) fn evaluate(
    space: &SearchSpace,
    objective: &dyn Objective,
    point: &[f64],
) -> Result<Outcome, OptimizerError> {
    objective
        .evaluate(&space.assignment(point))
        .map_err(|source| OptimizerError::Evaluation {
            point: space
                .dim_names()
                .into_iter()
                .zip(point.iter().copied())
                .collect(),
            source,
        })
}
