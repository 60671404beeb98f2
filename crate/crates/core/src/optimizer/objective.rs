use crate::monitor::{self, MonitorError};
use crate::scenario::{Assignment, Scenario, ScenarioError};
use crate::stl::Formula;
use crate::trace::Trace;

#[derive(Debug, thiserror::Error)]
pub enum ObjectiveError {
    #[error("simulation failed: {0}")]
    Simulator(#[from] ScenarioError),
    #[error("monitoring failed: {0}")]
    Monitor(#[from] MonitorError),
    #[error("{0}")]
    Other(String),
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub robustness: f64,
    pub trace: Option<Trace>,
}

/// Something to minimize: robustness of a requirement on a simulation.
pub trait Objective: Sync {
    fn evaluate(&self, a: &Assignment) -> Result<Outcome, ObjectiveError>;
}

/// Closure objective without a trace, for synthetic landscapes.
pub struct FnObjective<F>(pub F);

impl<F> Objective for FnObjective<F>
where
    F: Fn(&Assignment) -> f64 + Sync,
{
    fn evaluate(&self, a: &Assignment) -> Result<Outcome, ObjectiveError> {
        Ok(Outcome {
            robustness: (self.0)(a),
            trace: None,
        })
    }
}

pub struct ScenarioObjective<S> {
    pub scenario: S,
    pub requirement: Formula,
}

impl<S: Scenario> ScenarioObjective<S> {
    /// Fails when the requirement reads a channel the scenario never
    /// produces.
    pub fn new(scenario: S, requirement: Formula) -> Result<Self, ObjectiveError> {
        let space = scenario.space();
        if let Some(c) = requirement
            .free_channels()
            .into_iter()
            .find(|c| !space.names().any(|n| n == c))
        {
            return Err(ObjectiveError::Monitor(MonitorError::UnknownChannel(c)));
        }
        Ok(Self {
            scenario,
            requirement,
        })
    }
}

impl<S: Scenario> Objective for ScenarioObjective<S> {
    fn evaluate(&self, a: &Assignment) -> Result<Outcome, ObjectiveError> {
        let trace = self.scenario.simulate(a)?;
        let robustness = monitor::robustness(&self.requirement, &trace, 0)?;
        Ok(Outcome {
            robustness,
            trace: Some(trace),
        })
    }
}
