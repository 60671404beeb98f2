//! Robustness-guided falsification: minimize a requirement's robustness
//! over scenario variables until it turns negative.

mod campaign;
mod heatmap;
mod objective;
mod pipeline;
mod search;
mod space;

pub use campaign::{Best, CampaignResult, Evaluation, Phase};
pub use heatmap::{robustness_heatmap, Axis, CellError, Heatmap};
pub use objective::{FnObjective, Objective, ObjectiveError, Outcome, ScenarioObjective};
pub use pipeline::{ca_points, ca_then_falsify, PipelineConfig};
pub use search::{falsify_sa, uniform_random_search, SaConfig};
pub use space::{ContinuousVar, Dim, DiscreteVar, SearchSpace, SignalVar};

#[derive(Debug, thiserror::Error)]
pub enum OptimizerError {
    #[error("empty budget")]
    EmptyBudget,
    #[error("invalid search space: {0}")]
    InvalidSpace(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("covering array does not fit the search space: {0}")]
    CaMismatch(String),
    #[error("evaluation at {point:?} failed: {source}")]
    Evaluation {
        point: Vec<(String, f64)>,
        source: ObjectiveError,
    },
}
