//! Mixed-strength covering arrays over discretized parameter domains.

mod coverage;
mod generate;
mod io;
mod spec;

pub use coverage::{verify_coverage, CoverageReport, MissingTuple, ScopeCoverage};
pub use generate::generate_ca;
pub use io::{read_ca, read_ca_with_spec, sidecar_path, write_ca, CaSidecar};
pub use spec::{
    count_required_tuples, DomainKind, LevelValue, MixedStrengthSpec, ParameterDomain, Scope,
    StrengthGroup,
};

#[derive(Debug, thiserror::Error)]
pub enum CaError {
    #[error("strength {strength} is not in 1..={params}")]
    BadStrength { strength: usize, params: usize },
    #[error("parameter `{0}` needs at least two levels")]
    TooFewLevels(String),
    #[error("parameter `{0}` has an empty or non-finite range")]
    BadRange(String),
    #[error("parameter `{0}` lists a level twice")]
    DuplicateLevel(String),
    #[error("parameter `{0}` appears twice")]
    DuplicateParameter(String),
    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),
    #[error("group {params:?} with strength {strength} must exceed the default strength and fit its members")]
    BadGroup {
        params: Vec<String>,
        strength: usize,
    },
    #[error("row {row} has {found} entries, expected {expected}")]
    RowWidth {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("row {row}: value `{value}` is not a level of `{param}`")]
    LevelOutOfDomain {
        row: usize,
        param: String,
        value: String,
    },
    #[error("header mismatch: expected `{expected}`, found `{found}`")]
    Header { expected: String, found: String },
    #[error("construction covered {covered} of {required} tuples")]
    Incomplete { covered: u64, required: u64 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Rows of level indices, one column per domain of `spec`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoveringArray {
    pub spec: MixedStrengthSpec,
    pub rows: Vec<Vec<usize>>,
}

impl CoveringArray {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Level values of row `r`.
    pub fn values(&self, r: usize) -> Vec<LevelValue> {
        self.rows[r]
            .iter()
            .zip(&self.spec.domains)
            .map(|(&l, d)| d.levels()[l].clone())
            .collect()
    }
}
