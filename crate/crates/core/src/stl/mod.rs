//! Signal Temporal Logic formulas: syntax tree, derived operators, concrete
//! syntax.

mod formula;
mod interval;
mod parser;
mod predicate;

pub use formula::{Formula, Horizon};
pub use interval::{Interval, TIME_EPS};
pub use parser::{parse, parse_formula};
pub use predicate::{LinearPredicate, Predicate, PredicateSet, Relation};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FormulaError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown channel `{name}` at line {line}, column {column}")]
    UnknownChannel {
        name: String,
        line: usize,
        column: usize,
    },
    #[error("malformed interval [{lower}, {upper}]")]
    MalformedInterval { lower: f64, upper: f64 },
}

impl std::str::FromStr for Formula {
    type Err = FormulaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}
