use std::fmt;

use serde::{Deserialize, Serialize};

use super::FormulaError;

/// Slack applied when comparing timestamp differences against interval
/// bounds. Sample times such as `k * 0.05` carry representation error, so a
/// difference that is "exactly" on a closed bound must still count as inside.
pub const TIME_EPS: f64 = 1e-9;

/// A non-empty connected subset of `[0, +inf)` used as a timing constraint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    lower: f64,
    upper: f64,
    lower_closed: bool,
    upper_closed: bool,
}

impl Interval {
    pub fn new(
        lower: f64,
        upper: f64,
        lower_closed: bool,
        upper_closed: bool,
    ) -> Result<Self, FormulaError> {
        if !(lower.is_finite() && lower >= 0.0) || upper.is_nan() || lower > upper {
            return Err(FormulaError::MalformedInterval { lower, upper });
        }
        let upper_closed = upper_closed && upper.is_finite();
        if lower == upper && !(lower_closed && upper_closed) {
            return Err(FormulaError::MalformedInterval { lower, upper });
        }
        Ok(Self {
            lower,
            upper,
            lower_closed,
            upper_closed,
        })
    }

    /// `[lower, upper]`
    pub fn closed(lower: f64, upper: f64) -> Result<Self, FormulaError> {
        Self::new(lower, upper, true, true)
    }

    /// `[0, inf)`, the interval implied when a temporal operator has none.
    pub fn unbounded() -> Self {
        Self {
            lower: 0.0,
            upper: f64::INFINITY,
            lower_closed: true,
            upper_closed: false,
        }
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn lower_closed(&self) -> bool {
        self.lower_closed
    }

    pub fn upper_closed(&self) -> bool {
        self.upper_closed
    }

    pub fn is_bounded(&self) -> bool {
        self.upper.is_finite()
    }

    pub fn is_default(&self) -> bool {
        *self == Self::unbounded()
    }

    /// Whether an elapsed time `d` (a timestamp difference) lies in the interval.
    pub fn contains(&self, d: f64) -> bool {
        let above = if self.lower_closed {
            d >= self.lower - TIME_EPS
        } else {
            d > self.lower + TIME_EPS
        };
        let below = if !self.upper.is_finite() {
            true
        } else if self.upper_closed {
            d <= self.upper + TIME_EPS
        } else {
            d < self.upper - TIME_EPS
        };
        above && below
    }

    /// True once `d` is past every point of the interval.
    pub fn is_exceeded_by(&self, d: f64) -> bool {
        if !self.upper.is_finite() {
            return false;
        }
        if self.upper_closed {
            d > self.upper + TIME_EPS
        } else {
            d >= self.upper - TIME_EPS
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let open = if self.lower_closed { '[' } else { '(' };
        if self.upper.is_finite() {
            let close = if self.upper_closed { ']' } else { ')' };
            write!(f, "_{open}{:?},{:?}{close}", self.lower, self.upper)
        } else {
            write!(f, "_{open}{:?},inf)", self.lower)
        }
    }
}
