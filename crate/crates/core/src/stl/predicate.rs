use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "<")]
    Lt,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Ge => ">=",
            Relation::Gt => ">",
            Relation::Le => "<=",
            Relation::Lt => "<",
        }
    }

    pub fn is_strict(self) -> bool {
        matches!(self, Relation::Gt | Relation::Lt)
    }

    /// The relation satisfied exactly by the complement.
    pub fn negated(self) -> Self {
        match self {
            Relation::Ge => Relation::Lt,
            Relation::Gt => Relation::Le,
            Relation::Le => Relation::Gt,
            Relation::Lt => Relation::Ge,
        }
    }
}

/// `sum(coef * channel) <rel> bound`, with any constant already moved to the
/// right-hand side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearPredicate {
    pub terms: Vec<(String, f64)>,
    pub relation: Relation,
    pub bound: f64,
}

impl LinearPredicate {
    /// Merges repeated channels into their first occurrence.
    pub fn new(terms: Vec<(String, f64)>, relation: Relation, bound: f64) -> Self {
        let mut merged: Vec<(String, f64)> = Vec::with_capacity(terms.len());
        for (name, coef) in terms {
            match merged.iter_mut().find(|(n, _)| *n == name) {
                Some((_, c)) => *c += coef,
                None => merged.push((name, coef)),
            }
        }
        Self {
            terms: merged,
            relation,
            bound,
        }
    }

    /// Single-channel comparison `channel <rel> bound`.
    pub fn single(channel: impl Into<String>, relation: Relation, bound: f64) -> Self {
        Self {
            terms: vec![(channel.into(), 1.0)],
            relation,
            bound,
        }
    }

    pub fn negated(&self) -> Self {
        Self {
            terms: self.terms.clone(),
            relation: self.relation.negated(),
            bound: self.bound,
        }
    }
}

/// An atomic proposition: a linear inequality or a Boolean channel.
///
/// Boolean channels carry `+1` for true and `-1` for false; the predicate
/// `B` denotes the set `B >= 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Predicate {
    Linear(LinearPredicate),
    Channel(String),
}

impl Predicate {
    pub fn linear(terms: Vec<(String, f64)>, relation: Relation, bound: f64) -> Self {
        Predicate::Linear(LinearPredicate::new(terms, relation, bound))
    }

    pub fn cmp(channel: impl Into<String>, relation: Relation, bound: f64) -> Self {
        Predicate::Linear(LinearPredicate::single(channel, relation, bound))
    }

    pub fn channel(name: impl Into<String>) -> Self {
        Predicate::Channel(name.into())
    }

    /// The predicate as a linear inequality.
    pub fn as_linear(&self) -> LinearPredicate {
        match self {
            Predicate::Linear(l) => l.clone(),
            Predicate::Channel(name) => LinearPredicate::single(name.clone(), Relation::Ge, 0.0),
        }
    }

    pub fn channels(&self) -> impl Iterator<Item = &str> {
        let names: Vec<&str> = match self {
            Predicate::Linear(l) => l.terms.iter().map(|(n, _)| n.as_str()).collect(),
            Predicate::Channel(n) => vec![n.as_str()],
        };
        names.into_iter()
    }
}

fn fmt_coef_term(f: &mut fmt::Formatter<'_>, coef: f64, name: &str) -> fmt::Result {
    if coef == 1.0 {
        write!(f, "{name}")
    } else {
        write!(f, "{coef:?}*{name}")
    }
}

impl fmt::Display for LinearPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            f.write_str("0.0")?;
        }
        for (k, (name, coef)) in self.terms.iter().enumerate() {
            if k == 0 {
                if *coef == -1.0 {
                    write!(f, "-{name}")?;
                } else {
                    fmt_coef_term(f, *coef, name)?;
                }
            } else if coef.is_sign_negative() {
                f.write_str(" - ")?;
                fmt_coef_term(f, -coef, name)?;
            } else {
                f.write_str(" + ")?;
                fmt_coef_term(f, *coef, name)?;
            }
        }
        write!(f, " {} {:?}", self.relation.symbol(), self.bound)
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Predicate::Linear(l) => l.fmt(f),
            Predicate::Channel(n) => f.write_str(n),
        }
    }
}

/// A union of conjunctions of predicates: the set `O(pi)` of points where the
/// proposition holds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredicateSet {
    pub clauses: Vec<Vec<Predicate>>,
}

impl PredicateSet {
    pub fn new(clauses: Vec<Vec<Predicate>>) -> Self {
        Self { clauses }
    }

    pub fn single(p: Predicate) -> Self {
        Self {
            clauses: vec![vec![p]],
        }
    }

    pub fn empty() -> Self {
        Self { clauses: vec![] }
    }

    pub fn full() -> Self {
        Self {
            clauses: vec![vec![]],
        }
    }

    pub fn as_single(&self) -> Option<&Predicate> {
        match self.clauses.as_slice() {
            [clause] => match clause.as_slice() {
                [p] => Some(p),
                _ => None,
            },
            _ => None,
        }
    }

    pub fn channels(&self) -> BTreeSet<&str> {
        self.clauses
            .iter()
            .flatten()
            .flat_map(|p| p.channels())
            .collect()
    }

    /// Complement, when it is again a union of conjunctions of halfspaces.
    /// Only defined for a single conjunction, whose complement is the union
    /// of the negated faces.
    pub fn complement(&self) -> Option<Self> {
        match self.clauses.as_slice() {
            [] => Some(Self::full()),
            [clause] => Some(Self {
                clauses: clause
                    .iter()
                    .map(|p| vec![Predicate::Linear(p.as_linear().negated())])
                    .collect(),
            }),
            _ => None,
        }
    }
}

impl fmt::Display for PredicateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(p) = self.as_single() {
            return p.fmt(f);
        }
        f.write_str("{")?;
        for (k, clause) in self.clauses.iter().enumerate() {
            if k > 0 {
                f.write_str(" ||")?;
            }
            f.write_str(" ")?;
            if clause.is_empty() {
                f.write_str("true")?;
            }
            for (m, p) in clause.iter().enumerate() {
                if m > 0 {
                    f.write_str(" && ")?;
                }
                write!(f, "{p}")?;
            }
        }
        f.write_str(" }")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merges_repeated_channels() {
        let p = LinearPredicate::new(
            vec![("a".into(), 1.0), ("b".into(), 2.0), ("a".into(), 0.5)],
            Relation::Ge,
            1.0,
        );
        assert_eq!(
            p.terms,
            vec![("a".to_string(), 1.5), ("b".to_string(), 2.0)]
        );
    }

    #[test]
    fn display_forms() {
        let p = Predicate::linear(
            vec![("y1".into(), 1.0), ("y2".into(), -2.0)],
            Relation::Ge,
            10.0,
        );
        assert_eq!(p.to_string(), "y1 - 2.0*y2 >= 10.0");
        let s = PredicateSet::new(vec![
            vec![Predicate::cmp("y", Relation::Le, -10.0)],
            vec![
                Predicate::channel("B"),
                Predicate::cmp("z", Relation::Gt, 0.0),
            ],
        ]);
        assert_eq!(s.to_string(), "{ y <= -10.0 || B && z > 0.0 }");
        assert_eq!(PredicateSet::empty().to_string(), "{ }");
        assert_eq!(PredicateSet::full().to_string(), "{ true }");
    }

    #[test]
    fn complement_of_conjunction_is_union_of_negated_faces() {
        let s = PredicateSet::new(vec![vec![
            Predicate::cmp("y", Relation::Ge, 0.0),
            Predicate::cmp("y", Relation::Le, 10.0),
        ]]);
        let c = s.complement().unwrap();
        assert_eq!(c.clauses.len(), 2);
        assert_eq!(c.clauses[0][0].to_string(), "y < 0.0");
        assert_eq!(c.clauses[1][0].to_string(), "y > 10.0");
    }
}
