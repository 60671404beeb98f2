use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Interval, Predicate, PredicateSet};

/// STL abstract syntax tree.
///
/// `Implies`, `Release`, `Eventually` and `Always` are derived operators;
/// [`Formula::desugar`] rewrites them into the core fragment
/// `{True, Pred, Not, And, Or, Next, Until}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Formula {
    True,
    Pred(PredicateSet),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Next(Box<Formula>),
    Until(Interval, Box<Formula>, Box<Formula>),
    Release(Interval, Box<Formula>, Box<Formula>),
    Eventually(Interval, Box<Formula>),
    Always(Interval, Box<Formula>),
}

/// How much trace a formula needs beyond the evaluation instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Horizon {
    /// Nested sum of interval upper bounds, `+inf` when any is unbounded.
    pub time: f64,
    /// Nested count of `Next` operators along the deepest path.
    pub next_steps: usize,
}

impl Formula {
    pub fn pred(p: Predicate) -> Self {
        Formula::Pred(PredicateSet::single(p))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn next(f: Formula) -> Self {
        Formula::Next(Box::new(f))
    }

    pub fn until(i: Interval, a: Formula, b: Formula) -> Self {
        Formula::Until(i, Box::new(a), Box::new(b))
    }

    pub fn release(i: Interval, a: Formula, b: Formula) -> Self {
        Formula::Release(i, Box::new(a), Box::new(b))
    }

    pub fn eventually(i: Interval, f: Formula) -> Self {
        Formula::Eventually(i, Box::new(f))
    }

    pub fn always(i: Interval, f: Formula) -> Self {
        Formula::Always(i, Box::new(f))
    }

    /// Left-nested conjunction of every item; `True` when empty.
    pub fn conjunction(items: impl IntoIterator<Item = Formula>) -> Self {
        items
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or(Formula::True)
    }

    pub fn is_core(&self) -> bool {
        match self {
            Formula::True | Formula::Pred(_) => true,
            Formula::Not(a) | Formula::Next(a) => a.is_core(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Until(_, a, b) => {
                a.is_core() && b.is_core()
            }
            Formula::Implies(..)
            | Formula::Release(..)
            | Formula::Eventually(..)
            | Formula::Always(..) => false,
        }
    }

    /// Rewrites derived operators into the core fragment.
    pub fn desugar(&self) -> Formula {
        match self {
            Formula::True => Formula::True,
            Formula::Pred(p) => Formula::Pred(p.clone()),
            Formula::Not(a) => Formula::not(a.desugar()),
            Formula::And(a, b) => Formula::and(a.desugar(), b.desugar()),
            Formula::Or(a, b) => Formula::or(a.desugar(), b.desugar()),
            Formula::Implies(a, b) => Formula::or(Formula::not(a.desugar()), b.desugar()),
            Formula::Next(a) => Formula::next(a.desugar()),
            Formula::Until(i, a, b) => Formula::until(*i, a.desugar(), b.desugar()),
            Formula::Release(i, a, b) => Formula::not(Formula::until(
                *i,
                Formula::not(a.desugar()),
                Formula::not(b.desugar()),
            )),
            Formula::Eventually(i, a) => Formula::until(*i, Formula::True, a.desugar()),
            Formula::Always(i, a) => {
                Formula::not(Formula::until(*i, Formula::True, Formula::not(a.desugar())))
            }
        }
    }

    pub fn horizon(&self) -> Horizon {
        fn max(a: Horizon, b: Horizon) -> Horizon {
            Horizon {
                time: a.time.max(b.time),
                next_steps: a.next_steps.max(b.next_steps),
            }
        }
        fn shift(i: &Interval, h: Horizon) -> Horizon {
            Horizon {
                time: i.upper() + h.time,
                next_steps: h.next_steps,
            }
        }
        match self {
            Formula::True | Formula::Pred(_) => Horizon {
                time: 0.0,
                next_steps: 0,
            },
            Formula::Not(a) => a.horizon(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                max(a.horizon(), b.horizon())
            }
            Formula::Next(a) => {
                let h = a.horizon();
                Horizon {
                    time: h.time,
                    next_steps: h.next_steps + 1,
                }
            }
            Formula::Until(i, a, b) | Formula::Release(i, a, b) => {
                shift(i, max(a.horizon(), b.horizon()))
            }
            Formula::Eventually(i, a) | Formula::Always(i, a) => shift(i, a.horizon()),
        }
    }

    /// Every channel referenced by a predicate, in sorted order.
    pub fn free_channels(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_channels(&mut out);
        out
    }

    fn collect_channels(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::True => {}
            Formula::Pred(p) => out.extend(p.channels().into_iter().map(str::to_owned)),
            Formula::Not(a)
            | Formula::Next(a)
            | Formula::Eventually(_, a)
            | Formula::Always(_, a) => a.collect_channels(out),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Until(_, a, b)
            | Formula::Release(_, a, b) => {
                a.collect_channels(out);
                b.collect_channels(out);
            }
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self {
            Formula::True | Formula::Pred(_) => 1,
            Formula::Not(a)
            | Formula::Next(a)
            | Formula::Eventually(_, a)
            | Formula::Always(_, a) => 1 + a.size(),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Until(_, a, b)
            | Formula::Release(_, a, b) => 1 + a.size() + b.size(),
        }
    }
}

// Printing parenthesizes every binary operand and every compound operand of a
// unary operator, so the output re-parses to the same tree regardless of
// precedence and associativity.
fn is_atom(f: &Formula) -> bool {
    match f {
        Formula::True => true,
        Formula::Pred(p) => matches!(p.as_single(), Some(Predicate::Channel(_))),
        _ => false,
    }
}

fn is_unary(f: &Formula) -> bool {
    matches!(
        f,
        Formula::Not(_) | Formula::Next(_) | Formula::Eventually(..) | Formula::Always(..)
    )
}

struct Operand<'a>(&'a Formula);

impl fmt::Display for Operand<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if is_atom(self.0) || is_unary(self.0) {
            write!(f, "{}", self.0)
        } else {
            write!(f, "({})", self.0)
        }
    }
}

fn fmt_interval(f: &mut fmt::Formatter<'_>, i: &Interval) -> fmt::Result {
    if i.is_default() {
        Ok(())
    } else {
        write!(f, "{i}")
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => f.write_str("true"),
            Formula::Pred(p) => write!(f, "{p}"),
            Formula::Not(a) => write!(f, "!{}", Operand(a)),
            Formula::Next(a) => write!(f, "X {}", Operand(a)),
            Formula::And(a, b) => write!(f, "{} && {}", Operand(a), Operand(b)),
            Formula::Or(a, b) => write!(f, "{} || {}", Operand(a), Operand(b)),
            Formula::Implies(a, b) => write!(f, "{} -> {}", Operand(a), Operand(b)),
            Formula::Until(i, a, b) => {
                write!(f, "{} U", Operand(a))?;
                fmt_interval(f, i)?;
                write!(f, " {}", Operand(b))
            }
            Formula::Release(i, a, b) => {
                write!(f, "{} R", Operand(a))?;
                fmt_interval(f, i)?;
                write!(f, " {}", Operand(b))
            }
            Formula::Eventually(i, a) => {
                f.write_str("<>")?;
                fmt_interval(f, i)?;
                write!(f, " {}", Operand(a))
            }
            Formula::Always(i, a) => {
                f.write_str("[]")?;
                fmt_interval(f, i)?;
                write!(f, " {}", Operand(a))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stl::Relation;

    fn p() -> Formula {
        Formula::pred(Predicate::cmp("y", Relation::Gt, 0.0))
    }

    fn q() -> Formula {
        Formula::pred(Predicate::channel("B"))
    }

    #[test]
    fn desugar_always() {
        let f = Formula::always(Interval::unbounded(), p());
        assert_eq!(
            f.desugar(),
            Formula::not(Formula::until(
                Interval::unbounded(),
                Formula::True,
                Formula::not(p())
            ))
        );
    }

    #[test]
    fn desugar_implies() {
        assert_eq!(
            Formula::implies(p(), q()).desugar(),
            Formula::or(Formula::not(p()), q())
        );
    }

    #[test]
    fn desugar_eventually() {
        let i = Interval::closed(0.0, 2.0).unwrap();
        assert_eq!(
            Formula::eventually(i, p()).desugar(),
            Formula::until(i, Formula::True, p())
        );
    }

    #[test]
    fn desugar_release() {
        let i = Interval::closed(0.0, 2.0).unwrap();
        assert_eq!(
            Formula::release(i, p(), q()).desugar(),
            Formula::not(Formula::until(i, Formula::not(p()), Formula::not(q())))
        );
    }

    #[test]
    fn desugared_is_core_and_idempotent() {
        let i = Interval::closed(0.5, 2.0).unwrap();
        let f = Formula::always(
            Interval::unbounded(),
            Formula::implies(p(), Formula::release(i, q(), Formula::eventually(i, p()))),
        );
        let d = f.desugar();
        assert!(!f.is_core());
        assert!(d.is_core());
        assert_eq!(d.desugar(), d);
    }

    #[test]
    fn horizon_examples() {
        assert_eq!(p().horizon().time, 0.0);
        let i = Interval::new(1.2, 5.0, true, false).unwrap();
        assert_eq!(Formula::eventually(i, p()).horizon().time, 5.0);
        let nested = Formula::always(
            Interval::closed(0.0, 0.6).unwrap(),
            Formula::eventually(Interval::closed(0.0, 0.5).unwrap(), p()),
        );
        assert!((nested.horizon().time - 1.1).abs() < 1e-12);
        assert_eq!(
            Formula::always(Interval::unbounded(), p()).horizon().time,
            f64::INFINITY
        );
        let h = Formula::and(q(), Formula::next(Formula::not(q()))).horizon();
        assert_eq!((h.time, h.next_steps), (0.0, 1));
    }

    #[test]
    fn free_channels_examples() {
        assert_eq!(p().free_channels(), BTreeSet::from(["y".to_string()]));
        let f = Formula::and(
            Formula::pred(Predicate::cmp("a", Relation::Gt, 0.0)),
            Formula::pred(Predicate::cmp("b", Relation::Le, 1.0)),
        );
        let names: Vec<_> = f.free_channels().into_iter().collect();
        assert_eq!(names, vec!["a", "b"]);
    }

    #[test]
    fn printing() {
        let i = Interval::new(1.2, 5.0, true, false).unwrap();
        let f = Formula::eventually(i, Formula::pred(Predicate::cmp("y", Relation::Le, -10.0)));
        assert_eq!(f.to_string(), "<>_[1.2,5.0) (y <= -10.0)");
        let g = Formula::always(
            Interval::unbounded(),
            Formula::implies(q(), Formula::next(p())),
        );
        assert_eq!(g.to_string(), "[] (B -> X (y > 0.0))");
    }
}
