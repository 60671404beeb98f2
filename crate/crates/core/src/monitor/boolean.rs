//! Boolean semantics, evaluated by set membership with no distances. Kept
//! separate from the robust evaluator so each can check the other.

use std::collections::HashMap;

use super::MonitorError;
use crate::stl::{Formula, Interval, Predicate, PredicateSet, Relation};
use crate::trace::Trace;

pub(crate) struct BooleanEvaluator<'a> {
    trace: &'a Trace,
    index: HashMap<&'a str, usize>,
}

impl<'a> BooleanEvaluator<'a> {
    pub(crate) fn new(trace: &'a Trace) -> Self {
        let index = trace
            .space
            .channels()
            .enumerate()
            .map(|(k, n)| (n, k))
            .collect();
        Self { trace, index }
    }

    fn value(&self, i: usize, name: &str) -> Result<f64, MonitorError> {
        let v = match self.index.get(name) {
            Some(&k) => self.trace.samples[i].values.get(k).copied(),
            None => self.trace.params.get(name).copied(),
        };
        v.ok_or_else(|| MonitorError::UnknownChannel(name.to_owned()))
    }

    fn holds(&self, i: usize, p: &Predicate) -> Result<bool, MonitorError> {
        match p {
            Predicate::Channel(name) => Ok(self.value(i, name)? >= 0.0),
            Predicate::Linear(lin) => {
                let mut lhs = 0.0;
                for (name, coef) in &lin.terms {
                    lhs += coef * self.value(i, name)?;
                }
                Ok(match lin.relation {
                    Relation::Ge => lhs >= lin.bound,
                    Relation::Gt => lhs > lin.bound,
                    Relation::Le => lhs <= lin.bound,
                    Relation::Lt => lhs < lin.bound,
                })
            }
        }
    }

    fn member(&self, i: usize, set: &PredicateSet) -> Result<bool, MonitorError> {
        for clause in &set.clauses {
            let mut all = true;
            for p in clause {
                if !self.holds(i, p)? {
                    all = false;
                    break;
                }
            }
            if all {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Indices `j >= i` with `t_j - t_i` in the interval.
    fn window(&self, i: usize, iv: &Interval) -> Vec<usize> {
        let t = |k: usize| self.trace.samples[k].time;
        (i..self.trace.len())
            .take_while(|&j| !iv.is_exceeded_by(t(j) - t(i)))
            .filter(|&j| iv.contains(t(j) - t(i)))
            .collect()
    }

    pub(crate) fn eval(&self, f: &Formula) -> Result<Vec<bool>, MonitorError> {
        let n = self.trace.len();
        Ok(match f {
            Formula::True => vec![true; n],
            Formula::Pred(set) => (0..n)
                .map(|i| self.member(i, set))
                .collect::<Result<_, _>>()?,
            Formula::Not(a) => self.eval(a)?.into_iter().map(|v| !v).collect(),
            Formula::And(a, b) => zip(self.eval(a)?, self.eval(b)?, |x, y| x && y),
            Formula::Or(a, b) => zip(self.eval(a)?, self.eval(b)?, |x, y| x || y),
            Formula::Implies(a, b) => zip(self.eval(a)?, self.eval(b)?, |x, y| !x || y),
            Formula::Next(a) => {
                let a = self.eval(a)?;
                (0..n).map(|i| i + 1 < n && a[i + 1]).collect()
            }
            Formula::Until(iv, a, b) => {
                let (a, b) = (self.eval(a)?, self.eval(b)?);
                (0..n)
                    .map(|i| {
                        self.window(i, iv)
                            .into_iter()
                            .any(|j| b[j] && (i..j).all(|k| a[k]))
                    })
                    .collect()
            }
            Formula::Release(iv, a, b) => {
                let (a, b) = (self.eval(a)?, self.eval(b)?);
                (0..n)
                    .map(|i| {
                        self.window(i, iv)
                            .into_iter()
                            .all(|j| b[j] || (i..j).any(|k| a[k]))
                    })
                    .collect()
            }
            Formula::Eventually(iv, a) => {
                let a = self.eval(a)?;
                (0..n)
                    .map(|i| self.window(i, iv).into_iter().any(|j| a[j]))
                    .collect()
            }
            Formula::Always(iv, a) => {
                let a = self.eval(a)?;
                (0..n)
                    .map(|i| self.window(i, iv).into_iter().all(|j| a[j]))
                    .collect()
            }
        })
    }
}

fn zip(a: Vec<bool>, b: Vec<bool>, op: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    a.into_iter().zip(b).map(|(x, y)| op(x, y)).collect()
}
