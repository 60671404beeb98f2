//! Discrete-time robust semantics.
//!
//! Every node is evaluated once for all sample indices (bottom-up dynamic
//! programming), so a formula costs `O(|f| * N^2)` in the worst case. Each
//! value is paired with a witness: the sample whose predicate distance (or
//! trace boundary) determined it. Ties prefer the earliest witness.

use std::collections::HashMap;

use super::MonitorError;
use crate::stl::{Formula, Interval, PredicateSet};
use crate::trace::{signed_distance, Metric, Trace};

#[derive(Debug, Clone, Copy)]
struct Cell {
    value: f64,
    witness: usize,
}

impl Cell {
    fn new(value: f64, witness: usize) -> Self {
        Self { value, witness }
    }

    fn negate(self) -> Self {
        Self::new(-self.value, self.witness)
    }
}

fn pick_min(a: Cell, b: Cell) -> Cell {
    if a.value < b.value || (a.value == b.value && a.witness <= b.witness) {
        a
    } else {
        b
    }
}

fn pick_max(a: Cell, b: Cell) -> Cell {
    if a.value > b.value || (a.value == b.value && a.witness <= b.witness) {
        a
    } else {
        b
    }
}

/// Identity element of `pick_min`; its witness loses every tie.
const TOP: Cell = Cell {
    value: f64::INFINITY,
    witness: usize::MAX,
};
const BOTTOM: Cell = Cell {
    value: f64::NEG_INFINITY,
    witness: usize::MAX,
};

pub(crate) struct RobustEvaluator<'a> {
    trace: &'a Trace,
    index: HashMap<&'a str, usize>,
    metric: Metric,
}

impl<'a> RobustEvaluator<'a> {
    pub(crate) fn new(trace: &'a Trace, metric: Metric) -> Self {
        let index = trace
            .space
            .channels()
            .enumerate()
            .map(|(k, n)| (n, k))
            .collect();
        Self {
            trace,
            index,
            metric,
        }
    }

    fn predicate(&self, set: &PredicateSet) -> Result<Vec<Cell>, MonitorError> {
        let tr = self.trace;
        (0..tr.len())
            .map(|i| {
                let s = &tr.samples[i];
                let lookup = |name: &str| match self.index.get(name) {
                    Some(&k) => s.values.get(k).copied(),
                    None => tr.params.get(name).copied(),
                };
                signed_distance(lookup, set, self.metric)
                    .map(|d| Cell::new(d, i))
                    .map_err(MonitorError::from)
            })
            .collect()
    }

    /// Robustness and witness for every sample index.
    pub(crate) fn eval(&self, f: &Formula) -> Result<(Vec<f64>, Vec<usize>), MonitorError> {
        let cells = self.eval_cells(f)?;
        Ok(cells
            .into_iter()
            .enumerate()
            .map(|(i, c)| {
                (
                    c.value,
                    if c.witness == usize::MAX {
                        i
                    } else {
                        c.witness
                    },
                )
            })
            .unzip())
    }

    fn eval_cells(&self, f: &Formula) -> Result<Vec<Cell>, MonitorError> {
        let n = self.trace.len();
        Ok(match f {
            Formula::True => (0..n).map(|i| Cell::new(f64::INFINITY, i)).collect(),
            Formula::Pred(set) => self.predicate(set)?,
            Formula::Not(a) => self.eval_cells(a)?.into_iter().map(Cell::negate).collect(),
            Formula::And(a, b) => {
                let (a, b) = (self.eval_cells(a)?, self.eval_cells(b)?);
                a.into_iter().zip(b).map(|(x, y)| pick_min(x, y)).collect()
            }
            Formula::Or(a, b) => {
                let (a, b) = (self.eval_cells(a)?, self.eval_cells(b)?);
                a.into_iter().zip(b).map(|(x, y)| pick_max(x, y)).collect()
            }
            Formula::Implies(a, b) => {
                let (a, b) = (self.eval_cells(a)?, self.eval_cells(b)?);
                a.into_iter()
                    .zip(b)
                    .map(|(x, y)| pick_max(x.negate(), y))
                    .collect()
            }
            Formula::Next(a) => {
                let a = self.eval_cells(a)?;
                (0..n)
                    .map(|i| {
                        if i + 1 < n {
                            a[i + 1]
                        } else {
                            Cell::new(f64::NEG_INFINITY, i)
                        }
                    })
                    .collect()
            }
            Formula::Until(iv, a, b) => {
                let (a, b) = (self.eval_cells(a)?, self.eval_cells(b)?);
                self.until(iv, &a, &b)
            }
            Formula::Release(iv, a, b) => {
                // Dual of until: min over j of max(b(j), max_{i<=k<j} a(k)).
                let (a, b) = (self.eval_cells(a)?, self.eval_cells(b)?);
                self.release(iv, &a, &b)
            }
            Formula::Eventually(iv, a) => {
                let a = self.eval_cells(a)?;
                self.window(iv, &a, BOTTOM, pick_max)
            }
            Formula::Always(iv, a) => {
                let a = self.eval_cells(a)?;
                self.window(iv, &a, TOP, pick_min)
            }
        })
    }

    fn window(
        &self,
        iv: &Interval,
        a: &[Cell],
        identity: Cell,
        pick: fn(Cell, Cell) -> Cell,
    ) -> Vec<Cell> {
        let times: Vec<f64> = self.trace.times().collect();
        (0..times.len())
            .map(|i| {
                let mut acc = identity;
                for j in i..times.len() {
                    let d = times[j] - times[i];
                    if iv.is_exceeded_by(d) {
                        break;
                    }
                    if iv.contains(d) {
                        acc = pick(acc, a[j]);
                    }
                }
                if acc.witness == usize::MAX {
                    Cell::new(acc.value, i)
                } else {
                    acc
                }
            })
            .collect()
    }

    fn until(&self, iv: &Interval, a: &[Cell], b: &[Cell]) -> Vec<Cell> {
        let times: Vec<f64> = self.trace.times().collect();
        (0..times.len())
            .map(|i| {
                let mut best = BOTTOM;
                let mut prefix = TOP;
                for j in i..times.len() {
                    let d = times[j] - times[i];
                    if iv.is_exceeded_by(d) {
                        break;
                    }
                    if iv.contains(d) {
                        best = pick_max(best, pick_min(b[j], prefix));
                    }
                    prefix = pick_min(prefix, a[j]);
                }
                if best.witness == usize::MAX {
                    Cell::new(best.value, i)
                } else {
                    best
                }
            })
            .collect()
    }

    fn release(&self, iv: &Interval, a: &[Cell], b: &[Cell]) -> Vec<Cell> {
        let times: Vec<f64> = self.trace.times().collect();
        (0..times.len())
            .map(|i| {
                let mut best = TOP;
                let mut prefix = BOTTOM;
                for j in i..times.len() {
                    let d = times[j] - times[i];
                    if iv.is_exceeded_by(d) {
                        break;
                    }
                    if iv.contains(d) {
                        best = pick_min(best, pick_max(b[j], prefix));
                    }
                    prefix = pick_max(prefix, a[j]);
                }
                if best.witness == usize::MAX {
                    Cell::new(best.value, i)
                } else {
                    best
                }
            })
            .collect()
    }
}
