//! Random formula/trace generators and Boolean oracles written directly from
//! the semantics, sharing no code with the monitor.

#![allow(dead_code)]

use rand::Rng;
use stlf_core::stl::{Formula, Interval, LinearPredicate, Predicate, PredicateSet, Relation};
use stlf_core::trace::Trace;

pub const CHANNELS: [&str; 3] = ["a", "b", "c"];

/// Timestamps are multiples of 1/4 and interval bounds multiples of 1/2, so
/// every timestamp difference compares exactly against every bound.
pub fn random_trace(rng: &mut impl Rng, max_len: usize) -> Trace {
    let n = rng.random_range(1..=max_len);
    let mut times = Vec::with_capacity(n);
    let mut t = 0.0;
    for _ in 0..n {
        times.push(t);
        t += 0.25 * rng.random_range(1..=4) as f64;
    }
    let cols: Vec<(&str, Vec<f64>)> = CHANNELS
        .iter()
        .map(|&c| (c, (0..n).map(|_| rng.random_range(-2.0..2.0)).collect()))
        .collect();
    Trace::from_columns(&times, &cols)
}

fn random_relation(rng: &mut impl Rng) -> Relation {
    [Relation::Ge, Relation::Gt, Relation::Le, Relation::Lt][rng.random_range(0..4)]
}

fn random_linear(rng: &mut impl Rng) -> Predicate {
    let k = rng.random_range(1..=2);
    let mut terms = Vec::new();
    for _ in 0..k {
        let ch = CHANNELS[rng.random_range(0..3)].to_owned();
        let coef = [-2.0, -1.0, 0.5, 1.0, 2.0][rng.random_range(0..5)];
        terms.push((ch, coef));
    }
    let lin = LinearPredicate::new(terms, random_relation(rng), rng.random_range(-1.0..1.0));
    if lin.terms.iter().all(|(_, c)| *c == 0.0) {
        Predicate::cmp(CHANNELS[0], Relation::Ge, 0.3)
    } else {
        Predicate::Linear(lin)
    }
}

fn random_atom(rng: &mut impl Rng) -> Formula {
    match rng.random_range(0..10) {
        0 => Formula::True,
        1 => Formula::pred(Predicate::channel(CHANNELS[rng.random_range(0..3)])),
        2 => {
            let clauses = (0..2)
                .map(|_| {
                    (0..rng.random_range(1..=2))
                        .map(|_| random_linear(rng))
                        .collect()
                })
                .collect();
            Formula::Pred(PredicateSet::new(clauses))
        }
        _ => Formula::pred(random_linear(rng)),
    }
}

pub fn random_interval(rng: &mut impl Rng) -> Interval {
    let lo = 0.5 * rng.random_range(0..=8) as f64;
    let hi = lo + 0.5 * rng.random_range(0..=((5.0 - lo) / 0.5) as usize) as f64;
    if lo == hi {
        return Interval::closed(lo, hi).unwrap();
    }
    Interval::new(lo, hi, rng.random_bool(0.7), rng.random_bool(0.7)).unwrap()
}

/// Formula of operator depth at most `depth`, bounded intervals in [0, 5].
pub fn random_formula(rng: &mut impl Rng, depth: usize) -> Formula {
    if depth == 0 || rng.random_bool(0.2) {
        return random_atom(rng);
    }
    let d = depth - 1;
    match rng.random_range(0..10) {
        0 => Formula::not(random_formula(rng, d)),
        1 => Formula::and(random_formula(rng, d), random_formula(rng, d)),
        2 => Formula::or(random_formula(rng, d), random_formula(rng, d)),
        3 => Formula::implies(random_formula(rng, d), random_formula(rng, d)),
        4 => Formula::next(random_formula(rng, d)),
        5 => Formula::until(
            random_interval(rng),
            random_formula(rng, d),
            random_formula(rng, d),
        ),
        6 => Formula::release(
            random_interval(rng),
            random_formula(rng, d),
            random_formula(rng, d),
        ),
        7 => Formula::eventually(random_interval(rng), random_formula(rng, d)),
        _ => Formula::always(random_interval(rng), random_formula(rng, d)),
    }
}

pub fn in_interval(iv: &Interval, d: f64) -> bool {
    let lo_ok = if iv.lower_closed() {
        d >= iv.lower()
    } else {
        d > iv.lower()
    };
    let hi_ok = if iv.upper_closed() {
        d <= iv.upper()
    } else {
        d < iv.upper()
    };
    lo_ok && hi_ok
}

fn holds_pred(p: &Predicate, tr: &Trace, i: usize) -> bool {
    let v = |n: &str| tr.value(i, n).unwrap();
    match p {
        Predicate::Channel(n) => v(n) >= 0.0,
        Predicate::Linear(l) => {
            let lhs: f64 = l.terms.iter().map(|(n, c)| c * v(n)).sum();
            match l.relation {
                Relation::Ge => lhs >= l.bound,
                Relation::Gt => lhs > l.bound,
                Relation::Le => lhs <= l.bound,
                Relation::Lt => lhs < l.bound,
            }
        }
    }
}

/// Boolean satisfaction straight from the definitions.
pub fn oracle(f: &Formula, tr: &Trace, i: usize) -> bool {
    let n = tr.len();
    let dt = |j: usize| tr.time(j) - tr.time(i);
    match f {
        Formula::True => true,
        Formula::Pred(set) => set
            .clauses
            .iter()
            .any(|c| c.iter().all(|p| holds_pred(p, tr, i))),
        Formula::Not(a) => !oracle(a, tr, i),
        Formula::And(a, b) => oracle(a, tr, i) && oracle(b, tr, i),
        Formula::Or(a, b) => oracle(a, tr, i) || oracle(b, tr, i),
        Formula::Implies(a, b) => !oracle(a, tr, i) || oracle(b, tr, i),
        Formula::Next(a) => i + 1 < n && oracle(a, tr, i + 1),
        Formula::Until(iv, a, b) => (i..n).any(|j| {
            in_interval(iv, dt(j)) && oracle(b, tr, j) && (i..j).all(|k| oracle(a, tr, k))
        }),
        Formula::Release(iv, a, b) => (i..n).all(|j| {
            !in_interval(iv, dt(j)) || oracle(b, tr, j) || (i..j).any(|k| oracle(a, tr, k))
        }),
        Formula::Eventually(iv, a) => (i..n).any(|j| in_interval(iv, dt(j)) && oracle(a, tr, j)),
        Formula::Always(iv, a) => (i..n).all(|j| !in_interval(iv, dt(j)) || oracle(a, tr, j)),
    }
}

/// ±1 channel helper.
pub fn pm(b: bool) -> f64 {
    if b {
        1.0
    } else {
        -1.0
    }
}

/// Channels of one object/sensor pair with random ±1 W/D, errors and
/// distances on a grid of step 1/8.
pub struct PerceptionSample {
    pub times: Vec<f64>,
    pub w: Vec<bool>,
    pub d: Vec<bool>,
    pub e: Vec<f64>,
    pub dist: Vec<f64>,
}

impl PerceptionSample {
    pub fn random(rng: &mut impl Rng) -> Self {
        let n = rng.random_range(2..=40);
        // Sticky random walks give runs long enough to exercise deadlines.
        let mut walk = |p_flip: f64, start: bool| {
            let mut v = start;
            (0..n)
                .map(|_| {
                    if rng.random_bool(p_flip) {
                        v = !v;
                    }
                    v
                })
                .collect::<Vec<bool>>()
        };
        let w = walk(0.15, true);
        let d = walk(0.25, true);
        let e = (0..n).map(|_| rng.random_range(0.0..2.0)).collect();
        let dist = (0..n).map(|_| rng.random_range(-0.5..3.0)).collect();
        Self {
            times: (0..n).map(|k| k as f64 * 0.125).collect(),
            w,
            d,
            e,
            dist,
        }
    }

    pub fn trace(&self, id: &str, sensor: &str) -> Trace {
        Trace::from_columns(
            &self.times,
            &[
                (
                    format!("W_{id}_{sensor}"),
                    self.w.iter().map(|&b| pm(b)).collect(),
                ),
                (
                    format!("D_{id}_{sensor}"),
                    self.d.iter().map(|&b| pm(b)).collect(),
                ),
                (format!("E_{id}_{sensor}"), self.e.clone()),
                (format!("dist_{id}"), self.dist.clone()),
            ],
        )
    }

    fn window(
        &self,
        k: usize,
        lo: f64,
        lo_closed: bool,
        hi: f64,
    ) -> impl Iterator<Item = usize> + '_ {
        let t0 = self.times[k];
        (k..self.times.len()).filter(move |&j| {
            let d = self.times[j] - t0;
            (if lo_closed { d >= lo } else { d > lo }) && d <= hi
        })
    }

    /// Visible-but-missed implies recovery within `t1`.
    pub fn check_r2(&self, t1: f64) -> bool {
        (0..self.times.len()).all(|k| {
            !(self.w[k] && !self.d[k])
                || self
                    .window(k, 0.0, true, t1)
                    .any(|j| self.d[j] || !self.w[j])
        })
    }

    pub fn check_r3(&self, t1: f64, eps: f64) -> bool {
        (0..self.times.len()).all(|k| {
            let poor = self.w[k] && (!self.d[k] || self.e[k] > eps);
            !poor
                || self
                    .window(k, 0.0, true, t1)
                    .any(|j| !self.w[j] || (self.d[j] && self.e[j] < eps))
        })
    }

    pub fn check_r4(&self, t1: f64, t2: f64, eps_err: f64, eps_dist: f64) -> bool {
        let coll = |j: usize| self.dist[j] < eps_dist;
        (0..self.times.len()).all(|k| {
            let degraded = self
                .window(k, 0.0, true, t1)
                .all(|j| !coll(j) && self.w[j] && (!self.d[j] || self.e[j] > eps_err));
            let crash = self.window(k, t1, false, t2).any(coll);
            !(degraded && crash)
        })
    }
}

/// Brake/prediction flags on a uniform grid.
pub struct BrakeSample {
    pub times: Vec<f64>,
    pub b: Vec<bool>,
    pub fc: Vec<bool>,
}

impl BrakeSample {
    pub fn trace(&self) -> Trace {
        Trace::from_columns(
            &self.times,
            &[
                ("B", self.b.iter().map(|&v| pm(v)).collect()),
                ("FC", self.fc.iter().map(|&v| pm(v)).collect()),
            ],
        )
    }

    /// Release instants: braking now, not braking at the next sample.
    pub fn releases(&self) -> Vec<usize> {
        (0..self.b.len().saturating_sub(1))
            .filter(|&k| self.b[k] && !self.b[k + 1])
            .collect()
    }

    pub fn check_r5(&self, t1: f64, t2: f64) -> bool {
        let n = self.times.len();
        let rel = self.releases();
        let unneeded = (0..n).any(|k| {
            (k..n)
                .filter(|&j| self.times[j] - self.times[k] <= t1)
                .all(|j| self.b[j] && !self.fc[j])
        });
        let chatter = rel.iter().any(|&a| {
            rel.iter().any(|&b| {
                let g1 = self.times[b] - self.times[a];
                g1 > 0.0
                    && g1 <= t2
                    && rel.iter().any(|&c| {
                        let g2 = self.times[c] - self.times[b];
                        g2 > 0.0 && g2 <= t2
                    })
            })
        });
        !unneeded && !chatter
    }
}
