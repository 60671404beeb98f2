//! Signed distance from a point to the set described by a predicate.
//!
//! Each conjunction of linear predicates is a (possibly open) convex
//! polyhedron. Distances are taken to its closure; membership honors strict
//! relations, so a point on the boundary of a strict halfspace is outside at
//! distance zero.

use serde::{Deserialize, Serialize};

use super::TraceError;
use crate::stl::{PredicateSet, Relation};

/// Relative tolerance for feasibility of projected points.
const FEAS_EPS: f64 = 1e-9;
/// Pivot threshold for the small normal-equation solves.
const PIVOT_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    #[default]
    Euclidean,
}

impl Metric {
    pub fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Metric::Euclidean => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt(),
        }
    }
}

/// `normal . x <= offset` (or `<` when strict).
#[derive(Debug, Clone)]
struct Halfspace {
    normal: Vec<f64>,
    offset: f64,
    strict: bool,
}

impl Halfspace {
    fn slack(&self, x: &[f64]) -> f64 {
        self.offset - dot(&self.normal, x)
    }

    fn contains(&self, x: &[f64]) -> bool {
        let s = self.slack(x);
        if self.strict {
            s > 0.0
        } else {
            s >= 0.0
        }
    }

    fn complement(&self) -> Halfspace {
        Halfspace {
            normal: self.normal.iter().map(|a| -a).collect(),
            offset: -self.offset,
            strict: !self.strict,
        }
    }

    fn norm(&self) -> f64 {
        dot(&self.normal, &self.normal).sqrt()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Signed distance (Euclidean) of `point` to the set of `set`.
///
/// Positive inside (distance to the complement), negative outside (minus the
/// distance to the set), `+inf` for the full space and `-inf` for the empty
/// set.
pub fn signed_distance<F>(point: F, set: &PredicateSet, metric: Metric) -> Result<f64, TraceError>
where
    F: Fn(&str) -> Option<f64>,
{
    let Metric::Euclidean = metric;
    let names: Vec<&str> = set.channels().into_iter().collect();
    let x: Vec<f64> = names
        .iter()
        .map(|n| point(n).ok_or_else(|| TraceError::MissingChannel((*n).to_owned())))
        .collect::<Result<_, _>>()?;
    let clauses: Vec<Vec<Halfspace>> = set
        .clauses
        .iter()
        .map(|clause| {
            clause
                .iter()
                .map(|p| {
                    let lin = p.as_linear();
                    let mut normal = vec![0.0; names.len()];
                    for (name, coef) in &lin.terms {
                        let k = names
                            .iter()
                            .position(|n| n == name)
                            .expect("collected above");
                        normal[k] += coef;
                    }
                    match lin.relation {
                        Relation::Le | Relation::Lt => Halfspace {
                            normal,
                            offset: lin.bound,
                            strict: lin.relation.is_strict(),
                        },
                        Relation::Ge | Relation::Gt => Halfspace {
                            normal: normal.iter().map(|a| -a).collect(),
                            offset: -lin.bound,
                            strict: lin.relation.is_strict(),
                        },
                    }
                })
                .collect()
        })
        .collect();
    Ok(normalize_zero(signed_distance_halfspaces(&x, &clauses)))
}

fn normalize_zero(d: f64) -> f64 {
    if d == 0.0 {
        0.0
    } else {
        d
    }
}

fn signed_distance_halfspaces(x: &[f64], clauses: &[Vec<Halfspace>]) -> f64 {
    // Single halfspace: closed form.
    if let [clause] = clauses {
        if let [h] = clause.as_slice() {
            let n = h.norm();
            if n > 0.0 {
                return h.slack(x) / n;
            }
            return if h.contains(x) {
                f64::INFINITY
            } else {
                f64::NEG_INFINITY
            };
        }
    }
    let inside = clauses.iter().any(|c| c.iter().all(|h| h.contains(x)));
    if inside {
        distance_to_complement(x, clauses)
    } else {
        -clauses
            .iter()
            .map(|c| distance_to_polyhedron(x, c))
            .fold(f64::INFINITY, f64::min)
    }
}

/// The complement of a union of polyhedra is the union, over every choice of
/// one face per clause, of the polyhedron bounded by the negated faces.
fn distance_to_complement(x: &[f64], clauses: &[Vec<Halfspace>]) -> f64 {
    if clauses.iter().any(Vec::is_empty) {
        return f64::INFINITY;
    }
    let mut best = f64::INFINITY;
    let mut choice = vec![0usize; clauses.len()];
    loop {
        let poly: Vec<Halfspace> = choice
            .iter()
            .zip(clauses)
            .map(|(&k, c)| c[k].complement())
            .collect();
        best = best.min(distance_to_polyhedron(x, &poly));
        // Odometer increment over the face choices.
        let mut pos = 0;
        loop {
            if pos == choice.len() {
                return best;
            }
            choice[pos] += 1;
            if choice[pos] < clauses[pos].len() {
                break;
            }
            choice[pos] = 0;
            pos += 1;
        }
    }
}

/// Euclidean distance from `x` to the closure of `{y : h.normal . y <= h.offset}`
/// over all `h`; `+inf` when the polyhedron is empty.
///
/// The projection lies on a face whose active constraints are linearly
/// independent, so enumerating every active set of size at most the
/// dimension and keeping the nearest feasible equality-constrained projection
/// is exact.
fn distance_to_polyhedron(x: &[f64], faces: &[Halfspace]) -> f64 {
    let mut rows: Vec<&Halfspace> = Vec::with_capacity(faces.len());
    for h in faces {
        if h.norm() == 0.0 {
            if !h.contains(x) {
                return f64::INFINITY;
            }
        } else {
            rows.push(h);
        }
    }
    let scale = 1.0 + x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let feasible = |y: &[f64]| {
        rows.iter()
            .all(|h| h.slack(y) >= -FEAS_EPS * scale * (1.0 + h.norm()))
    };
    if feasible(x) {
        return 0.0;
    }
    let dim = x.len();
    let max_active = dim.min(rows.len());
    let mut best = f64::INFINITY;
    let mut subset: Vec<usize> = Vec::with_capacity(max_active);
    for size in 1..=max_active {
        subset.clear();
        subset.extend(0..size);
        loop {
            if let Some(y) = project_onto_active(x, &rows, &subset) {
                if feasible(&y) {
                    best = best.min(Metric::Euclidean.distance(x, &y));
                }
            }
            if !next_combination(&mut subset, rows.len()) {
                break;
            }
        }
    }
    best
}

fn next_combination(subset: &mut [usize], n: usize) -> bool {
    let k = subset.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if subset[i] < n - k + i {
            subset[i] += 1;
            for j in i + 1..k {
                subset[j] = subset[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Nearest point to `x` on `{y : a_s . y = b_s for s in active}`, or `None`
/// when the active normals are linearly dependent.
fn project_onto_active(x: &[f64], rows: &[&Halfspace], active: &[usize]) -> Option<Vec<f64>> {
    let k = active.len();
    // Gram matrix G = A A^T and residual r = A x - b; solve G lambda = r.
    let mut g = vec![vec![0.0; k + 1]; k];
    for (i, &ri) in active.iter().enumerate() {
        for (j, &rj) in active.iter().enumerate() {
            g[i][j] = dot(&rows[ri].normal, &rows[rj].normal);
        }
        g[i][k] = -rows[ri].slack(x);
    }
    let lambda = solve_augmented(g)?;
    let mut y = x.to_vec();
    for (i, &ri) in active.iter().enumerate() {
        for (yd, a) in y.iter_mut().zip(&rows[ri].normal) {
            *yd -= lambda[i] * a;
        }
    }
    Some(y)
}

/// Gaussian elimination with partial pivoting on an `n x (n+1)` system.
fn solve_augmented(mut m: Vec<Vec<f64>>) -> Option<Vec<f64>> {
    let n = m.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        let diag_scale = m[col..n]
            .iter()
            .map(|r| r[col].abs())
            .fold(0.0f64, f64::max)
            .max(1.0);
        if m[pivot][col].abs() <= PIVOT_EPS * diag_scale {
            return None;
        }
        m.swap(col, pivot);
        for r in col + 1..n {
            let factor = m[r][col] / m[col][col];
            if factor != 0.0 {
                let (top, bottom) = m.split_at_mut(r);
                for (x, p) in bottom[0][col..].iter_mut().zip(&top[col][col..]) {
                    *x -= factor * p;
                }
            }
        }
    }
    let mut sol = vec![0.0; n];
    for r in (0..n).rev() {
        let mut acc = m[r][n];
        for c in r + 1..n {
            acc -= m[r][c] * sol[c];
        }
        sol[r] = acc / m[r][r];
    }
    Some(sol)
}

#[cfg(test)]
mod tests {
    use std::collections::HashMap;

    use super::*;
    use crate::stl::Predicate;

    fn at(pairs: &[(&str, f64)]) -> HashMap<String, f64> {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    fn sd(point: &HashMap<String, f64>, set: &PredicateSet) -> f64 {
        signed_distance(|n| point.get(n).copied(), set, Metric::Euclidean).unwrap()
    }

    #[test]
    fn inside_band() {
        let set = PredicateSet::new(vec![vec![
            Predicate::cmp("y", Relation::Ge, 0.0),
            Predicate::cmp("y", Relation::Le, 10.0),
        ]]);
        assert_eq!(sd(&at(&[("y", 5.0)]), &set), 5.0);
        assert_eq!(sd(&at(&[("y", 1.0)]), &set), 1.0);
        assert_eq!(sd(&at(&[("y", 12.0)]), &set), -2.0);
    }

    #[test]
    fn outside_halfspace() {
        let set = PredicateSet::single(Predicate::cmp("y", Relation::Ge, 0.0));
        assert_eq!(sd(&at(&[("y", -3.0)]), &set), -3.0);
    }

    #[test]
    fn union_outside_takes_nearest_clause() {
        let set = PredicateSet::new(vec![
            vec![Predicate::cmp("y1", Relation::Le, -10.0)],
            vec![Predicate::linear(
                vec![("y1".into(), 1.0), ("y2".into(), 1.0)],
                Relation::Ge,
                10.0,
            )],
        ]);
        let d = sd(&at(&[("y1", 0.0), ("y2", 0.0)]), &set);
        assert!((d + 10.0 / 2f64.sqrt()).abs() < 1e-12, "{d}");
    }

    #[test]
    fn overlapping_union_inside_distance_exceeds_each_clause() {
        // (-inf, 1] u [0, +inf) is the whole line.
        let set = PredicateSet::new(vec![
            vec![Predicate::cmp("y", Relation::Le, 1.0)],
            vec![Predicate::cmp("y", Relation::Ge, 0.0)],
        ]);
        // Complement is empty only at the intersection of the negations,
        // y > 1 and y < 0, which is empty: distance is infinite.
        assert_eq!(sd(&at(&[("y", 0.5)]), &set), f64::INFINITY);
        // [0, 1] u [2, 3] at y = 2.25: nearest complement point is 2.
        let set = PredicateSet::new(vec![
            vec![
                Predicate::cmp("y", Relation::Ge, 0.0),
                Predicate::cmp("y", Relation::Le, 1.0),
            ],
            vec![
                Predicate::cmp("y", Relation::Ge, 2.0),
                Predicate::cmp("y", Relation::Le, 3.0),
            ],
        ]);
        assert_eq!(sd(&at(&[("y", 2.25)]), &set), 0.25);
        assert_eq!(sd(&at(&[("y", 1.5)]), &set), -0.5);
    }

    #[test]
    fn full_and_empty_sets() {
        let p = at(&[]);
        assert_eq!(sd(&p, &PredicateSet::full()), f64::INFINITY);
        assert_eq!(sd(&p, &PredicateSet::empty()), f64::NEG_INFINITY);
    }

    #[test]
    fn infeasible_conjunction_is_empty() {
        let set = PredicateSet::new(vec![vec![
            Predicate::cmp("y", Relation::Ge, 1.0),
            Predicate::cmp("y", Relation::Le, 0.0),
        ]]);
        assert_eq!(sd(&at(&[("y", 0.5)]), &set), f64::NEG_INFINITY);
    }

    #[test]
    fn corner_projection() {
        // Quadrant x >= 0, y >= 0 from (-3, -4): nearest point is the origin.
        let set = PredicateSet::new(vec![vec![
            Predicate::cmp("x", Relation::Ge, 0.0),
            Predicate::cmp("y", Relation::Ge, 0.0),
        ]]);
        assert!((sd(&at(&[("x", -3.0), ("y", -4.0)]), &set) + 5.0).abs() < 1e-12);
        assert!((sd(&at(&[("x", -3.0), ("y", 4.0)]), &set) + 3.0).abs() < 1e-12);
        assert!((sd(&at(&[("x", 2.0), ("y", 1.0)]), &set) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn boundary_is_zero_for_strict_and_non_strict() {
        let strict = PredicateSet::single(Predicate::cmp("y", Relation::Gt, 0.0));
        let closed = PredicateSet::single(Predicate::cmp("y", Relation::Ge, 0.0));
        let p = at(&[("y", 0.0)]);
        assert_eq!(sd(&p, &strict).to_bits(), 0.0f64.to_bits());
        assert_eq!(sd(&p, &closed).to_bits(), 0.0f64.to_bits());
    }

    #[test]
    fn boolean_channel_distance_is_value() {
        let set = PredicateSet::single(Predicate::channel("B"));
        assert_eq!(sd(&at(&[("B", 1.0)]), &set), 1.0);
        assert_eq!(sd(&at(&[("B", -1.0)]), &set), -1.0);
    }

    #[test]
    fn missing_channel() {
        let set = PredicateSet::single(Predicate::cmp("y", Relation::Ge, 0.0));
        let err = signed_distance(|_| None, &set, Metric::Euclidean).unwrap_err();
        assert!(matches!(err, TraceError::MissingChannel(n) if n == "y"));
    }
}
