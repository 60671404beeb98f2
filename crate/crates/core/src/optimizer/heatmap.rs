use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::campaign::evaluate;
use super::objective::Objective;
use super::space::{Dim, SearchSpace};
use super::OptimizerError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub name: String,
    pub lo: f64,
    pub hi: f64,
    /// Cell centers.
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellError {
    pub row: usize,
    pub col: usize,
    pub message: String,
}

/// Robustness over a grid: `values[i][j]` sits at `(rows.values[i],
/// cols.values[j])`; `None` marks a failed cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Heatmap {
    pub rows: Axis,
    pub cols: Axis,
    pub values: Vec<Vec<Option<f64>>>,
    pub errors: Vec<CellError>,
}

impl Heatmap {
    /// Cells with negative robustness.
    pub fn counterexamples(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, row) in self.values.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if v.is_some_and(|v| v < 0.0) {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

fn centers(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| lo + (hi - lo) * (k as f64 + 0.5) / n as f64)
        .collect()
}

/// Evaluates `objective` at the centers of an `n x m` grid over the two
/// free (range) dimensions of `space`; every other dimension must be a
/// single-level discrete variable.
pub fn robustness_heatmap(
    space: &SearchSpace,
    objective: &dyn Objective,
    n: usize,
    m: usize,
) -> Result<Heatmap, OptimizerError> {
    space.validate()?;
    if n == 0 || m == 0 {
        return Err(OptimizerError::InvalidConfig(
            "grid must be at least 1 x 1".into(),
        ));
    }
    let dims = space.dims();
    let mut free = Vec::new();
    for (k, d) in dims.iter().enumerate() {
        match d {
            Dim::Range { .. } => free.push(k),
            Dim::Levels { levels, name } if levels.len() > 1 => {
                return Err(OptimizerError::InvalidConfig(format!(
                    "`{name}` must be fixed to one level"
                )))
            }
            Dim::Levels { .. } => {}
        }
    }
    let &[a, b] = free.as_slice() else {
        return Err(OptimizerError::InvalidConfig(format!(
            "need exactly two free variables, found {}",
            free.len()
        )));
    };
    let axis = |k: usize, count: usize| {
        let Dim::Range { name, lo, hi } = &dims[k] else {
            unreachable!()
        };
        Axis {
            name: name.clone(),
            lo: *lo,
            hi: *hi,
            values: centers(*lo, *hi, count),
        }
    };
    let (rows, cols) = (axis(a, n), axis(b, m));
    let base = space.midpoint();
    let cells: Vec<_> = (0..n * m)
        .into_par_iter()
        .map(|c| {
            let mut p = base.clone();
            p[a] = rows.values[c / m];
            p[b] = cols.values[c % m];
            evaluate(space, objective, &p).map(|o| o.robustness)
        })
        .collect();
    let mut values = vec![vec![None; m]; n];
    let mut errors = Vec::new();
    for (c, cell) in cells.into_iter().enumerate() {
        let (row, col) = (c / m, c % m);
        match cell {
            Ok(v) => values[row][col] = Some(v),
            Err(e) => errors.push(CellError {
                row,
                col,
                message: e.to_string(),
            }),
        }
    }
    Ok(Heatmap {
        rows,
        cols,
        values,
        errors,
    })
}
