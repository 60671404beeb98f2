//! Greedy one-row-at-a-time construction in the style of AETG.
//!
//! Each row is the best of a fixed number of randomized candidates. A
//! candidate starts from the parameter level that appears in the most
//! uncovered tuples, then fixes the remaining parameters in random order,
//! each to the level that completes the most uncovered tuples among the
//! parameters fixed so far.

use rand::seq::SliceRandom;

use super::coverage::{check_rows, TupleTable};
use super::spec::MixedStrengthSpec;
use super::{CaError, CoveringArray};
use crate::rng;

const CANDIDATES_PER_ROW: usize = 50;

pub fn generate_ca(spec: &MixedStrengthSpec, seed: u64) -> Result<CoveringArray, CaError> {
    spec.validate()?;
    let counts = spec.level_counts();
    let k = counts.len();
    let mut table = TupleTable::new(spec);
    let mut rng = rng::from_seed(seed);

    // Subsets touching each parameter.
    let mut touching: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (s, subset) in table.subsets.iter().enumerate() {
        for &p in subset {
            touching[p].push(s);
        }
    }

    let mut rows: Vec<Vec<usize>> = Vec::new();
    while table.uncovered > 0 {
        let (first, first_level) = most_uncovered(&table, &counts);
        let mut best: Option<(usize, Vec<usize>)> = None;
        for _ in 0..CANDIDATES_PER_ROW {
            let mut order: Vec<usize> = (0..k).filter(|&p| p != first).collect();
            order.shuffle(&mut rng);
            let row = build_candidate(&table, &touching, &counts, first, first_level, &order);
            let gain = table.count_new(&row);
            if best.as_ref().is_none_or(|(g, _)| gain > *g) {
                best = Some((gain, row));
            }
        }
        let row = match best {
            Some((gain, row)) if gain > 0 => row,
            _ => row_for_first_uncovered(&table, k),
        };
        table.mark(&row);
        rows.push(row);
    }

    check_rows(spec, &rows)?;
    let ca = CoveringArray {
        spec: spec.clone(),
        rows,
    };
    let report = super::verify_coverage(&ca)?;
    if !report.is_complete() {
        return Err(CaError::Incomplete {
            covered: report.covered,
            required: report.required,
        });
    }
    log::debug!(
        "covering array: {} rows for {} tuples (seed {seed})",
        ca.rows.len(),
        report.required
    );
    Ok(ca)
}

fn most_uncovered(table: &TupleTable, counts: &[usize]) -> (usize, usize) {
    let mut tally: Vec<Vec<usize>> = counts.iter().map(|&n| vec![0; n]).collect();
    for (subset, covered) in table.subsets.iter().zip(&table.covered) {
        for (idx, _) in covered.iter().enumerate().filter(|(_, &c)| !c) {
            for (&p, l) in subset.iter().zip(table.decode(subset, idx)) {
                tally[p][l] += 1;
            }
        }
    }
    let mut best = (0, 0, 0);
    for (p, levels) in tally.iter().enumerate() {
        for (l, &n) in levels.iter().enumerate() {
            if n > best.2 {
                best = (p, l, n);
            }
        }
    }
    (best.0, best.1)
}

fn build_candidate(
    table: &TupleTable,
    touching: &[Vec<usize>],
    counts: &[usize],
    first: usize,
    first_level: usize,
    order: &[usize],
) -> Vec<usize> {
    let mut row = vec![0; counts.len()];
    let mut fixed = vec![false; counts.len()];
    row[first] = first_level;
    fixed[first] = true;
    for &p in order {
        fixed[p] = true;
        let ready: Vec<usize> = touching[p]
            .iter()
            .copied()
            .filter(|&s| table.subsets[s].iter().all(|&q| fixed[q]))
            .collect();
        let mut best_level = 0;
        let mut best_gain = None;
        for level in 0..counts[p] {
            row[p] = level;
            let gain = ready
                .iter()
                .filter(|&&s| !table.covered[s][table.tuple_index(&table.subsets[s], &row)])
                .count();
            if best_gain.is_none_or(|g| gain > g) {
                best_gain = Some(gain);
                best_level = level;
            }
        }
        row[p] = best_level;
    }
    row
}

/// Row that covers the first uncovered tuple, other parameters at level 0.
fn row_for_first_uncovered(table: &TupleTable, k: usize) -> Vec<usize> {
    let mut row = vec![0; k];
    for (subset, covered) in table.subsets.iter().zip(&table.covered) {
        if let Some(idx) = covered.iter().position(|&c| !c) {
            for (&p, l) in subset.iter().zip(table.decode(subset, idx)) {
                row[p] = l;
            }
            break;
        }
    }
    row
}
