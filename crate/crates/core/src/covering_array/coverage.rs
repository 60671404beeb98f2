use serde::{Deserialize, Serialize};

use super::spec::{combinations, MixedStrengthSpec};
use super::{CaError, CoveringArray};

const MAX_LISTED_MISSING: usize = 100;

/// Covered/uncovered flags for every level combination of every required
/// subset, indexed in mixed radix with the first subset member most
/// significant.
pub(crate) struct TupleTable {
    pub subsets: Vec<Vec<usize>>,
    pub covered: Vec<Vec<bool>>,
    pub uncovered: usize,
    counts: Vec<usize>,
}

impl TupleTable {
    pub fn new(spec: &MixedStrengthSpec) -> Self {
        let counts = spec.level_counts();
        let subsets = spec.required_subsets();
        let covered: Vec<Vec<bool>> = subsets
            .iter()
            .map(|s| vec![false; s.iter().map(|&p| counts[p]).product()])
            .collect();
        let uncovered = covered.iter().map(Vec::len).sum();
        Self {
            subsets,
            covered,
            uncovered,
            counts,
        }
    }

    pub fn tuple_index(&self, subset: &[usize], row: &[usize]) -> usize {
        subset
            .iter()
            .fold(0, |acc, &p| acc * self.counts[p] + row[p])
    }

    /// Level of each subset member for tuple `index`.
    pub fn decode(&self, subset: &[usize], mut index: usize) -> Vec<usize> {
        let mut levels = vec![0; subset.len()];
        for (slot, &p) in subset.iter().enumerate().rev() {
            levels[slot] = index % self.counts[p];
            index /= self.counts[p];
        }
        levels
    }

    /// Marks the tuples of `row`; returns how many were new.
    pub fn mark(&mut self, row: &[usize]) -> usize {
        let mut fresh = 0;
        for s in 0..self.subsets.len() {
            let idx = self.tuple_index(&self.subsets[s], row);
            if !self.covered[s][idx] {
                self.covered[s][idx] = true;
                fresh += 1;
            }
        }
        self.uncovered -= fresh;
        fresh
    }

    pub fn count_new(&self, row: &[usize]) -> usize {
        self.subsets
            .iter()
            .zip(&self.covered)
            .filter(|(s, c)| !c[self.tuple_index(s, row)])
            .count()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScopeCoverage {
    pub strength: usize,
    pub params: Vec<String>,
    pub required: u64,
    pub covered: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MissingTuple {
    pub params: Vec<String>,
    pub levels: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub required: u64,
    pub covered: u64,
    pub scopes: Vec<ScopeCoverage>,
    /// At most 100 uncovered tuples, in subset order.
    pub missing: Vec<MissingTuple>,
}

impl CoverageReport {
    pub fn is_complete(&self) -> bool {
        self.covered == self.required
    }

    pub fn percent(&self) -> f64 {
        if self.required == 0 {
            100.0
        } else {
            100.0 * self.covered as f64 / self.required as f64
        }
    }
}

pub(crate) fn check_rows(spec: &MixedStrengthSpec, rows: &[Vec<usize>]) -> Result<(), CaError> {
    let counts = spec.level_counts();
    for (r, row) in rows.iter().enumerate() {
        if row.len() != counts.len() {
            return Err(CaError::RowWidth {
                row: r,
                expected: counts.len(),
                found: row.len(),
            });
        }
        for (p, (&level, &n)) in row.iter().zip(&counts).enumerate() {
            if level >= n {
                return Err(CaError::LevelOutOfDomain {
                    row: r,
                    param: spec.domains[p].name.clone(),
                    value: level.to_string(),
                });
            }
        }
    }
    Ok(())
}

/// Independently recomputes which required tuples `ca` covers.
pub fn verify_coverage(ca: &CoveringArray) -> Result<CoverageReport, CaError> {
    let spec = &ca.spec;
    spec.validate()?;
    check_rows(spec, &ca.rows)?;
    let mut table = TupleTable::new(spec);
    for row in &ca.rows {
        table.mark(row);
    }

    let names = |s: &[usize]| s.iter().map(|&p| spec.domains[p].name.clone()).collect();
    let scopes = spec
        .scopes()
        .iter()
        .map(|scope| {
            let (mut required, mut covered) = (0u64, 0u64);
            for subset in combinations(&scope.params, scope.strength) {
                let s = table.subsets.iter().position(|x| *x == subset).unwrap();
                required += table.covered[s].len() as u64;
                covered += table.covered[s].iter().filter(|&&c| c).count() as u64;
            }
            ScopeCoverage {
                strength: scope.strength,
                params: names(&scope.params),
                required,
                covered,
            }
        })
        .collect();

    let mut missing = Vec::new();
    'outer: for (s, subset) in table.subsets.iter().enumerate() {
        for (idx, &c) in table.covered[s].iter().enumerate() {
            if c {
                continue;
            }
            if missing.len() == MAX_LISTED_MISSING {
                break 'outer;
            }
            let levels = table
                .decode(subset, idx)
                .iter()
                .zip(subset)
                .map(|(&l, &p)| spec.domains[p].levels()[l].to_string())
                .collect();
            missing.push(MissingTuple {
                params: names(subset),
                levels,
            });
        }
    }

    let required = table.covered.iter().map(|c| c.len() as u64).sum();
    Ok(CoverageReport {
        required,
        covered: required - table.uncovered as u64,
        scopes,
        missing,
    })
}
