use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::CaError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DomainKind {
    Discrete {
        values: Vec<String>,
    },
    /// `[lo, hi]` represented by `levels` evenly spaced values.
    Continuous {
        lo: f64,
        hi: f64,
        levels: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterDomain {
    pub name: String,
    #[serde(flatten)]
    pub kind: DomainKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LevelValue {
    Real(f64),
    Symbol(String),
}

impl LevelValue {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            LevelValue::Real(v) => Some(*v),
            LevelValue::Symbol(s) => s.parse().ok(),
        }
    }
}

impl fmt::Display for LevelValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LevelValue::Real(v) => write!(f, "{v}"),
            LevelValue::Symbol(s) => f.write_str(s),
        }
    }
}

impl ParameterDomain {
    pub fn discrete<S: Into<String>>(
        name: impl Into<String>,
        values: impl IntoIterator<Item = S>,
    ) -> Self {
        Self {
            name: name.into(),
            kind: DomainKind::Discrete {
                values: values.into_iter().map(Into::into).collect(),
            },
        }
    }

    /// Discrete domain with levels named `0..count`.
    pub fn with_levels(name: impl Into<String>, count: usize) -> Self {
        Self::discrete(name, (0..count).map(|k| k.to_string()))
    }

    pub fn continuous(name: impl Into<String>, lo: f64, hi: f64, levels: usize) -> Self {
        Self {
            name: name.into(),
            kind: DomainKind::Continuous { lo, hi, levels },
        }
    }

    pub fn level_count(&self) -> usize {
        match &self.kind {
            DomainKind::Discrete { values } => values.len(),
            DomainKind::Continuous { levels, .. } => *levels,
        }
    }

    pub fn levels(&self) -> Vec<LevelValue> {
        match &self.kind {
            DomainKind::Discrete { values } => {
                values.iter().cloned().map(LevelValue::Symbol).collect()
            }
            DomainKind::Continuous { lo, hi, levels } => {
                let n = *levels;
                (0..n)
                    .map(|k| {
                        let v = if n == 1 {
                            0.5 * (lo + hi)
                        } else if k == n - 1 {
                            *hi
                        } else {
                            lo + (hi - lo) * k as f64 / (n - 1) as f64
                        };
                        LevelValue::Real(v)
                    })
                    .collect()
            }
        }
    }

    /// The original range of a continuous parameter.
    pub fn range(&self) -> Option<(f64, f64)> {
        match &self.kind {
            DomainKind::Continuous { lo, hi, .. } => Some((*lo, *hi)),
            DomainKind::Discrete { .. } => None,
        }
    }

    fn validate(&self) -> Result<(), CaError> {
        if self.level_count() < 2 {
            return Err(CaError::TooFewLevels(self.name.clone()));
        }
        if let DomainKind::Continuous { lo, hi, .. } = self.kind {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(CaError::BadRange(self.name.clone()));
            }
        }
        if let DomainKind::Discrete { values } = &self.kind {
            let distinct: BTreeSet<&String> = values.iter().collect();
            if distinct.len() != values.len() {
                return Err(CaError::DuplicateLevel(self.name.clone()));
            }
        }
        Ok(())
    }
}

/// A parameter subset that must be covered at a higher strength.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrengthGroup {
    pub params: Vec<String>,
    pub strength: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedStrengthSpec {
    pub domains: Vec<ParameterDomain>,
    pub strength: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub groups: Vec<StrengthGroup>,
}

/// One strength requirement: every `strength`-subset of `params`.
#[derive(Debug, Clone, PartialEq)]
pub struct Scope {
    pub params: Vec<usize>,
    pub strength: usize,
}

impl MixedStrengthSpec {
    pub fn uniform(domains: Vec<ParameterDomain>, strength: usize) -> Self {
        Self {
            domains,
            strength,
            groups: Vec::new(),
        }
    }

    pub fn with_group<S: Into<String>>(
        mut self,
        params: impl IntoIterator<Item = S>,
        strength: usize,
    ) -> Self {
        self.groups.push(StrengthGroup {
            params: params.into_iter().map(Into::into).collect(),
            strength,
        });
        self
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.domains.iter().position(|d| d.name == name)
    }

    pub fn level_counts(&self) -> Vec<usize> {
        self.domains
            .iter()
            .map(ParameterDomain::level_count)
            .collect()
    }

    pub fn validate(&self) -> Result<(), CaError> {
        let k = self.domains.len();
        if self.strength < 1 || self.strength > k {
            return Err(CaError::BadStrength {
                strength: self.strength,
                params: k,
            });
        }
        let mut names = BTreeSet::new();
        for d in &self.domains {
            d.validate()?;
            if !names.insert(d.name.as_str()) {
                return Err(CaError::DuplicateParameter(d.name.clone()));
            }
        }
        for g in &self.groups {
            let mut members = BTreeSet::new();
            for p in &g.params {
                if self.index_of(p).is_none() {
                    return Err(CaError::UnknownParameter(p.clone()));
                }
                if !members.insert(p.as_str()) {
                    return Err(CaError::DuplicateParameter(p.clone()));
                }
            }
            if g.strength <= self.strength || g.params.len() < g.strength {
                return Err(CaError::BadGroup {
                    params: g.params.clone(),
                    strength: g.strength,
                });
            }
        }
        Ok(())
    }

    /// The default scope over all parameters, then one scope per group.
    pub fn scopes(&self) -> Vec<Scope> {
        let mut out = vec![Scope {
            params: (0..self.domains.len()).collect(),
            strength: self.strength,
        }];
        for g in &self.groups {
            let mut params: Vec<usize> = g.params.iter().filter_map(|p| self.index_of(p)).collect();
            params.sort_unstable();
            out.push(Scope {
                params,
                strength: g.strength,
            });
        }
        out
    }

    /// Every parameter subset whose level combinations must all appear,
    /// deduplicated across scopes, each sorted ascending.
    pub fn required_subsets(&self) -> Vec<Vec<usize>> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for scope in self.scopes() {
            for subset in combinations(&scope.params, scope.strength) {
                if seen.insert(subset.clone()) {
                    out.push(subset);
                }
            }
        }
        out
    }
}

/// All `t`-element subsets of `items` in lexicographic order.
pub(crate) fn combinations(items: &[usize], t: usize) -> Vec<Vec<usize>> {
    let n = items.len();
    if t > n {
        return Vec::new();
    }
    let mut idx: Vec<usize> = (0..t).collect();
    let mut out = Vec::new();
    loop {
        out.push(idx.iter().map(|&i| items[i]).collect());
        let mut i = t;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] < n - t + i {
                idx[i] += 1;
                for j in i + 1..t {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Exact number of level combinations that a covering array for `spec` must
/// contain.
pub fn count_required_tuples(spec: &MixedStrengthSpec) -> u64 {
    let counts = spec.level_counts();
    spec.required_subsets()
        .iter()
        .map(|s| s.iter().map(|&p| counts[p] as u64).product::<u64>())
        .sum()
}
