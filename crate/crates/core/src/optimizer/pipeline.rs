use rayon::prelude::*;

use super::campaign::{evaluate, CampaignResult, Phase};
use super::objective::Objective;
use super::search::{falsify_sa, SaConfig};
use super::space::{Dim, SearchSpace};
use super::OptimizerError;
use crate::covering_array::{CoveringArray, LevelValue};
use crate::rng;

/// Maps each covering-array row to a point of `space`. Variables outside the
/// array sit at their midpoint (continuous) or first level (discrete).
pub fn ca_points(ca: &CoveringArray, space: &SearchSpace) -> Result<Vec<Vec<f64>>, OptimizerError> {
    let dims = space.dims();
    let mut columns = Vec::new();
    for (c, domain) in ca.spec.domains.iter().enumerate() {
        let k = dims
            .iter()
            .position(|d| d.name() == domain.name)
            .ok_or_else(|| {
                OptimizerError::CaMismatch(format!("`{}` is not a search variable", domain.name))
            })?;
        columns.push((c, k));
    }
    let base = space.midpoint();
    (0..ca.len())
        .map(|r| {
            let values = ca.values(r);
            let mut point = base.clone();
            for &(c, k) in &columns {
                point[k] = level_value(&dims[k], &values[c], ca.rows[r][c])?;
            }
            Ok(point)
        })
        .collect()
}

fn level_value(dim: &Dim, value: &LevelValue, index: usize) -> Result<f64, OptimizerError> {
    let parsed = value.as_f64().filter(|&v| dim.contains(v));
    match (dim, parsed) {
        (_, Some(v)) => Ok(v),
        // Symbolic discrete levels map by position.
        (Dim::Levels { levels, .. }, None) if matches!(value, LevelValue::Symbol(_)) => {
            levels.get(index).copied().ok_or_else(|| {
                OptimizerError::CaMismatch(format!("`{}` has no level {index}", dim.name()))
            })
        }
        _ => Err(OptimizerError::CaMismatch(format!(
            "value {value} is outside `{}`",
            dim.name()
        ))),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub per_seed_budget: usize,
    pub max_extra_budget: usize,
    pub seed: u64,
    /// Annealing settings for phase 2; budget, seed and warm start are
    /// overridden per chain.
    pub sa: SaConfig,
}

impl PipelineConfig {
    pub fn new(per_seed_budget: usize, max_extra_budget: usize, seed: u64) -> Self {
        Self {
            per_seed_budget,
            max_extra_budget,
            seed,
            sa: SaConfig::default(),
        }
    }
}

/// Evaluates every covering-array row, then refines the least robust
/// non-falsifying rows with annealing chains. Discrete variables covered by
/// the array stay frozen to the row during refinement.
pub fn ca_then_falsify(
    ca: &CoveringArray,
    space: &SearchSpace,
    objective: &dyn Objective,
    cfg: &PipelineConfig,
) -> Result<CampaignResult, OptimizerError> {
    space.validate()?;
    let points = ca_points(ca, space)?;
    let outcomes: Vec<_> = points
        .par_iter()
        .map(|p| evaluate(space, objective, p))
        .collect();

    let mut result = CampaignResult::new(space);
    let mut ranked = Vec::new();
    for (r, (point, outcome)) in points.iter().zip(outcomes).enumerate() {
        let outcome = outcome?;
        if outcome.robustness > 0.0 {
            ranked.push((outcome.robustness, r));
        }
        result.record(Phase::CoveringArray, point.clone(), outcome, Some(r));
    }
    ranked.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let frozen: Vec<&str> = ca
        .spec
        .domains
        .iter()
        .map(|d| d.name.as_str())
        .filter(|n| space.discrete.iter().any(|v| v.name == *n))
        .collect();
    let dims = space.dims();
    let mut spent = 0;
    for (_, r) in ranked {
        let budget = cfg.per_seed_budget.min(cfg.max_extra_budget - spent);
        if budget == 0 {
            break;
        }
        let mut sub = space.clone();
        for name in &frozen {
            let k = dims.iter().position(|d| d.name() == *name).unwrap();
            sub = sub.freeze(name, points[r][k]);
        }
        let chain_cfg = SaConfig {
            budget,
            seed: rng::derive_seed(cfg.seed, r as u64),
            warm_start: Some(points[r].clone()),
            ..cfg.sa.clone()
        };
        let mut chain = falsify_sa(&sub, objective, &chain_cfg)?;
        for e in &mut chain.evaluations {
            e.phase = Phase::Refinement;
        }
        spent += chain.len();
        result.absorb(chain, Some(r));
    }
    log::info!(
        "pipeline: {} rows, {} refinement evaluations, best {}",
        points.len(),
        spent,
        result.best_robustness()
    );
    Ok(result)
}
