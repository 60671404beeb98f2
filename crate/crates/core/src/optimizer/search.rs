use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::campaign::{evaluate, CampaignResult, Phase};
use super::objective::Objective;
use super::space::{Dim, SearchSpace};
use super::OptimizerError;
use crate::rng;

/// Independent uniform samples until `budget` runs out or one falsifies.
pub fn uniform_random_search(
    space: &SearchSpace,
    objective: &dyn Objective,
    budget: usize,
    seed: u64,
) -> Result<CampaignResult, OptimizerError> {
    space.validate()?;
    if budget == 0 {
        return Err(OptimizerError::EmptyBudget);
    }
    let mut rng = rng::from_seed(seed);
    let mut result = CampaignResult::new(space);
    for _ in 0..budget {
        let point = space.sample(&mut rng);
        let outcome = evaluate(space, objective, &point)?;
        result.record(Phase::Random, point, outcome, None);
        if result.falsified {
            break;
        }
    }
    Ok(result)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SaConfig {
    pub budget: usize,
    /// `None` means 0.1 times the magnitude of the first robustness value.
    pub initial_temperature: Option<f64>,
    pub cooling_factor: f64,
    pub proposal_scale: f64,
    pub restart_patience: usize,
    pub discrete_resample_prob: f64,
    pub seed: u64,
    pub warm_start: Option<Vec<f64>>,
}

impl Default for SaConfig {
    fn default() -> Self {
        Self {
            budget: 100,
            initial_temperature: None,
            cooling_factor: 0.97,
            proposal_scale: 0.1,
            restart_patience: 30,
            discrete_resample_prob: 0.2,
            seed: 0,
            warm_start: None,
        }
    }
}

impl SaConfig {
    pub fn with_budget(budget: usize, seed: u64) -> Self {
        Self {
            budget,
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), OptimizerError> {
        if self.budget == 0 {
            return Err(OptimizerError::EmptyBudget);
        }
        let ok = self.cooling_factor > 0.0
            && self.cooling_factor < 1.0
            && self.proposal_scale > 0.0
            && self.proposal_scale <= 1.0
            && (0.0..=1.0).contains(&self.discrete_resample_prob)
            && self
                .initial_temperature
                .is_none_or(|t| t > 0.0 && t.is_finite());
        if ok {
            Ok(())
        } else {
            Err(OptimizerError::InvalidConfig(
                "need 0 < cooling_factor < 1, 0 < proposal_scale <= 1, positive temperature".into(),
            ))
        }
    }
}

fn propose(dims: &[Dim], x: &[f64], cfg: &SaConfig, rng: &mut impl Rng) -> Vec<f64> {
    let mut y = x.to_vec();
    for (k, d) in dims.iter().enumerate() {
        if let Dim::Range { lo, hi, .. } = d {
            let step = Normal::new(0.0, cfg.proposal_scale * (hi - lo))
                .expect("positive standard deviation")
                .sample(rng);
            y[k] = (x[k] + step).clamp(*lo, *hi);
        }
    }
    let discrete: Vec<usize> = dims
        .iter()
        .enumerate()
        .filter(|(_, d)| matches!(d, Dim::Levels { levels, .. } if levels.len() > 1))
        .map(|(k, _)| k)
        .collect();
    if !discrete.is_empty() && rng.random::<f64>() < cfg.discrete_resample_prob {
        let k = discrete[rng.random_range(0..discrete.len())];
        y[k] = dims[k].sample(rng);
    }
    y
}

/// Simulated annealing on robustness with Metropolis acceptance.
pub fn falsify_sa(
    space: &SearchSpace,
    objective: &dyn Objective,
    cfg: &SaConfig,
) -> Result<CampaignResult, OptimizerError> {
    space.validate()?;
    cfg.validate()?;
    let dims = space.dims();
    let mut rng = rng::from_seed(cfg.seed);
    let mut result = CampaignResult::new(space);

    let mut x = match &cfg.warm_start {
        Some(w) => {
            if w.len() != dims.len() || !dims.iter().zip(w).all(|(d, &v)| d.contains(v)) {
                return Err(OptimizerError::InvalidConfig(
                    "warm start does not lie in the search space".into(),
                ));
            }
            w.clone()
        }
        None => space.sample(&mut rng),
    };
    let outcome = evaluate(space, objective, &x)?;
    let mut r = outcome.robustness;
    result.record(Phase::Annealing, x.clone(), outcome, None);

    let mut temperature = cfg.initial_temperature.unwrap_or(0.1 * r.abs());
    if !(temperature > 0.0 && temperature.is_finite()) {
        temperature = 1.0;
    }
    let (mut best_x, mut best_r) = (x.clone(), r);
    let mut stall = 0;
    while !result.falsified && result.len() < cfg.budget {
        let y = propose(&dims, &x, cfg, &mut rng);
        let outcome = evaluate(space, objective, &y)?;
        let ry = outcome.robustness;
        result.record(Phase::Annealing, y.clone(), outcome, None);

        let delta = ry - r;
        let accept = !(delta > 0.0) || rng.random::<f64>() < (-delta / temperature).exp();
        if ry < best_r {
            best_x.clone_from(&y);
            best_r = ry;
            stall = 0;
        } else {
            stall += 1;
        }
        if accept {
            x = y;
            r = ry;
            temperature *= cfg.cooling_factor;
        }
        if stall >= cfg.restart_patience {
            x.clone_from(&best_x);
            r = best_r;
            stall = 0;
        }
    }
    Ok(result)
}
