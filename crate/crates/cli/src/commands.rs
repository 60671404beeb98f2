use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use anyhow::{bail, Context, Result};
use serde::Serialize;
use stlf_core::covering_array::{generate_ca as build_ca, read_ca, write_ca, MixedStrengthSpec};
use stlf_core::monitor::monitor as check;
use stlf_core::optimizer::{
    ca_then_falsify, falsify_sa, robustness_heatmap, uniform_random_search, Best, CampaignResult,
    Objective, ObjectiveError, Outcome, PipelineConfig, SaConfig, ScenarioObjective,
};
use stlf_core::scenario::{Assignment, Scenario, ScenarioConfig};
use stlf_core::stl::parse;
use stlf_core::trace::{read_trace, write_trace};

use crate::config::{Config, Method};

pub fn monitor(formula: Option<String>, formula_file: Option<PathBuf>, trace: &Path) -> Result<u8> {
    let text = match (formula, formula_file) {
        (Some(t), _) => t,
        (None, Some(p)) => {
            fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))?
        }
        (None, None) => bail!("no formula given"),
    };
    let f = parse(text.trim())?;
    let tr = read_trace(trace).with_context(|| format!("reading {}", trace.display()))?;
    let v = check(&f, &tr)?;
    println!("{}", serde_json::to_string_pretty(&v)?);
    Ok(if v.inconclusive {
        2
    } else if v.satisfied {
        0
    } else {
        1
    })
}

pub fn generate_ca(spec: &Path, seed: u64, out: &Path) -> Result<u8> {
    let text = fs::read_to_string(spec).with_context(|| format!("reading {}", spec.display()))?;
    let spec: MixedStrengthSpec =
        serde_json::from_str(&text).context("invalid covering-array spec")?;
    let ca = build_ca(&spec, seed)?;
    let report = write_ca(&ca, out)?;
    println!(
        "rows: {}, coverage: {}/{} ({:.1}%)",
        ca.len(),
        report.covered,
        report.required,
        report.percent()
    );
    Ok(0)
}

#[derive(Debug, Serialize)]
struct SimulationFailure {
    assignment: Assignment,
    message: String,
}

/// Records simulator failures and scores them `+inf` so a campaign keeps
/// going; monitoring failures still abort.
struct Tolerant<'a> {
    inner: &'a dyn Objective,
    failures: Mutex<Vec<SimulationFailure>>,
}

impl Objective for Tolerant<'_> {
    fn evaluate(&self, a: &Assignment) -> Result<Outcome, ObjectiveError> {
        match self.inner.evaluate(a) {
            Err(ObjectiveError::Simulator(e)) => {
                log::warn!("simulation failed: {e}");
                self.failures.lock().unwrap().push(SimulationFailure {
                    assignment: a.clone(),
                    message: e.to_string(),
                });
                Ok(Outcome {
                    robustness: f64::INFINITY,
                    trace: None,
                })
            }
            other => other,
        }
    }
}

#[derive(Debug, Serialize)]
struct Summary<'a> {
    method: &'static str,
    seed: u64,
    budget: usize,
    evaluations: usize,
    falsified: bool,
    falsifying_count: usize,
    dims: &'a [String],
    best: &'a Option<Best>,
    min_envelope: &'a [f64],
    simulation_failures: Vec<SimulationFailure>,
}

pub fn falsify(config: &Path, seed: u64, out: &Path, ca: Option<PathBuf>) -> Result<u8> {
    let cfg = Config::load(config)?;
    let search = cfg.search()?;
    let method = cfg.method.context("config has no `method`")?;
    if search.budget == 0 {
        bail!("empty budget");
    }
    let objective = ScenarioObjective::new(cfg.scenario.clone(), cfg.requirement()?)?;
    let tolerant = Tolerant {
        inner: &objective,
        failures: Mutex::new(Vec::new()),
    };
    let sa = SaConfig {
        budget: search.budget,
        seed,
        ..search.sa.clone()
    };
    let result: CampaignResult = match method {
        Method::Random => uniform_random_search(&search.space, &tolerant, search.budget, seed)?,
        Method::Sa => falsify_sa(&search.space, &tolerant, &sa)?,
        Method::CaSa => {
            let path = match ca.or_else(|| search.ca_file.as_ref().map(|p| cfg.resolve(p))) {
                Some(p) => p,
                None => bail!(
                    "missing input: method ca+sa needs a covering array (--ca or search.ca_file)"
                ),
            };
            let array = read_ca(&path).with_context(|| format!("reading {}", path.display()))?;
            if array.len() > search.budget {
                log::warn!(
                    "covering array has {} rows, more than the budget of {}",
                    array.len(),
                    search.budget
                );
            }
            let pipeline = PipelineConfig {
                per_seed_budget: search.per_seed_budget,
                max_extra_budget: search.budget.saturating_sub(array.len()),
                seed,
                sa,
            };
            ca_then_falsify(&array, &search.space, &tolerant, &pipeline)?
        }
    };

    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let mut w = BufWriter::new(File::create(out.join("evaluations.jsonl"))?);
    for e in &result.evaluations {
        serde_json::to_writer(&mut w, e)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    if let Some(tr) = &result.best_trace {
        write_trace(tr, &out.join("best_trace.csv"))?;
    }
    let mut failures = tolerant.failures.into_inner().unwrap();
    // Parallel phases record failures in any order.
    failures.sort_by_cached_key(|f| serde_json::to_string(f).unwrap_or_default());
    let summary = Summary {
        method: match method {
            Method::Random => "random",
            Method::Sa => "sa",
            Method::CaSa => "ca+sa",
        },
        seed,
        budget: search.budget,
        evaluations: result.len(),
        falsified: result.falsified,
        falsifying_count: result.falsifying_count,
        dims: &result.dims,
        best: &result.best,
        min_envelope: &result.min_envelope,
        simulation_failures: failures,
    };
    let mut f = File::create(out.join("summary.json"))?;
    serde_json::to_writer_pretty(&mut f, &summary)?;
    f.write_all(b"\n")?;

    println!(
        "{} evaluations, best robustness {}, {}",
        result.len(),
        result.best_robustness(),
        if result.falsified {
            "falsified"
        } else {
            "not falsified"
        }
    );
    Ok(u8::from(result.falsified))
}

#[derive(Serialize)]
struct HeatmapAxes<'a> {
    rows: &'a stlf_core::optimizer::Axis,
    cols: &'a stlf_core::optimizer::Axis,
    errors: &'a [stlf_core::optimizer::CellError],
}

pub fn heatmap(config: &Path, out: &Path, rows: Option<usize>, cols: Option<usize>) -> Result<u8> {
    let cfg = Config::load(config)?;
    let search = cfg.search()?;
    let n = rows
        .or(cfg.heatmap.as_ref().map(|h| h.rows))
        .context("grid rows not given")?;
    let m = cols
        .or(cfg.heatmap.as_ref().map(|h| h.cols))
        .context("grid cols not given")?;
    let objective = ScenarioObjective::new(cfg.scenario.clone(), cfg.requirement()?)?;
    let h = robustness_heatmap(&search.space, &objective, n, m)?;

    let mut w =
        csv::Writer::from_path(out).with_context(|| format!("writing {}", out.display()))?;
    for row in &h.values {
        w.write_record(
            row.iter()
                .map(|v| v.map_or(String::new(), |v| v.to_string())),
        )?;
    }
    w.flush()?;
    let axes = HeatmapAxes {
        rows: &h.rows,
        cols: &h.cols,
        errors: &h.errors,
    };
    let mut f = File::create(out.with_extension("json"))?;
    serde_json::to_writer_pretty(&mut f, &axes)?;
    f.write_all(b"\n")?;
    println!(
        "{n} x {m} cells, {} negative, {} failed",
        h.counterexamples().len(),
        h.errors.len()
    );
    Ok(0)
}

pub fn simulate(config: &Path, out: &Path) -> Result<u8> {
    let cfg = Config::load(config)?;
    let assignment = cfg.assignment.clone().unwrap_or_default();
    let scenario: &ScenarioConfig = &cfg.scenario;
    let tr = scenario.simulate(&assignment)?;
    write_trace(&tr, out)?;
    println!("{} samples over {} s", tr.len(), tr.duration);
    Ok(0)
}
