use proptest::prelude::*;
use stlf_core::covering_array::{generate_ca, MixedStrengthSpec, ParameterDomain};
use stlf_core::optimizer::{
    ca_then_falsify, falsify_sa, robustness_heatmap, uniform_random_search, FnObjective, Objective,
    ObjectiveError, OptimizerError, Outcome, Phase, PipelineConfig, SaConfig, SearchSpace,
};
use stlf_core::scenario::{Assignment, Interpolation};

fn unit(name: &str) -> SearchSpace {
    SearchSpace::new().continuous(name, 0.0, 1.0)
}

fn x_of(a: &Assignment) -> f64 {
    a.scalars["x"]
}

fn non_increasing(env: &[f64]) -> bool {
    env.windows(2).all(|w| w[1] <= w[0])
}

#[test]
fn constant_objective_never_falsifies() {
    let obj = FnObjective(|_: &Assignment| 1.0);
    let r = uniform_random_search(&unit("x"), &obj, 15, 3).unwrap();
    assert!(!r.falsified);
    assert_eq!(r.len(), 15);
    assert_eq!(r.best_robustness(), 1.0);
    let r = falsify_sa(&unit("x"), &obj, &SaConfig::with_budget(25, 3)).unwrap();
    assert_eq!(r.len(), 25);
    assert!(r.min_envelope.iter().all(|&v| v == 1.0));
    assert!(!r.falsified);
}

#[test]
fn budget_one_is_one_evaluation() {
    let obj = FnObjective(|_: &Assignment| 1.0);
    assert_eq!(
        uniform_random_search(&unit("x"), &obj, 1, 0).unwrap().len(),
        1
    );
    assert!(matches!(
        uniform_random_search(&unit("x"), &obj, 0, 0),
        Err(OptimizerError::EmptyBudget)
    ));
    assert!(matches!(
        falsify_sa(&unit("x"), &obj, &SaConfig::with_budget(0, 0)),
        Err(OptimizerError::EmptyBudget)
    ));
}

#[test]
fn random_search_on_identity_stops_at_first_negative() {
    // P(no negative sample in 20) = 2^-20.
    let space = SearchSpace::new().continuous("x", -1.0, 1.0);
    let obj = FnObjective(x_of);
    let r = uniform_random_search(&space, &obj, 20, 11).unwrap();
    assert!(r.falsified);
    let last = r.evaluations.last().unwrap();
    assert!(last.robustness < 0.0);
    assert!(r.evaluations[..r.len() - 1]
        .iter()
        .all(|e| e.robustness >= 0.0));
    assert_eq!(r.falsifying_count, 1);
    // Recorded run: ChaCha8 seed 11 falsifies on its first draw.
    assert_eq!(r.len(), 1);
    assert_eq!(r.evaluations[0].point, vec![-0.28667412822945115]);
    // Replays exactly.
    let again = uniform_random_search(&space, &obj, 20, 11).unwrap();
    assert_eq!(again.evaluations, r.evaluations);
}

#[test]
fn annealing_finds_narrow_basin() {
    let obj = FnObjective(|a: &Assignment| (x_of(a) - 0.7).abs() - 0.05);
    let hits = (0..20)
        .filter(|&seed| {
            let r = falsify_sa(&unit("x"), &obj, &SaConfig::with_budget(200, seed)).unwrap();
            assert!(non_increasing(&r.min_envelope));
            assert!(r.len() <= 200);
            r.falsified
        })
        .count();
    assert!(hits >= 18, "{hits}/20");
}

#[test]
fn warm_start_at_counterexample_stops_immediately() {
    let obj = FnObjective(|a: &Assignment| (x_of(a) - 0.7).abs() - 0.05);
    let cfg = SaConfig {
        warm_start: Some(vec![0.7]),
        ..SaConfig::with_budget(50, 0)
    };
    let r = falsify_sa(&unit("x"), &obj, &cfg).unwrap();
    assert_eq!(r.len(), 1);
    assert!(r.falsified);
    let cfg = SaConfig {
        warm_start: Some(vec![1.5]),
        ..SaConfig::with_budget(50, 0)
    };
    assert!(falsify_sa(&unit("x"), &obj, &cfg).is_err());
}

struct Failing;

impl Objective for Failing {
    fn evaluate(&self, a: &Assignment) -> Result<Outcome, ObjectiveError> {
        if a.scalars["x"] > 0.5 {
            Err(ObjectiveError::Other("boom".into()))
        } else {
            Ok(Outcome {
                robustness: 1.0,
                trace: None,
            })
        }
    }
}

#[test]
fn simulator_failure_carries_the_point() {
    let err = uniform_random_search(&unit("x"), &Failing, 50, 1).unwrap_err();
    match err {
        OptimizerError::Evaluation { point, .. } => {
            assert_eq!(point[0].0, "x");
            assert!(point[0].1 > 0.5);
        }
        other => panic!("unexpected {other:?}"),
    }
}

fn three_by_four() -> MixedStrengthSpec {
    MixedStrengthSpec::uniform(
        ["d1", "d2", "d3"]
            .iter()
            .map(|n| ParameterDomain::discrete(*n, ["0", "1", "2", "3"]))
            .collect(),
        2,
    )
}

fn needle_space() -> SearchSpace {
    SearchSpace::new()
        .continuous("x", 0.0, 1.0)
        .discrete("d1", [0.0, 1.0, 2.0, 3.0])
        .discrete("d2", [0.0, 1.0, 2.0, 3.0])
        .discrete("d3", [0.0, 1.0, 2.0, 3.0])
}

#[test]
fn all_rows_falsifying_skips_refinement() {
    let ca = generate_ca(&three_by_four(), 0).unwrap();
    let obj = FnObjective(|_: &Assignment| -1.0);
    let r = ca_then_falsify(&ca, &needle_space(), &obj, &PipelineConfig::new(20, 100, 0)).unwrap();
    assert_eq!(r.len(), ca.len());
    assert_eq!(r.falsifying_count, ca.len());
    assert!(r
        .evaluations
        .iter()
        .all(|e| e.phase == Phase::CoveringArray));
}

#[test]
fn zero_extra_budget_is_the_covering_array_alone() {
    let ca = generate_ca(&three_by_four(), 0).unwrap();
    let obj = FnObjective(|a: &Assignment| a.scalars["d1"] + a.scalars["x"]);
    let r = ca_then_falsify(&ca, &needle_space(), &obj, &PipelineConfig::new(20, 0, 0)).unwrap();
    assert_eq!(r.len(), ca.len());
    for (row, e) in r.evaluations.iter().enumerate() {
        assert_eq!(e.row, Some(row));
        // x sits at its midpoint; d1 comes from the row.
        assert_eq!(e.point[0], 0.5);
        assert_eq!(e.point[1], ca.rows[row][0] as f64);
    }
}

#[test]
fn refinement_keeps_covered_discretes_frozen() {
    let ca = generate_ca(&three_by_four(), 0).unwrap();
    let obj = FnObjective(|a: &Assignment| 1.0 + a.scalars["d1"] + a.scalars["x"]);
    let r = ca_then_falsify(&ca, &needle_space(), &obj, &PipelineConfig::new(10, 35, 0)).unwrap();
    assert_eq!(r.len(), ca.len() + 35);
    for e in r
        .evaluations
        .iter()
        .filter(|e| e.phase == Phase::Refinement)
    {
        let row = e.row.unwrap();
        assert_eq!(e.point[1], ca.rows[row][0] as f64);
        assert_eq!(e.point[2], ca.rows[row][1] as f64);
    }
    // Lowest-robustness rows (d1 = 0) are refined first.
    let first = r
        .evaluations
        .iter()
        .find(|e| e.phase == Phase::Refinement)
        .unwrap();
    assert_eq!(first.point[1], 0.0);
    assert!(non_increasing(&r.min_envelope));
}

#[test]
fn heatmap_shapes() {
    let space = SearchSpace::new()
        .continuous("a", 0.0, 1.0)
        .continuous("b", 0.0, 2.0);
    let h = robustness_heatmap(&space, &FnObjective(|_: &Assignment| 3.0), 3, 4).unwrap();
    assert_eq!(h.values.len(), 3);
    assert!(h.values.iter().flatten().all(|v| *v == Some(3.0)));
    assert_eq!(h.cols.values, vec![0.25, 0.75, 1.25, 1.75]);

    let at = FnObjective(|a: &Assignment| a.scalars["a"] * 10.0 + a.scalars["b"]);
    let h = robustness_heatmap(&space, &at, 1, 1).unwrap();
    assert_eq!(h.values, vec![vec![Some(6.0)]]);

    let h = robustness_heatmap(
        &space,
        &FnObjective(|a: &Assignment| a.scalars["a"] - 0.5),
        2,
        2,
    )
    .unwrap();
    assert_eq!(h.counterexamples(), vec![(0, 0), (0, 1)]);

    let three = space.clone().continuous("c", 0.0, 1.0);
    assert!(robustness_heatmap(&three, &FnObjective(|_: &Assignment| 0.0), 2, 2).is_err());
    let fixed = space.clone().discrete("mu", [2.0]);
    assert!(robustness_heatmap(&fixed, &FnObjective(|_: &Assignment| 0.0), 2, 2).is_ok());
    let signal = SearchSpace::new().signal("xi", 2, -1.0, 1.0, Interpolation::Linear, 10.0);
    let h = robustness_heatmap(&signal, &FnObjective(|_: &Assignment| 0.0), 2, 2).unwrap();
    assert_eq!(
        (h.rows.name.as_str(), h.cols.name.as_str()),
        ("xi[0]", "xi[1]")
    );
}

#[test]
fn heatmap_marks_failed_cells() {
    let space = SearchSpace::new()
        .continuous("x", 0.0, 1.0)
        .continuous("y", 0.0, 1.0);
    let h = robustness_heatmap(&space, &Failing, 2, 2).unwrap();
    assert_eq!(h.errors.len(), 2);
    assert_eq!(h.values[0], vec![Some(1.0), Some(1.0)]);
    assert_eq!(h.values[1], vec![None, None]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn campaigns_are_reproducible_and_monotone(seed in any::<u64>(), budget in 1usize..60, c in -0.5f64..1.0) {
        let obj = FnObjective(move |a: &Assignment| (a.scalars["x"] - 0.3).abs() + c);
        let space = unit("x").discrete("k", [1.0, 2.0, 3.0]);
        let a = falsify_sa(&space, &obj, &SaConfig::with_budget(budget, seed)).unwrap();
        let b = falsify_sa(&space, &obj, &SaConfig::with_budget(budget, seed)).unwrap();
        prop_assert_eq!(&a.evaluations, &b.evaluations);
        prop_assert!(non_increasing(&a.min_envelope));
        prop_assert!(a.len() <= budget);
        prop_assert_eq!(a.falsified, a.best_robustness() < 0.0);
        if a.falsified {
            prop_assert!(a.evaluations.last().unwrap().robustness < 0.0);
            prop_assert_eq!(a.falsifying_count, 1);
        }
        let u = uniform_random_search(&space, &obj, budget, seed).unwrap();
        prop_assert!(non_increasing(&u.min_envelope));
        prop_assert_eq!(u.min_envelope.len(), u.len());
    }
}
