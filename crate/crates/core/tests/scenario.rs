use std::f64::consts::FRAC_PI_2;

use approx::assert_relative_eq;
use stlf_core::monitor::{monitor, robustness};
use stlf_core::optimizer::{Objective, ScenarioObjective};
use stlf_core::requirements::{build_r1, build_r2, build_r4, RequirementParams};
use stlf_core::scenario::*;
use stlf_core::stl::parse;
use stlf_core::trace::Trace;

fn x0() -> TwoCarState {
    TwoCarState {
        z_ego: 0.0,
        v_ego: 20.0,
        z_agent: 40.0,
        v_agent: 20.0,
    }
}

fn inputs(xi: f64, mu: f64) -> InputTrace {
    InputTrace::new()
        .with("xi", InputSignal::constant(xi))
        .with("mu", InputSignal::constant(mu))
}

fn col(t: &Trace, name: &str) -> Vec<f64> {
    t.column(name).unwrap()
}

#[test]
fn cruising_agent_moves_linearly() {
    let s = TwoCarState {
        v_agent: 10.0,
        ..x0()
    };
    let t = simulate_two_car(s, &inputs(0.0, 1.0), 10.0).unwrap();
    assert_eq!(t.len(), 201);
    for (k, z) in col(&t, "z_agent").iter().enumerate() {
        assert_eq!(*z, 40.0 + 0.5 * k as f64);
    }
}

#[test]
fn agent_speed_clamps_at_zero() {
    let s = TwoCarState {
        v_agent: 2.0,
        ..x0()
    };
    let t = simulate_two_car(s, &inputs(-1.0, 1.0), 5.0).unwrap();
    let v = col(&t, "v_agent");
    for (k, &time) in t.times().collect::<Vec<_>>().iter().enumerate() {
        if time >= 2.0 - 1e-9 {
            assert!(v[k].abs() < 1e-12, "t = {time}: {}", v[k]);
        }
        assert!(v[k] >= 0.0);
    }
}

// Reference values from an independent forward-Euler implementation of the
// same controller and update order.
#[test]
fn full_brake_golden() {
    let t = simulate_two_car(x0(), &inputs(-1.0, 1.0), 10.0).unwrap();
    let last = t.len() - 1;
    assert_relative_eq!(
        t.value(last, "z_ego").unwrap(),
        171.50117053169748,
        epsilon = 1e-9
    );
    assert_relative_eq!(
        t.value(last, "v_ego").unwrap(),
        11.370169113362401,
        epsilon = 1e-9
    );
    assert_relative_eq!(
        t.value(last, "z_agent").unwrap(),
        190.24999999999926,
        epsilon = 1e-9
    );
    assert_relative_eq!(
        t.value(last, "v_agent").unwrap(),
        9.999999999999858,
        epsilon = 1e-9
    );
    let gap = parse("[] (z_agent - z_ego > 0)").unwrap();
    let v = monitor(&gap, &t).unwrap();
    assert_relative_eq!(
        v.robustness,
        18.74882946830178 / 2f64.sqrt(),
        epsilon = 1e-9
    );
    assert_eq!(v.worst_time, 10.0);

    // Long run: the gap settles at a positive standstill value.
    let t = simulate_two_car(x0(), &inputs(-1.0, 1.0), 60.0).unwrap();
    let last = t.len() - 1;
    let gap = t.value(last, "z_agent").unwrap() - t.value(last, "z_ego").unwrap();
    assert_relative_eq!(gap, 4.96598864167143, epsilon = 1e-9);
    assert_eq!(t.value(last, "v_ego").unwrap(), 0.0);
    assert_relative_eq!(
        t.value(last, "z_agent").unwrap(),
        240.4999999999977,
        epsilon = 1e-9
    );
}

#[test]
fn deterministic_and_physically_sane() {
    let u = InputTrace::new()
        .with("xi", InputSignal::linear(vec![(0.0, 1.0), (10.0, -1.0)]))
        .with("mu", InputSignal::hold(vec![(0.0, 1.0), (4.0, 2.0)]));
    let a = simulate_two_car(x0(), &u, 10.0).unwrap();
    let b = simulate_two_car(x0(), &u, 10.0).unwrap();
    assert_eq!(a, b);
    let (za, va, ze, ve) = (
        col(&a, "z_agent"),
        col(&a, "v_agent"),
        col(&a, "z_ego"),
        col(&a, "v_ego"),
    );
    let vmax = va.iter().chain(&ve).fold(0.0f64, |m, &v| m.max(v)) * 2.0;
    for k in 1..a.len() {
        assert!(va[k] >= 0.0 && ve[k] >= 0.0);
        assert!((za[k] - za[k - 1]).abs() <= vmax * 0.05 + 1e-9);
        assert!((ze[k] - ze[k - 1]).abs() <= vmax * 0.05 + 1e-9);
    }
    // mu switches to 2 at t = 4 (hold), recorded as an input channel.
    assert_eq!(a.value(79, "mu").unwrap(), 1.0);
    assert_eq!(a.value(80, "mu").unwrap(), 2.0);
}

#[test]
fn halving_the_step_barely_moves_the_end_state() {
    let coarse = simulate_two_car(x0(), &inputs(-1.0, 1.0), 10.0).unwrap();
    let fine = simulate_two_car_with(x0(), &inputs(-1.0, 1.0), 10.0, &AccParams::default(), 0.025)
        .unwrap();
    for ch in ["z_ego", "z_agent"] {
        let a = *col(&coarse, ch).last().unwrap();
        let b = *col(&fine, ch).last().unwrap();
        assert!((a - b).abs() / b.abs() < 0.01, "{ch}: {a} vs {b}");
    }
}

#[test]
fn scenario_binding() {
    let sc = TwoCarScenario::new(x0(), 10.0);
    let a = Assignment::default()
        .scalar("mu", 2.0)
        .scalar("v_agent0", 5.0)
        .signal("xi", InputSignal::linear(vec![(0.0, 0.0), (10.0, 0.0)]));
    let t = sc.simulate(&a).unwrap();
    assert_eq!(t.value(0, "v_agent").unwrap(), 5.0);
    assert_eq!(t.value(1, "z_agent").unwrap(), 40.0 + 2.0 * 5.0 * 0.05);
    assert!(matches!(
        sc.simulate(&Assignment::default().scalar("bogus", 1.0)),
        Err(ScenarioError::UnknownVariable(_))
    ));
    let bad = ScenarioObjective::new(sc.clone(), parse("[] (speed > 0)").unwrap());
    assert!(bad.is_err());
    let ok = ScenarioObjective::new(sc, parse("[] (z_agent - z_ego > 0)").unwrap()).unwrap();
    assert!(ok.evaluate(&Assignment::default()).unwrap().robustness > 0.0);
}

fn crossing(ego_speed: f64, x: f64, y: f64, speed: f64) -> PerceptionInit {
    PerceptionInit {
        ego: EgoSpec {
            speed: ego_speed,
            radius: 1.0,
        },
        objects: vec![ObjectSpec {
            id: "ped".into(),
            x,
            y,
            heading: FRAC_PI_2,
            speed,
            yaw_rate: 0.0,
            radius: 0.5,
        }],
    }
}

fn dropout(sensor: SensorKind, start: f64, duration: f64) -> FaultWindow {
    FaultWindow {
        sensor,
        start,
        duration,
        kind: FaultKind::Dropout,
    }
}

#[test]
fn nominal_crossing_is_safe_and_fully_detected() {
    let t = simulate_perception_scenario(
        &crossing(10.0, 50.0, -5.0, 1.4),
        &InputTrace::new(),
        &PerceptionParams::default(),
        6.0,
    )
    .unwrap();
    for s in SENSOR_TAGS {
        assert_eq!(
            col(&t, &format!("W_ped_{s}")),
            col(&t, &format!("D_ped_{s}"))
        );
    }
    let r1 = build_r1(&RequirementParams::for_objects(["ped"])).unwrap();
    assert!(robustness(&r1, &t, 0).unwrap() > 0.0);
}

#[test]
fn channel_consistency() {
    let t = simulate_perception_scenario(
        &crossing(20.0, 40.0, -3.0, 1.5),
        &InputTrace::new(),
        &PerceptionParams::default(),
        6.0,
    )
    .unwrap();
    let (b, br, fc, dfmin) = (col(&t, "B"), col(&t, "br"), col(&t, "FC"), col(&t, "dfmin"));
    for k in 0..t.len() {
        assert_eq!(b[k] > 0.0, br[k] > 0.5);
        assert_eq!(fc[k] > 0.0, dfmin[k] < 0.5);
        assert!((0.0..=1.0).contains(&br[k]));
    }
    assert!(
        b.iter().any(|&v| v > 0.0),
        "the ego should brake hard at some point"
    );
    // Every detecting sensor reports a finite error.
    for s in SENSOR_TAGS {
        let d = col(&t, &format!("D_ped_{s}"));
        let e = col(&t, &format!("E_ped_{s}"));
        assert!(d.iter().zip(&e).all(|(d, e)| *d < 0.0 || e.is_finite()));
    }
}

#[test]
fn total_dropout_causes_collision() {
    // Without detection the ego keeps 20 m/s and reaches x = 40 at t = 2,
    // exactly when the pedestrian (1.5 m/s from y = -3) reaches the lane.
    let faults = [SensorKind::Ccd, SensorKind::Lidar, SensorKind::Radar]
        .map(|s| dropout(s, 0.0, 6.0))
        .to_vec();
    let p = PerceptionParams {
        faults,
        ..PerceptionParams::default()
    };
    let init = crossing(20.0, 40.0, -3.0, 1.5);
    let t = simulate_perception_scenario(&init, &InputTrace::new(), &p, 6.0).unwrap();
    let req = RequirementParams {
        t1: 0.5,
        t2: 1.5,
        ..RequirementParams::for_objects(["ped"])
    };
    let r1 = monitor(&build_r1(&req).unwrap(), &t).unwrap();
    assert!(r1.robustness < 0.0);
    assert!((r1.worst_time - 2.0).abs() < 1e-9);
    assert!(robustness(&build_r4(&req, "ped", "combined").unwrap(), &t, 0).unwrap() < 0.0);

    // The same geometry without faults is resolved by braking.
    let safe =
        simulate_perception_scenario(&init, &InputTrace::new(), &PerceptionParams::default(), 6.0)
            .unwrap();
    assert!(robustness(&build_r1(&req).unwrap(), &safe, 0).unwrap() > 0.0);
    assert!(robustness(&build_r4(&req, "ped", "combined").unwrap(), &safe, 0).unwrap() > 0.0);
}

#[test]
fn short_dropout_satisfies_detection_deadline() {
    let req = RequirementParams::for_objects(["ped"]);
    let p = PerceptionParams {
        faults: vec![dropout(SensorKind::Lidar, 1.0, req.t1 / 2.0)],
        ..PerceptionParams::default()
    };
    let t = simulate_perception_scenario(
        &crossing(10.0, 50.0, -5.0, 1.4),
        &InputTrace::new(),
        &p,
        6.0,
    )
    .unwrap();
    let d = col(&t, "D_ped_lidar");
    assert!(d.iter().any(|&v| v < 0.0));
    assert!(robustness(&build_r2(&req, "ped", "lidar").unwrap(), &t, 0).unwrap() > 0.0);
    // A dropout longer than the deadline violates it.
    let p = PerceptionParams {
        faults: vec![dropout(SensorKind::Lidar, 1.0, 2.0 * req.t1)],
        ..PerceptionParams::default()
    };
    let t = simulate_perception_scenario(
        &crossing(10.0, 50.0, -5.0, 1.4),
        &InputTrace::new(),
        &p,
        6.0,
    )
    .unwrap();
    assert!(robustness(&build_r2(&req, "ped", "lidar").unwrap(), &t, 0).unwrap() < 0.0);
}

#[test]
fn error_spike_raises_localization_error() {
    let p = PerceptionParams {
        faults: vec![FaultWindow {
            sensor: SensorKind::Radar,
            start: 1.0,
            duration: 1.0,
            kind: FaultKind::ErrorSpike { magnitude: 3.0 },
        }],
        ..PerceptionParams::default()
    };
    let t = simulate_perception_scenario(
        &crossing(10.0, 50.0, -5.0, 1.4),
        &InputTrace::new(),
        &p,
        3.0,
    )
    .unwrap();
    let e = col(&t, "E_ped_radar");
    assert_relative_eq!(e[10], 0.1);
    assert_relative_eq!(e[30], 3.1);
    // Fusion takes the best detecting sensor.
    assert_relative_eq!(col(&t, "E_ped_combined")[30], 0.1);
    assert_eq!(t.params["fault0_magnitude"], 3.0);
}

#[test]
fn perception_errors() {
    let u = InputTrace::new();
    let overlap = crossing(10.0, 1.0, 0.0, 1.0);
    assert!(matches!(
        simulate_perception_scenario(&overlap, &u, &PerceptionParams::default(), 5.0),
        Err(ScenarioError::Overlap(_))
    ));
    let p = PerceptionParams {
        faults: vec![dropout(SensorKind::Ccd, 4.0, 2.0)],
        ..PerceptionParams::default()
    };
    assert!(matches!(
        simulate_perception_scenario(&crossing(10.0, 50.0, -5.0, 1.4), &u, &p, 5.0),
        Err(ScenarioError::FaultWindow { .. })
    ));
}

#[test]
fn perception_binding_and_speed_scale() {
    let sc = PerceptionScenario {
        init: crossing(10.0, 50.0, -5.0, 1.4),
        params: PerceptionParams {
            faults: vec![dropout(SensorKind::Ccd, 0.0, 1.0)],
            ..PerceptionParams::default()
        },
        duration: 4.0,
    };
    let a = Assignment::default()
        .scalar("fault0_start", 2.0)
        .scalar("ped_speed", 0.0)
        .signal(speed_scale_channel("ped"), InputSignal::constant(1.0));
    let t = sc.simulate(&a).unwrap();
    assert_eq!(t.params["fault0_start"], 2.0);
    assert!(col(&t, "y_ped").iter().all(|&y| y == -5.0));
    let a = Assignment::default().signal(speed_scale_channel("ped"), InputSignal::constant(2.0));
    let t = sc.simulate(&a).unwrap();
    assert_relative_eq!(
        t.value(1, "y_ped").unwrap(),
        -5.0 + 2.8 * 0.05,
        epsilon = 1e-12
    );
    assert!(sc
        .simulate(&Assignment::default().scalar("car_x", 1.0))
        .is_err());
    assert!(sc.space().channel_index("D_ped_combined").is_some());
}
