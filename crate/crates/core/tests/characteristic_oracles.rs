//! Closed-form oracles for the layer paths of the built-in examples, and
//! convergence behavior of the path integrator.

use layertrack_core::characteristic::{horizon_diagnostics, integrate, integrate_fixed};
use layertrack_core::problem::{example_1, example_2};

/// Example 1 path: logistic profile solving d' = (0.81 - (d - 0.2)^2)/4,
/// d(0) = 0.2.
fn path_1(t: f64) -> f64 {
    let e = (-9.0 * t / 20.0).exp();
    (1.1 - 0.7 * e) / (1.0 + e)
}

/// Example 2 path: d' = 1 + d^2, d(0) = 0.1.
fn path_2(t: f64) -> f64 {
    (t + 0.1f64.atan()).tan()
}

#[test]
fn example_1_matches_the_closed_form() {
    let c = integrate(&example_1(), 1e-12).unwrap();
    let mut worst = 0.0f64;
    for k in 0..=1000 {
        let t = 0.5 * k as f64 / 1000.0;
        worst = worst.max((c.position(t).unwrap() - path_1(t)).abs());
    }
    assert!(worst <= 1e-10, "max deviation {worst:e}");
    assert!((c.end_position() - 0.30082500298031589).abs() < 1e-12);
}

#[test]
fn example_2_matches_the_closed_form() {
    let c = integrate(&example_2(), 1e-12).unwrap();
    let mut worst = 0.0f64;
    for k in 0..=1000 {
        let t = 0.5 * k as f64 / 1000.0;
        worst = worst.max((c.position(t).unwrap() - path_2(t)).abs());
    }
    assert!(worst <= 1e-10, "max deviation {worst:e}");
    assert!((c.end_position() - 0.68365048611874958).abs() < 1e-12);
}

#[test]
fn integrator_is_fourth_order() {
    // successive step-halving differences must shrink 16-fold
    let p = example_1();
    let ends: Vec<f64> = [16usize, 32, 64, 128]
        .iter()
        .map(|&n| integrate_fixed(&p, n).unwrap().end_position())
        .collect();
    let d1 = (ends[1] - ends[0]).abs();
    let d2 = (ends[2] - ends[1]).abs();
    let d3 = (ends[3] - ends[2]).abs();
    for ratio in [d1 / d2, d2 / d3] {
        assert!((14.0..=18.0).contains(&ratio), "Richardson ratio {ratio}");
    }
}

#[test]
fn halving_the_step_stays_within_tolerance() {
    let p = example_2();
    let tol = 1e-12;
    let c = integrate(&p, tol).unwrap();
    let refined = integrate_fixed(&p, 2 * c.steps()).unwrap();
    assert!((refined.end_position() - c.end_position()).abs() < tol);
}

#[test]
fn positions_are_strictly_increasing() {
    for p in [example_1(), example_2()] {
        let c = integrate(&p, 1e-12).unwrap();
        let mut prev = c.position(0.0).unwrap();
        for k in 1..=1000 {
            let t = 0.5 * k as f64 / 1000.0;
            let next = c.position(t).unwrap();
            assert!(next > prev, "not increasing at t = {t}");
            prev = next;
        }
    }
}

#[test]
fn example_2_violates_the_time_restriction() {
    // sup |a_s| = 2 and delta is small, so the restriction fails; it is
    // reported, never enforced
    let p = example_2();
    let c = integrate(&p, 1e-12).unwrap();
    let h = horizon_diagnostics(&c, &p);
    assert!((h.delta - 0.35149945986805603).abs() < 1e-9);
    assert!((h.sup_convection_slope - 2.0).abs() < 1e-5);
    assert!((h.time_restriction_lhs - 5.6899091701328623).abs() < 1e-4);
    assert!(!h.time_restriction_ok);
}
