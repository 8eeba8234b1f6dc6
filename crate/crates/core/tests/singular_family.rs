//! Oracles and identities for the singular-function family and erfc.

use layertrack_core::characteristic::integrate;
use layertrack_core::problem::{example_1, example_2};
use layertrack_core::singular::{erfc, DampingTable, SingularContext};
use layertrack_core::transform::{side_of, Side, TransformContext};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Independent erfc oracle: the alternating Maclaurin series of erf,
/// summed until the terms drop below 1e-16. Distinct from the library's
/// positive-term series and continued fraction.
fn erfc_maclaurin(z: f64) -> f64 {
    let mut term = z;
    let mut sum = z;
    let mut n = 0u32;
    while term.abs() > 1e-16 {
        n += 1;
        term *= -z * z / n as f64;
        sum += term / (2 * n + 1) as f64 * (2 * n + 1) as f64 / (2 * n + 1) as f64;
        // the loop variable form keeps the factorial implicit:
        // term_n = (-1)^n z^{2n+1} / n!, summed with weight 1/(2n+1)
    }
    1.0 - core::f64::consts::FRAC_2_SQRT_PI * sum
}

#[test]
fn erfc_agrees_with_the_maclaurin_oracle() {
    // the alternating series is reliable for moderate arguments
    for z in [0.1, 0.3, 0.5, 0.7, 0.9, 1.0, 1.3, 1.7, 2.0] {
        let want = erfc_maclaurin(z);
        let got = erfc(z);
        assert!(
            (got - want).abs() <= 1e-13 * want.abs().max(1e-3),
            "erfc({z}) = {got} vs oracle {want}"
        );
    }
    assert!((erfc(1.0) - 0.15729920705028513).abs() < 1e-16);
}

#[test]
fn erfc_reflection_identity() {
    for k in 1..=1000 {
        let z = 6.0 * k as f64 / 1000.0;
        assert!(
            (erfc(-z) + erfc(z) - 2.0).abs() <= 1e-13,
            "reflection fails at z = {z}"
        );
    }
}

#[test]
fn erfc_is_dominated_by_the_gaussian() {
    for k in 0..=1000 {
        let z = 27.0 * k as f64 / 1000.0;
        assert!(erfc(z) <= (-z * z).exp(), "erfc({z}) > exp(-z^2)");
    }
}

#[test]
fn psi_derivative_identity() {
    // d(psi_n)/dx = -n sqrt(g) psi_{n-1}, checked against central
    // differences at random points bounded away from the interface
    let p = example_1();
    let c = integrate(&p, 1e-12).unwrap();
    let ctx = TransformContext::new(&c);
    let sc = SingularContext::new(2f64.powi(-8), &ctx, &p).unwrap();
    let d = p.jump_location();
    let mut rng = StdRng::seed_from_u64(7);
    let fd = 1e-6;
    for _ in 0..100 {
        let x = loop {
            let x: f64 = rng.gen_range(0.01..0.99);
            if (x - d).abs() > 1e-3 {
                break x;
            }
        };
        let t = rng.gen_range(0.05..0.5);
        let snap = ctx.snapshot(t).unwrap();
        let scale = snap.scale(side_of(x, d));
        for n in 1..=4usize {
            let slope = (sc.psi(n, x + fd, t).unwrap() - sc.psi(n, x - fd, t).unwrap()) / (2.0 * fd);
            let want = -(n as f64) * scale * sc.psi(n - 1, x, t).unwrap();
            let denom = want.abs().max(1e-10);
            assert!(
                ((slope - want) / denom).abs() <= 1e-6,
                "n={n} x={x} t={t}: {slope} vs {want}"
            );
        }
    }
}

#[test]
fn psi0_stays_in_range_and_increases() {
    let p = example_1();
    let c = integrate(&p, 1e-12).unwrap();
    let ctx = TransformContext::new(&c);
    let sc = SingularContext::new(2f64.powi(-10), &ctx, &p).unwrap();
    for t in [0.05, 0.25, 0.5] {
        let mut prev = -f64::INFINITY;
        for k in 0..=500 {
            let x = k as f64 / 500.0;
            let v = sc.psi(0, x, t).unwrap();
            assert!((0.0..=2.0).contains(&v));
            assert!(v >= prev, "psi0 not monotone at x = {x}");
            prev = v;
        }
    }
}

#[test]
fn damping_oracle_example_2() {
    // I(t) = (cos t - 0.1 sin t) exp(-t^2/2)
    let p = example_2();
    let c = integrate(&p, 1e-12).unwrap();
    let table = DampingTable::build(&p, &c).unwrap();
    let mut worst = 0.0f64;
    for k in 0..=1000 {
        let t = 0.5 * k as f64 / 1000.0;
        let want = (t.cos() - 0.1 * t.sin()) * (-t * t / 2.0).exp();
        worst = worst.max((table.eval(t).unwrap() - want).abs());
    }
    assert!(worst <= 1e-10, "max deviation {worst:e}");
}

#[test]
fn damping_is_positive_and_nonincreasing() {
    let p = example_2();
    let c = integrate(&p, 1e-12).unwrap();
    let table = DampingTable::build(&p, &c).unwrap();
    let mut prev = f64::INFINITY;
    for k in 0..=1000 {
        let t = 0.5 * k as f64 / 1000.0;
        let v = table.eval(t).unwrap();
        assert!(v > 0.0);
        assert!(v <= prev + 1e-15, "damping increases at t = {t}");
        prev = v;
    }
}

#[test]
fn coefficient_callbacks_reproduce_the_closed_forms() {
    let p1 = example_1();
    let p2 = example_2();
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..10_000 {
        let s: f64 = rng.gen_range(0.0..=1.0);
        let t: f64 = rng.gen_range(0.0..=0.5);
        assert_eq!(p1.convection(s, t), (0.81 - (s - 0.2) * (s - 0.2)) / 4.0);
        assert_eq!(p1.source(s, t), 4.0 * s * (1.0 - s) * t + t * t);
        assert_eq!(p2.convection(s, t), 1.0 + s * s);
        assert_eq!(p2.reaction(s, t), s + t);
    }
}

#[test]
fn validate_is_pure() {
    let p = example_2();
    let a = layertrack_core::problem::validate(&p, 41).unwrap();
    let b = layertrack_core::problem::validate(&p, 41).unwrap();
    assert_eq!(a.alpha, b.alpha);
    assert_eq!(a.jump, b.jump);
    assert_eq!(a.warnings, b.warnings);
}

#[test]
fn psi_values_match_between_transformed_and_physical_at_the_ends() {
    // at the domain endpoints the mapped and original arguments coincide
    let p = example_2();
    let c = integrate(&p, 1e-12).unwrap();
    let ctx = TransformContext::new(&c);
    let sc = SingularContext::new(2f64.powi(-6), &ctx, &p).unwrap();
    for t in [0.1, 0.3, 0.5] {
        for s in [0.0, 1.0] {
            let a = sc.psi0_physical(s, t).unwrap();
            let b = sc.psi(0, s, t).unwrap();
            assert!((a - b).abs() < 1e-15);
        }
    }
    let _ = Side::Left; // silence unused-import lint paths on some configs
}
