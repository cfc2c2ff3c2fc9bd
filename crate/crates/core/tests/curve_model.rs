mod common;

use std::f64::consts::PI;

use proptest::prelude::*;
use spherecurve::curve_model::{control_transforms, h, h_inv, integrate_curve, make_circle_n};
use spherecurve::*;

fn bounds_strategy() -> impl Strategy<Value = CurvatureBounds> {
    prop_oneof![
        Just(CurvatureBounds::unbounded()),
        (-3.0..3.0f64).prop_map(|k| CurvatureBounds::new(k, f64::INFINITY).unwrap()),
        (-3.0..3.0f64).prop_map(|k| CurvatureBounds::new(f64::NEG_INFINITY, k).unwrap()),
        (-3.0..3.0f64, 0.05..4.0f64).prop_map(|(k, d)| CurvatureBounds::new(k, k + d).unwrap()),
    ]
}

proptest! {
    #[test]
    fn h_is_inverted(x in -1e3..1e3f64) {
        let t = h_inv(x);
        prop_assert!(t > 0.0);
        prop_assert!((h(t) - x).abs() <= 1e-9 * (1.0 + x.abs()));
    }

    #[test]
    fn bounded_transform_is_inverted(b in bounds_strategy(), x in -50.0..50.0f64) {
        let ct = control_transforms(b);
        let k = ct.h_bounds_inv(x);
        prop_assert!(b.contains_kappa(k) || (k - b.kappa1).abs() < 1e-12 || (k - b.kappa2).abs() < 1e-12);
        prop_assert!((ct.h_bounds(k) - x).abs() <= 1e-7 * (1.0 + x.abs()));
    }

    #[test]
    fn controls_round_trip(seed in 0u64..500, b in bounds_strategy()) {
        let mut rng = common::rng(seed);
        let c = common::random_curve(&mut rng, b, 64);
        let ctl = c.to_controls();
        let back = integrate_curve(&ctl, b, c.frames()[0]).unwrap();
        for i in 0..=64 {
            prop_assert!((back.gamma(i) - c.gamma(i)).norm() < 1e-9);
            prop_assert!((back.frames()[i].matrix() - c.frames()[i].matrix()).norm() < 1e-9);
        }
    }

    #[test]
    fn random_curves_are_admissible(seed in 0u64..500, b in bounds_strategy()) {
        let mut rng = common::rng(seed);
        let c = common::random_curve(&mut rng, b, 48);
        prop_assert!(c.to_controls().validate().is_ok());
        prop_assert!(c.max_norm_drift() < 1e-12);
        for i in 0..c.n() {
            prop_assert!(b.contains_kappa(c.kappa(i)));
        }
    }
}

#[test]
fn circles_close_with_the_expected_invariants() {
    for k in 1..=6u32 {
        for rho in [0.3, 1.0, PI / 2.0, 2.5] {
            let c = make_circle_n(rho, k, CurvatureBounds::unbounded(), 256).unwrap();
            assert!(c.is_closed(), "rho {rho} k {k}");
            assert!(c.closure_defect() < 1e-10);
            assert!((c.total_curvature() - 2.0 * PI * k as f64).abs() < 1e-9);
            assert!((c.length() - 2.0 * PI * k as f64 * rho.sin()).abs() < 1e-9);
            let expected = if k % 2 == 0 { 1 } else { -1 };
            assert_eq!(c.lift_parity().unwrap().sign(), expected);
        }
    }
}

#[test]
fn circle_outside_bounds_is_rejected() {
    let b = CurvatureBounds::lower(0.0).unwrap();
    assert!(make_circle_n(2.0, 1, b, 16).is_err());
}

#[test]
fn self_convergence_is_second_order() {
    // Smooth controls sampled at segment midpoints; endpoint frames compared
    // between successive refinements.
    let b = CurvatureBounds::new(-2.0, 3.0).unwrap();
    let endpoint = |n: usize| {
        let (mut v_hat, mut w_hat) = (Vec::new(), Vec::new());
        for i in 0..n {
            let t = (i as f64 + 0.5) / n as f64;
            v_hat.push(0.8 + 0.5 * (2.0 * PI * t).sin() + 0.2 * (6.0 * PI * t).cos());
            w_hat.push(0.3 * (4.0 * PI * t).cos() - 0.7 * (2.0 * PI * t).sin());
        }
        let c = integrate_curve(&ControlPair { n, v_hat, w_hat }, b, Rotation3::identity()).unwrap();
        *c.frames().last().unwrap()
    };
    let (a, m, f) = (endpoint(200), endpoint(400), endpoint(800));
    let order = ((a.matrix() - m.matrix()).norm() / (m.matrix() - f.matrix()).norm()).log2();
    assert!((1.7..=2.3).contains(&order), "order {order}");
}
