mod common;

use std::f64::consts::PI;

use proptest::prelude::*;
use spherecurve::classification::*;
use spherecurve::curve_model::arccot;
use spherecurve::homotopy_engine::neither_example;
use spherecurve::*;

/// Expected label of the `k`-fold circle when there are `n` components.
fn circle_label(k: usize, n: usize) -> usize {
    if k <= n {
        k
    } else if (k - n) % 2 == 0 {
        n
    } else {
        n - 1
    }
}

#[test]
fn component_count_matches_the_floor_formula() {
    for m in 1..=6usize {
        let gap = PI / m as f64;
        let b = CurvatureBounds::from_rhos(gap, 0.0).unwrap();
        assert_eq!(component_count(&b), m + 1, "exact gap π/{m}");
        for (r1, r2) in [(0.001 + gap * 0.999, 0.001), (0.9 * gap + 0.1, 0.1)] {
            let b = CurvatureBounds::from_rhos(r1, r2).unwrap();
            let q = (PI / (r1 - r2)).floor() as usize + 1;
            assert_eq!(component_count(&b), q);
        }
    }
}

#[test]
fn circle_table() {
    let tol = ToleranceProfile::default();
    let cases = [
        (CurvatureBounds::unbounded(), 1.0),
        (CurvatureBounds::lower(0.0).unwrap(), 0.8),
        (CurvatureBounds::lower(0.7).unwrap(), 0.5 * arccot(0.7)),
    ];
    for (b, rho) in cases {
        let n = component_count(&b);
        for k in 1..=8u32 {
            let c = common::circle(rho, k, b, 256);
            let r = classify_component(&c, &tol).unwrap();
            assert_eq!(r.label.n, n);
            assert_eq!(r.label.j, circle_label(k as usize, n), "n {n} k {k}");
        }
    }
}

#[test]
fn equatorial_inequality_sweep() {
    use rand::Rng;
    let mut rng = common::rng(7);
    for _ in 0..2000 {
        let rho0 = rng.gen_range(1e-3..=PI / 2.0);
        let l2 = rng.gen_range(0.0..=PI / 2.0);
        let l4 = rng.gen_range((PI / 2.0 - l2)..=PI / 2.0);
        let l6 = (PI - l2 - l4).clamp(0.0, PI / 2.0);
        assert!(equatorial_inequality_check(rho0, [l2, l4, l6]).unwrap());
    }
    for rho0 in [0.1, 0.7, 1.2, PI / 2.0] {
        for v in [[0.0, PI / 2.0, PI / 2.0], [PI / 2.0, 0.0, PI / 2.0], [PI / 2.0, PI / 2.0, 0.0]] {
            let lhs: f64 = v.iter().map(|l: &f64| (rho0.cos() * l.sin()).asin()).sum();
            assert!((lhs - (PI - 2.0 * rho0)).abs() < 1e-10);
            assert!(equatorial_inequality_check(rho0, v).unwrap());
        }
    }
    assert!(equatorial_inequality_check(2.0, [PI / 3.0; 3]).is_err());
    assert!(equatorial_inequality_check(1.0, [0.1, 0.2, 0.3]).is_err());
}

#[test]
fn neither_example_is_neither() {
    let tol = ToleranceProfile::default();
    let c = neither_example().unwrap();
    let s = condensed_status(&reduce_to_k0(&c).unwrap().0, &tol).unwrap();
    assert_eq!(s.tag, StatusTag::Neither);
    assert!(!s.condensed && !s.diffuse);
}

#[test]
fn unbounded_circles_are_diffuse() {
    let tol = ToleranceProfile::default();
    for k in 1..=3 {
        let c = common::circle(0.9, k, CurvatureBounds::unbounded(), 128);
        let s = condensed_status(&c, &tol).unwrap();
        assert!(s.diffuse);
        let w = s.antipodal.expect("witness");
        assert!(w.defect < 1e-6);
    }
}

/// Closed curves with `κ > −1` whose caustic bands are condensed and not diffuse.
fn condensed_corpus() -> Vec<(AdmissibleCurve, i64)> {
    let b = CurvatureBounds::lower(-1.0).unwrap();
    let mut out = Vec::new();
    for (rho, k) in [(1.0, 1), (1.2, 2), (0.9, 3)] {
        out.push((common::circle(rho, k, b, 256), k as i64));
    }
    for (amp, lobes, nu) in [(0.1, 3, 1), (0.08, 5, 2), (0.15, 2, 1)] {
        out.push((common::wobble(1.0, amp, lobes, nu, 384, b), nu as i64));
    }
    out
}

#[test]
fn rotation_numbers_agree() {
    let tol = ToleranceProfile::default();
    for (c, nu) in condensed_corpus() {
        let s = condensed_status(&c, &tol).unwrap();
        assert!(s.condensed && !s.diffuse, "{:?}", s.tag);
        assert_eq!(rotation_number_condensed(&c, &tol).unwrap(), nu);
        assert_eq!(rotation_number_nondiffuse(&c, &tol).unwrap(), nu);
        assert!(c.total_curvature() < tot_bound(nu, c.bounds().rho0()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn labels_are_rotation_invariant(seed in 0u64..1000, k in 1u32..5) {
        let tol = ToleranceProfile::default();
        let b = CurvatureBounds::lower(0.0).unwrap();
        let c = common::circle(0.8, k, b, 128);
        let q = common::random_rotation(&mut common::rng(seed)).to_quaternion();
        let r0 = classify_component(&c, &tol).unwrap();
        let r1 = classify_component(&c.rotated(q), &tol).unwrap();
        prop_assert_eq!(r0.label.j, r1.label.j);
        prop_assert_eq!(r0.label.diagnostics.nu, r1.label.diagnostics.nu);
    }
}
