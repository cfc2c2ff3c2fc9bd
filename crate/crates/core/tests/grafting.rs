mod common;

use proptest::prelude::*;
use spherecurve::classification::StatusTag;
use spherecurve::grafting::*;
use spherecurve::*;

fn base(k: u32) -> AdmissibleCurve {
    common::circle(0.3, k, CurvatureBounds::lower(-1.0).unwrap(), 256)
}

fn end_lift(c: &AdmissibleCurve) -> UnitQuaternion {
    *c.lifts().last().unwrap()
}

#[test]
fn antipodal_grafts_conserve_the_frame() {
    let tol = ToleranceProfile::default();
    for (k, s) in [(1, 0.2), (2, 0.5), (3, 1.0)] {
        let c = base(k);
        let (g, rec) = graft_antipodal_circles(&c, s, &tol).unwrap();
        assert!(rec.frame_residual < 1e-7);
        assert!((end_lift(&g).as_vector4() - end_lift(&c).as_vector4()).norm() < 1e-7);
        assert!((g.total_curvature() - c.total_curvature() - 2.0 * s).abs() < 1e-6);
        assert_eq!(g.lift_parity().unwrap(), c.lift_parity().unwrap());
        assert_eq!(rec.arcs.len(), 2);
    }
}

#[test]
fn simplex_grafts_conserve_the_frame() {
    let tol = ToleranceProfile::default();
    for (k, s) in [(1, 0.2), (2, 0.5), (3, 1.0)] {
        let c = base(k);
        let (g, rec) = graft_simplex_step(&c, s, &tol).unwrap();
        assert!(rec.frame_residual < 1e-7);
        assert!((g.total_curvature() - c.total_curvature() - s).abs() < 1e-6);
        let inserted: f64 = rec.arcs.iter().map(|a| a.sigma).sum();
        assert!((inserted - s).abs() < 1e-9);
        assert!(rec.arcs.iter().all(|a| a.sigma >= 0.0));
    }
}

#[test]
fn grafted_controls_pull_back() {
    let tol = ToleranceProfile::default();
    let c = base(2).reparametrize_by_curvature();
    let (g, rec) = graft_antipodal_circles(&c, 0.4, &tol).unwrap();
    let defect = pullback_defect(&c, &g.reparametrize_by_curvature(), &rec.function);
    assert!(defect < 1e-6, "defect {defect}");
}

#[test]
fn zero_length_graft_is_the_identity() {
    let tol = ToleranceProfile::default();
    let c = base(1);
    let (g, rec) = graft_antipodal_circles(&c, 0.0, &tol).unwrap();
    assert!(rec.function.is_identity());
    assert!((g.total_curvature() - c.total_curvature()).abs() < 1e-9);
}

#[test]
fn diffuse_curve_needs_no_grafting() {
    let tol = ToleranceProfile::default();
    let out = graft_until_resolved(&base(1), 0.5, 10.0, &tol).unwrap();
    assert_eq!(out.status, StatusTag::Diffuse);
    assert!(out.records.is_empty());
    assert_eq!(out.accumulated, 0.0);
}

#[test]
fn condensed_curve_refuses_simplex_graft() {
    let tol = ToleranceProfile::default();
    let c = common::circle(1.0, 1, CurvatureBounds::lower(-1.0).unwrap(), 128);
    assert!(matches!(graft_simplex_step(&c, 0.3, &tol), Err(Error::NotNonCondensed)));
}

fn grafting_function() -> impl Strategy<Value = GraftingFunction> {
    (0.5..3.0f64, prop::collection::vec((0.0..1.0f64, 0.0..0.5f64, any::<bool>()), 0..4)).prop_map(|(s0, pts)| {
        let (mut xp, mut dp, mut xm, mut dm) = (vec![], vec![], vec![], vec![]);
        let mut pts = pts;
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        pts.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-3);
        for (u, d, plus) in pts {
            if plus {
                xp.push(u * s0);
                dp.push(d);
            } else {
                xm.push(u * s0);
                dm.push(d);
            }
        }
        GraftingFunction::new(s0, xp, dp, xm, dm).unwrap()
    })
}

proptest! {
    #[test]
    fn composition_matches_evaluation(a in grafting_function(), b0 in grafting_function()) {
        // Rescale the second function onto the image of the first.
        let r = a.s1 / b0.s0;
        let scale = |v: &[f64]| v.iter().map(|x| x * r).collect::<Vec<_>>();
        let b = GraftingFunction::new(a.s1, scale(&b0.x_plus), b0.delta_plus.clone(), scale(&b0.x_minus), b0.delta_minus.clone()).unwrap();
        let c = compose_grafting(&a, &b).unwrap();
        prop_assert!((c.s1 - b.s1).abs() < 1e-9);
        for k in 0..=200 {
            let t = a.s0 * (k as f64 + 0.37) / 201.0;
            prop_assert!((c.eval(t) - b.eval(a.eval(t))).abs() < 1e-9, "t = {}", t);
        }
    }
}
