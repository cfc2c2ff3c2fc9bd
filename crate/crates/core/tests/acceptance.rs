//! Acceptance criteria 1–11, one line each. Runs without the libtest harness
//! so that the lines are always printed.

mod common;

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use rand::Rng;
use spherecurve::band_geometry::{admissible_theta_range, translate_curve, translation_rotation};
use spherecurve::classification::*;
use spherecurve::curve_model::{arccot, integrate_curve};
use spherecurve::good_bands::{band_from_condensed, central_curve, collapse_condensed, retract_to_good};
use spherecurve::grafting::{graft_antipodal_circles, graft_simplex_step};
use spherecurve::homotopy_engine::{bend_k_equator, neither_example, shrink_condensed, validate_path, HomotopyPath};
use spherecurve::*;

type Outcome = std::result::Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn max_abs_kappa(c: &AdmissibleCurve) -> f64 {
    (0..c.n()).map(|i| c.kappa(i).abs()).fold(0.0, f64::max)
}

fn circle_label(k: usize, n: usize) -> usize {
    if k <= n {
        k
    } else if (k - n) % 2 == 0 {
        n
    } else {
        n - 1
    }
}

/// Closed curves used by the corpus criteria.
fn corpus() -> Vec<(&'static str, AdmissibleCurve)> {
    let neg = CurvatureBounds::lower(-1.0).unwrap();
    let zero = CurvatureBounds::lower(0.0).unwrap();
    let pos = CurvatureBounds::lower(0.7).unwrap();
    let band = CurvatureBounds::new(-0.5, 2.0).unwrap();
    vec![
        ("circle ρ=1.0 k=1 κ>-1", common::circle(1.0, 1, neg, 512)),
        ("circle ρ=1.2 k=2 κ>-1", common::circle(1.2, 2, neg, 512)),
        ("circle ρ=0.9 k=3 κ>-1", common::circle(0.9, 3, neg, 512)),
        ("circle ρ=0.8 k=1 κ>0", common::circle(0.8, 1, zero, 512)),
        ("circle ρ=0.8 k=2 κ>0", common::circle(0.8, 2, zero, 512)),
        ("circle ρ=0.5 k=1 κ>0.7", common::circle(0.5, 1, pos, 512)),
        ("circle ρ=0.9 k=1 -0.5<κ<2", common::circle(0.9, 1, band, 512)),
        ("wobble 0.1/3/1 κ>-1", common::wobble(1.0, 0.1, 3, 1, 384, neg)),
        ("wobble 0.08/5/2 κ>-1", common::wobble(1.0, 0.08, 5, 2, 384, neg)),
        ("wobble 0.15/2/1 κ>-1", common::wobble(1.0, 0.15, 2, 1, 384, neg)),
        ("wobble 0.04/2/1 κ>0", common::wobble(0.7, 0.04, 2, 1, 384, zero)),
        ("circle ρ=0.3 k=1 κ>-1", common::circle(0.3, 1, neg, 256)),
        ("neither example", neither_example().unwrap()),
    ]
}

fn c1() -> Outcome {
    let start = Instant::now();
    let cases = [
        (CurvatureBounds::unbounded(), 2),
        (CurvatureBounds::lower(0.0).unwrap(), 3),
        (CurvatureBounds::lower(0.7).unwrap(), 4),
    ];
    for (b, n) in cases {
        ensure(component_count(&b) == n, || format!("{b:?}: {} ≠ {n}", component_count(&b)))?;
    }
    for m in 1..=6usize {
        let b = CurvatureBounds::from_rhos(PI / m as f64, 0.0).unwrap();
        ensure(component_count(&b) == m + 1, || format!("gap π/{m}: {}", component_count(&b)))?;
    }
    let us = start.elapsed().as_micros();
    ensure(us < 1000, || format!("took {us} µs"))?;
    Ok(format!("9 bounds exact in {us} µs"))
}

fn c2() -> Outcome {
    let tol = ToleranceProfile::default();
    let start = Instant::now();
    let cases = [
        (CurvatureBounds::unbounded(), 1.0),
        (CurvatureBounds::lower(0.0).unwrap(), 0.8),
        (CurvatureBounds::lower(0.7).unwrap(), 0.5 * arccot(0.7)),
    ];
    let mut count = 0;
    for (b, rho) in cases {
        let n = component_count(&b);
        for k in 1..=8u32 {
            let c = common::circle(rho, k, b, 1024);
            let r = classify_component(&c, &tol).map_err(|e| format!("n={n} k={k}: {e}"))?;
            let want = circle_label(k as usize, n);
            ensure(r.label.j == want, || format!("n={n} k={k}: j={} expected {want}", r.label.j))?;
            count += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 30.0, || format!("took {secs:.1} s"))?;
    Ok(format!("{count} circles labelled correctly at N=1024 in {secs:.2} s"))
}

fn c3() -> Outcome {
    let tol = ToleranceProfile::default();
    let mut worst: f64 = 0.0;
    for k in 1..=3u32 {
        let crit = (PI / (2.0 * k as f64 + 2.0)).tan();
        let path = bend_k_equator(k, tol.path_steps, crit * 1.01, &tol).map_err(|e| e.to_string())?;
        let top = path.curves.iter().map(max_abs_kappa).fold(0.0, f64::max);
        ensure((top - crit).abs() < 1e-6, || format!("k={k}: max |κ| {top} vs {crit}"))?;
        let ends = max_abs_kappa(path.first()).max(max_abs_kappa(path.last()));
        ensure(ends < 1e-8, || format!("k={k}: endpoint |κ| {ends:e}"))?;
        worst = worst.max((top - crit).abs());
    }
    Ok(format!("max |κ| matches tan(π/(2k+2)) within {worst:.1e} for k=1..3"))
}

fn c4() -> Outcome {
    let mut rng = common::rng(2024);
    let mut worst = [0.0f64; 3];
    for run in 0..50 {
        let b = match run % 3 {
            0 => CurvatureBounds::unbounded(),
            1 => CurvatureBounds::lower(-0.5).unwrap(),
            _ => CurvatureBounds::new(-1.0, 2.0).unwrap(),
        };
        let c = common::random_curve(&mut rng, b, 128);
        let (lo, hi) = admissible_theta_range(&c);
        let theta = rng.gen_range(lo..hi);
        let ct = translate_curve(&c, theta).map_err(|e| e.to_string())?;
        let r = translation_rotation(theta);
        for i in 0..=c.n() {
            worst[0] = worst[0].max((ct.frames()[i].matrix() - (c.frames()[i] * r).matrix()).norm());
        }
        for i in 0..c.n() {
            worst[1] = worst[1].max((ct.rho(i) - (c.rho(i) - theta)).abs());
        }
        let back = translate_curve(&ct, -theta).map_err(|e| e.to_string())?;
        for i in 0..=c.n() {
            worst[2] = worst[2].max((back.gamma(i) - c.gamma(i)).norm());
        }
    }
    ensure(worst[0] < 1e-9 && worst[1] < 1e-8 && worst[2] < 1e-9, || format!("errors {worst:?}"))?;
    Ok(format!("50 curves: frame {:.1e}, radius {:.1e}, inverse {:.1e}", worst[0], worst[1], worst[2]))
}

fn constant_parity(path: &HomotopyPath, name: &str) -> std::result::Result<(), String> {
    let signs: Vec<i32> = path.curves.iter().map(|c| c.lift_parity().map(|p| p.sign()).unwrap_or(0)).collect();
    ensure(signs.iter().all(|&s| s != 0 && s == signs[0]), || format!("{name}: parities {signs:?}"))
}

fn c5() -> Outcome {
    let tol = ToleranceProfile::default();
    for k in 1..=6u32 {
        let c = common::circle(1.0, k, CurvatureBounds::unbounded(), 256);
        let p = c.lift_parity().map_err(|e| e.to_string())?.sign();
        let want = if k % 2 == 0 { 1 } else { -1 };
        ensure(p == want, || format!("σ_{k}: parity {p}"))?;
    }
    let mut paths = 0;
    for k in 1..=3u32 {
        let crit = (PI / (2.0 * k as f64 + 2.0)).tan();
        let path = bend_k_equator(k, 17, crit * 1.01, &tol).map_err(|e| e.to_string())?;
        constant_parity(&path, "bending")?;
        paths += 1;
    }
    let b = CurvatureBounds::lower(0.5).unwrap();
    for k in 1..=2 {
        let path = shrink_condensed(&common::circle(0.6, k, b, 256), 9, &tol).map_err(|e| e.to_string())?;
        constant_parity(&path, "shrink")?;
        paths += 1;
    }
    let path = collapse_condensed(&common::circle(1.2, 2, CurvatureBounds::lower(-1.0).unwrap(), 256), 6, &tol)
        .map_err(|e| e.to_string())?;
    constant_parity(&path, "collapse")?;
    paths += 1;
    Ok(format!("σ_1..σ_6 parities (−1)^k; {paths} generated paths have constant parity"))
}

fn c6() -> Outcome {
    let tol = ToleranceProfile::default();
    let mut rng = common::rng(99);
    let b = CurvatureBounds::lower(-1.0).unwrap();
    let (mut frame, mut dtot) = (0.0f64, 0.0f64);
    for run in 0..20 {
        let k = 1 + run % 4;
        let c = common::circle(0.3, k, b, 256);
        let s = rng.gen_range(0.05..1.5);
        let (g, rec) = graft_antipodal_circles(&c, s, &tol).map_err(|e| format!("antipodal run {run}: {e}"))?;
        frame = frame.max(rec.frame_residual);
        dtot = dtot.max((g.total_curvature() - c.total_curvature() - 2.0 * s).abs());
        let s = rng.gen_range(0.05..1.5);
        let (g, rec) = graft_simplex_step(&c, s, &tol).map_err(|e| format!("simplex run {run}: {e}"))?;
        frame = frame.max(rec.frame_residual);
        dtot = dtot.max((g.total_curvature() - c.total_curvature() - s).abs());
    }
    ensure(frame < 1e-7 && dtot < 1e-6, || format!("frame {frame:e}, tot {dtot:e}"))?;
    Ok(format!("40 grafts: frame residual {frame:.1e}, tot increment error {dtot:.1e}"))
}

/// `(name, reduced curve, status, ν)` for every non-diffuse corpus curve.
fn nondiffuse(tol: &ToleranceProfile) -> std::result::Result<Vec<(&'static str, AdmissibleCurve, CondensedStatus, i64)>, String> {
    let mut out = Vec::new();
    for (name, c) in corpus() {
        let (r, _) = reduce_to_k0(&c).map_err(|e| format!("{name}: {e}"))?;
        let s = condensed_status(&r, tol).map_err(|e| format!("{name}: {e}"))?;
        if s.diffuse {
            continue;
        }
        let nu = rotation_number_nondiffuse(&r, tol).map_err(|e| format!("{name}: {e}"))?;
        out.push((name, r, s, nu));
    }
    Ok(out)
}

fn c7() -> Outcome {
    let tol = ToleranceProfile::default();
    let list = nondiffuse(&tol)?;
    let mut ratio: f64 = 0.0;
    for (name, c, _, nu) in &list {
        let bound = tot_bound(*nu, c.bounds().rho0());
        let tot = c.total_curvature();
        ensure(tot < bound, || format!("{name}: tot {tot} ≥ {bound}"))?;
        ratio = ratio.max(tot / bound);
    }
    let zero = CurvatureBounds::lower(0.0).unwrap();
    let mut eight: f64 = 0.0;
    for c in [common::circle(0.8, 1, zero, 512), common::circle(1.5, 1, zero, 512), common::wobble(0.7, 0.04, 2, 1, 384, zero)] {
        let s = condensed_status(&c, &tol).map_err(|e| e.to_string())?;
        let nu = rotation_number_nondiffuse(&c, &tol).map_err(|e| e.to_string())?;
        ensure(!s.diffuse && nu == 1, || format!("expected a non-diffuse ν=1 curve, got ν={nu}"))?;
        let tot = c.total_curvature();
        ensure(tot < 8.0 * PI, || format!("ν=1, κ₀=0: tot {tot} ≥ 8π"))?;
        eight = eight.max(tot / (8.0 * PI));
    }
    Ok(format!("{} non-diffuse curves, max tot/bound {ratio:.3}; ν=1 κ₀=0 max tot/8π {eight:.3}", list.len()))
}

fn c8() -> Outcome {
    let tol = ToleranceProfile::default();
    let b = CurvatureBounds::lower(-1.0).unwrap();
    let mut iters = 0;
    let mut margin = f64::INFINITY;
    for c in [common::circle(1.0, 1, b, 256), common::circle(1.2, 2, b, 256), common::wobble(1.0, 0.08, 5, 2, 384, b)] {
        let band = band_from_condensed(&c, &tol).map_err(|e| e.to_string())?;
        let rep = retract_to_good(&band, &tol).map_err(|e| e.to_string())?;
        ensure(rep.iterations <= 60 && rep.monotone, || format!("{} iterations, monotone {}", rep.iterations, rep.monotone))?;
        iters = iters.max(rep.iterations);
        let cc = central_curve(&rep.good, CurvatureBounds::unbounded()).map_err(|e| e.to_string())?;
        let half = 0.5 * rep.good.band.width;
        ensure(cc.rho_min >= half && cc.rho_max <= PI - half && cc.margin > 0.0, || {
            format!("central ρ ∈ [{}, {}], R/2 = {half}", cc.rho_min, cc.rho_max)
        })?;
        margin = margin.min(cc.margin);
    }
    let c = common::circle(1.0, 1, b, 256);
    let path = collapse_condensed(&c, 8, &tol).map_err(|e| e.to_string())?;
    let v = validate_path(&path, &b, &tol);
    ensure(v.pass, || format!("collapse path fails validation: {v:?}"))?;
    Ok(format!("retraction ≤ {iters} iterations, central margin ≥ {margin:.3}, collapse of {} frames validates", path.len()))
}

fn c9() -> Outcome {
    let tol = ToleranceProfile::default();
    let mut n = 0;
    for (name, c, s, nu) in nondiffuse(&tol)? {
        if !s.condensed {
            continue;
        }
        let nc = rotation_number_condensed(&c, &tol).map_err(|e| format!("{name}: {e}"))?;
        ensure(nc == nu, || format!("{name}: condensed ν={nc}, non-diffuse ν={nu}"))?;
        n += 1;
    }
    ensure(n >= 5, || format!("only {n} condensed non-diffuse curves"))?;
    Ok(format!("{n} condensed non-diffuse curves agree"))
}

fn c10() -> Outcome {
    let mut rng = common::rng(10_000);
    let mut slack = f64::INFINITY;
    for i in 0..10_000 {
        let rho0 = rng.gen_range(1e-4..=PI / 2.0);
        let l2 = rng.gen_range(0.0..=PI / 2.0);
        let l4 = rng.gen_range((PI / 2.0 - l2)..=PI / 2.0);
        let l6 = (PI - l2 - l4).clamp(0.0, PI / 2.0);
        let ok = equatorial_inequality_check(rho0, [l2, l4, l6]).map_err(|e| format!("sample {i}: {e}"))?;
        ensure(ok, || format!("sample {i} violates: ρ₀={rho0} λ=({l2}, {l4}, {l6})"))?;
        let lhs: f64 = [l2, l4, l6].iter().map(|l| (rho0.cos() * l.sin()).asin()).sum();
        slack = slack.min(lhs - (PI - 2.0 * rho0));
    }
    let mut gap: f64 = 0.0;
    for rho0 in [0.05, 0.4, 1.0, PI / 2.0] {
        for v in [[0.0, PI / 2.0, PI / 2.0], [PI / 2.0, 0.0, PI / 2.0], [PI / 2.0, PI / 2.0, 0.0]] {
            let lhs: f64 = v.iter().map(|l: &f64| (rho0.cos() * l.sin()).asin()).sum();
            gap = gap.max((lhs - (PI - 2.0 * rho0)).abs());
        }
    }
    ensure(gap < 1e-10, || format!("vertex gap {gap:e}"))?;
    Ok(format!("10⁴ samples hold (min slack {slack:.1e}); vertex equality within {gap:.1e}"))
}

fn c11() -> Outcome {
    let tol = ToleranceProfile::default();
    let mut drift: f64 = 0.0;
    let path = bend_k_equator(2, 17, 0.75, &tol).map_err(|e| e.to_string())?;
    drift = path.curves.iter().map(|c| c.max_norm_drift()).fold(drift, f64::max);
    let neg = CurvatureBounds::lower(-1.0).unwrap();
    let path = collapse_condensed(&common::circle(1.0, 1, neg, 256), 6, &tol).map_err(|e| e.to_string())?;
    drift = path.curves.iter().map(|c| c.max_norm_drift()).fold(drift, f64::max);
    let path = shrink_condensed(&common::circle(0.6, 2, CurvatureBounds::lower(0.5).unwrap(), 256), 9, &tol)
        .map_err(|e| e.to_string())?;
    drift = path.curves.iter().map(|c| c.max_norm_drift()).fold(drift, f64::max);
    let (g, _) = graft_simplex_step(&common::circle(0.3, 2, neg, 256), 0.7, &tol).map_err(|e| e.to_string())?;
    drift = drift.max(g.max_norm_drift());
    ensure(drift <= 1e-12, || format!("quaternion norm drift {drift:e}"))?;

    let b = CurvatureBounds::new(-2.0, 3.0).unwrap();
    let endpoint = |n: usize| -> std::result::Result<Rotation3, String> {
        let (mut v_hat, mut w_hat) = (Vec::new(), Vec::new());
        for i in 0..n {
            let t = (i as f64 + 0.5) / n as f64;
            v_hat.push(0.8 + 0.5 * (2.0 * PI * t).sin() + 0.2 * (6.0 * PI * t).cos());
            w_hat.push(0.3 * (4.0 * PI * t).cos() - 0.7 * (2.0 * PI * t).sin());
        }
        let c = integrate_curve(&ControlPair { n, v_hat, w_hat }, b, Rotation3::identity()).map_err(|e| e.to_string())?;
        Ok(*c.frames().last().unwrap())
    };
    let (a, m, f) = (endpoint(256)?, endpoint(512)?, endpoint(1024)?);
    let order = ((a.matrix() - m.matrix()).norm() / (m.matrix() - f.matrix()).norm()).log2();
    ensure((1.7..=2.3).contains(&order), || format!("convergence order {order}"))?;
    Ok(format!("norm drift {drift:.1e}; self-convergence order {order:.3}"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("component counts", c1),
        ("circle classification table", c2),
        ("bending maximum curvature", c3),
        ("translation identities", c4),
        ("double-cover parity", c5),
        ("grafting conservation", c6),
        ("non-diffuse total-curvature bound", c7),
        ("good-band pipeline", c8),
        ("rotation-number agreement", c9),
        ("equatorial inequality", c10),
        ("numerical hygiene", c11),
    ];
    // Failures are reported on their criterion line.
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name} ({detail}) [{secs:.2} s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL {name} ({detail}) [{secs:.2} s]", i + 1);
            }
        }
    }
    if failed == 0 {
        println!("acceptance: all 11 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of 11 criteria fail");
        ExitCode::FAILURE
    }
}
