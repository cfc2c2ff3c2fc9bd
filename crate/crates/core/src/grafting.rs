//! Grafting functions, antipodal circle grafts and simplex graft continuation.
//!
//! Grafts are carried out on the reduced curve parametrized by curvature, where
//! an inserted arc of radius `ρ` has controls `(v, w) = (sin ρ, cos ρ)` and
//! conjugates the remainder of the lifted frame by `exp(σχ/2)`.

use nalgebra::{Matrix4, Quaternion, Vector4};
use serde::{Deserialize, Serialize};

use crate::band_geometry::{curve_id, translate_curve};
use crate::classification::{
    antipodal_pair, caustic_cloud, condensed_status, reduce_to_k0, rotation_number_nondiffuse, tot_bound, StatusTag,
};
use crate::curve_model::AdmissibleCurve;
use crate::error::{Error, Result};
use crate::sphere_core::{containing_simplex, hemisphere_margin, Vec3};
use crate::tolerance::ToleranceProfile;

/// Points closer than this are treated as one insertion point.
const POINT_EPS: f64 = 1e-12;

/// `φ(t) = t + Σ_{x<t, x∈X₊} δ₊(x) + Σ_{x≤t, x∈X₋} δ₋(x)` on `[0, s0]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraftingFunction {
    pub s0: f64,
    pub s1: f64,
    pub x_plus: Vec<f64>,
    pub delta_plus: Vec<f64>,
    pub x_minus: Vec<f64>,
    pub delta_minus: Vec<f64>,
}

impl GraftingFunction {
    pub fn new(s0: f64, x_plus: Vec<f64>, delta_plus: Vec<f64>, x_minus: Vec<f64>, delta_minus: Vec<f64>) -> Result<Self> {
        if !(s0 >= 0.0) || x_plus.len() != delta_plus.len() || x_minus.len() != delta_minus.len() {
            return Err(Error::InvalidInput("malformed grafting function".into()));
        }
        let check = |xs: &[f64], ds: &[f64], hi_open: bool| -> Result<()> {
            for k in 0..xs.len() {
                let x = xs[k];
                let inside = x >= 0.0 && if hi_open { x < s0 } else { x <= s0 };
                if !inside || !(ds[k] > 0.0) || (k > 0 && !(xs[k] > xs[k - 1])) {
                    return Err(Error::InvalidInput(format!("bad insertion point {x} with weight {}", ds[k])));
                }
            }
            Ok(())
        };
        check(&x_plus, &delta_plus, true)?;
        check(&x_minus, &delta_minus, false)?;
        let s1 = s0 + delta_plus.iter().sum::<f64>() + delta_minus.iter().sum::<f64>();
        Ok(Self { s0, s1, x_plus, delta_plus, x_minus, delta_minus })
    }

    pub fn identity(s0: f64) -> Self {
        Self { s0, s1: s0, x_plus: vec![], delta_plus: vec![], x_minus: vec![], delta_minus: vec![] }
    }

    pub fn is_identity(&self) -> bool {
        self.x_plus.is_empty() && self.x_minus.is_empty()
    }

    pub fn eval(&self, t: f64) -> f64 {
        let plus: f64 = self.x_plus.iter().zip(&self.delta_plus).filter(|(x, _)| **x < t).map(|(_, d)| d).sum();
        let minus: f64 = self.x_minus.iter().zip(&self.delta_minus).filter(|(x, _)| **x <= t).map(|(_, d)| d).sum();
        t + plus + minus
    }

    /// `ω₊(t) = φ(t⁺) − φ(t)`.
    pub fn omega_plus(&self, t: f64) -> f64 {
        weight_at(&self.x_plus, &self.delta_plus, t)
    }

    /// `ω₋(t) = φ(t) − φ(t⁻)`, with `ω₋(0) = φ(0)`.
    pub fn omega_minus(&self, t: f64) -> f64 {
        weight_at(&self.x_minus, &self.delta_minus, t)
    }

    /// The point of `[0, s0]` whose image (including its jump) contains `y`.
    pub fn preimage(&self, y: f64) -> f64 {
        let mut pts: Vec<(f64, f64, f64)> = Vec::new();
        for (x, d) in self.x_minus.iter().zip(&self.delta_minus) {
            pts.push((*x, *d, 0.0));
        }
        for (x, d) in self.x_plus.iter().zip(&self.delta_plus) {
            pts.push((*x, 0.0, *d));
        }
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut cum = 0.0;
        for (x, dm, dp) in pts {
            let left = x + cum;
            if y < left {
                return y - cum;
            }
            if y <= left + dm + dp {
                return x;
            }
            cum += dm + dp;
        }
        (y - cum).clamp(0.0, self.s0)
    }
}

fn weight_at(xs: &[f64], ds: &[f64], t: f64) -> f64 {
    xs.iter().zip(ds).filter(|(x, _)| (**x - t).abs() <= POINT_EPS * (1.0 + t.abs())).map(|(_, d)| d).sum()
}

/// `φ₁ ∘ φ₀`, with insertion sets and weights recovered from the one-sided jumps.
pub fn compose_grafting(phi0: &GraftingFunction, phi1: &GraftingFunction) -> Result<GraftingFunction> {
    if (phi0.s1 - phi1.s0).abs() > 1e-9 * (1.0 + phi0.s1.abs()) {
        return Err(Error::DomainMismatch { left: phi0.s1, right: phi1.s0 });
    }
    let mut cands: Vec<f64> = phi0.x_plus.iter().chain(&phi0.x_minus).copied().collect();
    for y in phi1.x_plus.iter().chain(&phi1.x_minus) {
        cands.push(phi0.preimage(*y));
    }
    cands.sort_by(f64::total_cmp);
    cands.dedup_by(|a, b| (*a - *b).abs() <= POINT_EPS * (1.0 + a.abs()));
    let (mut xp, mut dp, mut xm, mut dm) = (vec![], vec![], vec![], vec![]);
    let min_w = 1e-12 * (1.0 + phi1.s1);
    for x in cands {
        let y = phi0.eval(x);
        let f = phi1.eval(y);
        let y_right = y + phi0.omega_plus(x);
        let f_right = phi1.eval(y_right) + phi1.omega_plus(y_right);
        let y_left = y - phi0.omega_minus(x);
        let f_left = phi1.eval(y_left) - phi1.omega_minus(y_left);
        if f_right - f > min_w && x < phi0.s0 {
            xp.push(x);
            dp.push(f_right - f);
        }
        if f - f_left > min_w {
            xm.push(x);
            dm.push(f - f_left);
        }
    }
    let mut out = GraftingFunction::new(phi0.s0, xp, dp, xm, dm)?;
    out.s1 = phi1.s1;
    Ok(out)
}

/// An arc of radius `rho` (original coordinates) and turning length `sigma`
/// inserted at base parameter `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InsertedArc {
    pub t: f64,
    pub rho: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraftRecord {
    pub base_id: u64,
    pub result_id: u64,
    pub function: GraftingFunction,
    pub arcs: Vec<InsertedArc>,
    /// `|z̃_result(end) − z̃_base(end)|`.
    pub frame_residual: f64,
}

/// Largest control mismatch between the base and the result pulled back by `φ`.
/// Both curves must be parametrized by curvature.
pub fn pullback_defect(base: &AdmissibleCurve, result: &AdmissibleCurve, phi: &GraftingFunction) -> f64 {
    let jumps: Vec<f64> = phi.x_plus.iter().chain(&phi.x_minus).copied().collect();
    let mut worst: f64 = 0.0;
    for i in 0..base.n() {
        let (a, b) = (base.knots()[i], base.knots()[i + 1]);
        for frac in [0.13, 0.5, 0.87] {
            let t = a + frac * (b - a);
            if jumps.iter().any(|x| (x - t).abs() < 1e-9) {
                continue;
            }
            let j = result.segment_of(phi.eval(t));
            let dv = (result.speeds()[j] - base.speeds()[i]).abs();
            let dw = (result.w_values()[j] - base.w_values()[i]).abs();
            worst = worst.max(dv).max(dw);
        }
    }
    worst
}

/// Splits `curve` at the arc locations and inserts the arcs, which are given in
/// reduced coordinates as `(t, ρ, σ)` sorted by `t`.
fn insert_arcs(curve: &AdmissibleCurve, arcs: &[(f64, f64, f64)]) -> Result<AdmissibleCurve> {
    let n = curve.n();
    let mut knots = vec![curve.knots()[0]];
    let (mut v, mut w) = (Vec::with_capacity(n + 8), Vec::with_capacity(n + 8));
    let mut shift = 0.0;
    let mut next = 0;
    let mut push = |knots: &mut Vec<f64>, end: f64, vi: f64, wi: f64| {
        knots.push(end);
        v.push(vi);
        w.push(wi);
    };
    for i in 0..n {
        let (a, b) = (curve.knots()[i], curve.knots()[i + 1]);
        let (vi, wi) = (curve.speeds()[i], curve.w_values()[i]);
        let mut start = a;
        while next < arcs.len() && arcs[next].0 < b - POINT_EPS * (1.0 + b.abs()) {
            let (t, rho, sigma) = arcs[next];
            if t > start + POINT_EPS * (1.0 + start.abs()) {
                push(&mut knots, t + shift, vi, wi);
                start = t;
            }
            if sigma > 0.0 {
                shift += sigma;
                push(&mut knots, start + shift, rho.sin(), rho.cos());
            }
            next += 1;
        }
        push(&mut knots, b + shift, vi, wi);
    }
    for &(_, rho, sigma) in &arcs[next..] {
        if sigma > 0.0 {
            shift += sigma;
            let end = curve.knots()[n] + shift;
            push(&mut knots, end, rho.sin(), rho.cos());
        }
    }
    AdmissibleCurve::from_segments(curve.bounds(), knots, v, w, curve.lifts()[0])
}

/// Curvature-parametrized reduced form of `curve`, with `ρ₂`.
fn prepare(curve: &AdmissibleCurve) -> Result<(AdmissibleCurve, AdmissibleCurve, f64)> {
    let base = curve.reparametrize_by_curvature();
    let (reduced, _) = reduce_to_k0(&base)?;
    Ok((base, reduced, curve.bounds().rho2))
}

/// Translates the grafted reduced curve back and records the graft.
fn finish(
    base: &AdmissibleCurve,
    grafted: AdmissibleCurve,
    rho2: f64,
    arcs: &[(f64, f64, f64)],
) -> Result<(AdmissibleCurve, GraftRecord)> {
    let result = if rho2 == 0.0 {
        grafted.with_bounds(base.bounds())?
    } else {
        translate_curve(&grafted, -rho2)?.with_bounds(base.bounds())?
    };
    let mut xs: Vec<(f64, f64)> = arcs.iter().filter(|a| a.2 > 0.0).map(|a| (a.0, a.2)).collect();
    xs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (mut xp, mut dp): (Vec<f64>, Vec<f64>) = (vec![], vec![]);
    for (x, d) in xs {
        match xp.last() {
            Some(last) if (x - last).abs() <= POINT_EPS * (1.0 + x.abs()) => *dp.last_mut().unwrap() += d,
            _ => {
                xp.push(x);
                dp.push(d);
            }
        }
    }
    let function = GraftingFunction::new(base.duration(), xp, dp, vec![], vec![])?;
    let zb = base.lifts()[base.n()];
    let zr = result.lifts()[result.n()];
    let record = GraftRecord {
        base_id: curve_id(base),
        result_id: curve_id(&result),
        function,
        arcs: arcs.iter().map(|&(t, rho, sigma)| InsertedArc { t, rho: rho + rho2, sigma }).collect(),
        frame_residual: zr.distance(&zb),
    };
    Ok((result, record))
}

/// Moves an insertion at the closing point `t = T` to `t = 0`.
fn wrap_start(c: &AdmissibleCurve, t: f64) -> f64 {
    let (t0, t1) = (c.knots()[0], c.knots()[c.n()]);
    if t >= t1 - POINT_EPS * (1.0 + t1.abs()) {
        t0
    } else {
        t
    }
}

/// Grafts arcs of turning length `s` at an antipodal pair `χ₁ = −χ₂` of the
/// caustic band, taken with radii strictly inside `(0, ρ₀)`.
pub fn graft_antipodal_circles(curve: &AdmissibleCurve, s: f64, tol: &ToleranceProfile) -> Result<(AdmissibleCurve, GraftRecord)> {
    if !(s >= 0.0) {
        return Err(Error::InvalidInput(format!("graft length {s} is negative")));
    }
    let (base, c, rho2) = prepare(curve)?;
    let rho0 = c.bounds().rho0();
    let pad = 0.01 * rho0;
    let wit = antipodal_pair(&c, pad, rho0 - pad, tol).ok_or(Error::NotDiffuse)?;
    if wit.defect > tol.delta_antipodal {
        return Err(Error::AntipodalDefect { defect: wit.defect });
    }
    let mut arcs = vec![(wrap_start(&c, wit.t1), wit.theta1, s), (wrap_start(&c, wit.t2), wit.theta2, s)];
    arcs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let grafted = if s > 0.0 { insert_arcs(&c, &arcs)? } else { c.clone() };
    finish(&base, grafted, rho2, &arcs)
}

fn quat(v: &Vec3) -> Quaternion<f64> {
    Quaternion::new(0.0, v.x, v.y, v.z)
}

fn qexp(v: &Vec3) -> Quaternion<f64> {
    let a = v.norm();
    if a < 1e-300 {
        return Quaternion::identity();
    }
    let s = a.sin() / a;
    Quaternion::new(a.cos(), v.x * s, v.y * s, v.z * s)
}

/// `G(σ) = Π exp(σᵢχᵢ/2)` and its partial derivatives.
pub fn graft_product(chis: &[Vec3; 4], sigma: &[f64; 4]) -> (Quaternion<f64>, [Quaternion<f64>; 4]) {
    let e: Vec<Quaternion<f64>> = (0..4).map(|i| qexp(&(chis[i] * (0.5 * sigma[i])))).collect();
    let mut prefix = [Quaternion::identity(); 5];
    for i in 0..4 {
        prefix[i + 1] = prefix[i] * e[i];
    }
    let mut suffix = [Quaternion::identity(); 5];
    for i in (0..4).rev() {
        suffix[i] = e[i] * suffix[i + 1];
    }
    let mut d = [Quaternion::identity(); 4];
    for i in 0..4 {
        d[i] = prefix[i] * quat(&(chis[i] * 0.5)) * e[i] * suffix[i + 1];
    }
    (prefix[4], d)
}

fn residual(g: &Quaternion<f64>, sigma: &[f64; 4], s: f64) -> Vector4<f64> {
    Vector4::new(g.i, g.j, g.k, sigma.iter().sum::<f64>() - s)
}

fn newton(chis: &[Vec3; 4], mut sigma: [f64; 4], s: f64, tol: &ToleranceProfile) -> Option<[f64; 4]> {
    for _ in 0..tol.newton_max_iter.max(1) {
        let (g, d) = graft_product(chis, &sigma);
        let r = residual(&g, &sigma, s);
        if r.norm() < tol.newton_tol && g.w > 0.0 {
            return Some(sigma);
        }
        let mut j = Matrix4::zeros();
        for i in 0..4 {
            j[(0, i)] = d[i].i;
            j[(1, i)] = d[i].j;
            j[(2, i)] = d[i].k;
            j[(3, i)] = 1.0;
        }
        let step = j.lu().solve(&r)?;
        for i in 0..4 {
            sigma[i] -= step[i];
        }
    }
    let (g, _) = graft_product(chis, &sigma);
    (residual(&g, &sigma, s).norm() < tol.newton_tol.max(1e-13) && g.w > 0.0).then_some(sigma)
}

/// Solves `G(σ) = 1`, `Σσᵢ = s` by Newton continuation from `σ = 0`, starting
/// each stage from the tangent direction given by the barycentric weights.
pub fn solve_graft_lengths(chis: &[Vec3; 4], weights: &[f64; 4], s: f64, tol: &ToleranceProfile) -> Result<[f64; 4]> {
    if s == 0.0 {
        return Ok([0.0; 4]);
    }
    let mut last_residual = f64::INFINITY;
    for level in 0..7 {
        let m = 1usize << level;
        let mut sigma = [0.0; 4];
        let mut ok = true;
        for k in 1..=m {
            let target = s * k as f64 / m as f64;
            let h = s / m as f64;
            let guess = [sigma[0] + h * weights[0], sigma[1] + h * weights[1], sigma[2] + h * weights[2], sigma[3] + h * weights[3]];
            match newton(chis, guess, target, tol) {
                Some(x) => sigma = x,
                None => {
                    let (g, _) = graft_product(chis, &guess);
                    last_residual = residual(&g, &guess, target).norm();
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            if sigma.iter().all(|&x| x >= 0.0) {
                return Ok(sigma);
            }
            last_residual = sigma.iter().copied().fold(0.0, f64::min).abs();
        }
    }
    Err(Error::ContinuationDiverged { residual: last_residual })
}

/// One simplex graft: four caustic points whose hull contains the origin receive
/// arcs of lengths `σᵢ ≥ 0` with `Σσᵢ = s` and `Π exp(σᵢχᵢ/2) = 1`.
pub fn graft_simplex_step(curve: &AdmissibleCurve, s: f64, tol: &ToleranceProfile) -> Result<(AdmissibleCurve, GraftRecord)> {
    if !(s >= 0.0) {
        return Err(Error::InvalidInput(format!("graft length {s} is negative")));
    }
    let (base, c, rho2) = prepare(curve)?;
    let rho0 = c.bounds().rho0();
    let cloud = caustic_cloud(&c, tol);
    let pad = 1e-3 * rho0;
    let (points, params): (Vec<Vec3>, Vec<(f64, f64)>) = cloud
        .points
        .iter()
        .zip(&cloud.params)
        .filter(|(_, p)| p.1 > pad && p.1 < rho0 - pad)
        .map(|(x, p)| (*x, *p))
        .unzip();
    if points.is_empty() || hemisphere_margin(&points).margin >= -tol.eps {
        return Err(Error::NotNonCondensed);
    }
    let simplex = containing_simplex(&points, &Vec3::zeros(), tol).map_err(|_| Error::NotNonCondensed)?;
    let volume = simplex.volume();
    if simplex.weights.len() != 4 || volume < 1e-10 {
        return Err(Error::DegenerateSimplex { volume });
    }
    let mut verts: Vec<(f64, f64, Vec3, f64)> = (0..4)
        .map(|k| {
            let (t, theta) = params[simplex.indices[k]];
            (wrap_start(&c, t), theta, *simplex.vertices[k], simplex.weights[k])
        })
        .collect();
    verts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let chis = [verts[0].2, verts[1].2, verts[2].2, verts[3].2];
    let weights = [verts[0].3, verts[1].3, verts[2].3, verts[3].3];
    let sigma = solve_graft_lengths(&chis, &weights, s, tol)?;
    let arcs: Vec<(f64, f64, f64)> = (0..4).map(|k| (verts[k].0, verts[k].1, sigma[k])).collect();
    let grafted = if s > 0.0 { insert_arcs(&c, &arcs)? } else { c.clone() };
    let (result, record) = finish(&base, grafted, rho2, &arcs)?;
    if record.frame_residual > 1e-8 {
        return Err(Error::StageToleranceFailure {
            stage: "simplex graft".into(),
            detail: format!("endpoint lifted frame moved by {:.3e}", record.frame_residual),
        });
    }
    Ok((result, record))
}

#[derive(Debug, Clone)]
pub struct GraftOutcome {
    pub curve: AdmissibleCurve,
    pub status: StatusTag,
    /// Total turning length inserted.
    pub accumulated: f64,
    pub records: Vec<GraftRecord>,
    /// `4πν/cos²(ρ₀/2)` when the rotation number of the input is available.
    pub bound: Option<f64>,
}

/// Repeats simplex grafts while the curve is neither condensed nor diffuse.
/// Steps that fail to converge are halved down to `step / 64`.
pub fn graft_until_resolved(curve: &AdmissibleCurve, step: f64, budget: f64, tol: &ToleranceProfile) -> Result<GraftOutcome> {
    let mut c = curve.clone();
    let mut records = Vec::new();
    let mut accumulated = 0.0;
    let rho0 = c.bounds().rho0();
    let mut bound = None;
    if !(step > 0.0) {
        return Err(Error::InvalidInput(format!("graft step {step} must be positive")));
    }
    loop {
        let status = condensed_status(&c, tol)?;
        let resolved = match status.tag {
            StatusTag::Condensed | StatusTag::Both => Some(StatusTag::Condensed),
            StatusTag::Diffuse => Some(StatusTag::Diffuse),
            StatusTag::Borderline if status.condensed => Some(StatusTag::Borderline),
            _ => None,
        };
        if let Some(tag) = resolved {
            return Ok(GraftOutcome { curve: c, status: tag, accumulated, records, bound });
        }
        if bound.is_none() {
            bound = rotation_number_nondiffuse(&c, tol).ok().map(|nu| tot_bound(nu, rho0));
        }
        if let Some(b) = bound {
            let tot = c.total_curvature();
            if tot > b + tol.graft_eps {
                return Err(Error::BoundViolation { tot, bound: b });
            }
        }
        if accumulated + 0.5 * step > budget {
            return Err(Error::BudgetExceeded { budget });
        }
        let mut h = step.min(budget - accumulated).max(step / 64.0);
        let (next, record) = loop {
            match graft_simplex_step(&c, h, tol) {
                Ok(x) => break x,
                Err(Error::ContinuationDiverged { .. }) | Err(Error::StageToleranceFailure { .. }) if h > step / 64.0 => {
                    h *= 0.5;
                }
                Err(e) => return Err(e),
            }
        };
        accumulated += h;
        records.push(record);
        c = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn composition_of_single_insertions() {
        let a = GraftingFunction::new(1.0, vec![0.25], vec![0.5], vec![], vec![]).unwrap();
        let b = GraftingFunction::new(1.5, vec![], vec![], vec![1.0], vec![0.25]).unwrap();
        let c = compose_grafting(&a, &b).unwrap();
        assert!((c.s1 - 1.75).abs() < 1e-15);
        for k in 0..=100 {
            let t = k as f64 / 100.0;
            assert!((c.eval(t) - b.eval(a.eval(t))).abs() < 1e-12, "t = {t}");
        }
    }

    #[test]
    fn product_derivative() {
        let chis = [Vec3::x(), Vec3::y(), -Vec3::x(), Vec3::new(0.0, 0.6, 0.8)];
        let sigma = [0.3, 0.1, 0.2, 0.05];
        let (_, d) = graft_product(&chis, &sigma);
        for i in 0..4 {
            let mut p = sigma;
            let mut m = sigma;
            p[i] += 1e-6;
            m[i] -= 1e-6;
            let fd = (graft_product(&chis, &p).0 - graft_product(&chis, &m).0) / 2e-6;
            assert!((fd - d[i]).norm() < 1e-8);
        }
    }
}
