//! Condensed/diffuse status, rotation numbers and component labels.
//!
//! All tests run on the reduced curve `γ̄ = γ_{ρ₂}`, whose bounds are
//! `(κ₀, +∞)`; the caustic band is then `C(t, θ)` for `θ ∈ [0, ρ₀]` and the
//! regular band covers `θ ∈ [ρ₀ − π, 0]`.

use std::collections::HashMap;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::band_geometry::{caustic_band_refined, fiber_point, translate_curve};
use crate::curve_model::{AdmissibleCurve, CurvatureBounds, LiftParity};
use crate::error::{Error, Result};
use crate::sphere_core::{fibonacci_sphere, hemisphere_margin, Rotation3, StereoChart, UnitVector3, Vec3};
use crate::tolerance::ToleranceProfile;

/// `n = ⌊π/(ρ₁ − ρ₂)⌋ + 1`, with the quotient snapped to an integer when it is
/// within 1e-12 of one.
pub fn component_count(bounds: &CurvatureBounds) -> usize {
    let q = PI / bounds.rho0();
    let r = q.round();
    let q = if (q - r).abs() < 1e-12 { r } else { q.floor() };
    q as usize + 1
}

/// Translates by `ρ₂` so that the bounds become `(κ₀, +∞)`. Returns the reduced
/// curve and `κ₀`.
pub fn reduce_to_k0(curve: &AdmissibleCurve) -> Result<(AdmissibleCurve, f64)> {
    let b = curve.bounds();
    let kappa0 = b.kappa0();
    if b.rho2 == 0.0 {
        return Ok((curve.clone(), kappa0));
    }
    let rho0 = b.rho0();
    let mut reduced = translate_curve(curve, b.rho2)?;
    // Replace the bounds computed from the sampled radii by the exact ones.
    reduced = reduced.with_bounds(CurvatureBounds::from_rhos(rho0, 0.0)?)?;
    Ok((reduced, kappa0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StatusTag {
    Condensed,
    Diffuse,
    Neither,
    Both,
    Borderline,
}

/// Two band points with `C(t₁, θ₁) ≈ −C(t₂, θ₂)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AntipodalWitness {
    pub t1: f64,
    pub theta1: f64,
    pub t2: f64,
    pub theta2: f64,
    /// `|C(t₁, θ₁) + C(t₂, θ₂)|`.
    pub defect: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CondensedStatus {
    pub tag: StatusTag,
    pub condensed: bool,
    pub diffuse: bool,
    /// Hemisphere pole maximizing the minimal inner product with the caustic band.
    pub hemisphere: UnitVector3,
    /// `min ⟨p, h⟩` over the caustic band.
    pub margin: f64,
    pub antipodal: Option<AntipodalWitness>,
}

/// Sampled caustic band with the band coordinates of every point.
#[derive(Debug, Clone)]
pub struct CausticCloud {
    pub points: Vec<Vec3>,
    pub params: Vec<(f64, f64)>,
}

/// Caustic band of the reduced curve over `θ ∈ [0, ρ₀]`, caustic points included.
pub fn caustic_cloud(curve: &AdmissibleCurve, tol: &ToleranceProfile) -> CausticCloud {
    let refined = curve.refine(tol.max_turn);
    let grid = caustic_band_refined(curve, tol);
    let mut points = grid.points.clone();
    let mut params = Vec::with_capacity(points.len() + grid.caustic.len());
    for &t in &grid.t_values {
        for j in 0..grid.m {
            params.push((t, grid.theta(j)));
        }
    }
    let (lo, hi) = (grid.theta_lo, grid.theta_hi);
    for i in 0..refined.n() {
        let rho = refined.rho(i);
        if rho >= lo && rho <= hi {
            let t = 0.5 * (refined.knots()[i] + refined.knots()[i + 1]);
            points.push(fiber_point(&refined.segment_frame(i, t - refined.knots()[i]), rho));
            params.push((t, rho));
        }
    }
    CausticCloud { points, params }
}

fn require_closed(curve: &AdmissibleCurve, tol: &ToleranceProfile) -> Result<()> {
    let defect = curve.closure_defect();
    if defect > tol.closure {
        return Err(Error::NotClosed { defect });
    }
    Ok(())
}

fn reduced(curve: &AdmissibleCurve) -> Result<AdmissibleCurve> {
    Ok(reduce_to_k0(curve)?.0)
}

/// Condensed and diffuse tests on the caustic band of the reduced curve.
pub fn condensed_status(curve: &AdmissibleCurve, tol: &ToleranceProfile) -> Result<CondensedStatus> {
    require_closed(curve, tol)?;
    let c = reduced(curve)?;
    let cloud = caustic_cloud(&c, tol);
    let sol = hemisphere_margin(&cloud.points);
    let condensed = sol.margin >= -tol.eps;
    // If every point has ⟨p, h⟩ ≥ m then |p + q| ≥ 2m for any two of them.
    let antipodal = if 2.0 * sol.margin >= tol.delta_antipodal {
        None
    } else {
        antipodal_pair(&c, 0.0, c.bounds().rho0(), tol)
    };
    let diffuse = antipodal.map_or(false, |w| w.defect < tol.delta_antipodal);
    let tag = if condensed && diffuse {
        StatusTag::Both
    } else if sol.margin.abs() < tol.eps_borderline {
        StatusTag::Borderline
    } else if condensed {
        StatusTag::Condensed
    } else if diffuse {
        StatusTag::Diffuse
    } else {
        StatusTag::Neither
    };
    Ok(CondensedStatus { tag, condensed, diffuse, hemisphere: sol.h, margin: sol.margin, antipodal })
}

pub fn is_condensed(curve: &AdmissibleCurve, tol: &ToleranceProfile) -> Result<bool> {
    Ok(condensed_status(curve, tol)?.condensed)
}

pub fn is_diffuse(curve: &AdmissibleCurve, tol: &ToleranceProfile) -> Result<bool> {
    Ok(condensed_status(curve, tol)?.diffuse)
}

/// Band point `C(t, θ)` with its partial derivatives in `t` and `θ`.
fn band_point(curve: &AdmissibleCurve, t: f64, theta: f64) -> (Vec3, Vec3, Vec3) {
    let i = curve.segment_of(t);
    let f = curve.segment_frame(i, t - curve.knots()[i]);
    let (g, tan, n) = (f.column(0).into_owned(), f.column(1).into_owned(), f.column(2).into_owned());
    let (c, s) = (theta.cos(), theta.sin());
    let v = curve.speeds()[i];
    let kappa = curve.kappa(i);
    (g * c + n * s, tan * (v * (c - kappa * s)), n * c - g * s)
}

/// Nearest antipodal pair of band points with `θ ∈ [lo, hi]`.
///
/// Candidates come from a spatial hash over a refined sample of the band and
/// are polished by projected Gauss–Newton on `C(t₁, θ₁) + C(t₂, θ₂) = 0`.
pub fn antipodal_pair(curve: &AdmissibleCurve, lo: f64, hi: f64, tol: &ToleranceProfile) -> Option<AntipodalWitness> {
    let r = curve.refine(tol.max_turn);
    let m = tol.band_m.max(2);
    let rows = r.n() + 1;
    let theta = |j: usize| lo + (hi - lo) * j as f64 / (m - 1) as f64;
    let mut pts = Vec::with_capacity(rows * m);
    for i in 0..rows {
        for j in 0..m {
            pts.push(fiber_point(&r.frames()[i], theta(j)));
        }
    }
    let spacing = tol.max_turn.max((hi - lo) / (m - 1) as f64);
    let cell = 3.0 * spacing;
    // One representative per voxel of size spacing/2 keeps dense clusters from
    // dominating the neighbor scans; the Gauss–Newton polish recovers accuracy.
    let voxel = 0.5 * spacing;
    let mut reps: HashMap<(i32, i32, i32), u32> = HashMap::new();
    for (k, p) in pts.iter().enumerate() {
        let v = ((p.x / voxel).floor() as i32, (p.y / voxel).floor() as i32, (p.z / voxel).floor() as i32);
        reps.entry(v).or_insert(k as u32);
    }
    let mut rep_idx: Vec<usize> = reps.into_values().map(|k| k as usize).collect();
    rep_idx.sort_unstable();
    let key = |p: &Vec3| ((p.x / cell).floor() as i32, (p.y / cell).floor() as i32, (p.z / cell).floor() as i32);
    let mut grid: HashMap<(i32, i32, i32), Vec<u32>> = HashMap::new();
    for &k in &rep_idx {
        grid.entry(key(&pts[k])).or_default().push(k as u32);
    }
    let mut best: Vec<(f64, usize, usize)> = rep_idx
        .par_iter()
        .filter_map(|&a| {
            let q = -pts[a];
            let (kx, ky, kz) = key(&q);
            let mut found: Option<(f64, usize)> = None;
            for dx in -1..=1 {
                for dy in -1..=1 {
                    for dz in -1..=1 {
                        if let Some(list) = grid.get(&(kx + dx, ky + dy, kz + dz)) {
                            for &b in list {
                                let d = (pts[b as usize] - q).norm();
                                if d < cell && found.map_or(true, |(bd, _)| d < bd) {
                                    found = Some((d, b as usize));
                                }
                            }
                        }
                    }
                }
            }
            found.map(|(d, b)| (d, a, b))
        })
        .collect();
    best.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut picked: Vec<(usize, usize, usize, usize)> = Vec::new();
    for &(_, a, b) in &best {
        let (ra, rb) = (a / m, b / m);
        let near = picked.iter().any(|&(pa, pb, _, _)| {
            (ra.abs_diff(pa) <= 4 && rb.abs_diff(pb) <= 4) || (ra.abs_diff(pb) <= 4 && rb.abs_diff(pa) <= 4)
        });
        if !near {
            picked.push((ra, rb, a % m, b % m));
            if picked.len() >= 12 {
                break;
            }
        }
    }
    let mut out: Option<AntipodalWitness> = None;
    for &(ra, rb, ja, jb) in &picked {
        let x0 = [r.knots()[ra], theta(ja), r.knots()[rb], theta(jb)];
        let w = refine_antipodal(curve, x0, lo, hi);
        if out.map_or(true, |o| w.defect < o.defect) {
            out = Some(w);
        }
        if out.map_or(false, |o| o.defect < 1e-13) {
            break;
        }
    }
    out
}

fn refine_antipodal(curve: &AdmissibleCurve, x0: [f64; 4], lo: f64, hi: f64) -> AntipodalWitness {
    let t0 = curve.knots()[0];
    let period = curve.duration();
    let closed = curve.is_closed();
    let project = |x: &mut [f64; 4]| {
        for k in [0, 2] {
            if closed {
                x[k] = t0 + (x[k] - t0).rem_euclid(period);
            } else {
                x[k] = x[k].clamp(t0, t0 + period);
            }
        }
        for k in [1, 3] {
            x[k] = x[k].clamp(lo, hi);
        }
    };
    let eval = |x: &[f64; 4]| {
        let (p, pt, pth) = band_point(curve, x[0], x[1]);
        let (q, qt, qth) = band_point(curve, x[2], x[3]);
        (p + q, [pt, pth, qt, qth])
    };
    let mut x = x0;
    project(&mut x);
    let (mut r, mut cols) = eval(&x);
    for _ in 0..40 {
        if r.norm() < 1e-15 {
            break;
        }
        let j = nalgebra::Matrix3x4::from_columns(&cols);
        let svd = j.svd(true, true);
        let Ok(step) = svd.solve(&r, 1e-12) else { break };
        let mut lambda = 1.0;
        let mut improved = false;
        for _ in 0..25 {
            let mut y = [x[0] - lambda * step[0], x[1] - lambda * step[1], x[2] - lambda * step[2], x[3] - lambda * step[3]];
            project(&mut y);
            let (ry, cy) = eval(&y);
            if ry.norm() < r.norm() {
                x = y;
                r = ry;
                cols = cy;
                improved = true;
                break;
            }
            lambda *= 0.5;
        }
        if !improved {
            break;
        }
    }
    AntipodalWitness { t1: x[0], theta1: x[1], t2: x[2], theta2: x[3], defect: r.norm() }
}

/// Barycenter of the set of hemisphere poles `{h : ⟨p, h⟩ ≥ 0 for every p}`,
/// sampled on a Fibonacci lattice and projected back to the sphere.
pub fn hemisphere_barycenter(cloud: &[Vec3], tol: &ToleranceProfile) -> Result<UnitVector3> {
    let lattice = fibonacci_sphere(tol.fibonacci_m);
    let stride = (cloud.len() / 256).max(1);
    let sub: Vec<Vec3> = cloud.iter().step_by(stride).copied().collect();
    let (sum, count) = lattice
        .par_iter()
        .filter(|h| sub.iter().all(|p| p.dot(h) >= 0.0) && cloud.iter().all(|p| p.dot(h) >= 0.0))
        .map(|h| (*h, 1usize))
        .reduce(|| (Vec3::zeros(), 0), |a, b| (a.0 + b.0, a.1 + b.1));
    if count == 0 {
        return Err(Error::EmptyDual);
    }
    let centroid = sum / count as f64;
    let norm = centroid.norm();
    if norm < 1e-6 {
        return Err(Error::NearZeroCentroid { norm });
    }
    Ok(UnitVector3::new(centroid))
}

/// Barycenter with the margin-maximizing pole as fallback.
pub(crate) fn canonical_pole(cloud: &[Vec3], tol: &ToleranceProfile) -> UnitVector3 {
    match hemisphere_barycenter(cloud, tol) {
        Ok(h) => h,
        Err(_) => hemisphere_margin(cloud).h,
    }
}

/// Winding number `N` of the tangent of `pr ∘ γ`, projecting from `−h`.
fn planar_winding(curve: &AdmissibleCurve, h: &UnitVector3, tol: &ToleranceProfile) -> Result<i64> {
    let chart = StereoChart::new(&-*h);
    let r = curve.refine(tol.max_turn.min(0.02));
    let mut total = 0.0;
    let mut prev: Option<f64> = None;
    for i in 0..r.frames().len() {
        let d = chart.project_tangent(&r.gamma(i), &r.tangent(i))?;
        let a = d.y.atan2(d.x);
        if let Some(p) = prev {
            total += (a - p + PI).rem_euclid(2.0 * PI) - PI;
        }
        prev = Some(a);
    }
    let turns = total / (2.0 * PI);
    let residual = (turns - turns.round()).abs();
    if residual > tol.winding_residual {
        return Err(Error::WindingResidual { residual });
    }
    Ok(turns.round() as i64)
}

/// `ν = −N(pr ∘ γ̄)` for a condensed curve, projecting from minus the barycenter.
pub fn rotation_number_condensed(curve: &AdmissibleCurve, tol: &ToleranceProfile) -> Result<i64> {
    require_closed(curve, tol)?;
    let c = reduced(curve)?;
    let cloud = caustic_cloud(&c, tol);
    let sol = hemisphere_margin(&cloud.points);
    if sol.margin < -tol.eps {
        return Err(Error::NotCondensed);
    }
    let h = canonical_pole(&cloud.points, tol);
    Ok(-planar_winding(&c, &h, tol)?)
}

/// A parameter `t` at which `b` lies on the fiber through `γ(t)`, with the
/// fiber angle of `b`.
#[derive(Debug, Clone, Copy)]
struct FiberHit {
    theta: f64,
}

/// Closed-form solutions of `⟨b, t(τ)⟩ = 0` on segment `i`, counted on `[0, dt)`.
///
/// Returns `None` when `b` is (numerically) the axis of the segment's circle, in
/// which case it lies on every fiber of the segment.
fn segment_hits(curve: &AdmissibleCurve, i: usize, b: &Vec3, out: &mut Vec<FiberHit>) -> Option<()> {
    let (v, w) = (curve.speeds()[i], curve.w_values()[i]);
    let c = v.hypot(w);
    let bb = curve.frames()[i].matrix().transpose() * b;
    let a = Vec3::new(w / c, 0.0, v / c);
    let big_a = bb.y;
    let big_s = (-v * bb.x + w * bb.z) / c;
    if big_a.hypot(big_s) < 1e-12 {
        return None;
    }
    let span = c * curve.segment_duration(i);
    let mut psi = (big_s.atan2(big_a) + PI / 2.0).rem_euclid(PI);
    let rot = |x: Vec3, psi: f64| -> Vec3 {
        let (cs, sn) = (psi.cos(), psi.sin());
        x * cs + a.cross(&x) * sn + a * (a.dot(&x) * (1.0 - cs))
    };
    while psi < span {
        let g = rot(Vec3::x(), psi);
        let n = rot(Vec3::z(), psi);
        out.push(FiberHit { theta: bb.dot(&n).atan2(bb.dot(&g)) });
        psi += PI;
    }
    Some(())
}

/// Every fiber hit of `b`, or `None` when `b` sits on a segment axis.
fn fiber_hits(curve: &AdmissibleCurve, b: &Vec3) -> Option<Vec<FiberHit>> {
    let mut out = Vec::new();
    for i in 0..curve.n() {
        segment_hits(curve, i, b, &mut out)?;
    }
    Some(out)
}

/// Membership of `b` in `C` and in `D = −C`, padded by `delta` along fibers.
fn membership(hits: &[FiberHit], rho0: f64, delta: f64) -> (bool, bool) {
    let in_c = hits.iter().any(|h| h.theta >= -delta && h.theta <= rho0 + delta);
    let in_d = hits.iter().any(|h| h.theta <= rho0 - PI + delta || h.theta >= PI - delta);
    (in_c, in_d)
}

/// Witness point on the free stretch of one fiber between its last point in `D`
/// and its first point in `C`, with the stretch length.
fn fiber_gap(curve: &AdmissibleCurve, frame: &Rotation3, tol: &ToleranceProfile) -> Option<(Vec3, f64)> {
    let rho0 = curve.bounds().rho0();
    let (lo, hi) = (rho0 - PI, 0.0);
    let samples = 2 * tol.band_m.max(8);
    let step = (hi - lo) / samples as f64;
    let delta = 2.0 * tol.band_spacing(rho0);
    let mut tags = Vec::with_capacity(samples);
    for j in 0..samples {
        let b = fiber_point(frame, lo + step * (j as f64 + 0.5));
        tags.push(match fiber_hits(curve, &b) {
            Some(hits) => membership(&hits, rho0, delta),
            None => (true, true),
        });
    }
    // The fiber starts in D and ends in C; the stretch runs from the last D
    // sample before the first C sample up to that C sample.
    let first_c = tags.iter().position(|t| t.0).unwrap_or(samples);
    let last_d = tags[..first_c].iter().rposition(|t| t.1).map_or(0, |k| k + 1);
    if last_d >= first_c {
        return None;
    }
    let mid = (last_d + first_c - 1) as f64 / 2.0;
    Some((fiber_point(frame, lo + step * (mid + 0.5)), (first_c - last_d) as f64 * step))
}

/// Number of fiber hits of `b` with angle in the regular range `[ρ₀ − π, 0]`.
fn count_sheets(curve: &AdmissibleCurve, b: &Vec3) -> Option<i64> {
    let rho0 = curve.bounds().rho0();
    let hits = fiber_hits(curve, b)?;
    Some(hits.iter().filter(|h| h.theta >= rho0 - PI && h.theta <= 0.0).count() as i64)
}

/// Number of sheets of the regular band over a witness point outside `C ∪ D`,
/// confirmed by a second witness on a different fiber.
pub fn rotation_number_nondiffuse(curve: &AdmissibleCurve, tol: &ToleranceProfile) -> Result<i64> {
    require_closed(curve, tol)?;
    let c = reduced(curve)?;
    let n = c.n();
    let probes = 8.min(n);
    let mut gaps: Vec<(f64, Vec3)> = (0..probes)
        .into_par_iter()
        .filter_map(|q| {
            let i = (q * n) / probes + (n / (2 * probes)).min(n - 1 - (q * n) / probes);
            let f = c.segment_frame(i, 0.5 * c.segment_duration(i));
            fiber_gap(&c, &f, tol).map(|(b, len)| (len, b))
        })
        .collect();
    if gaps.is_empty() {
        return Err(Error::NoGapFound);
    }
    gaps.sort_by(|a, b| b.0.total_cmp(&a.0));
    let counts: Vec<i64> = gaps.iter().take(2).filter_map(|(_, b)| count_sheets(&c, b)).collect();
    match counts.as_slice() {
        [] => Err(Error::NoGapFound),
        [k] => Ok(*k),
        [k1, k2, ..] if k1 == k2 => Ok(*k1),
        [k1, k2, ..] => Err(Error::DomainError(format!("sheet counts disagree between witnesses: {k1} vs {k2}"))),
    }
}

/// `4πν / cos²(ρ₀/2)`, the total-curvature bound for non-diffuse curves.
pub fn tot_bound(nu: i64, rho0: f64) -> f64 {
    let c = (0.5 * rho0).cos();
    4.0 * PI * nu as f64 / (c * c)
}

/// `Σ arcsin(cos ρ₀ sin λ_i) ≥ π − 2ρ₀` for `λ₂ + λ₄ + λ₆ = π`, `λ_i ∈ [0, π/2]`.
pub fn equatorial_inequality_check(rho0: f64, lambdas: [f64; 3]) -> Result<bool> {
    if !(rho0 > 0.0 && rho0 <= PI / 2.0) {
        return Err(Error::DomainError(format!("ρ₀ = {rho0} not in (0, π/2]")));
    }
    if lambdas.iter().any(|l| !(*l >= -1e-12 && *l <= PI / 2.0 + 1e-12)) {
        return Err(Error::DomainError("angles must lie in [0, π/2]".into()));
    }
    let sum: f64 = lambdas.iter().sum();
    if (sum - PI).abs() > 1e-9 {
        return Err(Error::DomainError(format!("angles sum to {sum}, not π")));
    }
    let lhs: f64 = lambdas.iter().map(|l| (rho0.cos() * l.sin()).clamp(-1.0, 1.0).asin()).sum();
    Ok(lhs >= PI - 2.0 * rho0 - 1e-12)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabelDiagnostics {
    pub condensed: bool,
    pub nu: Option<i64>,
    pub parity: LiftParity,
    pub borderline: bool,
}

/// Index `j ∈ {1, …, n}` of the component containing a curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComponentLabel {
    pub n: usize,
    pub j: usize,
    pub diagnostics: LabelDiagnostics,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationReport {
    pub label: ComponentLabel,
    pub kappa0: f64,
    pub status: CondensedStatus,
}

/// The label among `{n − 1, n}` whose sign `(−1)^j` matches the parity.
pub fn parity_label(n: usize, parity: LiftParity) -> usize {
    let even = parity == LiftParity::Plus;
    if (n % 2 == 0) == even {
        n
    } else {
        n - 1
    }
}

/// Component label: condensed curves with `ν ≤ n − 2` get `j = ν`, all others
/// are sorted into `{n − 1, n}` by the parity of the lifted frame.
pub fn classify_component(curve: &AdmissibleCurve, tol: &ToleranceProfile) -> Result<ClassificationReport> {
    require_closed(curve, tol)?;
    let (c, kappa0) = reduce_to_k0(curve)?;
    let n = component_count(&c.bounds());
    let parity = c.lift_parity()?;
    let status = condensed_status(&c, tol)?;
    let borderline = status.tag == StatusTag::Borderline || (status.margin.abs() < tol.eps_borderline);
    let mut nu = None;
    if status.condensed {
        let cloud = caustic_cloud(&c, tol);
        let h = canonical_pole(&cloud.points, tol);
        match planar_winding(&c, &h, tol) {
            Ok(w) => nu = Some(-w),
            Err(e) if !borderline => return Err(e),
            Err(_) => {}
        }
    }
    let j = match nu {
        Some(v) if status.condensed && !borderline && v >= 1 && (v as usize) + 2 <= n => v as usize,
        _ => parity_label(n, parity),
    };
    let label = ComponentLabel {
        n,
        j,
        diagnostics: LabelDiagnostics { condensed: status.condensed, nu, parity, borderline },
    };
    Ok(ClassificationReport { label, kappa0, status })
}

/// Classifies many curves in parallel.
pub fn classify_corpus(curves: &[AdmissibleCurve], tol: &ToleranceProfile) -> Vec<Result<ClassificationReport>> {
    curves.par_iter().map(|c| classify_component(c, tol)).collect()
}
