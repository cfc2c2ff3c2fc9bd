//! Explicit homotopies as discrete paths of admissible curves.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::band_geometry::translate_curve;
use crate::classification::{caustic_cloud, canonical_pole, reduce_to_k0};
use crate::curve_model::{continuous_lifts, curve_from_points, from_frames, AdmissibleCurve, CurvatureBounds, LiftParity};
use crate::error::{Error, Result};
use crate::sphere_core::{hemisphere_margin, Rotation3, StereoChart, UnitQuaternion, UnitVector3, Vec2, Vec3};
use crate::tolerance::ToleranceProfile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Bending,
    Loops,
    Shrink,
    Graft,
    Planar,
    Custom,
    Bands,
}

/// A sampled homotopy `s ↦ γ_s`.
#[derive(Debug, Clone)]
pub struct HomotopyPath {
    pub bounds: CurvatureBounds,
    pub s_values: Vec<f64>,
    pub curves: Vec<AdmissibleCurve>,
    pub provenance: Provenance,
}

impl HomotopyPath {
    pub fn len(&self) -> usize {
        self.curves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }

    pub fn first(&self) -> &AdmissibleCurve {
        &self.curves[0]
    }

    pub fn last(&self) -> &AdmissibleCurve {
        &self.curves[self.curves.len() - 1]
    }
}

/// The path that stays at `curve` for `steps` samples.
pub fn constant_path(curve: &AdmissibleCurve, steps: usize) -> HomotopyPath {
    let steps = steps.max(2);
    HomotopyPath {
        bounds: curve.bounds(),
        s_values: s_grid(steps),
        curves: vec![curve.clone(); steps],
        provenance: Provenance::Custom,
    }
}

fn s_grid(steps: usize) -> Vec<f64> {
    (0..steps).map(|i| i as f64 / (steps - 1) as f64).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    /// `min (κ − κ₁, κ₂ − κ)` over every segment of every curve.
    pub min_margin: f64,
    pub max_closure_defect: f64,
    /// `+1`/`−1` per curve, `0` when the parity could not be decided.
    pub parities: Vec<i32>,
    pub pass: bool,
}

/// Smallest distance of a curve's segment curvatures to the ends of `bounds`.
pub fn curvature_margin(curve: &AdmissibleCurve, bounds: &CurvatureBounds) -> f64 {
    (0..curve.n())
        .map(|i| {
            let k = curve.kappa(i);
            (k - bounds.kappa1).min(bounds.kappa2 - k)
        })
        .fold(f64::INFINITY, f64::min)
}

pub fn validate_path(path: &HomotopyPath, bounds: &CurvatureBounds, tol: &ToleranceProfile) -> ValidationReport {
    let rows: Vec<(f64, f64, i32)> = path
        .curves
        .par_iter()
        .map(|c| {
            let parity = c.lift_parity().map_or(0, |p| p.sign());
            (curvature_margin(c, bounds), c.closure_defect(), parity)
        })
        .collect();
    let min_margin = rows.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
    let max_closure_defect = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    let parities: Vec<i32> = rows.iter().map(|r| r.2).collect();
    let constant = parities.first().map_or(true, |p| *p != 0 && parities.iter().all(|q| q == p));
    ValidationReport {
        min_margin,
        max_closure_defect,
        pass: min_margin > 0.0 && max_closure_defect < tol.closure && constant,
        parities,
    }
}

/// One arc of a bent equator: spherical center, radius and turning angle.
struct ThreePointArc {
    start: Vec3,
    axis: Vec3,
    rho: f64,
    angle: f64,
}

/// The arc of the circle through `a`, `q`, `b`, traversed in that order.
fn arc_through(a: &Vec3, q: &Vec3, b: &Vec3) -> Result<ThreePointArc> {
    let nrm = (q - a).cross(&(b - q));
    let len = nrm.norm();
    if len < 1e-14 {
        return Err(Error::DomainError("collinear arc points".into()));
    }
    let axis = nrm / len;
    let rho = a.dot(&axis).clamp(-1.0, 1.0).acos();
    let u0 = a - axis * a.dot(&axis);
    let angle_of = |x: &Vec3| {
        let u = x - axis * x.dot(&axis);
        axis.dot(&u0.cross(&u)).atan2(u0.dot(&u)).rem_euclid(2.0 * PI)
    };
    let angle = angle_of(b);
    if angle_of(q) >= angle {
        return Err(Error::DomainError("arc points are not in order".into()));
    }
    Ok(ThreePointArc { start: *a, axis, rho, angle })
}

/// Frame at the start of an arc rotating about `axis`.
fn arc_start_frame(arc: &ThreePointArc) -> Rotation3 {
    let g = arc.start;
    let t = arc.axis.cross(&g).normalize();
    Rotation3::from_columns(&g, &t, &g.cross(&t))
}

/// The curve `σ_α`: `2k + 2` arcs through `P_i`, `Q_i(±α)`, `P_{i+1}`.
pub fn bent_equator(k: u32, alpha: f64, bounds: CurvatureBounds, per_arc: usize) -> Result<AdmissibleCurve> {
    let arcs = 2 * k as usize + 2;
    let kf = k as f64;
    let on_equator = |x: f64| Vec3::new((2.0 * PI * kf * x).cos(), (2.0 * PI * kf * x).sin(), 0.0);
    let m = (kf * PI / (2.0 * kf + 2.0)).cos();
    let north = Vec3::z();
    let per_arc = per_arc.max(1);
    let mut knots = vec![0.0];
    let mut v = Vec::with_capacity(arcs * per_arc);
    let mut w = Vec::with_capacity(arcs * per_arc);
    let mut starts = Vec::with_capacity(arcs);
    for i in 0..arcs {
        let a = if i % 2 == 0 { alpha } else { -alpha };
        let qh = on_equator((i as f64 + 0.5) / arcs as f64);
        let r = -m * a.cos() + (m * m * a.cos() * a.cos() + 1.0 - m * m).sqrt();
        let q = qh * m + (qh * a.cos() + north * a.sin()) * r;
        let p0 = on_equator(i as f64 / arcs as f64);
        let p1 = on_equator((i + 1) as f64 / arcs as f64);
        let arc = arc_through(&p0, &q, &p1)?;
        let c = arc.angle * arcs as f64;
        let dt = 1.0 / (arcs * per_arc) as f64;
        for p in 0..per_arc {
            v.push(c * arc.rho.sin());
            w.push(c * arc.rho.cos());
            knots.push((i * per_arc + p + 1) as f64 * dt);
        }
        starts.push(arc_start_frame(&arc));
    }
    let last = knots.len() - 1;
    knots[last] = 1.0;
    let curve = AdmissibleCurve::from_segments(bounds, knots, v, w, starts[0].to_quaternion())?;
    for (i, f) in starts.iter().enumerate() {
        let got = &curve.frames()[i * per_arc];
        let defect = (got.matrix() - f.matrix()).abs().max();
        if defect > 1e-8 {
            return Err(Error::DomainError(format!("junction {i} frame mismatch {defect:.3e}")));
        }
    }
    Ok(curve)
}

/// The bending of the k-equator, normalized so that `Φ(0) = I` along the path.
pub fn bend_k_equator(k: u32, steps: usize, kappa1: f64, tol: &ToleranceProfile) -> Result<HomotopyPath> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be positive".into()));
    }
    let required = (PI / (2.0 * k as f64 + 2.0)).tan();
    if !(kappa1 > required) {
        return Err(Error::CurvatureBoundTooTight { kappa1, required });
    }
    let bounds = CurvatureBounds::new(-kappa1, kappa1)?;
    let steps = steps.max(2);
    let per_arc = tol.grid_n.div_ceil(2 * k as usize + 2).max(4);
    let s_values = s_grid(steps);
    let curves = s_values
        .par_iter()
        .map(|s| Ok(bent_equator(k, s * PI, bounds, per_arc)?.normalized()))
        .collect::<Result<Vec<_>>>()?;
    Ok(HomotopyPath { bounds, s_values, curves, provenance: Provenance::Bending })
}

/// Splits segments so that every parameter in `ts` becomes a knot.
fn with_knots_at(curve: &AdmissibleCurve, ts: &[f64]) -> AdmissibleCurve {
    let mut knots = vec![curve.knots()[0]];
    let mut v = Vec::new();
    let mut w = Vec::new();
    let mut lifts = vec![curve.lifts()[0]];
    for i in 0..curve.n() {
        let (a, b) = (curve.knots()[i], curve.knots()[i + 1]);
        let mut cuts: Vec<f64> = ts.iter().copied().filter(|t| *t > a + 1e-15 && *t < b - 1e-15).collect();
        cuts.sort_by(f64::total_cmp);
        for t in cuts {
            knots.push(t);
            lifts.push(curve.lift_at(t));
            v.push(curve.speeds()[i]);
            w.push(curve.w_values()[i]);
        }
        knots.push(b);
        lifts.push(curve.lifts()[i + 1]);
        v.push(curve.speeds()[i]);
        w.push(curve.w_values()[i]);
    }
    AdmissibleCurve::assemble(curve.bounds(), knots, v, w, lifts)
}

/// Inserts `n_loops` turns of the circle of radius `rho_small` at `γ(t₀)`,
/// compressing `[t₀ − 2ε, t₀ + 2ε]` to make room for them.
pub fn add_loops(curve: &AdmissibleCurve, t0: f64, n_loops: u32, rho_small: f64, eps: f64) -> Result<AdmissibleCurve> {
    if n_loops == 0 {
        return Ok(curve.clone());
    }
    let (a, b) = (curve.knots()[0], curve.knots()[curve.n()]);
    let (lo, hi) = (t0 - 2.0 * eps, t0 + 2.0 * eps);
    if !(eps > 0.0 && lo > a && hi < b) {
        return Err(Error::ParameterOverlap { lo, hi });
    }
    let bounds = curve.bounds();
    if !bounds.contains_rho(rho_small) {
        return Err(Error::RadiusOutOfBounds { rho: rho_small, lo: bounds.rho2, hi: bounds.rho1 });
    }
    let split = with_knots_at(curve, &[lo, t0, hi]);
    let remap = |t: f64| {
        if t <= lo {
            t
        } else if t <= t0 {
            0.5 * (t + t0 - 2.0 * eps)
        } else if t <= hi {
            0.5 * (t + t0 + 2.0 * eps)
        } else {
            t
        }
    };
    let mut knots = vec![remap(split.knots()[0])];
    let mut v = Vec::new();
    let mut w = Vec::new();
    let loop_pieces = 16 * n_loops as usize;
    let c = 2.0 * PI * n_loops as f64 / (2.0 * eps);
    for i in 0..split.n() {
        let (ka, kb) = (split.knots()[i], split.knots()[i + 1]);
        if ka == t0 {
            for p in 1..=loop_pieces {
                knots.push(t0 - eps + 2.0 * eps * p as f64 / loop_pieces as f64);
                v.push(c * rho_small.sin());
                w.push(c * rho_small.cos());
            }
        }
        let squeeze = if ka >= lo && kb <= hi { 2.0 } else { 1.0 };
        knots.push(remap(kb));
        v.push(split.speeds()[i] * squeeze);
        w.push(split.w_values()[i] * squeeze);
    }
    AdmissibleCurve::from_segments(bounds, knots, v, w, curve.lifts()[0])
}

/// Point and velocity of `σ_n^{ρ}` at `t`.
fn loop_circle(n: u32, rho: f64, t: f64) -> (Vec3, Vec3) {
    let axis = Vec3::new(rho.cos(), 0.0, rho.sin());
    let r = Rotation3::axis_angle(&axis, 2.0 * PI * n as f64 * t);
    let p = r * Vec3::x();
    (p, axis.cross(&p) * (2.0 * PI * n as f64))
}

/// `F_n(γ)(t) = Φ_γ(t) σ_n^{ρ₁}(t)`, with `γ` first reparametrized to constant `|Λ|`.
///
/// The frame of `F_n(γ)` is evaluated exactly at a fine grid and consecutive
/// frames are joined by biarcs; the result keeps the bounds of `curve`.
pub fn spread_loops(curve: &AdmissibleCurve, n: u32, rho1: f64) -> Result<AdmissibleCurve> {
    if n == 0 {
        return Err(Error::InvalidInput("spread_loops needs n ≥ 1".into()));
    }
    let c = curve.reparametrize_constant_turn();
    let samples = (64 * n as usize).max(2 * c.n()).max(256);
    let knots: Vec<f64> = (0..=samples).map(|j| j as f64 / samples as f64).collect();
    let frames: Vec<Rotation3> = knots
        .par_iter()
        .map(|&t| {
            let i = c.segment_of(t);
            let phi = c.segment_frame(i, t - c.knots()[i]);
            let omega = Vec3::new(c.w_values()[i], 0.0, c.speeds()[i]);
            let (s, ds) = loop_circle(n, rho1, t);
            let p = phi * s;
            let dp = phi * (omega.cross(&s) + ds);
            let tan = (dp - p * p.dot(&dp)).normalize();
            Rotation3::from_columns(&p, &tan, &p.cross(&tan))
        })
        .collect();
    let mut lifts = continuous_lifts(&frames);
    if lifts[0].dot(&c.lifts()[0]) < 0.0 {
        for z in lifts.iter_mut() {
            *z = -*z;
        }
    }
    from_frames(curve.bounds(), &knots, &lifts)
}

/// A closed three-petal curve with `κ > cot 0.15` that is neither condensed nor
/// diffuse: a rose whose petal tips sit slightly south of the equator, covered
/// by small loops.
pub fn neither_example() -> Result<AdmissibleCurve> {
    let big_r = (PI / 4.0 + 0.1).tan();
    let chart = StereoChart::new(&-UnitVector3::e3());
    let m = 720;
    let pts: Vec<Vec3> = (0..m)
        .map(|j| {
            let psi = PI * j as f64 / m as f64;
            let r = big_r * (3.0 * psi).cos();
            chart.unproject(&Vec2::new(r * psi.cos(), r * psi.sin()))
        })
        .collect();
    let rose = curve_from_points(&pts, CurvatureBounds::unbounded())?;
    let bounds = CurvatureBounds::from_rhos(0.15, 0.0)?;
    let mut last = None;
    for n in [16, 24, 32, 48, 64, 96, 128] {
        match spread_loops(&rose, n, 0.075).and_then(|c| c.with_bounds(bounds)) {
            Ok(c) => return Ok(c.normalized()),
            Err(e) => last = Some(e),
        }
    }
    Err(last.unwrap_or(Error::DomainError("no loop count fits the bounds".into())))
}

/// A sampled planar curve: positions and velocities at parameters `t`, with the
/// curvature at the midpoint of each interval when it is known in closed form.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarCurve {
    pub t: Vec<f64>,
    pub pos: Vec<Vec2>,
    pub vel: Vec<Vec2>,
    pub curvature: Vec<f64>,
}

impl PlanarCurve {
    /// Curvature from the turning of the velocity over the chord length, per interval.
    pub fn discrete_curvature(&self) -> Vec<f64> {
        (0..self.pos.len() - 1)
            .map(|j| {
                let a = self.vel[j].y.atan2(self.vel[j].x);
                let b = self.vel[j + 1].y.atan2(self.vel[j + 1].x);
                let d = (b - a + PI).rem_euclid(2.0 * PI) - PI;
                d / (self.pos[j + 1] - self.pos[j]).norm()
            })
            .collect()
    }

    pub fn min_curvature(&self) -> f64 {
        let k = if self.curvature.is_empty() { self.discrete_curvature() } else { self.curvature.clone() };
        k.into_iter().fold(f64::INFINITY, f64::min)
    }

    pub fn closure_gap(&self) -> f64 {
        (self.pos[self.pos.len() - 1] - self.pos[0]).norm()
    }
}

#[derive(Debug, Clone)]
pub struct PlanarPath {
    pub s_values: Vec<f64>,
    pub curves: Vec<PlanarCurve>,
    /// Rotation number `N` of every curve in the path.
    pub rotation: i64,
    /// Scale factor `λ(s)` applied to each curve.
    pub lambdas: Vec<f64>,
}

fn unwrap_angles(vel: &[Vec2]) -> Vec<f64> {
    let mut out = Vec::with_capacity(vel.len());
    for (j, d) in vel.iter().enumerate() {
        let a = d.y.atan2(d.x);
        if j == 0 {
            out.push(a);
        } else {
            let p = out[j - 1];
            out.push(p + (a - p + PI).rem_euclid(2.0 * PI) - PI);
        }
    }
    out
}

/// `(e^{ix} − 1)/(ix)` as a complex number.
fn phase_mean(x: f64) -> Vec2 {
    if x.abs() < 1e-6 {
        Vec2::new(1.0 - x * x / 6.0, x / 2.0)
    } else {
        Vec2::new(x.sin() / x, (1.0 - x.cos()) / x)
    }
}

fn cmul(a: Vec2, b: Vec2) -> Vec2 {
    Vec2::new(a.x * b.x - a.y * b.y, a.x * b.y + a.y * b.x)
}

fn cis(a: f64) -> Vec2 {
    Vec2::new(a.cos(), a.sin())
}

/// Homotopy of a closed planar curve with positive curvature to a round circle
/// with the same rotation number, by interpolating tangent angles.
///
/// The input is resampled by chord length; at each `s` the angle function is
/// `(1 − s) θ_a + s θ`, the velocity `L e^{iθ^s}` minus its mean keeps the curve
/// closed, and the start point is fixed. When `kappa0 > 0` each curve is scaled
/// by `λ(s) = min(1, 0.999 κ_min/κ₀)` about the origin.
pub fn planar_wg_homotopy(curve: &PlanarCurve, kappa0: f64, steps: usize) -> Result<PlanarPath> {
    let k = curve.pos.len();
    if k < 4 || curve.vel.len() != k {
        return Err(Error::InvalidInput("planar curve needs at least four samples".into()));
    }
    let mut t = vec![0.0];
    for j in 0..k - 1 {
        t.push(t[j] + (curve.pos[j + 1] - curve.pos[j]).norm());
    }
    let length = t[k - 1];
    for x in t.iter_mut() {
        *x /= length;
    }
    let theta_a = unwrap_angles(&curve.vel);
    let turns = (theta_a[k - 1] - theta_a[0]) / (2.0 * PI);
    let rotation = turns.round() as i64;
    if (turns - rotation as f64).abs() > 0.05 {
        return Err(Error::WindingResidual { residual: (turns - rotation as f64).abs() });
    }
    if rotation <= 0 {
        return Err(Error::NonpositiveRotation(rotation));
    }
    let theta_c: Vec<f64> = t.iter().map(|x| theta_a[0] + 2.0 * PI * rotation as f64 * x).collect();
    let steps = steps.max(2);
    let s_values = s_grid(steps);
    let start = curve.pos[0];
    let built: Vec<(PlanarCurve, f64)> = s_values
        .par_iter()
        .map(|&s| {
            let th: Vec<f64> = (0..k).map(|j| (1.0 - s) * theta_a[j] + s * theta_c[j]).collect();
            let pieces: Vec<Vec2> = (0..k - 1)
                .map(|j| cmul(cis(th[j]), phase_mean(th[j + 1] - th[j])) * (length * (t[j + 1] - t[j])))
                .collect();
            let mean: Vec2 = pieces.iter().sum();
            let mut pos = Vec::with_capacity(k);
            pos.push(start);
            for j in 0..k - 1 {
                let next = pos[j] + pieces[j] - mean * (t[j + 1] - t[j]);
                pos.push(next);
            }
            let vel: Vec<Vec2> = th.iter().map(|a| cis(*a) * length - mean).collect();
            let curvature: Vec<f64> = (0..k - 1)
                .map(|j| {
                    let dt = t[j + 1] - t[j];
                    let dth = (th[j + 1] - th[j]) / dt;
                    let am = 0.5 * (th[j] + th[j + 1]);
                    let tau = cis(am) * length - mean;
                    dth * length * (length - mean.dot(&cis(am))) / tau.norm().powi(3)
                })
                .collect();
            let kmin = curvature.iter().copied().fold(f64::INFINITY, f64::min);
            let lambda = if kappa0 > 0.0 { (0.999 * kmin / kappa0).min(1.0) } else { 1.0 };
            let pc = PlanarCurve {
                t: t.clone(),
                pos: pos.iter().map(|p| p * lambda).collect(),
                vel: vel.iter().map(|d| d * lambda).collect(),
                curvature: curvature.iter().map(|c| c / lambda).collect(),
            };
            (pc, lambda)
        })
        .collect();
    let (curves, lambdas) = built.into_iter().unzip();
    Ok(PlanarPath { s_values, curves, rotation, lambdas })
}

/// Lifts planar samples through the inverse chart and joins the frames by biarcs.
fn lift_planar(chart: &StereoChart, t: &[f64], pos: &[Vec2], vel: &[Vec2], bounds: CurvatureBounds) -> Result<AdmissibleCurve> {
    let frames: Vec<Rotation3> = pos
        .iter()
        .zip(vel)
        .map(|(y, dy)| {
            let (p, dp) = chart.unproject_with_tangent(y, dy);
            let tan = (dp - p * p.dot(&dp)).normalize();
            Rotation3::from_columns(&p, &tan, &p.cross(&tan))
        })
        .collect();
    let lifts = continuous_lifts(&frames);
    from_frames(bounds, t, &lifts)
}

/// Homotopy of a condensed curve (with `κ₀ ≥ 0`) to a circle traversed `ν` times.
///
/// Stage one applies the conformal dilatations `pr⁻¹ ∘ (r ·) ∘ pr` of the chart
/// centered at the barycenter `h`, for `r` from 1 down to `δ`. Stage two runs
/// the planar angle-interpolation homotopy on `δ · pr ∘ γ` and lifts it back.
/// `δ` is halved until every lifted curve of stage two is admissible.
pub fn shrink_condensed(curve: &AdmissibleCurve, steps: usize, tol: &ToleranceProfile) -> Result<HomotopyPath> {
    let defect = curve.closure_defect();
    if defect > tol.closure {
        return Err(Error::NotClosed { defect });
    }
    let original = curve.bounds();
    let (c, kappa0) = reduce_to_k0(curve)?;
    if kappa0 < 0.0 {
        return Err(Error::DomainError(format!("shrinking needs κ₀ ≥ 0, got {kappa0}")));
    }
    let bounds = c.bounds();
    let cloud = caustic_cloud(&c, tol);
    if hemisphere_margin(&cloud.points).margin < -tol.eps {
        return Err(Error::NotCondensed);
    }
    let h = canonical_pole(&cloud.points, tol);
    let chart = StereoChart::new(&-h).reflected();
    let base = c.refine(0.02);
    let knots: Vec<f64> = base.knots().to_vec();
    let mut ys = Vec::with_capacity(knots.len());
    let mut dys = Vec::with_capacity(knots.len());
    for i in 0..knots.len() {
        let g = base.gamma(i);
        ys.push(chart.project(&g)?);
        dys.push(chart.project_tangent(&g, &base.tangent(i))?);
    }
    let steps = steps.max(4);
    let n1 = steps.div_ceil(2);
    let n2 = steps - n1 + 1;

    let mut delta = 0.5;
    let mut stage2: Option<Vec<AdmissibleCurve>> = None;
    for _ in 0..40 {
        let planar = PlanarCurve {
            t: knots.clone(),
            pos: ys.iter().map(|y| y * delta).collect(),
            vel: dys.iter().map(|d| d * delta).collect(),
            curvature: Vec::new(),
        };
        let path = planar_wg_homotopy(&planar, 0.0, n2)?;
        let lifted: Result<Vec<AdmissibleCurve>> = path
            .curves
            .par_iter()
            .skip(1)
            .map(|pc| lift_planar(&chart, &pc.t, &pc.pos, &pc.vel, bounds))
            .collect();
        if let Ok(l) = lifted {
            stage2 = Some(l);
            break;
        }
        delta *= 0.5;
    }
    let stage2 = stage2.ok_or_else(|| Error::StageToleranceFailure {
        stage: "planar".into(),
        detail: "no dilatation scale keeps the lifted curvature above κ₀".into(),
    })?;
    let stage1: Vec<AdmissibleCurve> = (0..n1)
        .into_par_iter()
        .map(|j| {
            let u = j as f64 / (n1 - 1) as f64;
            if j == 0 {
                return Ok(c.clone());
            }
            let r = delta.powf(u);
            let pos: Vec<Vec2> = ys.iter().map(|y| y * r).collect();
            let vel: Vec<Vec2> = dys.iter().map(|d| d * r).collect();
            lift_planar(&chart, &knots, &pos, &vel, bounds).map_err(|e| Error::StageToleranceFailure {
                stage: "dilatation".into(),
                detail: format!("r = {r}: {e}"),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let rho2 = original.rho2;
    let curves = stage1
        .into_iter()
        .chain(stage2)
        .map(|g| {
            let g = if rho2 > 0.0 { translate_curve(&g, -rho2)?.with_bounds(original)? } else { g };
            Ok(g.normalized())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(HomotopyPath { bounds: original, s_values: s_grid(curves.len()), curves, provenance: Provenance::Shrink })
}

/// Sign of the final lifted frame relative to the initial one, as `±1`.
pub fn parity_sign(curve: &AdmissibleCurve) -> Result<i32> {
    curve.lift_parity().map(LiftParity::sign)
}

/// Rotates every curve of a path so that `Φ(0) = I`.
pub fn normalize_path(path: &HomotopyPath) -> HomotopyPath {
    HomotopyPath {
        curves: path.curves.iter().map(|c| c.normalized()).collect(),
        ..path.clone()
    }
}

/// The left rotation taking `Φ(0)` to the identity.
pub fn initial_frame_inverse(curve: &AdmissibleCurve) -> UnitQuaternion {
    curve.lifts()[0].conj()
}
