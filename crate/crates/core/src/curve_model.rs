//! Admissible curves: curvature bounds, control functions and frame integration.
//!
//! A curve is stored as piecewise-constant controls on knots `t_0 < … < t_N`.
//! On each interval the logarithmic derivative of the frame is constant, so
//! every piece is an exact circular arc and the lifted frame at the knots is
//! obtained by exact quaternion exponentials.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sphere_core::{angle_between, quat_exp, quat_log, quat_to_rotation, Rotation3, UnitQuaternion, UnitVector3, Vec3};
use crate::tolerance::ToleranceProfile;

/// `arccot` with values in `[0, π]`; `arccot(+∞) = 0`, `arccot(−∞) = π`.
pub fn arccot(kappa: f64) -> f64 {
    PI / 2.0 - kappa.atan()
}

/// `cot ρ`, returning `±∞` at the ends of `[0, π]`.
pub fn cot(rho: f64) -> f64 {
    if rho <= 0.0 {
        f64::INFINITY
    } else if rho >= PI {
        f64::NEG_INFINITY
    } else {
        rho.cos() / rho.sin()
    }
}

/// Bounds `κ₁ < κ₂` on the geodesic curvature, with radii `ρ_i = arccot κ_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureBounds {
    pub kappa1: f64,
    pub kappa2: f64,
    pub rho1: f64,
    pub rho2: f64,
}

impl CurvatureBounds {
    pub fn new(kappa1: f64, kappa2: f64) -> Result<Self> {
        if kappa1.is_nan() || kappa2.is_nan() || kappa1 >= kappa2 || kappa1 == f64::INFINITY || kappa2 == f64::NEG_INFINITY {
            return Err(Error::DomainError(format!("invalid curvature bounds ({kappa1}, {kappa2})")));
        }
        Ok(Self { kappa1, kappa2, rho1: arccot(kappa1), rho2: arccot(kappa2) })
    }

    /// Bounds from radii `0 ≤ ρ₂ < ρ₁ ≤ π`; the endpoints give exact infinities.
    pub fn from_rhos(rho1: f64, rho2: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&rho1) || !(0.0..=PI).contains(&rho2) || rho2 >= rho1 {
            return Err(Error::DomainError(format!("invalid radii ({rho1}, {rho2})")));
        }
        Ok(Self { kappa1: cot(rho1), kappa2: cot(rho2), rho1, rho2 })
    }

    pub fn unbounded() -> Self {
        Self { kappa1: f64::NEG_INFINITY, kappa2: f64::INFINITY, rho1: PI, rho2: 0.0 }
    }

    /// Bounds of the form `(κ₀, +∞)`.
    pub fn lower(kappa0: f64) -> Result<Self> {
        Self::new(kappa0, f64::INFINITY)
    }

    /// `ρ₀ = ρ₁ − ρ₂`.
    pub fn rho0(&self) -> f64 {
        self.rho1 - self.rho2
    }

    /// `κ₀ = cot(ρ₁ − ρ₂)`.
    pub fn kappa0(&self) -> f64 {
        cot(self.rho0())
    }

    pub fn contains_kappa(&self, kappa: f64) -> bool {
        kappa > self.kappa1 && kappa < self.kappa2
    }

    pub fn contains_rho(&self, rho: f64) -> bool {
        rho > self.rho2 && rho < self.rho1
    }

    /// Signed distance of `ρ` to the complement of `(ρ₂, ρ₁)`.
    pub fn rho_margin(&self, rho: f64) -> f64 {
        (rho - self.rho2).min(self.rho1 - rho)
    }
}

/// `h(t) = t − 1/t` on `(0, ∞)`.
pub fn h(t: f64) -> f64 {
    t - 1.0 / t
}

/// Positive root of `t² − x t − 1 = 0`, evaluated without cancellation.
pub fn h_inv(x: f64) -> f64 {
    let r = (x * x + 4.0).sqrt();
    if x >= 0.0 {
        (x + r) / 2.0
    } else {
        2.0 / (r - x)
    }
}

/// The diffeomorphisms between `(v̂, ŵ)` and `(v, κ)` for a given pair of bounds.
#[derive(Debug, Clone, Copy)]
pub struct ControlTransforms {
    pub bounds: CurvatureBounds,
}

pub fn control_transforms(bounds: CurvatureBounds) -> ControlTransforms {
    ControlTransforms { bounds }
}

impl ControlTransforms {
    pub fn h(&self, t: f64) -> f64 {
        h(t)
    }

    pub fn h_inv(&self, x: f64) -> f64 {
        h_inv(x)
    }

    /// `h_{κ₁,κ₂}: (κ₁, κ₂) → R`.
    pub fn h_bounds(&self, t: f64) -> f64 {
        let (k1, k2) = (self.bounds.kappa1, self.bounds.kappa2);
        match (k1.is_finite(), k2.is_finite()) {
            (false, false) => t,
            (true, false) => t + 1.0 / (k1 - t),
            (false, true) => t + 1.0 / (k2 - t),
            (true, true) => 1.0 / (k1 - t) + 1.0 / (k2 - t),
        }
    }

    pub fn h_bounds_inv(&self, x: f64) -> f64 {
        let (k1, k2) = (self.bounds.kappa1, self.bounds.kappa2);
        match (k1.is_finite(), k2.is_finite()) {
            (false, false) => x,
            (true, false) => k1 + h_inv(x - k1),
            (false, true) => k2 - h_inv(k2 - x),
            (true, true) => self.finite_inverse(x, k1, k2),
        }
    }

    /// Safeguarded Newton iteration on the increasing map `h_{κ₁,κ₂}`.
    fn finite_inverse(&self, x: f64, k1: f64, k2: f64) -> f64 {
        let f = |t: f64| 1.0 / (k1 - t) + 1.0 / (k2 - t) - x;
        let df = |t: f64| 1.0 / ((k1 - t) * (k1 - t)) + 1.0 / ((k2 - t) * (k2 - t));
        let (mut lo, mut hi) = (k1, k2);
        // The root of the quadratic x(k1−t)(k2−t) = (k1−t) + (k2−t) in (k1, k2).
        let mut t = if x == 0.0 {
            0.5 * (k1 + k2)
        } else {
            let a = x;
            let b = 2.0 - x * (k1 + k2);
            let c = x * k1 * k2 - k1 - k2;
            let disc = (b * b - 4.0 * a * c).max(0.0).sqrt();
            let q = -0.5 * (b + b.signum() * disc);
            let r1 = q / a;
            let r2 = if q != 0.0 { c / q } else { r1 };
            if r1 > k1 && r1 < k2 {
                r1
            } else {
                r2
            }
        };
        if !(t > k1 && t < k2) {
            t = 0.5 * (k1 + k2);
        }
        for _ in 0..100 {
            let v = f(t);
            if v > 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            let step = v / df(t);
            let mut next = t - step;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - t).abs() <= 1e-16 * (1.0 + t.abs()) {
                return next;
            }
            t = next;
        }
        t
    }
}

/// Values of `v̂`, `ŵ` on the `N` intervals of a uniform grid of `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlPair {
    pub n: usize,
    pub v_hat: Vec<f64>,
    pub w_hat: Vec<f64>,
}

impl ControlPair {
    pub fn validate(&self) -> Result<()> {
        if self.n < 16 {
            return Err(Error::InvalidInput(format!("grid size {} < 16", self.n)));
        }
        if self.v_hat.len() != self.n || self.w_hat.len() != self.n {
            return Err(Error::InvalidInput("control arrays do not match n".into()));
        }
        if self.v_hat.iter().chain(&self.w_hat).any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("non-finite control value".into()));
        }
        Ok(())
    }
}

/// Sign of `⟨z(1), z(0)⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LiftParity {
    Plus,
    Minus,
}

impl LiftParity {
    pub fn sign(self) -> i32 {
        match self {
            LiftParity::Plus => 1,
            LiftParity::Minus => -1,
        }
    }

    pub fn from_sign(s: i64) -> Self {
        if s >= 0 {
            LiftParity::Plus
        } else {
            LiftParity::Minus
        }
    }
}

/// A curve with piecewise-constant controls, its frames and lifted frames.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibleCurve {
    bounds: CurvatureBounds,
    knots: Vec<f64>,
    v: Vec<f64>,
    w: Vec<f64>,
    lifts: Vec<UnitQuaternion>,
    frames: Vec<Rotation3>,
    closed: bool,
}

impl AdmissibleCurve {
    /// Integrates segment controls from the lifted initial frame `z0`.
    ///
    /// `v[i] > 0` is the speed and `w[i] = κ_i v[i]` on `[knots[i], knots[i+1]]`.
    pub fn from_segments(bounds: CurvatureBounds, knots: Vec<f64>, v: Vec<f64>, w: Vec<f64>, z0: UnitQuaternion) -> Result<Self> {
        let n = v.len();
        if n == 0 || knots.len() != n + 1 || w.len() != n {
            return Err(Error::InvalidInput("segment arrays have inconsistent lengths".into()));
        }
        for i in 0..n {
            if !(knots[i + 1] > knots[i]) {
                return Err(Error::InvalidInput(format!("knots not increasing at {i}")));
            }
            if !(v[i] > 0.0) || !v[i].is_finite() || !w[i].is_finite() {
                return Err(Error::InvalidInput(format!("invalid speed or curvature on segment {i}")));
            }
            let kappa = w[i] / v[i];
            if !bounds.contains_kappa(kappa) {
                return Err(Error::DomainError(format!(
                    "curvature {kappa} on segment {i} outside ({}, {})",
                    bounds.kappa1, bounds.kappa2
                )));
            }
        }
        let mut lifts = Vec::with_capacity(n + 1);
        let mut z = z0.renormalized();
        lifts.push(z);
        for i in 0..n {
            let dt = knots[i + 1] - knots[i];
            z = z * step_quaternion(v[i], w[i], dt);
            lifts.push(z);
        }
        Ok(Self::assemble(bounds, knots, v, w, lifts))
    }

    /// Builds a curve whose node lifts are given and whose pieces are exact arcs.
    /// The caller guarantees `lifts[i+1] = lifts[i] · exp(½ dt (w i + v k))`.
    pub(crate) fn assemble(bounds: CurvatureBounds, knots: Vec<f64>, v: Vec<f64>, w: Vec<f64>, lifts: Vec<UnitQuaternion>) -> Self {
        let frames: Vec<Rotation3> = lifts.iter().map(|z| quat_to_rotation(*z)).collect();
        let first = frames[0];
        let last = frames[frames.len() - 1];
        let defect = (last.matrix() - first.matrix()).abs().max();
        Self { bounds, knots, v, w, lifts, frames, closed: defect < 1e-7 }
    }

    pub fn bounds(&self) -> CurvatureBounds {
        self.bounds
    }

    /// Number of segments.
    pub fn n(&self) -> usize {
        self.v.len()
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn speeds(&self) -> &[f64] {
        &self.v
    }

    pub fn w_values(&self) -> &[f64] {
        &self.w
    }

    pub fn lifts(&self) -> &[UnitQuaternion] {
        &self.lifts
    }

    pub fn frames(&self) -> &[Rotation3] {
        &self.frames
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    /// Parameter length `t_N − t_0`.
    pub fn duration(&self) -> f64 {
        self.knots[self.knots.len() - 1] - self.knots[0]
    }

    pub fn segment_duration(&self, i: usize) -> f64 {
        self.knots[i + 1] - self.knots[i]
    }

    pub fn kappa(&self, i: usize) -> f64 {
        self.w[i] / self.v[i]
    }

    /// Radius of curvature `arccot κ` on segment `i`.
    pub fn rho(&self, i: usize) -> f64 {
        self.w[i].atan2(self.v[i]).mul_add(-1.0, PI / 2.0)
    }

    /// Angular speed `√(v² + w²)` of the frame on segment `i` (the total-curvature density).
    pub fn turn_rate(&self, i: usize) -> f64 {
        self.v[i].hypot(self.w[i])
    }

    /// Curvature at node `i`, taken from the segment starting there (the last node
    /// uses the last segment).
    pub fn kappa_at_node(&self, i: usize) -> f64 {
        self.kappa(i.min(self.n() - 1))
    }

    pub fn gamma(&self, i: usize) -> Vec3 {
        self.frames[i].column(0).into_owned()
    }

    pub fn tangent(&self, i: usize) -> Vec3 {
        self.frames[i].column(1).into_owned()
    }

    pub fn normal(&self, i: usize) -> Vec3 {
        self.frames[i].column(2).into_owned()
    }

    pub fn point(&self, i: usize) -> UnitVector3 {
        UnitVector3::new(self.gamma(i))
    }

    pub fn kappa_range(&self) -> (f64, f64) {
        (0..self.n()).map(|i| self.kappa(i)).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), k| (a.min(k), b.max(k)))
    }

    pub fn rho_range(&self) -> (f64, f64) {
        (0..self.n()).map(|i| self.rho(i)).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), r| (a.min(r), b.max(r)))
    }

    /// Index of the segment containing parameter `t` (clamped to the domain).
    pub fn segment_of(&self, t: f64) -> usize {
        let n = self.n();
        match self.knots.binary_search_by(|k| k.total_cmp(&t)) {
            Ok(i) => i.min(n - 1),
            Err(0) => 0,
            Err(i) => (i - 1).min(n - 1),
        }
    }

    /// Lifted frame at an arbitrary parameter.
    pub fn lift_at(&self, t: f64) -> UnitQuaternion {
        let i = self.segment_of(t);
        let tau = t - self.knots[i];
        self.lifts[i] * step_quaternion(self.v[i], self.w[i], tau)
    }

    pub fn frame_at(&self, t: f64) -> Rotation3 {
        quat_to_rotation(self.lift_at(t))
    }

    /// Frame at offset `tau` into segment `i`, by the Rodrigues formula.
    pub fn segment_frame(&self, i: usize, tau: f64) -> Rotation3 {
        self.frames[i] * arc_rotation(self.v[i], self.w[i], tau)
    }

    /// `Φ(T)` versus `Φ(0)` and `z(T)` versus `±z(0)`.
    pub fn closure_defect(&self) -> f64 {
        let a = &self.frames[0];
        let b = &self.frames[self.frames.len() - 1];
        let fd = (b.matrix() - a.matrix()).abs().max();
        let z0 = self.lifts[0];
        let z1 = self.lifts[self.lifts.len() - 1];
        fd.max(z1.distance(&z0).min(z1.distance(&-z0)))
    }

    /// Largest deviation of a stored quaternion from unit norm.
    pub fn max_norm_drift(&self) -> f64 {
        self.lifts.iter().map(|z| (z.norm() - 1.0).abs()).fold(0.0, f64::max)
    }

    pub fn lift_parity(&self) -> Result<LiftParity> {
        let inner = self.lifts[0].dot(&self.lifts[self.lifts.len() - 1]);
        if inner.abs() < 0.9 {
            return Err(Error::AmbiguousParity { inner });
        }
        Ok(if inner > 0.0 { LiftParity::Plus } else { LiftParity::Minus })
    }

    /// `∫ K |γ̇| dt` with `K = √(1+κ²)`; exact for piecewise-constant controls.
    pub fn total_curvature(&self) -> f64 {
        (0..self.n()).map(|i| self.turn_rate(i) * self.segment_duration(i)).sum()
    }

    pub fn length(&self) -> f64 {
        (0..self.n()).map(|i| self.v[i] * self.segment_duration(i)).sum()
    }

    pub fn with_bounds(&self, bounds: CurvatureBounds) -> Result<Self> {
        for i in 0..self.n() {
            if !bounds.contains_kappa(self.kappa(i)) {
                return Err(Error::DomainError(format!("curvature {} outside the new bounds", self.kappa(i))));
            }
        }
        let mut c = self.clone();
        c.bounds = bounds;
        Ok(c)
    }

    /// Applies the rigid motion `q` (acting on the left of every lifted frame).
    pub fn rotated(&self, q: UnitQuaternion) -> Self {
        let lifts = self.lifts.iter().map(|z| q * *z).collect();
        Self::assemble(self.bounds, self.knots.clone(), self.v.clone(), self.w.clone(), lifts)
    }

    /// The congruent curve with `Φ(0) = I` and `z(0) = 1`.
    pub fn normalized(&self) -> Self {
        self.rotated(self.lifts[0].conj())
    }

    /// Same geometry with knots shifted and scaled onto `[0, T]`.
    fn with_knots(&self, knots: Vec<f64>, v: Vec<f64>, w: Vec<f64>) -> Self {
        Self::assemble(self.bounds, knots, v, w, self.lifts.clone())
    }

    /// Reparametrization with `tot(γ|[0,u]) = u`; the lifted frame then has speed ½.
    pub fn reparametrize_by_curvature(&self) -> Self {
        let mut knots = Vec::with_capacity(self.n() + 1);
        let mut acc = 0.0;
        knots.push(0.0);
        let mut v = Vec::with_capacity(self.n());
        let mut w = Vec::with_capacity(self.n());
        for i in 0..self.n() {
            let c = self.turn_rate(i);
            acc += c * self.segment_duration(i);
            knots.push(acc);
            v.push(self.v[i] / c);
            w.push(self.w[i] / c);
        }
        self.with_knots(knots, v, w)
    }

    /// Constant-speed reparametrization over `[0, 1]`.
    pub fn reparametrize_arclength(&self) -> Self {
        let len = self.length();
        let mut knots = Vec::with_capacity(self.n() + 1);
        knots.push(0.0);
        let mut acc = 0.0;
        let mut v = Vec::with_capacity(self.n());
        let mut w = Vec::with_capacity(self.n());
        for i in 0..self.n() {
            acc += self.v[i] * self.segment_duration(i);
            knots.push(acc / len);
            v.push(len);
            w.push(self.kappa(i) * len);
        }
        let last = knots.len() - 1;
        knots[last] = 1.0;
        self.with_knots(knots, v, w)
    }

    /// Reparametrization with constant `|Λ| = √(v² + w²)` over `[0, 1]`.
    pub fn reparametrize_constant_turn(&self) -> Self {
        let tot = self.total_curvature();
        let c = self.reparametrize_by_curvature();
        let knots: Vec<f64> = c.knots.iter().map(|k| k / tot).collect();
        let v = c.v.iter().map(|x| x * tot).collect();
        let w = c.w.iter().map(|x| x * tot).collect();
        let mut out = c.with_knots(knots, v, w);
        let last = out.knots.len() - 1;
        out.knots[last] = 1.0;
        out
    }

    /// Splits segments so that no piece turns the frame by more than `max_turn`.
    pub fn refine(&self, max_turn: f64) -> Self {
        let mut knots = vec![self.knots[0]];
        let mut v = Vec::new();
        let mut w = Vec::new();
        let mut lifts = vec![self.lifts[0]];
        for i in 0..self.n() {
            let dt = self.segment_duration(i);
            let pieces = ((self.turn_rate(i) * dt / max_turn).ceil() as usize).max(1);
            let h = dt / pieces as f64;
            for p in 1..=pieces {
                if p == pieces {
                    knots.push(self.knots[i + 1]);
                    lifts.push(self.lifts[i + 1]);
                } else {
                    knots.push(self.knots[i] + h * p as f64);
                    lifts.push(self.lifts[i] * step_quaternion(self.v[i], self.w[i], h * p as f64));
                }
                v.push(self.v[i]);
                w.push(self.w[i]);
            }
        }
        let mut c = Self::assemble(self.bounds, knots, v, w, lifts);
        c.closed = self.closed;
        c
    }

    /// Exact restatement on the uniform grid of `[0, 1]`.
    pub fn to_controls(&self) -> ControlPair {
        let n = self.n();
        let tr = control_transforms(self.bounds);
        let mut v_hat = Vec::with_capacity(n);
        let mut w_hat = Vec::with_capacity(n);
        for i in 0..n {
            let scale = self.segment_duration(i) * n as f64;
            v_hat.push(h(self.v[i] * scale));
            w_hat.push(tr.h_bounds(self.kappa(i)));
        }
        ControlPair { n, v_hat, w_hat }
    }

    /// Point samples dense enough that consecutive points turn by at most `max_turn`.
    pub fn dense_points(&self, max_turn: f64) -> Vec<Vec3> {
        let r = self.refine(max_turn);
        (0..r.frames.len()).map(|i| r.gamma(i)).collect()
    }
}

/// `exp(½ dt (w i + v k))`, the lifted frame increment of one segment.
pub fn step_quaternion(v: f64, w: f64, dt: f64) -> UnitQuaternion {
    quat_exp(&Vec3::new(0.5 * dt * w, 0.0, 0.5 * dt * v))
}

/// `exp(dt (v E₃ + w E₁))` as a rotation matrix.
pub fn arc_rotation(v: f64, w: f64, dt: f64) -> Rotation3 {
    Rotation3::axis_angle(&Vec3::new(w, 0.0, v), v.hypot(w) * dt)
}

/// Integrates `Φ' = ΦΛ` with controls held constant per interval.
pub fn integrate_curve(controls: &ControlPair, bounds: CurvatureBounds, q0: Rotation3) -> Result<AdmissibleCurve> {
    controls.validate()?;
    let tr = control_transforms(bounds);
    let n = controls.n;
    let dt = 1.0 / n as f64;
    let knots: Vec<f64> = (0..=n).map(|i| i as f64 * dt).collect();
    let mut v = Vec::with_capacity(n);
    let mut w = Vec::with_capacity(n);
    for i in 0..n {
        let vi = h_inv(controls.v_hat[i]);
        let ki = tr.h_bounds_inv(controls.w_hat[i]);
        debug_assert!(vi > 0.0, "h⁻¹ is positive");
        v.push(vi);
        w.push(vi * ki);
    }
    AdmissibleCurve::from_segments(bounds, knots, v, w, q0.to_quaternion())
}

/// The circle of radius `ρ` through `e₁` with initial tangent `e₂`, traversed `k` times.
pub fn make_circle(rho: f64, k: u32, bounds: CurvatureBounds) -> Result<AdmissibleCurve> {
    make_circle_n(rho, k, bounds, ToleranceProfile::default().grid_n)
}

pub fn make_circle_n(rho: f64, k: u32, bounds: CurvatureBounds, n: usize) -> Result<AdmissibleCurve> {
    if !bounds.contains_rho(rho) || !(rho > 0.0 && rho < PI) {
        return Err(Error::RadiusOutOfBounds { rho, lo: bounds.rho2, hi: bounds.rho1 });
    }
    if k == 0 || n == 0 {
        return Err(Error::InvalidInput("circle needs k ≥ 1 and n ≥ 1".into()));
    }
    let c = 2.0 * PI * k as f64;
    let (v, w) = (c * rho.sin(), c * rho.cos());
    let knots = (0..=n).map(|i| i as f64 / n as f64).collect();
    let mut lifts = Vec::with_capacity(n + 1);
    for i in 0..=n {
        // Integrate from the identity directly at each node to avoid drift.
        lifts.push(step_quaternion(v, w, i as f64 / n as f64));
    }
    Ok(AdmissibleCurve::assemble(bounds, knots, vec![v; n], vec![w; n], lifts))
}

pub fn total_curvature(curve: &AdmissibleCurve) -> f64 {
    curve.total_curvature()
}

pub fn lift_parity(curve: &AdmissibleCurve) -> Result<LiftParity> {
    curve.lift_parity()
}

pub fn reparametrize_by_curvature(curve: &AdmissibleCurve) -> AdmissibleCurve {
    curve.reparametrize_by_curvature()
}

pub fn reparametrize_arclength(curve: &AdmissibleCurve) -> AdmissibleCurve {
    curve.reparametrize_arclength()
}

/// Makes consecutive quaternions agree in sign so that the sequence is a path in S³.
pub fn continuous_lifts(frames: &[Rotation3]) -> Vec<UnitQuaternion> {
    let mut out: Vec<UnitQuaternion> = Vec::with_capacity(frames.len());
    for f in frames {
        let mut q = f.to_quaternion();
        if let Some(prev) = out.last() {
            if prev.dot(&q) < 0.0 {
                q = -q;
            }
        }
        out.push(q);
    }
    out
}

/// Joins consecutive lifted frames by biarcs: two arcs of equal length whose
/// product of increments reproduces `z_i⁻¹ z_{i+1}` exactly.
///
/// Each interval `[t_i, t_{i+1}]` becomes two segments of half its duration.
pub fn from_frames(bounds: CurvatureBounds, knots: &[f64], lifts: &[UnitQuaternion]) -> Result<AdmissibleCurve> {
    if knots.len() != lifts.len() || knots.len() < 2 {
        return Err(Error::InvalidInput("from_frames needs matching knots and lifts".into()));
    }
    let n = knots.len() - 1;
    let mut nk = Vec::with_capacity(2 * n + 1);
    let mut v = Vec::with_capacity(2 * n);
    let mut w = Vec::with_capacity(2 * n);
    let mut nl = Vec::with_capacity(2 * n + 1);
    nk.push(knots[0]);
    nl.push(lifts[0]);
    for i in 0..n {
        let dt = knots[i + 1] - knots[i];
        if !(dt > 0.0) {
            return Err(Error::InvalidInput(format!("knots not increasing at {i}")));
        }
        let d = lifts[i].conj() * lifts[i + 1];
        let (a1, a2, beta) = solve_biarc(&d).ok_or_else(|| {
            Error::DomainError(format!("frames {i} and {} cannot be joined by a forward biarc", i + 1))
        })?;
        let speed = 4.0 * beta / dt;
        v.push(speed);
        w.push(4.0 * a1 / dt);
        v.push(speed);
        w.push(4.0 * a2 / dt);
        nk.push(knots[i] + 0.5 * dt);
        nk.push(knots[i + 1]);
        nl.push(lifts[i] * quat_exp(&Vec3::new(a1, 0.0, beta)));
        nl.push(lifts[i + 1]);
    }
    for i in 0..v.len() {
        let kappa = w[i] / v[i];
        if !bounds.contains_kappa(kappa) {
            return Err(Error::DomainError(format!(
                "biarc curvature {kappa} outside ({}, {})",
                bounds.kappa1, bounds.kappa2
            )));
        }
    }
    Ok(AdmissibleCurve::assemble(bounds, nk, v, w, nl))
}

/// Solves `exp(α₁ i + β k) exp(α₂ i + β k) = d` with `β > 0`.
pub(crate) fn solve_biarc(d: &UnitQuaternion) -> Option<(f64, f64, f64)> {
    let l = quat_log(d);
    if !(l.z > 0.0) {
        return None;
    }
    let mut beta = 0.5 * l.z;
    let mut a1 = 0.5 * (l.x - l.y / beta);
    let mut a2 = 0.5 * (l.x + l.y / beta);
    let residual = |a1: f64, a2: f64, b: f64| -> Vec3 {
        let p = quat_exp(&Vec3::new(a1, 0.0, b)) * quat_exp(&Vec3::new(a2, 0.0, b));
        (d.conj() * p).imag()
    };
    let mut r = residual(a1, a2, beta);
    for _ in 0..60 {
        if r.norm() < 1e-16 {
            break;
        }
        let eps = 1e-7 * (1.0 + a1.abs().max(a2.abs()).max(beta));
        let mut jac = nalgebra::Matrix3::<f64>::zeros();
        let base = [a1, a2, beta];
        for c in 0..3 {
            let mut p = base;
            let mut m = base;
            p[c] += eps;
            m[c] -= eps;
            let col = (residual(p[0], p[1], p[2]) - residual(m[0], m[1], m[2])) / (2.0 * eps);
            jac.set_column(c, &col);
        }
        let step = jac.lu().solve(&r)?;
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let (n1, n2, nb) = (a1 - lambda * step.x, a2 - lambda * step.y, beta - lambda * step.z);
            if nb > 0.0 {
                let nr = residual(n1, n2, nb);
                if nr.norm() < r.norm() {
                    a1 = n1;
                    a2 = n2;
                    beta = nb;
                    r = nr;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    let p = quat_exp(&Vec3::new(a1, 0.0, beta)) * quat_exp(&Vec3::new(a2, 0.0, beta));
    if p.distance(d) > 1e-11 || !(beta > 0.0) {
        return None;
    }
    Some((a1, a2, beta))
}

/// Imports a closed polyline `[[x,y,z], …]` (last point not repeated).
///
/// Tangents come from centered chords, frames are `(γ, t, γ × t)`, and
/// consecutive frames are joined by biarcs over chord-length knots.
pub fn curve_from_points(points: &[Vec3], bounds: CurvatureBounds) -> Result<AdmissibleCurve> {
    let mut pts: Vec<Vec3> = points.iter().map(|p| p.normalize()).collect();
    if pts.len() >= 2 && (pts[0] - pts[pts.len() - 1]).norm() < 1e-12 {
        pts.pop();
    }
    let m = pts.len();
    if m < 8 {
        return Err(Error::InvalidInput("need at least 8 distinct points".into()));
    }
    let mut frames = Vec::with_capacity(m + 1);
    for i in 0..m {
        let p = pts[i];
        let chord = pts[(i + 1) % m] - pts[(i + m - 1) % m];
        let t = chord - p * p.dot(&chord);
        let tn = t.norm();
        if tn < 1e-14 {
            return Err(Error::InvalidInput(format!("degenerate tangent at point {i}")));
        }
        let t = t / tn;
        frames.push(Rotation3::from_columns(&p, &t, &p.cross(&t)));
    }
    frames.push(frames[0]);
    let lifts = continuous_lifts(&frames);
    let mut knots = vec![0.0];
    for i in 0..m {
        let a = angle_between(&pts[i], &pts[(i + 1) % m]);
        knots.push(knots[i] + a.max(1e-15));
    }
    let total = knots[m];
    for k in knots.iter_mut() {
        *k /= total;
    }
    from_frames(bounds, &knots, &lifts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arccot_limits() {
        assert_eq!(arccot(f64::INFINITY), 0.0);
        assert!((arccot(f64::NEG_INFINITY) - PI).abs() < 1e-15);
        assert!((arccot(1.0) - PI / 4.0).abs() < 1e-15);
    }

    #[test]
    fn h_inverse_is_stable() {
        for x in [-1e8, -3.0, -1e-3, 0.0, 2.5, 1e8] {
            let t = h_inv(x);
            assert!(t > 0.0);
            assert!((h(t) - x).abs() <= 1e-9 * (1.0 + x.abs()));
        }
    }

    #[test]
    fn circle_caustic_is_the_axis() {
        let c = make_circle_n(0.7, 1, CurvatureBounds::unbounded(), 64).unwrap();
        let chi0 = c.gamma(0) * 0.7f64.cos() + c.normal(0) * 0.7f64.sin();
        for i in 0..=64 {
            let chi = c.gamma(i) * 0.7f64.cos() + c.normal(i) * 0.7f64.sin();
            assert!((chi - chi0).norm() < 1e-12);
        }
    }

    #[test]
    fn biarc_reproduces_an_arc() {
        let d = step_quaternion(1.3, 0.4, 0.1);
        let (a1, a2, b) = solve_biarc(&d).unwrap();
        assert!((a1 - 0.01).abs() < 1e-12 && (a2 - 0.01).abs() < 1e-12 && (b - 0.0325).abs() < 1e-12);
    }

    #[test]
    fn segment_frame_matches_lift() {
        let c = make_circle_n(1.1, 2, CurvatureBounds::unbounded(), 32).unwrap();
        let tau = 0.3 * c.segment_duration(5);
        let a = c.segment_frame(5, tau);
        let b = c.frame_at(c.knots()[5] + tau);
        assert!((a.matrix() - b.matrix()).norm() < 1e-12);
    }
}
