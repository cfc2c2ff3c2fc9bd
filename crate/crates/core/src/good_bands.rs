//! Acceptable and good bands on the `ν`-sheeted cover of a hemisphere, the
//! alternating retraction onto good bands, central curves, and the collapse
//! of condensed curves with `κ₀ < 0` onto a circle traversed `ν` times.
//!
//! A band is stored by its boundary latitudes `θ₊(λ_k) ≥ θ₋(λ_k)` on `K`
//! equally spaced meridians `λ_k = λ₀ + 2πν k / K`. The cover point `(λ, φ)`
//! sits over `(cos φ cos λ, cos φ sin λ, sin φ)` in a frame whose third axis
//! is the pole of the hemisphere. Distances use `Δλ` clamped to `[−π, π]`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::band_geometry::{fiber_point, translate_curve};
use crate::classification::{caustic_cloud, reduce_to_k0, rotation_number_condensed};
use crate::curve_model::{curve_from_points, AdmissibleCurve, CurvatureBounds};
use crate::error::{Error, Result};
use crate::homotopy_engine::{HomotopyPath, Provenance};
use crate::sphere_core::{hemisphere_margin, Rotation3, UnitVector3, Vec3};
use crate::tolerance::ToleranceProfile;

/// Boundary latitudes of a band over the cover.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcceptableBand {
    pub nu: u32,
    /// Target width `R`.
    pub width: f64,
    pub lambda0: f64,
    pub theta_plus: Vec<f64>,
    pub theta_minus: Vec<f64>,
    /// Columns `(e₁, e₂, N)` of the cover frame in world coordinates.
    pub frame: Rotation3,
    /// Whether longitudes run clockwise about `N`.
    pub mirrored: bool,
}

/// A band whose boundaries are at distance `R` from each other, up to `defect`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoodBand {
    pub band: AcceptableBand,
    pub defect: f64,
}

/// Nearest-point data of a query against one boundary.
#[derive(Debug, Clone, Copy)]
struct Foot {
    dist: f64,
    /// Fractional node index of the nearest point, unwrapped near the query.
    param: f64,
}

/// Boundary latitudes with cached node vectors, interpolated by a Catmull-Rom spline.
struct BoundaryCurve<'a> {
    band: &'a AcceptableBand,
    lat: &'a [f64],
    cl: Vec<f64>,
    sl: Vec<f64>,
    cp: Vec<f64>,
    sp: Vec<f64>,
}

impl<'a> BoundaryCurve<'a> {
    fn new(band: &'a AcceptableBand, lat: &'a [f64]) -> Self {
        let k = lat.len();
        let (mut cl, mut sl, mut cp, mut sp) = (vec![0.0; k], vec![0.0; k], vec![0.0; k], vec![0.0; k]);
        for j in 0..k {
            let l = band.longitude(j);
            cl[j] = l.cos();
            sl[j] = l.sin();
            cp[j] = lat[j].cos();
            sp[j] = lat[j].sin();
        }
        BoundaryCurve { band, lat, cl, sl, cp, sp }
    }

    /// Catmull-Rom latitude at fractional node `u` (any real, wrapped) and its
    /// first two derivatives in `u`.
    fn spline(&self, u: f64) -> (f64, f64, f64) {
        let n = self.lat.len() as i64;
        let j = u.floor();
        let x = u - j;
        let j = j as i64;
        let at = |o: i64| self.lat[(j + o).rem_euclid(n) as usize];
        let (p0, p1, p2, p3) = (at(-1), at(0), at(1), at(2));
        let a = -0.5 * p0 + 1.5 * p1 - 1.5 * p2 + 0.5 * p3;
        let b = p0 - 2.5 * p1 + 2.0 * p2 - 0.5 * p3;
        let c = 0.5 * (p2 - p0);
        (((a * x + b) * x + c) * x + p1, (3.0 * a * x + 2.0 * b) * x + c, 6.0 * a * x + 2.0 * b)
    }

    /// Distance from the cover point `(λ_k, φ)` of meridian `k`.
    fn distance(&self, k: usize, phi: f64) -> Foot {
        let n = self.lat.len();
        let h = self.band.spacing();
        let lambda = self.band.longitude(k);
        let p = Vec3::new(phi.cos() * lambda.cos(), phi.cos() * lambda.sin(), phi.sin());
        let half = ((PI / h).floor() as i64).min(n as i64 / 2).max(1);
        let mut best = (f64::NEG_INFINITY, 0i64);
        for o in -half..=half {
            let j = (k as i64 + o).rem_euclid(n as i64) as usize;
            let d = self.cp[j] * (self.cl[j] * p.x + self.sl[j] * p.y) + self.sp[j] * p.z;
            if d > best.0 {
                best = (d, o);
            }
        }
        // Maximize ⟨p, X(u)⟩ over the spline boundary near the best node, with
        // `X(u)` at longitude offset `u h` from `λ_k`.
        let (sp, cp) = phi.sin_cos();
        let g = |u: f64| {
            let (f, f1, f2) = self.spline(k as f64 + u);
            let (sf, cf) = f.sin_cos();
            let (sl, cl) = (u * h).sin_cos();
            // value, first and second derivatives of cp cf cl + sp sf
            let v = cp * cf * cl + sp * sf;
            let d1 = cp * (-sf * f1 * cl - cf * sl * h) + sp * cf * f1;
            let d2 = cp * (-cf * f1 * f1 * cl - sf * f2 * cl + 2.0 * sf * f1 * sl * h - cf * cl * h * h)
                + sp * (-sf * f1 * f1 + cf * f2);
            (v, d1, d2)
        };
        let o = best.1 as f64;
        let (lo, hi) = (o - 1.0, o + 1.0);
        let mut u = o;
        let mut val = g(u).0;
        for _ in 0..20 {
            let (_, d1, d2) = g(u);
            let step = if d2 < 0.0 { -d1 / d2 } else { d1.signum() * 0.25 };
            let next = (u + step.clamp(-0.5, 0.5)).clamp(lo, hi);
            let nv = g(next).0;
            if nv < val && step.abs() > 1e-14 {
                break;
            }
            let moved = (next - u).abs();
            u = next;
            val = nv;
            if moved < 1e-13 {
                break;
            }
        }
        let val = val.max(best.0);
        Foot { dist: val.clamp(-1.0, 1.0).acos(), param: k as f64 + u }
    }
}

/// Root of a continuous `f` on `[lo, hi]` with `f(lo)`, `f(hi)` of opposite sign.
fn bracket_root(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, mut flo: f64, mut fhi: f64) -> f64 {
    let mut side = 0i8;
    for _ in 0..80 {
        if (hi - lo).abs() < 1e-12 {
            break;
        }
        let x = if (fhi - flo).abs() > 0.0 { hi - fhi * (hi - lo) / (fhi - flo) } else { 0.5 * (lo + hi) };
        let x = if x > lo.min(hi) && x < lo.max(hi) { x } else { 0.5 * (lo + hi) };
        let fx = f(x);
        if fx == 0.0 {
            return x;
        }
        if (fx > 0.0) == (fhi > 0.0) {
            hi = x;
            fhi = fx;
            if side == 1 {
                flo *= 0.5;
            }
            side = 1;
        } else {
            lo = x;
            flo = fx;
            if side == -1 {
                fhi *= 0.5;
            }
            side = -1;
        }
    }
    0.5 * (lo + hi)
}

impl AcceptableBand {
    /// Band with constant boundaries `θ₊ ≡ plus`, `θ₋ ≡ minus` in the frame `N = e₃`.
    pub fn constant(nu: u32, width: f64, k: usize, plus: f64, minus: f64) -> Result<Self> {
        Self::new(nu, width, 0.0, vec![plus; k], vec![minus; k], Rotation3::identity(), false)
    }

    pub fn new(
        nu: u32,
        width: f64,
        lambda0: f64,
        theta_plus: Vec<f64>,
        theta_minus: Vec<f64>,
        frame: Rotation3,
        mirrored: bool,
    ) -> Result<Self> {
        if nu == 0 {
            return Err(Error::InvalidInput("band rotation number must be positive".into()));
        }
        if !(width > 0.0 && width < PI / 2.0) {
            return Err(Error::InvalidInput(format!("band width {width} outside (0, π/2)")));
        }
        if theta_plus.len() != theta_minus.len() || theta_plus.len() < 8 {
            return Err(Error::InvalidInput("band needs at least 8 matching meridian samples".into()));
        }
        if theta_plus.iter().zip(&theta_minus).any(|(p, m)| !(p >= m) || p.abs() > PI / 2.0 || m.abs() > PI / 2.0) {
            return Err(Error::InvalidInput("band boundaries are not ordered latitudes".into()));
        }
        Ok(Self { nu, width, lambda0, theta_plus, theta_minus, frame, mirrored })
    }

    pub fn k(&self) -> usize {
        self.theta_plus.len()
    }

    pub fn spacing(&self) -> f64 {
        2.0 * PI * self.nu as f64 / self.k() as f64
    }

    pub fn longitude(&self, k: usize) -> f64 {
        self.lambda0 + self.spacing() * k as f64
    }

    /// World point over the cover point `(λ, φ)`.
    pub fn to_sphere(&self, lambda: f64, phi: f64) -> Vec3 {
        let l = if self.mirrored { -lambda } else { lambda };
        self.frame * Vec3::new(phi.cos() * l.cos(), phi.cos() * l.sin(), phi.sin())
    }

    /// Cover distance between `(λ₁, φ₁)` and `(λ₂, φ₂)`.
    pub fn cover_distance(l1: f64, p1: f64, l2: f64, p2: f64) -> f64 {
        let dl = (l2 - l1).clamp(-PI, PI);
        let a = Vec3::new(p1.cos(), 0.0, p1.sin());
        let b = Vec3::new(p2.cos() * dl.cos(), p2.cos() * dl.sin(), p2.sin());
        a.cross(&b).norm().atan2(a.dot(&b))
    }

    /// `d(p, ∂₋)` for `p ∈ ∂₊` and `d(q, ∂₊)` for `q ∈ ∂₋`, per meridian.
    pub fn boundary_distances(&self) -> (Vec<f64>, Vec<f64>) {
        let lower = BoundaryCurve::new(self, &self.theta_minus);
        let upper = BoundaryCurve::new(self, &self.theta_plus);
        let dp = (0..self.k()).into_par_iter().map(|k| lower.distance(k, self.theta_plus[k]).dist).collect();
        let dm = (0..self.k()).into_par_iter().map(|k| upper.distance(k, self.theta_minus[k]).dist).collect();
        (dp, dm)
    }

    /// `max |d − R|` over both boundaries.
    pub fn goodness_defect(&self) -> f64 {
        let (dp, dm) = self.boundary_distances();
        dp.iter().chain(&dm).map(|d| (d - self.width).abs()).fold(0.0, f64::max)
    }

    /// Smallest distance between the two boundaries.
    pub fn measured_width(&self) -> f64 {
        let (dp, dm) = self.boundary_distances();
        dp.iter().chain(&dm).copied().fold(f64::INFINITY, f64::min)
    }

    /// Boundaries lie in `[0, R]` and `[−R, 0]` and stay at least `R − τ` apart.
    pub fn is_acceptable(&self, tol: &ToleranceProfile) -> bool {
        let r = self.width + tol.tau_band;
        self.theta_plus.iter().all(|p| *p >= -tol.tau_band && *p <= r)
            && self.theta_minus.iter().all(|m| *m <= tol.tau_band && *m >= -r)
            && self.measured_width() >= self.width - tol.tau_band
    }
}

impl GoodBand {
    pub fn from_band(band: AcceptableBand, tol: &ToleranceProfile) -> Result<Self> {
        let defect = band.goodness_defect();
        if defect > tol.tau_band {
            return Err(Error::StageToleranceFailure {
                stage: "good band".into(),
                detail: format!("boundary distance defect {defect:.3e} exceeds {:.3e}", tol.tau_band),
            });
        }
        Ok(Self { band, defect })
    }
}

/// `r_s`: moves both boundaries towards `±R` by the fraction `s`.
pub fn contract_band(band: &AcceptableBand, s: f64) -> AcceptableBand {
    let s = s.clamp(0.0, 1.0);
    let r = band.width;
    AcceptableBand {
        theta_plus: band.theta_plus.iter().map(|p| (1.0 - s) * p + s * r).collect(),
        theta_minus: band.theta_minus.iter().map(|m| (1.0 - s) * m - s * r).collect(),
        ..band.clone()
    }
}

/// Outcome of [`retract_to_good`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetractReport {
    pub good: GoodBand,
    pub iterations: usize,
    /// Largest boundary move of each iteration.
    pub changes: Vec<f64>,
    /// Whether `θ₊` never increased and `θ₋` never decreased.
    pub monotone: bool,
}

/// One trim: lowers `θ₊` (or raises `θ₋`) so that every point of the moving
/// boundary is within `c` of the opposite one.
fn trim(band: &AcceptableBand, plus_side: bool, c: f64) -> Vec<f64> {
    let (moving, fixed) =
        if plus_side { (&band.theta_plus, &band.theta_minus) } else { (&band.theta_minus, &band.theta_plus) };
    let other = BoundaryCurve::new(band, fixed);
    (0..band.k())
        .into_par_iter()
        .map(|k| {
            let f = |phi: f64| other.distance(k, phi).dist - c;
            let start = moving[k];
            let fs = f(start);
            if fs <= 0.0 {
                return start;
            }
            let end = fixed[k];
            let fe = f(end);
            if fe >= 0.0 {
                return end;
            }
            bracket_root(f, end, start, fe, fs)
        })
        .collect()
}

/// The alternating retraction `r(A) = lim Aⁿ` onto a good band.
///
/// Odd steps trim `∂₊` against `∂₋`, even steps trim `∂₋` against `∂₊`, both
/// with threshold `R + 2⁻ⁿ`. Stops once `2⁻ⁿ < τ/4` and the last move is below `τ/4`.
pub fn retract_to_good(band: &AcceptableBand, tol: &ToleranceProfile) -> Result<RetractReport> {
    let mut cur = band.clone();
    let mut changes = Vec::new();
    let mut monotone = true;
    let quarter = tol.tau_band / 4.0;
    for n in 1..=tol.retract_max_iter {
        let c = cur.width + 0.5f64.powi(n as i32);
        let plus_side = n % 2 == 1;
        let next = trim(&cur, plus_side, c);
        let prev = if plus_side { &cur.theta_plus } else { &cur.theta_minus };
        let mut change = 0.0f64;
        for (a, b) in prev.iter().zip(&next) {
            change = change.max((a - b).abs());
            if (plus_side && *b > *a + 1e-12) || (!plus_side && *b < *a - 1e-12) {
                monotone = false;
            }
        }
        if plus_side {
            cur.theta_plus = next;
        } else {
            cur.theta_minus = next;
        }
        changes.push(change);
        let settled = changes.len() >= 2 && changes[changes.len() - 2..].iter().all(|d| *d < quarter);
        if 0.5f64.powi(n as i32) < quarter && settled {
            let good = GoodBand::from_band(cur, tol)?;
            return Ok(RetractReport { good, iterations: n, changes, monotone });
        }
    }
    Err(Error::NonConvergence(tol.retract_max_iter))
}

/// The curve at distance `R/2` from both boundaries of a good band.
#[derive(Debug, Clone)]
pub struct CentralCurve {
    pub curve: AdmissibleCurve,
    pub rho_min: f64,
    pub rho_max: f64,
    /// `min(ρ_min − R/2, π − R/2 − ρ_max)`.
    pub margin: f64,
    /// Smallest step between consecutive track feet on `∂₋`, in nodes.
    pub track_clearance: f64,
    /// Largest turn of the track direction per unit of central arc length.
    pub lipschitz: f64,
}

/// Central curve of a good band, traced meridian by meridian; `bounds` are
/// attached to the result. Fails with `TrackCrossing` when the feet of the
/// tracks from `∂₊` to `∂₋` run backwards.
pub fn central_curve(good: &GoodBand, bounds: CurvatureBounds) -> Result<CentralCurve> {
    let band = &good.band;
    let half = 0.5 * band.width;
    let upper = BoundaryCurve::new(band, &band.theta_plus);
    let lower = BoundaryCurve::new(band, &band.theta_minus);
    let k = band.k();
    let phis: Vec<f64> = (0..k)
        .into_par_iter()
        .map(|j| {
            let f = |phi: f64| upper.distance(j, phi).dist - half;
            let (hi, lo) = (band.theta_plus[j], band.theta_minus[j]);
            let (fh, fl) = (f(hi), f(lo));
            if fh >= 0.0 || fl <= 0.0 {
                return 0.5 * (hi + lo);
            }
            bracket_root(f, lo, hi, fl, fh)
        })
        .collect();

    let feet: Vec<f64> = (0..k).into_par_iter().map(|j| lower.distance(j, band.theta_plus[j]).param).collect();
    let mut clearance = f64::INFINITY;
    for j in 0..k {
        let next = feet[(j + 1) % k] + if j + 1 == k { k as f64 } else { 0.0 };
        clearance = clearance.min(next - feet[j]);
    }
    if clearance < -0.5 {
        return Err(Error::TrackCrossing { clearance });
    }

    let points: Vec<Vec3> = (0..k).map(|j| band.to_sphere(band.longitude(j), phis[j])).collect();
    let tops: Vec<Vec3> = (0..k).map(|j| band.to_sphere(band.longitude(j), band.theta_plus[j])).collect();
    let mut lipschitz = 0.0f64;
    for j in 0..k {
        let j2 = (j + 1) % k;
        let d1 = (points[j] - tops[j]).normalize();
        let d2 = (points[j2] - tops[j2]).normalize();
        let step = (points[j2] - points[j]).norm();
        if step > 1e-14 {
            lipschitz = lipschitz.max((d1 - d2).norm() / step);
        }
    }

    let curve = curve_from_points(&points, bounds)?;
    let (rho_min, rho_max) = curve.rho_range();
    let margin = (rho_min - half).min(PI - half - rho_max);
    Ok(CentralCurve { curve, rho_min, rho_max, margin, track_clearance: clearance, lipschitz })
}

/// Lifted boundary `B(t, θ)` in cover coordinates `(λ, φ)`, with `λ` unwrapped.
fn lift_to_cover(curve: &AdmissibleCurve, theta: f64, frame: &Rotation3, turn: f64) -> Vec<(f64, f64)> {
    let r = curve.refine(turn);
    let inv = frame.transpose();
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(r.frames().len());
    for f in r.frames() {
        let p = inv * fiber_point(f, theta);
        let lat = p.z.clamp(-1.0, 1.0).asin();
        let mut lon = p.y.atan2(p.x);
        if let Some(&(prev, _)) = out.last() {
            lon = prev + (lon - prev + PI).rem_euclid(2.0 * PI) - PI;
        }
        out.push((lon, lat));
    }
    out
}

/// Latitude of the lifted boundary on each meridian; the largest crossing
/// when `upper`, the smallest otherwise.
fn meridian_profile(path: &[(f64, f64)], k: usize, span: f64, sign: f64, upper: bool) -> Result<Vec<f64>> {
    let h = span / k as f64;
    let mut out = vec![f64::NAN; k];
    // One wrapped segment on each side so that meridians at the seam are hit.
    let n = path.len();
    let total = path[n - 1].0 - path[0].0;
    let mut padded = Vec::with_capacity(n + 2);
    padded.push((path[n - 2].0 - total, path[n - 2].1));
    padded.extend_from_slice(path);
    padded.push((path[1].0 + total, path[1].1));
    for w in padded.windows(2) {
        let (a, b) = ((sign * w[0].0, w[0].1), (sign * w[1].0, w[1].1));
        let (lo, hi) = if a.0 <= b.0 { (a, b) } else { (b, a) };
        let first = (lo.0 / h).ceil() as i64;
        let last = (hi.0 / h).floor() as i64;
        for m in first..=last {
            let l = m as f64 * h;
            let u = if hi.0 > lo.0 { (l - lo.0) / (hi.0 - lo.0) } else { 0.0 };
            let phi = lo.1 + u * (hi.1 - lo.1);
            let idx = m.rem_euclid(k as i64) as usize;
            let slot = &mut out[idx];
            if slot.is_nan() || (upper && phi > *slot) || (!upper && phi < *slot) {
                *slot = phi;
            }
        }
    }
    if let Some(index) = out.iter().position(|x| x.is_nan()) {
        return Err(Error::MeridianMiss { index });
    }
    Ok(out)
}

/// Frame with third column `n`.
fn frame_with_pole(n: &Vec3) -> Rotation3 {
    let seed = if n.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
    let e1 = (seed - n * n.dot(&seed)).normalize();
    let e2 = n.cross(&e1);
    Rotation3::from_columns(&e1, &e2, n)
}

/// Band between `B(t, θ_hi)` (`∂₊`) and `B(t, θ_lo)` (`∂₋`) of a reduced curve,
/// on the cover of the hemisphere about `pole`.
pub fn band_between(
    curve: &AdmissibleCurve,
    theta_hi: f64,
    theta_lo: f64,
    width: f64,
    pole: &UnitVector3,
    nu: u32,
    tol: &ToleranceProfile,
) -> Result<AcceptableBand> {
    let k = tol.band_k.max(8);
    let frame = frame_with_pole(pole);
    let span = 2.0 * PI * nu as f64;
    let turn = (span / k as f64 / 16.0).min(tol.max_turn);
    let top = lift_to_cover(curve, theta_hi, &frame, turn);
    let bottom = lift_to_cover(curve, theta_lo, &frame, turn);
    let total = top[top.len() - 1].0 - top[0].0;
    if (total.abs() - span).abs() > 0.5 * PI {
        return Err(Error::StageToleranceFailure {
            stage: "band lift".into(),
            detail: format!("boundary winds {:.3} times about the pole, expected {nu}", total / (2.0 * PI)),
        });
    }
    let mirrored = total < 0.0;
    let sign = if mirrored { -1.0 } else { 1.0 };
    let theta_plus = meridian_profile(&top, k, span, sign, true)?;
    let theta_minus = meridian_profile(&bottom, k, span, sign, false)?;
    AcceptableBand::new(nu, width, 0.0, theta_plus, theta_minus, frame, mirrored)
}

fn check_condensed(curve: &AdmissibleCurve, tol: &ToleranceProfile) -> Result<(AdmissibleCurve, f64, UnitVector3, u32)> {
    let (c, kappa0) = reduce_to_k0(curve)?;
    let cloud = caustic_cloud(&c, tol);
    // The max-margin pole is centered for symmetric curves, unlike the lattice barycenter.
    let sol = hemisphere_margin(&cloud.points);
    if sol.margin < -tol.eps {
        return Err(Error::NotCondensed);
    }
    let pole = sol.h;
    let nu = rotation_number_condensed(curve, tol)?;
    if nu <= 0 {
        return Err(Error::NonpositiveRotation(nu));
    }
    Ok((c, kappa0, pole, nu as u32))
}

/// The regular band of a condensed curve, between `γ` and `γ̂`, of width `π − ρ₀`.
pub fn band_from_condensed(curve: &AdmissibleCurve, tol: &ToleranceProfile) -> Result<AcceptableBand> {
    let (c, _, pole, nu) = check_condensed(curve, tol)?;
    let rho0 = c.bounds().rho1;
    band_between(&c, 0.0, rho0 - PI, PI - rho0, &pole, nu, tol)
}

/// Homotopy from a condensed curve with `κ₀ < 0` to a circle traversed `ν` times.
///
/// With `ρ₁ = (π − ρ₀)/2`, the translate `η = γ_{−ρ₁}` has radii in `(ρ₁, π − ρ₁)`.
/// Its band over `[−ρ̄₁, ρ̄₁]` is contracted with `r_s` and retracted onto good
/// bands, then the constant band is moved onto the equator. The central
/// curves, translated back by `ρ₁`, form the path.
pub fn collapse_condensed(curve: &AdmissibleCurve, steps: usize, tol: &ToleranceProfile) -> Result<HomotopyPath> {
    let defect = curve.closure_defect();
    if defect > tol.closure {
        return Err(Error::NotClosed { defect });
    }
    let original = curve.bounds();
    let (c, kappa0, pole, nu) = check_condensed(curve, tol)?;
    if kappa0 >= 0.0 {
        return Err(Error::DomainError(format!("band collapse needs κ₀ < 0, got {kappa0}")));
    }
    let rho0 = c.bounds().rho1;
    let rho1 = 0.5 * (PI - rho0);
    let (rmin, rmax) = c.rho_range();
    // Radii of η are ρ + ρ₁, inside (ρ₁, π − ρ₁).
    let gap = (rmin).min(rho0 - rmax).max(0.0);
    let rho1_bar = (rho1 + 0.5 * gap).min(rho1 + 0.5 * (PI / 4.0 - rho1));
    let width = 2.0 * rho1_bar;
    let b0 = band_between(&c, rho1_bar - rho1, -rho1_bar - rho1, width, &pole, nu, tol)?;

    let steps = steps.max(4);
    let n1 = steps.div_ceil(2);
    let n2 = steps - n1;
    let mut bands: Vec<AcceptableBand> = Vec::with_capacity(steps);
    let contracted: Vec<Result<GoodBand>> = (0..n1)
        .map(|j| {
            let s = j as f64 / (n1 - 1) as f64;
            retract_to_good(&contract_band(&b0, s), tol).map(|r| r.good)
        })
        .collect();
    for g in contracted {
        bands.push(g?.band);
    }
    let last = bands[bands.len() - 1].clone();
    let plus = last.theta_plus.iter().sum::<f64>() / last.k() as f64;
    let minus = last.theta_minus.iter().sum::<f64>() / last.k() as f64;
    for j in 1..=n2 {
        let u = j as f64 / n2 as f64;
        let p = (1.0 - u) * plus + u * 0.5 * width;
        let m = (1.0 - u) * minus - u * 0.5 * width;
        bands.push(AcceptableBand { theta_plus: vec![p; last.k()], theta_minus: vec![m; last.k()], ..last.clone() });
    }

    let eta_bounds = CurvatureBounds::from_rhos(PI - rho1, rho1)?;
    let reduced_bounds = c.bounds();
    let rho2 = original.rho2;
    let tail: Vec<AdmissibleCurve> = bands
        .into_par_iter()
        .map(|b| {
            let good = GoodBand::from_band(b, tol)?;
            let central = central_curve(&good, eta_bounds)?;
            if central.margin < -tol.tau_band {
                return Err(Error::StageToleranceFailure {
                    stage: "central curve".into(),
                    detail: format!("radius range [{}, {}] leaves the band limits", central.rho_min, central.rho_max),
                });
            }
            let g = translate_curve(&central.curve, rho1)?.with_bounds(reduced_bounds)?;
            let g = if rho2 > 0.0 { translate_curve(&g, -rho2)?.with_bounds(original)? } else { g };
            Ok(g.normalized())
        })
        .collect::<Result<Vec<_>>>()?;
    let mut curves = vec![curve.normalized()];
    curves.extend(tail);
    let s_values = (0..curves.len()).map(|i| i as f64 / (curves.len() - 1) as f64).collect();
    Ok(HomotopyPath { bounds: original, s_values, curves, provenance: Provenance::Bands })
}
