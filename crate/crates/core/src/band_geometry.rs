//! Translations `γ_θ = cos θ γ + sin θ n`, the regular and caustic bands, and the caustic.

use std::f64::consts::PI;

use crate::curve_model::{AdmissibleCurve, CurvatureBounds};
use crate::error::{Error, Result};
use crate::sphere_core::{quat_exp, Rotation3, UnitQuaternion, Vec3};
use crate::tolerance::ToleranceProfile;

/// Lifted form of `R_θ`, the rotation by `−θ` about `e₂`.
pub fn translation_quaternion(theta: f64) -> UnitQuaternion {
    quat_exp(&Vec3::new(0.0, -0.5 * theta, 0.0))
}

/// `R_θ`, with `Φ_{γθ} = Φ_γ R_θ`.
pub fn translation_rotation(theta: f64) -> Rotation3 {
    Rotation3::axis_angle(&Vec3::y(), -theta)
}

/// Interval of translation angles keeping every sampled radius inside `(0, π)`,
/// padded by 1e-9.
pub fn admissible_theta_range(curve: &AdmissibleCurve) -> (f64, f64) {
    let (rmin, rmax) = curve.rho_range();
    (rmax - PI + 1e-9, rmin - 1e-9)
}

/// The translated curve `γ_θ`; its radius of curvature is `ρ − θ`.
pub fn translate_curve(curve: &AdmissibleCurve, theta: f64) -> Result<AdmissibleCurve> {
    let (lo, hi) = admissible_theta_range(curve);
    if !(theta >= lo && theta <= hi) {
        return Err(Error::ThetaOutOfRange { theta, lo, hi });
    }
    if theta == 0.0 {
        return Ok(curve.clone());
    }
    let b = curve.bounds();
    let bounds = CurvatureBounds::from_rhos((b.rho1 - theta).min(PI), (b.rho2 - theta).max(0.0))?;
    let (c, s) = (theta.cos(), theta.sin());
    let n = curve.n();
    let mut v = Vec::with_capacity(n);
    let mut w = Vec::with_capacity(n);
    for i in 0..n {
        let (vi, wi) = (curve.speeds()[i], curve.w_values()[i]);
        v.push(c * vi - s * wi);
        w.push(c * wi + s * vi);
    }
    let q = translation_quaternion(theta);
    let lifts = curve.lifts().iter().map(|z| *z * q).collect();
    Ok(AdmissibleCurve::assemble(bounds, curve.knots().to_vec(), v, w, lifts))
}

/// Point `cos θ γ + sin θ n` of the fiber through the frame `f`.
pub fn fiber_point(f: &Rotation3, theta: f64) -> Vec3 {
    f.column(0) * theta.cos() + f.column(2) * theta.sin()
}

/// Samples of a band `B(t_i, θ_j)` on the curve's nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct BandGrid {
    pub curve_id: u64,
    pub theta_lo: f64,
    pub theta_hi: f64,
    pub m: usize,
    pub t_values: Vec<f64>,
    /// Row-major: `points[i * m + j] = B(t_i, θ_j)`.
    pub points: Vec<Vec3>,
    /// For caustic bands, the caustic point `χ(t_i)` of each node.
    pub caustic: Vec<Vec3>,
}

impl BandGrid {
    pub fn theta(&self, j: usize) -> f64 {
        self.theta_lo + (self.theta_hi - self.theta_lo) * j as f64 / (self.m - 1) as f64
    }

    pub fn at(&self, i: usize, j: usize) -> Vec3 {
        self.points[i * self.m + j]
    }

    pub fn rows(&self) -> usize {
        self.t_values.len()
    }

    /// Every sampled point, caustic points included.
    pub fn cloud(&self) -> Vec<Vec3> {
        let mut c = self.points.clone();
        c.extend_from_slice(&self.caustic);
        c
    }

    pub fn spacing(&self) -> f64 {
        (self.theta_hi - self.theta_lo) / (self.m - 1) as f64
    }
}

/// A stable fingerprint of a curve's discrete data.
pub fn curve_id(curve: &AdmissibleCurve) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut eat = |x: f64| {
        for b in x.to_bits().to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    };
    for k in curve.knots() {
        eat(*k);
    }
    for i in 0..curve.n() {
        eat(curve.speeds()[i]);
        eat(curve.w_values()[i]);
    }
    let z = curve.lifts()[0];
    for x in [z.w, z.x, z.y, z.z] {
        eat(x);
    }
    h
}

fn band(curve: &AdmissibleCurve, lo: f64, hi: f64, m: usize, with_caustic: bool) -> BandGrid {
    let m = m.max(2);
    let rows = curve.n() + 1;
    let mut points = Vec::with_capacity(rows * m);
    let mut caustic = Vec::new();
    for i in 0..rows {
        let f = curve.frames()[i];
        for j in 0..m {
            let theta = lo + (hi - lo) * j as f64 / (m - 1) as f64;
            points.push(fiber_point(&f, theta));
        }
        if with_caustic {
            let rho = curve.rho(i.min(curve.n() - 1));
            if rho >= lo && rho <= hi {
                caustic.push(fiber_point(&f, rho));
            }
            if i > 0 {
                // The caustic is constant on a segment; the end node carries the
                // value of the segment that precedes it as well.
                let rho_prev = curve.rho(i - 1);
                if rho_prev >= lo && rho_prev <= hi {
                    caustic.push(fiber_point(&f, rho_prev));
                }
            }
        }
    }
    BandGrid {
        curve_id: curve_id(curve),
        theta_lo: lo,
        theta_hi: hi,
        m,
        t_values: curve.knots().to_vec(),
        points,
        caustic,
    }
}

/// Regular band over `θ ∈ [ρ₁ − π, ρ₂]` (equal to `[ρ₀ − π, 0]` for `(κ₀, +∞)`).
pub fn regular_band(curve: &AdmissibleCurve, tol: &ToleranceProfile) -> BandGrid {
    let b = curve.bounds();
    band(curve, b.rho1 - PI, b.rho2, tol.band_m, false)
}

/// Caustic band over `θ ∈ [ρ₂, ρ₁]` (equal to `[0, ρ₀]` for `(κ₀, +∞)`).
pub fn caustic_band(curve: &AdmissibleCurve, tol: &ToleranceProfile) -> BandGrid {
    let b = curve.bounds();
    band(curve, b.rho2, b.rho1, tol.band_m, true)
}

/// Caustic band of a curve refined so that adjacent rows turn by at most `max_turn`.
pub fn caustic_band_refined(curve: &AdmissibleCurve, tol: &ToleranceProfile) -> BandGrid {
    caustic_band(&curve.refine(tol.max_turn), tol)
}

/// Centers of curvature `χ = cos ρ γ + sin ρ n`, one per segment.
#[derive(Debug, Clone, PartialEq)]
pub struct CausticCurve {
    pub points: Vec<Vec3>,
}

pub fn caustic_curve(curve: &AdmissibleCurve) -> CausticCurve {
    let points = (0..curve.n()).map(|i| fiber_point(&curve.frames()[i], curve.rho(i))).collect();
    CausticCurve { points }
}
