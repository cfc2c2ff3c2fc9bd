//! Points of S², rotations, unit quaternions and the double cover S³ → SO(3),
//! stereographic charts, and hemisphere / convex-hull predicates.

use std::collections::HashMap;
use std::ops::{Deref, Mul, Neg};
use std::sync::atomic::{AtomicUsize, Ordering};

use nalgebra::{Matrix3, Matrix4, Vector2, Vector3, Vector4};
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp;
use crate::tolerance::ToleranceProfile;

pub type Vec3 = Vector3<f64>;
pub type Vec2 = Vector2<f64>;

static RENORMALIZATIONS: AtomicUsize = AtomicUsize::new(0);

/// Number of times a unit quaternion with drift above 1e-9 was renormalized.
pub fn renormalization_count() -> usize {
    RENORMALIZATIONS.load(Ordering::Relaxed)
}

/// A point of the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct UnitVector3(Vec3);

impl UnitVector3 {
    /// Normalizes `v`; panics on the zero vector.
    pub fn new(v: Vec3) -> Self {
        let n = v.norm();
        assert!(n > 0.0 && n.is_finite(), "cannot normalize {v:?}");
        Self(v / n)
    }

    pub fn try_new(v: Vec3) -> Option<Self> {
        let n = v.norm();
        (n > 1e-300 && n.is_finite()).then(|| Self(v / n))
    }

    pub fn from_xyz(x: f64, y: f64, z: f64) -> Self {
        Self::new(Vec3::new(x, y, z))
    }

    pub fn e1() -> Self {
        Self(Vec3::x())
    }
    pub fn e2() -> Self {
        Self(Vec3::y())
    }
    pub fn e3() -> Self {
        Self(Vec3::z())
    }

    pub fn into_inner(self) -> Vec3 {
        self.0
    }

    /// Great-circle distance.
    pub fn angle_to(&self, other: &UnitVector3) -> f64 {
        angle_between(&self.0, &other.0)
    }
}

impl Deref for UnitVector3 {
    type Target = Vec3;
    fn deref(&self) -> &Vec3 {
        &self.0
    }
}

impl Neg for UnitVector3 {
    type Output = UnitVector3;
    fn neg(self) -> UnitVector3 {
        UnitVector3(-self.0)
    }
}

/// Angle between two nonzero vectors, accurate for nearly parallel inputs.
pub fn angle_between(a: &Vec3, b: &Vec3) -> f64 {
    a.cross(b).norm().atan2(a.dot(b))
}

/// An element of SO(3).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Rotation3(Matrix3<f64>);

impl Rotation3 {
    pub fn identity() -> Self {
        Self(Matrix3::identity())
    }

    /// Wraps a matrix without checks; see [`Rotation3::is_valid`].
    pub fn from_matrix_unchecked(m: Matrix3<f64>) -> Self {
        Self(m)
    }

    pub fn from_columns(a: &Vec3, b: &Vec3, c: &Vec3) -> Self {
        Self(Matrix3::from_columns(&[*a, *b, *c]))
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn is_valid(&self, tol: f64) -> bool {
        let g = self.0.transpose() * self.0 - Matrix3::identity();
        g.abs().max() <= tol && (self.0.determinant() - 1.0).abs() <= tol
    }

    /// Rotation by `angle` about `axis` (Rodrigues).
    pub fn axis_angle(axis: &Vec3, angle: f64) -> Self {
        let a = axis.normalize();
        let k = a.cross_matrix();
        Self(Matrix3::identity() + k * angle.sin() + k * k * (1.0 - angle.cos()))
    }

    /// The quaternion lift with nonnegative real part (Shepperd's method).
    pub fn to_quaternion(&self) -> UnitQuaternion {
        let m = &self.0;
        let tr = m.trace();
        let (w, x, y, z);
        if tr > m[(0, 0)] && tr > m[(1, 1)] && tr > m[(2, 2)] {
            let s = (1.0 + tr).sqrt() * 2.0;
            w = 0.25 * s;
            x = (m[(2, 1)] - m[(1, 2)]) / s;
            y = (m[(0, 2)] - m[(2, 0)]) / s;
            z = (m[(1, 0)] - m[(0, 1)]) / s;
        } else if m[(0, 0)] > m[(1, 1)] && m[(0, 0)] > m[(2, 2)] {
            let s = (1.0 + m[(0, 0)] - m[(1, 1)] - m[(2, 2)]).sqrt() * 2.0;
            w = (m[(2, 1)] - m[(1, 2)]) / s;
            x = 0.25 * s;
            y = (m[(0, 1)] + m[(1, 0)]) / s;
            z = (m[(0, 2)] + m[(2, 0)]) / s;
        } else if m[(1, 1)] > m[(2, 2)] {
            let s = (1.0 + m[(1, 1)] - m[(0, 0)] - m[(2, 2)]).sqrt() * 2.0;
            w = (m[(0, 2)] - m[(2, 0)]) / s;
            x = (m[(0, 1)] + m[(1, 0)]) / s;
            y = 0.25 * s;
            z = (m[(1, 2)] + m[(2, 1)]) / s;
        } else {
            let s = (1.0 + m[(2, 2)] - m[(0, 0)] - m[(1, 1)]).sqrt() * 2.0;
            w = (m[(1, 0)] - m[(0, 1)]) / s;
            x = (m[(0, 2)] + m[(2, 0)]) / s;
            y = (m[(1, 2)] + m[(2, 1)]) / s;
            z = 0.25 * s;
        }
        let q = UnitQuaternion::new_normalize(w, x, y, z);
        if q.w < 0.0 {
            -q
        } else {
            q
        }
    }
}

impl Deref for Rotation3 {
    type Target = Matrix3<f64>;
    fn deref(&self) -> &Matrix3<f64> {
        &self.0
    }
}

impl Mul for Rotation3 {
    type Output = Rotation3;
    fn mul(self, rhs: Rotation3) -> Rotation3 {
        Rotation3(self.0 * rhs.0)
    }
}

impl Mul<Vec3> for Rotation3 {
    type Output = Vec3;
    fn mul(self, rhs: Vec3) -> Vec3 {
        self.0 * rhs
    }
}

/// A unit quaternion `w + x i + y j + z k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitQuaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl UnitQuaternion {
    pub const IDENTITY: UnitQuaternion = UnitQuaternion { w: 1.0, x: 0.0, y: 0.0, z: 0.0 };

    pub fn new_normalize(w: f64, x: f64, y: f64, z: f64) -> Self {
        let n = (w * w + x * x + y * y + z * z).sqrt();
        Self { w: w / n, x: x / n, y: y / n, z: z / n }
    }

    pub fn norm(&self) -> f64 {
        (self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn conj(&self) -> Self {
        Self { w: self.w, x: -self.x, y: -self.y, z: -self.z }
    }

    pub fn imag(&self) -> Vec3 {
        Vec3::new(self.x, self.y, self.z)
    }

    pub fn as_vector4(&self) -> Vector4<f64> {
        Vector4::new(self.w, self.x, self.y, self.z)
    }

    pub fn dot(&self, o: &UnitQuaternion) -> f64 {
        self.w * o.w + self.x * o.x + self.y * o.y + self.z * o.z
    }

    /// Distance in R⁴.
    pub fn distance(&self, o: &UnitQuaternion) -> f64 {
        (self.as_vector4() - o.as_vector4()).norm()
    }

    /// Renormalizes when the drift exceeds 1e-9, counting the event.
    pub fn renormalized(self) -> Self {
        let n = self.norm();
        if (n - 1.0).abs() > 1e-9 {
            RENORMALIZATIONS.fetch_add(1, Ordering::Relaxed);
        }
        Self { w: self.w / n, x: self.x / n, y: self.y / n, z: self.z / n }
    }

    /// Rotates a vector: `v ↦ z v z̄`.
    pub fn rotate(&self, v: &Vec3) -> Vec3 {
        quat_to_rotation(*self) * *v
    }
}

impl Mul for UnitQuaternion {
    type Output = UnitQuaternion;
    fn mul(self, b: UnitQuaternion) -> UnitQuaternion {
        let a = self;
        UnitQuaternion {
            w: a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            x: a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            y: a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            z: a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
        }
    }
}

impl Neg for UnitQuaternion {
    type Output = UnitQuaternion;
    fn neg(self) -> UnitQuaternion {
        UnitQuaternion { w: -self.w, x: -self.x, y: -self.y, z: -self.z }
    }
}

/// The covering map S³ → SO(3), `v ↦ z v z̄` on imaginary quaternions.
pub fn quat_to_rotation(z: UnitQuaternion) -> Rotation3 {
    let z = if (z.norm() - 1.0).abs() > 1e-12 { z.renormalized() } else { z };
    let UnitQuaternion { w, x, y, z } = z;
    Rotation3(Matrix3::new(
        1.0 - 2.0 * (y * y + z * z),
        2.0 * (x * y - w * z),
        2.0 * (x * z + w * y),
        2.0 * (x * y + w * z),
        1.0 - 2.0 * (x * x + z * z),
        2.0 * (y * z - w * x),
        2.0 * (x * z - w * y),
        2.0 * (y * z + w * x),
        1.0 - 2.0 * (x * x + y * y),
    ))
}

/// Exponential of the pure quaternion `v`: `cos|v| + sin|v| v/|v|`.
pub fn quat_exp(v: &Vec3) -> UnitQuaternion {
    let a = v.norm();
    if a < 1e-14 {
        return UnitQuaternion::IDENTITY;
    }
    let s = a.sin() / a;
    let q = UnitQuaternion { w: a.cos(), x: v.x * s, y: v.y * s, z: v.z * s };
    // cos² + sin² can miss 1 by an ulp; keep the stored norm exact to 1e-15.
    let n = q.norm();
    UnitQuaternion { w: q.w / n, x: q.x / n, y: q.y / n, z: q.z / n }
}

/// Principal logarithm: the pure quaternion `v` with `|v| ≤ π` and `exp(v) = z`.
pub fn quat_log(z: &UnitQuaternion) -> Vec3 {
    let im = z.imag();
    let s = im.norm();
    if s < 1e-300 {
        if z.w > 0.0 {
            return Vec3::zeros();
        }
        return Vec3::new(std::f64::consts::PI, 0.0, 0.0);
    }
    let a = s.atan2(z.w);
    im * (a / s)
}

/// A stereographic chart of S² projecting from `pole` onto the plane through
/// the origin orthogonal to it, with coordinates in the basis `(v1, v2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StereoChart {
    pub pole: Vec3,
    pub v1: Vec3,
    pub v2: Vec3,
}

impl StereoChart {
    /// The chart with `(v1, v2, pole)` positively oriented.
    pub fn new(pole: &UnitVector3) -> Self {
        let p = pole.into_inner();
        let axis = if p.x.abs() <= p.y.abs() && p.x.abs() <= p.z.abs() {
            Vec3::x()
        } else if p.y.abs() <= p.z.abs() {
            Vec3::y()
        } else {
            Vec3::z()
        };
        let v1 = (axis - p * p.dot(&axis)).normalize();
        let v2 = p.cross(&v1);
        Self { pole: p, v1, v2 }
    }

    /// The same projection with the opposite plane orientation.
    pub fn reflected(&self) -> Self {
        Self { pole: self.pole, v1: self.v2, v2: self.v1 }
    }

    pub fn project(&self, p: &Vec3) -> Result<Vec2> {
        let angle = angle_between(p, &self.pole);
        if angle < 1e-8 {
            return Err(Error::DegenerateProjection { angle });
        }
        let c = p.dot(&self.pole);
        let x = (p - self.pole * c) / (1.0 - c);
        Ok(Vec2::new(x.dot(&self.v1), x.dot(&self.v2)))
    }

    pub fn unproject(&self, y: &Vec2) -> Vec3 {
        let r2 = y.norm_squared();
        let big = self.v1 * y.x + self.v2 * y.y;
        ((big * 2.0 + self.pole * (r2 - 1.0)) / (r2 + 1.0)).normalize()
    }

    /// Inverse projection together with the pushed-forward tangent vector.
    pub fn unproject_with_tangent(&self, y: &Vec2, dy: &Vec2) -> (Vec3, Vec3) {
        let p = self.unproject(y);
        let r2 = y.norm_squared();
        let big_d = self.v1 * dy.x + self.v2 * dy.y;
        let ydy = y.dot(dy);
        let dp = (big_d * 2.0 + (self.pole - p) * (2.0 * ydy)) / (r2 + 1.0);
        (p, dp)
    }

    /// Pushes a tangent vector at `p` into the plane.
    pub fn project_tangent(&self, p: &Vec3, dp: &Vec3) -> Result<Vec2> {
        let c = p.dot(&self.pole);
        if 1.0 - c < 1e-14 {
            return Err(Error::DegenerateProjection { angle: angle_between(p, &self.pole) });
        }
        let dc = dp.dot(&self.pole);
        let dx = (dp - self.pole * dc) / (1.0 - c) + (p - self.pole * c) * (dc / ((1.0 - c) * (1.0 - c)));
        Ok(Vec2::new(dx.dot(&self.v1), dx.dot(&self.v2)))
    }
}

/// Stereographic projection from `pole` with `(v1, v2, pole)` positively oriented.
pub fn stereographic(p: &UnitVector3, pole: &UnitVector3) -> Result<Vec2> {
    StereoChart::new(pole).project(p)
}

/// Inverse of [`stereographic`].
pub fn unstereographic(y: &Vec2, pole: &UnitVector3) -> UnitVector3 {
    UnitVector3::new(StereoChart::new(pole).unproject(y))
}

/// The conformal dilatation `T_r = pr⁻¹ ∘ (r ·) ∘ pr` of the chart centered at `pole`.
///
/// The pole itself is the image of the point at infinity and is fixed.
pub fn mobius_dilate(p: &UnitVector3, r: f64, pole: &UnitVector3) -> Result<UnitVector3> {
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::DomainError(format!("dilatation factor {r} not in (0, 1]")));
    }
    if r == 1.0 {
        return Ok(*p);
    }
    if p.dot(pole) > 1.0 - 1e-15 {
        return Ok(*pole);
    }
    let chart = StereoChart::new(pole);
    let y = chart.project(p)?;
    Ok(UnitVector3::new(chart.unproject(&(y * r))))
}

/// Solution of the hemisphere margin program.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HemisphereSolution {
    pub h: UnitVector3,
    /// `min_i ⟨p_i, h⟩` for the normalized `h`.
    pub margin: f64,
}

/// Maximizes `min_i ⟨p_i, h⟩` over unit vectors `h`.
///
/// When the origin lies outside the convex hull the optimum is the direction
/// of the hull's nearest point to the origin, and the margin is its norm.
/// Otherwise the margin is not positive and only its sign matters; it is
/// found on the boundary of the cube `‖h‖∞ = 1` instead, where each of the
/// six faces is a linear program in three variables, solved by constraint
/// generation so that only a few hundred rows are ever pivoted.
pub fn hemisphere_margin(points: &[Vec3]) -> HemisphereSolution {
    assert!(!points.is_empty(), "hemisphere_margin needs at least one point");
    let x = min_norm_point(points);
    if x.norm() > 1e-9 {
        let h = UnitVector3::new(x);
        let margin = points.par_iter().map(|p| p.dot(&h)).reduce(|| f64::INFINITY, f64::min);
        if margin > 0.0 {
            return HemisphereSolution { h, margin };
        }
    }
    cube_margin(points)
}

/// Nearest point to the origin of the convex hull (Wolfe's algorithm).
pub fn min_norm_point(points: &[Vec3]) -> Vec3 {
    let scale = points.iter().map(|p| p.norm_squared()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut corral: Vec<usize> = vec![argmin_by(points, |p| p.norm_squared())];
    let mut lambda: Vec<f64> = vec![1.0];
    let mut x = points[corral[0]];
    for _ in 0..1000 {
        let j = points
            .par_iter()
            .enumerate()
            .map(|(i, p)| (p.dot(&x), i))
            .reduce(|| (f64::INFINITY, usize::MAX), |a, b| if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a })
            .1;
        if x.norm_squared() - points[j].dot(&x) <= 1e-14 * scale || corral.contains(&j) || x.norm_squared() < 1e-24 * scale
        {
            break;
        }
        corral.push(j);
        lambda.push(0.0);
        for _ in 0..8 {
            let Some(alpha) = affine_min(points, &corral) else { break };
            if alpha.iter().all(|&a| a > 1e-14) {
                lambda = alpha;
                break;
            }
            // Step toward the affine minimizer until a weight reaches zero.
            let theta = lambda
                .iter()
                .zip(&alpha)
                .filter(|(_, &a)| a <= 1e-14)
                .map(|(&l, &a)| l / (l - a))
                .fold(1.0, f64::min);
            for (l, a) in lambda.iter_mut().zip(&alpha) {
                *l += theta * (a - *l);
            }
            let mut k = 0;
            while k < corral.len() {
                if lambda[k] <= 1e-14 {
                    corral.remove(k);
                    lambda.remove(k);
                } else {
                    k += 1;
                }
            }
            let total: f64 = lambda.iter().sum();
            lambda.iter_mut().for_each(|l| *l /= total);
        }
        x = corral.iter().zip(&lambda).map(|(&i, &l)| points[i] * l).sum();
        if corral.len() >= 4 {
            // A full-dimensional corral means the origin is inside the hull.
            break;
        }
    }
    x
}

/// Weights of the point of least norm on the affine hull of `idx`.
fn affine_min(points: &[Vec3], idx: &[usize]) -> Option<Vec<f64>> {
    let n = idx.len();
    let mut a = nalgebra::DMatrix::<f64>::zeros(n + 1, n + 1);
    let mut b = nalgebra::DVector::<f64>::zeros(n + 1);
    for r in 0..n {
        for c in 0..n {
            a[(r, c)] = points[idx[r]].dot(&points[idx[c]]);
        }
        a[(r, n)] = 1.0;
        a[(n, r)] = 1.0;
    }
    b[n] = 1.0;
    let sol = a.lu().solve(&b)?;
    let w: Vec<f64> = sol.iter().take(n).copied().collect();
    w.iter().all(|x| x.is_finite()).then_some(w)
}

fn cube_margin(points: &[Vec3]) -> HemisphereSolution {
    // Faces facing the mean of the points first: they usually hold the optimum,
    // and its value lets the other faces stop early.
    let mean: Vec3 = points.par_iter().copied().sum::<Vec3>();
    let mut faces: Vec<(usize, f64)> = (0..3).flat_map(|k| [(k, 1.0), (k, -1.0)]).collect();
    faces.sort_by(|a, b| (b.1 * mean[b.0]).total_cmp(&(a.1 * mean[a.0])));
    let mut best: Option<(f64, Vec3)> = None;
    for (k, sigma) in faces {
        let (m, h) = face_program(points, k, sigma, best.map_or(f64::NEG_INFINITY, |b| b.0));
        if best.map_or(true, |(bm, _)| m > bm + 1e-15) {
            best = Some((m, h));
        }
    }
    let (_, h) = best.expect("six faces");
    let h = UnitVector3::new(h);
    let margin = points.iter().map(|p| p.dot(&h)).fold(f64::INFINITY, f64::min);
    HemisphereSolution { h, margin }
}

/// Face program for `h_k = σ`. Stops early once its optimum, which only
/// decreases as rows are added, falls below `floor`.
fn face_program(points: &[Vec3], k: usize, sigma: f64, floor: f64) -> (f64, Vec3) {
    let (c1, c2) = match k {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    };
    // Variables: u1 = h_c1 + 1, u2 = h_c2 + 1 in [0, 2]; μ = m + 2 in [0, 4].
    let point_row = |p: &Vec3| -> (Vec<f64>, f64) {
        (vec![-p[c1], -p[c2], 1.0], 2.0 + sigma * p[k] - p[c1] - p[c2])
    };
    let box_rows = [vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
    let box_rhs = [2.0, 2.0, 4.0];
    // Point rows currently in the program; non-binding ones are dropped after
    // every solve so the tableau stays small.
    let mut active: Vec<usize> = vec![argmin_by(points, |p| sigma * p[k])];
    let mut h = Vec3::zeros();
    let mut m = 0.0;
    let mut prev_m = f64::INFINITY;
    for _ in 0..2000 {
        let mut rows: Vec<Vec<f64>> = box_rows.to_vec();
        let mut rhs: Vec<f64> = box_rhs.to_vec();
        for &i in &active {
            let (r, b) = point_row(&points[i]);
            rows.push(r);
            rhs.push(b);
        }
        let x = lp::simplex_max(&[0.0, 0.0, 1.0], &rows, &rhs).expect("bounded face program");
        h[k] = sigma;
        h[c1] = x[0] - 1.0;
        h[c2] = x[1] - 1.0;
        m = x[2] - 2.0;
        if m < floor - 1e-12 {
            break;
        }
        // Worst violator in each voxel of side 0.05, so that one round can add
        // rows from several directions of the boundary.
        let buckets = points
            .par_iter()
            .enumerate()
            .filter_map(|(i, p)| {
                let v = p.dot(&h) - m;
                (v < -1e-13).then_some((i, v))
            })
            .fold(HashMap::new, |mut acc: HashMap<(i32, i32, i32), (f64, usize)>, (i, v)| {
                let p = &points[i];
                let key = ((p.x * 20.0).floor() as i32, (p.y * 20.0).floor() as i32, (p.z * 20.0).floor() as i32);
                let e = acc.entry(key).or_insert((v, i));
                if v < e.0 {
                    *e = (v, i);
                }
                acc
            })
            .reduce(HashMap::new, |mut a, b| {
                for (k, x) in b {
                    let e = a.entry(k).or_insert(x);
                    if x.0 < e.0 {
                        *e = x;
                    }
                }
                a
            });
        if buckets.is_empty() {
            break;
        }
        let mut violated: Vec<(f64, usize)> = buckets.into_values().collect();
        violated.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        // Dropping slack rows is safe only while the optimum strictly decreases;
        // on degenerate rounds it could cycle.
        if m < prev_m - 1e-12 {
            active.retain(|&i| points[i].dot(&h) - m < 1e-7);
        }
        prev_m = m;
        let mut added: Vec<usize> = Vec::new();
        for &(_, i) in &violated {
            if added.iter().all(|&j| (points[i] - points[j]).norm() > 0.05) {
                added.push(i);
                if added.len() >= 12 {
                    break;
                }
            }
        }
        for i in added {
            if !active.contains(&i) {
                active.push(i);
            }
        }
    }
    (m, h)
}

fn argmin_by(points: &[Vec3], f: impl Fn(&Vec3) -> f64) -> usize {
    let mut best = 0;
    let mut bv = f64::INFINITY;
    for (i, p) in points.iter().enumerate() {
        let v = f(p);
        if v < bv {
            bv = v;
            best = i;
        }
    }
    best
}

/// Returns a hemisphere pole `h` with every point in the open (`closed = false`)
/// or closed (`closed = true`) hemisphere centered at `h`, up to `eps`.
pub fn hemisphere_feasible(points: &[Vec3], closed: bool, eps: f64) -> Option<UnitVector3> {
    let sol = hemisphere_margin(points);
    let ok = if closed { sol.margin >= -eps } else { sol.margin > eps };
    ok.then_some(sol.h)
}

/// True iff the origin is interior to the convex hull, i.e. no closed
/// hemisphere contains all points.
pub fn origin_in_hull_interior(points: &[Vec3], eps: f64) -> bool {
    hemisphere_margin(points).margin < -eps
}

/// Vertices drawn from a point set with barycentric weights.
#[derive(Debug, Clone, PartialEq)]
pub struct SphericalSimplex {
    pub indices: Vec<usize>,
    pub vertices: Vec<UnitVector3>,
    pub weights: Vec<f64>,
}

impl SphericalSimplex {
    pub fn residual(&self, target: &Vec3) -> f64 {
        let s: Vec3 = self.vertices.iter().zip(&self.weights).map(|(v, w)| v.into_inner() * *w).sum();
        (s - target).norm()
    }

    /// Volume of the parallelepiped spanned by the edges from the first vertex.
    pub fn volume(&self) -> f64 {
        if self.vertices.len() < 4 {
            return 0.0;
        }
        let a = *self.vertices[0];
        let m = Matrix3::from_columns(&[
            *self.vertices[1] - a,
            *self.vertices[2] - a,
            *self.vertices[3] - a,
        ]);
        m.determinant().abs()
    }
}

/// Finds at most four points whose convex hull contains `target`.
///
/// A phase-one simplex supplies a basic feasible decomposition; when it is
/// degenerate the target is jittered with seeded random offsets and the best
/// resulting tetrahedron (largest minimal weight) is kept.
pub fn containing_simplex(points: &[Vec3], target: &Vec3, tol: &ToleranceProfile) -> Result<SphericalSimplex> {
    if points.is_empty() {
        return Err(Error::NotInHull);
    }
    if let Some(i) = points.iter().position(|p| (p - target).norm() < 1e-12) {
        return Ok(SphericalSimplex {
            indices: vec![i],
            vertices: vec![UnitVector3::new(points[i])],
            weights: vec![1.0],
        });
    }
    let cols: Vec<[f64; 3]> = points.iter().map(|p| [p.x, p.y, p.z]).collect();
    let t = [target.x, target.y, target.z];
    let base = lp::caratheodory(&cols, t).ok_or(Error::NotInHull)?;
    let mut best = simplex_from(points, &base, target);
    if best.as_ref().map_or(true, |s| s.weights.len() < 4 || min_weight(s) < 1e-3) {
        let mut rng = ChaCha8Rng::seed_from_u64(tol.seed);
        for attempt in 0..48 {
            let scale = 10f64.powi(-1 - (attempt / 8) as i32);
            let dir = random_unit(&mut rng);
            let tp = target + dir * scale;
            let Some(sol) = lp::caratheodory(&cols, [tp.x, tp.y, tp.z]) else { continue };
            if sol.len() < 4 {
                continue;
            }
            if let Some(s) = simplex_from(points, &sol, target) {
                if s.weights.len() == 4
                    && s.weights.iter().all(|&w| w > 0.0)
                    && best.as_ref().map_or(true, |b| b.weights.len() < 4 || min_weight(&s) > min_weight(b))
                {
                    best = Some(s);
                }
            }
            if best.as_ref().map_or(false, |b| b.weights.len() == 4 && min_weight(b) > 1e-2) {
                break;
            }
        }
    }
    if best.is_none() {
        best = random_quadruples(points, target, tol);
    }
    let s = best.ok_or(Error::NotInHull)?;
    if s.residual(target) > 1e-9 {
        return Err(Error::NotInHull);
    }
    Ok(s)
}

fn min_weight(s: &SphericalSimplex) -> f64 {
    s.weights.iter().copied().fold(f64::INFINITY, f64::min)
}

fn random_unit(rng: &mut ChaCha8Rng) -> Vec3 {
    loop {
        let v = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            return v / n;
        }
    }
}

/// Weights of `target` with respect to the given vertex set, solved exactly.
fn simplex_from(points: &[Vec3], sol: &[(usize, f64)], target: &Vec3) -> Option<SphericalSimplex> {
    let idx: Vec<usize> = sol.iter().map(|&(i, _)| i).collect();
    let weights = barycentric(points, &idx, target)?;
    if weights.iter().any(|&w| w < -1e-12) {
        return None;
    }
    Some(SphericalSimplex {
        vertices: idx.iter().map(|&i| UnitVector3::new(points[i])).collect(),
        indices: idx,
        weights: weights.iter().map(|w| w.max(0.0)).collect(),
    })
}

fn barycentric(points: &[Vec3], idx: &[usize], target: &Vec3) -> Option<Vec<f64>> {
    let k = idx.len();
    // Least squares on the (4 × k) system [p; 1] w = [t; 1].
    let mut a = nalgebra::DMatrix::<f64>::zeros(4, k);
    for (c, &i) in idx.iter().enumerate() {
        a[(0, c)] = points[i].x;
        a[(1, c)] = points[i].y;
        a[(2, c)] = points[i].z;
        a[(3, c)] = 1.0;
    }
    let b = nalgebra::DVector::from_vec(vec![target.x, target.y, target.z, 1.0]);
    let svd = a.clone().svd(true, true);
    let w = svd.solve(&b, 1e-14).ok()?;
    if (&a * &w - &b).norm() > 1e-9 {
        return None;
    }
    Some(w.iter().copied().collect())
}

fn random_quadruples(points: &[Vec3], target: &Vec3, tol: &ToleranceProfile) -> Option<SphericalSimplex> {
    let n = points.len();
    if n < 4 {
        return None;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(tol.seed ^ 0x9e37_79b9);
    let mut best: Option<SphericalSimplex> = None;
    for _ in 0..20_000 {
        let idx = [rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n)];
        let m = Matrix4::from_columns(&[
            Vector4::new(points[idx[0]].x, points[idx[0]].y, points[idx[0]].z, 1.0),
            Vector4::new(points[idx[1]].x, points[idx[1]].y, points[idx[1]].z, 1.0),
            Vector4::new(points[idx[2]].x, points[idx[2]].y, points[idx[2]].z, 1.0),
            Vector4::new(points[idx[3]].x, points[idx[3]].y, points[idx[3]].z, 1.0),
        ]);
        if m.determinant().abs() < 1e-9 {
            continue;
        }
        let Some(w) = m.lu().solve(&Vector4::new(target.x, target.y, target.z, 1.0)) else { continue };
        if w.iter().all(|&x| x > 0.0) {
            let s = SphericalSimplex {
                indices: idx.to_vec(),
                vertices: idx.iter().map(|&i| UnitVector3::new(points[i])).collect(),
                weights: w.iter().copied().collect(),
            };
            if best.as_ref().map_or(true, |b| min_weight(&s) > min_weight(b)) {
                best = Some(s);
            }
        }
    }
    best
}

/// Deterministic Fibonacci lattice of `m` directions on S².
pub fn fibonacci_sphere(m: usize) -> Vec<Vec3> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..m)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / m as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * i as f64;
            Vec3::new(r * phi.cos(), r * phi.sin(), z)
        })
        .collect()
}
