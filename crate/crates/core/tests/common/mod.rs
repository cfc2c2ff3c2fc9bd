#![allow(dead_code)]

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spherecurve::curve_model::{curve_from_points, integrate_curve, make_circle_n};
use spherecurve::sphere_core::quat_to_rotation;
use spherecurve::*;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_rotation(rng: &mut ChaCha8Rng) -> Rotation3 {
    let q = UnitQuaternion::new_normalize(
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
    );
    quat_to_rotation(q)
}

/// An open admissible curve from smooth random controls: any real `(v̂, ŵ)`
/// is admissible for any bounds.
pub fn random_curve(rng: &mut ChaCha8Rng, bounds: CurvatureBounds, n: usize) -> AdmissibleCurve {
    let modes: Vec<(f64, f64, f64, f64)> = (0..3)
        .map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let (v0, w0) = (rng.gen_range(-0.5..1.5), rng.gen_range(-1.0..1.0));
    let mut v_hat = Vec::with_capacity(n);
    let mut w_hat = Vec::with_capacity(n);
    for i in 0..n {
        let t = (i as f64 + 0.5) / n as f64;
        let (mut a, mut b) = (v0, w0);
        for (m, (c1, c2, c3, c4)) in modes.iter().enumerate() {
            let f = 2.0 * PI * (m + 1) as f64 * t;
            a += c1 * f.sin() + c2 * f.cos();
            b += c3 * f.sin() + c4 * f.cos();
        }
        v_hat.push(a);
        w_hat.push(b);
    }
    let q0 = random_rotation(rng);
    integrate_curve(&ControlPair { n, v_hat, w_hat }, bounds, q0).unwrap()
}

/// The closed curve at polar distance `r(s) = r0 + amp sin(lobes s / ν)` from `e₃`,
/// traversed `ν` times.
pub fn wobble(r0: f64, amp: f64, lobes: u32, nu: u32, m: usize, bounds: CurvatureBounds) -> AdmissibleCurve {
    let pts: Vec<Vec3> = (0..m)
        .map(|i| {
            let s = 2.0 * PI * nu as f64 * i as f64 / m as f64;
            let r = r0 + amp * (lobes as f64 * s / nu as f64).sin();
            Vec3::new(r.sin() * s.cos(), r.sin() * s.sin(), r.cos())
        })
        .collect();
    curve_from_points(&pts, bounds).unwrap()
}

pub fn circle(rho: f64, k: u32, bounds: CurvatureBounds, n: usize) -> AdmissibleCurve {
    make_circle_n(rho, k, bounds, n).unwrap()
}
