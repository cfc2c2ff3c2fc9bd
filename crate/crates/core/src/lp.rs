//! Small linear programs: a dense tableau simplex for a handful of variables
//! and a revised simplex with a 4×4 basis for Carathéodory decompositions.

use nalgebra::{Matrix4, Vector4};

const PIVOT_TOL: f64 = 1e-12;

/// Maximizes `c·x` subject to `A x ≤ b`, `x ≥ 0`, with `b ≥ 0` so the origin
/// is a feasible starting vertex. Bland's rule prevents cycling.
/// Returns `None` when the program is unbounded.
pub(crate) fn simplex_max(c: &[f64], rows: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let nv = c.len();
    let m = rows.len();
    let width = nv + m + 1;
    let mut t = vec![0.0; (m + 1) * width];
    for (i, row) in rows.iter().enumerate() {
        debug_assert!(b[i] >= 0.0);
        t[i * width..i * width + nv].copy_from_slice(row);
        t[i * width + nv + i] = 1.0;
        t[i * width + width - 1] = b[i];
    }
    for j in 0..nv {
        t[m * width + j] = -c[j];
    }
    let mut basis: Vec<usize> = (nv..nv + m).collect();
    for _ in 0..10_000 {
        let Some(entering) = (0..nv + m).find(|&j| t[m * width + j] < -PIVOT_TOL) else {
            break;
        };
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..m {
            let a = t[i * width + entering];
            if a > PIVOT_TOL {
                let ratio = t[i * width + width - 1] / a;
                match leave {
                    None => leave = Some((i, ratio)),
                    Some((li, lr)) => {
                        if ratio < lr - 1e-15 || (ratio <= lr + 1e-15 && basis[i] < basis[li]) {
                            leave = Some((i, ratio));
                        }
                    }
                }
            }
        }
        let (pr, _) = leave?;
        pivot(&mut t, width, m + 1, pr, entering);
        basis[pr] = entering;
    }
    let mut x = vec![0.0; nv];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < nv {
            x[bv] = t[i * width + width - 1];
        }
    }
    Some(x)
}

fn pivot(t: &mut [f64], width: usize, nrows: usize, pr: usize, pc: usize) {
    let p = t[pr * width + pc];
    for j in 0..width {
        t[pr * width + j] /= p;
    }
    for i in 0..nrows {
        if i == pr {
            continue;
        }
        let f = t[i * width + pc];
        if f != 0.0 {
            for j in 0..width {
                t[i * width + j] -= f * t[pr * width + j];
            }
        }
    }
}

/// Basic feasible solution of `Σ λ_j a_j = b`, `λ ≥ 0`, where every column is
/// `(p_j, 1)`. Returns the basic column indices with their weights, or `None`
/// when phase one leaves a positive infeasibility.
pub(crate) fn caratheodory(columns: &[[f64; 3]], target: [f64; 3]) -> Option<Vec<(usize, f64)>> {
    let n = columns.len();
    let b = Vector4::new(target[0], target[1], target[2], 1.0);
    let sign = Vector4::from_iterator(b.iter().map(|&v| if v < 0.0 { -1.0 } else { 1.0 }));
    let col = |j: usize| -> Vector4<f64> {
        let p = columns[j];
        Vector4::new(p[0] * sign[0], p[1] * sign[1], p[2] * sign[2], sign[3])
    };
    let bb = b.component_mul(&sign);
    // Basis entries: j < n are real columns, n + r is the artificial of row r.
    let mut basis = [n, n + 1, n + 2, n + 3];
    let mut binv = Matrix4::<f64>::identity();
    let mut xb = bb;
    let mut iter = 0usize;
    loop {
        iter += 1;
        if iter > 20_000 {
            return None;
        }
        let cb = Vector4::from_iterator(basis.iter().map(|&j| if j >= n { 1.0 } else { 0.0 }));
        let y = binv.transpose() * cb;
        let bland = iter > 2_000;
        let mut entering: Option<(usize, f64)> = None;
        for j in 0..n {
            if basis.contains(&j) {
                continue;
            }
            let d = -y.dot(&col(j));
            if d < -1e-13 {
                if bland {
                    entering = Some((j, d));
                    break;
                }
                if entering.map_or(true, |(_, best)| d < best) {
                    entering = Some((j, d));
                }
            }
        }
        let Some((ej, _)) = entering else { break };
        let d = binv * col(ej);
        let mut leave: Option<(usize, f64)> = None;
        for r in 0..4 {
            if d[r] > PIVOT_TOL {
                let ratio = xb[r] / d[r];
                let better = match leave {
                    None => true,
                    Some((lr, lratio)) => {
                        ratio < lratio - 1e-15
                            || (ratio <= lratio + 1e-15
                                && (basis[r] >= n && basis[lr] < n
                                    || (basis[r] >= n) == (basis[lr] >= n) && basis[r] < basis[lr]))
                    }
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
        }
        let (lr, ratio) = leave?;
        for r in 0..4 {
            if r != lr {
                xb[r] -= ratio * d[r];
            }
        }
        xb[lr] = ratio;
        // Elementary update of the basis inverse.
        let pivot_row = binv.row(lr) / d[lr];
        for r in 0..4 {
            if r == lr {
                binv.set_row(r, &pivot_row);
            } else {
                let f = d[r];
                let updated = binv.row(r) - pivot_row * f;
                binv.set_row(r, &updated);
            }
        }
        basis[lr] = ej;
    }
    let infeasibility: f64 = (0..4).filter(|&r| basis[r] >= n).map(|r| xb[r].max(0.0)).sum();
    if infeasibility > 1e-9 {
        return None;
    }
    let mut out: Vec<(usize, f64)> = (0..4)
        .filter(|&r| basis[r] < n && xb[r] > 1e-15)
        .map(|r| (basis[r], xb[r].max(0.0)))
        .collect();
    out.sort_by_key(|&(j, _)| j);
    Some(out)
}
