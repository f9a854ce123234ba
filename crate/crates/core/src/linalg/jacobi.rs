//! One-sided Jacobi SVD for complex matrices with at least as many rows as columns.

use super::{CMatrix, C64};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 80;

/// `a = u * diag(sigmas) * v^H`: `sigmas` nonincreasing, `v` unitary (n x n),
/// `u` has orthonormal columns (m x n).
pub(crate) struct Thin {
    pub sigmas: Vec<f64>,
    pub u: CMatrix,
    pub v: CMatrix,
}

/// Requires `a.nrows() >= a.ncols()`.
pub(crate) fn thin_svd(a: &CMatrix) -> Result<Thin> {
    let (m, n) = a.shape();
    debug_assert!(m >= n);
    let mut w = a.clone();
    let mut v = CMatrix::identity(n, n);
    if n == 0 {
        return Ok(Thin { sigmas: Vec::new(), u: CMatrix::zeros(m, 0), v });
    }
    let tol = f64::EPSILON * (m as f64).sqrt();
    let mut norms: Vec<f64> = (0..n).map(|j| w.column(j).norm_squared()).collect();
    // Columns below eps * |a|_F are rounding noise and take no part in rotations.
    let negligible = f64::EPSILON * f64::EPSILON * norms.iter().sum::<f64>();
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (alpha, beta) = (norms[p], norms[q]);
                if alpha <= negligible || beta <= negligible {
                    continue;
                }
                let gamma = w.column(p).dotc(&w.column(q));
                let g = gamma.norm();
                if g <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let sp = phase.conj() * s;
                let cp = phase.conj() * c;
                rotate(&mut w, p, q, c, sp, cp, s);
                rotate(&mut v, p, q, c, sp, cp, s);
                norms[p] = w.column(p).norm_squared();
                norms[q] = w.column(q).norm_squared();
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence);
    }

    let raw: Vec<f64> = (0..n).map(|j| w.column(j).norm()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| raw[y].total_cmp(&raw[x]));
    let sigmas: Vec<f64> = order.iter().map(|&j| raw[j]).collect();
    let v = CMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    let mut u = CMatrix::from_fn(m, n, |i, j| w[(i, order[j])]);
    for (j, &s) in sigmas.iter().enumerate() {
        if s > 0.0 {
            let col = u.column(j) / C64::new(s, 0.0);
            u.set_column(j, &col);
        }
    }
    complete_orthonormal(&mut u, &sigmas);
    Ok(Thin { sigmas, u, v })
}

/// Columns p, q <- (c x_p - s e^{-i phi} x_q, s x_p + c e^{-i phi} x_q).
fn rotate(x: &mut CMatrix, p: usize, q: usize, c: f64, sp: C64, cp: C64, s: f64) {
    for i in 0..x.nrows() {
        let (a, b) = (x[(i, p)], x[(i, q)]);
        x[(i, p)] = a * c - b * sp;
        x[(i, q)] = a * s + b * cp;
    }
}

/// Re-orthonormalizes the left vectors in order (two Gram-Schmidt passes);
/// columns with negligible singular value are replaced by completing vectors.
fn complete_orthonormal(u: &mut CMatrix, sigmas: &[f64]) {
    let (m, n) = u.shape();
    let floor = sigmas.first().copied().unwrap_or(0.0) * f64::EPSILON * m.max(n) as f64;
    let mut next_basis = 0;
    for j in 0..n {
        let mut col = if sigmas[j] > floor { Some(u.column(j).into_owned()) } else { None };
        loop {
            let mut x = match col.take() {
                Some(x) => x,
                None => {
                    if next_basis >= m {
                        break;
                    }
                    let mut e = super::CVector::zeros(m);
                    e[next_basis] = C64::new(1.0, 0.0);
                    next_basis += 1;
                    e
                }
            };
            let before = x.norm();
            for _ in 0..2 {
                for k in 0..j {
                    let proj = u.column(k).dotc(&x);
                    x -= u.column(k) * proj;
                }
            }
            let after = x.norm();
            if after > 0.5 * before && after > 0.0 {
                u.set_column(j, &(x / C64::new(after, 0.0)));
                break;
            }
        }
    }
}
