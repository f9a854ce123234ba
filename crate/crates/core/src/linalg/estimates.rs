//! The contraction estimate for a matrix with a gap of index 1 and the
//! displacement estimate for matrices near the identity.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use super::decomp::{raw_singular_values, svd};
use super::jacobi::thin_svd;
use super::{c, inner, vnorm, CMatrix, CVector, Field, Mat, Subspace};
use crate::error::{Error, Result};

/// Number of quasi-uniform lines used to estimate the displacement supremum.
pub const DISPLACEMENT_SAMPLES: usize = 4096;

/// Additive slack on both checks.
const SLACK: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub lhs: f64,
    /// `+inf` when the line lies in the repelling hyperplane.
    pub rhs: f64,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisplacementCheck {
    /// Maximum over sampled lines; a lower bound on the true supremum.
    pub sup_est: f64,
    pub bound: f64,
    pub ok: bool,
    pub samples: usize,
}

/// Checks `d(gx, Xi_1(g)) <= (sigma_2/sigma_1) / dist(x, Xi_{d-1}(g^-1))`.
pub fn contraction_bound_check(g: &Mat, x: &Subspace, gap_tol: f64) -> Result<BoundCheck> {
    let n = g.require_square()?;
    if x.dim() != 1 || x.ambient_dim() != n {
        return Err(Error::DimensionMismatch(format!(
            "expected a line in K^{n}, got a {}-dimensional subspace of K^{}",
            x.dim(),
            x.ambient_dim()
        )));
    }
    if n < 2 {
        return Err(Error::IndexOutOfRange { index: 1, lo: 1, hi: n.saturating_sub(1) });
    }
    let s = svd(g)?;
    let ratio = s.gap_ratio(1);
    if !(ratio > 1.0 + gap_tol) {
        return Err(Error::GapTooSmall { index: 1, ratio, tol: gap_tol });
    }
    let u1: CVector = s.left.data().column(0).into_owned();
    // Xi_{d-1}(g^-1) is the orthogonal complement of the top right singular vector.
    let v1: CVector = s.right.data().row(0).adjoint();
    let xv = x.unit_vector();
    let dist = inner(&v1, &xv).norm().min(1.0);

    let gx = g.apply(&xv);
    let ngx = vnorm(&gx);
    let lhs = (vnorm(&(&gx - &u1 * inner(&u1, &gx))) / ngx).min(1.0);
    let contraction = s.sigmas[1] / s.sigmas[0];
    let rhs = if dist > 0.0 { contraction / dist } else { f64::INFINITY };
    Ok(BoundCheck { lhs, rhs, ok: lhs <= rhs + SLACK })
}

/// First `count` primes, used as Halton bases.
fn primes(count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut k = 2u64;
    while out.len() < count {
        if out.iter().all(|p| !k.is_multiple_of(*p)) {
            out.push(k);
        }
        k += 1;
    }
    out
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % base) as f64;
        i /= base;
        f *= inv;
    }
    r
}

fn build_lines(d: usize, field: Field, count: usize) -> CMatrix {
    let reals = match field {
        Field::Real => d,
        Field::Complex => 2 * d,
    };
    let pairs = reals.div_ceil(2);
    let bases = primes(2 * pairs);
    let mut out = CMatrix::zeros(d, count);
    let mut coords = vec![0.0f64; 2 * pairs];
    for j in 0..count {
        let idx = j as u64 + 1;
        for p in 0..pairs {
            // Box-Muller on a pair of Halton coordinates (both in (0,1) for idx >= 1).
            let u1 = radical_inverse(idx, bases[2 * p]);
            let u2 = radical_inverse(idx, bases[2 * p + 1]);
            let rad = (-2.0 * u1.ln()).sqrt();
            let ang = std::f64::consts::TAU * u2;
            coords[2 * p] = rad * ang.cos();
            coords[2 * p + 1] = rad * ang.sin();
        }
        let mut v = CVector::from_fn(d, |i, _| match field {
            Field::Real => c(coords[i]),
            Field::Complex => super::C64::new(coords[2 * i], coords[2 * i + 1]),
        });
        let nv = vnorm(&v);
        if nv == 0.0 {
            v[0] = c(1.0);
        } else {
            v /= c(nv);
        }
        out.set_column(j, &v);
    }
    out
}

/// Deterministic quasi-uniform unit vectors (columns) in `K^d`: a Halton
/// sequence pushed through Box-Muller and normalized. Cached per `(d, field, count)`.
pub fn quasi_uniform_lines(d: usize, field: Field, count: usize) -> Arc<CMatrix> {
    type Cache = Mutex<HashMap<(usize, Field, usize), Arc<CMatrix>>>;
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    guard.entry((d, field, count)).or_insert_with(|| Arc::new(build_lines(d, field, count))).clone()
}

/// Max over the columns `x` of `d_P(g x, x)`.
fn max_displacement(g: &CMatrix, xs: &CMatrix) -> f64 {
    let ys = g * xs;
    let mut best = 0.0f64;
    for j in 0..xs.ncols() {
        let x = xs.column(j);
        let y = ys.column(j);
        let ny = y.norm();
        let p = x.dotc(&y);
        let resid = y - x * p;
        best = best.max((resid.norm() / ny).min(1.0));
    }
    best
}

/// Estimates `sup_x d_P(gx, x)` and compares it with `2 sigma_1(g^-1) ||g - I||`.
pub fn near_identity_displacement_check(g: &Mat) -> Result<DisplacementCheck> {
    let n = g.require_square()?;
    g.require_finite()?;
    let sig = raw_singular_values(g.data());
    let smin = *sig.last().unwrap_or(&0.0);
    if !(smin > 1e-14 * sig[0]) {
        return Err(Error::Singular);
    }
    let e = g.data() - CMatrix::identity(n, n);
    let dev = raw_singular_values(&e)[0];
    let bound = 2.0 / smin * dev;

    let lines = quasi_uniform_lines(n, g.field(), DISPLACEMENT_SAMPLES);
    let mut sup_est = max_displacement(g.data(), &lines);
    // Singular directions of g - I.
    let es = thin_svd(&e)?;
    let mut extra = {
        let mut m = CMatrix::zeros(n, 2 * n);
        m.view_mut((0, 0), (n, n)).copy_from(&es.u);
        m.view_mut((0, n), (n, n)).copy_from(&es.v);
        m
    };
    for j in 0..extra.ncols() {
        let nv = extra.column(j).norm();
        if nv > 0.0 {
            let col = extra.column(j) / c(nv);
            extra.set_column(j, &col);
        } else {
            extra[(0, j)] = c(1.0);
        }
    }
    sup_est = sup_est.max(max_displacement(g.data(), &extra));
    Ok(DisplacementCheck {
        sup_est,
        bound,
        ok: sup_est <= bound + SLACK,
        samples: DISPLACEMENT_SAMPLES + 2 * n,
    })
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::linalg::random::{near_identity, random_conditioned, random_unit_vector};
    use crate::linalg::{proj_metric, unit_line_distance};

    #[test]
    fn fixed_attracting_line() {
        let g = Mat::diag(&[3.0, 1.0]);
        let x = Subspace::coordinate(2, &[0], Field::Real);
        let r = contraction_bound_check(&g, &x, 1e-8).unwrap();
        assert_eq!(r.lhs, 0.0);
        assert!(r.ok);
    }

    #[test]
    fn diagonal_direct_evaluation() {
        let g = Mat::diag(&[4.0, 1.0]);
        let x = Subspace::real_line(&[1.0, 1.0]).unwrap();
        let r = contraction_bound_check(&g, &x, 1e-8).unwrap();
        let gx = Subspace::real_line(&[4.0, 1.0]).unwrap();
        let expected = proj_metric(&gx, &Subspace::coordinate(2, &[0], Field::Real)).unwrap();
        assert!((r.lhs - expected).abs() < 1e-15);
        assert!((r.lhs - 1.0 / 17f64.sqrt()).abs() < 1e-15);
        assert!((r.rhs - 0.25 * 2f64.sqrt()).abs() < 1e-14);
        assert!(r.ok);
    }

    #[test]
    fn repelling_hyperplane_gives_infinite_rhs() {
        let g = Mat::diag(&[4.0, 1.0]);
        let x = Subspace::coordinate(2, &[1], Field::Real);
        let r = contraction_bound_check(&g, &x, 1e-8).unwrap();
        assert!(r.rhs.is_infinite());
        assert!(r.ok);
    }

    #[test]
    fn contraction_refuses_small_gap() {
        let x = Subspace::coordinate(2, &[0], Field::Real);
        let err = contraction_bound_check(&Mat::identity(2, Field::Real), &x, 1e-8).unwrap_err();
        assert!(matches!(err, Error::GapTooSmall { .. }));
    }

    #[test]
    fn contraction_randomized() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for field in [Field::Real, Field::Complex] {
            for d in 2..=6 {
                for _ in 0..40 {
                    let g = random_conditioned(&mut rng, d, field, 1e3);
                    let x = Subspace::line(random_unit_vector(&mut rng, d, field)).unwrap();
                    let r = contraction_bound_check(&g, &x, 1e-8).unwrap();
                    assert!(r.ok, "{r:?}");
                }
            }
        }
    }

    #[test]
    fn identity_has_zero_displacement() {
        let r = near_identity_displacement_check(&Mat::identity(4, Field::Real)).unwrap();
        assert!(r.sup_est < 1e-15);
        assert_eq!(r.bound, 0.0);
        assert!(r.ok);
    }

    #[test]
    fn small_dilation() {
        let eps = 1e-3;
        let g = Mat::diag(&[1.0 + eps, 1.0]);
        let r = near_identity_displacement_check(&g).unwrap();
        assert!(r.ok);
        assert!((r.bound - 2.0 * eps).abs() < 1e-15);
        // Worst line is at 45 degrees: displacement close to eps/2.
        assert!(r.sup_est > 0.45 * eps && r.sup_est <= 0.5 * eps + 1e-12);
    }

    #[test]
    fn displacement_randomized() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for field in [Field::Real, Field::Complex] {
            for d in 2..=5 {
                for _ in 0..20 {
                    let g = near_identity(&mut rng, d, field, 0.5);
                    let r = near_identity_displacement_check(&g).unwrap();
                    assert!(r.ok, "{r:?}");
                }
            }
        }
    }

    #[test]
    fn quasi_uniform_lines_are_unit_and_spread() {
        let lines = quasi_uniform_lines(3, Field::Real, 512);
        for j in 0..lines.ncols() {
            assert!((lines.column(j).norm() - 1.0).abs() < 1e-12);
        }
        // Every coordinate axis has some sample within 0.2 in the projective metric.
        for i in 0..3 {
            let e = CVector::from_fn(3, |k, _| c(if k == i { 1.0 } else { 0.0 }));
            let best = (0..lines.ncols())
                .map(|j| unit_line_distance(&e, &lines.column(j).into_owned()))
                .fold(1.0, f64::min);
            assert!(best < 0.2, "axis {i}: {best}");
        }
    }

    #[test]
    fn singular_input_is_rejected() {
        assert!(matches!(
            near_identity_displacement_check(&Mat::diag(&[1.0, 0.0])),
            Err(Error::Singular)
        ));
    }
}
