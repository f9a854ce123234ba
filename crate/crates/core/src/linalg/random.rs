//! Seeded random matrices and vectors used by tests, samplers and the CLI.

use rand::Rng;
use rand_distr::StandardNormal;

use super::{c, vnorm, CMatrix, CVector, Field, Mat, C64};

fn gaussian_scalar<R: Rng + ?Sized>(rng: &mut R, field: Field) -> C64 {
    match field {
        Field::Real => c(rng.sample(StandardNormal)),
        Field::Complex => {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            C64::new(rng.sample::<f64, _>(StandardNormal) * s, rng.sample::<f64, _>(StandardNormal) * s)
        }
    }
}

pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, d: usize, field: Field) -> CVector {
    CVector::from_fn(d, |_, _| gaussian_scalar(rng, field))
}

/// Uniformly distributed unit vector (Haar measure on the sphere).
pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, d: usize, field: Field) -> CVector {
    loop {
        let v = gaussian_vector(rng, d, field);
        let n = vnorm(&v);
        if n > 1e-300 {
            return v / c(n);
        }
    }
}

/// Matrix with i.i.d. standard Gaussian entries.
pub fn gaussian_mat<R: Rng + ?Sized>(rng: &mut R, n: usize, field: Field) -> Mat {
    let mut data = CMatrix::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            data[(i, j)] = gaussian_scalar(rng, field);
        }
    }
    Mat::new(field, data)
}

/// Haar-distributed orthogonal/unitary matrix (Gaussian QR with phase fix).
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize, field: Field) -> Mat {
    let g = gaussian_mat(rng, n, field).into_data();
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / c(d.norm()) } else { c(1.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    Mat::new(field, q)
}

/// `I + E` with `E` a random direction scaled to operator norm `radius * u`, `u` uniform in (0, 1].
pub fn near_identity<R: Rng + ?Sized>(rng: &mut R, n: usize, field: Field, radius: f64) -> Mat {
    let e = gaussian_mat(rng, n, field);
    let norm = e.norm();
    let u: f64 = 1.0 - rng.random::<f64>();
    let scaled = e.scale(c(radius * u / norm));
    &Mat::identity(n, field) + &scaled
}

/// Random invertible matrix with condition number at most `max_cond`:
/// `U diag(s) V` with log-uniform `s`.
pub fn random_conditioned<R: Rng + ?Sized>(rng: &mut R, n: usize, field: Field, max_cond: f64) -> Mat {
    let u = random_unitary(rng, n, field);
    let v = random_unitary(rng, n, field);
    let span = max_cond.ln();
    let s: Vec<f64> = (0..n).map(|_| (rng.random::<f64>() * span).exp()).collect();
    let d = Mat::diag(&s);
    &(&u * &Mat::new(field, d.into_data())) * &v
}
