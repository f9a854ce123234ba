use rand::Rng;
use rand_distr::StandardNormal;

use super::quat::{tau, QuatMat3};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, Flag, Mat, Subspace, C64};
use crate::words::{Factor, Generator, Rep};

/// Lexicographic index pairs `(i, j)`, `i < j`, of the basis `e_i ^ e_j`.
pub fn wedge_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            out.push((i, j));
        }
    }
    out
}

/// Position of `e_i ^ e_j` (0-based, `i < j`) in the lexicographic basis.
pub fn wedge_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

/// Matrix of the induced action on the second exterior power.
pub fn exterior_square(g: &Mat) -> Result<Mat> {
    let n = g.require_square()?;
    let pairs = wedge_pairs(n);
    let a = g.data();
    let m = CMatrix::from_fn(pairs.len(), pairs.len(), |r, c| {
        let (i, j) = pairs[r];
        let (k, l) = pairs[c];
        a[(i, k)] * a[(j, l)] - a[(i, l)] * a[(j, k)]
    });
    Ok(Mat::new(g.field(), m))
}

/// Coordinates of `u ^ v` in the lexicographic basis.
pub fn wedge(u: &CVector, v: &CVector) -> Result<CVector> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch(format!("wedge of vectors of length {} and {}", u.len(), v.len())));
    }
    let pairs = wedge_pairs(u.len());
    Ok(CVector::from_iterator(pairs.len(), pairs.iter().map(|&(i, j)| u[i] * v[j] - u[j] * v[i])))
}

/// `diag(e^b, 1, e^-b)` realized in `GL_6(C)` and pushed to the 15-dimensional exterior square,
/// optionally conjugated by a quaternionic matrix first.
pub fn sp21_generator(b: f64, conjugator: Option<&QuatMat3>) -> Result<Mat> {
    if !b.is_finite() {
        return Err(Error::NonFinite);
    }
    let mut g = tau(&QuatMat3::hyperbolic(b));
    if let Some(h) = conjugator {
        g = g.conjugate_by(&tau(h))?;
    }
    exterior_square(&g)
}

/// Cyclic representation generated by [`sp21_generator`].
pub fn sp21_rep(b: f64, conjugator: Option<&QuatMat3>) -> Result<Rep> {
    let g = sp21_generator(b, conjugator)?;
    Rep::new(vec![Factor::new("F1", vec![Generator::new("g1", g)])])
}

/// The fixed vector `e_1^e_4 + e_2^e_5 - e_3^e_6` whose complement contains the boundary image.
pub fn sp21_normal() -> CVector {
    let mut v = CVector::zeros(15);
    v[wedge_index(6, 0, 3)] = C64::new(1.0, 0.0);
    v[wedge_index(6, 1, 4)] = C64::new(1.0, 0.0);
    v[wedge_index(6, 2, 5)] = C64::new(-1.0, 0.0);
    v
}

/// The pair of vectors in `C^6` whose wedge gives the boundary point attached to `a`.
pub fn sp21_vectors(a: &[C64; 4]) -> (CVector, CVector) {
    let z = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let u = CVector::from_vec(vec![a[0], a[1], one, a[2].conj(), a[3].conj(), z]);
    let v = CVector::from_vec(vec![-a[2], -a[3], z, a[0].conj(), a[1].conj(), one]);
    (u, v)
}

/// Boundary point in the 15-dimensional flag space for `a` on the unit sphere of `C^4`.
pub fn sp21_limit_point(a: &[C64; 4]) -> Result<Flag> {
    let n2: f64 = a.iter().map(|z| z.norm_sqr()).sum();
    if !n2.is_finite() || (n2 - 1.0).abs() > 1e-10 {
        return Err(Error::Invalid(format!("limit point parameter must have unit norm, got |a|^2 = {n2}")));
    }
    let (u, v) = sp21_vectors(a);
    let w = wedge(&u, &v)?;
    let line = Subspace::line(w.clone())?;
    let hyperplane = Subspace::hyperplane_from_normal(w)?;
    Flag::new(line, hyperplane)
}

/// Uniform sample on the unit sphere of `C^4`.
pub fn random_sphere_point<R: Rng + ?Sized>(rng: &mut R) -> [C64; 4] {
    let mut a = [C64::new(0.0, 0.0); 4];
    for z in &mut a {
        *z = C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
    }
    let n = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in &mut a {
        *z /= n;
    }
    a
}

/// The flag `([e_1^e_4 + e_2^e_5], (e_3^e_6)^perp)` transverse to the boundary image.
pub fn sp21_transverse_flag() -> Flag {
    let mut v0 = CVector::zeros(15);
    v0[wedge_index(6, 0, 3)] = C64::new(1.0, 0.0);
    v0[wedge_index(6, 1, 4)] = C64::new(1.0, 0.0);
    let mut n = CVector::zeros(15);
    n[wedge_index(6, 2, 5)] = C64::new(1.0, 0.0);
    Flag::new(
        Subspace::line(v0).expect("nonzero"),
        Subspace::hyperplane_from_normal(n).expect("nonzero"),
    )
    .expect("transverse by construction")
}
