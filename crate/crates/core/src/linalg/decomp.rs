use nalgebra::Schur;

use super::jacobi::{thin_svd, Thin};

use super::{c, CMatrix, Mat, Subspace, C64};
use crate::error::{Error, Result};

/// `g = left * diag(sigmas) * right`, sigmas nonincreasing, frames unitary.
#[derive(Clone, Debug)]
pub struct SvdResult {
    pub sigmas: Vec<f64>,
    pub left: Mat,
    pub right: Mat,
}

impl SvdResult {
    pub fn reconstruct(&self) -> Mat {
        let s: Vec<C64> = self.sigmas.iter().map(|&x| c(x)).collect();
        let d = Mat::diag_complex(&s);
        let field = self.left.field();
        Mat::new(field, (&(&self.left * &d) * &self.right).into_data())
    }

    /// `sigma_i / sigma_{i+1}` for 1-based `i`.
    pub fn gap_ratio(&self, i: usize) -> f64 {
        self.sigmas[i - 1] / self.sigmas[i]
    }
}

/// Thin SVD of arbitrary complex storage via the Jacobi routine; wide
/// matrices go through the adjoint, so `u` and `v` swap roles.
fn thin(m: &CMatrix) -> Result<(Thin, bool)> {
    if m.nrows() >= m.ncols() {
        Ok((thin_svd(m)?, false))
    } else {
        Ok((thin_svd(&m.adjoint())?, true))
    }
}

/// Singular values (nonincreasing) of arbitrary complex storage.
pub(crate) fn raw_singular_values(m: &CMatrix) -> Vec<f64> {
    match thin(m) {
        Ok((t, _)) => t.sigmas,
        Err(_) => vec![f64::NAN; m.nrows().min(m.ncols())],
    }
}

/// Singular value decomposition of a square matrix (Cartan decomposition).
pub fn svd(g: &Mat) -> Result<SvdResult> {
    let n = g.require_square()?;
    g.require_finite()?;
    if n == 0 {
        return Err(Error::Invalid("empty matrix".into()));
    }
    let t = thin_svd(g.data())?;
    Ok(SvdResult {
        sigmas: t.sigmas,
        left: Mat::new(g.field(), t.u),
        right: Mat::new(g.field(), t.v.adjoint()),
    })
}

/// Singular values only (nonincreasing).
pub fn singular_values(g: &Mat) -> Result<Vec<f64>> {
    g.require_finite()?;
    Ok(thin(g.data())?.0.sigmas)
}

/// Relative singular-value threshold below which a square matrix counts as singular.
const SINGULAR_RTOL: f64 = 1e-14;

fn require_invertible(g: &Mat) -> Result<()> {
    let s = singular_values(g)?;
    let (top, bottom) = (s[0], s[s.len() - 1]);
    if top == 0.0 || bottom <= SINGULAR_RTOL * top {
        return Err(Error::Singular);
    }
    Ok(())
}

/// Eigenvalues of a square complex matrix via the complex Schur form.
pub(crate) fn eigenvalues(m: &CMatrix) -> Result<Vec<C64>> {
    let n = m.nrows();
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let scaled = m / c(scale);
    let schur = Schur::try_new(scaled, f64::EPSILON, 100_000).ok_or(Error::NoConvergence)?;
    let (_, t) = schur.unpack();
    let mut out = Vec::with_capacity(n);
    let mut i = 0;
    while i < n {
        let sub = if i + 1 < n { t[(i + 1, i)].norm() } else { 0.0 };
        let local = t[(i, i)].norm() + if i + 1 < n { t[(i + 1, i + 1)].norm() } else { 0.0 };
        if i + 1 < n && sub > 1e-14 * local.max(1e-300) {
            // Unreduced 2x2 block: eigenvalues from the characteristic quadratic.
            let (a, b, cc, d) = (t[(i, i)], t[(i, i + 1)], t[(i + 1, i)], t[(i + 1, i + 1)]);
            let tr = a + d;
            let det = a * d - b * cc;
            let disc = (tr * tr - det * 4.0).sqrt();
            out.push((tr + disc) * 0.5 * scale);
            out.push((tr - disc) * 0.5 * scale);
            i += 2;
        } else {
            out.push(t[(i, i)] * scale);
            i += 1;
        }
    }
    Ok(out)
}

/// Moduli of eigenvalues, nonincreasing.
pub fn moduli_of_eigenvalues(g: &Mat) -> Result<Vec<f64>> {
    g.require_square()?;
    require_invertible(g)?;
    let mut m: Vec<f64> = eigenvalues(g.data())?.iter().map(|z| z.norm()).collect();
    m.sort_by(|a, b| b.total_cmp(a));
    Ok(m)
}

/// The `i`-plane `k_g <e_1, ..., e_i>` of the Cartan decomposition.
///
/// Refused with [`Error::GapTooSmall`] unless `sigma_i / sigma_{i+1} > 1 + gap_tol`.
pub fn cartan_attractor(g: &Mat, i: usize, gap_tol: f64) -> Result<Subspace> {
    let n = g.require_square()?;
    if i == 0 || i >= n {
        return Err(Error::IndexOutOfRange { index: i, lo: 1, hi: n.saturating_sub(1) });
    }
    let s = svd(g)?;
    let ratio = s.gap_ratio(i);
    if !(ratio > 1.0 + gap_tol) {
        return Err(Error::GapTooSmall { index: i, ratio, tol: gap_tol });
    }
    let frame = s.left.data().columns(0, i).into_owned();
    Ok(Subspace::from_orthonormal(frame, g.field()))
}

/// Numeric rank: number of singular values above `rel_tol * sigma_1`.
pub fn numeric_rank(m: &CMatrix, rel_tol: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let s = raw_singular_values(m);
    if s[0] == 0.0 {
        return 0;
    }
    s.iter().filter(|&&x| x > rel_tol * s[0]).count()
}

/// Orthonormal basis of the column span (singular values above `rel_tol * sigma_1`).
pub fn orthonormal_columns(m: &CMatrix, rel_tol: f64) -> CMatrix {
    let rows = m.nrows();
    if m.ncols() == 0 || rows == 0 {
        return CMatrix::zeros(rows, 0);
    }
    let Ok((t, wide)) = thin(m) else {
        return CMatrix::zeros(rows, 0);
    };
    let top = t.sigmas[0];
    if !(top > 0.0) {
        return CMatrix::zeros(rows, 0);
    }
    let keep = t.sigmas.iter().take_while(|&&s| s > rel_tol * top).count();
    let left = if wide { &t.v } else { &t.u };
    left.columns(0, keep).into_owned()
}

/// Orthonormal basis of the (numerical) kernel: right singular vectors with
/// singular value at most `rel_tol * sigma_1`.
pub fn null_space(m: &CMatrix, rel_tol: f64) -> CMatrix {
    let n = m.ncols();
    if n == 0 {
        return CMatrix::zeros(0, 0);
    }
    // Pad wide matrices with zero rows so the right frame is complete.
    let padded = if m.nrows() < n {
        let mut p = CMatrix::zeros(n, n);
        p.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let Ok(t) = thin_svd(&padded) else {
        return CMatrix::zeros(n, 0);
    };
    let top = t.sigmas[0];
    let keep: Vec<usize> = (0..n).filter(|&p| t.sigmas[p] <= rel_tol * top).collect();
    CMatrix::from_fn(n, keep.len(), |i, j| t.v[(i, keep[j])])
}

/// Right singular vector of the smallest singular value of a square matrix.
pub(crate) fn smallest_right_singular_vector(m: &CMatrix) -> Result<super::CVector> {
    let t = thin_svd(m)?;
    Ok(t.v.column(m.ncols() - 1).into_owned())
}
