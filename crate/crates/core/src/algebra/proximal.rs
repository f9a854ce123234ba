use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, smallest_right_singular_vector, vnorm, CMatrix, CVector, Mat, Subspace, C64};
use crate::thresholds::Thresholds;

/// Attracting line and repelling hyperplane of `w` and of `w^-1`.
#[derive(Clone, Debug)]
pub struct ProximalData {
    pub x_plus: Subspace,
    pub v_minus: Subspace,
    pub x_minus: Subspace,
    pub v_plus: Subspace,
    /// `|lambda_1| / |lambda_2|` and `|lambda_{q-1}| / |lambda_q|`.
    pub ratios: (f64, f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProximalDoc {
    pub x_plus: Vec<[f64; 2]>,
    pub v_minus_normal: Vec<[f64; 2]>,
    pub x_minus: Vec<[f64; 2]>,
    pub v_plus_normal: Vec<[f64; 2]>,
    pub ratio_top: f64,
    pub ratio_bottom: f64,
}

fn pairs(v: &CVector) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

impl ProximalData {
    pub fn to_doc(&self) -> Result<ProximalDoc> {
        Ok(ProximalDoc {
            x_plus: pairs(&self.x_plus.unit_vector()),
            v_minus_normal: pairs(&self.v_minus.normal()?),
            x_minus: pairs(&self.x_minus.unit_vector()),
            v_plus_normal: pairs(&self.v_plus.normal()?),
            ratio_top: self.ratios.0,
            ratio_bottom: self.ratios.1,
        })
    }
}

fn unit(v: CVector) -> CVector {
    let n = vnorm(&v);
    v / C64::new(n, 0.0)
}

/// Eigenvector of `m` for the simple eigenvalue `lambda`.
fn eigenvector(m: &CMatrix, lambda: C64) -> Result<CVector> {
    let n = m.nrows();
    Ok(unit(smallest_right_singular_vector(&(m - CMatrix::identity(n, n) * lambda))?))
}

/// Line and invariant complementary hyperplane for the simple eigenvalue `lambda` of `m`.
///
/// The hyperplane is the kernel of the left eigenvector `l` (`l^T m = lambda l^T`),
/// so its Hermitian normal is `conj(l)`.
fn line_and_hyperplane(m: &CMatrix, lambda: C64) -> Result<(Subspace, Subspace)> {
    let x = eigenvector(m, lambda)?;
    let l = eigenvector(&m.transpose(), lambda)?;
    let normal = l.map(|z| z.conj());
    Ok((Subspace::line(x)?, Subspace::hyperplane_from_normal(normal)?))
}

/// Fixed-point data of a `{1, q-1}`-proximal matrix.
pub fn proximal_data(w: &Mat, th: &Thresholds) -> Result<ProximalData> {
    let q = w.require_square()?;
    w.require_finite()?;
    if q < 2 {
        return Err(Error::Invalid("proximal data needs q >= 2".into()));
    }
    let mut ev = eigenvalues(w.data())?;
    ev.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
    if ev[q - 1].norm() == 0.0 {
        return Err(Error::Singular);
    }
    let top = ev[0].norm() / ev[1].norm();
    if !(top > 1.0 + th.gap_tol) {
        return Err(Error::NotProximal { which: "1", ratio: top, tol: th.gap_tol });
    }
    let bottom = ev[q - 2].norm() / ev[q - 1].norm();
    if !(bottom > 1.0 + th.gap_tol) {
        return Err(Error::NotProximal { which: "q-1", ratio: bottom, tol: th.gap_tol });
    }
    let (x_plus, v_minus) = line_and_hyperplane(w.data(), ev[0])?;
    let (x_minus, v_plus) = line_and_hyperplane(w.data(), ev[q - 1])?;
    Ok(ProximalData { x_plus, v_minus, x_minus, v_plus, ratios: (top, bottom) })
}

/// 1-proximal `g = I + (lambda - 1) w0 w1^H / <w1, w0>`: eigenvalue `lambda` on `w0`, identity on `w1^perp`.
pub fn rank_one_proximal(w0: &CVector, w1: &CVector, lambda: f64) -> Result<Mat> {
    let n = w0.len();
    if w1.len() != n {
        return Err(Error::DimensionMismatch(format!("omega_0 has length {n}, omega_1 has length {}", w1.len())));
    }
    let ip = crate::linalg::inner(w1, w0);
    if ip.norm() <= 1e-12 * vnorm(w0) * vnorm(w1) {
        return Err(Error::Degenerate("omega_0 lies in omega_1^perp".into()));
    }
    let outer = w0 * w1.adjoint();
    let g = CMatrix::identity(n, n) + outer * (C64::new(lambda - 1.0, 0.0) / ip);
    let real = w0.iter().chain(w1.iter()).all(|z| z.im == 0.0);
    Ok(Mat::new(if real { crate::linalg::Field::Real } else { crate::linalg::Field::Complex }, g))
}
