use crate::error::Result;
use crate::linalg::{c, CMatrix, Field, Mat};

/// Orthonormal basis (Frobenius inner product) of the trace-zero `q x q` matrices:
/// `E_ij` for `i != j` in row-major order, then the diagonal matrices
/// `(E_11 + ... + E_kk - k E_{k+1,k+1}) / sqrt(k (k + 1))`, `k = 1..q-1`.
pub fn trace_zero_basis(q: usize) -> Vec<CMatrix> {
    let mut out = Vec::with_capacity(q * q - 1);
    for i in 0..q {
        for j in 0..q {
            if i != j {
                let mut m = CMatrix::zeros(q, q);
                m[(i, j)] = c(1.0);
                out.push(m);
            }
        }
    }
    for k in 1..q {
        let s = 1.0 / ((k * (k + 1)) as f64).sqrt();
        let mut m = CMatrix::zeros(q, q);
        for t in 0..k {
            m[(t, t)] = c(s);
        }
        m[(k, k)] = c(-(k as f64) * s);
        out.push(m);
    }
    out
}

/// Matrix of `X -> g X g^-1` on the trace-zero matrices in [`trace_zero_basis`].
pub fn adjoint_rep(g: &Mat) -> Result<Mat> {
    let q = g.require_square()?;
    let g_inv = g.inverse()?;
    let basis = trace_zero_basis(q);
    let n = basis.len();
    let images: Vec<CMatrix> = basis.iter().map(|b| g.data() * b * g_inv.data()).collect();
    let mut ad = CMatrix::zeros(n, n);
    for (b, img) in images.iter().enumerate() {
        for (a, ba) in basis.iter().enumerate() {
            // tr(B_a^H Y) = sum conj(B_a) .* Y
            ad[(a, b)] = ba.iter().zip(img.iter()).map(|(x, y)| x.conj() * y).sum();
        }
    }
    Ok(Mat::new(if g.field() == Field::Real { Field::Real } else { Field::Complex }, ad))
}
