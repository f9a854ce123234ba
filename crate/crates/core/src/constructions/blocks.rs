use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, numeric_rank, CMatrix, CVector, Field, Mat};
use crate::words::{Factor, Generator, RatMat, Rep};

/// `p` copies of a `d`-dimensional block plus an `r`-dimensional trivial summand.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockSpec {
    pub p: usize,
    pub r: usize,
    pub d: usize,
}

impl BlockSpec {
    pub fn new(p: usize, r: usize, d: usize) -> Result<Self> {
        let s = Self { p, r, d };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.p < 1 || self.d < 1 {
            return Err(Error::Invalid(format!("block spec needs p >= 1 and d >= 1, got p={} d={}", self.p, self.d)));
        }
        Ok(())
    }

    /// `q = p d + r`.
    pub fn q(&self) -> usize {
        self.p * self.d + self.r
    }
}

fn check_dim(rep: &Rep, spec: &BlockSpec) -> Result<()> {
    spec.validate()?;
    if rep.dim() != spec.d {
        return Err(Error::DimensionMismatch(format!("rep has dimension {}, spec expects d = {}", rep.dim(), spec.d)));
    }
    Ok(())
}

fn exact_block_diag(blocks: &[&RatMat]) -> RatMat {
    let n: usize = blocks.iter().map(|b| b.rows()).sum();
    let mut entries = vec![num_rational::BigRational::from_integer(0.into()); n * n];
    let mut off = 0;
    for b in blocks {
        for i in 0..b.rows() {
            for j in 0..b.cols() {
                entries[(off + i) * n + off + j] = b.get(i, j).clone();
            }
        }
        off += b.rows();
    }
    RatMat::new(n, n, entries).expect("square by construction")
}

/// Replaces each generator `g` by a block-diagonal matrix built from `g`.
fn blockwise(
    rep: &Rep,
    float: impl Fn(&Mat) -> Mat,
    exact: impl Fn(&RatMat) -> RatMat,
) -> Result<Rep> {
    let factors = rep
        .factors()
        .iter()
        .map(|f| {
            Factor::new(
                f.name.clone(),
                f.generators
                    .iter()
                    .map(|g| Generator { label: g.label.clone(), matrix: float(&g.matrix), exact: g.exact.as_ref().map(&exact) })
                    .collect(),
            )
        })
        .collect();
    Rep::with_field(factors, Some(rep.field()))
}

/// `gamma -> diag(I_r, gamma, ..., gamma)` with `p` copies.
pub fn make_rho(rep: &Rep, spec: &BlockSpec) -> Result<Rep> {
    check_dim(rep, spec)?;
    let field = rep.field();
    blockwise(
        rep,
        |g| {
            let id = Mat::identity(spec.r, field);
            let mut blocks: Vec<&Mat> = Vec::new();
            if spec.r > 0 {
                blocks.push(&id);
            }
            blocks.extend(std::iter::repeat_n(g, spec.p));
            Mat::block_diag(&blocks)
        },
        |g| {
            let id = RatMat::identity(spec.r);
            let mut blocks: Vec<&RatMat> = Vec::new();
            if spec.r > 0 {
                blocks.push(&id);
            }
            blocks.extend(std::iter::repeat_n(g, spec.p));
            exact_block_diag(&blocks)
        },
    )
}

/// `gamma -> diag(I_r, I_d, I_{(p-2)d}, gamma)`; requires `p >= 2`.
pub fn make_psi(rep: &Rep, spec: &BlockSpec) -> Result<Rep> {
    check_dim(rep, spec)?;
    if spec.p < 2 {
        return Err(Error::Invalid(format!("psi needs p >= 2, got p = {}", spec.p)));
    }
    let pad = spec.r + (spec.p - 1) * spec.d;
    let field = rep.field();
    blockwise(
        rep,
        |g| Mat::block_diag(&[&Mat::identity(pad, field), g]),
        |g| exact_block_diag(&[&RatMat::identity(pad), g]),
    )
}

/// Free product of `l` copies: copy 1 through `g_1 rho g_1^-1`, copy `i >= 2`
/// through `(g_i w_i) psi (g_i w_i)^-1`.
///
/// Factor `F` of copy `i` is named `G{i}_F`. Exact data is kept only when
/// all conjugators and anchors are given exactly.
pub fn make_phi(rho: &Rep, psi: &Rep, conjugators: &[Mat], anchors: &[Mat]) -> Result<Rep> {
    make_phi_exact(rho, psi, conjugators, anchors, None)
}

/// As [`make_phi`], with optional exact conjugators/anchors `(g, w)`.
pub fn make_phi_exact(
    rho: &Rep,
    psi: &Rep,
    conjugators: &[Mat],
    anchors: &[Mat],
    exact: Option<(&[RatMat], &[RatMat])>,
) -> Result<Rep> {
    let l = conjugators.len();
    if l < 2 {
        return Err(Error::Invalid(format!("phi needs at least 2 conjugators, got {l}")));
    }
    if anchors.len() + 1 != l {
        return Err(Error::Invalid(format!("phi needs {} anchors for {l} conjugators, got {}", l - 1, anchors.len())));
    }
    let q = rho.dim();
    if psi.dim() != q {
        return Err(Error::DimensionMismatch(format!("rho has dimension {q}, psi has {}", psi.dim())));
    }
    for (name, m) in conjugators.iter().map(|m| ("conjugator", m)).chain(anchors.iter().map(|m| ("anchor", m))) {
        if m.rows() != q || m.cols() != q {
            return Err(Error::DimensionMismatch(format!("{name} is {}x{}, expected {q}x{q}", m.rows(), m.cols())));
        }
    }
    let mut factors = Vec::new();
    for i in 0..l {
        let (base, h) = if i == 0 {
            (rho, conjugators[0].clone())
        } else {
            (psi, conjugators[i].try_mul(&anchors[i - 1])?)
        };
        let h_inv = h.inverse()?;
        let hx = match exact {
            Some((gs, ws)) => {
                let hx = if i == 0 { gs[0].clone() } else { &gs[i] * &ws[i - 1] };
                let inv = hx.inverse()?;
                Some((hx, inv))
            }
            None => None,
        };
        for f in base.factors() {
            let gens = f
                .generators
                .iter()
                .map(|g| {
                    let matrix = &(&h * &g.matrix) * &h_inv;
                    let ex = match (&hx, &g.exact) {
                        (Some((a, ai)), Some(e)) => Some(&(a * e) * ai),
                        _ => None,
                    };
                    Generator { label: g.label.clone(), matrix, exact: ex }
                })
                .collect();
            factors.push(Factor::new(format!("G{}_{}", i + 1, f.name), gens));
        }
    }
    Rep::new(factors)
}

/// Dimension of `span{ z v }` for `z` running over the commutant of `rho_{p,r}`:
/// `gl(V_0)` on the trivial summand and `(z_ij I_d)` on the `p` copies.
pub fn centralizer_orbit_dim(spec: &BlockSpec, v: &CVector) -> Result<usize> {
    spec.validate()?;
    let q = spec.q();
    if v.len() != q {
        return Err(Error::DimensionMismatch(format!("vector has length {}, expected q = {q}", v.len())));
    }
    if v.iter().all(|z| z.norm() == 0.0) {
        return Err(Error::Degenerate("zero vector".into()));
    }
    let basis = rho_centralizer_basis(spec, Field::Complex);
    let images: Vec<CVector> = basis.iter().map(|z| z.apply(v)).collect();
    let cols = CMatrix::from_fn(q, images.len(), |i, j| images[j][i]);
    Ok(numeric_rank(&cols, 1e-10))
}

/// Spanning set of the commutant of `rho_{p,r}`: `E_ab` on `V_0` and `E_ij (x) I_d` on the copies.
pub fn rho_centralizer_basis(spec: &BlockSpec, field: Field) -> Vec<Mat> {
    let (p, r, d) = (spec.p, spec.r, spec.d);
    let q = spec.q();
    let mut out = Vec::with_capacity(r * r + p * p);
    for a in 0..r {
        for b in 0..r {
            let mut m = CMatrix::zeros(q, q);
            m[(a, b)] = c(1.0);
            out.push(Mat::new(field, m));
        }
    }
    for i in 0..p {
        for j in 0..p {
            let mut m = CMatrix::zeros(q, q);
            for t in 0..d {
                m[(r + i * d + t, r + j * d + t)] = c(1.0);
            }
            out.push(Mat::new(field, m));
        }
    }
    out
}

/// Spanning set of the commutant of `psi_{p,r}`: `gl` of the first `r + (p-1) d`
/// coordinates together with the identity on the last block.
pub fn psi_centralizer_basis(spec: &BlockSpec, field: Field) -> Result<Vec<Mat>> {
    if spec.p < 2 {
        return Err(Error::Invalid(format!("psi needs p >= 2, got p = {}", spec.p)));
    }
    let q = spec.q();
    let m = spec.r + (spec.p - 1) * spec.d;
    let mut out = Vec::with_capacity(m * m + 1);
    for a in 0..m {
        for b in 0..m {
            let mut z = CMatrix::zeros(q, q);
            z[(a, b)] = c(1.0);
            out.push(Mat::new(field, z));
        }
    }
    let mut z = CMatrix::zeros(q, q);
    for t in m..q {
        z[(t, t)] = c(1.0);
    }
    out.push(Mat::new(field, z));
    Ok(out)
}
