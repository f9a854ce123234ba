use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::burnside::{invariant_subspace_refute, IrreducibilityReport};
use crate::error::{Error, Result};
use crate::linalg::{vnorm, CMatrix, CVector, Mat, C64};
use crate::thresholds::Thresholds;
use crate::words::Rep;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GenericityVerdict {
    Pass,
    Fail,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GenericitySide {
    /// Columns `f_i omega_0`.
    Forward,
    /// Columns `f_i^{-T} conj(omega_1)`.
    Dual,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetRow {
    /// 1-based indices.
    pub subset: Vec<usize>,
    pub abs_det_forward: f64,
    pub abs_det_dual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenericityFailure {
    pub subset: Vec<usize>,
    pub side: GenericitySide,
    pub abs_det: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenericityReport {
    pub verdict: GenericityVerdict,
    pub n: usize,
    pub subsets_checked: usize,
    pub det_tol: f64,
    pub min_abs_det_forward: f64,
    pub min_abs_det_dual: f64,
    /// First failing subset in lexicographic order, forward side before dual.
    pub failure: Option<GenericityFailure>,
    pub table: Vec<DetRow>,
}

impl GenericityReport {
    /// Determinant table as CSV (`subset` is space-separated, 1-based).
    pub fn table_csv(&self) -> String {
        let mut s = String::from("subset,abs_det_forward,abs_det_dual\n");
        for r in &self.table {
            let idx: Vec<String> = r.subset.iter().map(|i| i.to_string()).collect();
            s.push_str(&format!("{},{:e},{:e}\n", idx.join(" "), r.abs_det_forward, r.abs_det_dual));
        }
        s
    }
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub(crate) fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let Some(i) = (0..k).rev().find(|&i| cur[i] < n - k + i) else { break };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
    out
}

/// `|det|` of the matrix with the given columns after scaling each column to unit length.
fn normalized_abs_det(cols: &[&CVector]) -> f64 {
    let n = cols.len();
    let mut m = CMatrix::zeros(n, n);
    for (j, v) in cols.iter().enumerate() {
        let nv = vnorm(v);
        if nv == 0.0 {
            return 0.0;
        }
        m.set_column(j, &(*v / C64::new(nv, 0.0)));
    }
    m.determinant().norm()
}

/// Determinant genericity of `(f_1, ..., f_{2n})` with respect to `(omega_0, omega_1)`.
pub fn genericity_check(fs: &[Mat], omega0: &CVector, omega1: &CVector, th: &Thresholds) -> Result<GenericityReport> {
    if fs.is_empty() || !fs.len().is_multiple_of(2) {
        return Err(Error::Invalid(format!("need 2n matrices, got {}", fs.len())));
    }
    let n = fs.len() / 2;
    for (i, f) in fs.iter().enumerate() {
        if f.rows() != n || f.cols() != n {
            return Err(Error::DimensionMismatch(format!("f_{} is {}x{}, expected {n}x{n}", i + 1, f.rows(), f.cols())));
        }
    }
    if omega0.len() != n || omega1.len() != n {
        return Err(Error::DimensionMismatch(format!("omega vectors must have length {n}")));
    }
    if vnorm(omega0) == 0.0 || vnorm(omega1) == 0.0 {
        return Err(Error::Degenerate("omega_0 and omega_1 must be nonzero".into()));
    }
    let w1bar = omega1.map(|z| z.conj());
    let forward: Vec<CVector> = fs.iter().map(|f| f.apply(omega0)).collect();
    let dual: Vec<CVector> = fs
        .iter()
        .map(|f| Ok(f.inverse()?.transpose().apply(&w1bar)))
        .collect::<Result<_>>()?;
    let table: Vec<DetRow> = subsets(2 * n, n)
        .into_par_iter()
        .map(|s| {
            let fw: Vec<&CVector> = s.iter().map(|&i| &forward[i]).collect();
            let du: Vec<&CVector> = s.iter().map(|&i| &dual[i]).collect();
            DetRow {
                subset: s.iter().map(|i| i + 1).collect(),
                abs_det_forward: normalized_abs_det(&fw),
                abs_det_dual: normalized_abs_det(&du),
            }
        })
        .collect();
    let failure = table.iter().find_map(|r| {
        if r.abs_det_forward <= th.det_tol {
            Some(GenericityFailure { subset: r.subset.clone(), side: GenericitySide::Forward, abs_det: r.abs_det_forward })
        } else if r.abs_det_dual <= th.det_tol {
            Some(GenericityFailure { subset: r.subset.clone(), side: GenericitySide::Dual, abs_det: r.abs_det_dual })
        } else {
            None
        }
    });
    Ok(GenericityReport {
        verdict: if failure.is_none() { GenericityVerdict::Pass } else { GenericityVerdict::Fail },
        n,
        subsets_checked: table.len(),
        det_tol: th.det_tol,
        min_abs_det_forward: table.iter().map(|r| r.abs_det_forward).fold(f64::INFINITY, f64::min),
        min_abs_det_dual: table.iter().map(|r| r.abs_det_dual).fold(f64::INFINITY, f64::min),
        failure,
        table,
    })
}

/// The cyclic representation generated by the conjugates `f_i g f_i^-1`.
pub fn conjugate_family(fs: &[Mat], g: &Mat) -> Result<Rep> {
    let mats = fs.iter().map(|f| g.conjugate_by(f)).collect::<Result<Vec<_>>>()?;
    Rep::cyclic(mats)
}

/// Irreducibility of the conjugate family, via the Burnside span at length `2 n`.
pub fn verify_conjugate_family(fs: &[Mat], g: &Mat, seed: u64, th: &Thresholds) -> Result<IrreducibilityReport> {
    let rep = conjugate_family(fs, g)?;
    invariant_subspace_refute(&rep, 2 * rep.dim(), 2, seed, th)
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::algebra::burnside::IrreducibilityVerdict;
    use crate::algebra::proximal::rank_one_proximal;
    use crate::linalg::random::{gaussian_mat, gaussian_vector};
    use crate::linalg::Field;

    fn th() -> Thresholds {
        Thresholds::default()
    }

    fn e(n: usize, i: usize) -> CVector {
        CVector::from_fn(n, |k, _| C64::new(if k == i { 1.0 } else { 0.0 }, 0.0))
    }

    #[test]
    fn subsets_enumerate_binomials() {
        assert_eq!(subsets(4, 2).len(), 6);
        assert_eq!(subsets(6, 3).len(), 20);
        assert_eq!(subsets(4, 2)[0], vec![0, 1]);
        assert_eq!(subsets(4, 2)[5], vec![2, 3]);
    }

    #[test]
    fn identity_matrices_fail() {
        let fs = vec![Mat::identity(2, Field::Real); 4];
        let r = genericity_check(&fs, &e(2, 0), &e(2, 0), &th()).unwrap();
        assert_eq!(r.verdict, GenericityVerdict::Fail);
        assert_eq!(r.table_csv().lines().count(), 7);
        let f = r.failure.unwrap();
        assert_eq!(f.subset, vec![1, 2]);
        assert_eq!(f.side, GenericitySide::Forward);
        assert!(genericity_check(&fs[..3], &e(2, 0), &e(2, 0), &th()).is_err());
    }

    #[test]
    fn shared_line_fails() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let n = 3;
        let w0 = e(n, 0);
        let mut fs: Vec<Mat> = (0..2 * n).map(|_| gaussian_mat(&mut rng, n, Field::Real)).collect();
        // f_2 and f_5 both send omega_0 onto the same line.
        let target = gaussian_vector(&mut rng, n, Field::Real);
        for (i, s) in [(1, 1.0), (4, -2.0)] {
            let mut m = fs[i].data().clone();
            m.set_column(0, &(&target * C64::new(s, 0.0)));
            fs[i] = Mat::new(Field::Real, m);
        }
        let r = genericity_check(&fs, &w0, &e(n, 1), &th()).unwrap();
        assert_eq!(r.verdict, GenericityVerdict::Fail);
        let f = r.failure.unwrap();
        assert!(f.subset.contains(&2) && f.subset.contains(&5));
        assert_eq!(f.side, GenericitySide::Forward);
    }

    #[test]
    fn random_pass_implies_irreducible_conjugates() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for n in [2, 3] {
            let fs: Vec<Mat> = (0..2 * n).map(|_| gaussian_mat(&mut rng, n, Field::Real)).collect();
            let (w0, w1) = (e(n, 0), e(n, 0));
            let r = genericity_check(&fs, &w0, &w1, &th()).unwrap();
            assert_eq!(r.verdict, GenericityVerdict::Pass);
            let g = rank_one_proximal(&w0, &w1, 3.0).unwrap();
            if n == 2 {
                assert_eq!(g, Mat::diag(&[3.0, 1.0]));
            }
            let irr = verify_conjugate_family(&fs, &g, 1, &th()).unwrap();
            assert_eq!(irr.verdict, IrreducibilityVerdict::IrreducibleCertified);
        }
    }
}
