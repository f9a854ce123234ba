use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::adjoint::adjoint_rep;
use crate::error::{Error, Result};
use crate::linalg::random::gaussian_vector;
use crate::linalg::{eigenvalues, inner, null_space, orthonormal_columns, smallest_right_singular_vector, vnorm, CMatrix, CVector, Field, Subspace, C64};
use crate::thresholds::Thresholds;
use crate::words::{Letter, Rep};

/// Incrementally orthonormalized set of vectors in `C^n`.
struct SpanBasis {
    tol: f64,
    basis: Vec<CVector>,
}

impl SpanBasis {
    fn new(tol: f64) -> Self {
        Self { tol, basis: Vec::new() }
    }

    /// Adds the direction of `v` if its relative residual exceeds `tol`.
    fn push(&mut self, v: &CVector) -> bool {
        let n = vnorm(v);
        if n == 0.0 || !n.is_finite() {
            return false;
        }
        let mut r = v / C64::new(n, 0.0);
        // Two passes of modified Gram-Schmidt.
        for _ in 0..2 {
            for b in &self.basis {
                let p = inner(b, &r);
                r -= b * p;
            }
        }
        let rn = vnorm(&r);
        if rn <= self.tol {
            return false;
        }
        self.basis.push(r / C64::new(rn, 0.0));
        true
    }

    fn dim(&self) -> usize {
        self.basis.len()
    }
}

fn vec_of(m: &CMatrix) -> CVector {
    CVector::from_column_slice(m.as_slice())
}

fn mat_of(v: &CVector, d: usize) -> CMatrix {
    CMatrix::from_column_slice(d, d, v.as_slice())
}

/// Orthonormal basis (as matrices) of the linear span of all words of length `<= max_len`,
/// plus the span dimension after each length.
///
/// Words of length `k + 1` are `w s` with `|w| = k`, so the span is grown by right-multiplying
/// the current basis by the generators; only basis elements are multiplied.
pub(crate) fn word_span(rep: &Rep, max_len: usize, rank_tol: f64) -> (Vec<CMatrix>, Vec<usize>) {
    let d = rep.dim();
    let letters: Vec<Letter> = rep.group().alphabet();
    let mut span = SpanBasis::new(rank_tol);
    span.push(&vec_of(&CMatrix::identity(d, d)));
    let mut dims = vec![span.dim()];
    let mut frontier = 0;
    for _ in 0..max_len {
        let end = span.dim();
        if end == d * d {
            dims.push(end);
            continue;
        }
        'grow: for k in frontier..end {
            let b = mat_of(&span.basis[k], d);
            for &l in &letters {
                span.push(&vec_of(&(&b * rep.letter_matrix(l).data())));
                if span.dim() == d * d {
                    break 'grow;
                }
            }
        }
        // New basis elements combine words of length exactly one more.
        frontier = end;
        dims.push(span.dim());
    }
    (span.basis.iter().map(|v| mat_of(v, d)).collect(), dims)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BurnsideReport {
    pub span_dim: usize,
    pub d_squared: usize,
    pub max_len: usize,
    /// Span dimension of the words of length `<= k`, `k = 0..=max_len`.
    pub dims_by_length: Vec<usize>,
    pub rank_tol: f64,
}

/// Dimension of the linear span of `{rho(w) : |w| <= max_len}` in `Mat_d`.
pub fn burnside_span_dim(rep: &Rep, max_len: usize, th: &Thresholds) -> Result<BurnsideReport> {
    if max_len == 0 {
        return Err(Error::Invalid("max_len must be at least 1".into()));
    }
    let (basis, dims) = word_span(rep, max_len, th.rank_tol);
    let d = rep.dim();
    Ok(BurnsideReport { span_dim: basis.len(), d_squared: d * d, max_len, dims_by_length: dims, rank_tol: th.rank_tol })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum IrreducibilityVerdict {
    #[serde(rename = "irreducible (certified)")]
    IrreducibleCertified,
    #[serde(rename = "reducible-suspected")]
    ReducibleSuspected,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IrreducibilityReport {
    pub verdict: IrreducibilityVerdict,
    pub span_dim: usize,
    pub d_squared: usize,
    pub max_len: usize,
    pub field: Field,
    /// Orthonormal basis of a proper invariant subspace, columns as `[re, im]` lists.
    pub candidate: Option<Vec<Vec<[f64; 2]>>>,
    pub candidate_dim: Option<usize>,
    /// `max_g |(I - P) g P| / |g|` over generators for the candidate's projector `P`.
    pub invariance_residual: Option<f64>,
    pub caveat: Option<String>,
}

pub const REAL_IRREDUCIBILITY_CAVEAT: &str =
    "a full span over R certifies absolute irreducibility (irreducibility of the complexification), which implies irreducibility over R";

/// Invariant subspace generated by the columns of `s` under the algebra spanned by `basis`.
fn orbit(basis: &[CMatrix], s: &CMatrix, tol: f64) -> CMatrix {
    let d = s.nrows();
    let mut cols = Vec::new();
    for b in basis {
        let img = b * s;
        for j in 0..img.ncols() {
            cols.push(img.column(j).into_owned());
        }
    }
    if cols.is_empty() {
        return CMatrix::zeros(d, 0);
    }
    orthonormal_columns(&CMatrix::from_columns(&cols), tol)
}

/// Eigenspaces of `a`, clustering eigenvalues closer than `tol * max|lambda|`.
fn eigenspaces(a: &CMatrix, tol: f64) -> Result<Vec<CMatrix>> {
    let d = a.nrows();
    let mut ev = eigenvalues(a)?;
    ev.sort_by(|x, y| y.norm().total_cmp(&x.norm()).then(x.re.total_cmp(&y.re)).then(x.im.total_cmp(&y.im)));
    let scale = ev.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
    let mut reps: Vec<C64> = Vec::new();
    for z in ev {
        if reps.iter().all(|r| (r - z).norm() > tol * scale) {
            reps.push(z);
        }
    }
    let mut out = Vec::new();
    for lambda in reps {
        let shifted = a - CMatrix::identity(d, d) * lambda;
        let mut ns = null_space(&shifted, 1e-7);
        if ns.ncols() == 0 {
            ns = CMatrix::from_columns(&[smallest_right_singular_vector(&shifted)?]);
        }
        out.push(ns);
    }
    Ok(out)
}

/// Lexicographic key preferring subspaces that weigh on leading coordinates.
fn projector_key(frame: &CMatrix) -> Vec<f64> {
    (0..frame.nrows()).map(|i| -frame.row(i).iter().map(|z| z.norm_sqr()).sum::<f64>()).collect()
}

fn invariance_residual(rep: &Rep, frame: &CMatrix) -> f64 {
    let d = frame.nrows();
    let p = frame * frame.adjoint();
    let q = CMatrix::identity(d, d) - &p;
    let mut worst: f64 = 0.0;
    for f in rep.factors() {
        for g in &f.generators {
            let m = g.matrix.data();
            let r = (&q * m * &p).norm() / m.norm();
            worst = worst.max(r);
        }
    }
    worst
}

/// Burnside test plus a search for a proper invariant subspace.
///
/// When the span is full the representation is irreducible. Otherwise `trials` random
/// elements of the spanned algebra are diagonalized; the invariant subspaces generated by
/// their eigenspaces (then by single eigenvectors) are collected and the smallest proper
/// one is reported.
pub fn invariant_subspace_refute(rep: &Rep, max_len: usize, trials: usize, seed: u64, th: &Thresholds) -> Result<IrreducibilityReport> {
    if trials == 0 {
        return Err(Error::Invalid("trials must be at least 1".into()));
    }
    if max_len == 0 {
        return Err(Error::Invalid("max_len must be at least 1".into()));
    }
    let d = rep.dim();
    let (basis, _) = word_span(rep, max_len, th.rank_tol);
    let caveat = (rep.field() == Field::Real).then(|| REAL_IRREDUCIBILITY_CAVEAT.to_string());
    let mut report = IrreducibilityReport {
        verdict: IrreducibilityVerdict::IrreducibleCertified,
        span_dim: basis.len(),
        d_squared: d * d,
        max_len,
        field: rep.field(),
        candidate: None,
        candidate_dim: None,
        invariance_residual: None,
        caveat,
    };
    if basis.len() == d * d {
        return Ok(report);
    }
    report.verdict = IrreducibilityVerdict::ReducibleSuspected;
    let adj: Vec<CMatrix> = basis.iter().map(|b| b.adjoint()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut whole: Vec<CMatrix> = Vec::new();
    let mut single: Vec<CMatrix> = Vec::new();
    for _ in 0..trials {
        let coeffs = gaussian_vector(&mut rng, basis.len(), Field::Complex);
        let mut a = CMatrix::zeros(d, d);
        for (c, b) in coeffs.iter().zip(&basis) {
            a += b * *c;
        }
        for (alg, dual) in [(&basis, false), (&adj, true)] {
            let elem = if dual { a.adjoint() } else { a.clone() };
            for es in eigenspaces(&elem, 1e-8)? {
                let complement = |f: CMatrix| if dual { Subspace::from_orthonormal(f, Field::Complex).orthogonal_complement().frame().clone() } else { f };
                let o = orbit(alg, &es, th.rank_tol);
                if o.ncols() > 0 && o.ncols() < d {
                    whole.push(complement(o));
                }
                for j in 0..es.ncols() {
                    let o = orbit(alg, &es.columns(j, 1).into_owned(), th.rank_tol);
                    if o.ncols() > 0 && o.ncols() < d {
                        single.push(complement(o));
                    }
                }
            }
        }
    }
    let pool = if whole.is_empty() { single } else { whole };
    let best = pool.into_iter().min_by(|x, y| {
        x.ncols().cmp(&y.ncols()).then_with(|| {
            projector_key(x).partial_cmp(&projector_key(y)).unwrap_or(std::cmp::Ordering::Equal)
        })
    });
    if let Some(frame) = best {
        report.invariance_residual = Some(invariance_residual(rep, &frame));
        report.candidate_dim = Some(frame.ncols());
        report.candidate = Some(
            (0..frame.ncols())
                .map(|j| frame.column(j).iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        );
    }
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DensityVerdict {
    #[serde(rename = "dense (heuristic)")]
    DenseHeuristic,
    #[serde(rename = "not dense")]
    NotDense,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub verdict: DensityVerdict,
    pub ad_span_dim: usize,
    pub target: usize,
    pub max_len: usize,
    pub caveat: String,
}

pub const DENSITY_CAVEAT: &str =
    "heuristic: a finite-ball Burnside test of the adjoint image, not a Zariski-closure computation";

/// Full Burnside span of the adjoint-composed representation at length `max_len`.
pub fn zariski_density_heuristic(rep: &Rep, max_len: usize, th: &Thresholds) -> Result<DensityReport> {
    for f in rep.factors() {
        for g in &f.generators {
            let det = g.matrix.determinant()?.norm();
            if (det - 1.0).abs() > 1e-8 {
                return Err(Error::Invalid(format!("generator {:?} has |det| = {det}, expected 1", g.label)));
            }
        }
    }
    let ad = rep.map_generators(adjoint_rep, None)?;
    let r = burnside_span_dim(&ad, max_len, th)?;
    let verdict = if r.span_dim == r.d_squared { DensityVerdict::DenseHeuristic } else { DensityVerdict::NotDense };
    Ok(DensityReport { verdict, ad_span_dim: r.span_dim, target: r.d_squared, max_len, caveat: DENSITY_CAVEAT.into() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{families::sanov, make_psi, make_rho, BlockSpec};
    use crate::linalg::Mat;
    use crate::words::{enumerate_ball, FreeProduct};

    fn th() -> Thresholds {
        Thresholds::default()
    }

    /// Oracle: numeric rank of the matrix whose columns are all ball words.
    fn brute_span(rep: &Rep, l: usize) -> usize {
        let words: Vec<_> = enumerate_ball(rep.group(), l).collect();
        let cols: Vec<CVector> = words
            .iter()
            .map(|w| {
                let m = rep.evaluate(w).unwrap();
                let v = vec_of(m.data());
                let n = vnorm(&v);
                v / C64::new(n, 0.0)
            })
            .collect();
        crate::linalg::numeric_rank(&CMatrix::from_columns(&cols), 1e-8)
    }

    #[test]
    fn trivial_and_sanov() {
        let t = Rep::trivial(&FreeProduct::cyclic(2), 3);
        assert_eq!(burnside_span_dim(&t, 3, &th()).unwrap().span_dim, 1);
        let s = sanov();
        let r = burnside_span_dim(&s, 4, &th()).unwrap();
        assert_eq!(r.span_dim, 4);
        assert_eq!(r.span_dim, brute_span(&s, 4));
        assert!(r.dims_by_length.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn block_rho_is_reducible_and_matches_brute_force() {
        let s = sanov();
        let rho = make_rho(&s, &BlockSpec::new(2, 0, 2).unwrap()).unwrap();
        for l in 1..=4 {
            let r = burnside_span_dim(&rho, l, &th()).unwrap();
            assert_eq!(r.span_dim, brute_span(&rho, l), "length {l}");
        }
        assert!(burnside_span_dim(&rho, 4, &th()).unwrap().span_dim < 16);
    }

    #[test]
    fn refute_examples() {
        let s = sanov();
        let r = invariant_subspace_refute(&s, 4, 3, 1, &th()).unwrap();
        assert_eq!(r.verdict, IrreducibilityVerdict::IrreducibleCertified);
        assert!(r.caveat.is_some());

        let diag = Rep::cyclic(vec![Mat::diag(&[2.0, 0.5]), Mat::diag(&[3.0, 1.0 / 3.0])]).unwrap();
        let r = invariant_subspace_refute(&diag, 3, 3, 1, &th()).unwrap();
        assert_eq!(r.verdict, IrreducibilityVerdict::ReducibleSuspected);
        assert_eq!(r.candidate_dim, Some(1));
        let c = &r.candidate.unwrap()[0];
        assert!((c[0][0].hypot(c[0][1]) - 1.0).abs() < 1e-10);
        assert!(r.invariance_residual.unwrap() < 1e-10);

        let psi = make_psi(&s, &BlockSpec::new(2, 0, 2).unwrap()).unwrap();
        let r = invariant_subspace_refute(&psi, 4, 3, 1, &th()).unwrap();
        assert_eq!(r.verdict, IrreducibilityVerdict::ReducibleSuspected);
        assert_eq!(r.candidate_dim, Some(2));
        let cand = r.candidate.unwrap();
        for col in &cand {
            assert!(col[2][0].hypot(col[2][1]) < 1e-10 && col[3][0].hypot(col[3][1]) < 1e-10);
        }
        assert!(r.invariance_residual.unwrap() < 1e-10);
    }

    #[test]
    fn density_examples() {
        let s = sanov();
        assert_eq!(zariski_density_heuristic(&s, 4, &th()).unwrap().verdict, DensityVerdict::DenseHeuristic);
        let rho = make_rho(&s, &BlockSpec::new(2, 0, 2).unwrap()).unwrap();
        assert_eq!(zariski_density_heuristic(&rho, 4, &th()).unwrap().verdict, DensityVerdict::NotDense);
        let cyc = Rep::cyclic(vec![Mat::diag(&[2.0, 0.5])]).unwrap();
        assert_eq!(zariski_density_heuristic(&cyc, 4, &th()).unwrap().verdict, DensityVerdict::NotDense);
        let bad = Rep::cyclic(vec![Mat::diag(&[2.0, 1.0])]).unwrap();
        assert!(zariski_density_heuristic(&bad, 2, &th()).is_err());
    }
}
