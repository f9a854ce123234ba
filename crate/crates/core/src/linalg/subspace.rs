use super::decomp::{orthonormal_columns, raw_singular_values};
use super::{c, inner, vnorm, CMatrix, CVector, Field};
use crate::error::{Error, Result};

/// Relative rank cutoff used when building frames from spanning vectors.
const SPAN_RTOL: f64 = 1e-10;

/// A linear subspace of `K^d`, stored as an orthonormal frame (columns).
#[derive(Clone, Debug)]
pub struct Subspace {
    frame: CMatrix,
    field: Field,
}

impl Subspace {
    /// Trusts that `frame` has orthonormal columns.
    pub fn from_orthonormal(frame: CMatrix, field: Field) -> Self {
        Self { frame, field }
    }

    /// Span of the given columns; they must be linearly independent.
    pub fn from_columns(cols: &CMatrix) -> Result<Self> {
        let frame = orthonormal_columns(cols, SPAN_RTOL);
        if frame.ncols() != cols.ncols() {
            return Err(Error::Degenerate(format!(
                "{} spanning vectors have rank {}",
                cols.ncols(),
                frame.ncols()
            )));
        }
        let field = if cols.iter().all(|z| z.im == 0.0) { Field::Real } else { Field::Complex };
        Ok(Self { frame, field })
    }

    /// Span of arbitrary vectors (rank taken numerically).
    pub fn span(ambient: usize, vectors: &[CVector]) -> Self {
        let cols = CMatrix::from_fn(ambient, vectors.len(), |i, j| vectors[j][i]);
        let frame = orthonormal_columns(&cols, SPAN_RTOL);
        let field = if cols.iter().all(|z| z.im == 0.0) { Field::Real } else { Field::Complex };
        Self { frame, field }
    }

    pub fn line(v: CVector) -> Result<Self> {
        let n = vnorm(&v);
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::Degenerate("zero vector does not span a line".into()));
        }
        let field = if v.iter().all(|z| z.im == 0.0) { Field::Real } else { Field::Complex };
        let d = v.len();
        Ok(Self { frame: CMatrix::from_column_slice(d, 1, (v / c(n)).as_slice()), field })
    }

    pub fn real_line(v: &[f64]) -> Result<Self> {
        Self::line(CVector::from_iterator(v.len(), v.iter().map(|&x| c(x))))
    }

    /// `span(e_i : i in indices)` (0-based indices).
    pub fn coordinate(ambient: usize, indices: &[usize], field: Field) -> Self {
        let frame = CMatrix::from_fn(ambient, indices.len(), |i, j| c(if indices[j] == i { 1.0 } else { 0.0 }));
        Self { frame, field }
    }

    /// The hyperplane `u^perp`.
    pub fn hyperplane_from_normal(u: CVector) -> Result<Self> {
        Ok(Self::line(u)?.orthogonal_complement())
    }

    pub fn ambient_dim(&self) -> usize {
        self.frame.nrows()
    }

    pub fn dim(&self) -> usize {
        self.frame.ncols()
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn frame(&self) -> &CMatrix {
        &self.frame
    }

    /// Unit representative of a line (first frame column).
    pub fn unit_vector(&self) -> CVector {
        self.frame.column(0).into_owned()
    }

    pub fn projector(&self) -> CMatrix {
        &self.frame * self.frame.adjoint()
    }

    pub fn orthogonal_complement(&self) -> Subspace {
        let d = self.ambient_dim();
        let q = CMatrix::identity(d, d) - self.projector();
        let frame = orthonormal_columns(&q, 1e-8);
        Subspace { frame, field: self.field }
    }

    /// Component of `v` orthogonal to the subspace.
    pub fn reject(&self, v: &CVector) -> CVector {
        v - &self.frame * (self.frame.adjoint() * v)
    }

    /// Unit normal of a hyperplane.
    pub fn normal(&self) -> Result<CVector> {
        if self.dim() + 1 != self.ambient_dim() {
            return Err(Error::DimensionMismatch(format!(
                "normal of a {}-dimensional subspace of K^{}",
                self.dim(),
                self.ambient_dim()
            )));
        }
        Ok(self.orthogonal_complement().unit_vector())
    }

    /// Image under a linear map (must stay of the same dimension).
    pub fn image(&self, m: &CMatrix) -> Result<Subspace> {
        Subspace::from_columns(&(m * &self.frame))
    }

    /// Largest principal angle between equal-dimensional subspaces.
    pub fn max_principal_angle(&self, other: &Subspace) -> Result<f64> {
        if self.ambient_dim() != other.ambient_dim() || self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!(
                "principal angles between dim {} and dim {} subspaces of K^{} / K^{}",
                self.dim(),
                other.dim(),
                self.ambient_dim(),
                other.ambient_dim()
            )));
        }
        if self.dim() == 0 {
            return Ok(0.0);
        }
        let resid = &other.frame - &self.frame * (self.frame.adjoint() * &other.frame);
        let s = raw_singular_values(&resid)[0].min(1.0);
        Ok(s.asin())
    }

    /// Frame-independent equality up to a principal-angle tolerance.
    pub fn same_as(&self, other: &Subspace, tol: f64) -> bool {
        self.max_principal_angle(other).map(|a| a <= tol).unwrap_or(false)
    }

    pub fn contains_vector(&self, v: &CVector, tol: f64) -> bool {
        vnorm(&self.reject(v)) <= tol * vnorm(v)
    }
}

/// A `(1, d-1)` partial flag: a line together with a hyperplane.
#[derive(Clone, Debug)]
pub struct Flag {
    pub line: Subspace,
    pub hyperplane: Subspace,
}

impl Flag {
    pub fn new(line: Subspace, hyperplane: Subspace) -> Result<Self> {
        let d = line.ambient_dim();
        if line.dim() != 1 || hyperplane.ambient_dim() != d || hyperplane.dim() + 1 != d {
            return Err(Error::DimensionMismatch(format!(
                "flag needs a line and a hyperplane in the same K^d (got dims {}/{} in K^{}/K^{})",
                line.dim(),
                hyperplane.dim(),
                d,
                hyperplane.ambient_dim()
            )));
        }
        Ok(Self { line, hyperplane })
    }

    pub fn ambient_dim(&self) -> usize {
        self.line.ambient_dim()
    }
}

/// Angle metric between unit vectors: `sqrt(1 - |<v1, v2>|^2)`, computed as
/// the norm of the component of `v2` orthogonal to `v1`.
pub fn unit_line_distance(v1: &CVector, v2: &CVector) -> f64 {
    let p = inner(v1, v2);
    let resid = v2 - v1 * p;
    vnorm(&resid).min(1.0)
}

/// Distance from the unit vector `v` to `P(W)`: the norm of its component in `W^perp`.
pub fn unit_subspace_distance(v: &CVector, w_frame: &CMatrix) -> f64 {
    let coeffs = w_frame.adjoint() * v;
    let resid = v - w_frame * coeffs;
    vnorm(&resid).min(1.0)
}

fn require_line(x: &Subspace, what: &str) -> Result<()> {
    if x.dim() != 1 {
        return Err(Error::DimensionMismatch(format!("{what} must be a line, got dim {}", x.dim())));
    }
    Ok(())
}

/// `d_P([v1], [v2])` for lines.
pub fn proj_metric(x: &Subspace, y: &Subspace) -> Result<f64> {
    require_line(x, "x")?;
    require_line(y, "y")?;
    if x.ambient_dim() != y.ambient_dim() {
        return Err(Error::DimensionMismatch(format!(
            "lines in K^{} and K^{}",
            x.ambient_dim(),
            y.ambient_dim()
        )));
    }
    Ok(unit_line_distance(&x.unit_vector(), &y.unit_vector()))
}

/// `dist([v], P(W)) = inf_{y in P(W)} d_P([v], y)`, via orthogonal projection onto `W^perp`.
pub fn dist_to_subspace(x: &Subspace, w: &Subspace) -> Result<f64> {
    require_line(x, "x")?;
    if x.ambient_dim() != w.ambient_dim() {
        return Err(Error::DimensionMismatch(format!(
            "line in K^{} vs subspace of K^{}",
            x.ambient_dim(),
            w.ambient_dim()
        )));
    }
    if w.dim() >= w.ambient_dim() {
        return Err(Error::Degenerate("distance to the whole projective space is identically 0".into()));
    }
    Ok(unit_subspace_distance(&x.unit_vector(), w.frame()))
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::linalg::random::random_unit_vector;
    use crate::linalg::C64;

    fn e(d: usize, i: usize) -> Subspace {
        Subspace::coordinate(d, &[i], Field::Real)
    }

    #[test]
    fn proj_metric_examples() {
        assert_eq!(proj_metric(&e(2, 0), &e(2, 0)).unwrap(), 0.0);
        assert!((proj_metric(&e(2, 0), &e(2, 1)).unwrap() - 1.0).abs() < 1e-15);
        let diag = Subspace::real_line(&[1.0, 1.0]).unwrap();
        assert!((proj_metric(&e(2, 0), &diag).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
        assert!(proj_metric(&e(2, 0), &e(3, 0)).is_err());
    }

    #[test]
    fn proj_metric_is_a_metric_on_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for field in [Field::Real, Field::Complex] {
            for d in 2..6 {
                for _ in 0..200 {
                    let a = random_unit_vector(&mut rng, d, field);
                    let b = random_unit_vector(&mut rng, d, field);
                    let cc = random_unit_vector(&mut rng, d, field);
                    let ab = unit_line_distance(&a, &b);
                    let ba = unit_line_distance(&b, &a);
                    let bc = unit_line_distance(&b, &cc);
                    let ac = unit_line_distance(&a, &cc);
                    assert!((ab - ba).abs() < 1e-12);
                    assert!((0.0..=1.0).contains(&ab));
                    assert!(ac <= ab + bc + 1e-9);
                    // Phase invariance of the projective metric.
                    let phase = C64::from_polar(1.0, 0.7);
                    assert!(unit_line_distance(&(&a * phase), &a) < 1e-12);
                }
            }
        }
    }

    #[test]
    fn dist_to_subspace_examples() {
        let w = Subspace::coordinate(4, &[1, 2, 3], Field::Real);
        assert!((dist_to_subspace(&e(4, 0), &w).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(dist_to_subspace(&e(4, 1), &w).unwrap(), 0.0);
        let full = Subspace::coordinate(2, &[0, 1], Field::Real);
        assert!(matches!(dist_to_subspace(&e(2, 0), &full), Err(Error::Degenerate(_))));
    }

    /// Brute-force oracle: minimise d_P over sampled points of P(W).
    fn brute_force_dist(v: &CVector, w: &Subspace, rng: &mut ChaCha8Rng) -> f64 {
        let mut best = f64::INFINITY;
        for _ in 0..20000 {
            let coeffs = random_unit_vector(rng, w.dim(), w.field());
            let y = w.frame() * coeffs;
            best = best.min(unit_line_distance(v, &y));
        }
        best
    }

    #[test]
    fn dist_to_subspace_matches_sampled_minimum() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let x = Subspace::real_line(&[1.0, 1.0, 0.0]).unwrap();
        let w = Subspace::coordinate(3, &[1, 2], Field::Real);
        let exact = dist_to_subspace(&x, &w).unwrap();
        assert!((exact - 0.5f64.sqrt()).abs() < 1e-15);
        let brute = brute_force_dist(&x.unit_vector(), &w, &mut rng);
        assert!(brute >= exact - 1e-12);
        assert!((brute - exact).abs() < 1e-6, "{brute} vs {exact}");
    }

    #[test]
    fn hyperplane_distance_is_inner_product_with_normal() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..50 {
            let u = random_unit_vector(&mut rng, 4, Field::Complex);
            let v = random_unit_vector(&mut rng, 4, Field::Complex);
            let w = Subspace::hyperplane_from_normal(u.clone()).unwrap();
            let d = dist_to_subspace(&Subspace::line(v.clone()).unwrap(), &w).unwrap();
            assert!((d - inner(&v, &u).norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn principal_angles_are_frame_independent() {
        let a = Subspace::coordinate(3, &[0, 1], Field::Real);
        let cols = CMatrix::from_fn(3, 2, |i, j| c([[1.0, 1.0], [1.0, -1.0], [0.0, 0.0]][i][j]));
        let b = Subspace::from_columns(&cols).unwrap();
        assert!(a.same_as(&b, 1e-12));
        let comp = a.orthogonal_complement();
        assert_eq!(comp.dim(), 1);
        assert!(comp.same_as(&e(3, 2), 1e-12));
    }
}
