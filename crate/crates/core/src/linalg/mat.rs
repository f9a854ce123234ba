use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{c, CMatrix, CVector, C64};
use crate::error::{Error, Result};

/// Scalar field tag. Real matrices are stored with zero imaginary parts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Field {
    #[serde(rename = "R")]
    Real,
    #[serde(rename = "C")]
    Complex,
}

impl Field {
    /// Smallest field containing both.
    pub fn join(self, other: Field) -> Field {
        if self == Field::Real && other == Field::Real {
            Field::Real
        } else {
            Field::Complex
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Field::Real => "R",
            Field::Complex => "C",
        })
    }
}

/// Dense matrix over a tagged scalar field.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat {
    field: Field,
    data: CMatrix,
}

impl Mat {
    /// Wraps complex storage. For `Field::Real` the imaginary parts are dropped.
    pub fn new(field: Field, mut data: CMatrix) -> Self {
        if field == Field::Real {
            data.iter_mut().for_each(|z| z.im = 0.0);
        }
        Self { field, data }
    }

    pub fn from_complex(data: CMatrix) -> Self {
        Self { field: Field::Complex, data }
    }

    pub fn from_real(data: &DMatrix<f64>) -> Self {
        Self { field: Field::Real, data: data.map(c) }
    }

    /// Real matrix from row slices.
    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let cols = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == cols), "ragged rows");
        Self::from_real(&DMatrix::from_fn(r, cols, |i, j| rows[i][j]))
    }

    /// Complex matrix from a row-major list of `(re, im)` pairs.
    pub fn from_complex_row_major(rows: usize, cols: usize, entries: &[(f64, f64)]) -> Self {
        assert_eq!(entries.len(), rows * cols);
        Self::from_complex(CMatrix::from_fn(rows, cols, |i, j| {
            let (re, im) = entries[i * cols + j];
            C64::new(re, im)
        }))
    }

    pub fn identity(n: usize, field: Field) -> Self {
        Self { field, data: CMatrix::identity(n, n) }
    }

    pub fn zeros(rows: usize, cols: usize, field: Field) -> Self {
        Self { field, data: CMatrix::zeros(rows, cols) }
    }

    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_real(&DMatrix::from_fn(n, n, |i, j| if i == j { values[i] } else { 0.0 }))
    }

    pub fn diag_complex(values: &[C64]) -> Self {
        let n = values.len();
        Self::from_complex(CMatrix::from_fn(n, n, |i, j| if i == j { values[i] } else { C64::new(0.0, 0.0) }))
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn cols(&self) -> usize {
        self.data.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn data(&self) -> &CMatrix {
        &self.data
    }

    pub fn into_data(self) -> CMatrix {
        self.data
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[(i, j)]
    }

    /// Real part, if the matrix is tagged real.
    pub fn to_real(&self) -> Option<DMatrix<f64>> {
        (self.field == Field::Real).then(|| self.data.map(|z| z.re))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Re-tags as complex (no data change).
    pub fn into_complex(self) -> Self {
        Self { field: Field::Complex, data: self.data }
    }

    pub fn require_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows())
        } else {
            Err(Error::NonSquare { rows: self.rows(), cols: self.cols() })
        }
    }

    pub fn require_finite(&self) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::NonFinite)
        }
    }

    pub fn try_mul(&self, rhs: &Mat) -> Result<Mat> {
        if self.cols() != rhs.rows() {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows(),
                self.cols(),
                rhs.rows(),
                rhs.cols()
            )));
        }
        Ok(Mat { field: self.field.join(rhs.field), data: &self.data * &rhs.data })
    }

    pub fn apply(&self, v: &CVector) -> CVector {
        &self.data * v
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Mat {
        Mat { field: self.field, data: self.data.adjoint() }
    }

    pub fn transpose(&self) -> Mat {
        Mat { field: self.field, data: self.data.transpose() }
    }

    pub fn scale(&self, s: C64) -> Mat {
        let field = if s.im == 0.0 { self.field } else { Field::Complex };
        Mat { field, data: &self.data * s }
    }

    /// Inverse by LU; fails if numerically singular.
    pub fn inverse(&self) -> Result<Mat> {
        let n = self.require_square()?;
        if n == 0 {
            return Ok(self.clone());
        }
        let lu = self.data.clone().lu();
        let inv = lu.try_inverse().ok_or(Error::Singular)?;
        if !inv.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::Singular);
        }
        Ok(Mat { field: self.field, data: inv })
    }

    pub fn determinant(&self) -> Result<C64> {
        self.require_square()?;
        Ok(self.data.clone().lu().determinant())
    }

    /// Standard operator (spectral) norm.
    pub fn norm(&self) -> f64 {
        if self.rows() == 0 || self.cols() == 0 {
            return 0.0;
        }
        super::decomp::raw_singular_values(&self.data)[0]
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Mat) -> f64 {
        assert_eq!(self.data.shape(), other.data.shape());
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Block-diagonal assembly.
    pub fn block_diag(blocks: &[&Mat]) -> Mat {
        let rows: usize = blocks.iter().map(|b| b.rows()).sum();
        let cols: usize = blocks.iter().map(|b| b.cols()).sum();
        let field = blocks.iter().fold(Field::Real, |f, b| f.join(b.field));
        let mut data = CMatrix::zeros(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            data.view_mut((r0, c0), (b.rows(), b.cols())).copy_from(&b.data);
            r0 += b.rows();
            c0 += b.cols();
        }
        Mat { field, data }
    }

    /// Conjugate `h * self * h^-1`.
    pub fn conjugate_by(&self, h: &Mat) -> Result<Mat> {
        let h_inv = h.inverse()?;
        h.try_mul(self)?.try_mul(&h_inv)
    }
}

impl Mul for &Mat {
    type Output = Mat;
    fn mul(self, rhs: &Mat) -> Mat {
        self.try_mul(rhs).expect("matrix dimensions agree")
    }
}

impl Add for &Mat {
    type Output = Mat;
    fn add(self, rhs: &Mat) -> Mat {
        Mat { field: self.field.join(rhs.field), data: &self.data + &rhs.data }
    }
}

impl Sub for &Mat {
    type Output = Mat;
    fn sub(self, rhs: &Mat) -> Mat {
        Mat { field: self.field.join(rhs.field), data: &self.data - &rhs.data }
    }
}

// JSON: {"rows":r,"cols":c,"field":"R"|"C","entries":[...]} row-major,
// complex entries as [re, im].

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

#[derive(Serialize, Deserialize)]
struct MatDoc {
    rows: usize,
    cols: usize,
    field: Field,
    entries: Vec<Entry>,
}

impl Serialize for Mat {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut entries = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                let z = self.data[(i, j)];
                entries.push(match self.field {
                    Field::Real => Entry::Real(z.re),
                    Field::Complex => Entry::Complex([z.re, z.im]),
                });
            }
        }
        MatDoc { rows: self.rows(), cols: self.cols(), field: self.field, entries }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Mat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = MatDoc::deserialize(d)?;
        if doc.rows == 0 || doc.cols == 0 {
            return Err(D::Error::custom("matrix must have positive rows and cols"));
        }
        if doc.entries.len() != doc.rows * doc.cols {
            return Err(D::Error::custom(format!(
                "entries: expected {} values for a {}x{} matrix, got {}",
                doc.rows * doc.cols,
                doc.rows,
                doc.cols,
                doc.entries.len()
            )));
        }
        let mut data = CMatrix::zeros(doc.rows, doc.cols);
        for (idx, e) in doc.entries.iter().enumerate() {
            let z = match *e {
                Entry::Real(x) => C64::new(x, 0.0),
                Entry::Complex([re, im]) => {
                    if doc.field == Field::Real && im != 0.0 {
                        return Err(D::Error::custom(format!(
                            "entries[{idx}]: complex value in a real (\"R\") matrix"
                        )));
                    }
                    C64::new(re, im)
                }
            };
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(D::Error::custom(format!("entries[{idx}]: non-finite value")));
            }
            data[(idx / doc.cols, idx % doc.cols)] = z;
        }
        Ok(Mat { field: doc.field, data })
    }
}
