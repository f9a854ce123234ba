//! Exact rational matrices for freeness checks.

use std::ops::Mul;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, Field, Mat, C64};

/// Dense matrix of arbitrary-precision rationals, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatMat {
    rows: usize,
    cols: usize,
    entries: Vec<BigRational>,
}

/// Parses `p`, `p/q` or a terminating decimal such as `-1.25` exactly.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let t = s.trim();
    let bad = || Error::NonRational(format!("cannot parse {s:?} as a rational"));
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(Error::NonRational(format!("zero denominator in {s:?}")));
        }
        return Ok(BigRational::new(p, q));
    }
    if let Some((int, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = int.starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
        let mut num: BigInt = digits.parse().map_err(|_| bad())?;
        if neg {
            num = -num;
        }
        let den = BigInt::from(10u32).pow(frac.len() as u32);
        return Ok(BigRational::new(num, den));
    }
    let p: BigInt = t.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(p))
}

pub fn format_rational(x: &BigRational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

impl RatMat {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigRational>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "exact matrix {rows}x{cols} needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn from_ints(rows: usize, cols: usize, entries: &[i64]) -> Result<Self> {
        Self::new(rows, cols, entries.iter().map(|&x| BigRational::from_integer(x.into())).collect())
    }

    pub fn from_strs(rows: usize, cols: usize, entries: &[&str]) -> Result<Self> {
        Self::new(rows, cols, entries.iter().map(|s| parse_rational(s)).collect::<Result<_>>()?)
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![BigRational::zero(); n * n];
        for i in 0..n {
            entries[i * n + i] = BigRational::one();
        }
        Self { rows: n, cols: n, entries }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.entries[i * self.cols + j]
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && self.entries.iter().enumerate().all(|(k, x)| {
                if k / self.cols == k % self.cols {
                    x.is_one()
                } else {
                    x.is_zero()
                }
            })
    }

    pub fn to_mat(&self) -> Mat {
        let data = CMatrix::from_fn(self.rows, self.cols, |i, j| {
            C64::new(self.get(i, j).to_f64().unwrap_or(f64::NAN), 0.0)
        });
        Mat::new(Field::Real, data)
    }

    /// Gauss-Jordan inverse.
    pub fn inverse(&self) -> Result<RatMat> {
        if self.rows != self.cols {
            return Err(Error::NonSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        let mut a = self.entries.clone();
        let mut inv = RatMat::identity(n).entries;
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a[r * n + col].is_zero()).ok_or(Error::Singular)?;
            if pivot != col {
                for j in 0..n {
                    a.swap(pivot * n + j, col * n + j);
                    inv.swap(pivot * n + j, col * n + j);
                }
            }
            let p = a[col * n + col].clone();
            for j in 0..n {
                a[col * n + j] = &a[col * n + j] / &p;
                inv[col * n + j] = &inv[col * n + j] / &p;
            }
            for r in 0..n {
                if r == col || a[r * n + col].is_zero() {
                    continue;
                }
                let f = a[r * n + col].clone();
                for j in 0..n {
                    let t = &f * &a[col * n + j];
                    a[r * n + j] -= t;
                    let t = &f * &inv[col * n + j];
                    inv[r * n + j] -= t;
                }
            }
        }
        Ok(RatMat { rows: n, cols: n, entries: inv })
    }

    /// Largest absolute entry of `self - m` (as f64), for float/exact agreement checks.
    pub fn max_abs_diff(&self, m: &Mat) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in 0..self.cols {
                let x = self.get(i, j).to_f64().unwrap_or(f64::NAN);
                let z = m.get(i, j);
                let scale = 1.0f64.max(x.abs());
                worst = worst.max(((x - z.re).abs() + z.im.abs()) / scale);
            }
        }
        worst
    }

    pub fn max_abs(&self) -> BigRational {
        self.entries.iter().map(|x| x.abs()).max().unwrap_or_else(BigRational::zero)
    }
}

impl Mul for &RatMat {
    type Output = RatMat;
    fn mul(self, rhs: &RatMat) -> RatMat {
        assert_eq!(self.cols, rhs.rows, "exact matrix product dimension mismatch");
        let (n, m, k) = (self.rows, rhs.cols, self.cols);
        let mut entries = Vec::with_capacity(n * m);
        for i in 0..n {
            for j in 0..m {
                let mut acc = BigRational::zero();
                for t in 0..k {
                    let a = &self.entries[i * k + t];
                    if a.is_zero() {
                        continue;
                    }
                    let b = &rhs.entries[t * m + j];
                    if b.is_zero() {
                        continue;
                    }
                    acc += a * b;
                }
                entries.push(acc);
            }
        }
        RatMat { rows: n, cols: m, entries }
    }
}

#[derive(Serialize, Deserialize)]
struct RatDoc {
    rows: usize,
    cols: usize,
    entries: Vec<String>,
}

impl Serialize for RatMat {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RatDoc { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(format_rational).collect() }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RatMat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let doc = RatDoc::deserialize(d)?;
        let entries = doc
            .entries
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        RatMat::new(doc.rows, doc.cols, entries).map_err(D::Error::custom)
    }
}
