use serde::{Deserialize, Serialize};

use super::exact::RatMat;
use super::word::{FactorSpec, FreeProduct, Letter, Word};
use crate::error::{Error, Result};
use crate::linalg::{singular_values, Field, Mat};

/// Entrywise tolerance (relative to max(1, |x|)) between float and exact generator data.
pub const EXACT_AGREEMENT_TOL: f64 = 1e-12;

const RESCALE_ABOVE: f64 = 1e150;
const RESCALE_BELOW: f64 = 1e-150;

#[derive(Clone, Debug, PartialEq)]
pub struct Generator {
    pub label: String,
    pub matrix: Mat,
    pub exact: Option<RatMat>,
}

impl Generator {
    pub fn new(label: impl Into<String>, matrix: Mat) -> Self {
        Self { label: label.into(), matrix, exact: None }
    }

    pub fn exact(label: impl Into<String>, exact: RatMat) -> Self {
        Self { label: label.into(), matrix: exact.to_mat(), exact: Some(exact) }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Factor {
    pub name: String,
    pub generators: Vec<Generator>,
}

impl Factor {
    pub fn new(name: impl Into<String>, generators: Vec<Generator>) -> Self {
        Self { name: name.into(), generators }
    }
}

/// A matrix stored as `exp(log_scale) * mat`, used to evaluate long words without overflow.
#[derive(Clone, Debug)]
pub struct ScaledMat {
    pub mat: Mat,
    pub log_scale: f64,
}

impl ScaledMat {
    pub fn identity(n: usize, field: Field) -> Self {
        Self { mat: Mat::identity(n, field), log_scale: 0.0 }
    }

    /// `self * rhs`, renormalized when the largest entry leaves `[1e-150, 1e150]`.
    pub fn times(&self, rhs: &Mat) -> ScaledMat {
        let field = self.mat.field().join(rhs.field());
        let prod = self.mat.data() * rhs.data();
        let mut out = ScaledMat { mat: Mat::new(field, prod), log_scale: self.log_scale };
        out.renormalize();
        out
    }

    fn renormalize(&mut self) {
        // Largest entry modulus; squaring (as in the Frobenius norm) would overflow here.
        let n = self.mat.data().iter().map(|z| z.norm()).fold(0.0, f64::max);
        if n > RESCALE_ABOVE || (n < RESCALE_BELOW && n > 0.0) {
            self.mat = self.mat.scale(crate::linalg::C64::new(1.0 / n, 0.0));
            self.log_scale += n.ln();
        }
    }

    /// Natural logs of the singular values, nonincreasing.
    pub fn log_singular_values(&self) -> Result<Vec<f64>> {
        Ok(singular_values(&self.mat)?.into_iter().map(|s| s.ln() + self.log_scale).collect())
    }

    /// Back to an ordinary matrix (may overflow to infinity for huge scales).
    pub fn to_mat(&self) -> Mat {
        if self.log_scale == 0.0 {
            return self.mat.clone();
        }
        self.mat.scale(crate::linalg::C64::new(self.log_scale.exp(), 0.0))
    }
}

/// A representation of a free product: generator matrices for every factor.
#[derive(Clone, Debug)]
pub struct Rep {
    group: FreeProduct,
    factors: Vec<Factor>,
    dim: usize,
    field: Field,
    inverses: Vec<Vec<Mat>>,
}

impl PartialEq for Rep {
    fn eq(&self, other: &Self) -> bool {
        self.factors == other.factors && self.field == other.field
    }
}

impl Rep {
    /// Validates dimensions, invertibility and exact/float agreement.
    pub fn new(factors: Vec<Factor>) -> Result<Self> {
        Self::with_field(factors, None)
    }

    pub fn with_field(factors: Vec<Factor>, declared: Option<Field>) -> Result<Self> {
        let group = FreeProduct::new(
            factors
                .iter()
                .map(|f| FactorSpec {
                    name: f.name.clone(),
                    generators: f.generators.iter().map(|g| g.label.clone()).collect(),
                })
                .collect(),
        )?;
        let dim = factors[0].generators[0].matrix.rows();
        let mut field = Field::Real;
        let mut inverses = Vec::with_capacity(factors.len());
        for f in &factors {
            let mut inv = Vec::with_capacity(f.generators.len());
            for g in &f.generators {
                let n = g.matrix.require_square()?;
                if n != dim {
                    return Err(Error::DimensionMismatch(format!(
                        "generator {:?} of factor {:?} is {n}x{n}, expected {dim}x{dim}",
                        g.label, f.name
                    )));
                }
                g.matrix.require_finite()?;
                field = field.join(g.matrix.field());
                if let Some(ex) = &g.exact {
                    if ex.rows() != dim || ex.cols() != dim {
                        return Err(Error::DimensionMismatch(format!(
                            "exact matrix of {:?} is {}x{}, expected {dim}x{dim}",
                            g.label,
                            ex.rows(),
                            ex.cols()
                        )));
                    }
                    let diff = ex.max_abs_diff(&g.matrix);
                    if !(diff <= EXACT_AGREEMENT_TOL) {
                        return Err(Error::Invalid(format!(
                            "float and exact matrices of {:?} disagree by {diff:e}",
                            g.label
                        )));
                    }
                }
                let i = g.matrix.inverse().map_err(|_| {
                    Error::Invalid(format!("generator {:?} of factor {:?} is singular", g.label, f.name))
                })?;
                inv.push(i);
            }
            inverses.push(inv);
        }
        if let Some(decl) = declared {
            if decl == Field::Real && field == Field::Complex {
                return Err(Error::Invalid("field is \"R\" but some generator has complex entries".into()));
            }
            field = decl;
        }
        let factors = factors
            .into_iter()
            .map(|f| Factor {
                name: f.name,
                generators: f
                    .generators
                    .into_iter()
                    .map(|g| Generator { matrix: Mat::new(field, g.matrix.into_data()), ..g })
                    .collect(),
            })
            .collect();
        let inverses = inverses
            .into_iter()
            .map(|v: Vec<Mat>| v.into_iter().map(|m| Mat::new(field, m.into_data())).collect())
            .collect();
        Ok(Self { group, factors, dim, field, inverses })
    }

    /// Cyclic factors, one generator each.
    pub fn cyclic(mats: Vec<Mat>) -> Result<Self> {
        let factors = mats
            .into_iter()
            .enumerate()
            .map(|(i, m)| Factor::new(format!("F{}", i + 1), vec![Generator::new(format!("g{}", i + 1), m)]))
            .collect();
        Self::new(factors)
    }

    /// Cyclic factors with exact rational generators.
    pub fn cyclic_exact(mats: Vec<RatMat>) -> Result<Self> {
        let factors = mats
            .into_iter()
            .enumerate()
            .map(|(i, m)| Factor::new(format!("F{}", i + 1), vec![Generator::exact(format!("g{}", i + 1), m)]))
            .collect();
        Self::new(factors)
    }

    /// Every generator sent to the identity.
    pub fn trivial(group: &FreeProduct, dim: usize) -> Self {
        let factors = group
            .factors()
            .iter()
            .map(|f| {
                Factor::new(
                    f.name.clone(),
                    f.generators
                        .iter()
                        .map(|l| Generator::exact(l.clone(), RatMat::identity(dim)))
                        .collect(),
                )
            })
            .collect();
        Self::new(factors).expect("identity generators are valid")
    }

    pub fn group(&self) -> &FreeProduct {
        &self.group
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn has_exact(&self) -> bool {
        self.factors.iter().all(|f| f.generators.iter().all(|g| g.exact.is_some()))
    }

    pub fn letter_matrix(&self, l: Letter) -> &Mat {
        if l.inverse {
            &self.inverses[l.factor][l.gen]
        } else {
            &self.factors[l.factor].generators[l.gen].matrix
        }
    }

    /// Ordered product of generator matrices; the identity word gives `I` exactly.
    pub fn evaluate(&self, w: &Word) -> Result<Mat> {
        self.group.check_word(w)?;
        let mut acc = Mat::identity(self.dim, self.field);
        for &l in w.letters() {
            acc = Mat::new(self.field, acc.data() * self.letter_matrix(l).data());
        }
        Ok(acc)
    }

    /// As [`Rep::evaluate`], factoring out the scale whenever a prefix norm exceeds 1e150.
    pub fn evaluate_scaled(&self, w: &Word) -> Result<ScaledMat> {
        self.group.check_word(w)?;
        let mut acc = ScaledMat::identity(self.dim, self.field);
        for &l in w.letters() {
            acc = acc.times(self.letter_matrix(l));
        }
        Ok(acc)
    }

    /// The representation restricted to a subset of factors (in the given order).
    pub fn restrict(&self, factor_indices: &[usize]) -> Result<Rep> {
        let mut factors = Vec::new();
        for &i in factor_indices {
            factors.push(
                self.factors
                    .get(i)
                    .cloned()
                    .ok_or(Error::IndexOutOfRange { index: i, lo: 0, hi: self.factors.len().saturating_sub(1) })?,
            );
        }
        Rep::with_field(factors, Some(self.field))
    }

    /// Applies `f` to every generator matrix (and drops exact data unless `exact_map` is given).
    pub fn map_generators(
        &self,
        f: impl Fn(&Mat) -> Result<Mat>,
        exact_map: Option<&dyn Fn(&RatMat) -> Result<RatMat>>,
    ) -> Result<Rep> {
        let mut factors = Vec::new();
        for fac in &self.factors {
            let mut gens = Vec::new();
            for g in &fac.generators {
                let matrix = f(&g.matrix)?;
                let exact = match (exact_map, &g.exact) {
                    (Some(em), Some(ex)) => Some(em(ex)?),
                    _ => None,
                };
                gens.push(Generator { label: g.label.clone(), matrix, exact });
            }
            factors.push(Factor { name: fac.name.clone(), generators: gens });
        }
        Rep::new(factors)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(RepDoc::from(self)).expect("rep serializes")
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&RepDoc::from(self)).expect("rep serializes")
    }

    pub fn from_json_str(s: &str) -> Result<Rep> {
        let doc: RepDoc = serde_json::from_str(s)?;
        doc.into_rep()
    }

    pub fn from_json_value(v: serde_json::Value) -> Result<Rep> {
        let doc: RepDoc = serde_json::from_value(v)?;
        doc.into_rep()
    }
}

impl Serialize for Rep {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RepDoc::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Rep {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        RepDoc::deserialize(d)?.into_rep().map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GenDoc {
    label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    matrix: Option<Mat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    exact: Option<RatMat>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FactorDoc {
    name: String,
    generators: Vec<GenDoc>,
}

/// On-disk representation document. `run_config` is accepted and ignored on input.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RepDoc {
    #[serde(default)]
    field: Option<Field>,
    dim: usize,
    factors: Vec<FactorDoc>,
    #[serde(default, skip_serializing)]
    #[allow(dead_code)]
    run_config: Option<serde_json::Value>,
}

impl From<&Rep> for RepDoc {
    fn from(r: &Rep) -> Self {
        RepDoc {
            field: Some(r.field),
            dim: r.dim,
            factors: r
                .factors
                .iter()
                .map(|f| FactorDoc {
                    name: f.name.clone(),
                    generators: f
                        .generators
                        .iter()
                        .map(|g| GenDoc { label: g.label.clone(), matrix: Some(g.matrix.clone()), exact: g.exact.clone() })
                        .collect(),
                })
                .collect(),
            run_config: None,
        }
    }
}

impl RepDoc {
    fn into_rep(self) -> Result<Rep> {
        if self.factors.is_empty() {
            return Err(Error::Invalid("factors: at least one factor is required".into()));
        }
        let mut factors = Vec::new();
        for f in self.factors {
            if f.generators.is_empty() {
                return Err(Error::Invalid(format!("factors[{:?}].generators: empty", f.name)));
            }
            let mut gens = Vec::new();
            for g in f.generators {
                let matrix = match (&g.matrix, &g.exact) {
                    (Some(m), _) => m.clone(),
                    (None, Some(ex)) => ex.to_mat(),
                    (None, None) => {
                        return Err(Error::Invalid(format!(
                            "generator {:?}: one of \"matrix\" or \"exact\" is required",
                            g.label
                        )))
                    }
                };
                if matrix.rows() != self.dim || matrix.cols() != self.dim {
                    return Err(Error::DimensionMismatch(format!(
                        "generator {:?}: matrix is {}x{}, dim is {}",
                        g.label,
                        matrix.rows(),
                        matrix.cols(),
                        self.dim
                    )));
                }
                gens.push(Generator { label: g.label, matrix, exact: g.exact });
            }
            factors.push(Factor { name: f.name, generators: gens });
        }
        Rep::with_field(factors, self.field)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sanov() -> Rep {
        Rep::cyclic_exact(vec![
            RatMat::from_ints(2, 2, &[1, 2, 0, 1]).unwrap(),
            RatMat::from_ints(2, 2, &[1, 0, 2, 1]).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn identity_word_is_exact_identity() {
        let r = sanov();
        assert_eq!(r.evaluate(&Word::identity()).unwrap(), Mat::identity(2, Field::Real));
    }

    #[test]
    fn single_letter_and_fold_oracle() {
        let r = sanov();
        let a = r.group().parse_word("g1").unwrap();
        assert_eq!(r.evaluate(&a).unwrap(), Mat::from_rows(&[&[1.0, 2.0], &[0.0, 1.0]]));
        let w = r.group().parse_word("g1 g2^-1").unwrap();
        let oracle = Mat::from_rows(&[&[1.0, 2.0], &[0.0, 1.0]])
            .try_mul(&Mat::from_rows(&[&[1.0, 0.0], &[-2.0, 1.0]]))
            .unwrap();
        assert!(r.evaluate(&w).unwrap().max_abs_diff(&oracle) < 1e-12);
    }

    #[test]
    fn scaled_evaluation_survives_long_words() {
        let r = Rep::cyclic(vec![Mat::diag(&[1e10, 1e-10])]).unwrap();
        let w = Word::reduce(std::iter::repeat_n(Letter::new(0, 0, false), 40));
        let s = r.evaluate_scaled(&w).unwrap();
        let logs = s.log_singular_values().unwrap();
        assert!((logs[0] - 400.0 * 10f64.ln()).abs() < 1e-9 * logs[0]);
        assert!(r.evaluate(&w).unwrap().norm().is_infinite() || !r.evaluate(&w).unwrap().is_finite());
    }

    #[test]
    fn json_round_trip_and_errors() {
        let r = sanov();
        let text = r.to_json_string();
        let back = Rep::from_json_str(&text).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.to_json_string(), text);

        let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
        v["run_config"] = serde_json::json!({"seed": 1});
        assert!(Rep::from_json_value(v).is_ok());

        let err = Rep::from_json_str(r#"{"dim":2,"factors":[{"name":"A"}]}"#).unwrap_err();
        assert!(err.to_string().contains("generators"), "{err}");
        let err = Rep::from_json_str(
            r#"{"dim":2,"factors":[{"name":"A","generators":[{"label":"a","matrix":{"rows":2,"cols":2,"field":"R","entries":[1,0,0,0]}}]}]}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("singular"), "{err}");
    }

    #[test]
    fn exact_and_float_must_agree() {
        let g = Generator {
            label: "a".into(),
            matrix: Mat::from_rows(&[&[1.0, 2.0], &[0.0, 1.0]]),
            exact: Some(RatMat::from_ints(2, 2, &[1, 3, 0, 1]).unwrap()),
        };
        assert!(Rep::new(vec![Factor::new("A", vec![g])]).is_err());
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let err = Rep::cyclic(vec![Mat::diag(&[2.0, 0.5]), Mat::diag(&[2.0, 1.0, 0.5])]).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch(_)));
    }
}
