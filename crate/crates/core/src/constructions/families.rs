use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::words::{RatMat, Rep};

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// The Sanov pair `[[1,2],[0,1]]`, `[[1,0],[2,1]]` as two cyclic factors.
pub fn sanov() -> Rep {
    Rep::cyclic_exact(vec![
        RatMat::from_ints(2, 2, &[1, 2, 0, 1]).expect("2x2"),
        RatMat::from_ints(2, 2, &[1, 0, 2, 1]).expect("2x2"),
    ])
    .expect("sanov pair is valid")
}

/// Rational rotation of the plane with `cos = c`, `sin = s` (`c^2 + s^2 = 1`).
pub fn rational_rotation(c: (i64, i64), s: (i64, i64)) -> Result<RatMat> {
    let (c, s) = (rat(c.0, c.1), rat(s.0, s.1));
    if &c * &c + &s * &s != rat(1, 1) {
        return Err(Error::Invalid("rotation entries must satisfy c^2 + s^2 = 1".into()));
    }
    RatMat::new(2, 2, vec![c.clone(), -s.clone(), s, c])
}

/// Rational rotation acting on coordinates `(i, j)` of `K^n`.
pub fn embed_rotation(n: usize, i: usize, j: usize, rot: &RatMat) -> Result<RatMat> {
    if i >= n || j >= n || i == j {
        return Err(Error::Invalid(format!("bad rotation plane ({i}, {j}) in dimension {n}")));
    }
    let mut e = Vec::with_capacity(n * n);
    for r in 0..n {
        for c in 0..n {
            let idx = |k: usize| if k == i { Some(0) } else if k == j { Some(1) } else { None };
            e.push(match (idx(r), idx(c)) {
                (Some(a), Some(b)) => rot.get(a, b).clone(),
                _ if r == c => rat(1, 1),
                _ => rat(0, 1),
            });
        }
    }
    RatMat::new(n, n, e)
}

/// Rational orthogonal matrix in general position: the product of the rotation with
/// `(cos, sin) = (3/5, 4/5)` over every coordinate plane `(i, j)`, `i < j`, in lexicographic order.
pub fn generic_rational_orthogonal(n: usize) -> Result<RatMat> {
    let r = rational_rotation((3, 5), (4, 5))?;
    let mut m = RatMat::identity(n);
    for i in 0..n {
        for j in i + 1..n {
            m = &m * &embed_rotation(n, i, j, &r)?;
        }
    }
    Ok(m)
}

pub(crate) fn transpose(m: &RatMat) -> RatMat {
    let mut e = Vec::with_capacity(m.rows() * m.cols());
    for i in 0..m.cols() {
        for j in 0..m.rows() {
            e.push(m.get(j, i).clone());
        }
    }
    RatMat::new(m.cols(), m.rows(), e).expect("shape")
}

/// `diag(lambda, 1/lambda)` in `SL_2(Q)`.
pub fn hyperbolic_sl2(lambda: &BigRational) -> Result<RatMat> {
    if *lambda <= rat(0, 1) {
        return Err(Error::Invalid("lambda must be positive".into()));
    }
    RatMat::new(2, 2, vec![lambda.clone(), rat(0, 1), rat(0, 1), lambda.recip()])
}

/// Three cyclic factors `a`, `r1 a r1^-1`, `r2 a r2^-1` in `SL_2(Q)` with `a = diag(lambda, 1/lambda)`
/// and rotations by the angles with `(cos, sin) = (4/5, 3/5)` and `(3/5, 4/5)`.
pub fn diagonal_schottky_sl2(lambda: &BigRational) -> Result<Vec<RatMat>> {
    let a = hyperbolic_sl2(lambda)?;
    let mut out = vec![a.clone()];
    for (c, s) in [((4, 5), (3, 5)), ((3, 5), (4, 5))] {
        let r = rational_rotation(c, s)?;
        out.push(&(&r * &a) * &transpose(&r));
    }
    Ok(out)
}

/// Two-generator Schottky group in `SL_3(Q)`: `a = diag(lambda, 1, 1/lambda)` and `b = h a h^T`
/// for a fixed rational rotation `h` in general position.
pub fn schottky_sl3(lambda: i64) -> Result<Rep> {
    if lambda < 2 {
        return Err(Error::Invalid("lambda must be an integer >= 2".into()));
    }
    let l = rat(lambda, 1);
    let a = RatMat::new(
        3,
        3,
        vec![l.clone(), rat(0, 1), rat(0, 1), rat(0, 1), rat(1, 1), rat(0, 1), rat(0, 1), rat(0, 1), l.recip()],
    )?;
    let h = &(&embed_rotation(3, 0, 1, &rational_rotation((3, 5), (4, 5))?)?
        * &embed_rotation(3, 1, 2, &rational_rotation((5, 13), (12, 13))?)?)
        * &embed_rotation(3, 0, 2, &rational_rotation((8, 17), (15, 17))?)?;
    let b = &(&h * &a) * &transpose(&h);
    let factor = crate::words::Factor::new(
        "F",
        vec![crate::words::Generator::exact("a", a), crate::words::Generator::exact("b", b)],
    );
    Rep::new(vec![factor])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::singular_values;
    use crate::words::freeness_check_exact;

    #[test]
    fn rotations_are_orthogonal() {
        let r = rational_rotation((3, 5), (4, 5)).unwrap();
        assert!((&r * &transpose(&r)).is_identity());
        assert!(rational_rotation((1, 2), (1, 2)).is_err());
        let e = embed_rotation(3, 0, 2, &r).unwrap();
        assert!((&e * &transpose(&e)).is_identity());
        let g = generic_rational_orthogonal(4).unwrap();
        assert!((&g * &transpose(&g)).is_identity());
        assert!((0..4).all(|i| (0..4).all(|j| g.get(i, j) != &rat(0, 1))));
    }

    #[test]
    fn schottky_sl2_factors_are_unimodular_and_distinct() {
        let gens = diagonal_schottky_sl2(&rat(100, 1)).unwrap();
        assert_eq!(gens.len(), 3);
        for g in &gens {
            let d = g.to_mat().determinant().unwrap();
            assert!((d.re - 1.0).abs() < 1e-9);
        }
        assert_ne!(gens[1], gens[2]);
    }

    #[test]
    fn schottky_sl3_is_free_on_short_words() {
        let rep = schottky_sl3(10).unwrap();
        assert!(freeness_check_exact(&rep, 5).unwrap().free_up_to_max_len);
        let s = singular_values(&rep.factors()[0].generators[1].matrix).unwrap();
        assert!((s[0] - 10.0).abs() < 1e-9 && (s[2] - 0.1).abs() < 1e-9);
    }
}
