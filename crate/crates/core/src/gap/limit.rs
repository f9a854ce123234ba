use crate::error::{Error, Result};
use crate::linalg::{cartan_attractor, unit_line_distance, Subspace};
use crate::thresholds::Thresholds;
use crate::words::{map_ball, Rep};

/// Principal angle between subspaces of equal dimension; cheap path for lines.
fn angle(a: &Subspace, b: &Subspace) -> f64 {
    if a.dim() == 1 {
        unit_line_distance(&a.unit_vector(), &b.unit_vector()).asin()
    } else {
        a.max_principal_angle(b).unwrap_or(f64::INFINITY)
    }
}

/// Cartan attractors `Xi_i(rho(w))` of all words on the sphere of radius `radius`,
/// deduplicated up to principal angle `dedup_tol`, in enumeration order.
pub fn limit_set_sample(rep: &Rep, radius: usize, i: usize, th: &Thresholds) -> Result<Vec<Subspace>> {
    let d = rep.dim();
    if i < 1 || i >= d {
        return Err(Error::IndexOutOfRange { index: i, lo: 1, hi: d.saturating_sub(1) });
    }
    let alphabet = rep.group().alphabet();
    let rows = map_ball(rep, &alphabet, radius, |w, m| {
        if w.len() == radius {
            Some(cartan_attractor(&m.mat, i, th.gap_tol))
        } else {
            None
        }
    });
    let mut kept: Vec<Subspace> = Vec::new();
    for (w, res) in rows {
        let Some(res) = res else { continue };
        let sub = match res {
            Ok(s) => s,
            Err(Error::GapTooSmall { index, ratio, tol }) => {
                return Err(Error::GapTooSmallAt { word: rep.group().format_word(&w), index, ratio, tol })
            }
            Err(e) => return Err(e),
        };
        if kept.iter().all(|k| angle(k, &sub) > th.dedup_tol) {
            kept.push(sub);
        }
    }
    Ok(kept)
}

/// One-sided Hausdorff distance (max over `a` of min over `b`) in principal angle.
pub fn one_sided_hausdorff(a: &[Subspace], b: &[Subspace]) -> f64 {
    a.iter()
        .map(|x| b.iter().map(|y| angle(x, y)).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{Field, Mat};
    use crate::words::{FreeProduct, RatMat};

    #[test]
    fn diagonal_cyclic_gives_two_lines() {
        let rep = Rep::cyclic(vec![Mat::diag(&[4.0, 0.25])]).unwrap();
        let lines = limit_set_sample(&rep, 5, 1, &Thresholds::default()).unwrap();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].same_as(&Subspace::coordinate(2, &[0], Field::Real), 1e-12));
        assert!(lines[1].same_as(&Subspace::coordinate(2, &[1], Field::Real), 1e-12));
    }

    #[test]
    fn trivial_rep_has_no_gap() {
        let rep = Rep::trivial(&FreeProduct::cyclic(2), 2);
        let err = limit_set_sample(&rep, 3, 1, &Thresholds::default()).unwrap_err();
        assert!(matches!(err, Error::GapTooSmallAt { index: 1, .. }), "{err}");
    }

    /// Distance in the projective metric from `[x:y]` to the cone `|x| >= |y|`.
    fn dist_to_cone(v: &crate::linalg::CVector) -> f64 {
        let (x, y) = (v[0].norm(), v[1].norm());
        if x >= y {
            return 0.0;
        }
        let t = (y / x.hypot(y)).asin() - std::f64::consts::FRAC_PI_4;
        t.sin()
    }

    #[test]
    fn sanov_attractors_respect_ping_pong_cones() {
        let rep = Rep::cyclic_exact(vec![
            RatMat::from_ints(2, 2, &[1, 2, 0, 1]).unwrap(),
            RatMat::from_ints(2, 2, &[1, 0, 2, 1]).unwrap(),
        ])
        .unwrap();
        let th = Thresholds::default();
        let alphabet = rep.group().alphabet();
        let rows = map_ball(&rep, &alphabet, 8, |w, m| {
            (w.len() == 8).then(|| cartan_attractor(&m.mat, 1, th.gap_tol).unwrap())
        });
        for (w, sub) in rows {
            let Some(sub) = sub else { continue };
            let v = sub.unit_vector();
            // Words starting with g1^{+-1} attract into |x| >= |y|; with g2^{+-1} into |x| <= |y|.
            let d = if w.letters()[0].factor == 0 {
                dist_to_cone(&v)
            } else {
                let swapped = crate::linalg::CVector::from_vec(vec![v[1], v[0]]);
                dist_to_cone(&swapped)
            };
            assert!(d < 1e-3, "{} at distance {d}", rep.group().format_word(&w));
        }
        let s6 = limit_set_sample(&rep, 6, 1, &th).unwrap();
        let s8 = limit_set_sample(&rep, 8, 1, &th).unwrap();
        assert!(s8.len() > s6.len());
        let _ = one_sided_hausdorff(&s6, &s8);
    }
}
