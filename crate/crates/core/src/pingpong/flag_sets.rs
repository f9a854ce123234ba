use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::check::{PingPongConfig, DEFAULT_SAMPLES};
use super::sets::{ang, ball_dist_lower, certified_disjoint, certified_subset, ProjectiveSet};
use crate::constructions::families::diagonal_schottky_sl2;
use crate::error::{Error, Result};
use crate::linalg::{inner, unit_subspace_distance, CVector, Flag, Subspace, C64};
use crate::words::Rep;

/// Largest admissible `eps` for the builder.
pub const EPS_MAX: f64 = 1.0 / 11.0;

/// Parameters of the combination sets:
/// `C1 = B_{2 eps}([v0'])`, `C2 = P(K^q) \ N_{4 eps^2}(P(W'))`, `M_i = B_{r_i}(x_i)`.
#[derive(Clone, Debug)]
pub struct FlagSetParams {
    pub v0_prime: Subspace,
    pub w_prime: Subspace,
    pub eps: f64,
    pub centers: Vec<Subspace>,
    pub radii: Vec<f64>,
    /// Optional `(V_i, eps')`: requires `dist(M_j, P(V_i)) >= 12 eps'` for `i != j`.
    pub repelling: Option<(Vec<Subspace>, f64)>,
    /// Optional `theta`: requires `dist(M_i, P(W')) >= theta`.
    pub theta: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlagSets {
    pub c1: ProjectiveSet,
    pub c2: ProjectiveSet,
    pub m: Vec<ProjectiveSet>,
}

fn clause(name: &str, detail: String) -> Error {
    Error::Validation { clause: name.into(), detail }
}

/// Lower bound of `dist(x, P(V))` over `x` in `B(c, r)`.
fn ball_to_subspace(c: &CVector, r: f64, v: &Subspace) -> f64 {
    let d = unit_subspace_distance(c, v.frame());
    (ang(d) - ang(r)).max(0.0).sin()
}

/// Builds and validates the sets; errors name the violated clause.
pub fn build_flag_sets(p: &FlagSetParams) -> Result<FlagSets> {
    if !(p.eps > 0.0 && p.eps <= EPS_MAX) {
        return Err(clause("eps in (0, 1/11]", format!("got {}", p.eps)));
    }
    let q = p.v0_prime.ambient_dim();
    if p.v0_prime.dim() != 1 {
        return Err(Error::DimensionMismatch("v0' must be a line".into()));
    }
    if p.w_prime.ambient_dim() != q || p.w_prime.dim() + 1 != q {
        return Err(Error::DimensionMismatch(format!("W' must be a hyperplane of K^{q}")));
    }
    if p.centers.len() != p.radii.len() {
        return Err(Error::Invalid(format!("{} centers but {} radii", p.centers.len(), p.radii.len())));
    }
    let c1 = ProjectiveSet::ball_around(&p.v0_prime, 2.0 * p.eps)?;
    let c2 = ProjectiveSet::hyperplane_complement(p.w_prime.normal()?, 4.0 * p.eps * p.eps)?;
    let mut m = Vec::with_capacity(p.centers.len());
    for (k, (x, r)) in p.centers.iter().zip(&p.radii).enumerate() {
        if x.dim() != 1 || x.ambient_dim() != q {
            return Err(Error::DimensionMismatch(format!("center {k} must be a line in K^{q}")));
        }
        m.push(ProjectiveSet::ball_around(x, *r)?);
    }
    for (i, mi) in m.iter().enumerate() {
        if !certified_subset(mi, &c1) {
            return Err(clause("(i) M_i inside C1", format!("M_{} is not contained in C1", i + 2)));
        }
        for (j, mj) in m.iter().enumerate().skip(i + 1) {
            if !certified_disjoint(mi, mj) {
                return Err(clause("(i) M_i disjoint", format!("M_{} and M_{} overlap", i + 2, j + 2)));
            }
        }
    }
    if let Some((vs, eps_p)) = &p.repelling {
        if vs.len() != m.len() {
            return Err(Error::Invalid(format!("{} subspaces V_i for {} sets", vs.len(), m.len())));
        }
        for (i, v) in vs.iter().enumerate() {
            for (j, x) in p.centers.iter().enumerate() {
                if i == j {
                    continue;
                }
                let d = ball_to_subspace(&x.unit_vector(), p.radii[j], v);
                if d < 12.0 * eps_p {
                    return Err(clause(
                        "(ii) dist(M_j, P(V_i)) >= 12 eps'",
                        format!("M_{} is within {d} of P(V_{})", j + 2, i + 2),
                    ));
                }
            }
        }
    }
    if let Some(theta) = p.theta {
        let n = p.w_prime.normal()?;
        for (i, x) in p.centers.iter().enumerate() {
            let d = ball_dist_lower(&x.unit_vector(), p.radii[i], &n);
            if d < theta {
                return Err(clause("(iii) dist(M_i, P(W')) >= theta", format!("M_{} is within {d} of P(W')", i + 2)));
            }
        }
    }
    Ok(FlagSets { c1, c2, m })
}

/// `(1/11) min_xi min(dist(xi^1, P(W)), dist([v0], P(xi^{d-1})))` over the sampled limit flags.
pub fn transversality_margin(flag: &Flag, limit_pts: &[Flag]) -> Result<f64> {
    if limit_pts.is_empty() {
        return Err(Error::Invalid("no limit flags given".into()));
    }
    let d = flag.ambient_dim();
    let v0 = flag.line.unit_vector();
    let w_normal = flag.hyperplane.normal()?;
    let mut best = f64::INFINITY;
    for (k, xi) in limit_pts.iter().enumerate() {
        if xi.ambient_dim() != d {
            return Err(Error::DimensionMismatch(format!("limit flag {k} lives in K^{}, expected K^{d}", xi.ambient_dim())));
        }
        let a = inner(&w_normal, &xi.line.unit_vector()).norm().min(1.0);
        let b = inner(&xi.hyperplane.normal()?, &v0).norm().min(1.0);
        best = best.min(a.min(b));
    }
    Ok(best / 11.0)
}

/// Ping-pong data for three cyclic factors `a`, `r1 a r1^-1`, `r2 a r2^-1` in `SL_2(R)`
/// (see [`diagonal_schottky_sl2`]).
///
/// `C2` is the union of the balls of radius `radius_sets` around the attracting and
/// repelling lines of `a`, `M_i` the corresponding union for the `i`-th conjugate,
/// and `C1 = M_2 ∪ M_3`.
pub fn diagonal_schottky_config(
    lambda: &BigRational,
    radius_sets: f64,
    alpha: f64,
    radius: usize,
    samples: Option<usize>,
    seed: u64,
) -> Result<PingPongConfig> {
    let gens = diagonal_schottky_sl2(lambda)?;
    let groups = gens.iter().map(|g| Rep::cyclic_exact(vec![g.clone()])).collect::<Result<Vec<_>>>()?;
    let pair = |c: f64, s: f64| -> Result<ProjectiveSet> {
        let attract = CVector::from_vec(vec![C64::new(c, 0.0), C64::new(s, 0.0)]);
        let repel = CVector::from_vec(vec![C64::new(-s, 0.0), C64::new(c, 0.0)]);
        ProjectiveSet::union(vec![
            ProjectiveSet::ball(attract, radius_sets)?,
            ProjectiveSet::ball(repel, radius_sets)?,
        ])
    };
    let c2 = pair(1.0, 0.0)?;
    let m = vec![pair(0.8, 0.6)?, pair(0.6, 0.8)?];
    let c1 = ProjectiveSet::union(m.clone())?;
    Ok(PingPongConfig { groups, c1, c2, m, alpha, radius, samples: samples.unwrap_or(DEFAULT_SAMPLES), seed })
}

#[cfg(test)]
mod tests {
    use num_bigint::BigInt;

    use super::*;
    use crate::linalg::Field;
    use crate::pingpong::{check_pingpong, recheck_witness, spot_check_products, suggest_alpha, PingPongVerdict};

    fn line(v: &[f64]) -> Subspace {
        Subspace::real_line(v).unwrap()
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn two_dimensional_instantiation() {
        let p = FlagSetParams {
            v0_prime: line(&[0.0, 1.0]),
            w_prime: Subspace::coordinate(2, &[0], Field::Real),
            eps: 0.05,
            centers: vec![],
            radii: vec![],
            repelling: None,
            theta: None,
        };
        let sets = build_flag_sets(&p).unwrap();
        match &sets.c1 {
            ProjectiveSet::Ball { radius, center } => {
                assert!((radius - 0.1).abs() < 1e-15);
                assert!((center[1].re.abs() - 1.0).abs() < 1e-15);
            }
            other => panic!("{other:?}"),
        }
        match &sets.c2 {
            ProjectiveSet::HyperplaneComplement { radius, .. } => assert!((radius - 0.01).abs() < 1e-15),
            other => panic!("{other:?}"),
        }
        let e1 = CVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
        assert!(!sets.c2.contains(&e1));
    }

    #[test]
    fn overlapping_centers_are_rejected() {
        let p = FlagSetParams {
            v0_prime: line(&[1.0, 0.0, 0.0]),
            w_prime: Subspace::coordinate(3, &[1, 2], Field::Real),
            eps: 1.0 / 11.0,
            centers: vec![line(&[1.0, 0.01, 0.0]), line(&[1.0, 0.0, 0.01])],
            radii: vec![0.03, 0.03],
            repelling: None,
            theta: None,
        };
        match build_flag_sets(&p).unwrap_err() {
            Error::Validation { clause, .. } => assert!(clause.contains("disjoint"), "{clause}"),
            e => panic!("{e}"),
        }
        let mut bad = p.clone();
        bad.eps = 0.2;
        assert!(build_flag_sets(&bad).is_err());
    }

    #[test]
    fn all_three_conditions_validate_on_a_concrete_configuration() {
        let p = FlagSetParams {
            v0_prime: line(&[1.0, 0.0, 0.0]),
            w_prime: Subspace::coordinate(3, &[1, 2], Field::Real),
            eps: 1.0 / 11.0,
            centers: vec![line(&[1.0, 0.1, 0.0]), line(&[1.0, -0.1, 0.0]), line(&[1.0, 0.0, 0.1])],
            radii: vec![0.01, 0.01, 0.01],
            repelling: Some((
                vec![
                    Subspace::hyperplane_from_normal(CVector::from_vec(vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(-0.3, 0.0)])).unwrap(),
                    Subspace::hyperplane_from_normal(CVector::from_vec(vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.3, 0.0)])).unwrap(),
                    Subspace::hyperplane_from_normal(CVector::from_vec(vec![C64::new(0.0, 0.0), C64::new(0.3, 0.0), C64::new(1.0, 0.0)])).unwrap(),
                ],
                0.0005,
            )),
            theta: Some(0.9),
        };
        let sets = build_flag_sets(&p).unwrap();
        assert_eq!(sets.m.len(), 3);
        let mut strict = p.clone();
        strict.theta = Some(0.999);
        assert!(build_flag_sets(&strict).is_err());
    }

    #[test]
    fn margin_examples() {
        let d = 4;
        let e = |i: usize| {
            let mut v = vec![0.0; d];
            v[i] = 1.0;
            line(&v)
        };
        // v0 orthogonal to the limit hyperplane, W orthogonal to the limit line.
        let flag = Flag::new(e(0), Subspace::coordinate(d, &[1, 2, 3], Field::Real)).unwrap();
        let limit = Flag::new(e(0), Subspace::coordinate(d, &[1, 2, 3], Field::Real)).unwrap();
        assert!((transversality_margin(&flag, std::slice::from_ref(&limit)).unwrap() - 1.0 / 11.0).abs() < 1e-15);
        let touching = Flag::new(e(1), Subspace::coordinate(d, &[0, 2, 3], Field::Real)).unwrap();
        assert_eq!(transversality_margin(&flag, &[limit, touching]).unwrap(), 0.0);
        assert!(transversality_margin(&flag, &[]).is_err());
    }

    #[test]
    fn strong_schottky_passes_and_weak_fails_with_reproducible_witness() {
        let alpha = 10f64.ln();
        let strong = diagonal_schottky_config(&rat(100, 1), 0.1, alpha, 3, Some(256), 1).unwrap();
        let cert = check_pingpong(&strong).unwrap();
        assert_eq!(cert.verdict, PingPongVerdict::Pass, "{:?}", cert.failures.first());
        assert!(cert.margin > 0.0);
        assert!(cert.analytic.all_certified);
        assert!(suggest_alpha(&strong).unwrap() > alpha);
        let spot = spot_check_products(&strong, 200, 5, 4).unwrap();
        assert_eq!(spot.failures, 0);

        let weak = diagonal_schottky_config(&rat(101, 100), 0.1, alpha, 3, Some(256), 1).unwrap();
        let cert = check_pingpong(&weak).unwrap();
        assert_eq!(cert.verdict, PingPongVerdict::Fail);
        let w = &cert.failures[0];
        let (obs, req) = recheck_witness(&weak, w).unwrap();
        assert!((obs - w.observed).abs() <= 1e-12 && (req - w.required).abs() <= 1e-12);
        assert!(obs <= req);
        assert!(cert.failures.iter().any(|w| w.kind == crate::pingpong::CheckKind::Growth));
    }

    #[test]
    fn fewer_than_three_groups_is_a_config_error() {
        let mut cfg = diagonal_schottky_config(&rat(100, 1), 0.1, 1.0, 2, Some(16), 0).unwrap();
        cfg.groups.pop();
        cfg.m.pop();
        match check_pingpong(&cfg).unwrap_err() {
            Error::Validation { clause, .. } => assert_eq!(clause, "l >= 3"),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn overlapping_targets_are_a_config_error() {
        let mut cfg = diagonal_schottky_config(&rat(100, 1), 0.1, 1.0, 2, Some(16), 0).unwrap();
        cfg.m[1] = cfg.m[0].clone();
        assert!(matches!(check_pingpong(&cfg), Err(Error::Validation { .. })));
    }

    #[test]
    fn config_json_round_trip_keeps_hash() {
        let cfg = diagonal_schottky_config(&rat(100, 1), 0.1, 1.0, 2, Some(16), 5).unwrap();
        let s = serde_json::to_string(&cfg).unwrap();
        let back: PingPongConfig = serde_json::from_str(&s).unwrap();
        assert_eq!(back.hash(), cfg.hash());
    }
}
