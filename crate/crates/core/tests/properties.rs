//! Randomized invariants across the public API.

use std::collections::BTreeSet;

use anosov::algebra::{adjoint_rep, burnside_span_dim, proximal_data};
use anosov::cli::{extract_run_config, AlgebraOp, Command, RunConfig};
use anosov::constructions::families::{sanov, schottky_sl3};
use anosov::constructions::{
    centralizer_orbit_dim, exterior_square, make_phi, make_psi, make_rho, tau, tau_scalar, BlockSpec, QuatMat3,
};
use anosov::gap::{gap_profile, index_set, profile_words};
use anosov::linalg::random::{gaussian_mat, gaussian_vector, near_identity, random_conditioned, random_unit_vector};
use anosov::linalg::{
    cartan_attractor, contraction_bound_check, moduli_of_eigenvalues, near_identity_displacement_check, proj_metric,
    singular_values, svd, CMatrix, Field, Mat, Quaternion, Subspace, C64,
};
use anosov::pingpong::{check_pingpong, diagonal_schottky_config, PingPongVerdict, ProjectiveSet};
use anosov::words::{ball_size, enumerate_ball, parse_rational, Letter, Rep, Word};
use anosov::Thresholds;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn field(complex: bool) -> Field {
    if complex {
        Field::Complex
    } else {
        Field::Real
    }
}

fn random_quat(r: &mut ChaCha8Rng) -> Quaternion {
    Quaternion::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0), r.random_range(-1.0..1.0), r.random_range(-1.0..1.0))
}

fn qdiff(a: Quaternion, b: Quaternion) -> f64 {
    (a - b).norm()
}

/// Reduced word over the alphabet of `rep` from raw letter indices.
fn word_from(rep: &Rep, idx: &[usize]) -> Word {
    let alphabet = rep.group().alphabet();
    Word::reduce(idx.iter().map(|&i| alphabet[i % alphabet.len()]))
}

fn rel(a: &Mat, b: &Mat) -> f64 {
    a.max_abs_diff(b) / a.norm().max(b.norm()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn conjugation_is_an_involution_and_modulus_nonnegative(re in -1e3f64..1e3, im in -1e3f64..1e3) {
        let z = C64::new(re, im);
        prop_assert_eq!(z.conj().conj(), z);
        prop_assert!((z * z.conj()).re >= 0.0);
        prop_assert_eq!((z * z.conj()).im, 0.0);
    }

    #[test]
    fn quaternion_product_is_associative(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (a, b, c) = (random_quat(&mut r), random_quat(&mut r), random_quat(&mut r));
        prop_assert!(qdiff((a * b) * c, a * (b * c)) <= 1e-14);
    }

    #[test]
    fn operator_norm_is_submultiplicative(seed in any::<u64>(), n in 1usize..7, complex in any::<bool>()) {
        let mut r = rng(seed);
        let a = gaussian_mat(&mut r, n, field(complex));
        let b = gaussian_mat(&mut r, n, field(complex));
        prop_assert!((&a * &b).norm() <= a.norm() * b.norm() * (1.0 + 1e-12));
    }

    #[test]
    fn svd_reconstructs_and_sorts(seed in any::<u64>(), n in 1usize..12, complex in any::<bool>(), log_cond in 0.0f64..8.0) {
        let mut r = rng(seed);
        let g = if n == 1 { gaussian_mat(&mut r, n, field(complex)) } else { random_conditioned(&mut r, n, field(complex), 10f64.powf(log_cond)) };
        let s = svd(&g).unwrap();
        prop_assert!(s.sigmas.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(s.sigmas.iter().all(|&x| x >= 0.0));
        prop_assert!((&s.reconstruct() - &g).norm() <= 1e-13 * g.norm());
        let id = CMatrix::identity(n, n);
        prop_assert!((s.left.data().adjoint() * s.left.data() - &id).norm() <= 1e-13);
        prop_assert!((s.right.data() * s.right.data().adjoint() - &id).norm() <= 1e-13);
        prop_assert!((s.sigmas[0] - g.norm()).abs() <= 1e-10 * g.norm());
    }

    #[test]
    fn subspace_frames_are_orthonormal(seed in any::<u64>(), n in 2usize..7, k in 1usize..6) {
        let mut r = rng(seed);
        let k = k.min(n);
        let vs: Vec<_> = (0..k).map(|_| gaussian_vector(&mut r, n, Field::Complex)).collect();
        let s = Subspace::span(n, &vs);
        let f = s.frame();
        let gram = f.adjoint() * f;
        prop_assert!((gram - CMatrix::identity(s.dim(), s.dim())).norm() <= 1e-10);
        // Equality does not depend on the frame chosen.
        let u = anosov::linalg::random::random_unitary(&mut r, s.dim(), Field::Complex);
        let other = Subspace::from_columns(&(f * u.data())).unwrap();
        prop_assert!(s.same_as(&other, 1e-9));
    }

    #[test]
    fn projective_metric_axioms(seed in any::<u64>(), n in 2usize..6, complex in any::<bool>()) {
        let mut r = rng(seed);
        let l: Vec<Subspace> =
            (0..3).map(|_| Subspace::line(random_unit_vector(&mut r, n, field(complex))).unwrap()).collect();
        let d = |a: usize, b: usize| proj_metric(&l[a], &l[b]).unwrap();
        prop_assert!((d(0, 1) - d(1, 0)).abs() <= 1e-12);
        for (a, b) in [(0, 1), (1, 2), (0, 2)] {
            prop_assert!((0.0..=1.0).contains(&d(a, b)));
        }
        prop_assert!(d(0, 2) <= d(0, 1) + d(1, 2) + 1e-9);
        prop_assert!(d(0, 0) <= 1e-12);
    }

    #[test]
    fn contraction_estimate(seed in any::<u64>(), n in 2usize..9, complex in any::<bool>()) {
        let mut r = rng(seed);
        let g = random_conditioned(&mut r, n, field(complex), 1e3);
        let s = singular_values(&g).unwrap();
        prop_assume!(s[0] > s[1] * (1.0 + 1e-6));
        let x = Subspace::line(random_unit_vector(&mut r, n, field(complex))).unwrap();
        let c = contraction_bound_check(&g, &x, 1e-8).unwrap();
        prop_assert!(c.ok && c.lhs <= c.rhs + 1e-9, "{:?}", c);
    }

    #[test]
    fn displacement_estimate(seed in any::<u64>(), n in 2usize..9, complex in any::<bool>(), radius in 0.0f64..0.5) {
        let mut r = rng(seed);
        let g = near_identity(&mut r, n, field(complex), radius);
        let c = near_identity_displacement_check(&g).unwrap();
        prop_assert!(c.ok, "{:?}", c);
    }

    #[test]
    fn cartan_attractor_is_scale_invariant(seed in any::<u64>(), n in 2usize..7, re in -5.0f64..5.0, im in -5.0f64..5.0) {
        prop_assume!(re.abs() + im.abs() > 1e-3);
        let mut r = rng(seed);
        let g = random_conditioned(&mut r, n, Field::Complex, 1e3);
        let s = singular_values(&g).unwrap();
        for i in 1..n {
            if s[i - 1] <= s[i] * (1.0 + 1e-6) {
                continue;
            }
            let a = cartan_attractor(&g, i, 1e-8).unwrap();
            let b = cartan_attractor(&g.scale(C64::new(re, im)), i, 1e-8).unwrap();
            // Perturbation of the attractor scales like eps * sigma_1 / (sigma_i - sigma_{i+1}).
            let tol = 1e-9f64.max(1e-12 * s[0] / (s[i - 1] - s[i]));
            let angle = a.max_principal_angle(&b).unwrap();
            prop_assert!(angle <= tol, "angle {angle:e} > {tol:e} at index {i}");
        }
    }

    #[test]
    fn eigenvalue_moduli_are_conjugation_invariant(seed in any::<u64>(), n in 2usize..7, complex in any::<bool>()) {
        let mut r = rng(seed);
        let g = gaussian_mat(&mut r, n, field(complex));
        let h = random_conditioned(&mut r, n, field(complex), 10.0);
        let a = moduli_of_eigenvalues(&g).unwrap();
        let b = moduli_of_eigenvalues(&g.conjugate_by(&h).unwrap()).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-8 * a[0].max(1.0), "{:?} {:?}", a, b);
        }
    }

    #[test]
    fn reduction_is_confluent(raw in prop::collection::vec(0usize..4, 0..40), split in 0usize..40) {
        let rep = sanov();
        let alphabet = rep.group().alphabet();
        let letters: Vec<Letter> = raw.iter().map(|&i| alphabet[i]).collect();
        let whole = Word::reduce(letters.clone());
        let k = split.min(letters.len());
        // Reduce a prefix first, then the rest: same normal form.
        let prefix = Word::reduce(letters[..k].to_vec());
        let two_step = Word::reduce(prefix.letters().iter().copied().chain(letters[k..].iter().copied()));
        prop_assert_eq!(&whole, &two_step);
        prop_assert!(whole.letters().windows(2).all(|w| !w[0].cancels(w[1])));
        prop_assert!(whole.concat(&whole.inverse()).is_identity());
        for s in whole.syllables() {
            prop_assert!(!s.letters.is_empty());
        }
        for w in whole.syllables().windows(2) {
            prop_assert_ne!(w[0].factor, w[1].factor);
        }
    }

    #[test]
    fn evaluation_is_a_monoid_morphism(a in prop::collection::vec(0usize..4, 0..12), b in prop::collection::vec(0usize..4, 0..12)) {
        for rep in [sanov(), schottky_sl3(10).unwrap()] {
            let (u, v) = (word_from(&rep, &a), word_from(&rep, &b));
            let uv = rep.evaluate(&u.concat(&v)).unwrap();
            let prod = &rep.evaluate(&u).unwrap() * &rep.evaluate(&v).unwrap();
            prop_assert!(rel(&uv, &prod) <= 1e-9);
        }
    }

    #[test]
    fn block_constructions_preserve_the_morphism(a in prop::collection::vec(0usize..12, 0..8), b in prop::collection::vec(0usize..12, 0..8), seed in any::<u64>(), p in 2usize..4, r in 0usize..3) {
        let base = schottky_sl3(10).unwrap();
        let spec = BlockSpec::new(p, r, base.dim()).unwrap();
        let rho = make_rho(&base, &spec).unwrap();
        let psi = make_psi(&base, &spec).unwrap();
        let q = spec.q();
        let mut g = rng(seed);
        let gs: Vec<Mat> = (0..2).map(|_| near_identity(&mut g, q, Field::Real, 0.01)).collect();
        let w = anosov::linalg::random::random_unitary(&mut g, q, Field::Real);
        let phi = make_phi(&rho, &psi, &gs, &[w]).unwrap();
        for rep in [&rho, &psi, &phi] {
            let (u, v) = (word_from(rep, &a), word_from(rep, &b));
            let uv = rep.evaluate(&u.concat(&v)).unwrap();
            let prod = &rep.evaluate(&u).unwrap() * &rep.evaluate(&v).unwrap();
            prop_assert!(rel(&uv, &prod) <= 1e-9);
        }
    }

    #[test]
    fn tau_is_faithful_and_compatible_with_conjugation(seed in any::<u64>()) {
        let mut r = rng(seed);
        let q = random_quat(&mut r);
        let t = tau_scalar(q);
        let tc = tau_scalar(q.conj());
        for i in 0..2 {
            for j in 0..2 {
                prop_assert!((tc[i][j] - t[j][i].conj()).norm() <= 1e-15);
            }
        }
        let fro: f64 = t.iter().flatten().map(|z| z.norm_sqr()).sum();
        prop_assert!((fro - 2.0 * q.norm_sqr()).abs() <= 1e-12);
        // Multiplicative on 3x3 quaternionic matrices.
        let mut m = || QuatMat3(std::array::from_fn(|_| std::array::from_fn(|_| random_quat(&mut r))));
        let (a, b) = (m(), m());
        prop_assert!(rel(&tau(&a.mul(&b)), &(&tau(&a) * &tau(&b))) <= 1e-12);
    }

    #[test]
    fn exterior_square_transpose_and_determinant(seed in any::<u64>(), complex in any::<bool>()) {
        let mut r = rng(seed);
        let g = gaussian_mat(&mut r, 6, field(complex));
        let w = exterior_square(&g).unwrap();
        prop_assert!(exterior_square(&g.transpose()).unwrap().max_abs_diff(&w.transpose()) <= 1e-12 * w.norm().max(1.0));
        let d = g.determinant().unwrap().powu(5);
        prop_assert!((w.determinant().unwrap() - d).norm() <= 1e-8 * d.norm().max(1e-300));
    }

    #[test]
    fn gap_indices_scale_by_p(entries in prop::collection::vec(0.1f64..10.0, 2..5), p in 1usize..4) {
        let d = entries.len();
        let mut sorted = entries.clone();
        sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let gaps = |s: &[f64], half: usize| -> BTreeSet<usize> {
            (1..s.len()).filter(|&k| 2 * k <= half && s[k - 1] > s[k] * (1.0 + 1e-8)).collect()
        };
        let base = gaps(&sorted, d);
        let rep = Rep::cyclic(vec![Mat::diag(&entries)]).unwrap();
        let spec = BlockSpec::new(p, 0, d).unwrap();
        let rho = make_rho(&rep, &spec).unwrap();
        let image = rho.evaluate(&word_from(&rho, &[0])).unwrap();
        let s = singular_values(&image).unwrap();
        let want: BTreeSet<usize> = base.iter().map(|k| p * k).collect();
        prop_assert_eq!(gaps(&s, spec.q()), want);
    }

    #[test]
    fn orbit_dimension_is_bounded(seed in any::<u64>(), p in 1usize..4, r in 0usize..3, d in 1usize..4) {
        let spec = BlockSpec::new(p, r, d).unwrap();
        let mut g = rng(seed);
        let v = gaussian_vector(&mut g, spec.q(), Field::Complex);
        let k = centralizer_orbit_dim(&spec, &v).unwrap();
        prop_assert!(k <= p * p + r);
        prop_assert!(k <= spec.q());
    }

    #[test]
    fn burnside_dimension_is_monotone_and_bounded(seed in any::<u64>(), d in 2usize..4, gens in 1usize..3, complex in any::<bool>()) {
        let mut r = rng(seed);
        let mats: Vec<Mat> = (0..gens).map(|_| gaussian_mat(&mut r, d, field(complex))).collect();
        let rep = Rep::cyclic(mats).unwrap();
        let rep_report = burnside_span_dim(&rep, 2 * d, &Thresholds::default()).unwrap();
        prop_assert!(rep_report.dims_by_length.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(rep_report.span_dim <= d * d);
        prop_assert_eq!(rep_report.dims_by_length.last().copied(), Some(rep_report.span_dim));
    }

    #[test]
    fn adjoint_is_functorial_with_unimodular_determinant(seed in any::<u64>(), q in 2usize..5, complex in any::<bool>()) {
        let mut r = rng(seed);
        let g = random_conditioned(&mut r, q, field(complex), 10.0);
        let h = random_conditioned(&mut r, q, field(complex), 10.0);
        let lhs = adjoint_rep(&(&g * &h)).unwrap();
        let rhs = &adjoint_rep(&g).unwrap() * &adjoint_rep(&h).unwrap();
        prop_assert!(rel(&lhs, &rhs) <= 1e-9);
        prop_assert!((adjoint_rep(&g).unwrap().determinant().unwrap().norm() - 1.0).abs() <= 1e-8);
    }

    #[test]
    fn proximal_data_swaps_under_inversion(seed in any::<u64>(), n in 2usize..6) {
        let mut r = rng(seed);
        // Distinct eigenvalue moduli, conjugated to a generic basis.
        let mut diag: Vec<f64> = (0..n).map(|k| 3f64.powi(k as i32) * r.random_range(1.0..1.5)).collect();
        diag.reverse();
        let h = random_conditioned(&mut r, n, Field::Real, 10.0);
        let w = Mat::diag(&diag).conjugate_by(&h).unwrap();
        let th = Thresholds::default();
        let a = proximal_data(&w, &th).unwrap();
        let b = proximal_data(&w.inverse().unwrap(), &th).unwrap();
        prop_assert!(a.x_plus.same_as(&b.x_minus, 1e-8));
        prop_assert!(a.x_minus.same_as(&b.x_plus, 1e-8));
        let moved = Subspace::line(w.apply(&a.x_plus.unit_vector())).unwrap();
        prop_assert!(moved.max_principal_angle(&a.x_plus).unwrap() <= 1e-8);
        prop_assert!(anosov::linalg::dist_to_subspace(&a.x_plus, &a.v_minus).unwrap() > 1e-6);
        prop_assert!(anosov::linalg::dist_to_subspace(&b.x_plus, &b.v_minus).unwrap() > 1e-6);
    }

    #[test]
    fn samplers_emit_members(seed in any::<u64>(), n in 2usize..5, radius in 0.05f64..0.6) {
        let mut r = rng(seed);
        let c = random_unit_vector(&mut r, n, Field::Real);
        let ball = ProjectiveSet::ball(c.clone(), radius).unwrap();
        let comp = ProjectiveSet::hyperplane_complement(random_unit_vector(&mut r, n, Field::Real), radius).unwrap();
        for set in [ball, comp] {
            for x in set.sample_seeded(seed, "prop", Field::Real, 32).unwrap() {
                prop_assert!(set.contains(&x));
            }
        }
    }

    #[test]
    fn run_config_round_trips(seed in any::<u64>(), radius in proptest::option::of(0usize..50), trials in 1usize..9) {
        let mut cfg = RunConfig::new(Command::Algebra {
            op: AlgebraOp::Refute { rep: "in.json".into(), max_len: 3, trials },
        });
        cfg.seed = seed;
        cfg.radius = radius;
        let doc = serde_json::json!({ "payload": [1, 2], "run_config": cfg }).to_string();
        prop_assert_eq!(extract_run_config(&doc).unwrap(), cfg);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn balls_are_nested(radius in 0usize..5) {
        let g = sanov().group().clone();
        let small: Vec<Word> = enumerate_ball(&g, radius).collect();
        let big: BTreeSet<Word> = enumerate_ball(&g, radius + 1).collect();
        prop_assert_eq!(small.len() as u128, ball_size(&g, radius));
        prop_assert!(small.len() < big.len());
        prop_assert!(small.iter().all(|w| big.contains(w)));
        // Stable order across runs.
        let again: Vec<Word> = enumerate_ball(&g, radius).collect();
        prop_assert_eq!(small, again);
    }

    #[test]
    fn pingpong_pass_is_monotone(n in 1usize..4, m in 1usize..65) {
        let full = diagonal_schottky_config(&parse_rational("100").unwrap(), 0.1, 10f64.ln(), 3, Some(64), 7).unwrap();
        prop_assert_eq!(check_pingpong(&full).unwrap().verdict, PingPongVerdict::Pass);
        let smaller = diagonal_schottky_config(&parse_rational("100").unwrap(), 0.1, 10f64.ln(), n, Some(m), 7).unwrap();
        prop_assert_eq!(check_pingpong(&smaller).unwrap().verdict, PingPongVerdict::Pass);
    }
}

#[test]
fn identity_word_evaluates_to_identity_exactly() {
    for rep in [sanov(), schottky_sl3(10).unwrap()] {
        let id = rep.evaluate(&Word::identity()).unwrap();
        assert_eq!(id, Mat::identity(rep.dim(), rep.field()));
    }
}

#[test]
fn profile_matches_fresh_svd() {
    let rep = schottky_sl3(10).unwrap();
    let profile = gap_profile(&rep, 3).unwrap();
    let words = profile_words(&rep, &profile).unwrap();
    assert_eq!(words.len(), profile.records.len());
    for (w, rec) in words.iter().zip(&profile.records) {
        let s = singular_values(&rep.evaluate(w).unwrap()).unwrap();
        for k in 0..s.len() - 1 {
            assert!(((s[k] / s[k + 1]).ln() - rec.log_gaps[k]).abs() <= 1e-8, "{} k={}", rec.word, k + 1);
        }
        assert!(rec.log_gaps.iter().all(|&x| x >= 0.0) && rec.log_full >= 0.0);
        if rec.length == 0 {
            assert!(rec.log_gaps.iter().all(|&x| x == 0.0) && rec.log_full == 0.0);
        }
    }
}

#[test]
fn index_sets_are_symmetric_for_unimodular_reps() {
    let th = Thresholds::default();
    for rep in [sanov(), schottky_sl3(10).unwrap()] {
        let est = index_set(&rep, 6, &th).unwrap();
        let d = rep.dim();
        let mirrored: Vec<usize> = est.indices.iter().rev().map(|k| d - k).collect();
        assert_eq!(est.indices, mirrored);
    }
}

/// Block sum: the index set equals the gap positions of the merged block singular values.
#[test]
fn index_set_of_a_direct_sum_matches_the_merge() {
    let th = Thresholds::default();
    let cases: [(&[f64], &[f64]); 3] = [
        (&[3.0, 3.0, 1.0 / 9.0], &[2.0, 0.5]),
        (&[4.0, 0.25], &[4.0, 0.25]),
        (&[5.0, 1.0, 0.2], &[1.0]),
    ];
    for (a, b) in cases {
        let g = Mat::block_diag(&[&Mat::diag(a), &Mat::diag(b)]);
        let rep = Rep::cyclic(vec![g]).unwrap();
        // The ball holds g^n and g^-n, so a gap must open for both.
        let merged = |inv: bool| {
            let mut m: Vec<f64> = a.iter().chain(b.iter()).map(|&x| if inv { 1.0 / x } else { x }).collect();
            m.sort_by(|x, y| y.partial_cmp(x).unwrap());
            m
        };
        let (fwd, bwd) = (merged(false), merged(true));
        let want: Vec<usize> = (1..fwd.len())
            .filter(|&k| fwd[k - 1] > fwd[k] * (1.0 + 1e-8) && bwd[k - 1] > bwd[k] * (1.0 + 1e-8))
            .collect();
        assert_eq!(index_set(&rep, 6, &th).unwrap().indices, want, "{a:?} + {b:?}");
    }
}
