use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::exact::RatMat;
use super::rep::{Rep, ScaledMat};
use super::word::{FreeProduct, Letter, Word};
use crate::error::{Error, Result};

/// Number of reduced words of length exactly `k` over an inverse-closed alphabet of `letters` letters.
pub fn sphere_size(letters: usize, k: usize) -> u128 {
    if k == 0 {
        return 1;
    }
    if letters == 0 {
        return 0;
    }
    let mut n = letters as u128;
    for _ in 1..k {
        n = n.saturating_mul(letters as u128 - 1);
    }
    n
}

/// Count-only dry run of [`enumerate_ball`].
pub fn ball_size(group: &FreeProduct, radius: usize) -> u128 {
    let l = group.alphabet().len();
    (0..=radius).map(|k| sphere_size(l, k)).fold(0u128, |a, b| a.saturating_add(b))
}

/// Reduced words of length `<= radius` in length-then-lexicographic order.
///
/// Spheres are built one at a time, so memory is bounded by two spheres.
pub struct Ball {
    alphabet: Vec<Letter>,
    radius: usize,
    sphere: Vec<Word>,
    pos: usize,
    k: usize,
}

impl Iterator for Ball {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        if self.pos == self.sphere.len() {
            if self.k >= self.radius || self.sphere.is_empty() {
                return None;
            }
            self.sphere = next_sphere(&self.sphere, &self.alphabet);
            self.pos = 0;
            self.k += 1;
            if self.sphere.is_empty() {
                return None;
            }
        }
        self.pos += 1;
        Some(self.sphere[self.pos - 1].clone())
    }
}

fn next_sphere(sphere: &[Word], alphabet: &[Letter]) -> Vec<Word> {
    let mut out = Vec::with_capacity(sphere.len() * alphabet.len());
    for w in sphere {
        for &l in alphabet {
            if w.last().is_some_and(|t| t.cancels(l)) {
                continue;
            }
            out.push(w.extended(l));
        }
    }
    out
}

pub fn enumerate_ball(group: &FreeProduct, radius: usize) -> Ball {
    enumerate_ball_over(group.alphabet(), radius)
}

/// Ball over an inverse-closed sub-alphabet (e.g. one factor's letters).
pub fn enumerate_ball_over(mut alphabet: Vec<Letter>, radius: usize) -> Ball {
    alphabet.sort();
    Ball { alphabet, radius, sphere: vec![Word::identity()], pos: 0, k: 0 }
}

/// Evaluates `rep` on every reduced word of length `<= radius` over `alphabet`
/// (prefix products are reused) and maps each `(word, matrix)` through `f`.
///
/// The result is in length-then-lexicographic order regardless of thread count.
pub fn map_ball<T, F>(rep: &Rep, alphabet: &[Letter], radius: usize, f: F) -> Vec<(Word, T)>
where
    T: Send,
    F: Fn(&Word, &ScaledMat) -> T + Sync,
{
    let mut alphabet = alphabet.to_vec();
    alphabet.sort();
    let root = ScaledMat::identity(rep.dim(), rep.field());
    let mut out = vec![(Word::identity(), f(&Word::identity(), &root))];
    if radius > 0 {
        let shards: Vec<Vec<(Word, T)>> = alphabet
            .par_iter()
            .map(|&l| {
                let mut acc = Vec::new();
                let w = Word::from_reduced(vec![l]);
                let m = root.times(rep.letter_matrix(l));
                dfs(rep, &alphabet, radius, w, m, &f, &mut acc);
                acc
            })
            .collect();
        out.extend(shards.into_iter().flatten());
    }
    out.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0)));
    out
}

fn dfs<T, F>(rep: &Rep, alphabet: &[Letter], radius: usize, w: Word, m: ScaledMat, f: &F, acc: &mut Vec<(Word, T)>)
where
    F: Fn(&Word, &ScaledMat) -> T,
{
    acc.push((w.clone(), f(&w, &m)));
    if w.len() == radius {
        return;
    }
    let last = w.last().expect("nonempty");
    for &l in alphabet {
        if last.cancels(l) {
            continue;
        }
        let child = m.times(rep.letter_matrix(l));
        dfs(rep, alphabet, radius, w.extended(l), child, f, acc);
    }
}

/// Outcome of an exact search for relations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FreenessReport {
    pub max_len: usize,
    pub words_checked: u64,
    /// Nonidentity reduced words evaluating exactly to the identity.
    pub identities: Vec<String>,
    /// True when no relation was found up to `max_len`.
    pub free_up_to_max_len: bool,
}

/// Exact-rational search for nontrivial reduced words of length `<= max_len` mapping to `I`.
pub fn freeness_check_exact(rep: &Rep, max_len: usize) -> Result<FreenessReport> {
    let mut letters = Vec::new();
    for l in rep.group().alphabet() {
        let g = &rep.factors()[l.factor].generators[l.gen];
        let ex = g
            .exact
            .as_ref()
            .ok_or_else(|| Error::NonRational(format!("generator {:?} has no exact matrix", g.label)))?;
        let m = if l.inverse { ex.inverse()? } else { ex.clone() };
        letters.push((l, m));
    }
    let id = RatMat::identity(rep.dim());
    let shards: Vec<(u64, Vec<Word>)> = if max_len == 0 {
        Vec::new()
    } else {
        letters
            .par_iter()
            .map(|(l, m)| {
                let mut hits = Vec::new();
                let mut count = 0u64;
                exact_dfs(&letters, max_len, Word::from_reduced(vec![*l]), &(&id * m), &mut count, &mut hits);
                (count, hits)
            })
            .collect()
    };
    let words_checked = 1 + shards.iter().map(|s| s.0).sum::<u64>();
    let mut hits: Vec<Word> = shards.into_iter().flat_map(|s| s.1).collect();
    hits.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    let identities: Vec<String> = hits.iter().map(|w| rep.group().format_word(w)).collect();
    Ok(FreenessReport { max_len, words_checked, free_up_to_max_len: identities.is_empty(), identities })
}

fn exact_dfs(
    letters: &[(Letter, RatMat)],
    max_len: usize,
    w: Word,
    m: &RatMat,
    count: &mut u64,
    hits: &mut Vec<Word>,
) {
    *count += 1;
    if m.is_identity() {
        hits.push(w.clone());
    }
    if w.len() == max_len {
        return;
    }
    let last = w.last().expect("nonempty");
    for (l, lm) in letters {
        if last.cancels(*l) {
            continue;
        }
        exact_dfs(letters, max_len, w.extended(*l), &(m * lm), count, hits);
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::linalg::Mat;
    use crate::words::word::FactorSpec;

    fn free_group_f2() -> FreeProduct {
        FreeProduct::new(vec![FactorSpec { name: "F".into(), generators: vec!["a".into(), "b".into()] }]).unwrap()
    }

    fn sanov() -> Rep {
        Rep::cyclic_exact(vec![
            RatMat::from_ints(2, 2, &[1, 2, 0, 1]).unwrap(),
            RatMat::from_ints(2, 2, &[1, 0, 2, 1]).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn z_star_z_radius_one() {
        let g = FreeProduct::cyclic(2);
        let words: Vec<String> = enumerate_ball(&g, 1).map(|w| g.format_word(&w)).collect();
        assert_eq!(words, vec!["1", "g1", "g1^-1", "g2", "g2^-1"]);
    }

    #[test]
    fn radius_zero_is_identity() {
        let g = FreeProduct::cyclic(3);
        let words: Vec<Word> = enumerate_ball(&g, 0).collect();
        assert_eq!(words, vec![Word::identity()]);
        assert_eq!(ball_size(&g, 0), 1);
    }

    /// Brute force: every raw string over the alphabet, reduced, deduplicated.
    fn brute_force_ball(g: &FreeProduct, radius: usize) -> BTreeSet<Word> {
        let alpha = g.alphabet();
        let mut out = BTreeSet::new();
        let mut frontier: Vec<Vec<Letter>> = vec![vec![]];
        for _ in 0..=radius {
            let mut next = Vec::new();
            for raw in &frontier {
                out.insert(Word::reduce(raw.iter().copied()));
                for &l in &alpha {
                    let mut r = raw.clone();
                    r.push(l);
                    next.push(r);
                }
            }
            frontier = next;
        }
        out.into_iter().filter(|w| w.len() <= radius).collect()
    }

    #[test]
    fn f2_counts_match_formula_and_brute_force() {
        let g = free_group_f2();
        for n in 0..=5 {
            let words: Vec<Word> = enumerate_ball(&g, n).collect();
            let formula: u128 = 1 + (1..=n).map(|k| 4 * 3u128.pow(k as u32 - 1)).sum::<u128>();
            assert_eq!(words.len() as u128, formula);
            assert_eq!(ball_size(&g, n), formula);
            let set: BTreeSet<Word> = words.iter().cloned().collect();
            assert_eq!(set.len(), words.len(), "duplicates at radius {n}");
            if n <= 4 {
                assert_eq!(set, brute_force_ball(&g, n));
            }
        }
    }

    #[test]
    fn order_is_length_then_lex_and_nested() {
        let g = FreeProduct::cyclic(3);
        let w4: Vec<Word> = enumerate_ball(&g, 4).collect();
        assert!(w4.windows(2).all(|p| (p[0].len(), &p[0]) < (p[1].len(), &p[1])));
        let w3: Vec<Word> = enumerate_ball(&g, 3).collect();
        assert_eq!(&w4[..w3.len()], &w3[..]);
    }

    #[test]
    fn map_ball_matches_direct_evaluation() {
        let r = sanov();
        let alpha = r.group().alphabet();
        let rows = map_ball(&r, &alpha, 5, |_, m| m.to_mat());
        let words: Vec<Word> = enumerate_ball(r.group(), 5).collect();
        assert_eq!(rows.len(), words.len());
        for ((w, m), w2) in rows.iter().zip(&words) {
            assert_eq!(w, w2);
            let direct = r.evaluate(w).unwrap();
            assert!(m.max_abs_diff(&direct) <= 1e-9 * direct.norm().max(1.0));
        }
    }

    #[test]
    fn sanov_pair_is_free_to_length_8() {
        let rep = sanov();
        let report = freeness_check_exact(&rep, 8).unwrap();
        assert!(report.identities.is_empty());
        assert!(report.free_up_to_max_len);
        assert_eq!(report.words_checked as u128, ball_size(rep.group(), 8));
    }

    #[test]
    fn forced_collision_is_reported_at_length_two() {
        let a = RatMat::from_ints(2, 2, &[1, 2, 0, 1]).unwrap();
        let rep = Rep::cyclic_exact(vec![a.clone(), a]).unwrap();
        let report = freeness_check_exact(&rep, 3).unwrap();
        assert_eq!(report.identities[0], "g1 g2^-1");
        assert_eq!(report.identities.iter().filter(|w| w.split(' ').count() == 2).count(), 4);
    }

    #[test]
    fn infinite_order_single_factor_has_no_relations() {
        let rep = Rep::cyclic_exact(vec![RatMat::from_ints(2, 2, &[1, 1, 0, 1]).unwrap()]).unwrap();
        let report = freeness_check_exact(&rep, 12).unwrap();
        assert!(report.identities.is_empty());
        assert_eq!(report.words_checked, 25);
    }

    #[test]
    fn float_only_rep_is_rejected() {
        let rep = Rep::cyclic(vec![Mat::diag(&[2.0, 0.5])]).unwrap();
        assert!(matches!(freeness_check_exact(&rep, 3), Err(Error::NonRational(_))));
    }
}
