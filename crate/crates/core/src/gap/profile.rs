use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::thresholds::Thresholds;
use crate::words::{map_ball, Rep, Word};

/// Singular-value data of one ball element.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WordRecord {
    pub word: String,
    pub length: usize,
    /// `log sigma_i`, nonincreasing.
    pub log_sigmas: Vec<f64>,
    /// `log(sigma_k / sigma_{k+1})` for `k = 1..d-1`.
    pub log_gaps: Vec<f64>,
    /// `log(sigma_1 / sigma_d)`.
    pub log_full: f64,
    /// Set when the word could not be evaluated to finite singular values.
    pub skipped: bool,
}

/// Per-word singular-value profile over a ball, in length-then-lexicographic order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapProfile {
    pub dim: usize,
    pub radius: usize,
    pub records: Vec<WordRecord>,
}

impl GapProfile {
    pub fn skipped(&self) -> usize {
        self.records.iter().filter(|r| r.skipped).count()
    }

    pub fn skipped_fraction(&self) -> f64 {
        self.skipped() as f64 / self.records.len().max(1) as f64
    }

    /// The log-ratio selected by `index`, or `None` for skipped rows.
    pub fn value(&self, rec: &WordRecord, index: GapIndex) -> Option<f64> {
        if rec.skipped {
            return None;
        }
        Some(match index {
            GapIndex::Gap(k) => rec.log_gaps[k - 1],
            GapIndex::Full => rec.log_full,
        })
    }
}

fn record(word: String, length: usize, logs: Result<Vec<f64>>) -> WordRecord {
    match logs {
        Ok(ls) if ls.iter().all(|x| x.is_finite()) => {
            let log_gaps = ls.windows(2).map(|w| w[0] - w[1]).collect();
            let log_full = ls[0] - ls[ls.len() - 1];
            WordRecord { word, length, log_sigmas: ls, log_gaps, log_full, skipped: false }
        }
        _ => WordRecord { word, length, log_sigmas: vec![], log_gaps: vec![], log_full: f64::NAN, skipped: true },
    }
}

/// Evaluates the representation on the ball of radius `radius` and records
/// log singular values. Words whose evaluation is not finite are flagged and skipped.
pub fn gap_profile(rep: &Rep, radius: usize) -> Result<GapProfile> {
    if radius < 1 {
        return Err(Error::Invalid("gap profile radius must be at least 1".into()));
    }
    let alphabet = rep.group().alphabet();
    let rows = map_ball(rep, &alphabet, radius, |_, m| m.log_singular_values());
    let records = rows
        .into_iter()
        .map(|(w, logs)| record(rep.group().format_word(&w), w.len(), logs))
        .collect();
    Ok(GapProfile { dim: rep.dim(), radius, records })
}

/// Which singular-value ratio a fit refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GapIndex {
    /// `sigma_k / sigma_{k+1}`.
    Gap(usize),
    /// `sigma_1 / sigma_d`.
    Full,
}

impl fmt::Display for GapIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GapIndex::Gap(k) => write!(f, "{k}"),
            GapIndex::Full => f.write_str("full"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Growing,
    Flat,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Growing => "growing",
            Verdict::Flat => "flat",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

pub const ESTIMATE_CAVEAT: &str =
    "finite-ball estimate: a growing verdict certifies the inequality on the enumerated ball only";

/// Certified linear lower envelope `log-ratio >= alpha |w| - c` over the ball.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    /// Gap index as a string (`"1"`, `"2"`, ... or `"full"`).
    pub index: String,
    pub alpha: f64,
    pub c: f64,
    pub witness_min: String,
    /// `log-ratio - alpha |w|` at the witness (equals `-c` when `c > 0`).
    pub witness_value: f64,
    /// Largest log-ratio over the outer sphere.
    pub max_sphere_ratio: f64,
    pub verdict: Verdict,
    pub radius: usize,
    pub words: usize,
    pub skipped_words: usize,
    pub alpha_min: f64,
    pub c_max: f64,
    pub flat_tol: f64,
    pub caveat: String,
}

/// Lower envelope fit of one log-ratio against word length.
///
/// Words of length at most `radius / 2` calibrate the offset
/// `C(alpha) = max(0, max_inner(alpha |w| - r_w))`; the slope is the largest
/// `alpha` for which every longer word satisfies `r_w >= alpha |w| - C(alpha)`.
/// Because the outer words are strictly longer than the inner ones, the slack
/// is strictly decreasing in `alpha`, so the slope is found by bisection.
pub fn fit_growth(profile: &GapProfile, index: GapIndex, th: &Thresholds) -> Result<GrowthFit> {
    let d = profile.dim;
    if let GapIndex::Gap(k) = index {
        if k < 1 || k >= d {
            return Err(Error::IndexOutOfRange { index: k, lo: 1, hi: d.saturating_sub(1) });
        }
    }
    let pts: Vec<(usize, f64, &str)> = profile
        .records
        .iter()
        .filter_map(|r| profile.value(r, index).map(|v| (r.length, v, r.word.as_str())))
        .collect();
    if pts.is_empty() {
        return Err(Error::Invalid("empty gap profile".into()));
    }
    let n = pts.iter().map(|p| p.0).max().unwrap_or(0);
    let half = n / 2;
    let (inner, outer): (Vec<&(usize, f64, &str)>, Vec<_>) = pts.iter().partition(|p| p.0 <= half);

    let offset = |alpha: f64| -> f64 {
        inner.iter().map(|p| alpha * p.0 as f64 - p.1).fold(0.0, f64::max)
    };
    let slack = |alpha: f64| -> f64 {
        outer.iter().map(|p| p.1 - alpha * p.0 as f64).fold(f64::INFINITY, f64::min) + offset(alpha)
    };

    let mut alpha = 0.0;
    if !outer.is_empty() {
        let mut lo = 0.0f64;
        let mut hi = outer.iter().map(|p| p.1).fold(0.0, f64::max) + 1.0;
        debug_assert!(slack(lo) >= 0.0 && slack(hi) < 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if slack(mid) >= 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-14 * hi.max(1.0) {
                break;
            }
        }
        alpha = lo;
    }
    let c = offset(alpha);
    let (witness, wval) = pts
        .iter()
        .map(|p| (p.2, p.1 - alpha * p.0 as f64))
        .fold((pts[0].2, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
    let max_sphere_ratio = pts.iter().filter(|p| p.0 == n).map(|p| p.1).fold(0.0, f64::max);
    let verdict = if alpha >= th.alpha_min && c <= th.c_max {
        Verdict::Growing
    } else if max_sphere_ratio <= th.flat_tol {
        Verdict::Flat
    } else {
        Verdict::Inconclusive
    };
    Ok(GrowthFit {
        index: index.to_string(),
        alpha,
        c,
        witness_min: witness.to_string(),
        witness_value: wval,
        max_sphere_ratio,
        verdict,
        radius: profile.radius,
        words: profile.records.len(),
        skipped_words: profile.skipped(),
        alpha_min: th.alpha_min,
        c_max: th.c_max,
        flat_tol: th.flat_tol,
        caveat: ESTIMATE_CAVEAT.into(),
    })
}

/// Growth of the full ratio `sigma_1 / sigma_d` (quasi-isometric embedding test).
pub fn qie_report(rep: &Rep, radius: usize, th: &Thresholds) -> Result<GrowthFit> {
    fit_growth(&gap_profile(rep, radius)?, GapIndex::Full, th)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexSetEstimate {
    pub indices: Vec<usize>,
    pub ball_radius: usize,
    pub dim: usize,
    pub fits: Vec<GrowthFit>,
    pub caveat: String,
}

impl IndexSetEstimate {
    /// Indices `k <= d/2`.
    pub fn lower_half(&self) -> Vec<usize> {
        self.indices.iter().copied().filter(|&k| 2 * k <= self.dim).collect()
    }
}

pub fn index_set_from_profile(profile: &GapProfile, th: &Thresholds) -> Result<IndexSetEstimate> {
    let mut fits = Vec::new();
    let mut indices = Vec::new();
    for k in 1..profile.dim {
        let fit = fit_growth(profile, GapIndex::Gap(k), th)?;
        if fit.verdict == Verdict::Growing {
            indices.push(k);
        }
        fits.push(fit);
    }
    Ok(IndexSetEstimate { indices, ball_radius: profile.radius, dim: profile.dim, fits, caveat: ESTIMATE_CAVEAT.into() })
}

/// Estimated set of `k` for which the gap of index `k` grows linearly on the ball.
pub fn index_set(rep: &Rep, radius: usize, th: &Thresholds) -> Result<IndexSetEstimate> {
    if radius < 2 {
        return Err(Error::Invalid("index set radius must be at least 2".into()));
    }
    index_set_from_profile(&gap_profile(rep, radius)?, th)
}

/// Words of a profile, parsed back (for re-verification).
pub fn profile_words(rep: &Rep, profile: &GapProfile) -> Result<Vec<Word>> {
    profile.records.iter().map(|r| rep.group().parse_word(&r.word)).collect()
}
