use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::sets::{ang, ball_in, certified_disjoint, certified_subset, derive_seed, point_doc, ProjectiveSet};
use crate::error::{Error, Result};
use crate::linalg::{inner, svd, vnorm, CVector, Field, C64};
use crate::words::{map_ball, Rep, ScaledMat, Word};

pub const DEFAULT_SAMPLES: usize = 2048;
/// Failure witnesses kept in a certificate (the count is always complete).
pub const MAX_WITNESSES: usize = 64;

fn default_samples() -> usize {
    DEFAULT_SAMPLES
}

/// Input of [`check_pingpong`]: factor groups `Delta_1..Delta_l`, the sets
/// `C1`, `C2`, `M_2..M_l`, the rate `alpha`, ball radius and sampling data.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PingPongConfig {
    pub groups: Vec<Rep>,
    pub c1: ProjectiveSet,
    pub c2: ProjectiveSet,
    /// `M_2, ..., M_l` in order.
    pub m: Vec<ProjectiveSet>,
    pub alpha: f64,
    pub radius: usize,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
}

impl PingPongConfig {
    pub fn num_groups(&self) -> usize {
        self.groups.len()
    }

    pub fn field(&self) -> Field {
        self.groups.iter().fold(Field::Real, |f, g| f.join(g.field()))
    }

    /// SHA-256 of the canonical JSON encoding.
    pub fn hash(&self) -> String {
        let s = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(s.as_bytes()))
    }

    fn set_label(j: usize) -> String {
        format!("M{}", j + 2)
    }

    /// Checks the structural hypotheses on the data (not the two ping-pong conditions).
    pub fn validate(&self) -> Result<()> {
        let l = self.groups.len();
        if l < 3 {
            return Err(Error::Validation { clause: "l >= 3".into(), detail: format!("got {l} groups") });
        }
        if self.m.len() != l - 1 {
            return Err(Error::Validation {
                clause: "sets".into(),
                detail: format!("expected {} sets M_2..M_l, got {}", l - 1, self.m.len()),
            });
        }
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(Error::Validation { clause: "alpha > 0".into(), detail: format!("got {}", self.alpha) });
        }
        if self.samples == 0 || self.radius == 0 {
            return Err(Error::Validation { clause: "sampling".into(), detail: "radius and samples must be positive".into() });
        }
        let d = self.groups[0].dim();
        for (i, g) in self.groups.iter().enumerate() {
            if g.dim() != d {
                return Err(Error::DimensionMismatch(format!("group {} has dimension {}, group 1 has {d}", i + 1, g.dim())));
            }
        }
        let named = [("C1".to_string(), &self.c1), ("C2".to_string(), &self.c2)]
            .into_iter()
            .chain(self.m.iter().enumerate().map(|(j, s)| (Self::set_label(j), s)));
        for (name, s) in named {
            s.normalized().map_err(|e| Error::Validation { clause: name.clone(), detail: e.to_string() })?;
            let e = s.ambient_dim()?;
            if e != d {
                return Err(Error::DimensionMismatch(format!("set {name} lives in K^{e}, groups act on K^{d}")));
            }
        }
        let field = self.field();
        for (j, mj) in self.m.iter().enumerate() {
            let name = Self::set_label(j);
            if !certified_subset(mj, &self.c1) {
                let pts = mj.sample_seeded(self.seed, &name, field, self.samples)?;
                if let Some(x) = pts.iter().find(|x| self.c1.slack(x) < 0.0) {
                    return Err(Error::Validation {
                        clause: format!("{name} subset of C1"),
                        detail: format!("sampled point {:?} of {name} lies outside C1", fmt_point(x)),
                    });
                }
            }
            for (k, mk) in self.m.iter().enumerate().skip(j + 1) {
                if certified_disjoint(mj, mk) {
                    continue;
                }
                let other = Self::set_label(k);
                let pts = mj.sample_seeded(self.seed, &name, field, self.samples)?;
                let hit = pts.iter().any(|x| mk.slack(x) >= 0.0);
                return Err(Error::Validation {
                    clause: format!("{name} disjoint from {other}"),
                    detail: if hit {
                        "sampled common point found".into()
                    } else {
                        "disjointness cannot be certified from the primitives".into()
                    },
                });
            }
        }
        Ok(())
    }
}

fn fmt_point(x: &CVector) -> Vec<[f64; 2]> {
    x.iter().map(|z| [z.re, z.im]).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PingPongVerdict {
    Pass,
    Fail,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    Containment,
    Growth,
}

/// A violated inequality, re-checkable from the recorded data.
///
/// For containment `observed` is the target's membership slack at `gamma x` and
/// `required` is 0; for growth `observed = log(|gamma x| / |x|)` and `required = alpha |gamma|`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub condition: String,
    /// 1-based index of the group containing `gamma`.
    pub group: usize,
    pub word: String,
    pub word_length: usize,
    pub source: String,
    pub target: String,
    #[serde(with = "point_doc")]
    pub point: CVector,
    pub kind: CheckKind,
    pub observed: f64,
    pub required: f64,
}

impl Witness {
    pub fn slack(&self) -> f64 {
        self.observed - self.required
    }
}

/// Summary of the sufficient analytic containment test for ball sources.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalyticSummary {
    /// (element, source) pairs whose source is a union of balls.
    pub pairs: u64,
    pub certified_containment: u64,
    pub certified_growth: u64,
    /// True when every pair was certified on both counts and no pair had a non-ball source.
    pub all_certified: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub verdict: PingPongVerdict,
    /// Minimum slack over all sampled checks.
    pub margin: f64,
    pub containment_margin: f64,
    pub growth_margin: f64,
    pub checks: u64,
    pub failure_count: u64,
    pub failures: Vec<Witness>,
    pub analytic: AnalyticSummary,
    pub alpha: f64,
    pub radius: usize,
    pub samples: usize,
    pub seed: u64,
    pub config_hash: String,
    pub caveat: String,
}

pub const PINGPONG_CAVEAT: &str = "conditions are checked on group elements of word length <= radius and on seeded samples \
of the source sets; the analytic summary covers ball sources only";

struct Element {
    group: usize,
    word: Word,
    text: String,
    m: ScaledMat,
}

fn elements(cfg: &PingPongConfig, group: usize) -> Vec<Element> {
    let rep = &cfg.groups[group];
    let alphabet = rep.group().alphabet();
    map_ball(rep, &alphabet, cfg.radius, |_, m| m.clone())
        .into_iter()
        .filter(|(w, _)| !w.is_identity())
        .map(|(w, m)| Element { group, text: rep.group().format_word(&w), word: w, m })
        .collect()
}

struct Task<'a> {
    condition: &'static str,
    source: (String, &'a ProjectiveSet),
    target: (String, &'a ProjectiveSet),
}

#[derive(Default)]
struct Partial {
    checks: u64,
    cont: f64,
    growth: f64,
    failures: u64,
    witnesses: Vec<Witness>,
    pairs: u64,
    cert_cont: u64,
    cert_growth: u64,
    non_ball: bool,
}

fn log_norm_ratio(m: &ScaledMat, x: &CVector) -> f64 {
    let y = m.mat.apply(x);
    vnorm(&y).ln() + m.log_scale - vnorm(x).ln()
}

/// Analytic bound for a ball source: returns (containment certified, growth certified).
fn analytic(el: &Element, c: &CVector, r: f64, target: &ProjectiveSet, alpha: f64) -> Result<(bool, bool)> {
    let s = svd(&el.m.mat)?;
    let v1 = s.right.data().row(0).adjoint();
    let delta = (ang(inner(&v1, c).norm()) - ang(r)).max(0.0).sin();
    if delta <= 0.0 {
        return Ok((false, false));
    }
    let log_s1 = s.sigmas[0].ln() + el.m.log_scale;
    let growth = log_s1 + delta.ln() >= alpha * el.word.len() as f64;
    let rho = s.sigmas.get(1).map_or(0.0, |s2| s2 / s.sigmas[0]) / delta;
    let contained = rho < 1.0 && {
        let top = s.left.data().column(0).into_owned();
        ball_in(&top, rho, target)
    };
    Ok((contained, growth))
}

fn run_pair(cfg: &PingPongConfig, el: &Element, task: &Task, pts: &[CVector], acc: &mut Partial) -> Result<()> {
    let bound = cfg.alpha * el.word.len() as f64;
    for x in pts {
        acc.checks += 1;
        let y = el.m.mat.apply(x);
        let yn = vnorm(&y);
        let cont = if yn > 0.0 { task.target.1.slack(&(&y / C64::new(yn, 0.0))) } else { f64::NEG_INFINITY };
        let growth = log_norm_ratio(&el.m, x);
        acc.cont = acc.cont.min(cont);
        acc.growth = acc.growth.min(growth - bound);
        for (kind, observed, required) in [(CheckKind::Containment, cont, 0.0), (CheckKind::Growth, growth, bound)] {
            if observed - required > 0.0 {
                continue;
            }
            acc.failures += 1;
            if acc.witnesses.len() < MAX_WITNESSES {
                acc.witnesses.push(Witness {
                    condition: task.condition.into(),
                    group: el.group + 1,
                    word: el.text.clone(),
                    word_length: el.word.len(),
                    source: task.source.0.clone(),
                    target: task.target.0.clone(),
                    point: x.clone(),
                    kind,
                    observed,
                    required,
                });
            }
        }
    }
    let prims = task.source.1.primitives();
    if prims.iter().all(|p| matches!(p, ProjectiveSet::Ball { .. })) {
        acc.pairs += 1;
        let mut cc = true;
        let mut cg = true;
        for p in prims {
            if let ProjectiveSet::Ball { center, radius } = p {
                let (a, b) = analytic(el, center, *radius, task.target.1, cfg.alpha)?;
                cc &= a;
                cg &= b;
            }
        }
        acc.cert_cont += cc as u64;
        acc.cert_growth += cg as u64;
    } else {
        acc.non_ball = true;
    }
    Ok(())
}

/// Checks conditions (i) and (ii) on all nonidentity elements of length `<= radius`
/// in each group and `samples` seeded points of each source set.
pub fn check_pingpong(cfg: &PingPongConfig) -> Result<Certificate> {
    cfg.validate()?;
    let field = cfg.field();
    let l = cfg.num_groups();
    let c1_pts = cfg.c1.sample_seeded(cfg.seed, "C1", field, cfg.samples)?;
    let c2_pts = cfg.c2.sample_seeded(cfg.seed, "C2", field, cfg.samples)?;
    let m_pts: Vec<Vec<CVector>> = cfg
        .m
        .iter()
        .enumerate()
        .map(|(j, s)| s.sample_seeded(cfg.seed, &PingPongConfig::set_label(j), field, cfg.samples))
        .collect::<Result<_>>()?;

    // (element, task, points) jobs in a fixed order.
    let mut jobs: Vec<(Element, Vec<(Task, &[CVector])>)> = Vec::new();
    for el in elements(cfg, 0) {
        let t = Task { condition: "i", source: ("C1".into(), &cfg.c1), target: ("C2".into(), &cfg.c2) };
        jobs.push((el, vec![(t, &c1_pts[..])]));
    }
    for i in 1..l {
        let target = (PingPongConfig::set_label(i - 1), &cfg.m[i - 1]);
        for el in elements(cfg, i) {
            let mut tasks = vec![(
                Task { condition: "ii", source: ("C2".into(), &cfg.c2), target: target.clone() },
                &c2_pts[..],
            )];
            for j in 1..l {
                if j != i {
                    let src = (PingPongConfig::set_label(j - 1), &cfg.m[j - 1]);
                    tasks.push((Task { condition: "ii", source: src, target: target.clone() }, &m_pts[j - 1][..]));
                }
            }
            jobs.push((el, tasks));
        }
    }

    let parts: Vec<Partial> = jobs
        .par_iter()
        .map(|(el, tasks)| {
            let mut acc = Partial { cont: f64::INFINITY, growth: f64::INFINITY, ..Default::default() };
            for (t, pts) in tasks {
                run_pair(cfg, el, t, pts, &mut acc)?;
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;

    let mut total = Partial { cont: f64::INFINITY, growth: f64::INFINITY, ..Default::default() };
    for p in parts {
        total.checks += p.checks;
        total.cont = total.cont.min(p.cont);
        total.growth = total.growth.min(p.growth);
        total.failures += p.failures;
        for w in p.witnesses {
            if total.witnesses.len() < MAX_WITNESSES {
                total.witnesses.push(w);
            }
        }
        total.pairs += p.pairs;
        total.cert_cont += p.cert_cont;
        total.cert_growth += p.cert_growth;
        total.non_ball |= p.non_ball;
    }
    let margin = total.cont.min(total.growth);
    let verdict = if total.failures == 0 && margin > 0.0 { PingPongVerdict::Pass } else { PingPongVerdict::Fail };
    Ok(Certificate {
        verdict,
        margin,
        containment_margin: total.cont,
        growth_margin: total.growth,
        checks: total.checks,
        failure_count: total.failures,
        failures: total.witnesses,
        analytic: AnalyticSummary {
            pairs: total.pairs,
            certified_containment: total.cert_cont,
            certified_growth: total.cert_growth,
            all_certified: !total.non_ball && total.cert_cont == total.pairs && total.cert_growth == total.pairs,
        },
        alpha: cfg.alpha,
        radius: cfg.radius,
        samples: cfg.samples,
        seed: cfg.seed,
        config_hash: cfg.hash(),
        caveat: PINGPONG_CAVEAT.into(),
    })
}

/// Recomputes a witness from the configuration; returns the fresh `(observed, required)`.
pub fn recheck_witness(cfg: &PingPongConfig, w: &Witness) -> Result<(f64, f64)> {
    let rep = cfg
        .groups
        .get(w.group.wrapping_sub(1))
        .ok_or_else(|| Error::Invalid(format!("witness names group {}", w.group)))?;
    let word = rep.group().parse_word(&w.word)?;
    let m = rep.evaluate_scaled(&word)?;
    let target = if w.target == "C2" {
        &cfg.c2
    } else {
        let j: usize = w
            .target
            .strip_prefix('M')
            .and_then(|s| s.parse().ok())
            .filter(|&j| j >= 2 && j < cfg.m.len() + 2)
            .ok_or_else(|| Error::Invalid(format!("unknown target set {:?}", w.target)))?;
        &cfg.m[j - 2]
    };
    Ok(match w.kind {
        CheckKind::Containment => {
            let y = m.mat.apply(&w.point);
            let n = vnorm(&y);
            (target.slack(&(&y / C64::new(n, 0.0))), 0.0)
        }
        CheckKind::Growth => (log_norm_ratio(&m, &w.point), cfg.alpha * word.len() as f64),
    })
}

/// Largest `alpha` the sampled growth checks would accept: the minimum over elements and
/// source points of `log(|gamma x| / |x|) / |gamma|`.
pub fn suggest_alpha(cfg: &PingPongConfig) -> Result<f64> {
    let mut probe = cfg.clone();
    probe.alpha = 1.0;
    probe.validate()?;
    let field = cfg.field();
    let l = cfg.num_groups();
    let mut best = f64::INFINITY;
    for g in 0..l {
        let sources: Vec<(String, &ProjectiveSet)> = if g == 0 {
            vec![("C1".into(), &cfg.c1)]
        } else {
            let mut v = vec![("C2".to_string(), &cfg.c2)];
            for j in 1..l {
                if j != g {
                    v.push((PingPongConfig::set_label(j - 1), &cfg.m[j - 1]));
                }
            }
            v
        };
        let els = elements(cfg, g);
        for (name, s) in sources {
            let pts = s.sample_seeded(cfg.seed, &name, field, cfg.samples)?;
            for el in &els {
                for x in &pts {
                    best = best.min(log_norm_ratio(&el.m, x) / el.word.len() as f64);
                }
            }
        }
    }
    Ok(best)
}

/// Outcome of checking the product inequality on random alternating products.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductSpotCheck {
    pub products: usize,
    pub failures: usize,
    /// Minimum of `log(|delta_1 ... delta_r v| / |v|) - alpha * sum |delta_i|`.
    pub min_slack: f64,
}

/// Draws `count` products `delta_1 ... delta_r` (`r <= max_syllables`) of nonidentity elements
/// of length `<= radius` from cyclically distinct groups, applies them to a seeded point of
/// `C1` (if the last syllable lies in group 1) or `C2`, and checks the accumulated norm growth.
pub fn spot_check_products(cfg: &PingPongConfig, count: usize, max_syllables: usize, seed: u64) -> Result<ProductSpotCheck> {
    cfg.validate()?;
    if max_syllables == 0 {
        return Err(Error::Invalid("max_syllables must be positive".into()));
    }
    let field = cfg.field();
    let l = cfg.num_groups();
    let els: Vec<Vec<Element>> = (0..l).map(|g| elements(cfg, g)).collect();
    let c1_pts = cfg.c1.sample_seeded(cfg.seed, "C1", field, cfg.samples)?;
    let c2_pts = cfg.c2.sample_seeded(cfg.seed, "C2", field, cfg.samples)?;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, "products"));
    let mut failures = 0;
    let mut min_slack = f64::INFINITY;
    for _ in 0..count {
        let r = rng.random_range(1..=max_syllables);
        let mut groups = Vec::with_capacity(r);
        for k in 0..r {
            let g = loop {
                let g = rng.random_range(0..l);
                // Consecutive syllables lie in different groups.
                if k == 0 || g != groups[k - 1] {
                    break g;
                }
            };
            groups.push(g);
        }
        let picks: Vec<&Element> = groups.iter().map(|&g| &els[g][rng.random_range(0..els[g].len())]).collect();
        let last = *groups.last().expect("nonempty");
        let pool = if last == 0 { &c1_pts } else { &c2_pts };
        let mut v = pool[rng.random_range(0..pool.len())].clone();
        let mut log_gain = 0.0;
        let mut total_len = 0usize;
        for el in picks.iter().rev() {
            let y = el.m.mat.apply(&v);
            let n = vnorm(&y);
            log_gain += n.ln() + el.m.log_scale;
            v = y / C64::new(n, 0.0);
            total_len += el.word.len();
        }
        let slack = log_gain - cfg.alpha * total_len as f64;
        min_slack = min_slack.min(slack);
        if slack <= 0.0 {
            failures += 1;
        }
    }
    Ok(ProductSpotCheck { products: count, failures, min_slack })
}
