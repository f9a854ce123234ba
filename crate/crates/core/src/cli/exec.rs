use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::{
    svg_metadata, AlgebraOp, BuildTarget, CliError, Command, OutputSink, RunConfig, EXIT_CERT_FAIL, EXIT_NUMERIC,
    EXIT_OK, MAX_SKIPPED_FRACTION,
};
use crate::algebra::{
    burnside_span_dim, centralizer_basis, genericity_check, invariant_subspace_refute, proximal_data,
    rank_one_proximal, verify_conjugate_family, zariski_density_heuristic, BlockKind, GenericityReport,
    GenericityVerdict, IrreducibilityReport,
};
use crate::constructions::families::{
    diagonal_schottky_sl2, generic_rational_orthogonal, sanov, schottky_sl3,
};
use crate::constructions::{sp21_rep, make_phi, make_psi, make_rho, BlockSpec};
use crate::gap::{fit_growth, gap_profile, index_set_from_profile, profile_csv, svg_scatter, GapIndex};
use crate::linalg::random::near_identity;
use crate::linalg::{CVector, Mat, C64};
use crate::pingpong::{check_pingpong, diagonal_schottky_config, PingPongConfig, PingPongVerdict};
use crate::words::{freeness_check_exact, parse_rational, RatMat, Rep};

/// Files written, exit code and a one-line summary.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub files: Vec<PathBuf>,
    pub summary: String,
}

/// Reads a JSON document, dropping an embedded `run_config`.
fn read_doc<T: DeserializeOwned>(path: &str) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::config(format!("{path}: {e}")))?;
    let mut v: serde_json::Value = serde_json::from_str(&text).map_err(|e| CliError::config(format!("{path}: {e}")))?;
    if let Some(obj) = v.as_object_mut() {
        obj.remove("run_config");
    }
    serde_json::from_value(v).map_err(|e| CliError::config(format!("{path}: {e}")))
}

fn read_rep(path: &str) -> Result<Rep, CliError> {
    read_doc(path)
}

fn require<T: Copy>(v: Option<T>, name: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::config(format!("{name} is required for this command")))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Scalar {
    Real(f64),
    Complex([f64; 2]),
}

fn to_vector(v: &[Scalar]) -> CVector {
    CVector::from_iterator(
        v.len(),
        v.iter().map(|s| match *s {
            Scalar::Real(x) => C64::new(x, 0.0),
            Scalar::Complex([re, im]) => C64::new(re, im),
        }),
    )
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GenericityInput {
    matrices: Vec<Mat>,
    omega0: Vec<Scalar>,
    omega1: Vec<Scalar>,
    /// Eigenvalue of the sample proximal element on `omega0`.
    #[serde(default = "default_lambda")]
    lambda: f64,
}

fn default_lambda() -> f64 {
    3.0
}

#[derive(Serialize)]
struct GenericityOutput<'a> {
    #[serde(flatten)]
    report: &'a GenericityReport,
    sample_lambda: f64,
    /// Irreducibility of the conjugates of the sample proximal element (only on pass).
    conjugate_family: Option<IrreducibilityReport>,
}

#[derive(Serialize)]
struct CentralizerOutput {
    which: BlockKind,
    p: usize,
    r: usize,
    d: usize,
    count: usize,
    basis: Vec<Mat>,
    /// Largest `|z g - g z|` over basis elements and generators of the construction on the input rep.
    max_commutator: Option<f64>,
}

#[derive(Serialize)]
struct ProximalOutput {
    word: String,
    #[serde(flatten)]
    data: crate::algebra::ProximalDoc,
}

#[derive(Serialize)]
struct FitsOutput {
    fits: Vec<crate::gap::GrowthFit>,
}

/// Runs `cfg`, writing outputs into `out`.
pub fn execute(cfg: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    cfg.validate()?;
    let th = &cfg.thresholds;
    let mut sink = OutputSink::new(out)?;
    let (code, summary) = match &cfg.command {
        Command::GapProfile { rep, svg_index } => {
            let rep = read_rep(rep)?;
            let radius = require(cfg.radius, "radius")?;
            let profile = gap_profile(&rep, radius)?;
            let mut fits = Vec::new();
            for k in 1..rep.dim() {
                fits.push(fit_growth(&profile, GapIndex::Gap(k), th)?);
            }
            let full = fit_growth(&profile, GapIndex::Full, th)?;
            fits.push(full.clone());
            let idx = index_set_from_profile(&profile, th)?;
            let plot = match svg_index.as_deref() {
                None | Some("full") => GapIndex::Full,
                Some(s) => {
                    let k: usize = s.parse().map_err(|_| CliError::config(format!("svg_index: expected \"full\" or an integer, got {s:?}")))?;
                    if k == 0 || k >= rep.dim() {
                        return Err(CliError::config(format!("svg_index: {k} is outside 1..{}", rep.dim() - 1)));
                    }
                    GapIndex::Gap(k)
                }
            };
            let plot_fit = match plot {
                GapIndex::Full => full,
                GapIndex::Gap(k) => fits[k - 1].clone(),
            };
            sink.write_csv("profile.csv", cfg, &profile_csv(&profile))?;
            sink.write_json("fits.json", cfg, &FitsOutput { fits })?;
            sink.write_json("index_set.json", cfg, &idx)?;
            let svg = svg_scatter(&profile, plot, &plot_fit);
            let svg = svg.replacen('\n', &format!("\n{}\n", svg_metadata(cfg)), 1);
            sink.write("profile.svg", &svg)?;
            let frac = profile.skipped_fraction();
            let code = if frac > MAX_SKIPPED_FRACTION { EXIT_NUMERIC } else { EXIT_OK };
            (code, format!("index set {:?}; {} words, {} skipped", idx.indices, profile.records.len(), profile.skipped()))
        }
        Command::CertifyPingpong { config } => {
            let mut pp: PingPongConfig = read_doc(config)?;
            pp.radius = require(cfg.radius, "radius")?;
            pp.samples = require(cfg.samples, "samples")?;
            pp.seed = cfg.seed;
            let cert = check_pingpong(&pp)?;
            sink.write_json("certificate.json", cfg, &cert)?;
            let code = if cert.verdict == PingPongVerdict::Pass { EXIT_OK } else { EXIT_CERT_FAIL };
            (code, format!("ping-pong {:?}: margin {:e}, {} failures", cert.verdict, cert.margin, cert.failure_count))
        }
        Command::Build { target } => build(cfg, target, &mut sink)?,
        Command::Algebra { op } => algebra(cfg, op, &mut sink)?,
        Command::Freeness { rep, max_len } => {
            let rep = read_rep(rep)?;
            let r = freeness_check_exact(&rep, *max_len)?;
            sink.write_json("freeness.json", cfg, &r)?;
            let code = if r.free_up_to_max_len { EXIT_OK } else { EXIT_CERT_FAIL };
            (code, format!("{} words checked, {} relations", r.words_checked, r.identities.len()))
        }
    };
    Ok(Outcome { code, files: sink.written, summary })
}

fn build(cfg: &RunConfig, target: &BuildTarget, sink: &mut OutputSink) -> Result<(i32, String), CliError> {
    let rep = match target {
        BuildTarget::Rho { rep, p, r } => {
            let base = read_rep(rep)?;
            make_rho(&base, &BlockSpec::new(*p, *r, base.dim())?)?
        }
        BuildTarget::Psi { rep, p, r } => {
            let base = read_rep(rep)?;
            make_psi(&base, &BlockSpec::new(*p, *r, base.dim())?)?
        }
        BuildTarget::Phi { rep, p, r, copies, conjugator_radius } => {
            let base = read_rep(rep)?;
            let spec = BlockSpec::new(*p, *r, base.dim())?;
            if !(conjugator_radius.is_finite() && *conjugator_radius >= 0.0) {
                return Err(CliError::config("conjugator_radius must be finite and nonnegative"));
            }
            let rho = make_rho(&base, &spec)?;
            let psi = make_psi(&base, &spec)?;
            let q = spec.q();
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let gs: Vec<Mat> = (0..*copies).map(|_| near_identity(&mut rng, q, base.field(), *conjugator_radius)).collect();
            // Anchors w_i = O^i for a fixed rational orthogonal O in general position.
            let o = generic_rational_orthogonal(q)?;
            let mut anchors = Vec::new();
            let mut acc = RatMat::identity(q);
            for _ in 1..*copies {
                acc = &acc * &o;
                anchors.push(acc.to_mat());
            }
            make_phi(&rho, &psi, &gs, &anchors)?
        }
        BuildTarget::Sp21 { b } => sp21_rep(*b, None)?,
        BuildTarget::Sanov => sanov(),
        BuildTarget::SchottkySl3 { lambda } => schottky_sl3(*lambda)?,
        BuildTarget::SchottkySl2 { lambda } => Rep::cyclic_exact(diagonal_schottky_sl2(&parse_rational(lambda)?)?)?,
        BuildTarget::SchottkyPingpong { lambda, set_radius, alpha } => {
            let pp = diagonal_schottky_config(
                &parse_rational(lambda)?,
                *set_radius,
                *alpha,
                require(cfg.radius, "radius")?,
                cfg.samples,
                cfg.seed,
            )?;
            pp.validate()?;
            sink.write_json("pingpong.json", cfg, &pp)?;
            return Ok((EXIT_OK, format!("ping-pong config with {} groups", pp.num_groups())));
        }
    };
    sink.write_json("rep.json", cfg, &rep)?;
    Ok((EXIT_OK, format!("rep of dimension {} with {} factors", rep.dim(), rep.factors().len())))
}

fn algebra(cfg: &RunConfig, op: &AlgebraOp, sink: &mut OutputSink) -> Result<(i32, String), CliError> {
    let th = &cfg.thresholds;
    let summary = match op {
        AlgebraOp::Burnside { rep, max_len } => {
            let r = burnside_span_dim(&read_rep(rep)?, *max_len, th)?;
            sink.write_json("burnside.json", cfg, &r)?;
            format!("span {} of {}", r.span_dim, r.d_squared)
        }
        AlgebraOp::Refute { rep, max_len, trials } => {
            let r = invariant_subspace_refute(&read_rep(rep)?, *max_len, *trials, cfg.seed, th)?;
            sink.write_json("refute.json", cfg, &r)?;
            serde_json::to_string(&r.verdict).expect("verdict serializes")
        }
        AlgebraOp::Zariski { rep, max_len } => {
            let r = zariski_density_heuristic(&read_rep(rep)?, *max_len, th)?;
            sink.write_json("zariski.json", cfg, &r)?;
            serde_json::to_string(&r.verdict).expect("verdict serializes")
        }
        AlgebraOp::Genericity { input } => {
            let doc: GenericityInput = read_doc(input)?;
            let (w0, w1) = (to_vector(&doc.omega0), to_vector(&doc.omega1));
            let report = genericity_check(&doc.matrices, &w0, &w1, th)?;
            let conjugate_family = if report.verdict == GenericityVerdict::Pass {
                let g = rank_one_proximal(&w0, &w1, doc.lambda)?;
                Some(verify_conjugate_family(&doc.matrices, &g, cfg.seed, th)?)
            } else {
                None
            };
            sink.write_json(
                "genericity.json",
                cfg,
                &GenericityOutput { report: &report, sample_lambda: doc.lambda, conjugate_family },
            )?;
            sink.write_csv("genericity.csv", cfg, &report.table_csv())?;
            serde_json::to_string(&report.verdict).expect("verdict serializes")
        }
        AlgebraOp::Centralizer { which, p, r, d, rep } => {
            let spec = BlockSpec::new(*p, *r, *d)?;
            let base = rep.as_deref().map(read_rep).transpose()?;
            let field = base.as_ref().map(|b| b.field()).unwrap_or(crate::linalg::Field::Real);
            let basis = centralizer_basis(&spec, *which, field)?;
            let max_commutator = match &base {
                Some(b) => {
                    let built = match which {
                        BlockKind::Rho => make_rho(b, &spec)?,
                        BlockKind::Psi => make_psi(b, &spec)?,
                    };
                    let mut worst: f64 = 0.0;
                    for f in built.factors() {
                        for g in &f.generators {
                            for z in &basis {
                                worst = worst.max((&(z * &g.matrix) - &(&g.matrix * z)).norm());
                            }
                        }
                    }
                    Some(worst)
                }
                None => None,
            };
            let count = basis.len();
            sink.write_json(
                "centralizer.json",
                cfg,
                &CentralizerOutput { which: *which, p: *p, r: *r, d: *d, count, basis, max_commutator },
            )?;
            format!("{count} basis elements")
        }
        AlgebraOp::Proximal { rep, word } => {
            let rep = read_rep(rep)?;
            let w = rep.group().parse_word(word)?;
            let m = rep.evaluate(&w)?;
            let data = proximal_data(&m, th)?.to_doc()?;
            let summary = format!("eigenvalue ratios {:e} (top), {:e} (bottom)", data.ratio_top, data.ratio_bottom);
            sink.write_json("proximal.json", cfg, &ProximalOutput { word: word.clone(), data })?;
            summary
        }
    };
    Ok((EXIT_OK, summary))
}
