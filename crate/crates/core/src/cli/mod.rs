//! Batch driver. Each invocation is described by a [`RunConfig`] that is embedded in
//! every file it writes, so `replay` can re-run it from any of its outputs.

mod args;
mod exec;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::algebra::BlockKind;
use crate::error::Error;
use crate::thresholds::Thresholds;

pub use args::run;
pub use exec::{execute, Outcome};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_CERT_FAIL: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;

/// Fraction of skipped words above which a profile counts as numerically degraded.
pub const MAX_SKIPPED_FRACTION: f64 = 0.01;

/// Complete description of one command run. The output directory is not part of it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    /// SHA-256 of each input file, keyed by path as given.
    #[serde(default)]
    pub inputs: BTreeMap<String, String>,
    #[serde(default)]
    pub radius: Option<usize>,
    #[serde(default)]
    pub samples: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub thresholds: Thresholds,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Command {
    GapProfile {
        rep: String,
        /// Ratio plotted in the SVG: `"full"` or a gap index.
        #[serde(default)]
        svg_index: Option<String>,
    },
    CertifyPingpong {
        config: String,
    },
    Build {
        target: BuildTarget,
    },
    Algebra {
        op: AlgebraOp,
    },
    Freeness {
        rep: String,
        max_len: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BuildTarget {
    Rho { rep: String, p: usize, r: usize },
    Psi { rep: String, p: usize, r: usize },
    /// `copies` factors; conjugators are seeded near-identity matrices.
    Phi { rep: String, p: usize, r: usize, copies: usize, conjugator_radius: f64 },
    Sp21 { b: f64 },
    Sanov,
    SchottkySl3 { lambda: i64 },
    /// Three cyclic factors; `lambda` is a rational such as `"100"` or `"101/100"`.
    SchottkySl2 { lambda: String },
    /// Ping-pong configuration for the three-factor Schottky group.
    SchottkyPingpong { lambda: String, set_radius: f64, alpha: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum AlgebraOp {
    Burnside { rep: String, max_len: usize },
    Refute { rep: String, max_len: usize, trials: usize },
    Zariski { rep: String, max_len: usize },
    Genericity { input: String },
    Centralizer {
        which: BlockKind,
        p: usize,
        r: usize,
        d: usize,
        #[serde(default)]
        rep: Option<String>,
    },
    Proximal { rep: String, word: String },
}

impl Command {
    /// Input files read by the command.
    pub fn input_paths(&self) -> Vec<&str> {
        match self {
            Command::GapProfile { rep, .. } | Command::Freeness { rep, .. } => vec![rep],
            Command::CertifyPingpong { config } => vec![config],
            Command::Build { target } => match target {
                BuildTarget::Rho { rep, .. } | BuildTarget::Psi { rep, .. } | BuildTarget::Phi { rep, .. } => vec![rep],
                _ => vec![],
            },
            Command::Algebra { op } => match op {
                AlgebraOp::Burnside { rep, .. }
                | AlgebraOp::Refute { rep, .. }
                | AlgebraOp::Zariski { rep, .. }
                | AlgebraOp::Proximal { rep, .. } => vec![rep],
                AlgebraOp::Genericity { input } => vec![input],
                AlgebraOp::Centralizer { rep, .. } => rep.iter().map(|s| s.as_str()).collect(),
            },
        }
    }
}

/// Failure of a command, with its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self { code: EXIT_CONFIG, message: message.into() }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Overflow(_) | Error::NonFinite | Error::NoConvergence => EXIT_NUMERIC,
            _ => EXIT_CONFIG,
        };
        Self { code, message: e.to_string() }
    }
}

pub(crate) fn file_digest(path: &Path) -> Result<String, CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self { command, inputs: BTreeMap::new(), radius: None, samples: None, seed: 0, thresholds: Thresholds::default() }
    }

    /// Records the digest of every input file.
    pub fn record_inputs(&mut self) -> Result<(), CliError> {
        let mut inputs = BTreeMap::new();
        for p in self.command.input_paths() {
            inputs.insert(p.to_string(), file_digest(Path::new(p))?);
        }
        self.inputs = inputs;
        Ok(())
    }

    /// Checks thresholds and that the input files still match their recorded digests.
    pub fn validate(&self) -> Result<(), CliError> {
        self.thresholds.validate()?;
        for p in self.command.input_paths() {
            let Some(want) = self.inputs.get(p) else {
                return Err(CliError::config(format!("inputs: no digest recorded for {p:?}")));
            };
            let got = file_digest(Path::new(p))?;
            if &got != want {
                return Err(CliError::config(format!("inputs: {p:?} changed since the run was recorded (sha256 {got}, recorded {want})")));
            }
        }
        Ok(())
    }

    pub fn to_compact_json(&self) -> String {
        serde_json::to_string(self).expect("run config serializes")
    }
}

const CSV_PREFIX: &str = "# run_config: ";
const SVG_OPEN: &str = "<metadata id=\"run_config\">";
const SVG_CLOSE: &str = "</metadata>";

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn xml_unescape(s: &str) -> String {
    s.replace("&lt;", "<").replace("&gt;", ">").replace("&amp;", "&")
}

pub(crate) fn svg_metadata(cfg: &RunConfig) -> String {
    format!("{SVG_OPEN}{}{SVG_CLOSE}", xml_escape(&cfg.to_compact_json()))
}

pub(crate) fn csv_header(cfg: &RunConfig) -> String {
    format!("{CSV_PREFIX}{}\n", cfg.to_compact_json())
}

/// Extracts the embedded run configuration from a JSON, CSV or SVG output file.
pub fn extract_run_config(text: &str) -> Result<RunConfig, CliError> {
    let raw = if let Some(line) = text.lines().next().and_then(|l| l.strip_prefix(CSV_PREFIX)) {
        serde_json::from_str(line)
    } else if let Some(start) = text.find(SVG_OPEN) {
        let rest = &text[start + SVG_OPEN.len()..];
        let end = rest.find(SVG_CLOSE).ok_or_else(|| CliError::config("unterminated run_config metadata"))?;
        serde_json::from_str(&xml_unescape(&rest[..end]))
    } else {
        let v: serde_json::Value = serde_json::from_str(text).map_err(|e| CliError::config(format!("not a recognised output file: {e}")))?;
        let rc = v.get("run_config").cloned().ok_or_else(|| CliError::config("no run_config found"))?;
        serde_json::from_value(rc)
    };
    raw.map_err(|e| CliError::config(format!("run_config: {e}")))
}

/// Output directory plus run configuration; writes are recorded in order.
pub struct OutputSink {
    pub dir: PathBuf,
    pub written: Vec<PathBuf>,
}

impl OutputSink {
    pub fn new(dir: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::config(format!("{}: {e}", dir.display())))?;
        Ok(Self { dir: dir.to_path_buf(), written: Vec::new() })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        std::fs::write(&path, contents).map_err(|e| CliError { code: EXIT_INTERNAL, message: format!("{}: {e}", path.display()) })?;
        self.written.push(path);
        Ok(())
    }

    /// Writes `value` (a JSON object) with the run configuration under `run_config`.
    pub fn write_json<T: Serialize>(&mut self, name: &str, cfg: &RunConfig, value: &T) -> Result<(), CliError> {
        let mut v = serde_json::to_value(value).map_err(|e| CliError { code: EXIT_INTERNAL, message: e.to_string() })?;
        let obj = v.as_object_mut().ok_or_else(|| CliError { code: EXIT_INTERNAL, message: "output is not an object".into() })?;
        obj.insert("run_config".into(), serde_json::to_value(cfg).expect("run config serializes"));
        let mut s = serde_json::to_string_pretty(&v).expect("value serializes");
        s.push('\n');
        self.write(name, &s)
    }

    pub fn write_csv(&mut self, name: &str, cfg: &RunConfig, body: &str) -> Result<(), CliError> {
        let mut s = csv_header(cfg);
        s.push_str(body);
        self.write(name, &s)
    }
}
