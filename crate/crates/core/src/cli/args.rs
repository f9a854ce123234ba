use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use super::{
    execute, extract_run_config, AlgebraOp, BuildTarget, CliError, Command, RunConfig, EXIT_CONFIG, EXIT_OK,
};
use crate::algebra::BlockKind;
use crate::pingpong::DEFAULT_SAMPLES;
use crate::thresholds::Thresholds;

#[derive(Parser, Debug)]
#[command(name = "anosov", version, about = "Singular-value gap profiles, ping-pong certificates and block constructions")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Output directory.
    #[arg(long, short, global = true)]
    out: Option<PathBuf>,
    /// Seed for every random choice of the run.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// JSON file with threshold overrides.
    #[arg(long, global = true)]
    thresholds: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Singular-value profile over the word ball: CSV, growth fits, index set and SVG.
    GapProfile {
        #[arg(long)]
        rep: String,
        #[arg(long, short = 'N')]
        radius: usize,
        /// Ratio to plot: "full" or a gap index.
        #[arg(long)]
        svg_index: Option<String>,
    },
    /// Ping-pong certificate for a configuration file.
    CertifyPingpong {
        #[arg(long)]
        config: String,
        /// Overrides the radius in the configuration.
        #[arg(long, short = 'N')]
        radius: Option<usize>,
        /// Overrides the sample count in the configuration.
        #[arg(long, short = 'M')]
        samples: Option<usize>,
    },
    /// Writes a representation (or ping-pong configuration) JSON.
    #[command(subcommand)]
    Build(BuildCmd),
    /// Burnside span, irreducibility, density, genericity, centralizers, proximal data.
    #[command(subcommand)]
    Algebra(AlgebraCmd),
    /// Exact search for relations among short words.
    Freeness {
        #[arg(long)]
        rep: String,
        #[arg(long)]
        max_len: usize,
    },
    /// Re-runs the command recorded in an output file.
    Replay { file: PathBuf },
    /// Runs a run-configuration JSON document.
    Run { config: PathBuf },
}

#[derive(Subcommand, Debug)]
enum BuildCmd {
    Rho {
        #[arg(long)]
        rep: String,
        #[arg(long)]
        p: usize,
        #[arg(long, default_value_t = 0)]
        r: usize,
    },
    Psi {
        #[arg(long)]
        rep: String,
        #[arg(long)]
        p: usize,
        #[arg(long, default_value_t = 0)]
        r: usize,
    },
    Phi {
        #[arg(long)]
        rep: String,
        #[arg(long)]
        p: usize,
        #[arg(long, default_value_t = 0)]
        r: usize,
        #[arg(long, default_value_t = 3)]
        copies: usize,
        #[arg(long, default_value_t = 0.01)]
        conjugator_radius: f64,
    },
    Sp21 {
        #[arg(long, default_value_t = 1.0)]
        b: f64,
    },
    Sanov,
    SchottkySl3 {
        #[arg(long, default_value_t = 10)]
        lambda: i64,
    },
    SchottkySl2 {
        #[arg(long)]
        lambda: String,
    },
    SchottkyPingpong {
        #[arg(long)]
        lambda: String,
        #[arg(long, default_value_t = 0.1)]
        set_radius: f64,
        #[arg(long)]
        alpha: f64,
        #[arg(long, short = 'N', default_value_t = 6)]
        radius: usize,
        #[arg(long, short = 'M', default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
    },
}

#[derive(Subcommand, Debug)]
enum AlgebraCmd {
    Burnside {
        #[arg(long)]
        rep: String,
        #[arg(long)]
        max_len: usize,
    },
    Refute {
        #[arg(long)]
        rep: String,
        #[arg(long)]
        max_len: usize,
        #[arg(long, default_value_t = 4)]
        trials: usize,
    },
    Zariski {
        #[arg(long)]
        rep: String,
        #[arg(long)]
        max_len: usize,
    },
    Genericity {
        #[arg(long)]
        input: String,
    },
    Centralizer {
        #[arg(long, value_parser = parse_kind)]
        which: BlockKind,
        #[arg(long)]
        p: usize,
        #[arg(long, default_value_t = 0)]
        r: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        rep: Option<String>,
    },
    Proximal {
        #[arg(long)]
        rep: String,
        #[arg(long)]
        word: String,
    },
}

fn parse_kind(s: &str) -> Result<BlockKind, String> {
    match s {
        "rho" => Ok(BlockKind::Rho),
        "psi" => Ok(BlockKind::Psi),
        _ => Err(format!("expected rho or psi, got {s:?}")),
    }
}

fn peek(path: &str) -> Result<serde_json::Value, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::config(format!("{path}: {e}")))?;
    serde_json::from_str(&text).map_err(|e| CliError::config(format!("{path}: {e}")))
}

fn load_thresholds(path: &Option<PathBuf>) -> Result<Thresholds, CliError> {
    match path {
        None => Ok(Thresholds::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::config(format!("{}: {e}", p.display())))?;
            let t: Thresholds = serde_json::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", p.display())))?;
            t.validate()?;
            Ok(t)
        }
    }
}

fn to_run_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let (command, radius, samples, file_seed) = match &cli.cmd {
        Cmd::GapProfile { rep, radius, svg_index } => {
            (Command::GapProfile { rep: rep.clone(), svg_index: svg_index.clone() }, Some(*radius), None, None)
        }
        Cmd::CertifyPingpong { config, radius, samples } => {
            let v = peek(config)?;
            let get = |k: &str| v.get(k).and_then(|x| x.as_u64());
            let radius = radius.or(get("radius").map(|x| x as usize));
            let samples = samples.or(get("samples").map(|x| x as usize)).or(Some(DEFAULT_SAMPLES));
            (Command::CertifyPingpong { config: config.clone() }, radius, samples, Some(get("seed").unwrap_or(0)))
        }
        Cmd::Build(b) => {
            let (target, radius, samples) = match b {
                BuildCmd::Rho { rep, p, r } => (BuildTarget::Rho { rep: rep.clone(), p: *p, r: *r }, None, None),
                BuildCmd::Psi { rep, p, r } => (BuildTarget::Psi { rep: rep.clone(), p: *p, r: *r }, None, None),
                BuildCmd::Phi { rep, p, r, copies, conjugator_radius } => (
                    BuildTarget::Phi { rep: rep.clone(), p: *p, r: *r, copies: *copies, conjugator_radius: *conjugator_radius },
                    None,
                    None,
                ),
                BuildCmd::Sp21 { b } => (BuildTarget::Sp21 { b: *b }, None, None),
                BuildCmd::Sanov => (BuildTarget::Sanov, None, None),
                BuildCmd::SchottkySl3 { lambda } => (BuildTarget::SchottkySl3 { lambda: *lambda }, None, None),
                BuildCmd::SchottkySl2 { lambda } => (BuildTarget::SchottkySl2 { lambda: lambda.clone() }, None, None),
                BuildCmd::SchottkyPingpong { lambda, set_radius, alpha, radius, samples } => (
                    BuildTarget::SchottkyPingpong { lambda: lambda.clone(), set_radius: *set_radius, alpha: *alpha },
                    Some(*radius),
                    Some(*samples),
                ),
            };
            (Command::Build { target }, radius, samples, None)
        }
        Cmd::Algebra(a) => {
            let op = match a {
                AlgebraCmd::Burnside { rep, max_len } => AlgebraOp::Burnside { rep: rep.clone(), max_len: *max_len },
                AlgebraCmd::Refute { rep, max_len, trials } => {
                    AlgebraOp::Refute { rep: rep.clone(), max_len: *max_len, trials: *trials }
                }
                AlgebraCmd::Zariski { rep, max_len } => AlgebraOp::Zariski { rep: rep.clone(), max_len: *max_len },
                AlgebraCmd::Genericity { input } => AlgebraOp::Genericity { input: input.clone() },
                AlgebraCmd::Centralizer { which, p, r, d, rep } => {
                    AlgebraOp::Centralizer { which: *which, p: *p, r: *r, d: *d, rep: rep.clone() }
                }
                AlgebraCmd::Proximal { rep, word } => AlgebraOp::Proximal { rep: rep.clone(), word: word.clone() },
            };
            (Command::Algebra { op }, None, None, None)
        }
        Cmd::Freeness { rep, max_len } => (Command::Freeness { rep: rep.clone(), max_len: *max_len }, None, None, None),
        Cmd::Replay { .. } | Cmd::Run { .. } => unreachable!("handled by the caller"),
    };
    let mut cfg = RunConfig::new(command);
    cfg.radius = radius;
    cfg.samples = samples;
    cfg.seed = cli.seed.or(file_seed).unwrap_or(0);
    cfg.thresholds = load_thresholds(&cli.thresholds)?;
    cfg.record_inputs()?;
    Ok(cfg)
}

fn configure_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("ANOSOV_THREADS") {
        let n: usize = v
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::config(format!("ANOSOV_THREADS must be a positive integer, got {v:?}")))?;
        // A global pool may already exist when called in-process more than once.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<i32, CliError> {
    configure_threads()?;
    let out = cli.out.clone().ok_or_else(|| CliError::config("--out is required"))?;
    let cfg = match &cli.cmd {
        Cmd::Replay { file } => {
            let text = std::fs::read_to_string(file).map_err(|e| CliError::config(format!("{}: {e}", file.display())))?;
            extract_run_config(&text)?
        }
        Cmd::Run { config } => {
            let text = std::fs::read_to_string(config).map_err(|e| CliError::config(format!("{}: {e}", config.display())))?;
            let mut cfg: RunConfig =
                serde_json::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", config.display())))?;
            if cfg.inputs.is_empty() {
                cfg.record_inputs()?;
            }
            cfg
        }
        _ => to_run_config(&cli)?,
    };
    let outcome = execute(&cfg, &out)?;
    for f in &outcome.files {
        println!("wrote {}", f.display());
    }
    println!("{}", outcome.summary);
    Ok(outcome.code)
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.code
        }
    }
}
