//! `bsym`: verification suites for bilinear pseudodifferential symbols.
//!
//! Each command runs one pipeline, writes `report.json` plus CSV curves to the
//! output directory and exits 0 when every verdict passes, 2 when some are
//! indeterminate, 1 on a failure or runtime error and 64 on a usage error.

pub mod commands;
pub mod report;

use bilinear_calculus::symbol::{LoadedSymbol, SymbolSpec};
use bilinear_calculus::tolerances::Tolerances;
use clap::{Args, Parser, Subcommand};
use std::ffi::OsString;
use std::path::{Path, PathBuf};

pub use report::{Report, Status, Verdict};

/// Environment variable naming the default output directory.
pub const OUTPUT_ENV: &str = "BSYM_OUTPUT_DIR";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    BadFile { path: PathBuf, message: String },
    #[error(transparent)]
    Library(#[from] bilinear_calculus::Error),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::BadFile { .. } => 64,
            CliError::Io { .. } | CliError::Library(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "bsym",
    version,
    about = "Verification suites for bilinear symbol calculus"
)]
pub struct Cli {
    /// Output directory (default: $BSYM_OUTPUT_DIR, then ./bsym-out).
    #[arg(long, global = true)]
    pub output_dir: Option<PathBuf>,
    /// Tolerance override `key=value`; repeatable.
    #[arg(long = "tol", global = true, value_name = "KEY=VALUE")]
    pub tol: Vec<String>,
    #[arg(long, global = true, default_value_t = 7)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone, serde::Serialize)]
pub struct SymbolArg {
    /// JSON symbol file: `{"family": ..., "params": {...}}` or `{"expr": ..., "class": {...}}`.
    #[arg(long)]
    pub symbol: PathBuf,
}

#[derive(Debug, Subcommand, Clone, serde::Serialize)]
#[serde(rename_all = "kebab-case", tag = "command")]
pub enum Command {
    /// Seminorm table and shell stabilization for the declared class.
    VerifyClass {
        #[command(flatten)]
        symbol: SymbolArg,
        #[arg(long, default_value_t = 2)]
        max_order: usize,
        #[arg(long, default_value_t = 6)]
        shells: usize,
    },
    /// Apply the operator to seeded band-limited inputs.
    Apply {
        #[command(flatten)]
        symbol: SymbolArg,
        #[arg(long, default_value_t = 64)]
        points: usize,
        #[arg(long, default_value_t = 8)]
        band: usize,
    },
    /// Exact transpose, duality and route agreement, optional expansion.
    Transpose {
        #[command(flatten)]
        symbol: SymbolArg,
        #[arg(long, default_value_t = 1)]
        which: u8,
        /// Compare with the expansion truncated at this order.
        #[arg(long)]
        expand: Option<usize>,
        #[arg(long, default_value_t = 32)]
        points: usize,
        #[arg(long, default_value_t = 10)]
        trials: usize,
    },
    /// Remainder decay of the transpose expansion for orders 1..=order.
    Expand {
        #[command(flatten)]
        symbol: SymbolArg,
        #[arg(long, default_value_t = 1)]
        which: u8,
        #[arg(long, default_value_t = 2)]
        order: usize,
        #[arg(long, default_value_t = 256)]
        points: usize,
    },
    /// Borel-type summation of `a_0 <xi,eta>^{-j}`, j <= terms.
    AsymSum {
        /// Base symbol `a_0` (identity when omitted).
        #[arg(long)]
        symbol: Option<PathBuf>,
        #[arg(long, default_value_t = 4)]
        terms: usize,
    },
    /// Kernel decay regime of the order-`order` derivatives.
    KernelDecay {
        #[command(flatten)]
        symbol: SymbolArg,
        #[arg(long, default_value_t = 0)]
        order: u32,
        /// Nodes per axis (default 512 for power laws, 128 for refinement checks).
        #[arg(long)]
        points: Option<usize>,
        #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2)]
        half_period: f64,
        /// The symbol has compact frequency support.
        #[arg(long)]
        compact: bool,
    },
    /// Empirical norm sweeps and the L^2 x W^{s,inf} check.
    Bounds {
        #[command(flatten)]
        symbol: SymbolArg,
        #[arg(long, default_value_t = 4)]
        trials: usize,
    },
    /// Leibniz split, reconstruction, operator identity and ratio sweep.
    Leibniz {
        #[command(flatten)]
        symbol: SymbolArg,
        #[arg(long, default_value_t = 1.0)]
        m: f64,
    },
    /// Every suite on the built-in symbols.
    FullSuite,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::VerifyClass { .. } => "verify-class",
            Command::Apply { .. } => "apply",
            Command::Transpose { .. } => "transpose",
            Command::Expand { .. } => "expand",
            Command::AsymSum { .. } => "asym-sum",
            Command::KernelDecay { .. } => "kernel-decay",
            Command::Bounds { .. } => "bounds",
            Command::Leibniz { .. } => "leibniz",
            Command::FullSuite => "full-suite",
        }
    }
}

/// A symbol file resolved, with a short subject name for verdicts.
pub struct Subject {
    pub name: String,
    pub spec: SymbolSpec,
    pub symbol: LoadedSymbol,
}

pub fn load_symbol(path: &Path) -> Result<Subject, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let bad = |message: String| CliError::BadFile {
        path: path.to_path_buf(),
        message,
    };
    let spec = SymbolSpec::from_json(&text).map_err(|e| bad(e.to_string()))?;
    let symbol = spec.resolve().map_err(|e| bad(e.to_string()))?;
    let name = path
        .file_stem()
        .map_or_else(|| "symbol".into(), |s| s.to_string_lossy().into_owned());
    Ok(Subject { name, spec, symbol })
}

pub fn output_dir(cli: &Cli) -> PathBuf {
    cli.output_dir
        .clone()
        .or_else(|| std::env::var_os(OUTPUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("bsym-out"))
}

/// Parse, validate, run and write; returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 64 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(report) => {
            let dir = output_dir(&cli);
            match report.write(&dir) {
                Ok(files) => {
                    for v in &report.verdicts {
                        eprintln!(
                            "{:<14} {:<28} {}",
                            format!("{:?}", v.status).to_lowercase(),
                            v.check,
                            v.subject
                        );
                    }
                    for f in files {
                        eprintln!("wrote {}", f.display());
                    }
                    report.exit_code()
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    e.exit_code()
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Validate the configuration, then run the command.
pub fn execute(cli: &Cli) -> Result<Report, CliError> {
    let tol = Tolerances::default()
        .with_overrides(&cli.tol)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let mut report = commands::dispatch(&cli.command, &tol, cli.seed)?;
    report.finish();
    Ok(report)
}
