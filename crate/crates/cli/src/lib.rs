//! `szego-lab`: writes the data behind the curve, field, zero and saddle
//! computations as CSV or JSON, each file with a metadata sidecar.

pub mod commands;
pub mod error;
pub mod output;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

pub use error::CliError;
use output::{json_document, pretty, write_atomic, Dataset};

pub const SCHEMA: &str = "szego-lab/1";
/// Directory used when `--out` is not given.
pub const OUT_DIR_ENV: &str = "SZEGO_LAB_OUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SequenceKind {
    /// alpha_n = -n - c
    ShiftC,
    /// alpha_n = -n - e^{-t n}
    RateT,
}

#[derive(Debug, Clone, Parser)]
#[command(name = "szego-lab", version, about = "Data generator for the deformed Szegő curves")]
pub struct JobConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Output file; defaults to `<command>.<format>` in $SZEGO_LAB_OUT_DIR or
    /// the working directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Tolerance override `name=value`; may be repeated.
    #[arg(long = "tol", global = true, value_parser = parse_tolerance)]
    pub tolerances: Vec<(String, f64)>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Sampled curve gamma_t.
    Curve {
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        t: f64,
        #[arg(long, default_value_t = 512)]
        resolution: usize,
    },
    /// Real and off-axis branch cuts of the Schwarz function, quadratrix arcs.
    Cuts {
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        t: f64,
        #[arg(long, default_value_t = 2)]
        kmax: usize,
        #[arg(long, default_value_t = 64)]
        resolution: usize,
    },
    /// Harmonic moments by series and by contour quadrature.
    Moments {
        #[arg(long, default_value_t = 0.4, allow_hyphen_values = true)]
        t: f64,
        #[arg(long, default_value_t = -5, allow_hyphen_values = true)]
        kmin: i64,
        #[arg(long, default_value_t = 5, allow_hyphen_values = true)]
        kmax: i64,
    },
    /// Potential, field and region on a rectangular grid.
    Field {
        #[arg(long, default_value_t = 0.4, allow_hyphen_values = true)]
        t: f64,
        #[arg(long, default_value_t = 64)]
        resolution: usize,
        #[arg(long, default_value_t = -1.5, allow_hyphen_values = true)]
        xmin: f64,
        #[arg(long, default_value_t = 1.5, allow_hyphen_values = true)]
        xmax: f64,
        #[arg(long, default_value_t = -1.5, allow_hyphen_values = true)]
        ymin: f64,
        #[arg(long, default_value_t = 1.5, allow_hyphen_values = true)]
        ymax: f64,
    },
    /// Bundle of velocity streamlines inside and outside gamma_t.
    Flow {
        #[arg(long, default_value_t = 0.4, allow_hyphen_values = true)]
        t: f64,
        /// Seeds per region.
        #[arg(long, default_value_t = 4)]
        lines: usize,
        #[arg(long, default_value_t = 0.01, allow_hyphen_values = true)]
        step: f64,
        #[arg(long, default_value_t = 20_000)]
        max_steps: usize,
    },
    /// Scaled Laguerre zeros along a degree ladder, with distances to the curve.
    Zeros {
        #[arg(long, value_enum, default_value_t = SequenceKind::ShiftC)]
        kind: SequenceKind,
        /// `c` for shift-c, `t` for rate-t.
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        param: f64,
        #[arg(long, value_delimiter = ',', default_value = "50,100,200")]
        n: Vec<usize>,
    },
    /// Penner saddle points with identity residuals.
    Penner {
        #[arg(long, value_delimiter = ',', default_value = "10")]
        n: Vec<usize>,
        /// Coupling; defaults to T/n.
        #[arg(long, allow_hyphen_values = true)]
        g: Option<f64>,
        /// 't Hooft parameter used when --g is absent.
        #[arg(long = "t-hooft", default_value_t = 1.0, allow_hyphen_values = true)]
        t_hooft: f64,
    },
    /// Trajectory of the quadratic differential through the real crossing x0.
    Trajectory {
        #[arg(long, default_value_t = 0.4, allow_hyphen_values = true)]
        t: f64,
        #[arg(long, default_value_t = 1e-3, allow_hyphen_values = true)]
        step: f64,
        #[arg(long, default_value_t = 100_000)]
        max_steps: usize,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Curve { .. } => "curve",
            Command::Cuts { .. } => "cuts",
            Command::Moments { .. } => "moments",
            Command::Field { .. } => "field",
            Command::Flow { .. } => "flow",
            Command::Zeros { .. } => "zeros",
            Command::Penner { .. } => "penner",
            Command::Trajectory { .. } => "trajectory",
        }
    }
}

fn parse_tolerance(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected name=value, got `{s}`"))?;
    let v: f64 = v.parse().map_err(|e| format!("`{v}`: {e}"))?;
    if !(v > 0.0 && v.is_finite()) {
        return Err(format!("tolerance {k} must be positive, got {v}"));
    }
    Ok((k.to_string(), v))
}

/// Files written by one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub data: PathBuf,
    pub metadata: PathBuf,
    pub summary: Option<PathBuf>,
}

fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

/// Parse `args` (without the program name) and run the command.
pub fn run(args: &[String]) -> Result<Option<RunReport>, CliError> {
    let argv = std::iter::once("szego-lab".to_string()).chain(args.iter().cloned());
    let config = match JobConfig::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) if matches!(
            e.kind(),
            clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
        ) =>
        {
            print!("{e}");
            return Ok(None);
        }
        Err(e) => return Err(CliError::Usage(e.render().to_string())),
    };
    execute(&config, args).map(Some)
}

pub fn execute(config: &JobConfig, args: &[String]) -> Result<RunReport, CliError> {
    let tolerances: BTreeMap<String, f64> = config.tolerances.iter().cloned().collect();
    let (data, effective_tol) = commands::dispatch(&config.command, &tolerances)?;
    let name = config.command.name();
    let out = match &config.out {
        Some(p) => p.clone(),
        None => {
            let dir = std::env::var_os(OUT_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| ".".into());
            dir.join(format!("{name}.{}", config.format.extension()))
        }
    };
    let mut summary_path = None;
    match config.format {
        Format::Csv => {
            write_atomic(&out, &data.table.to_csv()?)?;
            if let Some(s) = &data.summary {
                let p = sidecar(&out, ".summary.json");
                let doc = json!({ "schema": SCHEMA, "command": name, "summary": s });
                write_atomic(&p, &pretty(&doc))?;
                summary_path = Some(p);
            }
        }
        Format::Json => write_atomic(&out, &pretty(&json_document(name, &data)))?,
    }
    let meta_path = sidecar(&out, ".meta.json");
    write_atomic(&meta_path, &pretty(&metadata(name, config, args, &effective_tol, &data)))?;
    Ok(RunReport {
        data: out,
        metadata: meta_path,
        summary: summary_path,
    })
}

fn metadata(
    name: &str,
    config: &JobConfig,
    args: &[String],
    tolerances: &BTreeMap<String, f64>,
    data: &Dataset,
) -> Value {
    json!({
        "schema": SCHEMA,
        "library": "szego",
        "version": env!("CARGO_PKG_VERSION"),
        "command": name,
        "command_line": args,
        "format": config.format.extension(),
        "tolerances": tolerances,
        "columns": data.table.columns,
        "rows": data.table.rows.len(),
    })
}
