//! Command-line arguments, the optional config file, and their merge.
//!
//! Precedence is flag, then config file, then the per-command default. The
//! config file holds one `key = value` per line (TOML), with keys named after
//! the long flags (`m-cap` or `m_cap`). List values may be written as strings
//! in flag syntax (`r0 = "0:0.99:100"`) or as arrays (`ns = [0.01, 0.1]`).

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use qreading::critical::{M_CAP, N_B_CAP};
use qreading::fock::TAIL_TOL;
use serde::Deserialize;

use crate::error::{flag_err, CliError, Result};
use crate::range::{parse_count, parse_counts, parse_reals};

#[derive(Debug, Clone, Parser)]
#[command(
    name = "qreading",
    version,
    about = "Error bounds and information gain for quantum reading of optical memories"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Bounds and information gain at one point, or over a sweep.
    Gain,
    /// The six reference rows of the gain table.
    Table,
    /// Critical signal number against r0, maximized over the bath.
    CriticalCurve,
    /// Critical signal number at r0 = 0 against N_S, with its approximation.
    CriticalEnergy,
    /// Cross-check the Gaussian formulas against the Fock-space oracle.
    Verify {
        /// Grid density.
        #[arg(long, value_enum)]
        grid: Option<GridDensity>,
    },
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Signal counts M (list or start:stop:points).
    #[arg(long, global = true, value_name = "LIST", allow_hyphen_values = true)]
    pub m: Option<String>,
    /// Mean photons per signal mode N_S.
    #[arg(long, global = true, value_name = "LIST", allow_hyphen_values = true)]
    pub ns: Option<String>,
    /// Pit reflectivity r0.
    #[arg(long, global = true, value_name = "LIST", allow_hyphen_values = true)]
    pub r0: Option<String>,
    /// Land reflectivity r1.
    #[arg(long, global = true, value_name = "LIST", allow_hyphen_values = true)]
    pub r1: Option<String>,
    /// Thermal photons per bath mode N_B.
    #[arg(long, global = true, value_name = "LIST", allow_hyphen_values = true)]
    pub nb: Option<String>,
    /// Write CSV here instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Largest M tried before a threshold is declared unbounded.
    #[arg(long, global = true, value_name = "N")]
    pub m_cap: Option<String>,
    /// Largest bath N_B searched when maximizing the critical number.
    #[arg(long, global = true, value_name = "X")]
    pub nb_cap: Option<f64>,
    /// Fixed Fock cutoff per mode for verify (default: tail rule).
    #[arg(long, global = true, value_name = "D")]
    pub cutoff: Option<usize>,
    /// Largest truncation loss tolerated by the Fock oracle.
    #[arg(long, global = true, value_name = "X")]
    pub tail_tol: Option<f64>,
    /// Optional key = value config file.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridDensity {
    #[default]
    Default,
    Fine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Gain,
    Table,
    CriticalCurve,
    CriticalEnergy,
    Verify,
}

/// A list-valued config entry.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum ListValue {
    Number(f64),
    Array(Vec<f64>),
    Text(String),
}

impl ListValue {
    fn to_flag_syntax(&self) -> String {
        match self {
            ListValue::Number(x) => x.to_string(),
            ListValue::Array(xs) => xs.iter().map(f64::to_string).collect::<Vec<_>>().join(","),
            ListValue::Text(s) => s.clone(),
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    m: Option<ListValue>,
    ns: Option<ListValue>,
    r0: Option<ListValue>,
    r1: Option<ListValue>,
    nb: Option<ListValue>,
    out: Option<PathBuf>,
    jobs: Option<usize>,
    #[serde(alias = "m-cap")]
    m_cap: Option<ListValue>,
    #[serde(alias = "nb-cap")]
    nb_cap: Option<f64>,
    cutoff: Option<usize>,
    #[serde(alias = "tail-tol")]
    tail_tol: Option<f64>,
    grid: Option<GridDensity>,
}

impl FileConfig {
    fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config {
            path: path.to_owned(),
            message: e.to_string(),
        })?;
        toml::from_str(&text).map_err(|e| CliError::Config {
            path: path.to_owned(),
            message: e.message().to_string(),
        })
    }
}

/// Fully resolved settings for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub mode: Mode,
    pub m: Vec<u64>,
    pub n_s: Vec<f64>,
    pub r0: Vec<f64>,
    pub r1: Vec<f64>,
    pub n_b: Vec<f64>,
    pub out: Option<PathBuf>,
    pub jobs: usize,
    pub m_cap: u64,
    pub n_b_cap: f64,
    pub cutoff: Option<usize>,
    pub tail_tol: f64,
    pub grid: GridDensity,
}

/// Reflectivity grid of the critical curve: 100 points on `[0, 0.99]`.
pub const DEFAULT_CURVE_R0: &str = "0:0.99:100";
pub const DEFAULT_CURVE_NS: &str = "0.01,0.1,0.5";
/// Energies for the `r0 = 0` comparison, step 0.05 on `[1, 2.6]`.
pub const DEFAULT_ENERGY_NS: &str = "1:2.6:33";

fn pick(flag: Option<&String>, file: Option<&ListValue>, default: Option<&str>) -> Option<String> {
    flag.cloned()
        .or_else(|| file.map(ListValue::to_flag_syntax))
        .or_else(|| default.map(str::to_string))
}

fn check_all(flag: &'static str, xs: &[f64], ok: impl Fn(f64) -> bool, domain: &str) -> Result<()> {
    match xs.iter().find(|&&x| !ok(x)) {
        Some(x) => Err(flag_err(flag, format!("{x} outside {domain}"))),
        None => Ok(()),
    }
}

impl SweepConfig {
    pub fn resolve(cli: &Cli) -> Result<Self> {
        let file = match &cli.common.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        let args = &cli.common;
        let (mode, flag_grid) = match &cli.command {
            Command::Gain => (Mode::Gain, None),
            Command::Table => (Mode::Table, None),
            Command::CriticalCurve => (Mode::CriticalCurve, None),
            Command::CriticalEnergy => (Mode::CriticalEnergy, None),
            Command::Verify { grid } => (Mode::Verify, *grid),
        };
        let (d_ns, d_r0) = match mode {
            Mode::CriticalCurve => (Some(DEFAULT_CURVE_NS), Some(DEFAULT_CURVE_R0)),
            Mode::CriticalEnergy => (Some(DEFAULT_ENERGY_NS), None),
            _ => (None, None),
        };

        let reals =
            |flag: &'static str, f: Option<&String>, c: Option<&ListValue>, d: Option<&str>| {
                pick(f, c, d).map_or(Ok(Vec::new()), |t| parse_reals(flag, &t))
            };
        let m = pick(args.m.as_ref(), file.m.as_ref(), None)
            .map_or(Ok(Vec::new()), |t| parse_counts("m", &t))?;
        let n_s = reals("ns", args.ns.as_ref(), file.ns.as_ref(), d_ns)?;
        let r0 = reals("r0", args.r0.as_ref(), file.r0.as_ref(), d_r0)?;
        let r1 = reals("r1", args.r1.as_ref(), file.r1.as_ref(), None)?;
        let n_b = reals("nb", args.nb.as_ref(), file.nb.as_ref(), None)?;

        let m_cap = match pick(args.m_cap.as_ref(), file.m_cap.as_ref(), None) {
            Some(t) => parse_count("m-cap", &t)?,
            None => M_CAP,
        };
        let jobs = args
            .jobs
            .or(file.jobs)
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
        let cfg = Self {
            mode,
            m,
            n_s,
            r0,
            r1,
            n_b,
            out: args.out.clone().or(file.out),
            jobs,
            m_cap,
            n_b_cap: args.nb_cap.or(file.nb_cap).unwrap_or(N_B_CAP),
            cutoff: args.cutoff.or(file.cutoff),
            tail_tol: args.tail_tol.or(file.tail_tol).unwrap_or(TAIL_TOL),
            grid: flag_grid.or(file.grid).unwrap_or_default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        if self.m.contains(&0) {
            return Err(flag_err("m", "signal count must be at least 1"));
        }
        check_all("ns", &self.n_s, |x| x > 0.0 && x.is_finite(), "(0, ∞)")?;
        check_all("r0", &self.r0, |x| (0.0..=1.0).contains(&x), "[0, 1]")?;
        check_all("r1", &self.r1, |x| (0.0..=1.0).contains(&x), "[0, 1]")?;
        check_all("nb", &self.n_b, |x| x >= 0.0 && x.is_finite(), "[0, ∞)")?;
        if self.jobs == 0 {
            return Err(flag_err("jobs", "need at least one worker"));
        }
        if self.m_cap == 0 {
            return Err(flag_err("m-cap", "must be at least 1"));
        }
        if !(self.n_b_cap > qreading::critical::N_B_GRID_MIN && self.n_b_cap.is_finite()) {
            return Err(flag_err(
                "nb-cap",
                format!("{} must exceed 1e-4", self.n_b_cap),
            ));
        }
        if matches!(self.cutoff, Some(d) if d < 2) {
            return Err(flag_err("cutoff", "must be at least 2"));
        }
        if !(self.tail_tol > 0.0 && self.tail_tol < 1.0) {
            return Err(flag_err(
                "tail-tol",
                format!("{} outside (0, 1)", self.tail_tol),
            ));
        }
        match self.mode {
            Mode::Gain => {
                for (flag, empty) in [
                    ("m", self.m.is_empty()),
                    ("ns", self.n_s.is_empty()),
                    ("r0", self.r0.is_empty()),
                    ("r1", self.r1.is_empty()),
                    ("nb", self.n_b.is_empty()),
                ] {
                    if empty {
                        return Err(flag_err(flag, "required by `gain`"));
                    }
                }
            }
            Mode::CriticalCurve => {
                check_all("r0", &self.r0, |x| x < 1.0, "[0, 1)")?;
            }
            Mode::CriticalEnergy => {
                check_all(
                    "ns",
                    &self.n_s,
                    |x| x >= 1.0,
                    "[1, ∞) (the r0 = 0 approximation)",
                )?;
            }
            Mode::Table | Mode::Verify => {}
        }
        Ok(())
    }
}
