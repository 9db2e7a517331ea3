//! Flag parsing and the `key=value` config file.
//!
//! Every setting can come from a flag, from the config file, or from the
//! built-in default, in that order of precedence. Config keys are the long
//! flag names without the leading dashes.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rabi_ring::RingParameters;

use crate::failure::Failure;

#[derive(Debug, Parser)]
#[command(name = "rabi-ring", version, about = "Mean-field phases of a quantum Rabi ring with artificial flux")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        <Format as ValueEnum>::from_str(s, true)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    Below,
    Above,
    Both,
}

impl FromStr for SideArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        <SideArg as ValueEnum>::from_str(s, true)
    }
}

#[derive(Debug, Default, Args)]
pub struct CommonArgs {
    /// Number of cavities in the ring
    #[arg(long = "N", global = true)]
    pub sites: Option<usize>,
    /// Cavity frequency (the energy unit)
    #[arg(long, global = true)]
    pub omega: Option<f64>,
    /// Atomic level splitting
    #[arg(long, global = true)]
    pub delta: Option<f64>,
    /// Hopping amplitude J
    #[arg(long, global = true)]
    pub hop: Option<f64>,
    /// Flux per link; accepts a `pi` suffix, e.g. 0.49pi
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub theta: Option<String>,
    /// Scaled coupling g1
    #[arg(long, global = true)]
    pub g1: Option<f64>,
    /// Number of flux points in sweeps
    #[arg(long = "grid-theta", global = true)]
    pub grid_theta: Option<usize>,
    /// Number of coupling points in sweeps
    #[arg(long = "grid-g1", global = true)]
    pub grid_g1: Option<usize>,
    /// Seed of the random starts
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (0 = all cores)
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Random starts per solve, on top of the closed-form branches
    #[arg(long, global = true)]
    pub starts: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Output file (stdout if absent)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// key=value file with defaults for any of these flags
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rasterize the (theta, g1) plane
    PhaseDiagram {
        #[arg(long = "theta-min", allow_hyphen_values = true)]
        theta_min: Option<String>,
        #[arg(long = "theta-max", allow_hyphen_values = true)]
        theta_max: Option<String>,
        #[arg(long = "g1-min")]
        g1_min: Option<f64>,
        #[arg(long = "g1-max")]
        g1_max: Option<f64>,
    },
    /// Solve, classify and diagnose a single point
    Solve,
    /// Ring and subring currents along a flux sweep
    CurrentSweep {
        #[arg(long = "theta-min", allow_hyphen_values = true)]
        theta_min: Option<String>,
        #[arg(long = "theta-max", allow_hyphen_values = true)]
        theta_max: Option<String>,
    },
    /// Gap scaling exponents near g1c
    Scaling {
        #[arg(long, value_enum)]
        side: Option<SideArg>,
        #[arg(long = "delta-min")]
        delta_min: Option<f64>,
        #[arg(long = "delta-max")]
        delta_max: Option<f64>,
        /// Log-spaced points per side
        #[arg(long)]
        points: Option<usize>,
    },
    /// Count superradiant phase kinds per ring size
    Census {
        #[arg(long = "n-min")]
        n_min: Option<usize>,
        #[arg(long = "n-max")]
        n_max: Option<usize>,
    },
}

const KNOWN_KEYS: &[&str] = &[
    "N", "omega", "delta", "hop", "theta", "g1", "grid-theta", "grid-g1", "seed", "jobs", "starts", "format", "out",
    "theta-min", "theta-max", "g1-min", "g1-max", "side", "delta-min", "delta-max", "points", "n-min", "n-max",
];

/// Parsed `key=value` lines. Blank lines and `#` comments are skipped.
#[derive(Debug, Default)]
pub struct ConfigFile {
    values: HashMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, Failure> {
        let mut values = HashMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Failure::arguments(format!("config line {}: expected key=value", lineno + 1)));
            };
            let key = key.trim().replace('_', "-");
            let key = if key.eq_ignore_ascii_case("n") { "N".to_string() } else { key };
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(Failure::arguments(format!("config line {}: unknown key `{key}`", lineno + 1)));
            }
            values.insert(key, value.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::io(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }
}

/// Parses a flux such as `0.49pi`, `-pi`, `pi/2` or `1.2`.
pub fn parse_angle(text: &str) -> Result<f64, String> {
    let s = text.trim().to_ascii_lowercase();
    let bad = || format!("cannot parse angle `{text}`");
    let (head, divisor) = match s.split_once('/') {
        Some((h, d)) => (h.trim().to_string(), d.trim().parse::<f64>().map_err(|_| bad())?),
        None => (s.clone(), 1.0),
    };
    let value = match head.strip_suffix("pi") {
        Some(coef) => {
            let coef = coef.trim().trim_end_matches('*').trim();
            let c = match coef {
                "" | "+" => 1.0,
                "-" => -1.0,
                c => c.parse::<f64>().map_err(|_| bad())?,
            };
            c * PI
        }
        None => head.parse::<f64>().map_err(|_| bad())?,
    };
    let value = value / divisor;
    if value.is_finite() {
        Ok(value)
    } else {
        Err(bad())
    }
}

/// Flags merged with the config file.
pub struct Settings {
    file: ConfigFile,
}

impl Settings {
    pub fn new(common: &CommonArgs) -> Result<Self, Failure> {
        let file = match &common.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        Ok(Self { file })
    }

    pub fn get<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T, Failure> {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.file.raw(key) {
            Some(raw) => raw
                .parse()
                .map_err(|_| Failure::arguments(format!("config key `{key}`: cannot parse `{raw}`"))),
            None => Ok(default),
        }
    }

    pub fn explicit<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, Failure> {
        if flag.is_some() {
            return Ok(flag);
        }
        self.file
            .raw(key)
            .map(|raw| {
                raw.parse()
                    .map_err(|_| Failure::arguments(format!("config key `{key}`: cannot parse `{raw}`")))
            })
            .transpose()
    }

    pub fn angle(&self, flag: Option<&String>, key: &str, default: f64) -> Result<f64, Failure> {
        match flag.map(String::as_str).or_else(|| self.file.raw(key)) {
            Some(raw) => parse_angle(raw).map_err(Failure::arguments),
            None => Ok(default),
        }
    }

    pub fn out(&self, flag: Option<&PathBuf>) -> Option<PathBuf> {
        flag.cloned().or_else(|| self.file.raw("out").map(PathBuf::from))
    }

    /// Ring parameters; `g1_default` lets commands pick their own default coupling.
    pub fn params(&self, common: &CommonArgs, g1_default: f64) -> Result<RingParameters, Failure> {
        let d = RingParameters::default();
        let p = RingParameters {
            sites: self.get(common.sites, "N", d.sites)?,
            omega: self.get(common.omega, "omega", d.omega)?,
            delta: self.get(common.delta, "delta", d.delta)?,
            hop: self.get(common.hop, "hop", d.hop)?,
            theta: self.angle(common.theta.as_ref(), "theta", d.theta)?,
            g1: self.get(common.g1, "g1", g1_default)?,
        };
        p.validate().map_err(Failure::from)?;
        Ok(p)
    }
}
