//! Run configuration: flags, a flat `key = value` file, and validation.
//! Flags override the file; everything is checked before any computation.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dynsym_core::algebra::{fmt_rational, Lambda, Rational};
use dynsym_core::numerics::GridSpec;
use dynsym_core::systems::{Family, LsqConvention};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {reason}")]
    File { path: String, reason: String },
    #[error("config file line {line}: expected key = value, got {text:?}")]
    Syntax { line: usize, text: String },
    #[error("unknown key {0:?}")]
    UnknownKey(String),
    #[error("invalid value {value:?} for {key}: {reason}")]
    Value { key: String, value: String, reason: String },
}

fn bad(key: &str, value: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Value {
        key: key.into(),
        value: value.into(),
        reason: reason.into(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Verify,
    Spectrum,
    Validate,
    Report,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ConventionChoice {
    Half,
    Full,
    /// Pick the convention under which fewer printed relations fail.
    Auto,
}

#[derive(Debug, Parser)]
#[command(name = "dynsym", version, about = "Dynamical-symmetry verification and spectral validation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Check generator identities and the ladder algebra.
    Verify(Flags),
    /// Algebraic spectrum from the termination conditions.
    Spectrum(Flags),
    /// Algebraic, printed and numerical spectra side by side.
    Validate(Flags),
    /// Verification and validation in one document.
    Report(Flags),
}

impl Sub {
    pub fn split(self) -> (Command, Flags) {
        match self {
            Sub::Verify(f) => (Command::Verify, f),
            Sub::Spectrum(f) => (Command::Spectrum, f),
            Sub::Validate(f) => (Command::Validate, f),
            Sub::Report(f) => (Command::Report, f),
        }
    }
}

/// Raw flags, all optional so that a config file can fill them.
#[derive(Debug, Default, Clone, Args)]
pub struct Flags {
    /// Flat `key = value` file with the same keys as the flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// coulomb | oscillator
    #[arg(long)]
    pub system: Option<String>,
    #[arg(long)]
    pub dim: Option<String>,
    /// Rational such as 1/10, or `sym`.
    #[arg(long)]
    pub lambda: Option<String>,
    /// Number of levels, starting at n = 0.
    #[arg(long)]
    pub levels: Option<String>,
    /// Radial grid points.
    #[arg(long)]
    pub grid: Option<String>,
    /// Cartesian grid points per axis; 0 skips the Cartesian solve.
    #[arg(long = "cartesian-grid")]
    pub cartesian_grid: Option<String>,
    #[arg(long)]
    pub rmax: Option<String>,
    /// Cartesian box half-width for every level (default: chosen per level).
    #[arg(long = "box")]
    pub box_: Option<String>,
    /// Total degree bound of the structure-function fit.
    #[arg(long)]
    pub degree: Option<String>,
    /// Degree bound in lambda of the fit coefficients.
    #[arg(long = "lambda-degree")]
    pub lambda_degree: Option<String>,
    /// half | full | auto
    #[arg(long)]
    pub convention: Option<String>,
    /// json | csv | text
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Accept decimal lambda values (read exactly as decimals).
    #[arg(long)]
    pub approx: bool,
}

const KEYS: &[&str] = &[
    "system",
    "dim",
    "lambda",
    "levels",
    "grid",
    "cartesian-grid",
    "rmax",
    "box",
    "degree",
    "lambda-degree",
    "convention",
    "format",
    "out",
    "approx",
];

/// Parses a flat `key = value` file. `#` starts a comment.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line: i + 1,
            text: raw.into(),
        })?;
        let key = k.trim().replace('_', "-");
        if !KEYS.contains(&key.as_str()) {
            return Err(ConfigError::UnknownKey(key));
        }
        out.insert(key, v.trim().to_string());
    }
    Ok(out)
}

fn read_config(path: &Path) -> Result<BTreeMap<String, String>, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::File {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    parse_config_text(&text)
}

/// Lambda as given on the command line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LambdaArg {
    Symbolic,
    Value(Rational),
}

impl LambdaArg {
    pub fn to_lambda(&self) -> Lambda {
        match self {
            LambdaArg::Symbolic => Lambda::Symbolic,
            LambdaArg::Value(q) => Lambda::Value(q.clone()),
        }
    }

    pub fn label(&self) -> String {
        match self {
            LambdaArg::Symbolic => "sym".into(),
            LambdaArg::Value(q) => fmt_rational(q),
        }
    }
}

/// `sym`, an integer, `p/q`, or (with `approx`) a decimal such as `0.05` or
/// `1e-1`, read as the exact decimal fraction it spells.
pub fn parse_lambda(text: &str, approx: bool) -> Result<LambdaArg, ConfigError> {
    let t = text.trim();
    if matches!(t, "sym" | "symbolic" | "lam" | "lambda") {
        return Ok(LambdaArg::Symbolic);
    }
    let q = if let Ok(q) = Rational::from_str(t) {
        q
    } else if approx {
        parse_decimal(t).ok_or_else(|| bad("lambda", t, "not a number"))?
    } else if parse_decimal(t).is_some() {
        return Err(bad("lambda", t, "decimals need --approx; write a rational such as 1/10"));
    } else {
        return Err(bad("lambda", t, "expected sym, an integer or p/q"));
    };
    if q < Rational::from_integer(0.into()) {
        return Err(bad("lambda", t, "must be non-negative"));
    }
    Ok(LambdaArg::Value(q))
}

fn parse_decimal(t: &str) -> Option<Rational> {
    let (mant, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().ok()?),
        None => (t, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int}{frac}");
    let scale = exp - frac.len() as i32;
    let ten = Rational::from_integer(10.into());
    let mut q = Rational::from_str(if digits.is_empty() { "0" } else { &digits }).ok()?;
    q *= num_pow(&ten, scale);
    Some(if neg { -q } else { q })
}

fn num_pow(base: &Rational, e: i32) -> Rational {
    let mut out = Rational::from_integer(1.into());
    for _ in 0..e.unsigned_abs() {
        out *= base;
    }
    if e < 0 {
        out = Rational::from_integer(1.into()) / out;
    }
    out
}

/// Validated configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub system: Family,
    pub dim: usize,
    pub lambda: LambdaArg,
    pub levels: u32,
    pub grid: usize,
    pub cartesian_grid: usize,
    pub rmax: Option<f64>,
    pub box_half_width: Option<f64>,
    pub degree: u32,
    pub lambda_degree: u32,
    pub convention: ConventionChoice,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    /// Defaults for a command.
    pub fn new(command: Command, system: Family) -> Self {
        Self {
            command,
            system,
            dim: 2,
            lambda: match command {
                Command::Verify => LambdaArg::Symbolic,
                _ => LambdaArg::Value(Rational::from_integer(0.into())),
            },
            levels: 4,
            grid: 4000,
            cartesian_grid: 256,
            rmax: None,
            box_half_width: None,
            degree: 3,
            lambda_degree: 4,
            convention: ConventionChoice::Auto,
            format: Format::Json,
            out: None,
        }
    }

    /// Merges the config file (if any) under the flags and validates.
    pub fn from_flags(command: Command, flags: Flags) -> Result<Self, ConfigError> {
        let mut kv = match &flags.config {
            Some(p) => read_config(p)?,
            None => BTreeMap::new(),
        };
        let overrides = [
            ("system", flags.system),
            ("dim", flags.dim),
            ("lambda", flags.lambda),
            ("levels", flags.levels),
            ("grid", flags.grid),
            ("cartesian-grid", flags.cartesian_grid),
            ("rmax", flags.rmax),
            ("box", flags.box_),
            ("degree", flags.degree),
            ("lambda-degree", flags.lambda_degree),
            ("convention", flags.convention),
            ("format", flags.format),
            ("out", flags.out.map(|p| p.display().to_string())),
        ];
        for (k, v) in overrides {
            if let Some(v) = v {
                kv.insert(k.into(), v);
            }
        }
        if flags.approx {
            kv.insert("approx".into(), "true".into());
        }
        Self::from_map(command, &kv)
    }

    pub fn from_map(command: Command, kv: &BTreeMap<String, String>) -> Result<Self, ConfigError> {
        let get = |k: &str| kv.get(k).map(String::as_str);
        let system = match get("system").unwrap_or("coulomb") {
            "coulomb" => Family::Coulomb,
            "oscillator" => Family::Oscillator,
            other => return Err(bad("system", other, "expected coulomb or oscillator")),
        };
        let mut c = Self::new(command, system);
        let approx = match get("approx").unwrap_or("false") {
            "true" | "1" | "yes" => true,
            "false" | "0" | "no" => false,
            other => return Err(bad("approx", other, "expected true or false")),
        };
        if let Some(v) = get("dim") {
            c.dim = parse_int(v, "dim", 2, 6)?;
        }
        if let Some(v) = get("lambda") {
            c.lambda = parse_lambda(v, approx)?;
        }
        if matches!(command, Command::Validate | Command::Report | Command::Spectrum) && c.lambda == LambdaArg::Symbolic {
            return Err(bad("lambda", "sym", "this command needs a numeric lambda"));
        }
        if let Some(v) = get("levels") {
            c.levels = parse_int(v, "levels", 0, 50)? as u32;
        }
        if let Some(v) = get("grid") {
            c.grid = parse_int(v, "grid", GridSpec::MIN_POINTS, 200_000)?;
        }
        if let Some(v) = get("cartesian-grid") {
            c.cartesian_grid = parse_int(v, "cartesian-grid", 0, 512)?;
            if c.cartesian_grid != 0 && (c.cartesian_grid < GridSpec::MIN_POINTS || c.cartesian_grid % 2 == 1) {
                return Err(bad("cartesian-grid", v, "must be 0 or an even number >= 16"));
            }
        }
        if let Some(v) = get("rmax") {
            c.rmax = Some(parse_positive(v, "rmax")?);
        }
        if let Some(v) = get("box") {
            c.box_half_width = Some(parse_positive(v, "box")?);
        }
        if let Some(v) = get("degree") {
            c.degree = parse_int(v, "degree", 1, 6)? as u32;
        }
        if let Some(v) = get("lambda-degree") {
            c.lambda_degree = parse_int(v, "lambda-degree", 0, 8)? as u32;
        }
        if let Some(v) = get("convention") {
            c.convention = match v {
                "half" => ConventionChoice::Half,
                "full" => ConventionChoice::Full,
                "auto" => ConventionChoice::Auto,
                other => return Err(bad("convention", other, "expected half, full or auto")),
            };
        }
        if let Some(v) = get("format") {
            c.format = match v {
                "json" => Format::Json,
                "csv" => Format::Csv,
                "text" => Format::Text,
                other => return Err(bad("format", other, "expected json, csv or text")),
            };
        }
        if let Some(v) = get("out") {
            c.out = Some(PathBuf::from(v));
        }
        Ok(c)
    }

    pub fn lsq_fixed(&self) -> Option<LsqConvention> {
        match self.convention {
            ConventionChoice::Half => Some(LsqConvention::Half),
            ConventionChoice::Full => Some(LsqConvention::Full),
            ConventionChoice::Auto => None,
        }
    }
}

fn parse_int(v: &str, key: &str, lo: usize, hi: usize) -> Result<usize, ConfigError> {
    let n: usize = v.trim().parse().map_err(|_| bad(key, v, "not a non-negative integer"))?;
    if n < lo || n > hi {
        return Err(bad(key, v, format!("must lie in {lo}..={hi}")));
    }
    Ok(n)
}

fn parse_positive(v: &str, key: &str) -> Result<f64, ConfigError> {
    let x: f64 = v.trim().parse().map_err(|_| bad(key, v, "not a number"))?;
    if !(x.is_finite() && x > 0.0) {
        return Err(bad(key, v, "must be positive"));
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use dynsym_core::algebra::rat;

    #[test]
    fn lambda_forms() {
        assert_eq!(parse_lambda("1/10", false), Ok(LambdaArg::Value(rat(1, 10))));
        assert_eq!(parse_lambda("sym", false), Ok(LambdaArg::Symbolic));
        assert!(parse_lambda("0.1", false).is_err());
        assert_eq!(parse_lambda("0.1", true), Ok(LambdaArg::Value(rat(1, 10))));
        assert_eq!(parse_lambda("5e-2", true), Ok(LambdaArg::Value(rat(1, 20))));
        assert!(parse_lambda("-1/2", false).is_err());
    }

    #[test]
    fn file_then_flags() {
        let kv = parse_config_text("system = oscillator\n# comment\nlevels=3\nlambda = 1/20\n").unwrap();
        let c = RunConfig::from_map(Command::Validate, &kv).unwrap();
        assert_eq!((c.system, c.levels), (Family::Oscillator, 3));
        assert!(matches!(parse_config_text("colour = red"), Err(ConfigError::UnknownKey(_))));
    }

    #[test]
    fn dimension_one_is_rejected() {
        let kv = BTreeMap::from([("dim".to_string(), "1".to_string())]);
        assert!(RunConfig::from_map(Command::Verify, &kv).is_err());
    }
}
