//! Run configuration: defaults, then a `key=value` file, then `TQE_*`
//! environment variables, then command-line flags.

use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;
use tqe_core::optimize::{BBracket, B_MAX, B_MIN};

use crate::error::CliError;

pub const ENV_PREFIX: &str = "TQE_";

/// Recognized keys, shared by the file and (uppercased, prefixed) the
/// environment.
pub const KEYS: [&str; 6] = ["default_cutoff_tolerance", "k_max", "oracle_tolerance", "b_min", "b_max", "output_format"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown output format '{other}' (csv or json)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RunConfig {
    pub default_cutoff_tolerance: f64,
    pub k_max: usize,
    pub oracle_tolerance: f64,
    pub b_bracket: BBracket,
    /// `None` lets each command pick: tables default to CSV, single records
    /// to JSON.
    pub output_format: Option<Format>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            default_cutoff_tolerance: 1e-12,
            k_max: 4,
            oracle_tolerance: 1e-8,
            b_bracket: BBracket::default(),
            output_format: None,
        }
    }
}

/// Values given on the command line; `None` leaves the lower layers alone.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub default_cutoff_tolerance: Option<f64>,
    pub k_max: Option<usize>,
    pub oracle_tolerance: Option<f64>,
    pub b_min: Option<f64>,
    pub b_max: Option<f64>,
    pub output_format: Option<Format>,
}

fn parse<T: FromStr>(key: &str, value: &str, source: &str) -> Result<T, CliError> {
    value.trim().parse().map_err(|_| CliError::Config(format!("{source}: invalid value '{value}' for {key}")))
}

impl RunConfig {
    fn set(&mut self, key: &str, value: &str, source: &str) -> Result<(), CliError> {
        match key {
            "default_cutoff_tolerance" => self.default_cutoff_tolerance = parse(key, value, source)?,
            "k_max" => self.k_max = parse(key, value, source)?,
            "oracle_tolerance" => self.oracle_tolerance = parse(key, value, source)?,
            "b_min" => self.b_bracket.lo = parse(key, value, source)?,
            "b_max" => self.b_bracket.hi = parse(key, value, source)?,
            "output_format" => {
                self.output_format = Some(value.parse().map_err(|e: String| CliError::Config(format!("{source}: {e}")))?)
            }
            other => return Err(CliError::Config(format!("{source}: unknown key '{other}'"))),
        }
        Ok(())
    }

    /// Applies `key=value` lines; blank lines and `#` comments are skipped.
    pub fn apply_file_contents(&mut self, contents: &str, source: &str) -> Result<(), CliError> {
        for (i, line) in contents.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("{source}:{}: expected key=value", i + 1)))?;
            self.set(key.trim(), value, &format!("{source}:{}", i + 1))?;
        }
        Ok(())
    }

    pub fn apply_env(&mut self, env: &dyn Fn(&str) -> Option<String>) -> Result<(), CliError> {
        for key in KEYS {
            let name = format!("{ENV_PREFIX}{}", key.to_ascii_uppercase());
            if let Some(value) = env(&name) {
                self.set(key, &value, &name)?;
            }
        }
        Ok(())
    }

    pub fn apply_overrides(&mut self, o: &Overrides) {
        if let Some(v) = o.default_cutoff_tolerance {
            self.default_cutoff_tolerance = v;
        }
        if let Some(v) = o.k_max {
            self.k_max = v;
        }
        if let Some(v) = o.oracle_tolerance {
            self.oracle_tolerance = v;
        }
        if let Some(v) = o.b_min {
            self.b_bracket.lo = v;
        }
        if let Some(v) = o.b_max {
            self.b_bracket.hi = v;
        }
        if o.output_format.is_some() {
            self.output_format = o.output_format;
        }
    }

    /// Clamps the bracket into the supported range, then checks invariants.
    pub fn validate(mut self) -> Result<Self, CliError> {
        if !(self.default_cutoff_tolerance > 0.0 && self.oracle_tolerance > 0.0) {
            return Err(CliError::Config("tolerances must be positive".into()));
        }
        if self.k_max == 0 {
            return Err(CliError::Config("k_max must be at least 1".into()));
        }
        self.b_bracket.lo = clamp_b(self.b_bracket.lo)?;
        self.b_bracket.hi = clamp_b(self.b_bracket.hi)?;
        self.b_bracket = BBracket::new(self.b_bracket.lo, self.b_bracket.hi)?;
        Ok(self)
    }

    /// Layers file, environment and flags over the defaults.
    pub fn load(
        file: Option<&Path>,
        env: &dyn Fn(&str) -> Option<String>,
        overrides: &Overrides,
    ) -> Result<Self, CliError> {
        let mut config = RunConfig::default();
        if let Some(path) = file {
            let contents = fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            config.apply_file_contents(&contents, &path.display().to_string())?;
        }
        config.apply_env(env)?;
        config.apply_overrides(overrides);
        config.validate()
    }
}

/// `B` as accepted at the command line: finite and positive, pulled into
/// `[1e-9, 1e9]`.
pub fn clamp_b(b: f64) -> Result<f64, CliError> {
    if b.is_nan() || b <= 0.0 {
        return Err(CliError::Argument(format!("B must be positive, got {b}")));
    }
    Ok(b.clamp(B_MIN, B_MAX))
}
