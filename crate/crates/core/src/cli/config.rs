use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::geometry::{DEFAULT_ANGULAR_ORDER, DEFAULT_RADIAL_COUNT, MIN_RADIAL_COUNT};
use crate::resolvent::{Backend, DEFAULT_SOLVER_TOLERANCE};

/// Environment variable naming an alternate config file.
pub const CONFIG_ENV: &str = "WPCURV_CONFIG";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::config(format!(
                "unknown output format {other:?}; expected csv or json"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub radial_count: usize,
    pub angular_order: usize,
    pub solver_tol: f64,
    pub report_rtol: f64,
    pub backend: Backend,
    pub cache_dir: Option<PathBuf>,
    pub output: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            radial_count: DEFAULT_RADIAL_COUNT,
            angular_order: DEFAULT_ANGULAR_ORDER,
            solver_tol: DEFAULT_SOLVER_TOLERANCE,
            report_rtol: 1e-6,
            backend: Backend::ModeBvp,
            cache_dir: None,
            output: OutputFormat::Csv,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::config(format!("invalid value {value:?} for {key}")))
}

impl RunConfig {
    /// Applies `key = value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::config(format!(
                    "config line {}: expected key = value",
                    lineno + 1
                )));
            };
            self.set(key.trim(), value.trim())?;
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "radial_count" => self.radial_count = parse(key, value)?,
            "angular_order" => self.angular_order = parse(key, value)?,
            "solver_tol" => self.solver_tol = parse(key, value)?,
            "report_rtol" => self.report_rtol = parse(key, value)?,
            "backend" => self.backend = value.parse()?,
            "output" => self.output = value.parse()?,
            "cache_dir" => self.cache_dir = Some(PathBuf::from(value)),
            other => return Err(Error::config(format!("unknown config key {other:?}"))),
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::config(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg = RunConfig::default();
        cfg.apply_text(&text)?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.radial_count < MIN_RADIAL_COUNT {
            return Err(Error::config(format!(
                "radial_count must be at least {MIN_RADIAL_COUNT}, got {}",
                self.radial_count
            )));
        }
        for (name, v) in [
            ("solver_tol", self.solver_tol),
            ("report_rtol", self.report_rtol),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    /// SHA-256 hex of the settings that determine numerical results.
    pub fn digest(&self) -> String {
        let canonical = format!(
            "radial_count={};angular_order={};solver_tol={:e};report_rtol={:e};backend={}",
            self.radial_count,
            self.angular_order,
            self.solver_tol,
            self.report_rtol,
            self.backend.as_str()
        );
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }
}
