//! Tolerances and run configuration.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Environment variable naming a config file.
pub const CONFIG_ENV: &str = "GENUS2_CONFIG";

/// Every numerical tolerance used by the library.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub tau_unit: f64,
    pub tau_rel: f64,
    pub tau_ab: f64,
    pub tau_svd: f64,
    pub tau_flow: f64,
    pub tau_b: f64,
    pub margin_min: f64,
    pub r_corner: f64,
    pub delta_lambda: f64,
    pub delta_twist: f64,
    pub newton_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            tau_unit: 1e-12,
            tau_rel: 1e-9,
            tau_ab: 1e-8,
            tau_svd: 1e-8,
            tau_flow: 1e-6,
            tau_b: 1e-10,
            margin_min: 1e-4,
            r_corner: 1e-3,
            delta_lambda: 1e-3,
            delta_twist: 1e-6,
            newton_tol: 1e-12,
        }
    }
}

impl Tolerances {
    pub const NAMES: [&'static str; 11] = [
        "tau_unit",
        "tau_rel",
        "tau_ab",
        "tau_svd",
        "tau_flow",
        "tau_b",
        "margin_min",
        "r_corner",
        "delta_lambda",
        "delta_twist",
        "newton_tol",
    ];

    fn slot(&mut self, name: &str) -> Option<&mut f64> {
        Some(match name {
            "tau_unit" => &mut self.tau_unit,
            "tau_rel" => &mut self.tau_rel,
            "tau_ab" => &mut self.tau_ab,
            "tau_svd" => &mut self.tau_svd,
            "tau_flow" => &mut self.tau_flow,
            "tau_b" => &mut self.tau_b,
            "margin_min" => &mut self.margin_min,
            "r_corner" => &mut self.r_corner,
            "delta_lambda" => &mut self.delta_lambda,
            "delta_twist" => &mut self.delta_twist,
            "newton_tol" => &mut self.newton_tol,
            _ => return None,
        })
    }

    /// Sets a tolerance by name; values must be positive and finite.
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::Parse(format!(
                "tolerance {name} must be positive, got {value}"
            )));
        }
        let slot = self
            .slot(name)
            .ok_or_else(|| Error::Parse(format!("unknown tolerance {name}")))?;
        *slot = value;
        Ok(())
    }
}

/// Seed, tolerances, per-suite sample counts and output directory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub seed: u64,
    pub tolerances: Tolerances,
    pub sample_counts: BTreeMap<String, usize>,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            tolerances: Tolerances::default(),
            sample_counts: BTreeMap::new(),
            output_dir: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    /// Sample count for `suite`, falling back to `default`.
    pub fn samples(&self, suite: &str, default: usize) -> usize {
        self.sample_counts.get(suite).copied().unwrap_or(default)
    }

    /// Applies one `key=value` assignment.
    ///
    /// Keys are `seed`, `output_dir`, a tolerance name, or `samples.<suite>`.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim();
        let value = value.trim();
        let bad = |what: &str| Error::Parse(format!("bad value {value:?} for {what}"));
        match key {
            "seed" => self.seed = value.parse().map_err(|_| bad(key))?,
            "output_dir" => self.output_dir = PathBuf::from(value),
            _ => {
                if let Some(suite) = key.strip_prefix("samples.") {
                    let n: usize = value.parse().map_err(|_| bad(key))?;
                    self.sample_counts.insert(suite.to_string(), n);
                } else {
                    let v: f64 = value.parse().map_err(|_| bad(key))?;
                    self.tolerances.set(key, v)?;
                }
            }
        }
        Ok(())
    }

    /// Applies a `key=value` string such as a `--tol` argument.
    pub fn apply_pair(&mut self, pair: &str) -> Result<()> {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected KEY=VALUE, got {pair:?}")))?;
        self.apply(k, v)
    }

    /// Parses a flat `key=value` file. Blank lines and `#` comments are skipped.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            self.apply_pair(line)
                .map_err(|e| Error::Parse(format!("line {}: {e}", n + 1)))?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        self.apply_text(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flat_file() {
        let mut cfg = RunConfig::default();
        cfg.apply_text("# comment\nseed = 9\ntau_rel=1e-8\n\nsamples.quat=50\n")
            .unwrap();
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.tolerances.tau_rel, 1e-8);
        assert_eq!(cfg.samples("quat", 1), 50);
        assert_eq!(cfg.samples("pillow", 3), 3);
    }

    #[test]
    fn rejects_bad_tolerances() {
        let mut cfg = RunConfig::default();
        assert!(cfg.apply_pair("tau_rel=-1").is_err());
        assert!(cfg.apply_pair("nonsense=1").is_err());
        assert!(cfg.apply_pair("no_equals").is_err());
    }
}
