//! Run configuration: a TOML file merged with command-line flags.
//!
//! ```toml
//! edgelist = "calls.csv"
//! n = 37
//! timing = "ordinal"
//! effects = ["CovInt", "PSAB-BA"]
//! out = "results"
//!
//! [covariates]
//! CovInt = "icr.csv"
//! ```
//!
//! Relative paths in a config file are resolved against the file's directory.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub edgelist: Option<PathBuf>,
    pub n: Option<usize>,
    pub timing: Option<String>,
    pub effects: Option<Vec<String>>,
    #[serde(default)]
    pub covariates: BTreeMap<String, PathBuf>,
    pub group_actor: Option<usize>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub max_iter: Option<usize>,
    pub tol: Option<f64>,
    pub theta: Option<PathBuf>,
    pub events: Option<usize>,
    pub horizon: Option<f64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<FileConfig, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        let mut cfg: FileConfig =
            toml::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        for p in [&mut cfg.edgelist, &mut cfg.out, &mut cfg.theta].into_iter().flatten() {
            resolve(p);
        }
        cfg.covariates.values_mut().for_each(resolve);
        Ok(cfg)
    }
}

/// Splits `NAME=PATH`.
pub fn parse_binding(raw: &str) -> Result<(String, PathBuf), String> {
    match raw.split_once('=') {
        Some((name, path)) if !name.trim().is_empty() && !path.trim().is_empty() => {
            Ok((name.trim().to_string(), PathBuf::from(path.trim())))
        }
        _ => Err(format!("expected NAME=PATH, got `{raw}`")),
    }
}

/// Splits a comma- or whitespace-separated effect list.
pub fn split_effects(raw: &[String]) -> Vec<String> {
    raw.iter()
        .flat_map(|s| s.split(|c: char| c == ',' || c.is_whitespace()))
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}

/// Output directory: flag, then config file, then `REM_OUT_DIR`, then `.`.
pub fn output_dir(flag: Option<PathBuf>, file: Option<PathBuf>) -> PathBuf {
    flag.or(file)
        .or_else(|| std::env::var_os("REM_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}
