//! `key = value` sweep configuration files.
//!
//! ```text
//! # comment
//! d = 3, 5, 8
//! n = 16, 32, 64, 128
//! seeds_per_cell = 10
//! seed = 000102…2f
//! p = 52
//! mechanism = ctr-drbg-256
//! csv = out/sweep.csv
//! svg_dir = out
//! budget_seconds = 600
//! timing = false
//! ```

use std::path::PathBuf;

use sha2::{Digest, Sha256};

use crate::drbg::{Mechanism, Seed};
use crate::error::{Error, Result};
use crate::points::Precision;

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub d_list: Vec<usize>,
    pub n_list: Vec<usize>,
    pub seeds_per_cell: usize,
    /// Per-run seeds are derived from this one.
    pub master_seed: Seed,
    pub precision: Precision,
    pub mechanism: Mechanism,
    pub csv: Option<PathBuf>,
    pub svg_dir: Option<PathBuf>,
    /// Per-evaluation time limit in seconds.
    pub budget_seconds: Option<f64>,
    /// Record wall-clock times. Off by default so reruns are byte-identical.
    pub timing: bool,
}

impl SweepConfig {
    pub fn new(d_list: Vec<usize>, n_list: Vec<usize>, seeds_per_cell: usize, master_seed: Seed) -> Self {
        SweepConfig {
            d_list,
            n_list,
            seeds_per_cell,
            master_seed,
            precision: Precision::DEFAULT,
            mechanism: Mechanism::CtrDrbg256,
            csv: None,
            svg_dir: None,
            budget_seconds: None,
            timing: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.seeds_per_cell == 0 {
            return Err(Error::InvalidArgument("seeds_per_cell must be at least 1".into()));
        }
        if self.d_list.contains(&0) || self.n_list.contains(&0) {
            return Err(Error::InvalidArgument("d and N values must be positive".into()));
        }
        Ok(())
    }

    /// Canonical text of the parameters that determine the results.
    pub fn canonical(&self) -> String {
        let join = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        format!(
            "d={}\nn={}\nseeds_per_cell={}\nseed={}\np={}\nmechanism={}\nbudget_seconds={}\n",
            join(&self.d_list),
            join(&self.n_list),
            self.seeds_per_cell,
            self.master_seed.to_hex(),
            self.precision,
            self.mechanism,
            self.budget_seconds.map_or("none".to_string(), |s| s.to_string()),
        )
    }

    /// SHA-256 of [`canonical`](Self::canonical), first 16 hex digits.
    pub fn hash(&self) -> String {
        hex::encode(&Sha256::digest(self.canonical().as_bytes())[..8])
    }

    /// Parse a config file. `seed` may be absent when `fallback_seed`
    /// supplies one.
    pub fn parse(text: &str, fallback_seed: Option<Seed>) -> Result<Self> {
        let mut d_list = None;
        let mut n_list = None;
        let mut seeds_per_cell = 1;
        let mut seed = fallback_seed;
        let mut precision = Precision::DEFAULT;
        let mut mechanism = Mechanism::CtrDrbg256;
        let mut csv = None;
        let mut svg_dir = None;
        let mut budget_seconds = None;
        let mut timing = false;

        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| Error::Parse { line: i + 1, message };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected `key = value`, found `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            let number = |v: &str| v.parse::<usize>().map_err(|_| err(format!("bad number `{v}` for `{key}`")));
            let list = |v: &str| v.split(',').map(|x| number(x.trim())).collect::<Result<Vec<_>>>();
            match key {
                "d" => d_list = Some(list(value)?),
                "n" | "N" => n_list = Some(list(value)?),
                "seeds_per_cell" => seeds_per_cell = number(value)?,
                "seed" => seed = Some(Seed::from_hex(value).map_err(|e| err(e.to_string()))?),
                "p" => {
                    precision = Precision::new(number(value)? as u32).map_err(|e| err(e.to_string()))?
                }
                "mechanism" => mechanism = value.parse().map_err(|e: Error| err(e.to_string()))?,
                "csv" => csv = Some(PathBuf::from(value)),
                "svg_dir" => svg_dir = Some(PathBuf::from(value)),
                "budget_seconds" => {
                    budget_seconds = Some(value.parse().map_err(|_| err(format!("bad seconds `{value}`")))?)
                }
                "timing" => {
                    timing = match value {
                        "true" | "on" | "1" => true,
                        "false" | "off" | "0" => false,
                        _ => return Err(err(format!("bad boolean `{value}`"))),
                    }
                }
                _ => return Err(err(format!("unknown key `{key}`"))),
            }
        }
        let missing = |k: &str| Error::Parse {
            line: 0,
            message: format!("missing `{k}`"),
        };
        let cfg = SweepConfig {
            d_list: d_list.ok_or_else(|| missing("d"))?,
            n_list: n_list.unwrap_or_default(),
            seeds_per_cell,
            master_seed: seed.ok_or_else(|| missing("seed"))?,
            precision,
            mechanism,
            csv,
            svg_dir,
            budget_seconds,
            timing,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}
