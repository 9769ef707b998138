//! Sweeps of discrepancy against `N`, CSV output and SVG figures.

mod config;
mod svg;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use rayon::prelude::*;

use crate::drbg::{Generator, Seed};
use crate::error::{Error, Result};
use crate::inverse::{empirical_inverse_with, InverseQuery, Outcome};
use crate::points::{generate_points, PointSet};
use crate::stardisc::{star_discrepancy_exact, Budget, DiscrepancyResult};

pub use self::config::SweepConfig;
pub use self::svg::{plot_points_svg, plot_sweep_svg};

pub const CSV_HEADER: &str = "d,N,seed_digest,dstar,envelope,ratio,elapsed_ms";

const SWEEP_LABEL: &str = "drbgdisc-sweep";
const PLANAR_LABEL: &str = "drbgdisc-planar";

/// Version string baked in at build time.
pub fn build_version() -> String {
    format!(
        "{} ({})",
        env!("CARGO_PKG_VERSION"),
        option_env!("DRBGDISC_GIT_DESCRIBE").unwrap_or("unknown")
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub d: usize,
    pub n: usize,
    pub seed_digest: String,
    pub dstar: f64,
    /// `sqrt(d/N)`.
    pub envelope: f64,
    pub ratio: f64,
    pub elapsed_ms: f64,
}

impl SweepRecord {
    pub fn new(d: usize, n: usize, seed_digest: String, dstar: f64, elapsed: Option<Duration>) -> Self {
        let envelope = (d as f64 / n as f64).sqrt();
        SweepRecord {
            d,
            n,
            seed_digest,
            dstar,
            envelope,
            ratio: dstar / envelope,
            elapsed_ms: elapsed.map_or(0.0, |e| e.as_secs_f64() * 1e3),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct SweepOutput {
    pub records: Vec<SweepRecord>,
    /// Human-readable notes for skipped cells and budget-limited runs.
    pub warnings: Vec<String>,
    pub csv: String,
}

/// Seed for run `index` of a sweep.
pub fn sweep_seed(cfg: &SweepConfig, index: usize) -> Result<Seed> {
    cfg.master_seed
        .derive(SWEEP_LABEL, index as u64, cfg.mechanism.default_seed_bits())
}

/// One record per `(d, N, seed)`; the set for run `i` is the first `N`
/// points of the stream seeded with `sweep_seed(cfg, i)`. Rows are ordered
/// by `d`, then `N`, then seed index.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepOutput> {
    cfg.validate()?;
    let seeds = (0..cfg.seeds_per_cell)
        .map(|i| sweep_seed(cfg, i))
        .collect::<Result<Vec<_>>>()?;
    let budget = cfg.budget_seconds.map_or(Budget::unlimited(), Budget::seconds);

    let sorted = |v: &[usize]| {
        let mut v = v.to_vec();
        v.sort_unstable();
        v.dedup();
        v
    };
    let (d_list, n_list) = (sorted(&cfg.d_list), sorted(&cfg.n_list));
    let mut cells = Vec::new();
    for &d in &d_list {
        for &n in &n_list {
            for seed in &seeds {
                cells.push((d, n, seed));
            }
        }
    }
    let runs: Vec<Result<(usize, usize, String, DiscrepancyResult)>> = cells
        .par_iter()
        .map(|&(d, n, seed)| {
            let mut gen = Generator::instantiate(cfg.mechanism, seed)?;
            let ps = generate_points(&mut gen, d, n, cfg.precision)?;
            let r = star_discrepancy_exact(&ps, budget)?;
            Ok((d, n, seed.digest(), r))
        })
        .collect();

    let mut out = SweepOutput::default();
    for (run, &(d, n, seed)) in runs.into_iter().zip(&cells) {
        match run {
            Ok((d, n, digest, r)) => {
                if !r.certified {
                    out.warnings.push(format!(
                        "uncertified d={d} N={n} seed_digest={digest}: budget exhausted, dstar is a lower bound"
                    ));
                }
                let elapsed = cfg.timing.then_some(r.elapsed);
                out.records.push(SweepRecord::new(d, n, digest, r.value, elapsed));
            }
            Err(Error::Infeasible(why)) => {
                out.warnings
                    .push(format!("skipped d={d} N={n} seed_digest={}: {why}", seed.digest()));
            }
            Err(e) => return Err(e),
        }
    }
    out.csv = sweep_csv(cfg, &out.records, &out.warnings);

    if let Some(path) = &cfg.csv {
        write_file(path, out.csv.as_bytes())?;
    }
    if let Some(dir) = &cfg.svg_dir {
        fs::create_dir_all(dir)?;
        for &d in &d_list {
            let recs: Vec<SweepRecord> = out.records.iter().filter(|r| r.d == d).cloned().collect();
            if !recs.is_empty() {
                write_file(&dir.join(format!("sweep_d{d}.svg")), plot_sweep_svg(&recs)?.as_bytes())?;
            }
        }
    }
    Ok(out)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, bytes)?;
    Ok(())
}

/// Render records as CSV with run metadata in leading `#` lines.
pub fn sweep_csv(cfg: &SweepConfig, records: &[SweepRecord], warnings: &[String]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# drbgdisc sweep {}", build_version());
    let _ = writeln!(
        s,
        "# mechanism={} b={} p={} config_sha256={}",
        cfg.mechanism,
        cfg.mechanism.security_bits(),
        cfg.precision,
        cfg.hash()
    );
    let _ = writeln!(s, "# profile: {}", cfg.mechanism.profile());
    if !cfg.timing {
        let _ = writeln!(s, "# timing=off: elapsed_ms is written as 0 so reruns are byte-identical");
    }
    for w in warnings {
        let _ = writeln!(s, "# {w}");
    }
    s.push_str(CSV_HEADER);
    s.push('\n');
    for r in records {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            r.d, r.n, r.seed_digest, r.dstar, r.envelope, r.ratio, r.elapsed_ms
        );
    }
    s
}

/// Parse CSV written by [`sweep_csv`]. Comment lines are skipped.
pub fn read_sweep_csv(text: &str) -> Result<Vec<SweepRecord>> {
    let mut records = Vec::new();
    let mut seen_header = false;
    for (i, line) in text.lines().enumerate() {
        let err = |message: String| Error::Parse { line: i + 1, message };
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        if !seen_header {
            if line != CSV_HEADER {
                return Err(err(format!("expected header `{CSV_HEADER}`")));
            }
            seen_header = true;
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 7 {
            return Err(err(format!("expected 7 fields, found {}", f.len())));
        }
        let int = |s: &str| s.parse::<usize>().map_err(|_| err(format!("bad integer `{s}`")));
        let real = |s: &str| s.parse::<f64>().map_err(|_| err(format!("bad number `{s}`")));
        records.push(SweepRecord {
            d: int(f[0])?,
            n: int(f[1])?,
            seed_digest: f[2].to_string(),
            dstar: real(f[3])?,
            envelope: real(f[4])?,
            ratio: real(f[5])?,
            elapsed_ms: real(f[6])?,
        });
    }
    if !seen_header {
        return Err(Error::Parse {
            line: 0,
            message: "no CSV header found".into(),
        });
    }
    Ok(records)
}

/// A two-dimensional set found by [`planar_search`].
#[derive(Debug, Clone)]
pub struct PlanarSet {
    pub seed: Seed,
    pub seed_index: usize,
    pub points: PointSet,
    pub result: DiscrepancyResult,
    /// Seeds tried, including the successful one.
    pub tries: usize,
}

/// Try derived seeds in order until a stream's first crossing of
/// `D* <= epsilon` in `d = 2` happens within `max_points` points.
pub fn planar_search(master: &Seed, max_points: usize, epsilon: f64, max_tries: usize) -> Result<Option<PlanarSet>> {
    for index in 0..max_tries {
        let seed = master.derive(PLANAR_LABEL, index as u64, 384)?;
        let mut hit: Option<(PointSet, DiscrepancyResult)> = None;
        let r = empirical_inverse_with(&InverseQuery::new(2, epsilon, seed.clone(), max_points), |_, ps, res| {
            if res.certified && res.value <= epsilon {
                hit = Some((ps.clone(), res.clone()));
            }
        })?;
        if r.outcome == Outcome::Found {
            let (points, result) = hit.expect("found crossing was reported");
            return Ok(Some(PlanarSet {
                seed,
                seed_index: index,
                points,
                result,
                tries: index + 1,
            }));
        }
    }
    Ok(None)
}

/// Write `points.txt` and `points.svg` for a found set into `dir` under
/// `stem`.
pub fn write_planar(set: &PlanarSet, dir: &Path, stem: &str) -> Result<(PathBuf, PathBuf)> {
    fs::create_dir_all(dir)?;
    let txt = dir.join(format!("{stem}.txt"));
    let svg = dir.join(format!("{stem}.svg"));
    crate::points::save_points(&set.points, &txt, crate::points::WriteOptions { decimal: true })?;
    write_file(&svg, plot_points_svg(&set.points, &set.result)?.as_bytes())?;
    Ok((txt, svg))
}
