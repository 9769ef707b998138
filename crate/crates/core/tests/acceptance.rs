//! Acceptance criteria. One PASS/FAIL line per criterion; exits non-zero if
//! any criterion fails.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use rayon::prelude::*;

use drbgdisc::bounds::{ah_bound, ah_confidence, corollary1_bits, hnww_inverse_bound, threshold_constant};
use drbgdisc::drbg::{kat, Generator, Mechanism, Seed};
use drbgdisc::harness::{planar_search, run_sweep, write_planar, SweepConfig};
use drbgdisc::inverse::{empirical_inverse, InverseQuery, Outcome};
use drbgdisc::points::{generate_points, round_to_precision, round_values, PointSet, Precision};
use drbgdisc::stardisc::{local_discrepancy, star_discrepancy_exact, star_discrepancy_oracle, Budget};

const MASTER: &str = "5eed0000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000001";

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn master() -> Seed {
    Seed::from_hex(MASTER).unwrap()
}

/// Deterministic source of random instances for the property criteria.
struct Source(Generator);

impl Source {
    fn new(label: &str) -> Self {
        let seed = master().derive(label, 0, 384).unwrap();
        Source(Generator::instantiate(Mechanism::CtrDrbg256, &seed).unwrap())
    }

    fn below(&mut self, k: u64) -> u64 {
        self.0.generate_bits(32).unwrap().read_bits(0, 32) % k
    }

    fn points(&mut self, d: usize, n: usize, p: u32) -> PointSet {
        generate_points(&mut self.0, d, n, Precision::new(p).unwrap()).unwrap()
    }
}

fn oracle_equivalence() -> Verdict {
    let mut src = Source::new("acceptance-oracle");
    let instances: Vec<PointSet> = (0..600)
        .map(|_| {
            let d = 1 + src.below(4) as usize;
            let n = 1 + src.below(32) as usize;
            let p = [4, 8, 52][src.below(3) as usize];
            src.points(d, n, p)
        })
        .collect();
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut witness_failures = 0;
    for ps in &instances {
        let e = star_discrepancy_exact(ps, Budget::unlimited()).unwrap();
        let o = star_discrepancy_oracle(ps).unwrap();
        worst = worst.max((e.value - o.value).abs());
        for r in [&e, &o] {
            if local_discrepancy(ps, &r.witness).unwrap().value() != r.value {
                witness_failures += 1;
            }
        }
    }
    verdict(
        worst <= 1e-12 && witness_failures == 0,
        format!(
            "{} instances, max |exact - oracle| = {worst:e}, witness self-check failures = {witness_failures}, {:.1?}",
            instances.len(),
            start.elapsed()
        ),
    )
}

fn analytic_one_dimensional() -> Verdict {
    let mut bad = Vec::new();
    let dstar = |vals: &[f64]| {
        let ps = round_values(1, vals, Precision::DEFAULT).unwrap();
        star_discrepancy_exact(&ps, Budget::unlimited()).unwrap().value
    };
    for n in 1..=64usize {
        let dyadic = n.is_power_of_two();
        let tol = if dyadic { 0.0 } else { 1e-15 };
        let mid: Vec<f64> = (1..=n).map(|i| (2 * i - 1) as f64 / (2 * n) as f64).collect();
        let v = dstar(&mid);
        if (v - 0.5 / n as f64).abs() > tol {
            bad.push(format!("midpoint N={n}: {v}"));
        }
        let left: Vec<f64> = (0..n).map(|i| i as f64 / n as f64).collect();
        let v = dstar(&left);
        if (v - 1.0 / n as f64).abs() > tol {
            bad.push(format!("left N={n}: {v}"));
        }
    }
    let zero = dstar(&[0.0]);
    if zero != 1.0 {
        bad.push(format!("singleton 0: {zero}"));
    }
    verdict(
        bad.is_empty(),
        if bad.is_empty() {
            "midpoint 1/(2N) and left-endpoint 1/N for N = 1..64, singleton {0} = 1".into()
        } else {
            bad.join("; ")
        },
    )
}

fn rounding_perturbation() -> Verdict {
    let mut src = Source::new("acceptance-rounding");
    let mut violations = 0;
    let mut checks = 0;
    let mut tightest: f64 = 0.0;
    for _ in 0..200 {
        let d = 1 + src.below(5) as usize;
        let n = 1 + src.below(24) as usize;
        let ps = src.points(d, n, 52);
        let base = star_discrepancy_exact(&ps, Budget::unlimited()).unwrap().value;
        for to in [4u32, 6, 8] {
            let r = round_to_precision(&ps, Precision::new(to).unwrap());
            let v = star_discrepancy_exact(&r, Budget::unlimited()).unwrap().value;
            let bound = d as f64 / (to as f64).exp2();
            checks += 1;
            tightest = tightest.max((base - v).abs() / bound);
            if (base - v).abs() > bound {
                violations += 1;
            }
        }
    }
    verdict(
        violations == 0,
        format!("{checks} roundings, {violations} violations of d/2^p', largest |change|/bound = {tightest:.3}"),
    )
}

fn bounds_calculator() -> Verdict {
    let mut worst: f64 = 0.0;
    for d in 1..=10u32 {
        for n in [1u64, 3, 10, 32, 100, 317, 1000, 3162, 10_000, 100_000] {
            for k in 1..=10 {
                let q = k as f64 / 11.0;
                let c = ah_bound(d, n, q).unwrap() / (d as f64 / n as f64).sqrt();
                worst = worst.max((ah_confidence(d, n, c).unwrap() - q).abs());
            }
        }
    }
    let threshold = threshold_constant();
    let four = (threshold * 1e4).trunc() / 1e4;
    let bits = corollary1_bits(16.0, 10, 1024).unwrap();
    let inv = hnww_inverse_bound(0.25, 5, 2.5287).unwrap();
    verdict(
        worst <= 1e-12 && four == 12.6174 && bits == 58 && inv == 512,
        format!(
            "round-trip max error {worst:e} on 1000 points, threshold {threshold:.6} (4 decimals {four}), \
             corollary bits {bits}, inverse bound {inv}"
        ),
    )
}

fn scaled_sweep() -> Verdict {
    let mut cfg = SweepConfig::new(vec![3, 5, 8], vec![16, 32, 64, 128], 10, master());
    cfg.timing = true;
    let start = Instant::now();
    let out = run_sweep(&cfg).unwrap();
    let total = out.records.len();
    let below = out.records.iter().filter(|r| r.dstar < r.envelope).count();
    let uncertified = out.warnings.len();
    let mut medians = Vec::new();
    let mut all_below = true;
    for d in [3, 5, 8] {
        let mut ratios: Vec<f64> = out.records.iter().filter(|r| r.d == d).map(|r| r.ratio).collect();
        ratios.sort_by(f64::total_cmp);
        let k = ratios.len();
        let m = 0.5 * (ratios[k / 2 - 1] + ratios[k / 2]);
        all_below &= m < 1.0;
        medians.push(format!("d={d}: {m:.3}"));
    }
    let frac = below as f64 / total as f64;
    verdict(
        total == 120 && uncertified == 0 && frac >= 0.9 && all_below,
        format!(
            "{below}/{total} runs below sqrt(d/N) ({:.1}%), median ratio {}, {:.0?}",
            frac * 100.0,
            medians.join(", "),
            start.elapsed()
        ),
    )
}

fn scaled_inverse() -> Verdict {
    let start = Instant::now();
    let mut pass = true;
    let mut parts = Vec::new();
    for d in 2..=6usize {
        let cap = 20 * d;
        let found: Vec<Option<usize>> = (0..10u64)
            .into_par_iter()
            .map(|i| {
                let seed = master().derive("acceptance-inverse", (d as u64) << 32 | i, 384).unwrap();
                let r = empirical_inverse(&InverseQuery::new(d, 0.25, seed, cap)).unwrap();
                assert_ne!(r.outcome, Outcome::Undetermined);
                r.n_found
            })
            .collect();
        let mut sorted: Vec<usize> = found.iter().map(|f| f.unwrap_or(usize::MAX)).collect();
        sorted.sort_unstable();
        let median_ok = sorted[4] <= cap && sorted[5] <= cap;
        let min = sorted[0];
        let hnww = hnww_inverse_bound(0.25, d as u32, 2.5287).unwrap() as usize;
        let over_hnww = sorted.iter().filter(|&&n| n != usize::MAX && n > hnww).count();
        pass &= median_ok && min <= 12 * d;
        let show = |n: usize| if n == usize::MAX { format!(">{cap}") } else { n.to_string() };
        parts.push(format!(
            "d={d}: median {} (<= {cap}), min {} (<= {}), over HNWW bound {over_hnww}",
            if median_ok { format!("{}", (sorted[4] + sorted[5]) as f64 / 2.0) } else { format!(">{cap}") },
            show(min),
            12 * d
        ));
    }
    verdict(pass, format!("{}; {:.0?}", parts.join("; "), start.elapsed()))
}

fn drbg_conformance() -> Verdict {
    let (ok, total) = kat::check_embedded().unwrap();
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = SweepConfig::new(vec![2, 4], vec![10, 20, 40], 3, master());
    cfg.csv = Some(dir.path().join("a.csv"));
    run_sweep(&cfg).unwrap();
    cfg.csv = Some(dir.path().join("b.csv"));
    run_sweep(&cfg).unwrap();
    let a = std::fs::read(dir.path().join("a.csv")).unwrap();
    let b = std::fs::read(dir.path().join("b.csv")).unwrap();
    verdict(
        ok == total && total > 0 && a == b,
        format!("{ok}/{total} known-answer vectors, sweep rerun byte-identical: {}", a == b),
    )
}

fn svg_ok(path: &std::path::Path, n: usize) -> bool {
    let text = std::fs::read_to_string(path).unwrap();
    match roxmltree::Document::parse(&text) {
        Ok(doc) => doc.descendants().filter(|e| e.attribute("class") == Some("point")).count() == n,
        Err(_) => false,
    }
}

fn planar_sets() -> Verdict {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("planar");
    let start = Instant::now();
    let mut pass = true;
    let mut parts = Vec::new();
    for (stem, cap, eps) in [("small", 15usize, 0.25), ("large", 300, 0.1)] {
        match planar_search(&master(), cap, eps, 200).unwrap() {
            Some(set) => {
                let (_, svg) = write_planar(&set, &dir, stem).unwrap();
                let n = set.points.len();
                let ok = set.result.certified && set.result.value <= eps && n <= cap && svg_ok(&svg, n);
                pass &= ok;
                parts.push(format!(
                    "{n} points D*={:.4} <= {eps} seed {} (try {}), {}",
                    set.result.value,
                    set.seed.to_hex(),
                    set.tries,
                    svg.display()
                ));
            }
            None => {
                pass = false;
                parts.push(format!("no set of <= {cap} points with D* <= {eps} in 200 seeds"));
            }
        }
    }
    verdict(pass, format!("{}; {:.0?}", parts.join("; "), start.elapsed()))
}

type Criterion = (&'static str, fn() -> Verdict);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("1 oracle equivalence", oracle_equivalence),
        ("2 analytic 1-D cases", analytic_one_dimensional),
        ("3 rounding perturbation", rounding_perturbation),
        ("4 bounds calculator", bounds_calculator),
        ("5 scaled discrepancy sweep", scaled_sweep),
        ("6 scaled inverse discrepancy", scaled_inverse),
        ("7 DRBG conformance", drbg_conformance),
        ("8 small planar sets", planar_sets),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, run) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let v = run();
        println!("{} criterion {name}: {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
        failed += usize::from(!v.pass);
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
