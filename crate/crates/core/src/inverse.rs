//! Smallest number of generated points whose star discrepancy reaches a
//! target.
//!
//! Discrepancy of prefixes is not monotone in `N`, so the search steps
//! through `N = 1, 2, …` and reports the first crossing.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::drbg::{Generator, Mechanism, Seed};
use crate::error::{Error, Result};
use crate::points::{bits_to_points, generate_points, PointSet, Precision};
use crate::stardisc::{star_discrepancy_exact, Budget, DiscrepancyResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// One stream; the set for `N` is its first `N` points.
    Prefix,
    /// A separate stretch of the stream for every `N`, so sets for
    /// different `N` share no bits.
    Fresh,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "prefix" => Ok(Mode::Prefix),
            "fresh" => Ok(Mode::Fresh),
            _ => Err(Error::InvalidArgument(format!("unknown mode `{s}` (expected prefix or fresh)"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Prefix => "prefix",
            Mode::Fresh => "fresh",
        })
    }
}

#[derive(Debug, Clone)]
pub struct InverseQuery {
    pub d: usize,
    pub epsilon: f64,
    pub mechanism: Mechanism,
    pub seed: Seed,
    pub n_cap: usize,
    pub mode: Mode,
    pub precision: Precision,
    /// Applied to every single discrepancy evaluation.
    pub budget: Budget,
}

impl InverseQuery {
    pub fn new(d: usize, epsilon: f64, seed: Seed, n_cap: usize) -> Self {
        InverseQuery {
            d,
            epsilon,
            mechanism: Mechanism::CtrDrbg256,
            seed,
            n_cap,
            mode: Mode::Prefix,
            precision: Precision::DEFAULT,
            budget: Budget::unlimited(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceEntry {
    pub n: usize,
    pub dstar: f64,
    pub certified: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Found,
    NotFound,
    /// A budget-limited evaluation gave a lower bound at or below epsilon,
    /// so the crossing could not be decided.
    Undetermined,
}

#[derive(Debug, Clone, Serialize)]
pub struct InverseResult {
    pub d: usize,
    pub epsilon: f64,
    pub mode: Mode,
    pub seed_digest: String,
    pub outcome: Outcome,
    pub n_found: Option<usize>,
    pub achieved: Option<f64>,
    pub trace: Vec<TraceEntry>,
}

impl InverseResult {
    pub fn trace_csv(&self) -> String {
        let mut s = String::from("N,dstar\n");
        for e in &self.trace {
            s.push_str(&format!("{},{}\n", e.n, e.dstar));
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("result serializes")
    }
}

/// Walk `N = 1..=n_cap` and stop at the first `N` with `D* <= epsilon`.
pub fn empirical_inverse(q: &InverseQuery) -> Result<InverseResult> {
    empirical_inverse_with(q, |_, _, _| {})
}

/// Like [`empirical_inverse`], calling `on_step(N, point set, result)`
/// after every evaluation.
pub fn empirical_inverse_with<F>(q: &InverseQuery, mut on_step: F) -> Result<InverseResult>
where
    F: FnMut(usize, &PointSet, &DiscrepancyResult),
{
    if !(q.epsilon > 0.0 && q.epsilon < 1.0) {
        return Err(Error::InvalidArgument(format!("epsilon must be in (0, 1), got {}", q.epsilon)));
    }
    if q.n_cap == 0 || q.d == 0 {
        return Err(Error::InvalidArgument("d and the N cap must be at least 1".into()));
    }
    let mut gen = Generator::instantiate(q.mechanism, &q.seed)?;
    let prefix_pool = match q.mode {
        Mode::Prefix => Some(generate_points(&mut gen, q.d, q.n_cap, q.precision)?),
        Mode::Fresh => None,
    };

    let mut result = InverseResult {
        d: q.d,
        epsilon: q.epsilon,
        mode: q.mode,
        seed_digest: q.seed.digest(),
        outcome: Outcome::NotFound,
        n_found: None,
        achieved: None,
        trace: Vec::new(),
    };
    for n in 1..=q.n_cap {
        let ps = match &prefix_pool {
            Some(pool) => pool.prefix(n),
            None => {
                let bits = gen.generate_bits(crate::points::bits_required(q.d, n, q.precision))?;
                bits_to_points(&bits, q.d, n, q.precision)?
            }
        };
        let r = star_discrepancy_exact(&ps, q.budget)?;
        result.trace.push(TraceEntry {
            n,
            dstar: r.value,
            certified: r.certified,
        });
        on_step(n, &ps, &r);
        if r.value <= q.epsilon {
            if r.certified {
                result.outcome = Outcome::Found;
                result.n_found = Some(n);
                result.achieved = Some(r.value);
            } else {
                result.outcome = Outcome::Undetermined;
            }
            break;
        }
    }
    Ok(result)
}
