//! Closed-form probabilistic discrepancy bounds.
//!
//! Logarithms are natural in the Aistleitner–Hofer bound and binary in the
//! bit-count formula. The unspecified constant in front of the security term
//! of the pseudorandom tail bound is taken as 1; reports say so.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

pub const AH_SCALE: f64 = 5.7;
pub const AH_SHIFT: f64 = 4.9;

/// Constant used in the inverse-discrepancy bound `C^2 d / eps^2` by default.
pub const HNWW_CONSTANT: f64 = 2.5287;

/// Smallest `C` for which the Aistleitner–Hofer tail drops below 1:
/// `sqrt(4.9) * 5.7 = 12.6174…`.
pub fn threshold_constant() -> f64 {
    AH_SHIFT.sqrt() * AH_SCALE
}

/// Discrepancy level `5.7 sqrt(4.9 + ln(1/(1-q))) sqrt(d/N)` reached with
/// probability at least `q` by `N` uniform random points. `q = 0` is
/// accepted as the continuous extension.
pub fn ah_bound(d: u32, n: u64, q: f64) -> Result<f64> {
    check_dn(d, n)?;
    if !(0.0..1.0).contains(&q) {
        return Err(Error::InvalidArgument(format!("q must be in (0, 1), got {q}")));
    }
    Ok(ah_constant(q) * (d as f64 / n as f64).sqrt())
}

/// The `C` with `ah_bound = C sqrt(d/N)` at confidence `q`.
pub fn ah_constant(q: f64) -> f64 {
    // ln(1/(1-q)) = -ln(1-q), kept accurate for small q.
    AH_SCALE * (AH_SHIFT - (-q).ln_1p()).sqrt()
}

/// Inverse of [`ah_bound`] in `q`: `1 - exp(4.9 - (C/5.7)^2)`, clamped to
/// `[0, 1)`. Below the threshold constant the answer is 0.
pub fn ah_confidence(d: u32, n: u64, c: f64) -> Result<f64> {
    check_dn(d, n)?;
    if !(c > 0.0) {
        return Err(Error::InvalidArgument(format!("C must be positive, got {c}")));
    }
    let q = -(AH_SHIFT - (c / AH_SCALE).powi(2)).exp_m1();
    Ok(q.clamp(0.0, 1.0 - f64::EPSILON / 2.0))
}

/// `sqrt(T / 2^b)`, the largest advantage of a time-`T` distinguisher
/// against a generator with `b` bits of security.
pub fn security_advantage(t: f64, b: u32) -> Result<f64> {
    if !(t >= 1.0) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("T must be a finite value >= 1, got {t}")));
    }
    // Split off 2^(b/2) so that T = 2^b gives exactly 1 even for large b.
    let half = (b / 2) as i32;
    let odd = f64::from(b % 2 + 1);
    Ok((t / odd).sqrt() * exp2i(-half))
}

/// `2^k` for integer `k`, flushing to 0 or infinity outside the normal range.
fn exp2i(k: i32) -> f64 {
    if k < -1022 {
        0.0
    } else if k > 1023 {
        f64::INFINITY
    } else {
        f64::from_bits(((k + 1023) as u64) << 52)
    }
}

/// `ceil(2 ld C + (d/2) ld N)`.
pub fn corollary1_bits(c: f64, d: u32, n: u64) -> Result<u32> {
    if !(c > 1.0) {
        return Err(Error::InvalidArgument(format!("C must exceed 1, got {c}")));
    }
    if n < 2 {
        return Err(Error::InvalidArgument(format!("N must be at least 2, got {n}")));
    }
    check_dn(d, n)?;
    let b = 2.0 * c.log2() + 0.5 * d as f64 * (n as f64).log2();
    Ok(b.ceil() as u32)
}

/// `ceil(C^2 d / eps^2)`.
pub fn hnww_inverse_bound(epsilon: f64, d: u32, c: f64) -> Result<u64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidArgument(format!("epsilon must be in (0, 1), got {epsilon}")));
    }
    if !(c > 0.0) {
        return Err(Error::InvalidArgument(format!("C must be positive, got {c}")));
    }
    if d == 0 {
        return Err(Error::InvalidArgument("d must be at least 1".into()));
    }
    Ok((c * c * d as f64 / (epsilon * epsilon)).ceil() as u64)
}

/// Cost model for computing one star discrepancy: `N^{1+d/2}`.
pub fn discrepancy_cost(d: u32, n: u64) -> f64 {
    (n as f64).powf(1.0 + d as f64 / 2.0)
}

/// Probability that `N` points from a `b`-bit-secure generator at precision
/// `p` have discrepancy at least `C sqrt(d/N)`:
/// `exp(4.9 - (C - sqrt(dN)/2^p)^2 / 5.7^2) + sqrt(N^{1+d/2} / 2^b)`.
pub fn theorem1_tail(d: u32, n: u64, p: u32, b: u32, c: f64) -> Result<BoundReport> {
    check_dn(d, n)?;
    if !(c > 0.0) {
        return Err(Error::InvalidArgument(format!("C must be positive, got {c}")));
    }
    if p == 0 {
        return Err(Error::InvalidArgument("p must be at least 1".into()));
    }
    let shift = ((d as f64) * (n as f64)).sqrt() / exp2i(p.min(1023) as i32);
    let eff = c - shift;
    let raw = if eff > 0.0 {
        (AH_SHIFT - (eff / AH_SCALE).powi(2)).exp()
    } else {
        AH_SHIFT.exp()
    };
    let vacuous = raw >= 1.0;
    let tail = raw.min(1.0);
    let security = security_advantage(discrepancy_cost(d, n), b)?;

    let mut components = BTreeMap::new();
    components.insert("tail".to_string(), tail);
    components.insert("security".to_string(), security);
    components.insert("precision_shift".to_string(), shift);
    let mut notes = vec!["security term constant taken as 1".to_string()];
    if vacuous {
        notes.push("bound vacuous: C - sqrt(dN)/2^p does not exceed the threshold constant".into());
    }
    Ok(BoundReport {
        formula: Formula::Theorem1,
        bound_value: tail + security,
        components,
        vacuous,
        notes,
    })
}

fn check_dn(d: u32, n: u64) -> Result<()> {
    if d == 0 || n == 0 {
        return Err(Error::InvalidArgument(format!("d and N must be positive, got d={d} N={n}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Formula {
    Ah,
    Theorem1,
    Corollary1,
    Hnww,
    Advantage,
}

impl Formula {
    pub fn id(self) -> &'static str {
        match self {
            Formula::Ah => "ah",
            Formula::Theorem1 => "theorem1",
            Formula::Corollary1 => "corollary1",
            Formula::Hnww => "hnww",
            Formula::Advantage => "advantage",
        }
    }

    fn expression(self) -> &'static str {
        match self {
            Formula::Ah => "5.7*sqrt(4.9+ln(1/(1-q)))*sqrt(d/N)",
            Formula::Theorem1 => "exp(4.9-(C-sqrt(dN)/2^p)^2/5.7^2) + sqrt(N^(1+d/2)/2^b)",
            Formula::Corollary1 => "ceil(2*log2(C) + (d/2)*log2(N))",
            Formula::Hnww => "ceil(C^2*d/epsilon^2)",
            Formula::Advantage => "sqrt(N^(1+d/2)/2^b)",
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Formula {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ah" => Ok(Formula::Ah),
            "theorem1" => Ok(Formula::Theorem1),
            "corollary1" => Ok(Formula::Corollary1),
            "hnww" => Ok(Formula::Hnww),
            "advantage" => Ok(Formula::Advantage),
            _ => Err(Error::InvalidArgument(format!(
                "unknown formula `{s}` (expected ah, theorem1, corollary1, hnww or advantage)"
            ))),
        }
    }
}

/// Inputs for [`evaluate`]; each formula reads only the fields it needs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundQuery {
    pub d: u32,
    pub n: u64,
    pub p: u32,
    pub b: u32,
    pub c: f64,
    pub q: f64,
    pub epsilon: f64,
}

impl Default for BoundQuery {
    fn default() -> Self {
        BoundQuery {
            d: 1,
            n: 1,
            p: 52,
            b: 256,
            c: HNWW_CONSTANT,
            q: 0.5,
            epsilon: 0.25,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub formula: Formula,
    pub bound_value: f64,
    pub components: BTreeMap<String, f64>,
    pub vacuous: bool,
    pub notes: Vec<String>,
}

impl BoundReport {
    fn single(formula: Formula, value: f64) -> Self {
        BoundReport {
            formula,
            bound_value: value,
            components: BTreeMap::new(),
            vacuous: false,
            notes: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

impl fmt::Display for BoundReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} = {}", self.formula.expression(), self.bound_value)?;
        for (k, v) in &self.components {
            writeln!(f, "  {k}: {v}")?;
        }
        for n in &self.notes {
            writeln!(f, "  note: {n}")?;
        }
        Ok(())
    }
}

pub fn evaluate(formula: Formula, q: &BoundQuery) -> Result<BoundReport> {
    Ok(match formula {
        Formula::Ah => {
            let mut r = BoundReport::single(formula, ah_bound(q.d, q.n, q.q)?);
            r.components.insert("C".into(), ah_constant(q.q));
            r.components.insert("envelope".into(), (q.d as f64 / q.n as f64).sqrt());
            r
        }
        Formula::Theorem1 => theorem1_tail(q.d, q.n, q.p, q.b, q.c)?,
        Formula::Corollary1 => {
            let b = corollary1_bits(q.c, q.d, q.n)?;
            let mut r = BoundReport::single(formula, f64::from(b));
            r.components
                .insert("security_term".into(), security_advantage(discrepancy_cost(q.d, q.n), b)?);
            r
        }
        Formula::Hnww => BoundReport::single(formula, hnww_inverse_bound(q.epsilon, q.d, q.c)? as f64),
        Formula::Advantage => {
            let t = discrepancy_cost(q.d, q.n);
            let mut r = BoundReport::single(formula, security_advantage(t, q.b)?);
            r.components.insert("T".into(), t);
            r
        }
    })
}
