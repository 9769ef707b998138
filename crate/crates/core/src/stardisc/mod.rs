//! Star discrepancy of a point set, with the anchored box that attains it.
//!
//! For a corner `t` the open defect is `vol([0,t)) - #{x < t}/N` and the
//! closed excess is `#{x <= t}/N - vol([0,t))`. The star discrepancy is the
//! maximum of both over the critical grid, where each axis takes a point
//! coordinate or 1.

mod exact;

use std::fmt;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::points::PointSet;

pub use self::exact::star_discrepancy_exact;

/// Largest `(N+1)^d` the oracle will enumerate.
pub const ORACLE_GRID_LIMIT: f64 = 1e8;

/// Upper corner `t` of the anchored box `[0, t)`.
///
/// A component equal to 0 only occurs for closed-excess witnesses where a
/// point sits on the lower face; read it as the limit `t -> 0+`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Corner(pub Vec<f64>);

impl Corner {
    pub fn ones(dim: usize) -> Self {
        Corner(vec![1.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Product of the side lengths, folded left from 1 in axis order.
    pub fn volume(&self) -> f64 {
        self.0.iter().fold(1.0, |v, &t| v * t)
    }
}

impl fmt::Display for Corner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (j, t) in self.0.iter().enumerate() {
            if j > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{t}")?;
        }
        f.write_str(")")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessKind {
    OpenDeficit,
    ClosedExcess,
}

impl WitnessKind {
    pub fn as_str(self) -> &'static str {
        match self {
            WitnessKind::OpenDeficit => "open-deficit",
            WitnessKind::ClosedExcess => "closed-excess",
        }
    }
}

impl fmt::Display for WitnessKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Both one-sided local discrepancies at one corner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalDiscrepancy {
    pub volume: f64,
    pub open_count: usize,
    pub closed_count: usize,
    pub open_defect: f64,
    pub closed_excess: f64,
}

impl LocalDiscrepancy {
    pub fn value(&self) -> f64 {
        self.open_defect.max(self.closed_excess)
    }

    pub fn kind(&self) -> WitnessKind {
        if self.closed_excess >= self.open_defect {
            WitnessKind::ClosedExcess
        } else {
            WitnessKind::OpenDeficit
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DiscrepancyResult {
    pub value: f64,
    pub witness: Corner,
    pub kind: WitnessKind,
    pub open_count: usize,
    pub closed_count: usize,
    /// `false` when a budget cut the search short; `value` is then only a
    /// lower bound.
    pub certified: bool,
    pub elapsed: Duration,
    /// Search nodes visited (grid corners for the oracle).
    pub nodes: u64,
}

impl DiscrepancyResult {
    fn at_witness(ps: &PointSet, witness: Corner, certified: bool, elapsed: Duration, nodes: u64) -> Self {
        let local = local_discrepancy_f64(&ps.to_f64(), ps.dim(), &witness.0);
        DiscrepancyResult {
            value: local.value(),
            kind: local.kind(),
            open_count: local.open_count,
            closed_count: local.closed_count,
            witness,
            certified,
            elapsed,
            nodes,
        }
    }
}

/// Limits for [`star_discrepancy_exact`]. The default is unlimited.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Budget {
    pub time: Option<Duration>,
    pub nodes: Option<u64>,
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget::default()
    }

    pub fn seconds(s: f64) -> Self {
        Budget {
            time: Some(Duration::from_secs_f64(s)),
            nodes: None,
        }
    }
}

pub fn local_discrepancy(ps: &PointSet, t: &Corner) -> Result<LocalDiscrepancy> {
    if t.dim() != ps.dim() {
        return Err(Error::InvalidArgument(format!(
            "corner has {} components, point set has dimension {}",
            t.dim(),
            ps.dim()
        )));
    }
    if ps.is_empty() {
        return Err(Error::InvalidArgument("empty point set".into()));
    }
    if let Some(&bad) = t.0.iter().find(|&&x| !(0.0..=1.0).contains(&x)) {
        return Err(Error::Domain { value: bad });
    }
    Ok(local_discrepancy_f64(&ps.to_f64(), ps.dim(), &t.0))
}

pub(crate) fn local_discrepancy_f64(x: &[f64], dim: usize, t: &[f64]) -> LocalDiscrepancy {
    let n = x.len() / dim;
    let mut open = 0;
    let mut closed = 0;
    for p in x.chunks_exact(dim) {
        if p.iter().zip(t).all(|(a, b)| a <= b) {
            closed += 1;
            if p.iter().zip(t).all(|(a, b)| a < b) {
                open += 1;
            }
        }
    }
    let volume = t.iter().fold(1.0, |v, &s| v * s);
    LocalDiscrepancy {
        volume,
        open_count: open,
        closed_count: closed,
        open_defect: volume - open as f64 / n as f64,
        closed_excess: closed as f64 / n as f64 - volume,
    }
}

/// Evaluate every corner of the critical grid. Refuses instances with
/// `(N+1)^d > 1e8`.
pub fn star_discrepancy_oracle(ps: &PointSet) -> Result<DiscrepancyResult> {
    let start = Instant::now();
    let (n, d) = (ps.len(), ps.dim());
    if n == 0 {
        return Err(Error::InvalidArgument("empty point set".into()));
    }
    let grid = (n as f64 + 1.0).powi(d as i32);
    if grid > ORACLE_GRID_LIMIT {
        return Err(Error::Infeasible(format!(
            "oracle grid (N+1)^d = {grid:.3e} exceeds {ORACLE_GRID_LIMIT:.0e} (N={n}, d={d})"
        )));
    }
    let x = ps.to_f64();
    let axes: Vec<Vec<f64>> = (0..d)
        .map(|j| {
            let mut v: Vec<f64> = (0..n).map(|i| x[i * d + j]).collect();
            v.push(1.0);
            v.sort_by(f64::total_cmp);
            v.dedup();
            v
        })
        .collect();

    let mut idx = vec![0usize; d];
    let mut t: Vec<f64> = axes.iter().map(|a| a[0]).collect();
    let mut best = f64::NEG_INFINITY;
    let mut witness = t.clone();
    let mut nodes = 0u64;
    loop {
        nodes += 1;
        let v = local_discrepancy_f64(&x, d, &t).value();
        if v > best {
            best = v;
            witness.copy_from_slice(&t);
        }
        // Odometer step.
        let mut j = 0;
        loop {
            if j == d {
                return Ok(DiscrepancyResult::at_witness(
                    ps,
                    Corner(witness),
                    true,
                    start.elapsed(),
                    nodes,
                ));
            }
            idx[j] += 1;
            if idx[j] < axes[j].len() {
                t[j] = axes[j][idx[j]];
                break;
            }
            idx[j] = 0;
            t[j] = axes[j][0];
            j += 1;
        }
    }
}
