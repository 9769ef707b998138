//! Branch and bound over the critical grid.
//!
//! Two searches run side by side, one per sign of the local discrepancy.
//! Both fix the corner one axis at a time and keep the set of points that
//! are still inside the box as a bitset. Points are relabelled by their rank
//! on the last axis, so the last axis is a scan over set bits.
//!
//! Closed excess: a maximising corner may be shrunk until every face touches
//! a point in the closed box, so `t_j` only ranges over coordinates of points
//! still inside. One of the touching points must stay inside on the later
//! axes, which gives lower bounds `t_l >= L_l`. The subtree bound is
//! `count/N - V * prod L_l`.
//!
//! Open defect: a maximising corner may be grown until each face is 1 or is
//! blocked by a point lying strictly inside on every other axis. The
//! blockers give strict lower bounds `t_l > U_l`, every point with
//! `x_l <= U_l` on all later axes is certainly counted, and the volume is at
//! most the current prefix product.
//!
//! Volumes are folded left in axis order, as in the plain evaluation, and
//! every bound is a monotone float expression of the same fold, so pruning
//! never discards a strictly better corner.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::Instant;

use rayon::prelude::*;

use super::{Budget, Corner, DiscrepancyResult};
use crate::error::{Error, Result};
use crate::points::PointSet;

/// Largest dimension the search handles.
const MAX_DIM: usize = 32;
const CHECK_EVERY: u64 = 4096;
const NONE: i32 = -1;

/// Exact star discrepancy with witness. With a finite budget the search may
/// stop early; the result is then flagged `certified = false` and its value
/// is the best lower bound found.
pub fn star_discrepancy_exact(ps: &PointSet, budget: Budget) -> Result<DiscrepancyResult> {
    if ps.is_empty() {
        return Err(Error::InvalidArgument("empty point set".into()));
    }
    if ps.dim() > MAX_DIM {
        return Err(Error::Infeasible(format!(
            "dimension {} exceeds the supported maximum of {MAX_DIM}",
            ps.dim()
        )));
    }
    match ps.len().div_ceil(64) {
        1 => run::<1>(ps, budget),
        2 => run::<2>(ps, budget),
        3 | 4 => run::<4>(ps, budget),
        5..=8 => run::<8>(ps, budget),
        9..=16 => run::<16>(ps, budget),
        17..=32 => run::<32>(ps, budget),
        33..=64 => run::<64>(ps, budget),
        _ => Err(Error::Infeasible(format!(
            "{} points exceed the supported maximum of 4096",
            ps.len()
        ))),
    }
}

type Bits<const W: usize> = [u64; W];

#[inline]
fn and<const W: usize>(a: &Bits<W>, b: &Bits<W>) -> Bits<W> {
    let mut r = [0u64; W];
    for k in 0..W {
        r[k] = a[k] & b[k];
    }
    r
}

#[inline]
fn popcount<const W: usize>(a: &Bits<W>) -> u32 {
    a.iter().map(|w| w.count_ones()).sum()
}

#[inline]
fn is_empty<const W: usize>(a: &Bits<W>) -> bool {
    a.iter().all(|&w| w == 0)
}

/// Set bit indices in increasing order.
fn ascending<const W: usize>(a: &Bits<W>) -> impl Iterator<Item = usize> + '_ {
    (0..W).flat_map(move |k| {
        let mut w = a[k];
        std::iter::from_fn(move || {
            if w == 0 {
                return None;
            }
            let b = w.trailing_zeros() as usize;
            w &= w - 1;
            Some(k * 64 + b)
        })
    })
}

/// Set bit indices in decreasing order.
fn descending<const W: usize>(a: &Bits<W>) -> impl Iterator<Item = usize> + '_ {
    (0..W).rev().flat_map(move |k| {
        let mut w = a[k];
        std::iter::from_fn(move || {
            if w == 0 {
                return None;
            }
            let b = 63 - w.leading_zeros() as usize;
            w &= !(1u64 << b);
            Some(k * 64 + b)
        })
    })
}

struct Prep<const W: usize> {
    n: usize,
    d: usize,
    /// Coordinates after relabelling, row-major.
    x: Vec<f64>,
    /// `grp[i*d + j]`: index of point `i`'s value among the distinct values on axis `j`.
    grp: Vec<u32>,
    vals: Vec<Vec<f64>>,
    /// Points with `x_j <= vals[j][g]`.
    le: Vec<Vec<Bits<W>>>,
    /// Points with `x_j < vals[j][g]`.
    lt: Vec<Vec<Bits<W>>>,
    /// Points with `x_j == vals[j][g]`.
    eq: Vec<Vec<Bits<W>>>,
    all: Bits<W>,
}

impl<const W: usize> Prep<W> {
    fn new(ps: &PointSet) -> Self {
        let (n, d) = (ps.len(), ps.dim());
        let raw = ps.to_f64();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| raw[a * d + d - 1].total_cmp(&raw[b * d + d - 1]).then(a.cmp(&b)));
        let mut x = Vec::with_capacity(n * d);
        for &i in &order {
            x.extend_from_slice(&raw[i * d..(i + 1) * d]);
        }

        let mut grp = vec![0u32; n * d];
        let mut vals = Vec::with_capacity(d);
        let mut le = Vec::with_capacity(d);
        let mut lt = Vec::with_capacity(d);
        let mut eq = Vec::with_capacity(d);
        for j in 0..d {
            let mut v: Vec<f64> = (0..n).map(|i| x[i * d + j]).collect();
            v.sort_by(f64::total_cmp);
            v.dedup();
            let mut eq_j = vec![[0u64; W]; v.len()];
            for i in 0..n {
                let g = v.partition_point(|&s| s < x[i * d + j]);
                grp[i * d + j] = g as u32;
                eq_j[g][i / 64] |= 1 << (i % 64);
            }
            let mut le_j = Vec::with_capacity(v.len());
            let mut lt_j = Vec::with_capacity(v.len());
            let mut acc = [0u64; W];
            for e in &eq_j {
                lt_j.push(acc);
                for k in 0..W {
                    acc[k] |= e[k];
                }
                le_j.push(acc);
            }
            vals.push(v);
            le.push(le_j);
            lt.push(lt_j);
            eq.push(eq_j);
        }
        let mut all = [0u64; W];
        for i in 0..n {
            all[i / 64] |= 1 << (i % 64);
        }
        Prep {
            n,
            d,
            x,
            grp,
            vals,
            le,
            lt,
            eq,
            all,
        }
    }

    #[inline]
    fn frac(&self, k: u32) -> f64 {
        // Division, not multiplication by 1/N, to match the plain evaluation.
        k as f64 / self.n as f64
    }

    /// Raise `bounds[l]`, `l > j`, to the smallest group index on axis `l`
    /// among the points of the nonempty set `w`.
    #[inline]
    fn raise(&self, w: &Bits<W>, j: usize, bounds: &mut [i32; MAX_DIM]) {
        let d = self.d;
        let mut it = ascending(w);
        let first = it.next().expect("nonempty witness set");
        let mut m = [0u32; MAX_DIM];
        m[j + 1..d].copy_from_slice(&self.grp[first * d + j + 1..first * d + d]);
        for i in it {
            for l in j + 1..d {
                m[l] = m[l].min(self.grp[i * d + l]);
            }
        }
        for l in j + 1..d {
            bounds[l] = bounds[l].max(m[l] as i32);
        }
    }
}

struct Shared {
    best: AtomicU64,
    nodes: AtomicU64,
    stop: AtomicBool,
    deadline: Option<Instant>,
    node_limit: Option<u64>,
}

impl Shared {
    #[inline]
    fn best(&self) -> f64 {
        f64::from_bits(self.best.load(Ordering::Relaxed))
    }
}

/// Best corner found by one worker.
struct Record {
    value: f64,
    corner: Vec<f64>,
}

struct Search<'a, const W: usize> {
    p: &'a Prep<W>,
    sh: &'a Shared,
    corner: [f64; MAX_DIM],
    record: Option<Record>,
    nodes: u64,
    stopped: bool,
    /// Candidate scratch, one per depth.
    bufs: Vec<Vec<u32>>,
}

impl<'a, const W: usize> Search<'a, W> {
    fn new(p: &'a Prep<W>, sh: &'a Shared) -> Self {
        Search {
            p,
            sh,
            corner: [1.0; MAX_DIM],
            record: None,
            nodes: 0,
            stopped: false,
            bufs: vec![Vec::new(); p.d],
        }
    }

    #[inline]
    fn tick(&mut self) -> bool {
        self.nodes += 1;
        if self.nodes.is_multiple_of(CHECK_EVERY) {
            let total = self.sh.nodes.fetch_add(CHECK_EVERY, Ordering::Relaxed) + CHECK_EVERY;
            let over_nodes = self.sh.node_limit.is_some_and(|m| total >= m);
            let over_time = self.sh.deadline.is_some_and(|t| Instant::now() >= t);
            if over_nodes || over_time {
                self.sh.stop.store(true, Ordering::Relaxed);
            }
            if self.sh.stop.load(Ordering::Relaxed) {
                self.stopped = true;
            }
        }
        self.stopped
    }

    /// Offer a full corner whose last component is `t_last`.
    #[inline]
    fn offer(&mut self, value: f64, t_last: f64) {
        if value <= self.sh.best() {
            return;
        }
        self.sh.best.fetch_max(value.to_bits(), Ordering::Relaxed);
        let d = self.p.d;
        let mut corner = self.corner[..d].to_vec();
        corner[d - 1] = t_last;
        if self.record.as_ref().is_none_or(|r| value > r.value) {
            self.record = Some(Record { value, corner });
        }
    }

    fn flush(&mut self) {
        self.sh.nodes.fetch_add(self.nodes % CHECK_EVERY, Ordering::Relaxed);
        self.nodes = 0;
    }

    // ---- closed excess ----

    fn closed(&mut self, j: usize, a: &Bits<W>, v: f64, lo: &[i32; MAX_DIM]) {
        if self.tick() {
            return;
        }
        if j + 1 == self.p.d {
            self.closed_leaf(a, v, lo[j]);
            return;
        }
        let p = self.p;
        // Smallest volume any child can reach, for the early exit below.
        let mut floor = v * if lo[j] == NONE { 0.0 } else { p.vals[j][lo[j] as usize] };
        for l in j + 1..p.d {
            floor *= if lo[l] == NONE { 0.0 } else { p.vals[l][lo[l] as usize] };
        }
        let groups = self.groups_desc(j, a, lo[j].max(0) as u32);
        for &g in &groups {
            // Counts only shrink as t_j decreases.
            if p.frac(popcount(&and(a, &p.le[j][g as usize]))) - floor <= self.sh.best() {
                break;
            }
            self.closed_child(j, a, v, lo, g as usize);
            if self.stopped {
                break;
            }
        }
        self.bufs[j] = groups;
    }

    fn closed_child(&mut self, j: usize, a: &Bits<W>, v: f64, lo: &[i32; MAX_DIM], g: usize) {
        let p = self.p;
        let touch = and(a, &p.eq[j][g]);
        if is_empty(&touch) {
            return;
        }
        let a2 = and(a, &p.le[j][g]);
        let t = p.vals[j][g];
        let v2 = v * t;
        let mut lo2 = *lo;
        p.raise(&touch, j, &mut lo2);
        let mut vol = v2;
        for l in j + 1..p.d {
            vol *= p.vals[l][lo2[l] as usize];
        }
        if p.frac(popcount(&a2)) - vol <= self.sh.best() {
            return;
        }
        let last = p.d - 1;
        if j + 1 < last {
            // Relax every axis but the last to its lower bound and solve
            // the last one exactly.
            let mut vpre = v2;
            for l in j + 1..last {
                vpre *= p.vals[l][lo2[l] as usize];
            }
            if !self.closed_may_beat(&a2, vpre, lo2[last]) {
                return;
            }
        }
        self.corner[j] = t;
        self.closed(j + 1, &a2, v2, &lo2);
    }

    /// Whether `k/N - v * t` over last-axis corners `t >= vals[lo]` can
    /// exceed the current best.
    fn closed_may_beat(&self, a: &Bits<W>, v: f64, lo: i32) -> bool {
        let p = self.p;
        let last = p.d - 1;
        let floor = p.vals[last][lo as usize];
        let best = self.sh.best();
        let mut k = popcount(a);
        let mut prev = u32::MAX;
        for i in descending(a) {
            let g = p.grp[i * p.d + last];
            if (g as i32) < lo || p.frac(k) - v * floor <= best {
                return false;
            }
            if g != prev {
                prev = g;
                if p.frac(k) - v * p.x[i * p.d + last] > best {
                    return true;
                }
            }
            k -= 1;
        }
        false
    }

    fn closed_leaf(&mut self, a: &Bits<W>, v: f64, lo: i32) {
        let p = self.p;
        let last = p.d - 1;
        let floor = if lo == NONE { 0.0 } else { p.vals[last][lo as usize] };
        let mut k = popcount(a);
        let mut prev = u32::MAX;
        for i in descending(a) {
            let g = p.grp[i * p.d + last];
            if (g as i32) < lo {
                break;
            }
            if g != prev {
                prev = g;
                if p.frac(k) - v * floor <= self.sh.best() {
                    break;
                }
                let t = p.x[i * p.d + last];
                self.offer(p.frac(k) - v * t, t);
            }
            k -= 1;
        }
    }

    // ---- open defect ----

    fn open(&mut self, j: usize, o: &Bits<W>, v: f64, up: &[i32; MAX_DIM]) {
        if self.tick() {
            return;
        }
        if j + 1 == self.p.d {
            self.open_leaf(o, v, up[j]);
            return;
        }
        self.open_child(j, o, v, up, None);
        let groups = self.groups_desc(j, o, (up[j] + 1) as u32);
        for &g in &groups {
            // Volume only shrinks as t_j decreases.
            if self.stopped || v * self.p.vals[j][g as usize] <= self.sh.best() {
                break;
            }
            self.open_child(j, o, v, up, Some(g as usize));
        }
        self.bufs[j] = groups;
    }

    /// Distinct axis-`j` groups `>= min` among the points of `set`, largest
    /// first. Returns the per-depth buffer, which the caller hands back.
    fn groups_desc(&mut self, j: usize, set: &Bits<W>, min: u32) -> Vec<u32> {
        let p = self.p;
        let mut out = std::mem::take(&mut self.bufs[j]);
        out.clear();
        out.extend(ascending(set).map(|i| p.grp[i * p.d + j]).filter(|&g| g >= min));
        out.sort_unstable_by(|a, b| b.cmp(a));
        out.dedup();
        out
    }

    /// `g = None` sets `t_j = 1`.
    fn open_child(&mut self, j: usize, o: &Bits<W>, v: f64, up: &[i32; MAX_DIM], g: Option<usize>) {
        let p = self.p;
        let mut up2 = *up;
        let (o2, t) = match g {
            None => (*o, 1.0),
            Some(g) => {
                let block = and(o, &p.eq[j][g]);
                if is_empty(&block) {
                    return;
                }
                p.raise(&block, j, &mut up2);
                (and(o, &p.lt[j][g]), p.vals[j][g])
            }
        };
        let v2 = v * t;
        // Points at or below every strict lower bound are inside whatever
        // the remaining axes choose.
        let mut sure = o2;
        for l in j + 1..p.d {
            if up2[l] == NONE {
                sure = [0; W];
                break;
            }
            sure = and(&sure, &p.le[l][up2[l] as usize]);
        }
        if v2 - p.frac(popcount(&sure)) <= self.sh.best() {
            return;
        }
        let last = p.d - 1;
        if j + 1 < last && (j + 1..last).all(|l| up2[l] != NONE) {
            // Same relaxation on the last axis: the other remaining sides
            // are at most 1 and keep at least the points under their bounds.
            let mut s = o2;
            for l in j + 1..last {
                s = and(&s, &p.le[l][up2[l] as usize]);
            }
            if !self.open_may_beat(&s, v2, up2[last]) {
                return;
            }
        }
        self.corner[j] = t;
        self.open(j + 1, &o2, v2, &up2);
    }

    /// Whether `v * t - #{x_last < t}/N` over last-axis corners
    /// `t > vals[up]` (or `t = 1`) can exceed the current best.
    fn open_may_beat(&self, s: &Bits<W>, v: f64, up: i32) -> bool {
        let p = self.p;
        let last = p.d - 1;
        let best = self.sh.best();
        let (mut k, rest) = split_at_group(p, s, up);
        let mut prev = u32::MAX;
        for i in ascending(&rest) {
            let g = p.grp[i * p.d + last];
            if g != prev {
                prev = g;
                if v - p.frac(k) <= best {
                    return false;
                }
                if v * p.x[i * p.d + last] - p.frac(k) > best {
                    return true;
                }
            }
            k += 1;
        }
        v - p.frac(k) > best
    }

    fn open_leaf(&mut self, o: &Bits<W>, v: f64, up: i32) {
        let p = self.p;
        let last = p.d - 1;
        let (mut k, rest) = split_at_group(p, o, up);
        let mut prev = u32::MAX;
        for i in ascending(&rest) {
            let g = p.grp[i * p.d + last];
            if g != prev {
                prev = g;
                // Counts only grow to the right, volume is at most v.
                if v - p.frac(k) <= self.sh.best() {
                    return;
                }
                let t = p.x[i * p.d + last];
                self.offer(v * t - p.frac(k), t);
            }
            k += 1;
        }
        self.offer(v * 1.0 - p.frac(k), 1.0);
    }
}

/// Split `set` on the last axis into the number of points at or below
/// group `up` and the set of points above it.
#[inline]
fn split_at_group<const W: usize>(p: &Prep<W>, set: &Bits<W>, up: i32) -> (u32, Bits<W>) {
    if up == NONE {
        return (0, *set);
    }
    let below = &p.le[p.d - 1][up as usize];
    let mut rest = *set;
    for k in 0..W {
        rest[k] &= !below[k];
    }
    (popcount(&and(set, below)), rest)
}

#[derive(Clone, Copy)]
enum Task {
    Closed(usize),
    Open(Option<usize>),
    ClosedLeaf,
    OpenLeaf,
}

fn run<const W: usize>(ps: &PointSet, budget: Budget) -> Result<DiscrepancyResult> {
    let start = Instant::now();
    let p = Prep::<W>::new(ps);
    let d = p.d;

    // Cheap starting bound: the corner at (1,…,1) and at each point.
    let mut seed = Record {
        value: 0.0,
        corner: vec![1.0; d],
    };
    for i in 0..p.n {
        let t = &p.x[i * d..(i + 1) * d];
        let v = super::local_discrepancy_f64(&p.x, d, t).value();
        if v > seed.value {
            seed = Record {
                value: v,
                corner: t.to_vec(),
            };
        }
    }

    let sh = Shared {
        best: AtomicU64::new(seed.value.to_bits()),
        nodes: AtomicU64::new(0),
        stop: AtomicBool::new(false),
        deadline: budget.time.map(|t| start + t),
        node_limit: budget.nodes,
    };

    let tasks: Vec<Task> = if d == 1 {
        vec![Task::ClosedLeaf, Task::OpenLeaf]
    } else {
        let groups = p.vals[0].len();
        let mut t: Vec<Task> = (0..groups).rev().map(Task::Closed).collect();
        t.push(Task::Open(None));
        t.extend((0..groups).rev().map(|g| Task::Open(Some(g))));
        t
    };

    let root_lo = [NONE; MAX_DIM];
    let records: Vec<Option<Record>> = tasks
        .par_iter()
        .map(|&task| {
            let mut s = Search::new(&p, &sh);
            if !sh.stop.load(Ordering::Relaxed) {
                match task {
                    Task::Closed(g) => s.closed_child(0, &p.all, 1.0, &root_lo, g),
                    Task::Open(g) => s.open_child(0, &p.all, 1.0, &root_lo, g),
                    Task::ClosedLeaf => s.closed_leaf(&p.all, 1.0, NONE),
                    Task::OpenLeaf => s.open_leaf(&p.all, 1.0, NONE),
                }
            }
            s.flush();
            s.record
        })
        .collect();

    let mut best = seed;
    for r in records.into_iter().flatten() {
        if r.value > best.value {
            best = r;
        }
    }
    let certified = !sh.stop.load(Ordering::Relaxed);
    let result = DiscrepancyResult::at_witness(
        ps,
        Corner(best.corner),
        certified,
        start.elapsed(),
        sh.nodes.load(Ordering::Relaxed),
    );
    debug_assert_eq!(result.value, best.value);
    Ok(result)
}
