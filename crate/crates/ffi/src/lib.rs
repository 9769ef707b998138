//! C interface to `drbgdisc`.
//!
//! Generators and point sets are opaque handles created by `*_new` style
//! functions and released with the matching `*_free`. Every fallible call
//! returns a [`DrbgdiscStatus`]; on failure the message is kept per thread
//! and can be read with [`drbgdisc_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use drbgdisc::bounds::{evaluate, BoundQuery, Formula};
use drbgdisc::drbg::{Generator, Mechanism, Seed};
use drbgdisc::points::{generate_points, load_points, round_values, save_points, PointSet, Precision, WriteOptions};
use drbgdisc::stardisc::{
    star_discrepancy_exact, star_discrepancy_oracle, Budget, DiscrepancyResult, WitnessKind,
};
use drbgdisc::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DrbgdiscStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    EntropyUnavailable = 3,
    UnknownMechanism = 4,
    SeedLength = 5,
    ReseedRequired = 6,
    StreamTooShort = 7,
    Domain = 8,
    Parse = 9,
    Infeasible = 10,
    Io = 11,
    BufferTooSmall = 12,
    Panic = 13,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DrbgdiscWitnessKind {
    OpenDeficit = 0,
    ClosedExcess = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DrbgdiscFormula {
    Ah = 0,
    Theorem1 = 1,
    Corollary1 = 2,
    Hnww = 3,
    Advantage = 4,
}

/// Scalar part of a discrepancy result. The witness corner is written to a
/// separate caller buffer of `dim` doubles.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrbgdiscDiscrepancy {
    pub value: f64,
    pub kind: DrbgdiscWitnessKind,
    pub open_count: usize,
    pub closed_count: usize,
    /// False when the time budget ran out and `value` is only a lower bound.
    pub certified: bool,
    pub elapsed_seconds: f64,
    pub nodes: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrbgdiscBoundQuery {
    pub d: u32,
    pub n: u64,
    pub p: u32,
    pub b: u32,
    pub c: f64,
    pub q: f64,
    pub epsilon: f64,
}

pub struct DrbgdiscGenerator(Generator);

pub struct DrbgdiscPoints(PointSet);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> DrbgdiscStatus {
    match e {
        Error::InvalidArgument(_) => DrbgdiscStatus::InvalidArgument,
        Error::EntropyUnavailable(_) => DrbgdiscStatus::EntropyUnavailable,
        Error::UnknownMechanism(_) => DrbgdiscStatus::UnknownMechanism,
        Error::SeedLength { .. } => DrbgdiscStatus::SeedLength,
        Error::ReseedRequired { .. } => DrbgdiscStatus::ReseedRequired,
        Error::StreamTooShort { .. } => DrbgdiscStatus::StreamTooShort,
        Error::Domain { .. } => DrbgdiscStatus::Domain,
        Error::Parse { .. } => DrbgdiscStatus::Parse,
        Error::Infeasible(_) => DrbgdiscStatus::Infeasible,
        Error::Io(_) => DrbgdiscStatus::Io,
    }
}

enum Fail {
    Status(DrbgdiscStatus, String),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn null(what: &str) -> Fail {
    Fail::Status(DrbgdiscStatus::NullPointer, format!("{what} is null"))
}

fn guard<F: FnOnce() -> Result<(), Fail>>(f: F) -> DrbgdiscStatus {
    let outcome = catch_unwind(AssertUnwindSafe(f));
    match outcome {
        Ok(Ok(())) => {
            set_error(String::new());
            DrbgdiscStatus::Ok
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Fail::Status(s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic".into());
            DrbgdiscStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(s: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| Fail::Status(DrbgdiscStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn slice_arg<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length in bytes.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn drbgdisc_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr(), buf.cast::<u8>(), n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Static NUL-terminated version string.
#[no_mangle]
pub extern "C" fn drbgdisc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Instantiate a generator. `mechanism` is `"ctr-drbg-256"` or
/// `"test-counter"`; the seed is `seed_len` bytes.
///
/// # Safety
/// `mechanism` must be a valid C string, `seed` valid for `seed_len` bytes and
/// `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn drbgdisc_generator_new(
    mechanism: *const c_char,
    seed: *const u8,
    seed_len: usize,
    out: *mut *mut DrbgdiscGenerator,
) -> DrbgdiscStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let mech: Mechanism = str_arg(mechanism, "mechanism")?.parse()?;
        let seed = Seed::from_bytes(slice_arg(seed, seed_len, "seed")?.to_vec());
        let gen = Generator::instantiate(mech, &seed)?;
        *out = Box::into_raw(Box::new(DrbgdiscGenerator(gen)));
        Ok(())
    })
}

/// # Safety
/// `gen` must be null or a handle from [`drbgdisc_generator_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn drbgdisc_generator_free(gen: *mut DrbgdiscGenerator) {
    if !gen.is_null() {
        drop(Box::from_raw(gen));
    }
}

/// Next `bits` bits of the stream, packed MSB first into `buf`
/// (`ceil(bits/8)` bytes; trailing bits of the last byte are zero).
///
/// # Safety
/// `gen` must be a live handle and `buf` valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn drbgdisc_generator_fill(
    gen: *mut DrbgdiscGenerator,
    bits: u64,
    buf: *mut u8,
    len: usize,
) -> DrbgdiscStatus {
    guard(|| {
        let gen = out_arg(gen, "gen")?;
        let need = bits.div_ceil(8) as usize;
        if len < need {
            return Err(Fail::Status(
                DrbgdiscStatus::BufferTooSmall,
                format!("{bits} bits need {need} bytes, buffer has {len}"),
            ));
        }
        if need > 0 && buf.is_null() {
            return Err(null("buf"));
        }
        let stream = gen.0.generate_bits(bits)?;
        ptr::copy_nonoverlapping(stream.as_bytes().as_ptr(), buf, need);
        Ok(())
    })
}

/// Draw `n` points in `[0,1)^d` with `p`-bit coordinates from the generator.
///
/// # Safety
/// `gen` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn drbgdisc_points_generate(
    gen: *mut DrbgdiscGenerator,
    d: usize,
    n: usize,
    p: u32,
    out: *mut *mut DrbgdiscPoints,
) -> DrbgdiscStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let gen = out_arg(gen, "gen")?;
        let ps = generate_points(&mut gen.0, d, n, Precision::new(p)?)?;
        *out = Box::into_raw(Box::new(DrbgdiscPoints(ps)));
        Ok(())
    })
}

/// Point set from `n*d` row-major values in `[0,1)`, rounded down to `p` bits.
///
/// # Safety
/// `values` must be valid for `n*d` doubles and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn drbgdisc_points_from_values(
    values: *const f64,
    d: usize,
    n: usize,
    p: u32,
    out: *mut *mut DrbgdiscPoints,
) -> DrbgdiscStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let count = n
            .checked_mul(d)
            .ok_or_else(|| Fail::Status(DrbgdiscStatus::InvalidArgument, "n*d overflows".into()))?;
        let vals = slice_arg(values, count, "values")?;
        let ps = round_values(d, vals, Precision::new(p)?)?;
        *out = Box::into_raw(Box::new(DrbgdiscPoints(ps)));
        Ok(())
    })
}

/// # Safety
/// `path` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn drbgdisc_points_load(path: *const c_char, out: *mut *mut DrbgdiscPoints) -> DrbgdiscStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let ps = load_points(Path::new(str_arg(path, "path")?))?;
        *out = Box::into_raw(Box::new(DrbgdiscPoints(ps)));
        Ok(())
    })
}

/// # Safety
/// `points` must be a live handle and `path` a valid C string.
#[no_mangle]
pub unsafe extern "C" fn drbgdisc_points_save(points: *const DrbgdiscPoints, path: *const c_char) -> DrbgdiscStatus {
    guard(|| {
        let ps = points.as_ref().ok_or_else(|| null("points"))?;
        save_points(&ps.0, Path::new(str_arg(path, "path")?), WriteOptions::default())?;
        Ok(())
    })
}

/// # Safety
/// `points` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn drbgdisc_points_free(points: *mut DrbgdiscPoints) {
    if !points.is_null() {
        drop(Box::from_raw(points));
    }
}

/// Dimension of the set, 0 for a null handle.
///
/// # Safety
/// `points` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn drbgdisc_points_dim(points: *const DrbgdiscPoints) -> usize {
    points.as_ref().map_or(0, |p| p.0.dim())
}

/// Number of points, 0 for a null handle.
///
/// # Safety
/// `points` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn drbgdisc_points_len(points: *const DrbgdiscPoints) -> usize {
    points.as_ref().map_or(0, |p| p.0.len())
}

/// Copy the coordinates, row-major, into `buf` of `len` doubles.
///
/// # Safety
/// `points` must be a live handle and `buf` valid for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn drbgdisc_points_values(
    points: *const DrbgdiscPoints,
    buf: *mut f64,
    len: usize,
) -> DrbgdiscStatus {
    guard(|| {
        let ps = points.as_ref().ok_or_else(|| null("points"))?;
        let vals = ps.0.to_f64();
        if len < vals.len() {
            return Err(Fail::Status(
                DrbgdiscStatus::BufferTooSmall,
                format!("need {} doubles, buffer has {len}", vals.len()),
            ));
        }
        if !vals.is_empty() && buf.is_null() {
            return Err(null("buf"));
        }
        ptr::copy_nonoverlapping(vals.as_ptr(), buf, vals.len());
        Ok(())
    })
}

unsafe fn write_result(
    r: &DiscrepancyResult,
    witness: *mut f64,
    witness_len: usize,
    out: *mut DrbgdiscDiscrepancy,
) -> Result<(), Fail> {
    let out = out_arg(out, "out")?;
    let t = &r.witness.0;
    if !witness.is_null() {
        if witness_len < t.len() {
            return Err(Fail::Status(
                DrbgdiscStatus::BufferTooSmall,
                format!("witness needs {} doubles, buffer has {witness_len}", t.len()),
            ));
        }
        ptr::copy_nonoverlapping(t.as_ptr(), witness, t.len());
    }
    *out = DrbgdiscDiscrepancy {
        value: r.value,
        kind: match r.kind {
            WitnessKind::OpenDeficit => DrbgdiscWitnessKind::OpenDeficit,
            WitnessKind::ClosedExcess => DrbgdiscWitnessKind::ClosedExcess,
        },
        open_count: r.open_count,
        closed_count: r.closed_count,
        certified: r.certified,
        elapsed_seconds: r.elapsed.as_secs_f64(),
        nodes: r.nodes,
    };
    Ok(())
}

/// Exact star discrepancy. `budget_seconds <= 0` means no time limit. The
/// witness corner goes to `witness` (may be null) of `witness_len` doubles.
///
/// # Safety
/// `points` must be a live handle, `out` valid, `witness` null or valid for
/// `witness_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn drbgdisc_star_discrepancy(
    points: *const DrbgdiscPoints,
    budget_seconds: f64,
    witness: *mut f64,
    witness_len: usize,
    out: *mut DrbgdiscDiscrepancy,
) -> DrbgdiscStatus {
    guard(|| {
        let ps = points.as_ref().ok_or_else(|| null("points"))?;
        let budget = if budget_seconds > 0.0 {
            Budget::seconds(budget_seconds)
        } else {
            Budget::unlimited()
        };
        let r = star_discrepancy_exact(&ps.0, budget)?;
        write_result(&r, witness, witness_len, out)
    })
}

/// Brute-force evaluation over the whole critical grid; refuses large inputs
/// with [`DrbgdiscStatus::Infeasible`].
///
/// # Safety
/// As for [`drbgdisc_star_discrepancy`].
#[no_mangle]
pub unsafe extern "C" fn drbgdisc_star_discrepancy_oracle(
    points: *const DrbgdiscPoints,
    witness: *mut f64,
    witness_len: usize,
    out: *mut DrbgdiscDiscrepancy,
) -> DrbgdiscStatus {
    guard(|| {
        let ps = points.as_ref().ok_or_else(|| null("points"))?;
        let r = star_discrepancy_oracle(&ps.0)?;
        write_result(&r, witness, witness_len, out)
    })
}

/// Fills `query` with the library defaults.
///
/// # Safety
/// `query` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn drbgdisc_bound_query_default(query: *mut DrbgdiscBoundQuery) -> DrbgdiscStatus {
    guard(|| {
        let q = out_arg(query, "query")?;
        let d = BoundQuery::default();
        *q = DrbgdiscBoundQuery {
            d: d.d,
            n: d.n,
            p: d.p,
            b: d.b,
            c: d.c,
            q: d.q,
            epsilon: d.epsilon,
        };
        Ok(())
    })
}

/// Headline value of one of the closed-form bounds. Sets `*vacuous` (if
/// non-null) when the bound says nothing.
///
/// # Safety
/// `query` and `out` must be valid pointers; `vacuous` may be null.
#[no_mangle]
pub unsafe extern "C" fn drbgdisc_bound(
    formula: DrbgdiscFormula,
    query: *const DrbgdiscBoundQuery,
    out: *mut f64,
    vacuous: *mut bool,
) -> DrbgdiscStatus {
    guard(|| {
        let q = query.as_ref().ok_or_else(|| null("query"))?;
        let out = out_arg(out, "out")?;
        let formula = match formula {
            DrbgdiscFormula::Ah => Formula::Ah,
            DrbgdiscFormula::Theorem1 => Formula::Theorem1,
            DrbgdiscFormula::Corollary1 => Formula::Corollary1,
            DrbgdiscFormula::Hnww => Formula::Hnww,
            DrbgdiscFormula::Advantage => Formula::Advantage,
        };
        let query = BoundQuery {
            d: q.d,
            n: q.n,
            p: q.p,
            b: q.b,
            c: q.c,
            q: q.q,
            epsilon: q.epsilon,
        };
        let report = evaluate(formula, &query)?;
        *out = report.bound_value;
        if let Some(v) = vacuous.as_mut() {
            *v = report.vacuous;
        }
        Ok(())
    })
}
