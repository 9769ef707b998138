//! Plain-text point-set format.
//!
//! ```text
//! # drbgdisc point set
//! # d=2 N=3 p=52
//! # mechanism=ctr-drbg-256 seed_bits=384 security_bits=256 seed_digest=… stream_offset=0
//! 2251799813685248 1125899906842624
//! …
//! ```
//!
//! Each row holds the integer numerators `k` of one point, coordinate value
//! `k / 2^p`. Readers also accept decimal coordinates, which must lie in
//! `[0,1)` and be exact multiples of `2^-p`. Anything after `#` on a row is
//! ignored; the writer can put decimal values there for human readers.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::points::{PointSet, Precision, Provenance};

#[derive(Debug, Clone, Copy, Default)]
pub struct WriteOptions {
    /// Append `# x_1 … x_d` in decimal to every row.
    pub decimal: bool,
}

pub fn write_points<W: Write>(ps: &PointSet, mut out: W, opts: WriteOptions) -> Result<()> {
    writeln!(out, "# drbgdisc point set")?;
    writeln!(out, "# d={} N={} p={}", ps.dim(), ps.len(), ps.precision())?;
    if let Some(prov) = ps.provenance() {
        writeln!(
            out,
            "# mechanism={} seed_bits={} security_bits={} seed_digest={} stream_offset={}",
            prov.mechanism, prov.seed_bits, prov.security_bits, prov.seed_digest, prov.stream_offset
        )?;
    }
    let mut line = String::new();
    for i in 0..ps.len() {
        line.clear();
        for j in 0..ps.dim() {
            if j > 0 {
                line.push(' ');
            }
            line.push_str(&ps.numerator(i, j).to_string());
        }
        if opts.decimal {
            line.push_str(" #");
            for j in 0..ps.dim() {
                line.push(' ');
                line.push_str(&ps.coord(i, j).to_string());
            }
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

pub fn save_points(ps: &PointSet, path: &Path, opts: WriteOptions) -> Result<()> {
    let mut buf = Vec::new();
    write_points(ps, &mut buf, opts)?;
    fs::write(path, buf)?;
    Ok(())
}

pub fn load_points(path: &Path) -> Result<PointSet> {
    parse_points(&fs::read_to_string(path)?)
}

#[derive(Default)]
struct Header {
    dim: Option<usize>,
    n: Option<usize>,
    p: Option<u32>,
    mechanism: Option<String>,
    seed_bits: Option<usize>,
    security_bits: Option<u32>,
    seed_digest: Option<String>,
    stream_offset: Option<u64>,
}

pub fn parse_points(text: &str) -> Result<PointSet> {
    let mut header = Header::default();
    let mut rows: Vec<(usize, &str)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let (body, comment) = match raw.find('#') {
            Some(pos) => (&raw[..pos], Some(&raw[pos + 1..])),
            None => (raw, None),
        };
        if body.trim().is_empty() {
            // Header keys are only read from comment-only lines before the data.
            if let Some(c) = comment {
                if rows.is_empty() {
                    read_header(c, &mut header, line_no)?;
                }
            }
            continue;
        }
        rows.push((line_no, body));
    }

    let dim = header.dim.ok_or_else(|| missing("d"))?;
    let n = header.n.ok_or_else(|| missing("N"))?;
    let precision = Precision::new(header.p.ok_or_else(|| missing("p"))?).map_err(|e| Error::Parse {
        line: 0,
        message: e.to_string(),
    })?;
    if dim == 0 {
        return Err(Error::Parse {
            line: 0,
            message: "d must be at least 1".into(),
        });
    }
    if rows.len() != n {
        return Err(Error::Parse {
            line: rows.last().map_or(0, |r| r.0),
            message: format!("header declares N={n} but {} rows follow", rows.len()),
        });
    }

    let mut num = Vec::with_capacity(dim * n);
    for (line_no, body) in rows {
        let tokens: Vec<&str> = body.split_whitespace().collect();
        if tokens.len() != dim {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected {dim} coordinates, found {}", tokens.len()),
            });
        }
        for tok in tokens {
            num.push(parse_coordinate(tok, precision).map_err(|message| Error::Parse {
                line: line_no,
                message,
            })?);
        }
    }

    let mut ps = PointSet::from_numerators(dim, precision, num)?;
    if let Some(mechanism) = header.mechanism {
        ps = ps.with_provenance(Provenance {
            mechanism,
            seed_bits: header.seed_bits.unwrap_or(0),
            security_bits: header.security_bits.unwrap_or(0),
            seed_digest: header.seed_digest.unwrap_or_default(),
            stream_offset: header.stream_offset.unwrap_or(0),
        });
    }
    Ok(ps)
}

fn missing(key: &str) -> Error {
    Error::Parse {
        line: 0,
        message: format!("header is missing `{key}=`"),
    }
}

fn read_header(comment: &str, h: &mut Header, line: usize) -> Result<()> {
    for tok in comment.split_whitespace() {
        let Some((key, value)) = tok.split_once('=') else {
            continue;
        };
        let bad = |what: &str| Error::Parse {
            line,
            message: format!("bad {what} value `{value}`"),
        };
        match key {
            "d" => h.dim = Some(value.parse().map_err(|_| bad("d"))?),
            "N" => h.n = Some(value.parse().map_err(|_| bad("N"))?),
            "p" => h.p = Some(value.parse().map_err(|_| bad("p"))?),
            "mechanism" => h.mechanism = Some(value.to_string()),
            "seed_bits" => h.seed_bits = Some(value.parse().map_err(|_| bad("seed_bits"))?),
            "security_bits" => h.security_bits = Some(value.parse().map_err(|_| bad("security_bits"))?),
            "seed_digest" => h.seed_digest = Some(value.to_string()),
            "stream_offset" => h.stream_offset = Some(value.parse().map_err(|_| bad("stream_offset"))?),
            _ => {}
        }
    }
    Ok(())
}

fn parse_coordinate(tok: &str, precision: Precision) -> std::result::Result<u64, String> {
    if tok.bytes().all(|b| b.is_ascii_digit()) {
        let k: u64 = tok.parse().map_err(|_| format!("bad numerator `{tok}`"))?;
        if k >= precision.modulus() {
            return Err(format!("numerator {k} is not below 2^{precision} (coordinate >= 1)"));
        }
        return Ok(k);
    }
    let x: f64 = tok.parse().map_err(|_| format!("bad coordinate `{tok}`"))?;
    if !(0.0..1.0).contains(&x) {
        return Err(format!("coordinate {tok} outside [0, 1)"));
    }
    let k = x * precision.scale();
    if k.fract() != 0.0 {
        return Err(format!("coordinate {tok} is not a multiple of 2^-{precision}"));
    }
    Ok(k as u64)
}
