//! Point sets on the dyadic grid `{k / 2^p : 0 <= k < 2^p}^d`.
//!
//! Coordinates are stored as integer numerators, so every value is exact
//! and converts to `f64` without rounding for `p <= 52`.

mod io;

use std::fmt;

use crate::drbg::{BitStream, Generator};
use crate::error::{Error, Result};

pub use self::io::{load_points, parse_points, save_points, write_points, WriteOptions};

/// Bits of coordinate precision, `1 <= p <= 52`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Precision(u32);

impl Precision {
    pub const MAX: u32 = 52;
    /// The binary64 significand width.
    pub const DEFAULT: Precision = Precision(52);

    pub fn new(p: u32) -> Result<Self> {
        if (1..=Self::MAX).contains(&p) {
            Ok(Precision(p))
        } else {
            Err(Error::InvalidArgument(format!("precision must be in 1..=52, got {p}")))
        }
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    /// `2^p` as a float (exact).
    pub fn scale(self) -> f64 {
        (1u64 << self.0) as f64
    }

    /// Exclusive upper bound on numerators.
    pub fn modulus(self) -> u64 {
        1u64 << self.0
    }
}

impl Default for Precision {
    fn default() -> Self {
        Precision::DEFAULT
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Where a point set came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub mechanism: String,
    pub seed_bits: usize,
    pub security_bits: u32,
    pub seed_digest: String,
    /// Offset, in bits, of the first consumed bit within the generator stream.
    pub stream_offset: u64,
}

/// `N` points in `[0,1)^d` with `p`-bit dyadic coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointSet {
    dim: usize,
    precision: Precision,
    /// Row-major numerators; coordinate `j` of point `i` is `num[i*d+j] / 2^p`.
    num: Vec<u64>,
    provenance: Option<Provenance>,
}

impl PointSet {
    pub fn from_numerators(dim: usize, precision: Precision, num: Vec<u64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be at least 1".into()));
        }
        if !num.len().is_multiple_of(dim) {
            return Err(Error::InvalidArgument(format!(
                "{} coordinates do not split into rows of {dim}",
                num.len()
            )));
        }
        if let Some(&k) = num.iter().find(|&&k| k >= precision.modulus()) {
            return Err(Error::Domain {
                value: k as f64 / precision.scale(),
            });
        }
        Ok(PointSet {
            dim,
            precision,
            num,
            provenance: None,
        })
    }

    /// Build from real values that must already be exact `p`-bit dyadics.
    pub fn from_dyadic_values(dim: usize, precision: Precision, values: &[f64]) -> Result<Self> {
        let scale = precision.scale();
        let num = values
            .iter()
            .map(|&x| {
                check_unit(x)?;
                let k = x * scale;
                if k.fract() != 0.0 {
                    return Err(Error::InvalidArgument(format!(
                        "{x} is not a multiple of 2^-{precision}"
                    )));
                }
                Ok(k as u64)
            })
            .collect::<Result<Vec<_>>>()?;
        PointSet::from_numerators(dim, precision, num)
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = Some(provenance);
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.num.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.num.is_empty()
    }

    pub fn precision(&self) -> Precision {
        self.precision
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_ref()
    }

    pub fn numerators(&self) -> &[u64] {
        &self.num
    }

    pub fn numerator(&self, i: usize, j: usize) -> u64 {
        self.num[i * self.dim + j]
    }

    pub fn coord(&self, i: usize, j: usize) -> f64 {
        self.numerator(i, j) as f64 / self.precision.scale()
    }

    pub fn point(&self, i: usize) -> Vec<f64> {
        (0..self.dim).map(|j| self.coord(i, j)).collect()
    }

    /// All coordinates as a row-major `f64` buffer.
    pub fn to_f64(&self) -> Vec<f64> {
        let scale = self.precision.scale();
        self.num.iter().map(|&k| k as f64 / scale).collect()
    }

    /// The first `n` points, keeping provenance.
    pub fn prefix(&self, n: usize) -> PointSet {
        assert!(n <= self.len(), "prefix longer than the point set");
        PointSet {
            dim: self.dim,
            precision: self.precision,
            num: self.num[..n * self.dim].to_vec(),
            provenance: self.provenance.clone(),
        }
    }

    /// Reorder points by `perm` (point `i` of the result is point `perm[i]`).
    pub fn permute_points(&self, perm: &[usize]) -> PointSet {
        assert_eq!(perm.len(), self.len());
        let mut num = Vec::with_capacity(self.num.len());
        for &i in perm {
            num.extend_from_slice(&self.num[i * self.dim..(i + 1) * self.dim]);
        }
        PointSet { num, ..self.clone() }
    }

    /// Reorder coordinate axes by `perm` in every point.
    pub fn permute_axes(&self, perm: &[usize]) -> PointSet {
        assert_eq!(perm.len(), self.dim);
        let mut num = Vec::with_capacity(self.num.len());
        for row in self.num.chunks(self.dim) {
            num.extend(perm.iter().map(|&j| row[j]));
        }
        PointSet { num, ..self.clone() }
    }
}

fn check_unit(x: f64) -> Result<()> {
    if (0.0..1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::Domain { value: x })
    }
}

/// Number of bits `p * d * n` needed for `n` points.
pub fn bits_required(dim: usize, n: usize, precision: Precision) -> u64 {
    precision.bits() as u64 * dim as u64 * n as u64
}

/// Read `n` points from the front of `stream`: point-major, then
/// coordinate-major, each coordinate `p` bits MSB first, so the bits
/// `d_1 … d_p` give `sum d_i / 2^i`.
pub fn bits_to_points(stream: &BitStream, dim: usize, n: usize, precision: Precision) -> Result<PointSet> {
    if dim == 0 {
        return Err(Error::InvalidArgument("dimension must be at least 1".into()));
    }
    let required = bits_required(dim, n, precision);
    if (stream.len() as u64) < required {
        return Err(Error::StreamTooShort {
            required,
            available: stream.len() as u64,
        });
    }
    let p = precision.bits();
    let num = (0..dim * n)
        .map(|c| stream.read_bits(c * p as usize, p))
        .collect();
    PointSet::from_numerators(dim, precision, num)
}

/// Draw `n` points straight from a generator and tag them with provenance.
pub fn generate_points(gen: &mut Generator, dim: usize, n: usize, precision: Precision) -> Result<PointSet> {
    let offset = gen.bits_emitted();
    let provenance = Provenance {
        mechanism: gen.mechanism().id().to_string(),
        seed_bits: gen.seed_bits(),
        security_bits: gen.security_bits(),
        seed_digest: gen.seed_digest().to_string(),
        stream_offset: offset,
    };
    let required = bits_required(dim, n, precision);
    if required == 0 {
        return Ok(PointSet::from_numerators(dim, precision, Vec::new())?.with_provenance(provenance));
    }
    let stream = gen.generate_bits(required)?;
    Ok(bits_to_points(&stream, dim, n, precision)?.with_provenance(provenance))
}

/// Apply `x -> floor(2^p x) / 2^p` to every coordinate. Rounding to a finer
/// grid than the input's is the identity on values.
pub fn round_to_precision(ps: &PointSet, precision: Precision) -> PointSet {
    let from = ps.precision.bits();
    let to = precision.bits();
    let num = if to <= from {
        ps.num.iter().map(|&k| k >> (from - to)).collect()
    } else {
        ps.num.iter().map(|&k| k << (to - from)).collect()
    };
    PointSet {
        dim: ps.dim,
        precision,
        num,
        provenance: ps.provenance.clone(),
    }
}

/// Round arbitrary real coordinates in `[0,1)` down to the `p`-bit grid.
pub fn round_values(dim: usize, values: &[f64], precision: Precision) -> Result<PointSet> {
    let scale = precision.scale();
    let num = values
        .iter()
        .map(|&x| {
            check_unit(x)?;
            // Scaling by a power of two is exact, so floor sees the true value.
            Ok((x * scale).floor() as u64)
        })
        .collect::<Result<Vec<_>>>()?;
    PointSet::from_numerators(dim, precision, num)
}
