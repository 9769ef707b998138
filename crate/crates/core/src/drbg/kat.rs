//! Known-answer vectors in the plain-text `seed_hex expected_hex` format.

use crate::drbg::{Generator, Mechanism, Seed};
use crate::error::{Error, Result};

/// Vectors shipped with the crate for the default mechanism.
pub const CTR_DRBG_256_VECTORS: &str = include_str!("../../fixtures/ctr_drbg_256.kat");

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnownAnswer {
    pub line: usize,
    pub seed: Vec<u8>,
    pub expected: Vec<u8>,
}

/// Parse a vector file. Blank lines and `#` comments are skipped.
pub fn parse(text: &str) -> Result<Vec<KnownAnswer>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(Error::Parse {
                line: i + 1,
                message: format!("expected `seed_hex expected_hex`, found {} fields", fields.len()),
            });
        }
        let decode = |s: &str| {
            hex::decode(s).map_err(|e| Error::Parse {
                line: i + 1,
                message: format!("bad hex: {e}"),
            })
        };
        out.push(KnownAnswer {
            line: i + 1,
            seed: decode(fields[0])?,
            expected: decode(fields[1])?,
        });
    }
    Ok(out)
}

/// Run one vector: instantiate with the seed and compare the stream prefix.
pub fn check(mechanism: Mechanism, v: &KnownAnswer) -> Result<bool> {
    let mut g = Generator::instantiate(mechanism, &Seed::from_bytes(v.seed.clone()))?;
    let bits = g.generate_bits(v.expected.len() as u64 * 8)?;
    Ok(bits.as_bytes() == v.expected.as_slice())
}

/// Check every embedded vector for the default mechanism; returns the
/// number of vectors that passed and the total.
pub fn check_embedded() -> Result<(usize, usize)> {
    let vectors = parse(CTR_DRBG_256_VECTORS)?;
    let mut passed = 0;
    for v in &vectors {
        if check(Mechanism::CtrDrbg256, v)? {
            passed += 1;
        }
    }
    Ok((passed, vectors.len()))
}
