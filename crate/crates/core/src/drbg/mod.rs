//! Seeded deterministic random bit generation.
//!
//! A [`Generator`] turns a [`Seed`] into an unbounded stream of bits. The
//! stream is served from fixed-size generate requests on the underlying
//! mechanism, so asking for `m` bits and then `m'` bits yields exactly the
//! same bits as asking for `m + m'` bits at once.

pub mod ctr;
pub mod kat;
mod stream;

use std::fmt;
use std::str::FromStr;

use sha2::{Digest, Sha256, Sha512};

use crate::error::{Error, Result};

pub use self::ctr::CtrDrbg;
pub use self::stream::BitStream;

/// Size of every generate request issued to the underlying mechanism.
pub const REQUEST_BYTES: usize = 256;

/// Supported bit-generation mechanisms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mechanism {
    /// CTR_DRBG, AES-256, no derivation function, no personalization
    /// string, no prediction resistance. The 384-bit seed is the entropy
    /// input.
    CtrDrbg256,
    /// Big-endian 64-bit counter starting at the first 8 seed bytes.
    /// Insecure; exists so experiments can show what a bad generator does.
    TestCounter,
}

impl Mechanism {
    pub const ALL: [Mechanism; 2] = [Mechanism::CtrDrbg256, Mechanism::TestCounter];

    pub fn id(self) -> &'static str {
        match self {
            Mechanism::CtrDrbg256 => "ctr-drbg-256",
            Mechanism::TestCounter => "test-counter",
        }
    }

    /// Declared security strength b in bits.
    pub fn security_bits(self) -> u32 {
        match self {
            Mechanism::CtrDrbg256 => 256,
            Mechanism::TestCounter => 0,
        }
    }

    /// Required seed length n in bits, if the mechanism fixes one.
    pub fn seed_bits(self) -> Option<usize> {
        match self {
            Mechanism::CtrDrbg256 => Some(ctr::SEED_LEN * 8),
            Mechanism::TestCounter => None,
        }
    }

    /// Seed length used when drawing a seed from OS entropy.
    pub fn default_seed_bits(self) -> usize {
        self.seed_bits().unwrap_or(128)
    }

    /// Short description of the fixed profile, echoed into run metadata.
    pub fn profile(self) -> &'static str {
        match self {
            Mechanism::CtrDrbg256 => "AES-256 CTR_DRBG; no df; no personalization; no prediction resistance; 256-byte requests",
            Mechanism::TestCounter => "INSECURE 64-bit big-endian counter",
        }
    }
}

impl fmt::Display for Mechanism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Mechanism {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Mechanism::ALL
            .into_iter()
            .find(|m| m.id() == s)
            .ok_or_else(|| Error::UnknownMechanism(s.to_string()))
    }
}

/// A binary word of length `n` used to instantiate a generator.
#[derive(Clone, PartialEq, Eq)]
pub struct Seed {
    bytes: Vec<u8>,
    bits: usize,
}

impl Seed {
    /// A seed made of whole bytes.
    pub fn from_bytes(bytes: Vec<u8>) -> Self {
        let bits = bytes.len() * 8;
        Seed { bytes, bits }
    }

    /// A seed of `bits` bits taken MSB-first from `bytes`; trailing bits of
    /// the last byte are cleared.
    pub fn from_bits(mut bytes: Vec<u8>, bits: usize) -> Result<Self> {
        if bits.div_ceil(8) != bytes.len() {
            return Err(Error::InvalidArgument(format!(
                "{bits} seed bits need {} bytes, got {}",
                bits.div_ceil(8),
                bytes.len()
            )));
        }
        if !bits.is_multiple_of(8) {
            let last = bytes.len() - 1;
            bytes[last] &= 0xffu8 << (8 - bits % 8);
        }
        Ok(Seed { bytes, bits })
    }

    pub fn from_hex(s: &str) -> Result<Self> {
        let s = s.trim();
        let s = s.strip_prefix("0x").unwrap_or(s);
        let bytes = hex::decode(s)
            .map_err(|e| Error::InvalidArgument(format!("seed is not valid hex: {e}")))?;
        if bytes.is_empty() {
            return Err(Error::InvalidArgument("seed is empty".into()));
        }
        Ok(Seed::from_bytes(bytes))
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn to_hex(&self) -> String {
        hex::encode(&self.bytes)
    }

    /// First 16 hex digits of SHA-256 over the seed bytes.
    pub fn digest(&self) -> String {
        let d = Sha256::digest(&self.bytes);
        hex::encode(&d[..8])
    }

    /// Child seed number `index` of `bits` bits (at most 512):
    /// `SHA-512(label || 0x00 || seed || index_be64)`, truncated. Used to fan
    /// one master seed out over many independent runs.
    pub fn derive(&self, label: &str, index: u64, bits: usize) -> Result<Seed> {
        if bits == 0 || bits > 512 {
            return Err(Error::InvalidArgument(format!(
                "derived seeds must be 1..=512 bits, got {bits}"
            )));
        }
        let mut h = Sha512::new();
        h.update(label.as_bytes());
        h.update([0u8]);
        h.update(&self.bytes);
        h.update(index.to_be_bytes());
        let mut out = h.finalize().to_vec();
        out.truncate(bits.div_ceil(8));
        Seed::from_bits(out, bits)
    }
}

impl fmt::Debug for Seed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Seed({} bits, digest {})", self.bits, self.digest())
    }
}

/// Draw `n` bits from the operating system's entropy facility.
pub fn seed_from_entropy(n: usize) -> Result<Seed> {
    if n < 128 || !n.is_multiple_of(8) {
        return Err(Error::InvalidArgument(format!(
            "entropy seed length must be a multiple of 8 and at least 128 bits, got {n}"
        )));
    }
    let mut bytes = vec![0u8; n / 8];
    getrandom::getrandom(&mut bytes).map_err(|e| Error::EntropyUnavailable(e.to_string()))?;
    Ok(Seed::from_bytes(bytes))
}

enum Engine {
    Ctr(Box<CtrDrbg>),
    Counter(u64),
}

/// A seeded bit generator. Single consumer; clone it to fork the stream.
pub struct Generator {
    mechanism: Mechanism,
    seed_bits: usize,
    seed_digest: String,
    engine: Engine,
    buf: Vec<u8>,
    /// Next unread bit inside `buf`.
    cursor: usize,
    emitted: u64,
}

impl Generator {
    pub fn instantiate(mechanism: Mechanism, seed: &Seed) -> Result<Self> {
        if let Some(required) = mechanism.seed_bits() {
            if seed.bits() != required {
                return Err(Error::SeedLength {
                    mechanism: mechanism.id(),
                    expected: required,
                    actual: seed.bits(),
                });
            }
        }
        let engine = match mechanism {
            Mechanism::CtrDrbg256 => Engine::Ctr(Box::new(CtrDrbg::new_no_df(seed.as_bytes(), &[])?)),
            Mechanism::TestCounter => {
                let mut start = [0u8; 8];
                for (dst, src) in start.iter_mut().zip(seed.as_bytes()) {
                    *dst = *src;
                }
                Engine::Counter(u64::from_be_bytes(start))
            }
        };
        Ok(Generator {
            mechanism,
            seed_bits: seed.bits(),
            seed_digest: seed.digest(),
            engine,
            buf: Vec::new(),
            cursor: 0,
            emitted: 0,
        })
    }

    pub fn mechanism(&self) -> Mechanism {
        self.mechanism
    }

    pub fn security_bits(&self) -> u32 {
        self.mechanism.security_bits()
    }

    pub fn seed_bits(&self) -> usize {
        self.seed_bits
    }

    pub fn seed_digest(&self) -> &str {
        &self.seed_digest
    }

    /// Number of bits handed out so far; the offset of the next bit.
    pub fn bits_emitted(&self) -> u64 {
        self.emitted
    }

    /// Produce exactly `m` bits and advance the stream.
    pub fn generate_bits(&mut self, m: u64) -> Result<BitStream> {
        if m == 0 {
            return Err(Error::InvalidArgument("requested bit count must be at least 1".into()));
        }
        let m_usize = usize::try_from(m)
            .map_err(|_| Error::InvalidArgument(format!("{m} bits does not fit in memory")))?;
        let mut out = BitStream::with_capacity(m_usize);
        let mut remaining = m_usize;
        while remaining > 0 {
            if self.cursor == self.buf.len() * 8 {
                self.refill()?;
            }
            if self.cursor.is_multiple_of(8) && out.len().is_multiple_of(8) && remaining >= 8 {
                let start = self.cursor / 8;
                let whole = (remaining / 8).min(self.buf.len() - start);
                out.extend_bytes(&self.buf[start..start + whole]);
                self.cursor += whole * 8;
                remaining -= whole * 8;
            } else {
                let byte = self.buf[self.cursor / 8];
                out.push((byte >> (7 - self.cursor % 8)) & 1 == 1);
                self.cursor += 1;
                remaining -= 1;
            }
        }
        self.emitted += m;
        Ok(out)
    }

    fn refill(&mut self) -> Result<()> {
        let mut chunk = vec![0u8; REQUEST_BYTES];
        match &mut self.engine {
            Engine::Ctr(drbg) => drbg.generate(&mut chunk, &[])?,
            Engine::Counter(c) => {
                for block in chunk.chunks_mut(8) {
                    block.copy_from_slice(&c.to_be_bytes());
                    *c = c.wrapping_add(1);
                }
            }
        }
        self.buf = chunk;
        self.cursor = 0;
        Ok(())
    }
}

impl fmt::Debug for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Generator")
            .field("mechanism", &self.mechanism)
            .field("seed_bits", &self.seed_bits)
            .field("seed_digest", &self.seed_digest)
            .field("emitted", &self.emitted)
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seed384(fill: u8) -> Seed {
        Seed::from_bytes(vec![fill; 48])
    }

    #[test]
    fn entropy_seed_has_requested_length() {
        let s = seed_from_entropy(384).unwrap();
        assert_eq!(s.bits(), 384);
        assert_eq!(s.as_bytes().len(), 48);
    }

    #[test]
    fn entropy_seed_rejects_bad_lengths() {
        assert!(seed_from_entropy(100).is_err());
        assert!(seed_from_entropy(120).is_err());
    }

    #[test]
    fn successive_entropy_seeds_differ() {
        let a = seed_from_entropy(384).unwrap();
        let b = seed_from_entropy(384).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn ctr_mechanism_reports_256_bits() {
        let g = Generator::instantiate(Mechanism::CtrDrbg256, &seed384(1)).unwrap();
        assert_eq!(g.security_bits(), 256);
        assert_eq!(g.seed_bits(), 384);
    }

    #[test]
    fn ctr_mechanism_rejects_short_seed() {
        let seed = Seed::from_bits(vec![0xab; 13], 100).unwrap();
        let err = Generator::instantiate(Mechanism::CtrDrbg256, &seed).unwrap_err();
        assert!(matches!(err, Error::SeedLength { expected: 384, actual: 100, .. }));
    }

    #[test]
    fn test_counter_accepts_any_seed() {
        for bits in [8usize, 100, 384] {
            let seed = Seed::from_bits(vec![0x5a; bits.div_ceil(8)], bits).unwrap();
            let g = Generator::instantiate(Mechanism::TestCounter, &seed).unwrap();
            assert_eq!(g.security_bits(), 0);
        }
    }

    #[test]
    fn test_counter_output_is_a_counter() {
        let mut seed = vec![0u8; 8];
        seed[7] = 41;
        let mut g = Generator::instantiate(Mechanism::TestCounter, &Seed::from_bytes(seed)).unwrap();
        let bits = g.generate_bits(128).unwrap();
        assert_eq!(&bits.as_bytes()[..8], &41u64.to_be_bytes());
        assert_eq!(&bits.as_bytes()[8..], &42u64.to_be_bytes());
    }

    #[test]
    fn derived_seeds_are_stable_and_distinct() {
        let master = Seed::from_hex("00112233445566778899aabbccddeeff").unwrap();
        let a = master.derive("sweep", 0, 384).unwrap();
        assert_eq!(a.bits(), 384);
        assert_eq!(a, master.derive("sweep", 0, 384).unwrap());
        assert_ne!(a, master.derive("sweep", 1, 384).unwrap());
        assert_ne!(a, master.derive("other", 0, 384).unwrap());
        assert!(master.derive("sweep", 0, 513).is_err());
    }

    #[test]
    fn unknown_mechanism() {
        assert!(matches!(
            "hash-drbg".parse::<Mechanism>(),
            Err(Error::UnknownMechanism(_))
        ));
        assert_eq!("ctr-drbg-256".parse::<Mechanism>().unwrap(), Mechanism::CtrDrbg256);
    }

    #[test]
    fn same_seed_same_megabit() {
        let mut a = Generator::instantiate(Mechanism::CtrDrbg256, &seed384(3)).unwrap();
        let mut b = Generator::instantiate(Mechanism::CtrDrbg256, &seed384(3)).unwrap();
        assert_eq!(a.generate_bits(1_000_000).unwrap(), b.generate_bits(1_000_000).unwrap());
    }

    #[test]
    fn different_seeds_differ() {
        let mut a = Generator::instantiate(Mechanism::CtrDrbg256, &seed384(3)).unwrap();
        let mut b = Generator::instantiate(Mechanism::CtrDrbg256, &seed384(4)).unwrap();
        assert_ne!(a.generate_bits(256).unwrap(), b.generate_bits(256).unwrap());
    }

    #[test]
    fn point_sized_request() {
        let mut g = Generator::instantiate(Mechanism::CtrDrbg256, &seed384(9)).unwrap();
        assert_eq!(g.generate_bits(52 * 2).unwrap().len(), 104);
        assert_eq!(g.bits_emitted(), 104);
    }

    #[test]
    fn zero_bit_request_is_rejected() {
        let mut g = Generator::instantiate(Mechanism::CtrDrbg256, &seed384(9)).unwrap();
        assert!(g.generate_bits(0).is_err());
    }

    #[test]
    fn monobit_smoke() {
        let mut g = Generator::instantiate(Mechanism::CtrDrbg256, &seed384(0x42)).unwrap();
        let bits = g.generate_bits(1_000_000).unwrap();
        let frac = bits.count_ones() as f64 / 1e6;
        assert!((0.49..=0.51).contains(&frac), "fraction of ones {frac}");
    }

    #[test]
    fn reseed_limit_surfaces_through_generator() {
        let mut g = Generator::instantiate(Mechanism::CtrDrbg256, &seed384(1)).unwrap();
        if let Engine::Ctr(drbg) = &mut g.engine {
            drbg.set_reseed_interval(1);
        }
        let ok = g.generate_bits((REQUEST_BYTES * 8) as u64).unwrap();
        assert_eq!(ok.len(), REQUEST_BYTES * 8);
        assert!(matches!(g.generate_bits(1), Err(Error::ReseedRequired { .. })));
    }

    #[test]
    fn seed_hex_round_trip() {
        let s = Seed::from_hex("000102ff").unwrap();
        assert_eq!(s.bits(), 32);
        assert_eq!(s.to_hex(), "000102ff");
        assert!(Seed::from_hex("xyz").is_err());
        assert!(Seed::from_hex("").is_err());
    }
}
