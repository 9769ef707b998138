use std::fmt;

/// Finite, ordered bit sequence. Bit `i` is bit `7 - i % 8` of byte `i / 8`
/// (most significant bit first).
#[derive(Clone, PartialEq, Eq, Default)]
pub struct BitStream {
    bytes: Vec<u8>,
    len: usize,
}

impl BitStream {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bits: usize) -> Self {
        BitStream {
            bytes: Vec::with_capacity(bits.div_ceil(8)),
            len: 0,
        }
    }

    /// Take the first `len` bits of `bytes`.
    pub fn from_bytes(mut bytes: Vec<u8>, len: usize) -> Self {
        assert!(len <= bytes.len() * 8, "bit length exceeds the byte buffer");
        bytes.truncate(len.div_ceil(8));
        if !len.is_multiple_of(8) {
            let last = bytes.len() - 1;
            bytes[last] &= 0xffu8 << (8 - len % 8);
        }
        BitStream { bytes, len }
    }

    /// Parse a string of `0`/`1` characters; whitespace is ignored.
    pub fn from_bit_str(s: &str) -> Option<Self> {
        let mut out = BitStream::new();
        for c in s.chars().filter(|c| !c.is_whitespace()) {
            match c {
                '0' => out.push(false),
                '1' => out.push(true),
                _ => return None,
            }
        }
        Some(out)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bit(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        (self.bytes[i / 8] >> (7 - i % 8)) & 1 == 1
    }

    /// Read `width` (at most 64) bits starting at `start`, MSB first.
    pub fn read_bits(&self, start: usize, width: u32) -> u64 {
        assert!(width <= 64);
        assert!(start + width as usize <= self.len);
        let mut v = 0u64;
        let mut i = start;
        let end = start + width as usize;
        while i < end {
            if i.is_multiple_of(8) && end - i >= 8 {
                v = (v << 8) | u64::from(self.bytes[i / 8]);
                i += 8;
            } else {
                v = (v << 1) | u64::from((self.bytes[i / 8] >> (7 - i % 8)) & 1);
                i += 1;
            }
        }
        v
    }

    /// Underlying bytes; unused trailing bits of the last byte are zero.
    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn count_ones(&self) -> u64 {
        self.bytes.iter().map(|b| u64::from(b.count_ones())).sum()
    }

    pub fn push(&mut self, bit: bool) {
        if self.len.is_multiple_of(8) {
            self.bytes.push(0);
        }
        if bit {
            let last = self.bytes.len() - 1;
            self.bytes[last] |= 0x80 >> (self.len % 8);
        }
        self.len += 1;
    }

    pub(crate) fn extend_bytes(&mut self, bytes: &[u8]) {
        debug_assert_eq!(self.len % 8, 0);
        self.bytes.extend_from_slice(bytes);
        self.len += bytes.len() * 8;
    }

    /// Append another stream.
    pub fn extend(&mut self, other: &BitStream) {
        if self.len.is_multiple_of(8) {
            self.bytes.extend_from_slice(&other.bytes);
            self.len += other.len;
        } else {
            for i in 0..other.len {
                self.push(other.bit(i));
            }
        }
    }
}

impl fmt::Debug for BitStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len <= 64 {
            let s: String = (0..self.len).map(|i| if self.bit(i) { '1' } else { '0' }).collect();
            write!(f, "BitStream({s})")
        } else {
            write!(f, "BitStream({} bits)", self.len)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn push_and_read() {
        let s = BitStream::from_bit_str("101 110").unwrap();
        assert_eq!(s.len(), 6);
        assert_eq!(s.read_bits(0, 3), 0b101);
        assert_eq!(s.read_bits(3, 3), 0b110);
        assert_eq!(s.as_bytes(), &[0b1011_1000]);
    }

    #[test]
    fn from_bytes_masks_tail() {
        let s = BitStream::from_bytes(vec![0xff, 0xff], 12);
        assert_eq!(s.as_bytes(), &[0xff, 0xf0]);
        assert_eq!(s.count_ones(), 12);
    }

    #[test]
    fn extend_unaligned() {
        let mut a = BitStream::from_bit_str("1").unwrap();
        a.extend(&BitStream::from_bit_str("0110").unwrap());
        assert_eq!(a, BitStream::from_bit_str("10110").unwrap());
    }

    #[test]
    fn wide_reads_cross_bytes() {
        let s = BitStream::from_bytes(vec![0x12, 0x34, 0x56, 0x78, 0x9a, 0xbc, 0xde, 0xf0, 0x11], 72);
        assert_eq!(s.read_bits(4, 64), 0x2345_6789_abcd_ef01);
        assert_eq!(s.read_bits(0, 52), 0x1_2345_6789_abcd);
    }
}
