//! Fixed-length bit vectors and short bit strings.
//!
//! Two representations are used in the crate:
//!
//! * [`BitVector`] — an arbitrary-length, word-packed vector used for the
//!   vectors of OV/XOR instances and for oracle inputs. Bit `0` is the first
//!   bit of the textual form (most significant when the vector is read as a
//!   number).
//! * short `b`-bit strings stored as `u32` values (`b <= 24`), used for the
//!   elements of factored-vector sets. [`parse_bits`]/[`format_bits`] convert
//!   to and from `0/1` text, and [`signed_value`] gives the two's-complement
//!   reading used by SUM-flavoured predicates.

use crate::error::{Error, Result};

/// Ceiling of the base-2 logarithm, with `ceil_log2(0) == ceil_log2(1) == 0`.
pub fn ceil_log2(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (n - 1).ilog2() as usize + 1
    }
}

/// Sample a uniformly random bit vector of the given length.
pub fn random_bitvector(len: usize, rng: &mut impl rand::Rng) -> BitVector {
    let mut v = BitVector::zeros(len);
    for i in 0..len {
        if rng.gen::<bool>() {
            v.set(i, true);
        }
    }
    v
}

/// Maximum width of a short bit string stored as `u32`.
///
/// Keeps `2^b` enumerations (used by gadget constructions and brute-force
/// counters) comfortably in range.
pub const MAX_SHORT_BITS: usize = 24;

/// Parse a `0/1` string of exactly `b` characters into its `u32` value.
///
/// The first character is the most significant bit: `parse_bits("01", 2) == 1`.
pub fn parse_bits(s: &str, b: usize) -> Result<u32> {
    if b == 0 || b > MAX_SHORT_BITS {
        return Err(Error::argument(format!(
            "bit-string width must be in 1..={MAX_SHORT_BITS}, got {b}"
        )));
    }
    if s.len() != b {
        return Err(Error::structural(format!(
            "bit string {s:?} has length {}, expected {b}",
            s.len()
        )));
    }
    let mut v = 0u32;
    for c in s.chars() {
        v <<= 1;
        match c {
            '0' => {}
            '1' => v |= 1,
            _ => {
                return Err(Error::structural(format!(
                    "bit string {s:?} contains a character other than 0/1"
                )))
            }
        }
    }
    Ok(v)
}

/// Format a `b`-bit value as a `0/1` string, most significant bit first.
pub fn format_bits(v: u32, b: usize) -> String {
    debug_assert!((1..=MAX_SHORT_BITS).contains(&b));
    debug_assert!(b == 32 || v < (1u32 << b));
    (0..b).rev().map(|i| if (v >> i) & 1 == 1 { '1' } else { '0' }).collect()
}

/// Two's-complement value of a `b`-bit string, in `[-2^(b-1), 2^(b-1) - 1]`.
pub fn signed_value(v: u32, b: usize) -> i64 {
    debug_assert!((1..=MAX_SHORT_BITS).contains(&b));
    let sign = 1u32 << (b - 1);
    if v & sign != 0 {
        v as i64 - (1i64 << b)
    } else {
        v as i64
    }
}

/// Encode a signed value into its `b`-bit two's-complement string.
///
/// Fails with an argument error if the value is outside
/// `[-2^(b-1), 2^(b-1) - 1]`.
pub fn encode_signed(value: i64, b: usize) -> Result<u32> {
    if b == 0 || b > MAX_SHORT_BITS {
        return Err(Error::argument(format!(
            "bit-string width must be in 1..={MAX_SHORT_BITS}, got {b}"
        )));
    }
    let lo = -(1i64 << (b - 1));
    let hi = (1i64 << (b - 1)) - 1;
    if value < lo || value > hi {
        return Err(Error::argument(format!(
            "value {value} does not fit in {b}-bit two's complement [{lo}, {hi}]"
        )));
    }
    Ok((value & ((1i64 << b) - 1)) as u32)
}

/// A fixed-length bit vector, packed into 64-bit words.
///
/// Bits are indexed `0..len`, with index 0 the first character of the
/// textual `0/1` form. Equality, hashing, and ordering are value-based.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    /// All-zeros vector of the given length.
    pub fn zeros(len: usize) -> Self {
        BitVector {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    /// All-ones vector of the given length.
    pub fn ones(len: usize) -> Self {
        let mut v = BitVector {
            len,
            words: vec![!0u64; len.div_ceil(64)],
        };
        v.mask_tail();
        v
    }

    /// Build from a slice of booleans.
    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = BitVector::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Parse a `0/1` string of any length.
    pub fn from_str01(s: &str) -> Result<Self> {
        let mut v = BitVector::zeros(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => v.set(i, true),
                _ => {
                    return Err(Error::structural(format!(
                        "bit vector {s:?} contains a character other than 0/1"
                    )))
                }
            }
        }
        Ok(v)
    }

    /// Embed the low `b` bits of a short string value at offset 0.
    pub fn from_short(value: u32, b: usize) -> Self {
        let mut v = BitVector::zeros(b);
        v.write_short(0, value, b);
        v
    }

    /// Number of bits.
    pub fn len(&self) -> usize {
        self.len
    }

    /// True when the vector has zero length.
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Read bit `i`.
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    /// Write bit `i`.
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let word = &mut self.words[i / 64];
        let mask = 1u64 << (i % 64);
        if value {
            *word |= mask;
        } else {
            *word &= !mask;
        }
    }

    /// Write a `b`-bit short string (most significant bit first) at `offset`.
    pub fn write_short(&mut self, offset: usize, value: u32, b: usize) {
        debug_assert!(b <= MAX_SHORT_BITS);
        for i in 0..b {
            let bit = (value >> (b - 1 - i)) & 1 == 1;
            self.set(offset + i, bit);
        }
    }

    /// Read a `b`-bit short string starting at `offset`.
    pub fn read_short(&self, offset: usize, b: usize) -> u32 {
        debug_assert!(b <= MAX_SHORT_BITS);
        let mut v = 0u32;
        for i in 0..b {
            v = (v << 1) | u32::from(self.get(offset + i));
        }
        v
    }

    /// True when every bit is zero.
    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// The whole vector packed into one word, when `len <= 64`.
    pub fn as_u64(&self) -> Option<u64> {
        if self.len <= 64 {
            Some(self.words.first().copied().unwrap_or(0))
        } else {
            None
        }
    }

    /// Number of set bits.
    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Bitwise XOR (lengths must match).
    pub fn xor(&self, other: &BitVector) -> BitVector {
        assert_eq!(self.len, other.len, "length mismatch in xor");
        BitVector {
            len: self.len,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a ^ b).collect(),
        }
    }

    /// In-place bitwise XOR (lengths must match).
    pub fn xor_assign(&mut self, other: &BitVector) {
        assert_eq!(self.len, other.len, "length mismatch in xor");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// Bitwise AND (lengths must match).
    pub fn and(&self, other: &BitVector) -> BitVector {
        assert_eq!(self.len, other.len, "length mismatch in and");
        BitVector {
            len: self.len,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
        }
    }

    /// In-place bitwise AND (lengths must match).
    pub fn and_assign(&mut self, other: &BitVector) {
        assert_eq!(self.len, other.len, "length mismatch in and");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    /// Bitwise complement within the vector's length.
    pub fn complement(&self) -> BitVector {
        let mut v = BitVector {
            len: self.len,
            words: self.words.iter().map(|w| !w).collect(),
        };
        v.mask_tail();
        v
    }

    /// Parity of the AND of two vectors (`<self, other>` over GF(2)).
    pub fn dot_parity(&self, other: &BitVector) -> bool {
        assert_eq!(self.len, other.len, "length mismatch in dot_parity");
        self.words
            .iter()
            .zip(&other.words)
            .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones())
            & 1
            == 1
    }

    /// Concatenate vectors in order.
    pub fn concat(parts: &[&BitVector]) -> BitVector {
        let len = parts.iter().map(|p| p.len).sum();
        let mut v = BitVector::zeros(len);
        let mut at = 0;
        for p in parts {
            for i in 0..p.len {
                if p.get(i) {
                    v.set(at + i, true);
                }
            }
            at += p.len;
        }
        v
    }

    /// The `0/1` textual form.
    pub fn to_string01(&self) -> String {
        (0..self.len).map(|i| if self.get(i) { '1' } else { '0' }).collect()
    }

    /// Iterator over bits as booleans.
    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    fn mask_tail(&mut self) {
        let used = self.len % 64;
        if used != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << used) - 1;
            }
        }
    }
}

impl std::fmt::Debug for BitVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "BitVector({})", self.to_string01())
    }
}
