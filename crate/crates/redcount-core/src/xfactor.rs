//! Reductions between factored problems: a generic predicate becomes
//! factored XOR, OV, or SUM by guess-and-verify string gadgets, and factored
//! OV/XOR become factored (k+1)-SUM by digit padding.
//!
//! All five reductions preserve the exact count, position by position: at
//! every set position the satisfying string tuples of the output are in
//! bijection with those of the input. The generic reductions keep `k` and
//! `g` and widen strings; list 1 carries the full guessed tuple, list 2
//! additionally guesses list 1's string, and later lists embed their string
//! at a fixed offset, so the target predicate (XOR / AND / integer sum)
//! checks that every guess equals the string actually chosen.
//!
//! Output string widths: XOR uses `k*b` bits and OV `2*k*b` bits, as the
//! gadgets require. SUM uses `k*b + 1`: the verifier list stores the
//! *negated* guessed combination, and one headroom bit is what makes every
//! negated combination representable in two's complement (the `k*b`-bit
//! range is asymmetric, so a width-preserving variant cannot exist — at
//! `k = 2` it would need an injective value map on `2^{2b}` points whose
//! negation stays in range, which two's complement forbids). Similarly, the
//! padded reductions space digits `ceil(lg(k+1))` bits apart — one more than
//! the naive `ceil(lg k)` — because per-digit sums reach `k` and would
//! otherwise carry into the neighboring digit, creating false positives.

use crate::bits::{encode_signed, signed_value, MAX_SHORT_BITS};
use crate::error::{Error, Result};
use crate::factored::{FactoredInstance, FactoredVector, Predicate};

/// Work guard: the generic reductions enumerate all `2^{k*b}` tuples.
const MAX_TUPLE_ENUM_BITS: usize = MAX_SHORT_BITS;

/// The satisfying k-tuples of `b`-bit strings, indexed by first coordinate.
///
/// `tuples_with_first(u)` returns every satisfying tuple whose first string
/// is `u` — the guess set the verifier list enumerates. At most `2^{(k-1)b}`
/// tuples share a first coordinate.
#[derive(Clone, Debug)]
pub struct SatTupleIndex {
    k: usize,
    b: usize,
    by_first: Vec<Vec<Vec<u32>>>,
}

impl SatTupleIndex {
    /// Enumerate all `2^{k*b}` tuples once and bucket the satisfying ones.
    pub fn build(predicate: &Predicate, k: usize, b: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::argument(format!("tuple index needs k >= 2, got {k}")));
        }
        let width = k
            .checked_mul(b)
            .filter(|&w| w > 0 && w <= MAX_TUPLE_ENUM_BITS)
            .ok_or_else(|| {
                Error::capacity(
                    "satisfying-tuple enumeration",
                    1u128 << (k.saturating_mul(b)).min(127),
                    1u128 << MAX_TUPLE_ENUM_BITS,
                )
            })?;
        let mut by_first = vec![Vec::new(); 1 << b];
        let mut words = vec![0u32; k];
        for idx in 0..1u32 << width {
            for (i, w) in words.iter_mut().enumerate() {
                *w = (idx >> ((k - 1 - i) * b)) & ((1 << b) - 1);
            }
            if predicate.satisfies(&words, b)? {
                by_first[words[0] as usize].push(words.clone());
            }
        }
        Ok(SatTupleIndex { k, b, by_first })
    }

    /// Tuple arity.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Bits per string.
    pub fn b(&self) -> usize {
        self.b
    }

    /// All satisfying tuples with first coordinate `u`.
    pub fn tuples_with_first(&self, u: u32) -> &[Vec<u32>] {
        &self.by_first[u as usize]
    }

    /// Total number of satisfying tuples.
    pub fn total(&self) -> usize {
        self.by_first.iter().map(Vec::len).sum()
    }
}

fn transformed_lists(
    inst: &FactoredInstance,
    out_b: usize,
    mut gamma: impl FnMut(usize, u32) -> Vec<u32>,
) -> Result<Vec<Vec<FactoredVector>>> {
    inst.lists
        .iter()
        .enumerate()
        .map(|(i, list)| {
            list.iter()
                .map(|v| {
                    let sets = v
                        .sets()
                        .iter()
                        .map(|set| set.iter().flat_map(|&u| gamma(i, u)).collect())
                        .collect();
                    FactoredVector::new(out_b, sets)
                })
                .collect()
        })
        .collect()
}

/// Reduce any factored predicate to factored XOR with strings of `k*b` bits.
///
/// List 1 emits each satisfying tuple concatenated; list 2 emits its string
/// in block 2 together with every guess for block 1; list `i >= 3` emits its
/// string alone in block `i`. The XOR of a tuple of gadget strings vanishes
/// exactly when all guesses match the chosen strings and the guessed tuple
/// satisfies the original predicate, so counts are preserved exactly.
pub fn generic_to_xor(inst: &FactoredInstance) -> Result<FactoredInstance> {
    inst.validate()?;
    let k = inst.k();
    let b = inst.b;
    let index = SatTupleIndex::build(&inst.predicate, k, b)?;
    let out_b = k * b;
    let lists = transformed_lists(inst, out_b, |i, u| match i {
        0 => index
            .tuples_with_first(u)
            .iter()
            .map(|tuple| {
                tuple
                    .iter()
                    .fold(0u32, |acc, &w| (acc << b) | w)
            })
            .collect(),
        1 => (0..1u32 << b)
            .map(|s1| (s1 << ((k - 1) * b)) | (u << ((k - 2) * b)))
            .collect(),
        _ => vec![u << ((k - 1 - i) * b)],
    })?;
    FactoredInstance::new(lists, out_b, inst.g, Predicate::Xor)
}

/// Reduce any factored predicate to factored OV with strings of `2*k*b`
/// bits.
///
/// Equality is enforced by complement pairs: a string `s` appears as
/// `s . complement(s)` on one side and `complement(t) . t` on the other, and
/// the AND of the two blocks vanishes exactly when `s == t`. Unused blocks
/// are all-ones so they constrain nothing.
pub fn generic_to_ov(inst: &FactoredInstance) -> Result<FactoredInstance> {
    inst.validate()?;
    let k = inst.k();
    let b = inst.b;
    let index = SatTupleIndex::build(&inst.predicate, k, b)?;
    let out_b = 2 * k * b;
    if out_b > MAX_SHORT_BITS {
        return Err(Error::capacity(
            "OV gadget strings",
            1u128 << out_b.min(127),
            1u128 << MAX_SHORT_BITS,
        ));
    }
    let mask = (1u32 << b) - 1;
    // Block i (from the most significant end) spans bits for coordinate i.
    let block = |value2b: u32, i: usize| value2b << ((k - 1 - i) * 2 * b);
    let pair = |s: u32| (s << b) | (!s & mask); // s . complement(s)
    let antipair = |s: u32| ((!s & mask) << b) | s; // complement(s) . s
    let ones_except = |used: &[usize]| {
        let mut v = (1u32 << out_b) - 1;
        for &i in used {
            v &= !(((1u32 << (2 * b)) - 1) << ((k - 1 - i) * 2 * b));
        }
        v
    };
    let lists = transformed_lists(inst, out_b, |i, u| match i {
        0 => index
            .tuples_with_first(u)
            .iter()
            .map(|tuple| {
                tuple
                    .iter()
                    .enumerate()
                    .fold(0u32, |acc, (j, &w)| acc | block(pair(w), j))
            })
            .collect(),
        1 => (0..1u32 << b)
            .map(|s1| block(antipair(s1), 0) | block(antipair(u), 1) | ones_except(&[0, 1]))
            .collect(),
        _ => vec![block(antipair(u), i) | ones_except(&[i])],
    })?;
    FactoredInstance::new(lists, out_b, inst.g, Predicate::Ov)
}

/// Reduce any factored predicate to factored SUM with strings of `k*b + 1`
/// bits (two's complement).
///
/// List 1 emits the *negation* of each satisfying tuple's digit combination
/// `nu(s_1) + 2^b nu(s_2) + ... + 2^{b(k-1)} nu(s_k)`; list 2 emits
/// `nu(s_1) + 2^b nu(u)` over all guesses `s_1`; list `i >= 3` emits
/// `2^{b(i-1)} nu(u)`. A tuple sums to zero exactly when the digit
/// differences vanish level by level (each difference has magnitude below
/// `2^b`, so no borrowing can hide a mismatch), i.e. when every guess equals
/// the chosen string and the tuple satisfies the original predicate.
pub fn generic_to_sum(inst: &FactoredInstance) -> Result<FactoredInstance> {
    inst.validate()?;
    let k = inst.k();
    let b = inst.b;
    let index = SatTupleIndex::build(&inst.predicate, k, b)?;
    let out_b = k * b + 1;
    if out_b > MAX_SHORT_BITS {
        return Err(Error::capacity(
            "SUM gadget strings",
            1u128 << out_b.min(127),
            1u128 << MAX_SHORT_BITS,
        ));
    }
    let combine = |tuple: &[u32]| -> i64 {
        tuple
            .iter()
            .enumerate()
            .map(|(i, &w)| signed_value(w, b) << (b * i))
            .sum()
    };
    let enc = |v: i64| encode_signed(v, out_b).expect("gadget value fits the headroom width");
    let lists = transformed_lists(inst, out_b, |i, u| match i {
        0 => index
            .tuples_with_first(u)
            .iter()
            .map(|tuple| enc(-combine(tuple)))
            .collect(),
        1 => (0..1u32 << b)
            .map(|s1| enc(signed_value(s1, b) + (signed_value(u, b) << b)))
            .collect(),
        _ => vec![enc(signed_value(u, b) << (b * i))],
    })?;
    FactoredInstance::new(lists, out_b, inst.g, Predicate::Sum)
}

/// Digit spacing for the padded reductions: per-digit sums reach `k`, so
/// digits sit `floor(lg k) + 1` bits apart to leave room.
pub fn pad_width(k: usize) -> usize {
    (k.ilog2() as usize) + 1
}

fn padded_reduction(inst: &FactoredInstance, valid_digits: &[u32]) -> Result<FactoredInstance> {
    let k = inst.k();
    let b = inst.b;
    let c = pad_width(k);
    let out_b = c * b + 1;
    if out_b > MAX_SHORT_BITS {
        return Err(Error::capacity(
            "padded SUM strings",
            1u128 << out_b.min(127),
            1u128 << MAX_SHORT_BITS,
        ));
    }
    let combos = (valid_digits.len() as u128).pow(b as u32);
    if combos > 1 << 20 {
        return Err(Error::capacity("padded guess set", combos, 1 << 20));
    }

    // pad(s): read the bits of s as base-2^c digits.
    let pad = |s: u32| -> i64 {
        (0..b)
            .map(|i| (((s >> (b - 1 - i)) & 1) as i64) << (c * (b - 1 - i)))
            .sum()
    };
    let enc = |v: i64| encode_signed(v, out_b).expect("padded value fits the headroom width");

    let mut lists = transformed_lists(inst, out_b, |_, u| vec![enc(pad(u))])?;

    // The verifier partition: one factored vector, every set the negated
    // encodings of all valid digit combinations.
    let mut guesses = Vec::new();
    let mut digits = vec![0usize; b];
    loop {
        let value: i64 = (0..b)
            .map(|i| (valid_digits[digits[i]] as i64) << (c * (b - 1 - i)))
            .sum();
        guesses.push(enc(-value));
        let mut pos = b;
        loop {
            if pos == 0 {
                let verifier = FactoredVector::new(out_b, vec![guesses; inst.g])?;
                lists.push(vec![verifier]);
                return FactoredInstance::new(lists, out_b, inst.g, Predicate::Sum);
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < valid_digits.len() {
                break;
            }
            digits[pos] = 0;
        }
    }
}

/// Reduce factored OV to factored (k+1)-SUM by digit padding.
///
/// Each string's bits spread out into base-`2^c` digits, so the k originals
/// sum digit-wise without carries; the fresh (k+1)-th list holds a single
/// vector whose sets contain the negation of every digit combination in
/// `[0, k-1]^b` — exactly the per-bit sums that avoid "all k ones", i.e.
/// orthogonality. Counts are preserved exactly.
pub fn ov_to_sum_padded(inst: &FactoredInstance) -> Result<FactoredInstance> {
    inst.validate()?;
    if inst.predicate != Predicate::Ov {
        return Err(Error::argument(format!(
            "ov_to_sum_padded needs an OV instance, got {}",
            inst.predicate.tag()
        )));
    }
    let valid: Vec<u32> = (0..inst.k() as u32).collect();
    padded_reduction(inst, &valid)
}

/// Reduce factored XOR to factored (k+1)-SUM by digit padding.
///
/// As [`ov_to_sum_padded`] with the valid per-bit sums being the even values
/// in `[0, k]` — a bit position XORs to zero exactly when an even number of
/// the k strings have a one there.
pub fn xor_to_sum_padded(inst: &FactoredInstance) -> Result<FactoredInstance> {
    inst.validate()?;
    if inst.predicate != Predicate::Xor {
        return Err(Error::argument(format!(
            "xor_to_sum_padded needs a XOR instance, got {}",
            inst.predicate.tag()
        )));
    }
    let valid: Vec<u32> = (0..=inst.k() as u32).filter(|v| v % 2 == 0).collect();
    padded_reduction(inst, &valid)
}
