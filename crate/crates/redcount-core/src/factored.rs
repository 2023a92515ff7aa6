//! Factored vectors, factored counting problems, and their indicator
//! encoding.
//!
//! A *factored vector* compresses `g * b` bits into `g` sets of `b`-bit
//! strings: it stands for every `g*b`-bit string formed by picking one
//! member per set. A factored instance holds `k` lists of factored vectors
//! and a satisfaction predicate; its count is, summed over all k-tuples of
//! vectors, the product over set positions of the number of satisfying
//! string choices at that position.
//!
//! [`IndicatorEncoding`] flattens an instance into one membership bit per
//! (list, vector, set, string). Over these bits the count is a polynomial
//! in which every monomial takes exactly one variable from each of the
//! `k*g` partitions (list x set position) — the "strongly partite" shape the
//! self-reduction frameworks in [`crate::selfred`] need. [`polynomial_count`]
//! evaluates that polynomial on *arbitrary* bit strings and agrees with
//! [`count_factored`] of the decoded instance everywhere.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::Rng as _;

use crate::bits::{format_bits, signed_value, BitVector, MAX_SHORT_BITS};
use crate::error::{Error, Result};
use crate::instances::BigCount;
use crate::rng::Rng;

/// Default cap on elementary steps for one exact factored count.
pub const DEFAULT_FACTORED_WORK_LIMIT: u128 = 100_000_000;

/// Budget under which [`count_factored`] additionally re-counts by direct
/// full-selection enumeration and asserts agreement with the product form.
const DIRECT_CHECK_LIMIT: u128 = 1_000_000;

/// Cap on indicator-encoding length in bits.
const MAX_ENCODING_BITS: u128 = 1 << 28;

/// A truth table over k-tuples of `b`-bit strings.
///
/// Entry index is the concatenation `w_1 . w_2 . ... . w_k` read as a number
/// with `w_1` in the most significant `b` bits.
#[derive(Clone, PartialEq, Eq)]
pub struct TruthTable {
    k: usize,
    b: usize,
    table: Vec<bool>,
}

impl TruthTable {
    /// Build a table; `table` must have exactly `2^(k*b)` entries.
    pub fn new(k: usize, b: usize, table: Vec<bool>) -> Result<Self> {
        if k == 0 || b == 0 {
            return Err(Error::argument("truth table needs k >= 1 and b >= 1"));
        }
        let width = k * b;
        if width > MAX_SHORT_BITS {
            return Err(Error::argument(format!(
                "truth table over {width} bits exceeds the {MAX_SHORT_BITS}-bit cap"
            )));
        }
        if table.len() != 1 << width {
            return Err(Error::structural(format!(
                "truth table has {} entries, expected {}",
                table.len(),
                1u32 << width
            )));
        }
        Ok(TruthTable { k, b, table })
    }

    /// Build from a function on k-tuples of `b`-bit values.
    pub fn from_fn(k: usize, b: usize, mut f: impl FnMut(&[u32]) -> bool) -> Result<Self> {
        let width = k
            .checked_mul(b)
            .filter(|&w| w <= MAX_SHORT_BITS)
            .ok_or_else(|| {
                Error::argument(format!("truth table over {k}*{b} bits exceeds the cap"))
            })?;
        let mut words = vec![0u32; k];
        let table = (0..1u32 << width)
            .map(|idx| {
                for (i, w) in words.iter_mut().enumerate() {
                    *w = (idx >> ((k - 1 - i) * b)) & ((1 << b) - 1);
                }
                f(&words)
            })
            .collect();
        TruthTable::new(k, b, table)
    }

    /// A uniformly random table.
    pub fn random(k: usize, b: usize, rng: &mut Rng) -> Result<Self> {
        let width = k
            .checked_mul(b)
            .filter(|&w| w <= MAX_SHORT_BITS)
            .ok_or_else(|| {
                Error::argument(format!("truth table over {k}*{b} bits exceeds the cap"))
            })?;
        let table = (0..1u32 << width).map(|_| rng.gen::<bool>()).collect();
        TruthTable::new(k, b, table)
    }

    /// Tuple arity.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Bits per string.
    pub fn b(&self) -> usize {
        self.b
    }

    /// Raw entries, indexed by concatenated tuple.
    pub fn entries(&self) -> &[bool] {
        &self.table
    }

    fn lookup(&self, words: &[u32]) -> bool {
        let mut idx = 0usize;
        for &w in words {
            idx = (idx << self.b) | w as usize;
        }
        self.table[idx]
    }
}

impl fmt::Debug for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ones = self.table.iter().filter(|&&e| e).count();
        write!(
            f,
            "TruthTable(k={}, b={}, {} of {} tuples satisfy)",
            self.k,
            self.b,
            ones,
            self.table.len()
        )
    }
}

/// The satisfaction predicate of a factored problem.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Predicate {
    /// Bitwise AND of the tuple is all-zeros (orthogonality).
    Ov,
    /// Bitwise XOR of the tuple is all-zeros.
    Xor,
    /// Two's-complement values of the tuple sum to zero over the integers.
    Sum,
    /// Arbitrary predicate given by a truth table.
    Custom(TruthTable),
}

impl Predicate {
    /// Does a k-tuple of `b`-bit strings satisfy the predicate?
    ///
    /// The convention throughout the crate: `true` means the tuple is
    /// counted.
    pub fn satisfies(&self, words: &[u32], b: usize) -> Result<bool> {
        if b == 0 || b > MAX_SHORT_BITS {
            return Err(Error::argument(format!(
                "string width must be in 1..={MAX_SHORT_BITS}, got {b}"
            )));
        }
        if words.is_empty() {
            return Err(Error::argument("satisfies needs at least one string"));
        }
        for &w in words {
            if w >= (1u32 << b) {
                return Err(Error::argument(format!(
                    "string value {w} does not fit in {b} bits"
                )));
            }
        }
        match self {
            Predicate::Ov => Ok(words.iter().fold(!0u32, |acc, &w| acc & w) & ((1 << b) - 1) == 0),
            Predicate::Xor => Ok(words.iter().fold(0u32, |acc, &w| acc ^ w) == 0),
            Predicate::Sum => Ok(words.iter().map(|&w| signed_value(w, b)).sum::<i64>() == 0),
            Predicate::Custom(t) => {
                if t.k != words.len() || t.b != b {
                    return Err(Error::argument(format!(
                        "table is over {}-tuples of {}-bit strings, got {} of {b}",
                        t.k,
                        t.b,
                        words.len()
                    )));
                }
                Ok(t.lookup(words))
            }
        }
    }

    /// Short tag used in serialized headers and provenance logs.
    pub fn tag(&self) -> &'static str {
        match self {
            Predicate::Ov => "ov",
            Predicate::Xor => "xor",
            Predicate::Sum => "sum",
            Predicate::Custom(_) => "custom",
        }
    }
}

/// A factored vector: `g` sets of `b`-bit strings.
///
/// Sets are stored sorted and deduplicated, so equality is structural. Sets
/// may be empty (such a vector contributes zero to every count).
#[derive(Clone, PartialEq, Eq)]
pub struct FactoredVector {
    b: usize,
    sets: Vec<Vec<u32>>,
}

impl FactoredVector {
    /// Build from raw member values; each must fit in `b` bits.
    pub fn new(b: usize, sets: Vec<Vec<u32>>) -> Result<Self> {
        if b == 0 || b > MAX_SHORT_BITS {
            return Err(Error::argument(format!(
                "string width must be in 1..={MAX_SHORT_BITS}, got {b}"
            )));
        }
        if sets.is_empty() {
            return Err(Error::structural("factored vector needs at least one set"));
        }
        let mut cleaned = Vec::with_capacity(sets.len());
        for set in sets {
            for &w in &set {
                if w >= (1u32 << b) {
                    return Err(Error::structural(format!(
                        "set member {w} does not fit in {b} bits"
                    )));
                }
            }
            let mut set = set;
            set.sort_unstable();
            set.dedup();
            cleaned.push(set);
        }
        Ok(FactoredVector { b, sets: cleaned })
    }

    /// Build from `0/1`-string members.
    pub fn from_strings(b: usize, sets: &[&[&str]]) -> Result<Self> {
        let parsed = sets
            .iter()
            .map(|set| set.iter().map(|s| crate::bits::parse_bits(s, b)).collect())
            .collect::<Result<Vec<Vec<u32>>>>()?;
        FactoredVector::new(b, parsed)
    }

    /// Bits per string.
    pub fn b(&self) -> usize {
        self.b
    }

    /// Number of sets.
    pub fn g(&self) -> usize {
        self.sets.len()
    }

    /// The sets, sorted and deduplicated.
    pub fn sets(&self) -> &[Vec<u32>] {
        &self.sets
    }

    /// Set at position `j`.
    pub fn set(&self, j: usize) -> &[u32] {
        &self.sets[j]
    }

    /// True when some set is empty.
    pub fn has_empty_set(&self) -> bool {
        self.sets.iter().any(Vec::is_empty)
    }
}

impl fmt::Debug for FactoredVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FactoredVector[")?;
        for (j, set) in self.sets.iter().enumerate() {
            if j > 0 {
                write!(f, " ")?;
            }
            write!(f, "{{")?;
            for (idx, &w) in set.iter().enumerate() {
                if idx > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", format_bits(w, self.b))?;
            }
            write!(f, "}}")?;
        }
        write!(f, "]")
    }
}

/// A factored counting instance: `k` lists of factored vectors sharing
/// `(b, g)`, plus the satisfaction predicate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactoredInstance {
    /// The `k` vector lists; every list must be nonempty.
    pub lists: Vec<Vec<FactoredVector>>,
    /// Bits per string.
    pub b: usize,
    /// Sets per vector.
    pub g: usize,
    /// Satisfaction predicate.
    pub predicate: Predicate,
}

impl FactoredInstance {
    /// Build and validate an instance.
    pub fn new(
        lists: Vec<Vec<FactoredVector>>,
        b: usize,
        g: usize,
        predicate: Predicate,
    ) -> Result<Self> {
        let inst = FactoredInstance {
            lists,
            b,
            g,
            predicate,
        };
        inst.validate()?;
        Ok(inst)
    }

    /// Check the structural invariants: `k >= 2`, nonempty lists, shared
    /// `(b, g)` across all vectors, and a predicate compatible with `(k, b)`.
    pub fn validate(&self) -> Result<()> {
        if self.lists.len() < 2 {
            return Err(Error::structural(format!(
                "factored instance needs at least 2 lists, got {}",
                self.lists.len()
            )));
        }
        if self.g == 0 {
            return Err(Error::structural("factored instance needs g >= 1"));
        }
        for (i, list) in self.lists.iter().enumerate() {
            if list.is_empty() {
                return Err(Error::structural(format!("list {i} is empty")));
            }
            for v in list {
                if v.b != self.b || v.g() != self.g {
                    return Err(Error::structural(format!(
                        "list {i} holds a vector with (b, g) = ({}, {}), expected ({}, {})",
                        v.b,
                        v.g(),
                        self.b,
                        self.g
                    )));
                }
            }
        }
        if let Predicate::Custom(t) = &self.predicate {
            if t.k != self.lists.len() || t.b != self.b {
                return Err(Error::structural(format!(
                    "custom table is over {}-tuples of {}-bit strings, instance has k={} b={}",
                    t.k,
                    t.b,
                    self.lists.len(),
                    self.b
                )));
            }
        }
        Ok(())
    }

    /// Number of lists `k`.
    pub fn k(&self) -> usize {
        self.lists.len()
    }

    /// Common list length, or a structural error when lists are ragged.
    pub fn uniform_n(&self) -> Result<usize> {
        let n = self.lists[0].len();
        if self.lists.iter().any(|l| l.len() != n) {
            return Err(Error::structural(
                "lists have differing lengths; the indicator encoding needs a uniform n",
            ));
        }
        Ok(n)
    }

    /// Largest list size.
    pub fn max_list_len(&self) -> usize {
        self.lists.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// The shape header `(k, n, g, b, predicate)` when lists are uniform.
    pub fn shape(&self) -> Result<FactoredShape> {
        Ok(FactoredShape {
            k: self.k(),
            n: self.uniform_n()?,
            g: self.g,
            b: self.b,
            predicate: self.predicate.clone(),
        })
    }
}

/// Count satisfying string tuples from one set per list at a fixed position.
fn satisfying_choices(predicate: &Predicate, sets: &[&[u32]], b: usize) -> Result<u64> {
    if sets.iter().any(|s| s.is_empty()) {
        return Ok(0);
    }
    let k = sets.len();
    let mut indices = vec![0usize; k];
    let mut words = vec![0u32; k];
    let mut count = 0u64;
    loop {
        for i in 0..k {
            words[i] = sets[i][indices[i]];
        }
        if predicate.satisfies(&words, b)? {
            count += 1;
        }
        let mut pos = k;
        loop {
            if pos == 0 {
                return Ok(count);
            }
            pos -= 1;
            indices[pos] += 1;
            if indices[pos] < sets[pos].len() {
                break;
            }
            indices[pos] = 0;
        }
    }
}

/// Exact factored count with the default work guard.
pub fn count_factored(inst: &FactoredInstance) -> Result<BigCount> {
    count_factored_with_limit(inst, DEFAULT_FACTORED_WORK_LIMIT)
}

/// Exact factored count: sum over k-tuples of vectors of the product over
/// positions of the satisfying-choice counts.
///
/// When the full-selection enumeration is cheap the function re-counts that
/// way too and asserts agreement — the two computations share almost no
/// code, so a bug in either trips the assertion in small tests long before
/// it could corrupt a large run.
pub fn count_factored_with_limit(inst: &FactoredInstance, limit: u128) -> Result<BigCount> {
    inst.validate()?;
    let k = inst.k();
    let tuple_count: u128 = inst
        .lists
        .iter()
        .fold(1u128, |acc, l| acc.saturating_mul(l.len() as u128));
    // Per-tuple work, bounded by the largest set of each list at each
    // position (gadget outputs have wide strings but small sets, so a
    // 2^(k*b) bound would be uselessly coarse).
    let per_tuple: u128 = (0..inst.g)
        .map(|j| {
            inst.lists
                .iter()
                .map(|l| l.iter().map(|v| v.set(j).len()).max().unwrap_or(0) as u128)
                .fold(1u128, u128::saturating_mul)
        })
        .fold(0u128, u128::saturating_add);
    let estimated = tuple_count.saturating_mul(per_tuple.max(1));
    if estimated > limit {
        return Err(Error::capacity("factored counting", estimated, limit));
    }

    let mut total = BigUint::zero();
    let mut direct_total = BigUint::zero();
    let mut direct_feasible = true;

    let mut indices = vec![0usize; k];
    let mut sets: Vec<&[u32]> = Vec::with_capacity(k);
    loop {
        let vectors: Vec<&FactoredVector> = indices
            .iter()
            .enumerate()
            .map(|(i, &ix)| &inst.lists[i][ix])
            .collect();
        let mut product = BigUint::one();
        for j in 0..inst.g {
            sets.clear();
            sets.extend(vectors.iter().map(|v| v.set(j)));
            let n_j = satisfying_choices(&inst.predicate, &sets, inst.b)?;
            if n_j == 0 {
                product = BigUint::zero();
                break;
            }
            product *= n_j;
        }
        total += &product;

        if direct_feasible {
            match direct_selection_count(&inst.predicate, &vectors, inst.b, inst.g) {
                Some(c) => direct_total += c,
                None => direct_feasible = false,
            }
        }

        let mut pos = k;
        loop {
            if pos == 0 {
                if direct_feasible {
                    assert_eq!(
                        total, direct_total,
                        "product-form and direct factored counts disagree"
                    );
                }
                return Ok(BigCount(total));
            }
            pos -= 1;
            indices[pos] += 1;
            if indices[pos] < inst.lists[pos].len() {
                break;
            }
            indices[pos] = 0;
        }
    }
}

/// Independent re-count for one vector tuple: enumerate every full selection
/// (one string from each of the `k*g` sets) and count those satisfying the
/// predicate at all `g` positions. Returns `None` when too big to bother.
fn direct_selection_count(
    predicate: &Predicate,
    vectors: &[&FactoredVector],
    b: usize,
    g: usize,
) -> Option<u64> {
    let mut work = 1u128;
    for v in vectors {
        for set in v.sets() {
            work = work.saturating_mul(set.len().max(1) as u128);
        }
    }
    if work > DIRECT_CHECK_LIMIT {
        return None;
    }
    if vectors.iter().any(|v| v.has_empty_set()) {
        return Some(0);
    }
    let k = vectors.len();
    // Odometer over all (i, j) selections.
    let mut choice = vec![0usize; k * g];
    let mut count = 0u64;
    let mut words = vec![0u32; k];
    loop {
        let mut all = true;
        for j in 0..g {
            for (i, w) in words.iter_mut().enumerate() {
                *w = vectors[i].set(j)[choice[i * g + j]];
            }
            if !predicate.satisfies(&words, b).ok()? {
                all = false;
                break;
            }
        }
        if all {
            count += 1;
        }
        let mut pos = k * g;
        loop {
            if pos == 0 {
                return Some(count);
            }
            pos -= 1;
            let i = pos / g;
            let j = pos % g;
            choice[pos] += 1;
            if choice[pos] < vectors[i].set(j).len() {
                break;
            }
            choice[pos] = 0;
        }
    }
}

/// Parity (mod 2) of the factored count.
pub fn parity_factored(inst: &FactoredInstance) -> Result<u8> {
    Ok(count_factored(inst)?.parity())
}

/// The shape header of an indicator encoding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactoredShape {
    /// Number of lists.
    pub k: usize,
    /// Vectors per list.
    pub n: usize,
    /// Sets per vector.
    pub g: usize,
    /// Bits per string.
    pub b: usize,
    /// Satisfaction predicate.
    pub predicate: Predicate,
}

impl FactoredShape {
    /// Build and validate a shape.
    pub fn new(k: usize, n: usize, g: usize, b: usize, predicate: Predicate) -> Result<Self> {
        let shape = FactoredShape {
            k,
            n,
            g,
            b,
            predicate,
        };
        shape.validate()?;
        Ok(shape)
    }

    /// Check the shape parameters.
    pub fn validate(&self) -> Result<()> {
        if self.k < 2 || self.n == 0 || self.g == 0 {
            return Err(Error::argument(format!(
                "shape needs k >= 2, n >= 1, g >= 1; got k={}, n={}, g={}",
                self.k, self.n, self.g
            )));
        }
        if self.b == 0 || self.b > MAX_SHORT_BITS {
            return Err(Error::argument(format!(
                "string width must be in 1..={MAX_SHORT_BITS}, got {}",
                self.b
            )));
        }
        let len = self.bit_len_u128();
        if len > MAX_ENCODING_BITS {
            return Err(Error::capacity(
                "indicator encoding",
                len,
                MAX_ENCODING_BITS,
            ));
        }
        if let Predicate::Custom(t) = &self.predicate {
            if t.k != self.k || t.b != self.b {
                return Err(Error::argument(format!(
                    "custom table is over {}-tuples of {}-bit strings, shape has k={} b={}",
                    t.k, t.b, self.k, self.b
                )));
            }
        }
        Ok(())
    }

    fn bit_len_u128(&self) -> u128 {
        (self.k as u128)
            * (self.n as u128)
            * (self.g as u128)
            * (1u128 << self.b.min(127))
    }

    /// Total encoding length `k * n * g * 2^b`.
    pub fn bit_len(&self) -> usize {
        self.bit_len_u128() as usize
    }

    /// Flat bit index of the indicator for (list `i`, vector `l`, set `j`,
    /// string `s`).
    pub fn index(&self, i: usize, l: usize, j: usize, s: u32) -> usize {
        debug_assert!(i < self.k && l < self.n && j < self.g && (s as usize) < (1 << self.b));
        (((i * self.n + l) * self.g + j) << self.b) + s as usize
    }

    /// Partition id of a bit: the (list, set position) pair, in `0..k*g`.
    pub fn partition_of(&self, bit_index: usize) -> usize {
        let group = bit_index >> self.b; // (i * n + l) * g + j
        let j = group % self.g;
        let i = group / self.g / self.n;
        i * self.g + j
    }

    /// Degree of the count polynomial: one variable per partition, `k * g`.
    pub fn degree(&self) -> usize {
        self.k * self.g
    }

    /// The materialized bit-index -> partition map.
    pub fn partition_map(&self) -> Vec<usize> {
        (0..self.bit_len()).map(|ix| self.partition_of(ix)).collect()
    }
}

/// A factored instance flattened to membership indicator bits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndicatorEncoding {
    /// The shape the bits are read under.
    pub shape: FactoredShape,
    /// One bit per (list, vector, set, string): is the string a member?
    pub bits: BitVector,
}

impl IndicatorEncoding {
    /// Wrap bits under a shape, checking the length.
    pub fn new(shape: FactoredShape, bits: BitVector) -> Result<Self> {
        shape.validate()?;
        if bits.len() != shape.bit_len() {
            return Err(Error::structural(format!(
                "encoding has {} bits, shape needs {}",
                bits.len(),
                shape.bit_len()
            )));
        }
        Ok(IndicatorEncoding { shape, bits })
    }
}

/// Flatten an instance (with uniform list length) into indicator bits.
pub fn encode_bits(inst: &FactoredInstance) -> Result<IndicatorEncoding> {
    inst.validate()?;
    let shape = inst.shape()?;
    let mut bits = BitVector::zeros(shape.bit_len());
    for (i, list) in inst.lists.iter().enumerate() {
        for (l, v) in list.iter().enumerate() {
            for (j, set) in v.sets().iter().enumerate() {
                for &s in set {
                    bits.set(shape.index(i, l, j, s), true);
                }
            }
        }
    }
    IndicatorEncoding::new(shape, bits)
}

/// Read indicator bits back into a factored instance.
///
/// Every bit string of the right length decodes: bits simply select set
/// members.
pub fn decode_bits(bits: &BitVector, shape: &FactoredShape) -> Result<FactoredInstance> {
    shape.validate()?;
    if bits.len() != shape.bit_len() {
        return Err(Error::structural(format!(
            "encoding has {} bits, shape needs {}",
            bits.len(),
            shape.bit_len()
        )));
    }
    let lists = (0..shape.k)
        .map(|i| {
            (0..shape.n)
                .map(|l| {
                    let sets = (0..shape.g)
                        .map(|j| {
                            (0..1u32 << shape.b)
                                .filter(|&s| bits.get(shape.index(i, l, j, s)))
                                .collect()
                        })
                        .collect();
                    FactoredVector::new(shape.b, sets)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    FactoredInstance::new(lists, shape.b, shape.g, shape.predicate.clone())
}

/// Evaluate the count polynomial on an arbitrary indicator bit string.
///
/// The polynomial is strongly `k*g`-partite: expanding the sum below, every
/// monomial multiplies exactly one indicator from each (list, set position)
/// partition, with all of a list's indicators taken from the same vector
/// slot. On valid encodings this equals [`count_factored`] of the decoded
/// instance, and because the formula never assumes consistency between
/// bits, the identity holds for *all* bit strings.
pub fn polynomial_count(enc: &IndicatorEncoding, shape: &FactoredShape) -> Result<BigCount> {
    if enc.shape != *shape {
        return Err(Error::argument(
            "encoding shape does not match the requested shape",
        ));
    }
    shape.validate()?;
    let k = shape.k;
    let g = shape.g;

    // Precompute the satisfying k-tuples of b-bit strings once.
    let mut words = vec![0u32; k];
    let width = k * shape.b;
    let mut satisfying: Vec<Vec<u32>> = Vec::new();
    for idx in 0..1u32 << width {
        for (i, w) in words.iter_mut().enumerate() {
            *w = (idx >> ((k - 1 - i) * shape.b)) & ((1 << shape.b) - 1);
        }
        if shape.predicate.satisfies(&words, shape.b)? {
            satisfying.push(words.clone());
        }
    }

    let mut total = BigUint::zero();
    let mut slots = vec![0usize; k];
    loop {
        // Structural check: the monomials contributed by this vector-slot
        // choice cover every partition (i, j) exactly once.
        debug_assert_eq!(
            {
                let mut covered = vec![0usize; shape.degree()];
                for (i, &l) in slots.iter().enumerate() {
                    for j in 0..g {
                        covered[shape.partition_of(shape.index(i, l, j, 0))] += 1;
                    }
                }
                covered
            },
            vec![1usize; shape.degree()],
            "monomial does not take exactly one variable per partition"
        );

        let mut product = BigUint::one();
        for j in 0..g {
            let mut here = 0u64;
            'tuples: for tuple in &satisfying {
                for (i, &w) in tuple.iter().enumerate() {
                    if !enc.bits.get(shape.index(i, slots[i], j, w)) {
                        continue 'tuples;
                    }
                }
                here += 1;
            }
            if here == 0 {
                product = BigUint::zero();
                break;
            }
            product *= here;
        }
        total += product;

        let mut pos = k;
        loop {
            if pos == 0 {
                return Ok(BigCount(total));
            }
            pos -= 1;
            slots[pos] += 1;
            if slots[pos] < shape.n {
                break;
            }
            slots[pos] = 0;
        }
    }
}

/// Sample an instance whose indicator encoding is a uniform bit string:
/// every membership bit is an independent fair coin.
pub fn sample_uniform_factored(
    k: usize,
    n: usize,
    g: usize,
    b: usize,
    predicate: Predicate,
    rng: &mut Rng,
) -> Result<FactoredInstance> {
    let shape = FactoredShape::new(k, n, g, b, predicate)?;
    let bits = crate::bits::random_bitvector(shape.bit_len(), rng);
    decode_bits(&bits, &shape)
}
