//! Self-correction: recover exact answers on a chosen input from an oracle
//! that answers queries on *uniformly distributed* inputs.
//!
//! Both correctors work for low-degree polynomials whose monomials take
//! exactly one variable from each of `d` partitions (the counting
//! polynomials built by [`crate::factored`] have this form with `d = k*g`).
//! [`correct_parity`] masks the input with `d+1` random shift vectors and
//! XORs the oracle's answers on all nonempty subset-sums; [`correct_integer`]
//! embeds the input into `t`-bit arithmetic words, splits each word into bit
//! layers, and recombines `(2t)^d` single-bit oracle calls so that the random
//! masks cancel. Every individual query is marginally uniform, which is the
//! whole point: an oracle that is only reliable on random inputs still yields
//! the answer on a worst-case input.
//!
//! Oracle calls within one correction are mutually independent and combine
//! through commutative accumulators (XOR, modular sum), so callers may
//! parallelize them; this implementation runs them sequentially and leaves
//! trial-level parallelism to [`crate::pipeline`].
//!
//! [`dense_ov_selfreduce`] is the analogous worst-to-random step for dense
//! orthogonal-vectors parity, working on characteristic-vector encodings of
//! the input sets.

use std::collections::BTreeMap;

use num_traits::ToPrimitive;
use rand::Rng as _;

use crate::bits::{ceil_log2, random_bitvector, BitVector};
use crate::error::{Error, Result};
use crate::factored::{FactoredShape, IndicatorEncoding};
use crate::instances::{count_ov, OvInstance};
use crate::rng::{self, Rng};

/// Cap on oracle calls issued by a single correction.
const MAX_ORACLE_CALLS: u128 = 20_000_000;

/// An oracle answering single-bit (parity) queries on bit strings.
///
/// Implementations must accept every bit string of the stated arity and
/// answer with a bit; the correctors check the range and reject anything
/// else. Queries take `&mut self` so wrappers can count calls or consume
/// randomness.
pub trait ParityOracle {
    /// Input length the oracle accepts.
    fn arity(&self) -> usize;
    /// Answer a single query; must return 0 or 1.
    fn query(&mut self, input: &BitVector) -> Result<u8>;
}

/// An oracle answering integer queries on bit strings.
///
/// The contract mirrors [`ParityOracle`] with answers in `[-M, M]` for the
/// bound `M` of the polynomial being corrected.
pub trait IntegerOracle {
    /// Input length the oracle accepts.
    fn arity(&self) -> usize;
    /// Answer a single query.
    fn query(&mut self, input: &BitVector) -> Result<i64>;
}

/// Shape data for a polynomial the correctors can handle: `n_bits`
/// variables split into `degree` partitions, every monomial taking exactly
/// one variable per partition, with `|P(x)| <= bound` on bit inputs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolynomialSpec {
    /// Number of 0/1 variables.
    pub n_bits: usize,
    /// Number of partitions `d`; also the degree of every monomial.
    pub degree: usize,
    /// Partition of each variable, values in `[0, degree)`.
    pub partition_map: Vec<usize>,
    /// Output bound `M >= 1` on bit inputs.
    pub bound: u64,
}

impl PolynomialSpec {
    /// Validated constructor.
    pub fn new(
        n_bits: usize,
        degree: usize,
        partition_map: Vec<usize>,
        bound: u64,
    ) -> Result<Self> {
        let spec = PolynomialSpec {
            n_bits,
            degree,
            partition_map,
            bound,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Check the shape invariants.
    pub fn validate(&self) -> Result<()> {
        if self.degree == 0 {
            return Err(Error::argument("polynomial degree must be at least 1"));
        }
        if self.bound == 0 {
            return Err(Error::argument("polynomial bound must be at least 1"));
        }
        if self.partition_map.len() != self.n_bits {
            return Err(Error::structural(format!(
                "partition map covers {} bits, spec has {}",
                self.partition_map.len(),
                self.n_bits
            )));
        }
        if let Some(bad) = self.partition_map.iter().find(|&&p| p >= self.degree) {
            return Err(Error::structural(format!(
                "partition id {bad} out of range for degree {}",
                self.degree
            )));
        }
        Ok(())
    }

    /// Answer width `z = ceil(lg bound)` (0 when the bound is 1).
    pub fn z(&self) -> usize {
        ceil_log2(self.bound as usize)
    }

    /// Word width `t = z + degree` used by the integer corrector.
    pub fn t(&self) -> usize {
        self.z() + self.degree
    }

    /// The spec of a factored counting polynomial: degree `k*g`, the
    /// indicator-bit partition map, and bound `n^k * 2^(k*b*g)`.
    pub fn for_factored(shape: &FactoredShape) -> Result<Self> {
        shape.validate()?;
        let k = shape.k as u32;
        let bound = (shape.n as u64)
            .checked_pow(k)
            .and_then(|nk| {
                let bits = shape.k * shape.b * shape.g;
                if bits >= 63 {
                    None
                } else {
                    nk.checked_mul(1u64 << bits)
                }
            })
            .ok_or_else(|| {
                Error::capacity("factored polynomial bound", u128::MAX, u64::MAX as u128)
            })?;
        PolynomialSpec::new(
            shape.bit_len(),
            shape.k * shape.g,
            shape.partition_map(),
            bound,
        )
    }
}

/// Exact parity oracle for a factored counting polynomial: answers the
/// polynomial count mod 2 on any indicator string.
#[derive(Clone, Debug)]
pub struct FactoredParityOracle {
    shape: FactoredShape,
}

impl FactoredParityOracle {
    /// Oracle over indicator strings of the given shape.
    pub fn new(shape: FactoredShape) -> Result<Self> {
        shape.validate()?;
        Ok(FactoredParityOracle { shape })
    }
}

impl ParityOracle for FactoredParityOracle {
    fn arity(&self) -> usize {
        self.shape.bit_len()
    }

    fn query(&mut self, input: &BitVector) -> Result<u8> {
        let enc = IndicatorEncoding::new(self.shape.clone(), input.clone())?;
        Ok(crate::factored::polynomial_count(&enc, &self.shape)?.parity())
    }
}

/// Exact integer oracle for a factored counting polynomial: answers the
/// polynomial count on any indicator string.
#[derive(Clone, Debug)]
pub struct FactoredCountOracle {
    shape: FactoredShape,
}

impl FactoredCountOracle {
    /// Oracle over indicator strings of the given shape.
    pub fn new(shape: FactoredShape) -> Result<Self> {
        shape.validate()?;
        Ok(FactoredCountOracle { shape })
    }
}

impl IntegerOracle for FactoredCountOracle {
    fn arity(&self) -> usize {
        self.shape.bit_len()
    }

    fn query(&mut self, input: &BitVector) -> Result<i64> {
        let enc = IndicatorEncoding::new(self.shape.clone(), input.clone())?;
        let count = crate::factored::polynomial_count(&enc, &self.shape)?;
        count.0.to_i64().ok_or_else(|| {
            Error::structural("factored polynomial count does not fit in an i64")
        })
    }
}

/// Wrapper counting oracle calls; answers pass through unchanged.
#[derive(Clone, Debug)]
pub struct CountingOracle<O> {
    inner: O,
    calls: u64,
}

impl<O> CountingOracle<O> {
    /// Wrap an oracle with a call counter starting at zero.
    pub fn new(inner: O) -> Self {
        CountingOracle { inner, calls: 0 }
    }

    /// Number of queries made so far.
    pub fn calls(&self) -> u64 {
        self.calls
    }

    /// Unwrap the inner oracle.
    pub fn into_inner(self) -> O {
        self.inner
    }
}

impl<O: ParityOracle> ParityOracle for CountingOracle<O> {
    fn arity(&self) -> usize {
        self.inner.arity()
    }

    fn query(&mut self, input: &BitVector) -> Result<u8> {
        self.calls += 1;
        self.inner.query(input)
    }
}

impl<O: IntegerOracle> IntegerOracle for CountingOracle<O> {
    fn arity(&self) -> usize {
        self.inner.arity()
    }

    fn query(&mut self, input: &BitVector) -> Result<i64> {
        self.calls += 1;
        self.inner.query(input)
    }
}

/// Wrapper corrupting answers independently with a fixed probability:
/// parity answers are flipped, integer answers get a uniform nonzero offset
/// in `[-offset_bound, offset_bound]`.
#[derive(Clone, Debug)]
pub struct NoisyOracle<O> {
    inner: O,
    error_rate: f64,
    offset_bound: i64,
    rng: Rng,
}

impl<O> NoisyOracle<O> {
    /// Wrap an oracle; each call errs independently with probability
    /// `error_rate`. Integer corruption defaults to offsets in `{-1, 1}`.
    pub fn new(inner: O, error_rate: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&error_rate) {
            return Err(Error::argument(format!(
                "error rate must lie in [0, 1], got {error_rate}"
            )));
        }
        Ok(NoisyOracle {
            inner,
            error_rate,
            offset_bound: 1,
            rng: rng::from_seed(seed),
        })
    }

    /// Set the magnitude range for integer corruption offsets.
    pub fn with_offset_bound(mut self, bound: i64) -> Result<Self> {
        if bound < 1 {
            return Err(Error::argument("offset bound must be at least 1"));
        }
        self.offset_bound = bound;
        Ok(self)
    }
}

impl<O: ParityOracle> ParityOracle for NoisyOracle<O> {
    fn arity(&self) -> usize {
        self.inner.arity()
    }

    fn query(&mut self, input: &BitVector) -> Result<u8> {
        let answer = self.inner.query(input)?;
        if self.rng.gen_bool(self.error_rate) {
            Ok(1 - answer)
        } else {
            Ok(answer)
        }
    }
}

impl<O: IntegerOracle> IntegerOracle for NoisyOracle<O> {
    fn arity(&self) -> usize {
        self.inner.arity()
    }

    fn query(&mut self, input: &BitVector) -> Result<i64> {
        let answer = self.inner.query(input)?;
        if self.rng.gen_bool(self.error_rate) {
            let magnitude = self.rng.gen_range(1..=self.offset_bound);
            let offset = if self.rng.gen_bool(0.5) {
                magnitude
            } else {
                -magnitude
            };
            Ok(answer + offset)
        } else {
            Ok(answer)
        }
    }
}

fn check_arity(name: &str, oracle_arity: usize, spec: &PolynomialSpec, v: &BitVector) -> Result<()> {
    spec.validate()?;
    if oracle_arity != spec.n_bits {
        return Err(Error::argument(format!(
            "{name}: oracle arity {} does not match spec arity {}",
            oracle_arity, spec.n_bits
        )));
    }
    if v.len() != spec.n_bits {
        return Err(Error::argument(format!(
            "{name}: input has {} bits, spec has {}",
            v.len(),
            spec.n_bits
        )));
    }
    Ok(())
}

/// Compute the polynomial's parity on `v` from an oracle that is correct on
/// uniform inputs.
///
/// Draws `d+1` uniform masks and XORs the oracle's answers on `v` shifted
/// by every nonempty subset-sum of the masks — `2^(d+1) - 1` calls, each
/// marginally uniform. With an oracle that answers all of these queries
/// correctly, the result equals the polynomial's value mod 2 on `v`: the
/// order-`d+1` finite difference of a degree-`d` polynomial vanishes.
pub fn correct_parity<O: ParityOracle + ?Sized>(
    spec: &PolynomialSpec,
    oracle: &mut O,
    v: &BitVector,
    rng: &mut Rng,
) -> Result<u8> {
    check_arity("correct_parity", oracle.arity(), spec, v)?;
    let d = spec.degree;
    let subsets: u128 = (1u128 << (d + 1).min(127)) - 1;
    if subsets > MAX_ORACLE_CALLS {
        return Err(Error::capacity("parity correction calls", subsets, MAX_ORACLE_CALLS));
    }
    let masks: Vec<BitVector> = (0..=d).map(|_| random_bitvector(spec.n_bits, rng)).collect();
    let mut acc = 0u8;
    for subset in 1u64..1 << (d + 1) {
        let mut query = v.clone();
        for (i, mask) in masks.iter().enumerate() {
            if (subset >> i) & 1 == 1 {
                query.xor_assign(mask);
            }
        }
        let bit = oracle.query(&query)?;
        if bit > 1 {
            return Err(Error::Oracle(format!(
                "parity oracle returned {bit}, expected a bit"
            )));
        }
        acc ^= bit;
    }
    Ok(acc)
}

/// One layered evaluation of the polynomial on `t`-bit arithmetic words.
///
/// Splits each word into its `t` bits and sums, over all `t^d` choices of
/// one bit layer per partition, the oracle's answer on the selected bits
/// weighted by `2^(sum of layer indices)`, reduced mod `2^t`. With an exact
/// oracle this equals the polynomial evaluated directly on the words mod
/// `2^t`, because every monomial takes exactly one variable per partition
/// and so factors across the per-partition binary expansions.
pub fn bit_slice_call<O: IntegerOracle + ?Sized>(
    oracle: &mut O,
    words: &[u64],
    spec: &PolynomialSpec,
) -> Result<u64> {
    spec.validate()?;
    if words.len() != spec.n_bits {
        return Err(Error::argument(format!(
            "bit_slice_call: {} words for a {}-variable spec",
            words.len(),
            spec.n_bits
        )));
    }
    let d = spec.degree;
    let t = spec.t();
    if t > 62 {
        return Err(Error::capacity("word width", t as u128, 62));
    }
    let calls = (t as u128).checked_pow(d as u32).unwrap_or(u128::MAX);
    if calls > MAX_ORACLE_CALLS {
        return Err(Error::capacity("bit-slice calls", calls, MAX_ORACLE_CALLS));
    }
    let mask: u64 = (1u64 << t) - 1;
    let modulus: i128 = 1i128 << t;

    let mut layers = vec![0usize; d];
    let mut acc = 0u64;
    loop {
        let bools: Vec<bool> = (0..spec.n_bits)
            .map(|i| (words[i] >> layers[spec.partition_map[i]]) & 1 == 1)
            .collect();
        let answer = oracle.query(&BitVector::from_bools(&bools))?;
        let residue = (answer as i128).rem_euclid(modulus) as u64;
        let shift: usize = layers.iter().sum();
        let weight = if shift < t { 1u64 << shift } else { 0 };
        acc = (acc + ((weight as u128 * residue as u128) & mask as u128) as u64) & mask;

        // Odometer over [0, t)^d.
        let mut pos = 0;
        loop {
            if pos == d {
                return Ok(acc);
            }
            layers[pos] += 1;
            if layers[pos] < t {
                break;
            }
            layers[pos] = 0;
            pos += 1;
        }
    }
}

/// Compute the polynomial's value mod `2^z` on `v` from an oracle that is
/// correct on uniform inputs.
///
/// Draws a uniform `t`-bit word per variable (`t = z + d`), forms the `2^d`
/// signed maskings `u_i = (-v_i ± r_i) mod 2^t` selected by each partition
/// pattern, and sums their layered evaluations — `(2t)^d` oracle calls in
/// total, each marginally uniform. The mask contributions cancel in the
/// sum, leaving `2^d` times the polynomial's value, recovered by an exact
/// right shift. A failed divisibility-by-`2^d` check means some oracle
/// answer was wrong (or the spec does not match the oracle) and reports an
/// oracle error instead of a wrong value.
///
/// The result is the least nonnegative residue mod `2^z`; callers that need
/// signed values in `[-M, M]` must build the spec with doubled bound so the
/// residue determines the sign.
pub fn correct_integer<O: IntegerOracle + ?Sized>(
    spec: &PolynomialSpec,
    oracle: &mut O,
    v: &BitVector,
    rng: &mut Rng,
) -> Result<u64> {
    check_arity("correct_integer", oracle.arity(), spec, v)?;
    let d = spec.degree;
    let z = spec.z();
    if z == 0 {
        return Err(Error::argument(
            "integer correction needs a bound of at least 2 (one answer bit)",
        ));
    }
    let t = spec.t();
    if t > 62 {
        return Err(Error::capacity("word width", t as u128, 62));
    }
    let calls = (2u128 * t as u128).checked_pow(d as u32).unwrap_or(u128::MAX);
    if calls > MAX_ORACLE_CALLS {
        return Err(Error::capacity("integer correction calls", calls, MAX_ORACLE_CALLS));
    }
    let mask: u64 = (1u64 << t) - 1;

    let r: Vec<u64> = (0..spec.n_bits).map(|_| rng.gen::<u64>() & mask).collect();
    let mut acc = 0u64;
    let mut words = vec![0u64; spec.n_bits];
    for pattern in 0u64..1 << d {
        for i in 0..spec.n_bits {
            let vi = v.get(i) as u64;
            let masked = if (pattern >> spec.partition_map[i]) & 1 == 1 {
                r[i].wrapping_sub(vi)
            } else {
                r[i].wrapping_neg().wrapping_sub(vi)
            };
            words[i] = masked & mask;
        }
        acc = (acc + bit_slice_call(oracle, &words, spec)?) & mask;
    }

    // The masked sum carries a (-1)^d factor from picking the -v_i term in
    // each of the d monomial positions; undo it for odd d.
    if d % 2 == 1 {
        acc = acc.wrapping_neg() & mask;
    }
    if acc & ((1u64 << d) - 1) != 0 {
        return Err(Error::Oracle(format!(
            "integer correction accumulator {acc:#x} is not divisible by 2^{d}; \
             an oracle answer was wrong or the spec does not match"
        )));
    }
    Ok((acc >> d) & ((1u64 << z) - 1))
}

/// Repeat a randomized correction and return the plurality answer (majority
/// vote for bits). Repetition sub-seeds derive deterministically from the
/// caller's generator, so runs are reproducible; ties break toward the
/// smallest answer.
pub fn amplify<T, F>(repetitions: usize, rng: &mut Rng, mut run: F) -> Result<T>
where
    T: Ord + Clone,
    F: FnMut(&mut Rng) -> Result<T>,
{
    if repetitions == 0 {
        return Err(Error::argument("amplification needs at least one repetition"));
    }
    let base: u64 = rng.gen();
    let mut tally: BTreeMap<T, usize> = BTreeMap::new();
    for rep in 0..repetitions {
        let mut sub = rng::split(base, rep as u64);
        *tally.entry(run(&mut sub)?).or_insert(0) += 1;
    }
    let mut best: Option<(T, usize)> = None;
    for (value, votes) in tally {
        match &best {
            Some((_, most)) if votes <= *most => {}
            _ => best = Some((value, votes)),
        }
    }
    Ok(best.expect("at least one repetition ran").0)
}

/// Characteristic-vector encoding of a dense OV instance: list `i` occupies
/// bits `[i * 2^d, (i+1) * 2^d)`, and the bit for a member vector sits at
/// the offset equal to its most-significant-bit-first integer value.
pub fn characteristic_encoding(inst: &OvInstance) -> Result<Vec<BitVector>> {
    inst.validate()?;
    let d = inst.dimension;
    if d > 20 {
        return Err(Error::capacity(
            "characteristic encoding width",
            1u128 << d.min(127),
            1 << 20,
        ));
    }
    let mut out = Vec::with_capacity(inst.lists.len());
    for (i, list) in inst.lists.iter().enumerate() {
        let mut chi = BitVector::zeros(1 << d);
        for v in list {
            let idx = v.read_short(0, d) as usize;
            if chi.get(idx) {
                return Err(Error::structural(format!(
                    "dense OV list {i} contains duplicate vector {v:?}; \
                     the dense model works over sets"
                )));
            }
            chi.set(idx, true);
        }
        out.push(chi);
    }
    Ok(out)
}

/// Compute the parity of the worst-case OV solution count from an oracle
/// that answers uniform characteristic-encoded instances.
///
/// Encodes each list as a `2^d`-bit characteristic vector, draws one
/// uniform random encoding, and queries the oracle on all `2^k` ways of
/// substituting `r_i` or `r_i XOR chi_i` per list, XORing the answers. The
/// OV-parity function is linear in each list's characteristic vector over
/// GF(2), so the random parts cancel and the XOR equals the parity for the
/// original instance when the oracle answers correctly.
pub fn dense_ov_selfreduce<O: ParityOracle + ?Sized>(
    inst: &OvInstance,
    oracle: &mut O,
    rng: &mut Rng,
) -> Result<u8> {
    let chis = characteristic_encoding(inst)?;
    let k = chis.len();
    let block = 1usize << inst.dimension;
    if oracle.arity() != k * block {
        return Err(Error::argument(format!(
            "dense OV oracle arity {} does not match {k} lists of {block} bits",
            oracle.arity()
        )));
    }
    if k >= 24 {
        return Err(Error::capacity("dense OV sign patterns", 1u128 << k.min(127), 1 << 24));
    }
    let r: Vec<BitVector> = (0..k).map(|_| random_bitvector(block, rng)).collect();

    let mut acc = 0u8;
    for pattern in 0u32..1 << k {
        let blocks: Vec<BitVector> = (0..k)
            .map(|i| {
                if (pattern >> i) & 1 == 1 {
                    r[i].xor(&chis[i])
                } else {
                    r[i].clone()
                }
            })
            .collect();
        let refs: Vec<&BitVector> = blocks.iter().collect();
        let bit = oracle.query(&BitVector::concat(&refs))?;
        if bit > 1 {
            return Err(Error::Oracle(format!(
                "dense OV oracle returned {bit}, expected a bit"
            )));
        }
        acc ^= bit;
    }
    Ok(acc)
}

/// Exact parity oracle for characteristic-encoded dense OV instances:
/// decodes the `k * 2^d` input bits back into lists and answers the parity
/// of the solution count.
#[derive(Clone, Debug)]
pub struct DenseOvParityOracle {
    k: usize,
    dimension: usize,
}

impl DenseOvParityOracle {
    /// Oracle for `k` lists of vectors over `{0,1}^dimension`.
    pub fn new(k: usize, dimension: usize) -> Result<Self> {
        if k < 2 || dimension == 0 || dimension > 20 {
            return Err(Error::argument(
                "dense OV oracle needs k >= 2 and dimension in 1..=20",
            ));
        }
        Ok(DenseOvParityOracle { k, dimension })
    }
}

impl ParityOracle for DenseOvParityOracle {
    fn arity(&self) -> usize {
        self.k << self.dimension
    }

    fn query(&mut self, input: &BitVector) -> Result<u8> {
        let block = 1usize << self.dimension;
        let mut lists = Vec::with_capacity(self.k);
        for i in 0..self.k {
            let mut list = Vec::new();
            for value in 0..block {
                if input.get(i * block + value) {
                    list.push(BitVector::from_short(value as u32, self.dimension));
                }
            }
            lists.push(list);
        }
        let inst = OvInstance::new(lists, self.dimension)?;
        Ok(count_ov(&inst)?.parity())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factored::{polynomial_count, Predicate};
    use proptest::prelude::*;

    /// Test oracle evaluating a fixed function on every query.
    struct FnParity<F: FnMut(&BitVector) -> u8> {
        arity: usize,
        f: F,
    }

    impl<F: FnMut(&BitVector) -> u8> ParityOracle for FnParity<F> {
        fn arity(&self) -> usize {
            self.arity
        }
        fn query(&mut self, input: &BitVector) -> Result<u8> {
            Ok((self.f)(input))
        }
    }

    struct FnInteger<F: FnMut(&BitVector) -> i64> {
        arity: usize,
        f: F,
    }

    impl<F: FnMut(&BitVector) -> i64> IntegerOracle for FnInteger<F> {
        fn arity(&self) -> usize {
            self.arity
        }
        fn query(&mut self, input: &BitVector) -> Result<i64> {
            Ok((self.f)(input))
        }
    }

    fn factored_shape(k: usize, n: usize, g: usize, b: usize) -> FactoredShape {
        FactoredShape::new(k, n, g, b, Predicate::Xor).unwrap()
    }

    #[test]
    fn parity_correction_is_exact_for_a_linear_bit() {
        // P(v) = v_0: degree 1, every mask combination cancels in pairs.
        let spec = PolynomialSpec::new(4, 1, vec![0; 4], 1).unwrap();
        let mut oracle = FnParity {
            arity: 4,
            f: |v: &BitVector| v.get(0) as u8,
        };
        let mut rng = rng::from_seed(11);
        for code in 0u32..16 {
            let v = BitVector::from_short(code, 4);
            for _ in 0..4 {
                let got = correct_parity(&spec, &mut oracle, &v, &mut rng).unwrap();
                assert_eq!(got, v.get(0) as u8);
            }
        }
    }

    #[test]
    fn parity_correction_call_count() {
        let spec = PolynomialSpec::new(2, 3, vec![0, 1], 1).unwrap();
        let mut oracle = CountingOracle::new(FnParity {
            arity: 2,
            f: |_: &BitVector| 0,
        });
        let mut rng = rng::from_seed(12);
        correct_parity(&spec, &mut oracle, &BitVector::zeros(2), &mut rng).unwrap();
        assert_eq!(oracle.calls(), (1 << 4) - 1);
    }

    #[test]
    fn parity_correction_matches_factored_parity() {
        // k=2, g=1 gives a degree-2 counting polynomial over 16 indicator
        // bits; the exact oracle answers the polynomial parity on every
        // string, and correction must agree on random worst-case inputs.
        let shape = factored_shape(2, 4, 1, 1);
        assert_eq!(shape.bit_len(), 16);
        let spec = PolynomialSpec::for_factored(&shape).unwrap();
        let mut oracle = FactoredParityOracle::new(shape.clone()).unwrap();
        let mut rng = rng::from_seed(13);
        for _ in 0..200 {
            let v = random_bitvector(16, &mut rng);
            let enc = IndicatorEncoding::new(shape.clone(), v.clone()).unwrap();
            let want = polynomial_count(&enc, &shape).unwrap().parity();
            let got = correct_parity(&spec, &mut oracle, &v, &mut rng).unwrap();
            assert_eq!(got, want);
        }
    }

    #[test]
    fn masked_parity_queries_are_marginally_uniform() {
        // Record the first query of each invocation on a fixed input; each
        // bit must be an unbiased coin.
        let spec = PolynomialSpec::new(8, 2, vec![0, 0, 0, 0, 1, 1, 1, 1], 4).unwrap();
        let v = BitVector::ones(8);
        let mut counts = [0u32; 8];
        let mut rng = rng::from_seed(14);
        let draws = 10_000;
        for _ in 0..draws {
            let mut first: Option<BitVector> = None;
            let mut recorder = FnParity {
                arity: 8,
                f: |q: &BitVector| {
                    first.get_or_insert_with(|| q.clone());
                    0
                },
            };
            correct_parity(&spec, &mut recorder, &v, &mut rng).unwrap();
            let q = first.expect("at least one query was made");
            for (i, item) in counts.iter_mut().enumerate() {
                *item += q.get(i) as u32;
            }
        }
        for (i, &c) in counts.iter().enumerate() {
            let mean = c as f64 / draws as f64;
            assert!(
                (mean - 0.5).abs() <= 0.02,
                "query bit {i} has mean {mean}, expected 0.5 +- 0.02"
            );
        }
    }

    #[test]
    fn noisy_parity_correction_meets_the_union_bound() {
        // 7 queries at error rate 1/32: success probability must beat
        // 1 - 7/32 - 0.05.
        let shape = factored_shape(2, 1, 1, 1);
        let spec = PolynomialSpec::for_factored(&shape).unwrap();
        let exact = FactoredParityOracle::new(shape.clone()).unwrap();
        let mut noisy = NoisyOracle::new(exact, 1.0 / 32.0, 99).unwrap();
        let mut rng = rng::from_seed(15);
        let trials = 1000;
        let mut successes = 0;
        for _ in 0..trials {
            let v = random_bitvector(spec.n_bits, &mut rng);
            let enc = IndicatorEncoding::new(shape.clone(), v.clone()).unwrap();
            let want = polynomial_count(&enc, &shape).unwrap().parity();
            if correct_parity(&spec, &mut noisy, &v, &mut rng).unwrap() == want {
                successes += 1;
            }
        }
        let rate = successes as f64 / trials as f64;
        assert!(rate >= 1.0 - 7.0 / 32.0 - 0.05, "success rate {rate}");
    }

    #[test]
    fn integer_correction_tiny_sum_examples() {
        // f(v) = v_0 + v_1 with both variables in one partition: d=1, M=2,
        // so z=1 and answers come back mod 2.
        let spec = PolynomialSpec::new(2, 1, vec![0, 0], 2).unwrap();
        let mut oracle = FnInteger {
            arity: 2,
            f: |v: &BitVector| v.get(0) as i64 + v.get(1) as i64,
        };
        let mut rng = rng::from_seed(16);
        let v = BitVector::from_bools(&[true, true]);
        assert_eq!(correct_integer(&spec, &mut oracle, &v, &mut rng).unwrap(), 0);
        let v = BitVector::from_bools(&[true, false]);
        assert_eq!(correct_integer(&spec, &mut oracle, &v, &mut rng).unwrap(), 1);
    }

    #[test]
    fn integer_correction_handles_odd_degree_signs() {
        // Degree 1 with z=2: a sign slip in the recombination would return
        // 2^z - f instead of f.
        let spec = PolynomialSpec::new(3, 1, vec![0, 0, 0], 4).unwrap();
        let mut oracle = FnInteger {
            arity: 3,
            f: |v: &BitVector| (0..3).map(|i| v.get(i) as i64).sum(),
        };
        let mut rng = rng::from_seed(17);
        let v = BitVector::ones(3);
        for _ in 0..10 {
            assert_eq!(correct_integer(&spec, &mut oracle, &v, &mut rng).unwrap(), 3);
        }
    }

    #[test]
    fn integer_correction_call_count() {
        // d=2 with z=4 gives t=6 and (2t)^d = 144 calls.
        let spec = PolynomialSpec::new(2, 2, vec![0, 1], 16).unwrap();
        assert_eq!(spec.t(), 6);
        let mut oracle = CountingOracle::new(FnInteger {
            arity: 2,
            f: |v: &BitVector| (v.get(0) && v.get(1)) as i64,
        });
        let mut rng = rng::from_seed(18);
        correct_integer(&spec, &mut oracle, &BitVector::zeros(2), &mut rng).unwrap();
        assert_eq!(oracle.calls(), 144);
    }

    #[test]
    fn integer_correction_matches_factored_counts() {
        let shape = factored_shape(2, 2, 1, 1);
        let spec = PolynomialSpec::for_factored(&shape).unwrap();
        assert_eq!(spec.bound, 16);
        let z = spec.z();
        let mut oracle = FactoredCountOracle::new(shape.clone()).unwrap();
        let mut rng = rng::from_seed(19);
        for _ in 0..50 {
            let v = random_bitvector(spec.n_bits, &mut rng);
            let enc = IndicatorEncoding::new(shape.clone(), v.clone()).unwrap();
            let want = polynomial_count(&enc, &shape).unwrap();
            let got = correct_integer(&spec, &mut oracle, &v, &mut rng).unwrap();
            assert_eq!(
                got,
                want.0.to_u64().unwrap() % (1 << z),
                "count correction mismatch on {v:?}"
            );
        }
    }

    #[test]
    fn bit_slice_call_shapes() {
        // d=1, bound 1: t=1, a single call with weight 1.
        let spec = PolynomialSpec::new(2, 1, vec![0, 0], 1).unwrap();
        assert_eq!(spec.t(), 1);
        let mut oracle = CountingOracle::new(FnInteger {
            arity: 2,
            f: |v: &BitVector| v.get(0) as i64 + v.get(1) as i64,
        });
        let got = bit_slice_call(&mut oracle, &[1, 1], &spec).unwrap();
        assert_eq!(oracle.calls(), 1);
        assert_eq!(got, 0, "2 mod 2^1");

        // All-zero words: t^d calls, every query all-zeros.
        let spec = PolynomialSpec::new(2, 2, vec![0, 1], 16).unwrap();
        let mut seen = 0u32;
        let mut recorder = FnInteger {
            arity: 2,
            f: |q: &BitVector| {
                assert!(q.is_zero());
                seen += 1;
                0
            },
        };
        bit_slice_call(&mut recorder, &[0, 0], &spec).unwrap();
        assert_eq!(seen, 36, "t^d with t=6, d=2");
    }

    /// Direct product-form evaluation of the factored counting polynomial
    /// on integer words, mod 2^t — the independent route for checking the
    /// layered bit-slice evaluation.
    fn direct_word_eval(shape: &FactoredShape, words: &[u64], t: usize) -> u64 {
        let mask = (1u128 << t) - 1;
        let tuples: Vec<Vec<u32>> = {
            // Enumerate satisfying tuples once.
            let mut sat = Vec::new();
            let mut tuple = vec![0u32; shape.k];
            'outer: loop {
                if shape
                    .predicate
                    .satisfies(&tuple, shape.b)
                    .unwrap()
                {
                    sat.push(tuple.clone());
                }
                let mut pos = 0;
                loop {
                    if pos == shape.k {
                        break 'outer;
                    }
                    tuple[pos] += 1;
                    if tuple[pos] < 1 << shape.b {
                        break;
                    }
                    tuple[pos] = 0;
                    pos += 1;
                }
            }
            sat
        };
        let mut total: u128 = 0;
        let mut slots = vec![0usize; shape.k];
        'slots: loop {
            let mut product: u128 = 1;
            for j in 0..shape.g {
                let mut sum: u128 = 0;
                for tuple in &tuples {
                    let mut term: u128 = 1;
                    for (i, &w) in tuple.iter().enumerate() {
                        let idx = shape.index(i, slots[i], j, w);
                        term = (term * words[idx] as u128) & mask;
                    }
                    sum = (sum + term) & mask;
                }
                product = (product * sum) & mask;
            }
            total = (total + product) & mask;
            let mut pos = 0;
            loop {
                if pos == shape.k {
                    break 'slots;
                }
                slots[pos] += 1;
                if slots[pos] < shape.n {
                    break;
                }
                slots[pos] = 0;
                pos += 1;
            }
        }
        total as u64
    }

    #[test]
    fn bit_slice_call_equals_direct_word_evaluation() {
        let shape = factored_shape(2, 2, 1, 1);
        let spec = PolynomialSpec::for_factored(&shape).unwrap();
        let t = spec.t();
        let mut oracle = FactoredCountOracle::new(shape.clone()).unwrap();
        let mut rng = rng::from_seed(20);
        for _ in 0..20 {
            let words: Vec<u64> = (0..spec.n_bits)
                .map(|_| rng.gen::<u64>() & ((1 << t) - 1))
                .collect();
            let got = bit_slice_call(&mut oracle, &words, &spec).unwrap();
            let want = direct_word_eval(&shape, &words, t);
            assert_eq!(got, want);
        }
    }

    #[test]
    fn amplification_votes_out_noise() {
        // r = 1 is a passthrough.
        let mut rng = rng::from_seed(21);
        let got = amplify(1, &mut rng, |_| Ok(7u8)).unwrap();
        assert_eq!(got, 7);

        // An exact procedure is unchanged by voting.
        let got = amplify(9, &mut rng, |_| Ok(1u8)).unwrap();
        assert_eq!(got, 1);

        // A single noisy call at error 0.3 amplified 31 ways succeeds almost
        // always.
        let mut successes = 0;
        for trial in 0..500 {
            let mut trial_rng = rng::from_seed(1000 + trial);
            let got = amplify(31, &mut trial_rng, |sub| {
                Ok(if sub.gen_bool(0.3) { 0u8 } else { 1u8 })
            })
            .unwrap();
            if got == 1 {
                successes += 1;
            }
        }
        assert!(
            successes >= 475,
            "amplified success {successes}/500, expected at least 475"
        );
    }

    #[test]
    fn amplify_rejects_zero_repetitions() {
        let mut rng = rng::from_seed(22);
        assert!(amplify(0, &mut rng, |_| Ok(0u8)).is_err());
    }

    #[test]
    fn dense_selfreduction_single_pair() {
        let inst = OvInstance::new(
            vec![
                vec![BitVector::from_str01("00").unwrap()],
                vec![BitVector::from_str01("11").unwrap()],
            ],
            2,
        )
        .unwrap();
        let mut oracle = CountingOracle::new(DenseOvParityOracle::new(2, 2).unwrap());
        let mut rng = rng::from_seed(23);
        assert_eq!(dense_ov_selfreduce(&inst, &mut oracle, &mut rng).unwrap(), 1);
        assert_eq!(oracle.calls(), 4, "2^k instances for k=2");
    }

    #[test]
    fn dense_selfreduction_rejects_duplicates() {
        let v = BitVector::from_str01("01").unwrap();
        let inst = OvInstance::new(
            vec![vec![v.clone(), v], vec![BitVector::from_str01("10").unwrap()]],
            2,
        )
        .unwrap();
        let mut oracle = DenseOvParityOracle::new(2, 2).unwrap();
        let mut rng = rng::from_seed(24);
        let err = dense_ov_selfreduce(&inst, &mut oracle, &mut rng).unwrap_err();
        assert!(matches!(err, Error::Structural(_)));
    }

    #[test]
    fn dense_selfreduction_matches_count_parity() {
        let mut rng = rng::from_seed(25);
        for trial in 0..100 {
            let d = 1 + (trial % 3);
            let mut lists = Vec::new();
            for _ in 0..2 {
                let mut list = Vec::new();
                for value in 0..1u32 << d {
                    if rng.gen_bool(0.5) {
                        list.push(BitVector::from_short(value, d));
                    }
                }
                lists.push(list);
            }
            let inst = OvInstance::new(lists, d).unwrap();
            let want = count_ov(&inst).unwrap().parity();
            let mut oracle = DenseOvParityOracle::new(2, d).unwrap();
            let got = dense_ov_selfreduce(&inst, &mut oracle, &mut rng).unwrap();
            assert_eq!(got, want, "trial {trial} dimension {d}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn parity_correction_agrees_with_polynomial_parity(
            seed in any::<u64>(),
            n in 1usize..=2,
            g in 1usize..=2,
        ) {
            let shape = factored_shape(2, n, g, 1);
            let spec = PolynomialSpec::for_factored(&shape).unwrap();
            let mut oracle = FactoredParityOracle::new(shape.clone()).unwrap();
            let mut rng = rng::from_seed(seed);
            let v = random_bitvector(spec.n_bits, &mut rng);
            let enc = IndicatorEncoding::new(shape.clone(), v.clone()).unwrap();
            let want = polynomial_count(&enc, &shape).unwrap().parity();
            prop_assert_eq!(correct_parity(&spec, &mut oracle, &v, &mut rng).unwrap(), want);
        }

        #[test]
        fn integer_correction_agrees_with_polynomial_count(
            seed in any::<u64>(),
            n in 1usize..=2,
        ) {
            let shape = factored_shape(2, n, 1, 1);
            let spec = PolynomialSpec::for_factored(&shape).unwrap();
            let z = spec.z();
            let mut oracle = FactoredCountOracle::new(shape.clone()).unwrap();
            let mut rng = rng::from_seed(seed);
            let v = random_bitvector(spec.n_bits, &mut rng);
            let enc = IndicatorEncoding::new(shape.clone(), v.clone()).unwrap();
            let want = polynomial_count(&enc, &shape).unwrap().0.to_u64().unwrap() % (1u64 << z);
            prop_assert_eq!(correct_integer(&spec, &mut oracle, &v, &mut rng).unwrap(), want);
        }
    }
}
