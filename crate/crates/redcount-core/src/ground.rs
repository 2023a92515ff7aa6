//! Factored-to-unfactored reductions: expand each factored vector's `g`
//! sets into `g` plain lists, with label gadgets enforcing that the chosen
//! strings all originate in the same factored vector.
//!
//! An input with `k` lists of `n` factored vectors becomes an instance with
//! `k*g` lists, one per (original list `j`, set position `i`), holding one
//! output vector per (factored vector, member string). Each output vector
//! carries the chosen string in a per-position data block, plus its factored
//! vector's label in a chained-equality check region: check slot `c` of
//! partition `j` combines the labels written by the position-`c` and
//! position-`c+1` vectors and is neutral exactly when they agree, so a
//! solution must pick all `g` strings from one factored vector per list.
//! Counts are preserved exactly under this bijection.
//!
//! Labels are fixed-width binary codes, so list lengths must be powers of
//! two ([`crate::pipeline`]'s samplers pad with empty-set vectors, which
//! contribute zero count). For XOR the check slots hold the *plain* label
//! code on both sides (two equal codes XOR to zero; a complemented side
//! would invert the equality test), for OV the complement-pair codes, and
//! for SUM a telescoping chain of label multiples separates labels and data
//! into disjoint big-integer digit ranges.
//!
//! The [`mutated`] submodule exposes deliberately wrong variants (one gadget
//! constant flipped each) so the verification harness can demonstrate that
//! the differential tests actually constrain these constructions.

use num_bigint::BigInt;

use crate::bits::BitVector;
use crate::error::{Error, Result};
use crate::factored::{FactoredInstance, Predicate};
use crate::instances::{OvInstance, SumInstance, XorInstance};

/// Cap on output vectors (`k * g` lists times `n * 2^b` vectors each).
const MAX_OUTPUT_VECTORS: u128 = 10_000_000;

/// Fixed-width binary label codes for list indices, plus the complement-pair
/// gadget used by the OV grounding.
///
/// `nu(l)` is the `lg n`-bit binary code of `l`; two codes XOR to zero iff
/// the labels are equal. `lambda(l) = complement(nu(l)) . nu(l)` and
/// `lambda_bar(l) = nu(l) . complement(nu(l))`; the AND of `lambda(l)` and
/// `lambda_bar(l')` is all-zeros iff `l == l'`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelCodec {
    n_labels: usize,
    width: usize,
}

impl LabelCodec {
    /// Codec for `n` labels; `n` must be a power of two.
    pub fn new(n_labels: usize) -> Result<Self> {
        if n_labels == 0 || !n_labels.is_power_of_two() {
            return Err(Error::argument(format!(
                "label count must be a power of two, got {n_labels}"
            )));
        }
        Ok(LabelCodec {
            n_labels,
            width: n_labels.trailing_zeros() as usize,
        })
    }

    /// Number of labels.
    pub fn n_labels(&self) -> usize {
        self.n_labels
    }

    /// Code width `lg n` (zero when there is a single label).
    pub fn width(&self) -> usize {
        self.width
    }

    /// The binary code of a label.
    pub fn nu(&self, label: usize) -> u32 {
        debug_assert!(label < self.n_labels);
        label as u32
    }

    /// The complemented code within `width` bits.
    pub fn nu_bar(&self, label: usize) -> u32 {
        !self.nu(label) & ((1u32 << self.width) - 1)
    }

    /// `lambda(l) = complement(nu(l)) . nu(l)`, width `2 * width`.
    pub fn lambda(&self, label: usize) -> u32 {
        (self.nu_bar(label) << self.width) | self.nu(label)
    }

    /// `lambda_bar(l) = nu(l) . complement(nu(l))`, width `2 * width`.
    pub fn lambda_bar(&self, label: usize) -> u32 {
        (self.nu(label) << self.width) | self.nu_bar(label)
    }
}

fn grounding_shape(inst: &FactoredInstance, expect: &Predicate) -> Result<(usize, usize, LabelCodec)> {
    inst.validate()?;
    if inst.predicate != *expect {
        return Err(Error::argument(format!(
            "grounding target expects a {} instance, got {}",
            expect.tag(),
            inst.predicate.tag()
        )));
    }
    let n = inst.uniform_n()?;
    let codec = LabelCodec::new(n)?;
    let vectors: u128 = (inst.k() as u128)
        * (inst.g as u128)
        * (n as u128)
        * (1u128 << inst.b.min(127));
    if vectors > MAX_OUTPUT_VECTORS {
        return Err(Error::capacity("grounding output", vectors, MAX_OUTPUT_VECTORS));
    }
    Ok((inst.k(), n, codec))
}

fn ground_xor_impl(inst: &FactoredInstance, complement_check: bool) -> Result<XorInstance> {
    let (k, _n, codec) = grounding_shape(inst, &Predicate::Xor)?;
    let g = inst.g;
    let b = inst.b;
    let w = codec.width();
    let check_len = k * (g - 1) * w;
    let dim = b * g + check_len;

    let mut lists = Vec::with_capacity(k * g);
    for j in 0..k {
        for i in 0..g {
            let mut list = Vec::new();
            for (label, v) in inst.lists[j].iter().enumerate() {
                for &s in v.set(i) {
                    let mut vec = BitVector::zeros(dim);
                    let own = j * (g - 1) * w;
                    // Chained label equality: slot c combines positions c
                    // and c+1.
                    if i + 1 < g {
                        vec.write_short(own + i * w, codec.nu(label), w);
                    }
                    if i >= 1 {
                        let code = if complement_check {
                            codec.nu_bar(label)
                        } else {
                            codec.nu(label)
                        };
                        vec.write_short(own + (i - 1) * w, code, w);
                    }
                    vec.write_short(check_len + i * b, s, b);
                    list.push(vec);
                }
            }
            lists.push(list);
        }
    }
    XorInstance::new(lists, dim)
}

/// Ground a factored XOR instance into a plain `k*g`-list XOR instance.
///
/// `count_xor` of the output equals `count_factored` of the input. Output
/// dimension is `b*g + k*(g-1)*lg n`; each output list has at most `n * 2^b`
/// vectors.
pub fn ground_xor(inst: &FactoredInstance) -> Result<XorInstance> {
    ground_xor_impl(inst, false)
}

fn ground_ov_impl(inst: &FactoredInstance, zero_filler: bool) -> Result<OvInstance> {
    let (k, _n, codec) = grounding_shape(inst, &Predicate::Ov)?;
    let g = inst.g;
    let b = inst.b;
    let w2 = 2 * codec.width();
    let check_len = k * (g - 1) * w2;
    let dim = b * g + check_len;

    let mut lists = Vec::with_capacity(k * g);
    for j in 0..k {
        for i in 0..g {
            let mut list = Vec::new();
            for (label, v) in inst.lists[j].iter().enumerate() {
                for &s in v.set(i) {
                    // All-ones filler: AND-neutral everywhere the vector
                    // makes no statement.
                    let mut vec = if zero_filler {
                        BitVector::zeros(dim)
                    } else {
                        BitVector::ones(dim)
                    };
                    let own = j * (g - 1) * w2;
                    if i + 1 < g {
                        vec.write_short(own + i * w2, codec.lambda(label), w2);
                    }
                    if i >= 1 {
                        vec.write_short(own + (i - 1) * w2, codec.lambda_bar(label), w2);
                    }
                    vec.write_short(check_len + i * b, s, b);
                    list.push(vec);
                }
            }
            lists.push(list);
        }
    }
    OvInstance::new(lists, dim)
}

/// Ground a factored OV instance into a plain `k*g`-list OV instance.
///
/// `count_ov` of the output equals `count_factored` of the input. Labels use
/// the complement-pair gadget, and all filler is ones, so only a vector's
/// own check slots and data block constrain the AND. Output dimension is
/// `b*g + 2*k*(g-1)*lg n`.
pub fn ground_ov(inst: &FactoredInstance) -> Result<OvInstance> {
    ground_ov_impl(inst, false)
}

fn ground_sum_impl(inst: &FactoredInstance, drop_sign: bool) -> Result<SumInstance> {
    let (k, n, _codec) = grounding_shape(inst, &Predicate::Sum)?;
    if !k.is_power_of_two() {
        return Err(Error::argument(format!(
            "SUM grounding needs a power-of-two list count, got {k}"
        )));
    }
    let g = inst.g;
    let b = inst.b;
    let lg_k = k.trailing_zeros() as usize;
    let lg_n = n.trailing_zeros() as usize;

    // X separates the g data digits, Y the labels within a chain, Z the
    // chains of different original lists.
    let x = BigInt::from(1) << (b + lg_k);
    let y = BigInt::from(1) << (lg_n + lg_k);
    let z = y.pow((g - 1) as u32);
    let x_to_g = x.pow(g as u32);

    let mut lists = Vec::with_capacity(k * g);
    for j in 0..k {
        for i in 0..g {
            let mut list = Vec::new();
            let chain = &x_to_g * z.pow(j as u32);
            for (label, v) in inst.lists[j].iter().enumerate() {
                // Telescoping label chain: position 0 adds l, position i
                // swaps Y^(i-1) l for Y^i l, the last removes Y^(g-2) l, so
                // the terms cancel exactly when all g labels agree.
                let label_term: BigInt = if g == 1 {
                    BigInt::from(0)
                } else if i == 0 {
                    &chain * label
                } else if i + 1 < g {
                    &chain * ((y.pow(i as u32) - y.pow(i as u32 - 1)) * label)
                } else {
                    let sign = if drop_sign { 1 } else { -1 };
                    &chain * (y.pow(i as u32 - 1) * label * sign)
                };
                for &s in v.set(i) {
                    let nu = crate::bits::signed_value(s, b);
                    list.push(&label_term + x.pow(i as u32) * nu);
                }
            }
            lists.push(list);
        }
    }
    SumInstance::new(lists)
}

/// Ground a factored SUM instance into a plain `k*g`-list SUM instance.
///
/// `count_sum` of the output equals `count_factored` of the input. Data
/// contributions live in base-`X` digits (`X = 2^(b + lg k)`, large enough
/// that `k` string values cannot carry), label chains in base-`Y` digits
/// above them; a tuple sums to zero exactly when every digit does, i.e.
/// when labels match per list and the strings sum to zero per position.
/// Requires `n` and `k` to be powers of two.
pub fn ground_sum(inst: &FactoredInstance) -> Result<SumInstance> {
    ground_sum_impl(inst, false)
}

/// Deliberately broken gadget variants for mutation testing.
///
/// Each function flips exactly one design constant of its honest
/// counterpart. They exist so the verification harness can demonstrate that
/// count-preservation checks would catch such a mistake; nothing else in the
/// crate calls them.
pub mod mutated {
    use super::*;

    /// [`ground_xor`] with the second check-slot write complemented — the
    /// label equality test becomes an inequality test.
    pub fn ground_xor_complemented_check(inst: &FactoredInstance) -> Result<XorInstance> {
        ground_xor_impl(inst, true)
    }

    /// [`ground_ov`] with all-zeros filler instead of all-ones — vectors
    /// stop constraining their own slots only.
    pub fn ground_ov_zero_filler(inst: &FactoredInstance) -> Result<OvInstance> {
        ground_ov_impl(inst, true)
    }

    /// [`ground_sum`] with the closing chain term's sign dropped — the
    /// telescoping no longer cancels.
    pub fn ground_sum_unsigned_close(inst: &FactoredInstance) -> Result<SumInstance> {
        ground_sum_impl(inst, true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::BitVector;
    use crate::factored::{
        count_factored, decode_bits, sample_uniform_factored, FactoredShape,
    };
    use crate::instances::{count_ov, count_sum, count_xor, BigCount};
    use crate::rng;
    use proptest::prelude::*;

    #[test]
    fn label_codec_complement_pairs_test_equality() {
        let codec = LabelCodec::new(4).unwrap();
        for l in 0..4 {
            for l2 in 0..4 {
                let and = codec.lambda(l) & codec.lambda_bar(l2);
                assert_eq!(and == 0, l == l2, "l={l} l2={l2}");
            }
        }
        assert!(LabelCodec::new(3).is_err());
        assert_eq!(LabelCodec::new(1).unwrap().width(), 0);
    }

    fn shape(k: usize, n: usize, g: usize, b: usize, p: Predicate) -> FactoredShape {
        FactoredShape::new(k, n, g, b, p).unwrap()
    }

    #[test]
    fn ground_xor_shape_example() {
        let mut rng = rng::from_seed(3);
        let inst = sample_uniform_factored(2, 2, 2, 1, Predicate::Xor, &mut rng).unwrap();
        let out = ground_xor(&inst).unwrap();
        assert_eq!(out.lists.len(), 4);
        assert_eq!(out.dimension, 2 + 2);
        for list in &out.lists {
            assert!(list.len() <= 2 * 2, "per-list budget n * 2^b");
        }
        assert_eq!(
            count_xor(&out).unwrap(),
            count_factored(&inst).unwrap()
        );
    }

    #[test]
    fn ground_ov_shape_example() {
        let mut rng = rng::from_seed(4);
        let inst = sample_uniform_factored(2, 2, 2, 1, Predicate::Ov, &mut rng).unwrap();
        let out = ground_ov(&inst).unwrap();
        assert_eq!(out.lists.len(), 4);
        assert_eq!(out.dimension, 2 + (2 * 2));
        assert_eq!(count_ov(&out).unwrap(), count_factored(&inst).unwrap());
    }

    #[test]
    fn ground_sum_telescoping_and_base() {
        // X = 2^(b + lg k): b=1, k=2 gives 4.
        let mut rng = rng::from_seed(5);
        let inst = sample_uniform_factored(2, 2, 3, 1, Predicate::Sum, &mut rng).unwrap();
        let out = ground_sum(&inst).unwrap();
        assert_eq!(out.lists.len(), 6);
        assert_eq!(count_sum(&out).unwrap(), count_factored(&inst).unwrap());

        // Telescoping: for a fixed label, the label terms across the g
        // positions of one chain cancel. Extract them by grounding an
        // instance whose strings all have nu = 0.
        let v = crate::factored::FactoredVector::new(1, vec![vec![0u32]; 3]).unwrap();
        let fixed = FactoredInstance::new(vec![vec![v.clone(), v.clone()], vec![v.clone(), v]], 1, 3, Predicate::Sum)
            .unwrap();
        let grounded = ground_sum(&fixed).unwrap();
        // Vector index 1 in each position-list of chain j=0 has label 1.
        let total: BigInt = (0..3).map(|i| grounded.lists[i][1].clone()).sum();
        assert_eq!(total, BigInt::from(0));
    }

    #[test]
    fn check_region_is_neutral_outside_own_partition() {
        let mut rng = rng::from_seed(6);
        let inst = sample_uniform_factored(2, 2, 2, 1, Predicate::Xor, &mut rng).unwrap();
        let out = ground_xor(&inst).unwrap();
        let w = 1; // lg 2
        let g = 2;
        let check_len = 2 * (g - 1) * w;
        for (li, list) in out.lists.iter().enumerate() {
            let j = li / g;
            for v in list {
                for c in 0..check_len {
                    if c / ((g - 1) * w) != j {
                        assert!(!v.get(c), "check bit {c} outside partition {j} must be 0");
                    }
                }
            }
        }

        let inst = sample_uniform_factored(2, 2, 2, 1, Predicate::Ov, &mut rng).unwrap();
        let out = ground_ov(&inst).unwrap();
        let check_len = 2 * (g - 1) * 2 * w;
        for (li, list) in out.lists.iter().enumerate() {
            let j = li / g;
            for v in list {
                for c in 0..check_len {
                    if c / ((g - 1) * 2 * w) != j {
                        assert!(v.get(c), "check bit {c} outside partition {j} must be 1");
                    }
                }
            }
        }
    }

    #[test]
    fn exhaustive_tiny_encodings_preserve_counts() {
        // g=1 over all 256 encodings for each predicate, and g=2 over all
        // 65536 encodings for XOR (the layout with a design decision in it).
        for (predicate, g) in [
            (Predicate::Xor, 1usize),
            (Predicate::Ov, 1),
            (Predicate::Sum, 1),
            (Predicate::Xor, 2),
        ] {
            let shape = shape(2, 2, g, 1, predicate.clone());
            let len = shape.bit_len();
            for code in 0u32..1 << len {
                let bits = BitVector::from_bools(
                    &(0..len).map(|i| (code >> i) & 1 == 1).collect::<Vec<_>>(),
                );
                let inst = decode_bits(&bits, &shape).unwrap();
                let want = count_factored(&inst).unwrap();
                let got = match predicate {
                    Predicate::Xor => count_xor(&ground_xor(&inst).unwrap()).unwrap(),
                    Predicate::Ov => count_ov(&ground_ov(&inst).unwrap()).unwrap(),
                    Predicate::Sum => count_sum(&ground_sum(&inst).unwrap()).unwrap(),
                    Predicate::Custom(_) => unreachable!(),
                };
                assert_eq!(got, want, "encoding {code:#x} g={g} {}", predicate.tag());
            }
        }
    }

    #[test]
    fn grounding_rejects_mismatched_predicates_and_ragged_lists() {
        let mut rng = rng::from_seed(7);
        let inst = sample_uniform_factored(2, 2, 1, 1, Predicate::Ov, &mut rng).unwrap();
        assert!(ground_xor(&inst).is_err());

        let mut ragged = sample_uniform_factored(2, 2, 1, 1, Predicate::Xor, &mut rng).unwrap();
        ragged.lists[0].pop();
        assert!(ground_xor(&ragged).is_err());

        let odd = sample_uniform_factored(2, 3, 1, 1, Predicate::Xor, &mut rng).unwrap();
        assert!(ground_xor(&odd).is_err());
    }

    #[test]
    fn mutated_gadgets_are_detected_by_counting() {
        // Each mutation must produce a count mismatch on some small random
        // instance — this is the sensitivity check the acceptance harness
        // repeats at scale.
        let mut rng = rng::from_seed(8);
        let mut xor_caught = false;
        let mut ov_caught = false;
        let mut sum_caught = false;
        for _ in 0..200 {
            let inst = sample_uniform_factored(2, 2, 2, 1, Predicate::Xor, &mut rng).unwrap();
            let want = count_factored(&inst).unwrap();
            if count_xor(&mutated::ground_xor_complemented_check(&inst).unwrap()).unwrap() != want {
                xor_caught = true;
            }
            let inst = sample_uniform_factored(2, 2, 2, 1, Predicate::Ov, &mut rng).unwrap();
            let want = count_factored(&inst).unwrap();
            if count_ov(&mutated::ground_ov_zero_filler(&inst).unwrap()).unwrap() != want {
                ov_caught = true;
            }
            let inst = sample_uniform_factored(2, 2, 2, 1, Predicate::Sum, &mut rng).unwrap();
            let want = count_factored(&inst).unwrap();
            if count_sum(&mutated::ground_sum_unsigned_close(&inst).unwrap()).unwrap() != want {
                sum_caught = true;
            }
            if xor_caught && ov_caught && sum_caught {
                break;
            }
        }
        assert!(xor_caught, "complemented XOR check never detected");
        assert!(ov_caught, "zero-filler OV never detected");
        assert!(sum_caught, "unsigned SUM close never detected");
    }

    fn arb_grounding_case(
        predicate: fn() -> Predicate,
    ) -> impl Strategy<Value = FactoredInstance> {
        (
            prop_oneof![Just(2usize), Just(4usize)],
            1usize..=2,
            prop_oneof![Just(1usize), Just(2usize)],
            any::<u64>(),
        )
            .prop_map(move |(n, g, b, seed)| {
                sample_uniform_factored(2, n, g, b, predicate(), &mut rng::from_seed(seed))
                    .unwrap()
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn ground_xor_preserves_counts(inst in arb_grounding_case(|| Predicate::Xor)) {
            let out = ground_xor(&inst).unwrap();
            prop_assert_eq!(
                count_xor(&out).unwrap(),
                count_factored(&inst).unwrap()
            );
            let n = inst.lists[0].len();
            for list in &out.lists {
                prop_assert!(list.len() <= n << inst.b);
            }
        }

        #[test]
        fn ground_ov_preserves_counts(inst in arb_grounding_case(|| Predicate::Ov)) {
            let out = ground_ov(&inst).unwrap();
            prop_assert_eq!(
                count_ov(&out).unwrap(),
                count_factored(&inst).unwrap()
            );
        }

        #[test]
        fn ground_sum_preserves_counts(inst in arb_grounding_case(|| Predicate::Sum)) {
            let out = ground_sum(&inst).unwrap();
            prop_assert_eq!(
                count_sum(&out).unwrap(),
                count_factored(&inst).unwrap()
            );
        }

        #[test]
        fn grounded_solution_counts_stay_nonnegative_and_bounded(
            inst in arb_grounding_case(|| Predicate::Xor)
        ) {
            // The grounded count can never exceed the product of list sizes.
            let out = ground_xor(&inst).unwrap();
            let bound: u64 = out.lists.iter().map(|l| l.len() as u64).product();
            prop_assert!(count_xor(&out).unwrap() <= BigCount::from_u64(bound));
        }
    }
}
