//! Unfactored-to-factored reductions: split each vector or number into `g`
//! blocks of `b` bits, producing factored vectors whose sets are singletons.
//!
//! For OV and XOR the split is exact: a k-tuple is a solution iff every
//! block position is satisfied independently, so the factored count equals
//! the plain count. For SUM the split yields *blockwise* semantics — every
//! `b`-bit block (read as two's complement) must sum to zero over the
//! integers on its own, with no carries between blocks. Blockwise k-SUM is
//! its own problem with its own brute-force oracle; carry enumeration is
//! deliberately out of scope.

use num_traits::ToPrimitive;

use crate::bits::{encode_signed, MAX_SHORT_BITS};
use crate::error::{Error, Result};
use crate::factored::{FactoredInstance, FactoredVector, Predicate};
use crate::instances::{BigCount, OvInstance, SumInstance, XorInstance};

fn check_split(d: usize, b: usize, g: usize) -> Result<()> {
    if b == 0 || b > MAX_SHORT_BITS || g == 0 {
        return Err(Error::argument(format!(
            "block split needs 1 <= b <= {MAX_SHORT_BITS} and g >= 1, got b={b} g={g}"
        )));
    }
    if b * g != d {
        return Err(Error::argument(format!(
            "block split b*g = {}*{} does not match dimension {d}",
            b, g
        )));
    }
    Ok(())
}

fn split_vector_lists(
    lists: &[Vec<crate::bits::BitVector>],
    b: usize,
    g: usize,
) -> Result<Vec<Vec<FactoredVector>>> {
    lists
        .iter()
        .map(|list| {
            list.iter()
                .map(|v| {
                    let sets = (0..g).map(|j| vec![v.read_short(j * b, b)]).collect();
                    FactoredVector::new(b, sets)
                })
                .collect()
        })
        .collect()
}

/// Factor an OV instance into `g` singleton sets of `b` bits per vector.
///
/// Requires `b * g` = the instance dimension; the factored count equals
/// `count_ov` exactly (orthogonality is checked blockwise anyway).
pub fn factor_ov(inst: &OvInstance, b: usize, g: usize) -> Result<FactoredInstance> {
    inst.validate()?;
    check_split(inst.dimension, b, g)?;
    FactoredInstance::new(split_vector_lists(&inst.lists, b, g)?, b, g, Predicate::Ov)
}

/// Factor a XOR instance into `g` singleton sets of `b` bits per vector.
pub fn factor_xor(inst: &XorInstance, b: usize, g: usize) -> Result<FactoredInstance> {
    inst.validate()?;
    check_split(inst.dimension, b, g)?;
    FactoredInstance::new(split_vector_lists(&inst.lists, b, g)?, b, g, Predicate::Xor)
}

/// Factor a SUM instance under blockwise semantics.
///
/// Each value is encoded as a `b*g`-bit two's-complement word and split into
/// `g` blocks of `b` bits; the factored count equals the number of k-tuples
/// in which every block position sums to zero over the integers *with no
/// inter-block carries*. Values outside the `b*g`-bit range are rejected.
pub fn factor_sum_blockwise(inst: &SumInstance, b: usize, g: usize) -> Result<FactoredInstance> {
    inst.validate()?;
    let width = b.saturating_mul(g);
    check_split(width, b, g)?;
    let lists = inst
        .lists
        .iter()
        .map(|list| {
            list.iter()
                .map(|value| {
                    let v = value.to_i64().ok_or_else(|| {
                        Error::argument(format!("value {value} does not fit in {width} bits"))
                    })?;
                    let word = encode_signed(v, width)?;
                    let sets = (0..g)
                        .map(|j| vec![(word >> ((g - 1 - j) * b)) & ((1 << b) - 1)])
                        .collect();
                    FactoredVector::new(b, sets)
                })
                .collect()
        })
        .collect::<Result<Vec<Vec<FactoredVector>>>>()?;
    FactoredInstance::new(lists, b, g, Predicate::Sum)
}

/// Exact blockwise k-SUM count, the reference semantics for
/// [`factor_sum_blockwise`]: a tuple counts when every `b`-bit block of the
/// `b*g`-bit two's-complement encodings sums to zero over the integers.
pub fn count_blockwise_sum(inst: &SumInstance, b: usize, g: usize) -> Result<BigCount> {
    inst.validate()?;
    let factored = factor_sum_blockwise(inst, b, g)?;
    crate::factored::count_factored(&factored)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::{signed_value, BitVector};
    use crate::factored::count_factored;
    use crate::instances::{count_ov, count_xor};
    use proptest::prelude::*;

    fn bv(s: &str) -> BitVector {
        BitVector::from_str01(s).unwrap()
    }

    #[test]
    fn factor_ov_splits_into_singletons() {
        let inst = OvInstance::new(vec![vec![bv("1010")], vec![bv("0101")]], 4).unwrap();
        let out = factor_ov(&inst, 2, 2).unwrap();
        assert_eq!(out.lists[0][0].sets(), &[vec![0b10], vec![0b10]]);
        assert_eq!(out.lists[1][0].sets(), &[vec![0b01], vec![0b01]]);
        assert!(out
            .lists
            .iter()
            .flatten()
            .all(|v| v.sets().iter().all(|s| s.len() == 1)));
    }

    #[test]
    fn factor_ov_preserves_a_unit_count() {
        let inst = OvInstance::new(vec![vec![bv("01")], vec![bv("10")]], 2).unwrap();
        assert_eq!(count_ov(&inst).unwrap(), BigCount::one());
        let out = factor_ov(&inst, 1, 2).unwrap();
        assert_eq!(count_factored(&out).unwrap(), BigCount::one());
    }

    #[test]
    fn factor_rejects_bad_splits() {
        let inst = OvInstance::new(vec![vec![bv("101")], vec![bv("010")]], 3).unwrap();
        assert!(factor_ov(&inst, 2, 2).is_err());
        assert!(factor_ov(&inst, 0, 3).is_err());
    }

    #[test]
    fn factor_sum_blockwise_examples() {
        // 1 and -1 in 2-bit blocks: "01" and "11".
        let inst = SumInstance::from_i64(&[vec![1], vec![-1]]).unwrap();
        let out = factor_sum_blockwise(&inst, 2, 1).unwrap();
        assert_eq!(out.lists[0][0].sets(), &[vec![0b01]]);
        assert_eq!(out.lists[1][0].sets(), &[vec![0b11]]);
        assert_eq!(count_factored(&out).unwrap(), BigCount::one());

        let inst = SumInstance::from_i64(&[vec![2, -2], vec![-2, 2]]).unwrap();
        let out = factor_sum_blockwise(&inst, 3, 1).unwrap();
        assert_eq!(count_factored(&out).unwrap(), BigCount::from_u64(2));

        // 100 does not fit in 2 bits.
        let inst = SumInstance::from_i64(&[vec![100], vec![0]]).unwrap();
        assert!(factor_sum_blockwise(&inst, 2, 1).is_err());
    }

    /// Independent blockwise oracle: tuples of encoded words where every
    /// block's signed values sum to zero.
    fn naive_blockwise(inst: &SumInstance, b: usize, g: usize) -> u64 {
        fn tuples(lists: &[Vec<i64>]) -> Vec<Vec<i64>> {
            let mut out = vec![vec![]];
            for list in lists {
                let mut next = Vec::new();
                for prefix in &out {
                    for &item in list {
                        let mut t = prefix.clone();
                        t.push(item);
                        next.push(t);
                    }
                }
                out = next;
            }
            if lists.iter().any(|l| l.is_empty()) {
                vec![]
            } else {
                out
            }
        }
        let as_i64: Vec<Vec<i64>> = inst
            .lists
            .iter()
            .map(|l| l.iter().map(|v| v.to_i64().unwrap()).collect())
            .collect();
        tuples(&as_i64)
            .iter()
            .filter(|t| {
                (0..g).all(|j| {
                    t.iter()
                        .map(|&v| {
                            let word = encode_signed(v, b * g).unwrap();
                            signed_value((word >> ((g - 1 - j) * b)) & ((1 << b) - 1), b)
                        })
                        .sum::<i64>()
                        == 0
                })
            })
            .count() as u64
    }

    fn vector_instance_strategy(
    ) -> impl Strategy<Value = (Vec<Vec<BitVector>>, usize)> {
        (2usize..=3, 1usize..=6).prop_flat_map(|(k, d)| {
            let list = proptest::collection::vec(
                proptest::collection::vec(any::<bool>(), d).prop_map(|b| BitVector::from_bools(&b)),
                1..=4,
            );
            (proptest::collection::vec(list, k), Just(d))
        })
    }

    fn factorizations(d: usize) -> Vec<(usize, usize)> {
        (1..=d).filter(|b| d.is_multiple_of(*b)).map(|b| (b, d / b)).collect()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn factor_ov_preserves_counts_for_all_splits(
            (lists, d) in vector_instance_strategy()
        ) {
            let inst = OvInstance::new(lists, d).unwrap();
            let want = count_ov(&inst).unwrap();
            for (b, g) in factorizations(d) {
                let out = factor_ov(&inst, b, g).unwrap();
                prop_assert_eq!(count_factored(&out).unwrap(), want.clone(), "b={} g={}", b, g);
            }
        }

        #[test]
        fn factor_xor_preserves_counts_for_all_splits(
            (lists, d) in vector_instance_strategy()
        ) {
            let inst = XorInstance::new(lists, d).unwrap();
            let want = count_xor(&inst).unwrap();
            for (b, g) in factorizations(d) {
                let out = factor_xor(&inst, b, g).unwrap();
                prop_assert_eq!(count_factored(&out).unwrap(), want.clone(), "b={} g={}", b, g);
            }
        }

        #[test]
        fn blockwise_sum_matches_naive_oracle(
            lists in proptest::collection::vec(
                proptest::collection::vec(-8i64..=7, 1..=4), 2..=3
            ),
            (b, g) in prop_oneof![Just((4usize, 1usize)), Just((2usize, 2usize)), Just((1usize, 4usize))]
        ) {
            let inst = SumInstance::from_i64(&lists).unwrap();
            let got = count_blockwise_sum(&inst, b, g).unwrap();
            prop_assert_eq!(got, BigCount::from_u64(naive_blockwise(&inst, b, g)));
        }

        #[test]
        fn whole_word_split_is_the_identity_reshaping(
            lists in proptest::collection::vec(
                proptest::collection::vec(-8i64..=7, 1..=4), 2..=2
            )
        ) {
            // g=1, b=d: blockwise semantics coincide with plain k-SUM when
            // all values fit the word.
            let inst = SumInstance::from_i64(&lists).unwrap();
            let got = count_blockwise_sum(&inst, 4, 1).unwrap();
            prop_assert_eq!(got, crate::instances::count_sum(&inst).unwrap());
        }
    }
}
