//! Bridges between CNF-SAT and orthogonal-vectors counting, in both
//! directions, and the distribution samplers built on top of them.
//!
//! [`sat_to_ov`] splits the variables into groups and enumerates each
//! group's partial assignments as clause-indicator vectors: a chosen tuple
//! has an all-zero AND exactly when every clause is satisfied by some
//! group, so satisfying assignments correspond one-to-one with OV
//! solutions. [`fov_to_sat`] goes the other way for factored OV instances,
//! with selector variables naming the chosen factored vector per list,
//! payload variables naming the string chosen per position, membership
//! clauses excluding strings outside the selected vector's sets, and one
//! orthogonality clause per position/bit. Both are exact counting
//! reductions, not just parity-preserving ones.
//!
//! When the group count does not divide the variable count, [`sat_to_ov`]
//! pads with fresh variables that appear in no clause; this multiplies the
//! solution count by `2^pad` ([`split_padding`] computes the exponent so
//! callers can divide it back out).

use rand::Rng as _;

use crate::bits::BitVector;
use crate::error::{Error, Result};
use crate::factored::{sample_uniform_factored, FactoredInstance, Predicate};
use crate::instances::{CnfFormula, OvInstance};
use crate::rng::Rng;

/// Cap on vectors per list when enumerating partial assignments.
const MAX_GROUP_BITS: usize = 20;
/// Cap on emitted clauses.
const MAX_CLAUSES: usize = 1_000_000;

/// Number of fresh padding variables [`sat_to_ov`] adds so that `groups`
/// divides the variable count. Each padding variable doubles the solution
/// count of the produced instance relative to the formula.
pub fn split_padding(var_count: usize, groups: usize) -> usize {
    if groups == 0 {
        return 0;
    }
    (groups - var_count % groups) % groups
}

/// Reduce #SAT to OV counting by variable splitting.
///
/// Variables are padded with `split_padding` fresh ones, split into
/// `groups` equal contiguous blocks, and each block's `2^(n/groups)`
/// partial assignments become one list of clause-indicator vectors (bit
/// `c` is 0 exactly when the partial assignment satisfies clause `c`).
/// `count_ov` of the result equals `2^pad * count_sat(f)`.
pub fn sat_to_ov(f: &CnfFormula, groups: usize) -> Result<OvInstance> {
    f.validate()?;
    if groups < 2 {
        return Err(Error::argument(format!(
            "variable splitting needs at least 2 groups, got {groups}"
        )));
    }
    let m = f.clauses.len();
    if m == 0 {
        return Err(Error::argument(
            "variable splitting needs at least one clause",
        ));
    }
    let padded = f.var_count + split_padding(f.var_count, groups);
    let group_bits = padded / groups;
    if group_bits > MAX_GROUP_BITS {
        return Err(Error::capacity(
            "partial assignments per group",
            1u128 << group_bits.min(127),
            1 << MAX_GROUP_BITS,
        ));
    }

    let mut lists = Vec::with_capacity(groups);
    for i in 0..groups {
        let lo = i * group_bits;
        let mut list = Vec::with_capacity(1 << group_bits);
        for a in 0u64..1 << group_bits {
            let mut vec = BitVector::ones(m);
            for (c, clause) in f.clauses.iter().enumerate() {
                let satisfied = clause.iter().any(|&lit| {
                    let var = lit.unsigned_abs() as usize - 1;
                    if var < lo || var >= lo + group_bits {
                        return false;
                    }
                    let value = (a >> (var - lo)) & 1 == 1;
                    (lit > 0) == value
                });
                if satisfied {
                    vec.set(c, false);
                }
            }
            list.push(vec);
        }
        lists.push(list);
    }
    OvInstance::new(lists, m)
}

/// Encode a factored OV instance as a CNF formula with
/// `lists * lg N + lists * b * g` variables whose model count equals
/// `count_factored`.
///
/// Lists are padded to a power-of-two length `N` with empty-set vectors
/// (selectable but unsatisfiable). Variable order: per-list selectors
/// (most significant bit first), then per-list, per-position payloads.
/// Membership clauses are emitted for every (list, vector, position,
/// excluded string) in that order, followed by one orthogonality clause per
/// (position, bit); the count is exact rather than the worst-case bound
/// `N * 2^b * g * lists + b * g`.
pub fn fov_to_sat(inst: &FactoredInstance) -> Result<CnfFormula> {
    inst.validate()?;
    if inst.predicate != Predicate::Ov {
        return Err(Error::argument(format!(
            "CNF encoding expects an OV instance, got {}",
            inst.predicate.tag()
        )));
    }
    let lists = inst.k();
    let b = inst.b;
    let g = inst.g;
    let n_padded = inst.max_list_len().next_power_of_two();
    let sel_bits = n_padded.trailing_zeros() as usize;
    let var_count = lists * sel_bits + lists * b * g;

    let worst_clauses = (n_padded as u128) * (1u128 << b) * (g as u128) * (lists as u128)
        + (b * g) as u128;
    if worst_clauses > MAX_CLAUSES as u128 {
        return Err(Error::capacity("CNF clauses", worst_clauses, MAX_CLAUSES as u128));
    }

    // 1-based DIMACS variable numbers.
    let sel_var = |i: usize, p: usize| (i * sel_bits + p + 1) as i64;
    let pay_var =
        |i: usize, j: usize, q: usize| (lists * sel_bits + (i * g + j) * b + q + 1) as i64;

    let mut clauses = Vec::new();
    for i in 0..lists {
        for a in 0..n_padded {
            // Literals asserting "selector i differs from a", most
            // significant bit first.
            let sel_lits: Vec<i64> = (0..sel_bits)
                .map(|p| {
                    let bit = (a >> (sel_bits - 1 - p)) & 1;
                    if bit == 1 {
                        -sel_var(i, p)
                    } else {
                        sel_var(i, p)
                    }
                })
                .collect();
            for j in 0..g {
                let members: &[u32] = inst.lists[i].get(a).map(|v| v.set(j)).unwrap_or(&[]);
                for s in 0..1u32 << b {
                    if members.binary_search(&s).is_ok() {
                        continue;
                    }
                    let mut clause = sel_lits.clone();
                    for q in 0..b {
                        let bit = (s >> (b - 1 - q)) & 1;
                        clause.push(if bit == 1 {
                            -pay_var(i, j, q)
                        } else {
                            pay_var(i, j, q)
                        });
                    }
                    clauses.push(clause);
                }
            }
        }
    }
    for j in 0..g {
        for q in 0..b {
            clauses.push((0..lists).map(|i| -pay_var(i, j, q)).collect());
        }
    }
    CnfFormula::new(var_count, clauses)
}

/// Sample a random-SAT instance: the image of a uniformly random factored
/// OV instance (`lists` lists of `n_factored` vectors, `g` sets of `b`-bit
/// strings) under [`fov_to_sat`].
pub fn sample_dsat(
    n_factored: usize,
    b: usize,
    g: usize,
    lists: usize,
    rng: &mut Rng,
) -> Result<CnfFormula> {
    let inst = sample_uniform_factored(lists, n_factored, g, b, Predicate::Ov, rng)?;
    fov_to_sat(&inst)
}

/// Sample a random-OV instance: a [`sample_dsat`] formula pushed through
/// [`sat_to_ov`] with `k` groups. The output dimension is the sampled
/// formula's clause count.
pub fn sample_dov_chain(
    n_factored: usize,
    b: usize,
    g: usize,
    lists: usize,
    k: usize,
    rng: &mut Rng,
) -> Result<OvInstance> {
    let formula = sample_dsat(n_factored, b, g, lists, rng)?;
    sat_to_ov(&formula, k)
}

/// Sample a uniform random CNF formula for round-trip tests: each of `m`
/// clauses draws a nonempty set of literals over `n` variables.
pub fn sample_uniform_cnf(n: usize, m: usize, rng: &mut Rng) -> Result<CnfFormula> {
    if n == 0 || n > 62 {
        return Err(Error::argument(format!(
            "uniform CNF sampling needs 1..=62 variables, got {n}"
        )));
    }
    let mut clauses = Vec::with_capacity(m);
    for _ in 0..m {
        let mut clause = Vec::new();
        while clause.is_empty() {
            clause = (1..=n as i64)
                .filter_map(|v| {
                    if rng.gen_bool(0.5) {
                        Some(if rng.gen_bool(0.5) { v } else { -v })
                    } else {
                        None
                    }
                })
                .collect();
        }
        clauses.push(clause);
    }
    CnfFormula::new(n, clauses)
}
