//! Reductions from k-clique counting to choose(k,2)-partite XOR, OV, and
//! SUM instances, plus an Erdős–Rényi sampler for exercising them.
//!
//! One list per role pair `(i, j)` with `i < j` holds one vector per graph
//! edge `(u, v)` with `u < v`, meaning "node `u` plays role `i`, node `v`
//! plays role `j`". Each vector is divided into `k` sections of `k-2`
//! check slots. Section `a` verifies that the `k-1` chosen edges incident
//! to role `a` agree on which node plays it: one designated provider edge
//! (`(1, a)`, or `(1, 2)` for section 1) writes its opinion into every slot,
//! and each of the remaining `k-2` incident edges contests one distinct
//! slot. A slot is neutral exactly when the two opinions written into it
//! are equal, so solution tuples correspond one-to-one with k-cliques
//! listed in increasing node order, and counts are preserved exactly.
//!
//! Per-slot equality gadgets: XOR uses the plain binary label on both sides
//! (zero filler), OV the complement-pair encodings (ones filler), SUM the
//! signed label with every slot shifted into its own big-integer digit
//! range (weight `W^(slot)` inside a section, `W^(a*(k+2))` between
//! sections, `W = 2*k^2*n`). Section values stay below `W^k`, so digits
//! never carry and a zero total forces every slot to match.
//!
//! Node labels are padded to `ceil(lg n)` bits (at least one); list sizes
//! need not be powers of two here. The [`mutated`] submodule again carries
//! single-constant-flip variants for mutation testing.

use num_bigint::BigInt;
use num_traits::Signed;

use crate::bits::{ceil_log2, BitVector};
use crate::error::{Error, Result};
use crate::instances::{Graph, OvInstance, SumInstance, XorInstance};
use crate::rng::Rng;

/// One gadget write into a check section.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct SectionWrite {
    /// Section index in `[0, k)` (role the write is about).
    section: usize,
    /// Check slot in `[0, k-2)`, or `None` for a provider write that fills
    /// the whole section.
    slot: Option<usize>,
    /// The node this edge believes plays the section's role.
    node: usize,
    /// Providers write the positive gadget value, consumers the negative.
    provider: bool,
}

/// Slot assignment for the vectors of one role-pair list.
///
/// Produced per `(i, j)` with `1 <= i < j <= k` (1-based roles); both
/// writes concern the edge's own endpoints, every other section is filler.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeSlotLayout {
    k: usize,
    i: usize,
    j: usize,
}

impl EdgeSlotLayout {
    /// Layout for list `(i, j)`; roles are 1-based with `i < j <= k`.
    pub fn new(k: usize, i: usize, j: usize) -> Result<Self> {
        if k < 3 {
            return Err(Error::argument(format!(
                "clique reductions need k >= 3, got {k}"
            )));
        }
        if !(1 <= i && i < j && j <= k) {
            return Err(Error::argument(format!(
                "role pair ({i}, {j}) out of range for k = {k}"
            )));
        }
        Ok(EdgeSlotLayout { k, i, j })
    }

    /// Number of check slots per section.
    pub fn slots_per_section(&self) -> usize {
        self.k - 2
    }

    /// The two writes a vector for edge `(u, v)` makes (u plays role i,
    /// v plays role j).
    fn writes(&self, u: usize, v: usize) -> [SectionWrite; 2] {
        let (k, i, j) = (self.k, self.i, self.j);
        let _ = k;
        let about_i = if i == 1 {
            if j == 2 {
                SectionWrite { section: 0, slot: None, node: u, provider: true }
            } else {
                SectionWrite { section: 0, slot: Some(j - 3), node: u, provider: false }
            }
        } else {
            // Roles satisfy j > i >= 2 here, so j - 3 >= 0; the saturation
            // is a defensive slot-0 fallback for an unreachable case.
            SectionWrite {
                section: i - 1,
                slot: Some(j.saturating_sub(3)),
                node: u,
                provider: false,
            }
        };
        let about_j = if i == 1 {
            SectionWrite { section: j - 1, slot: None, node: v, provider: true }
        } else {
            SectionWrite { section: j - 1, slot: Some(i - 2), node: v, provider: false }
        };
        [about_i, about_j]
    }
}

fn role_pairs(k: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::with_capacity(k * (k - 1) / 2);
    for i in 1..=k {
        for j in i + 1..=k {
            pairs.push((i, j));
        }
    }
    pairs
}

fn check_clique_args(graph: &Graph, k: usize) -> Result<usize> {
    if k < 3 {
        return Err(Error::argument(format!(
            "clique reductions need k >= 3, got {k}"
        )));
    }
    // Labels stay injective for any n; width at least 1 keeps slots real.
    Ok(ceil_log2(graph.node_count().max(2)))
}

fn clique_to_xor_impl(graph: &Graph, k: usize, complement_consumer: bool) -> Result<XorInstance> {
    let w = check_clique_args(graph, k)?;
    let slots = k - 2;
    let dim = k * slots * w;
    let mask = ((1u64 << w) - 1) as u32;

    let mut lists = Vec::new();
    for (i, j) in role_pairs(k) {
        let layout = EdgeSlotLayout::new(k, i, j)?;
        let mut list = Vec::new();
        for (u, v) in graph.edges() {
            let mut vec = BitVector::zeros(dim);
            for write in layout.writes(u, v) {
                let code = if write.provider || !complement_consumer {
                    write.node as u32
                } else {
                    !(write.node as u32) & mask
                };
                let base = write.section * slots * w;
                match write.slot {
                    Some(c) => vec.write_short(base + c * w, code, w),
                    None => {
                        for c in 0..slots {
                            vec.write_short(base + c * w, code, w);
                        }
                    }
                }
            }
            list.push(vec);
        }
        lists.push(list);
    }
    XorInstance::new(lists, dim)
}

/// Reduce k-clique counting on a graph to a `choose(k,2)`-list XOR
/// instance: `count_xor` of the output equals `count_cliques(graph, k)`.
/// Vectors have `k * (k-2) * ceil(lg n)` bits.
pub fn clique_to_xor(graph: &Graph, k: usize) -> Result<XorInstance> {
    clique_to_xor_impl(graph, k, false)
}

/// Reduce k-clique counting to a `choose(k,2)`-list OV instance:
/// `count_ov` of the output equals `count_cliques(graph, k)`. Vectors have
/// `2 * k * (k-2) * ceil(lg n)` bits (complement-pair slots, ones filler).
pub fn clique_to_ov(graph: &Graph, k: usize) -> Result<OvInstance> {
    let w = check_clique_args(graph, k)?;
    let slots = k - 2;
    let dim = k * slots * 2 * w;
    let mask = ((1u64 << w) - 1) as u32;

    let mut lists = Vec::new();
    for (i, j) in role_pairs(k) {
        let layout = EdgeSlotLayout::new(k, i, j)?;
        let mut list = Vec::new();
        for (u, v) in graph.edges() {
            let mut vec = BitVector::ones(dim);
            for write in layout.writes(u, v) {
                let code = write.node as u32;
                let paired = if write.provider {
                    (code << w) | (!code & mask)
                } else {
                    ((!code & mask) << w) | code
                };
                let base = write.section * slots * 2 * w;
                match write.slot {
                    Some(c) => vec.write_short(base + c * 2 * w, paired, 2 * w),
                    None => {
                        for c in 0..slots {
                            vec.write_short(base + c * 2 * w, paired, 2 * w);
                        }
                    }
                }
            }
            list.push(vec);
        }
        lists.push(list);
    }
    OvInstance::new(lists, dim)
}

fn clique_to_sum_impl(graph: &Graph, k: usize, unsigned_consumer: bool) -> Result<SumInstance> {
    check_clique_args(graph, k)?;
    let slots = k - 2;
    let n = graph.node_count().max(1);
    let w_base = BigInt::from(2 * k * k * n);
    let gamma_bound = w_base.pow(k as u32);
    let slot_weights: Vec<BigInt> = (0..slots).map(|c| w_base.pow(c as u32)).collect();
    let all_slots: BigInt = slot_weights.iter().sum();

    let mut lists = Vec::new();
    for (i, j) in role_pairs(k) {
        let layout = EdgeSlotLayout::new(k, i, j)?;
        let mut list = Vec::new();
        for (u, v) in graph.edges() {
            let mut value = BigInt::from(0);
            for write in layout.writes(u, v) {
                let gamma: BigInt = match write.slot {
                    None => BigInt::from(write.node) * &all_slots,
                    Some(c) => {
                        let signed = if write.provider || unsigned_consumer {
                            BigInt::from(write.node)
                        } else {
                            -BigInt::from(write.node)
                        };
                        signed * &slot_weights[c]
                    }
                };
                assert!(
                    gamma.abs() <= gamma_bound,
                    "section value {gamma} exceeds the no-carry bound"
                );
                value += gamma * w_base.pow(((write.section + 1) * (k + 2)) as u32);
            }
            list.push(value);
        }
        lists.push(list);
    }
    SumInstance::new(lists)
}

/// Reduce k-clique counting to a `choose(k,2)`-list SUM instance:
/// `count_sum` of the output equals `count_cliques(graph, k)`. Values are
/// arbitrary-precision integers in base `W = 2*k^2*n` digit ranges.
pub fn clique_to_sum(graph: &Graph, k: usize) -> Result<SumInstance> {
    clique_to_sum_impl(graph, k, false)
}

/// Sample an Erdős–Rényi graph: each of the `choose(n,2)` edges is present
/// independently with probability `p`.
pub fn sample_gnp(n: usize, p: f64, rng: &mut Rng) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::argument(format!(
            "edge probability must lie in [0, 1], got {p}"
        )));
    }
    use rand::Rng as _;
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, edges)
}

/// Deliberately broken gadget variants for mutation testing; see
/// [`crate::ground::mutated`] for the rationale.
pub mod mutated {
    use super::*;

    /// [`clique_to_xor`] writing complemented labels on the consumer side —
    /// slots test label inequality instead of equality.
    pub fn clique_to_xor_complemented_consumer(graph: &Graph, k: usize) -> Result<XorInstance> {
        clique_to_xor_impl(graph, k, true)
    }

    /// [`clique_to_sum`] with the consumer sign dropped — slot sums add
    /// opinions instead of cancelling them.
    pub fn clique_to_sum_unsigned_consumer(graph: &Graph, k: usize) -> Result<SumInstance> {
        clique_to_sum_impl(graph, k, true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{count_cliques, count_ov, count_sum, count_xor, BigCount};
    use crate::rng;
    use proptest::prelude::*;

    fn four_cycle() -> Graph {
        Graph::cycle(4).unwrap()
    }

    #[test]
    fn triangle_reduction_shapes() {
        let g = Graph::complete(3);
        let xor = clique_to_xor(&g, 3).unwrap();
        assert_eq!(xor.lists.len(), 3);
        assert!(xor.lists.iter().all(|l| l.len() == 3));
        assert_eq!(xor.dimension, 6, "k(k-2)w with w = 2");

        let ov = clique_to_ov(&g, 3).unwrap();
        assert_eq!(ov.dimension, 12, "2k(k-2)w with w = 2");

        assert_eq!(count_xor(&xor).unwrap(), BigCount::one());
        assert_eq!(count_ov(&ov).unwrap(), BigCount::one());
        assert_eq!(count_sum(&clique_to_sum(&g, 3).unwrap()).unwrap(), BigCount::one());
    }

    #[test]
    fn k4_has_four_triangles_under_all_targets() {
        let g = Graph::complete(4);
        let want = BigCount::from_u64(4);
        assert_eq!(count_cliques(&g, 3).unwrap(), want);
        assert_eq!(count_xor(&clique_to_xor(&g, 3).unwrap()).unwrap(), want);
        assert_eq!(count_ov(&clique_to_ov(&g, 3).unwrap()).unwrap(), want);
        assert_eq!(count_sum(&clique_to_sum(&g, 3).unwrap()).unwrap(), want);
    }

    #[test]
    fn k4_contains_one_4_clique() {
        // k = 4 exercises six lists and two consumer kinds per section.
        let g = Graph::complete(4);
        let want = BigCount::one();
        assert_eq!(count_xor(&clique_to_xor(&g, 4).unwrap()).unwrap(), want);
        assert_eq!(count_ov(&clique_to_ov(&g, 4).unwrap()).unwrap(), want);
        assert_eq!(count_sum(&clique_to_sum(&g, 4).unwrap()).unwrap(), want);
    }

    #[test]
    fn triangle_free_and_empty_graphs_count_zero() {
        let g = four_cycle();
        assert_eq!(count_xor(&clique_to_xor(&g, 3).unwrap()).unwrap(), BigCount::zero());
        let empty = Graph::new(5, []).unwrap();
        assert_eq!(count_ov(&clique_to_ov(&empty, 3).unwrap()).unwrap(), BigCount::zero());
        assert_eq!(count_sum(&clique_to_sum(&empty, 3).unwrap()).unwrap(), BigCount::zero());
    }

    #[test]
    fn sum_base_matches_definition() {
        // W = 2 k^2 n: k=3, n=3 gives 54. The first section's weight is
        // W^(k+2), so every value of the triangle instance is divisible by
        // 54^5 and bounded by 54^(k(k+2)+k).
        let g = Graph::complete(3);
        let inst = clique_to_sum(&g, 3).unwrap();
        let w = BigInt::from(54);
        let section_one = w.pow(5);
        for list in &inst.lists {
            for value in list {
                assert_eq!(value % &section_one, BigInt::from(0));
            }
        }
    }

    #[test]
    fn reductions_reject_small_k() {
        let g = Graph::complete(4);
        assert!(clique_to_xor(&g, 2).is_err());
        assert!(clique_to_ov(&g, 2).is_err());
        assert!(clique_to_sum(&g, 0).is_err());
        assert!(EdgeSlotLayout::new(3, 2, 2).is_err());
    }

    /// Brute-force the solution tuples of a reduced XOR instance and decode
    /// each back to node labels: every solution must name a clique, and
    /// distinct solutions distinct cliques.
    #[test]
    fn solutions_decode_to_unique_cliques() {
        let mut rng = rng::from_seed(31);
        for (n, k) in [(4usize, 3usize), (5, 3), (4, 4)] {
            let g = sample_gnp(n, 0.7, &mut rng).unwrap();
            let edges: Vec<(usize, usize)> = g.edges().collect();
            if edges.is_empty() {
                continue;
            }
            let inst = clique_to_xor(&g, k).unwrap();
            let pairs = role_pairs(k);
            let mut seen = std::collections::BTreeSet::new();
            let mut choice = vec![0usize; inst.lists.len()];
            'outer: loop {
                let mut acc = BitVector::zeros(inst.dimension);
                for (li, &c) in choice.iter().enumerate() {
                    acc.xor_assign(&inst.lists[li][c]);
                }
                if acc.is_zero() {
                    // Decode: list (i, j) chose edge (u, v), so role i is
                    // played by u and role j by v.
                    let mut roles = vec![None; k];
                    let mut consistent = true;
                    for (li, &(i, j)) in pairs.iter().enumerate() {
                        let (u, v) = edges[choice[li]];
                        for (role, node) in [(i - 1, u), (j - 1, v)] {
                            match roles[role] {
                                None => roles[role] = Some(node),
                                Some(prev) => consistent &= prev == node,
                            }
                        }
                    }
                    assert!(consistent, "solution assigns conflicting nodes to a role");
                    let nodes: Vec<usize> = roles.into_iter().map(|r| r.unwrap()).collect();
                    for a in 0..k {
                        for b in a + 1..k {
                            assert!(
                                g.has_edge(nodes[a], nodes[b]),
                                "solution names a non-clique {nodes:?}"
                            );
                        }
                    }
                    let mut sorted = nodes.clone();
                    sorted.sort_unstable();
                    assert!(seen.insert(sorted), "two solutions decode to one clique");
                }
                let mut pos = 0;
                loop {
                    if pos == choice.len() {
                        break 'outer;
                    }
                    choice[pos] += 1;
                    if choice[pos] < edges.len() {
                        break;
                    }
                    choice[pos] = 0;
                    pos += 1;
                }
            }
            let cliques = count_cliques(&g, k).unwrap();
            assert_eq!(BigCount::from_u64(seen.len() as u64), cliques);
        }
    }

    #[test]
    fn gnp_edge_cases_and_density() {
        let mut rng = rng::from_seed(32);
        let empty = sample_gnp(6, 0.0, &mut rng).unwrap();
        assert_eq!(empty.edge_count(), 0);
        let full = sample_gnp(6, 1.0, &mut rng).unwrap();
        assert_eq!(full.edge_count(), 15);
        assert!(sample_gnp(4, 1.5, &mut rng).is_err());

        let mut total_density = 0.0;
        let samples = 100;
        for _ in 0..samples {
            let g = sample_gnp(50, 0.5, &mut rng).unwrap();
            total_density += g.edge_count() as f64 / (50.0 * 49.0 / 2.0);
        }
        let mean = total_density / samples as f64;
        assert!(
            (mean - 0.5).abs() <= 0.03,
            "empirical density {mean}, expected 0.5 +- 0.03"
        );
    }

    #[test]
    fn mutated_clique_gadgets_are_detected() {
        let mut rng = rng::from_seed(33);
        let mut xor_caught = false;
        let mut sum_caught = false;
        for _ in 0..200 {
            let g = sample_gnp(5, 0.6, &mut rng).unwrap();
            let want = count_cliques(&g, 3).unwrap();
            if count_xor(&mutated::clique_to_xor_complemented_consumer(&g, 3).unwrap()).unwrap()
                != want
            {
                xor_caught = true;
            }
            if count_sum(&mutated::clique_to_sum_unsigned_consumer(&g, 3).unwrap()).unwrap()
                != want
            {
                sum_caught = true;
            }
            if xor_caught && sum_caught {
                break;
            }
        }
        assert!(xor_caught, "complemented consumer never detected");
        assert!(sum_caught, "unsigned consumer never detected");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn reductions_match_brute_force_clique_counts(
            seed in any::<u64>(),
            n in 3usize..=5,
            p in prop_oneof![Just(0.3), Just(0.6), Just(1.0)],
        ) {
            let mut rng = rng::from_seed(seed);
            let g = sample_gnp(n, p, &mut rng).unwrap();
            let want = count_cliques(&g, 3).unwrap();
            prop_assert_eq!(count_xor(&clique_to_xor(&g, 3).unwrap()).unwrap(), want.clone());
            prop_assert_eq!(count_ov(&clique_to_ov(&g, 3).unwrap()).unwrap(), want.clone());
            prop_assert_eq!(count_sum(&clique_to_sum(&g, 3).unwrap()).unwrap(), want);
        }

        #[test]
        fn four_clique_reductions_match_brute_force(
            seed in any::<u64>(),
            p in prop_oneof![Just(0.5), Just(0.8)],
        ) {
            let mut rng = rng::from_seed(seed);
            let g = sample_gnp(5, p, &mut rng).unwrap();
            let want = count_cliques(&g, 4).unwrap();
            prop_assert_eq!(count_xor(&clique_to_xor(&g, 4).unwrap()).unwrap(), want.clone());
            prop_assert_eq!(count_ov(&clique_to_ov(&g, 4).unwrap()).unwrap(), want.clone());
            prop_assert_eq!(count_sum(&clique_to_sum(&g, 4).unwrap()).unwrap(), want);
        }
    }
}
