//! Canonical unfactored problem instances and exact brute-force solvers.
//!
//! The types here are the ground truth for everything else in the crate:
//! [`count_ov`], [`count_xor`], [`count_sum`], [`count_cliques`], and
//! [`count_sat`] enumerate solutions exhaustively (with memoization over
//! shared prefixes, so structured instances produced by the reductions stay
//! cheap) and return arbitrary-precision counts. The module also houses the
//! instance-shrinking primitives: parity-based decision via random
//! subsampling, and the GF(2) / modular hashes that compress vector length
//! and value range without losing solutions.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::Rng as _;

use crate::bits::{ceil_log2, random_bitvector, BitVector};
use crate::error::{Error, Result};
use crate::rng::Rng;

/// Default cap on CNF variables for exhaustive model counting.
pub const DEFAULT_SAT_ENUM_LIMIT: usize = 26;

/// Largest graph (in nodes) accepted by the clique counter.
pub const MAX_CLIQUE_NODES: usize = 128;

/// An exact, arbitrary-precision, nonnegative solution count.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BigCount(pub BigUint);

impl BigCount {
    /// The zero count.
    pub fn zero() -> Self {
        BigCount(BigUint::zero())
    }

    /// The count one.
    pub fn one() -> Self {
        BigCount(BigUint::one())
    }

    /// Count from a machine integer.
    pub fn from_u64(v: u64) -> Self {
        BigCount(BigUint::from(v))
    }

    /// The count modulo 2, as a bit.
    pub fn parity(&self) -> u8 {
        u8::from(self.0.bit(0))
    }

    /// True when the count is zero.
    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// Decimal string form (used by the serializers; counts can exceed u64).
    pub fn to_decimal(&self) -> String {
        self.0.to_str_radix(10)
    }

    /// Parse a decimal string.
    pub fn from_decimal(s: &str) -> Result<Self> {
        let v = BigUint::parse_bytes(s.as_bytes(), 10)
            .ok_or_else(|| Error::structural(format!("invalid count literal {s:?}")))?;
        Ok(BigCount(v))
    }
}

impl fmt::Display for BigCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<BigUint> for BigCount {
    fn from(v: BigUint) -> Self {
        BigCount(v)
    }
}

impl From<u64> for BigCount {
    fn from(v: u64) -> Self {
        BigCount::from_u64(v)
    }
}

impl std::ops::Add for BigCount {
    type Output = BigCount;
    fn add(self, rhs: BigCount) -> BigCount {
        BigCount(self.0 + rhs.0)
    }
}

impl std::ops::AddAssign<&BigCount> for BigCount {
    fn add_assign(&mut self, rhs: &BigCount) {
        self.0 += &rhs.0;
    }
}

/// The parity bit of a count.
pub fn parity_of(count: &BigCount) -> u8 {
    count.parity()
}

/// A k-OV instance: `k` lists of equal-dimension bit vectors.
///
/// A solution is a k-tuple (one vector per list) whose coordinate-wise AND
/// is the all-zeros vector, i.e. every coordinate sees a 0 in some chosen
/// vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OvInstance {
    /// The `k` vector lists. Individual lists may be empty (subsampling can
    /// empty them); the tuple count is then zero.
    pub lists: Vec<Vec<BitVector>>,
    /// Common vector dimension `d`.
    pub dimension: usize,
}

impl OvInstance {
    /// Build and validate an instance.
    pub fn new(lists: Vec<Vec<BitVector>>, dimension: usize) -> Result<Self> {
        let inst = OvInstance { lists, dimension };
        inst.validate()?;
        Ok(inst)
    }

    /// Check the structural invariants: `k >= 2`, `d >= 1`, uniform dimension.
    pub fn validate(&self) -> Result<()> {
        validate_vector_lists("OV", &self.lists, self.dimension)
    }

    /// Number of lists `k`.
    pub fn k(&self) -> usize {
        self.lists.len()
    }

    /// Largest list size.
    pub fn max_list_len(&self) -> usize {
        self.lists.iter().map(Vec::len).max().unwrap_or(0)
    }
}

/// A k-XOR instance: `k` lists of equal-dimension bit vectors.
///
/// A solution is a k-tuple whose bitwise XOR is the all-zeros vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XorInstance {
    /// The `k` vector lists.
    pub lists: Vec<Vec<BitVector>>,
    /// Common vector dimension `d`.
    pub dimension: usize,
}

impl XorInstance {
    /// Build and validate an instance.
    pub fn new(lists: Vec<Vec<BitVector>>, dimension: usize) -> Result<Self> {
        let inst = XorInstance { lists, dimension };
        inst.validate()?;
        Ok(inst)
    }

    /// Check the structural invariants: `k >= 2`, `d >= 1`, uniform dimension.
    pub fn validate(&self) -> Result<()> {
        validate_vector_lists("XOR", &self.lists, self.dimension)
    }

    /// Number of lists `k`.
    pub fn k(&self) -> usize {
        self.lists.len()
    }

    /// Largest list size.
    pub fn max_list_len(&self) -> usize {
        self.lists.iter().map(Vec::len).max().unwrap_or(0)
    }
}

fn validate_vector_lists(kind: &str, lists: &[Vec<BitVector>], dimension: usize) -> Result<()> {
    if lists.len() < 2 {
        return Err(Error::structural(format!(
            "{kind} instance needs at least 2 lists, got {}",
            lists.len()
        )));
    }
    if dimension == 0 {
        return Err(Error::structural(format!(
            "{kind} instance needs dimension >= 1"
        )));
    }
    for (i, list) in lists.iter().enumerate() {
        for v in list {
            if v.len() != dimension {
                return Err(Error::structural(format!(
                    "{kind} list {i} holds a vector of length {}, expected {dimension}",
                    v.len()
                )));
            }
        }
    }
    Ok(())
}

/// A k-SUM instance: `k` lists of signed arbitrary-precision integers.
///
/// A solution is a k-tuple summing to zero over the integers. No magnitude
/// bound is enforced: the reductions legitimately produce huge values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SumInstance {
    /// The `k` value lists.
    pub lists: Vec<Vec<BigInt>>,
}

impl SumInstance {
    /// Build and validate an instance.
    pub fn new(lists: Vec<Vec<BigInt>>) -> Result<Self> {
        let inst = SumInstance { lists };
        inst.validate()?;
        Ok(inst)
    }

    /// Convenience constructor from machine integers.
    pub fn from_i64(lists: &[Vec<i64>]) -> Result<Self> {
        SumInstance::new(
            lists
                .iter()
                .map(|l| l.iter().map(|&v| BigInt::from(v)).collect())
                .collect(),
        )
    }

    /// Check the structural invariant `k >= 2`.
    pub fn validate(&self) -> Result<()> {
        if self.lists.len() < 2 {
            return Err(Error::structural(format!(
                "SUM instance needs at least 2 lists, got {}",
                self.lists.len()
            )));
        }
        Ok(())
    }

    /// Number of lists `k`.
    pub fn k(&self) -> usize {
        self.lists.len()
    }

    /// Largest list size.
    pub fn max_list_len(&self) -> usize {
        self.lists.iter().map(Vec::len).max().unwrap_or(0)
    }
}

/// An undirected simple graph with nodes `0..node_count`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    node_count: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl Graph {
    /// Build a graph, normalizing each edge to `(min, max)` order.
    ///
    /// Self-loops and out-of-range endpoints are structural errors; repeated
    /// edges collapse to one.
    pub fn new(node_count: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u == v {
                return Err(Error::structural(format!("self-loop at node {u}")));
            }
            if u >= node_count || v >= node_count {
                return Err(Error::structural(format!(
                    "edge ({u}, {v}) out of range for {node_count} nodes"
                )));
            }
            set.insert((u.min(v), u.max(v)));
        }
        Ok(Graph {
            node_count,
            edges: set,
        })
    }

    /// The complete graph on `n` nodes.
    pub fn complete(n: usize) -> Graph {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        Graph::new(n, edges).expect("complete graph is always valid")
    }

    /// The cycle graph on `n >= 3` nodes.
    pub fn cycle(n: usize) -> Result<Graph> {
        if n < 3 {
            return Err(Error::argument(format!("cycle needs >= 3 nodes, got {n}")));
        }
        Graph::new(n, (0..n).map(|u| (u, (u + 1) % n)))
    }

    /// Number of nodes.
    pub fn node_count(&self) -> usize {
        self.node_count
    }

    /// Number of edges.
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Iterate over edges in sorted `(min, max)` order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    /// True when `{u, v}` is an edge.
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }
}

/// A CNF formula in DIMACS literal convention.
///
/// A literal is a nonzero integer: `+i` is variable `i`, `-i` its negation,
/// with variables numbered `1..=var_count`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnfFormula {
    /// Number of variables.
    pub var_count: usize,
    /// Clauses as lists of literals; every clause must be nonempty.
    pub clauses: Vec<Vec<i64>>,
}

impl CnfFormula {
    /// Build and validate a formula.
    pub fn new(var_count: usize, clauses: Vec<Vec<i64>>) -> Result<Self> {
        let f = CnfFormula { var_count, clauses };
        f.validate()?;
        Ok(f)
    }

    /// Check the structural invariants: nonempty clauses, literals in range.
    pub fn validate(&self) -> Result<()> {
        for (i, clause) in self.clauses.iter().enumerate() {
            if clause.is_empty() {
                return Err(Error::structural(format!("clause {i} is empty")));
            }
            for &lit in clause {
                if lit == 0 || lit.unsigned_abs() as usize > self.var_count {
                    return Err(Error::structural(format!(
                        "clause {i} holds literal {lit}, out of range for {} variables",
                        self.var_count
                    )));
                }
            }
        }
        Ok(())
    }

    /// Number of clauses.
    pub fn clause_count(&self) -> usize {
        self.clauses.len()
    }

    /// True when `clause` is satisfied by the assignment whose bit `i`
    /// (LSB-first) gives the value of variable `i + 1`.
    pub fn clause_satisfied(clause: &[i64], assignment: u64) -> bool {
        clause.iter().any(|&lit| {
            let var = lit.unsigned_abs() as usize - 1;
            let value = (assignment >> var) & 1 == 1;
            (lit > 0) == value
        })
    }
}

// ---------------------------------------------------------------------------
// Exact counters
// ---------------------------------------------------------------------------

/// Collapse a list to (distinct value, multiplicity) pairs in sorted order.
fn dedup_multiplicities<T: Ord + Clone>(list: &[T]) -> Vec<(T, u64)> {
    let mut map: BTreeMap<T, u64> = BTreeMap::new();
    for item in list {
        *map.entry(item.clone()).or_insert(0) += 1;
    }
    map.into_iter().collect()
}

/// Product over lists of their total multiplicity — an upper bound on any
/// intermediate tuple count — when it fits in `u128`.
fn tuple_bound(lists: &[Vec<(BitVector, u64)>]) -> Option<u128> {
    let mut bound = 1u128;
    for list in lists {
        let mut total = 0u128;
        for (_, m) in list {
            total = total.checked_add(u128::from(*m))?;
        }
        bound = bound.checked_mul(total)?;
    }
    Some(bound)
}

/// Pack each distinct vector into one word; callers check `dimension <= 64`.
fn pack_words(lists: &[Vec<(BitVector, u64)>]) -> Vec<Vec<(u64, u64)>> {
    lists
        .iter()
        .map(|l| {
            l.iter()
                .map(|(v, m)| (v.as_u64().expect("dimension fits one word"), *m))
                .collect()
        })
        .collect()
}

/// Distribution of the XOR accumulator over all prefix choices.
fn xor_prefix_map(lists: &[Vec<(u64, u64)>]) -> HashMap<u64, u128> {
    let mut map = HashMap::new();
    map.insert(0u64, 1u128);
    for list in lists {
        let mut next: HashMap<u64, u128> = HashMap::with_capacity(map.len());
        for (&acc, &cnt) in &map {
            for &(v, m) in list {
                *next.entry(acc ^ v).or_insert(0) += cnt * u128::from(m);
            }
        }
        map = next;
    }
    map
}

/// Exact number of orthogonal k-tuples.
///
/// Level-by-level dynamic programming on the AND of the chosen prefix, so
/// lists with repeated vectors (common in reduction outputs) cost far less
/// than the full product. Dimensions up to 64 run on packed words; wider
/// instances fall back to a memoized recursion over bit vectors.
pub fn count_ov(inst: &OvInstance) -> Result<BigCount> {
    inst.validate()?;
    let lists: Vec<Vec<(BitVector, u64)>> =
        inst.lists.iter().map(|l| dedup_multiplicities(l)).collect();
    if inst.dimension <= 64 && tuple_bound(&lists).is_some() {
        return Ok(BigCount(count_ov_packed(&pack_words(&lists), inst.dimension)));
    }
    Ok(BigCount(count_ov_general(&lists, inst.dimension)))
}

/// Forward DP over packed masks: value = number of prefix tuples whose AND
/// equals the key. The last list is scored directly against each surviving
/// mask instead of materializing the (potentially huge) final map.
fn count_ov_packed(lists: &[Vec<(u64, u64)>], dimension: usize) -> BigUint {
    let full = if dimension == 64 {
        u64::MAX
    } else {
        (1u64 << dimension) - 1
    };
    let mut map = HashMap::new();
    map.insert(full, 1u128);
    let (last, prefix) = match lists.split_last() {
        Some(pair) => pair,
        None => return BigUint::from(u32::from(full == 0)),
    };
    for list in prefix {
        let mut next: HashMap<u64, u128> = HashMap::with_capacity(map.len());
        for (&mask, &cnt) in &map {
            for &(v, m) in list {
                *next.entry(mask & v).or_insert(0) += cnt * u128::from(m);
            }
        }
        map = next;
    }
    let mut total = 0u128;
    for (&mask, &cnt) in &map {
        for &(v, m) in last {
            if mask & v == 0 {
                total += cnt * u128::from(m);
            }
        }
    }
    BigUint::from(total)
}

fn count_ov_general(lists: &[Vec<(BitVector, u64)>], dimension: usize) -> BigUint {
    fn rec(
        lists: &[Vec<(BitVector, u64)>],
        level: usize,
        mask: &BitVector,
        memo: &mut [HashMap<BitVector, BigUint>],
    ) -> BigUint {
        if level == lists.len() {
            return if mask.is_zero() {
                BigUint::one()
            } else {
                BigUint::zero()
            };
        }
        if let Some(c) = memo[level].get(mask) {
            return c.clone();
        }
        let mut total = BigUint::zero();
        for (v, mult) in &lists[level] {
            total += rec(lists, level + 1, &mask.and(v), memo) * *mult;
        }
        memo[level].insert(mask.clone(), total.clone());
        total
    }

    let mut memo: Vec<HashMap<BitVector, BigUint>> = vec![HashMap::new(); lists.len()];
    let start = BitVector::ones(dimension);
    rec(lists, 0, &start, &mut memo)
}

/// Exact number of k-tuples with bitwise XOR zero.
///
/// Dimensions up to 64 use meet-in-the-middle on packed words (a tuple
/// XORs to zero exactly when the two half accumulators agree); wider
/// instances fall back to a memoized recursion over bit vectors.
pub fn count_xor(inst: &XorInstance) -> Result<BigCount> {
    inst.validate()?;
    let lists: Vec<Vec<(BitVector, u64)>> =
        inst.lists.iter().map(|l| dedup_multiplicities(l)).collect();
    if inst.dimension <= 64 && tuple_bound(&lists).is_some() {
        return Ok(BigCount(count_xor_packed(&pack_words(&lists))));
    }
    Ok(BigCount(count_xor_general(&lists, inst.dimension)))
}

fn count_xor_packed(lists: &[Vec<(u64, u64)>]) -> BigUint {
    let split = lists.len() / 2;
    let left = xor_prefix_map(&lists[..split]);
    let right = xor_prefix_map(&lists[split..]);
    let mut total = 0u128;
    for (acc, cnt) in &left {
        if let Some(rc) = right.get(acc) {
            total += cnt * rc;
        }
    }
    BigUint::from(total)
}

fn count_xor_general(lists: &[Vec<(BitVector, u64)>], dimension: usize) -> BigUint {
    fn rec(
        lists: &[Vec<(BitVector, u64)>],
        level: usize,
        acc: &BitVector,
        memo: &mut [HashMap<BitVector, BigUint>],
    ) -> BigUint {
        if level == lists.len() {
            return if acc.is_zero() {
                BigUint::one()
            } else {
                BigUint::zero()
            };
        }
        if let Some(c) = memo[level].get(acc) {
            return c.clone();
        }
        let mut total = BigUint::zero();
        for (v, mult) in &lists[level] {
            total += rec(lists, level + 1, &acc.xor(v), memo) * *mult;
        }
        memo[level].insert(acc.clone(), total.clone());
        total
    }

    let mut memo: Vec<HashMap<BitVector, BigUint>> = vec![HashMap::new(); lists.len()];
    let start = BitVector::zeros(dimension);
    rec(lists, 0, &start, &mut memo)
}

/// Largest half-product of list sizes for which sum counting joins two
/// enumerated halves instead of recursing.
const MEET_LIMIT: usize = 1 << 20;

/// Distribution of the partial sum over all prefix choices.
fn sum_prefix_map(lists: &[Vec<(BigInt, u64)>]) -> HashMap<BigInt, BigUint> {
    let mut map = HashMap::new();
    map.insert(BigInt::zero(), BigUint::one());
    for list in lists {
        let mut next: HashMap<BigInt, BigUint> = HashMap::with_capacity(map.len());
        for (acc, cnt) in &map {
            for (v, m) in list {
                *next.entry(acc + v).or_insert_with(BigUint::zero) += cnt * *m;
            }
        }
        map = next;
    }
    map
}

/// Meet in the middle: a tuple sums to zero exactly when the right half
/// sums to the negation of the left half.
fn count_sum_meet(lists: &[Vec<(BigInt, u64)>], split: usize) -> BigUint {
    let left = sum_prefix_map(&lists[..split]);
    let right = sum_prefix_map(&lists[split..]);
    let mut total = BigUint::zero();
    for (sum, cnt) in &left {
        if let Some(rc) = right.get(&(-sum)) {
            total += cnt * rc;
        }
    }
    total
}

/// Exact number of k-tuples with integer sum zero.
///
/// Small instances join two half enumerations; larger ones recurse with a
/// memo on the partial sum, pruning branches whose remaining lists cannot
/// bring the sum back to zero.
pub fn count_sum(inst: &SumInstance) -> Result<BigCount> {
    inst.validate()?;
    if inst.lists.iter().any(|l| l.is_empty()) {
        return Ok(BigCount::zero());
    }
    let lists: Vec<Vec<(BigInt, u64)>> =
        inst.lists.iter().map(|l| dedup_multiplicities(l)).collect();
    let split = lists.len() / 2;
    let half_fits = |part: &[Vec<(BigInt, u64)>]| {
        part.iter()
            .try_fold(1usize, |acc, l| {
                acc.checked_mul(l.len()).filter(|&p| p <= MEET_LIMIT)
            })
            .is_some()
    };
    if half_fits(&lists[..split]) && half_fits(&lists[split..]) {
        return Ok(BigCount(count_sum_meet(&lists, split)));
    }
    Ok(BigCount(count_sum_general(&lists)))
}

fn count_sum_general(lists: &[Vec<(BigInt, u64)>]) -> BigUint {
    let k = lists.len();

    // suffix_min[i] / suffix_max[i]: extreme sums achievable from lists i..k.
    let mut suffix_min = vec![BigInt::zero(); k + 1];
    let mut suffix_max = vec![BigInt::zero(); k + 1];
    for i in (0..k).rev() {
        let lo = lists[i].first().expect("nonempty").0.clone();
        let hi = lists[i].last().expect("nonempty").0.clone();
        suffix_min[i] = &suffix_min[i + 1] + lo;
        suffix_max[i] = &suffix_max[i + 1] + hi;
    }

    let mut memo: Vec<HashMap<BigInt, BigUint>> = vec![HashMap::new(); k];

    #[allow(clippy::too_many_arguments)]
    fn rec(
        lists: &[Vec<(BigInt, u64)>],
        suffix_min: &[BigInt],
        suffix_max: &[BigInt],
        level: usize,
        partial: &BigInt,
        memo: &mut [HashMap<BigInt, BigUint>],
    ) -> BigUint {
        if level == lists.len() {
            return if partial.is_zero() {
                BigUint::one()
            } else {
                BigUint::zero()
            };
        }
        if partial + &suffix_max[level] < BigInt::zero()
            || partial + &suffix_min[level] > BigInt::zero()
        {
            return BigUint::zero();
        }
        if let Some(c) = memo[level].get(partial) {
            return c.clone();
        }
        let mut total = BigUint::zero();
        for (v, mult) in &lists[level] {
            total += rec(lists, suffix_min, suffix_max, level + 1, &(partial + v), memo) * *mult;
        }
        memo[level].insert(partial.clone(), total.clone());
        total
    }

    rec(lists, &suffix_min, &suffix_max, 0, &BigInt::zero(), &mut memo)
}

/// Exact number of k-cliques (k-node complete subgraphs).
pub fn count_cliques(g: &Graph, k: usize) -> Result<BigCount> {
    if k < 2 || k > g.node_count {
        return Err(Error::argument(format!(
            "clique size {k} out of range 2..={}",
            g.node_count
        )));
    }
    if g.node_count > MAX_CLIQUE_NODES {
        return Err(Error::capacity(
            "clique enumeration",
            g.node_count as u128,
            MAX_CLIQUE_NODES as u128,
        ));
    }
    let mut adj = vec![0u128; g.node_count];
    for (u, v) in g.edges() {
        adj[u] |= 1 << v;
        adj[v] |= 1 << u;
    }

    // Enumerate cliques as increasing node sequences: after picking v, only
    // higher-numbered neighbors of v remain candidates.
    fn rec(adj: &[u128], candidates: u128, depth: usize) -> BigUint {
        if depth == 0 {
            return BigUint::one();
        }
        let mut total = BigUint::zero();
        let mut rest = candidates;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            total += rec(adj, rest & adj[v], depth - 1);
        }
        total
    }

    let all = if g.node_count == 128 {
        u128::MAX
    } else {
        (1u128 << g.node_count) - 1
    };
    Ok(BigCount(rec(&adj, all, k)))
}

/// Exact model count by exhaustive assignment enumeration, with the default
/// variable guard of [`DEFAULT_SAT_ENUM_LIMIT`].
pub fn count_sat(f: &CnfFormula) -> Result<BigCount> {
    count_sat_with_limit(f, DEFAULT_SAT_ENUM_LIMIT)
}

/// Exact model count with a caller-chosen variable guard (at most 63).
pub fn count_sat_with_limit(f: &CnfFormula, limit: usize) -> Result<BigCount> {
    f.validate()?;
    let limit = limit.min(63);
    if f.var_count > limit {
        return Err(Error::capacity(
            "CNF assignment enumeration",
            1u128 << f.var_count.min(127),
            1u128 << limit,
        ));
    }
    // Per-clause bit masks: satisfied iff a positive literal is set or a
    // negative literal is clear.
    let masks: Vec<(u64, u64)> = f
        .clauses
        .iter()
        .map(|clause| {
            let mut pos = 0u64;
            let mut neg = 0u64;
            for &lit in clause {
                let var = lit.unsigned_abs() as usize - 1;
                if lit > 0 {
                    pos |= 1 << var;
                } else {
                    neg |= 1 << var;
                }
            }
            (pos, neg)
        })
        .collect();
    let mut count = 0u64;
    for assignment in 0..(1u64 << f.var_count) {
        if masks
            .iter()
            .all(|&(pos, neg)| (assignment & pos) | (!assignment & neg) != 0)
        {
            count += 1;
        }
    }
    Ok(BigCount::from_u64(count))
}

// ---------------------------------------------------------------------------
// Decision from parity
// ---------------------------------------------------------------------------

/// Decide "is there at least one solution?" given only a parity oracle.
///
/// For every bias tuple `(j_1, ..., j_k)` in `[1, ceil(lg n) + 1]^k`,
/// repeated `max(1, ceil(lg n)^2)` times, each entry of list `i` is deleted
/// independently with probability `1 - 2^{-j_i}` and the oracle is asked for
/// the parity of the subsampled instance; the answer is `true` iff any query
/// reports odd. With an exact oracle there are no false positives (an odd
/// subinstance is a nonempty one); at the right bias the expected surviving
/// solution count is near 1, which makes an odd count likely, so solvable
/// instances are detected with high probability.
///
/// The instance is passed as bare lists so OV, XOR, and SUM instances can
/// share the implementation; the oracle sees the subsampled lists.
pub fn decision_from_parity<T, F>(lists: &[Vec<T>], mut parity_oracle: F, rng: &mut Rng) -> Result<bool>
where
    T: Clone,
    F: FnMut(&[Vec<T>]) -> Result<u8>,
{
    let k = lists.len();
    if k < 2 {
        return Err(Error::argument(format!(
            "decision_from_parity needs at least 2 lists, got {k}"
        )));
    }
    let n = lists.iter().map(Vec::len).max().unwrap_or(0);
    if n == 0 {
        return Ok(false);
    }
    let j_max = ceil_log2(n) + 1;
    let reps = (ceil_log2(n) * ceil_log2(n)).max(1);

    let mut biases = vec![1usize; k];
    loop {
        for _ in 0..reps {
            let sub: Vec<Vec<T>> = lists
                .iter()
                .zip(&biases)
                .map(|(list, &j)| {
                    let keep = 0.5f64.powi(j as i32);
                    list.iter()
                        .filter(|_| rng.gen_bool(keep))
                        .cloned()
                        .collect()
                })
                .collect();
            let bit = parity_oracle(&sub)?;
            if bit > 1 {
                return Err(Error::Oracle(format!(
                    "parity oracle returned {bit}, expected 0 or 1"
                )));
            }
            if bit == 1 {
                return Ok(true);
            }
        }
        // Advance the bias tuple in odometer order.
        let mut pos = k;
        loop {
            if pos == 0 {
                return Ok(false);
            }
            pos -= 1;
            if biases[pos] < j_max {
                biases[pos] += 1;
                for b in &mut biases[pos + 1..] {
                    *b = 1;
                }
                break;
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Instance hashing
// ---------------------------------------------------------------------------

/// Compress vector length with a random GF(2) linear map.
///
/// Every vector is multiplied by one shared random `d x d'` 0/1 matrix with
/// `d' = k * ceil(lg n) + 2`. XOR-zero tuples stay XOR-zero (linearity), and
/// each non-solution tuple becomes a false positive with probability
/// `2^{-d'}`, small enough that whole random instances usually gain none.
pub fn hash_xor_instance(inst: &XorInstance, rng: &mut Rng) -> Result<XorInstance> {
    inst.validate()?;
    let n = inst.max_list_len();
    let target = inst.k() * ceil_log2(n) + 2;
    if target >= inst.dimension {
        return Err(Error::argument(format!(
            "hash target dimension {target} is not below input dimension {}",
            inst.dimension
        )));
    }
    // One random d-bit column per output coordinate.
    let columns: Vec<BitVector> = (0..target)
        .map(|_| random_bitvector(inst.dimension, rng))
        .collect();
    let lists = inst
        .lists
        .iter()
        .map(|list| {
            list.iter()
                .map(|v| {
                    let bits: Vec<bool> = columns.iter().map(|c| v.dot_parity(c)).collect();
                    BitVector::from_bools(&bits)
                })
                .collect()
        })
        .collect();
    XorInstance::new(lists, target)
}

/// Compress value range by centered reduction modulo `m`.
///
/// Every value is replaced by its representative in
/// `[-floor(m/2), ceil(m/2) - 1]`. Zero-sum tuples map to tuples whose sum is
/// divisible by `m` (the map is a ring homomorphism composed with a shift by
/// a multiple of `m`), so a decision procedure downstream checks the targets
/// `{j * m : |j| <= ceil(k/2)}` instead of zero alone.
///
/// The generator argument mirrors [`hash_xor_instance`] for interface
/// uniformity; the centered-residue map itself is deterministic.
pub fn hash_sum_instance(inst: &SumInstance, modulus: &BigInt, _rng: &mut Rng) -> Result<SumInstance> {
    inst.validate()?;
    if *modulus < BigInt::from(2) {
        return Err(Error::argument(format!(
            "modulus must be at least 2, got {modulus}"
        )));
    }
    let half_up: BigInt = (modulus + BigInt::one()).div_floor(&BigInt::from(2));
    let lists = inst
        .lists
        .iter()
        .map(|list| {
            list.iter()
                .map(|v| {
                    let r = v.mod_floor(modulus);
                    if r >= half_up {
                        r - modulus
                    } else {
                        r
                    }
                })
                .collect()
        })
        .collect();
    SumInstance::new(lists)
}
