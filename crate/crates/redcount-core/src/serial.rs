//! Instance serialization and content hashing.
//!
//! Every instance kind has a line-delimited JSON representation: one
//! instance per line, with a `"kind"` tag selecting the payload layout.
//! Bit vectors are written as arrays of 0/1 integers, arbitrary-precision
//! integers as decimal strings, and factored set members as fixed-width
//! 0/1 strings (most significant bit first), so files stay diffable and
//! independent of platform word size. CNF formulas additionally round-trip
//! through DIMACS text and graphs through a plain edge-list format.
//!
//! [`instance_digest`] hashes the canonical JSON line (SHA-256, hex); the
//! pipeline provenance log stores these digests, so two instances collide
//! exactly when their canonical serializations agree.

use std::fmt;
use std::io::{BufRead, Write};

use num_bigint::BigInt;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::bits::{format_bits, parse_bits, BitVector};
use crate::error::{Error, Result};
use crate::factored::{FactoredInstance, FactoredVector, Predicate, TruthTable};
use crate::instances::{CnfFormula, Graph, OvInstance, SumInstance, XorInstance};

/// Tag identifying the payload type of a serialized instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum InstanceKind {
    /// `k`-OV: lists of 0/1 vectors, tuple counted when the AND is zero.
    Ov,
    /// `k`-XOR: lists of 0/1 vectors, tuple counted when the XOR is zero.
    Xor,
    /// `k`-SUM: lists of integers, tuple counted when the sum is zero.
    Sum,
    /// Undirected simple graph (for clique counting).
    Graph,
    /// CNF formula (for model counting).
    Cnf,
    /// Factored instance: vectors of string sets under a predicate.
    Factored,
}

impl InstanceKind {
    /// Stable lower-case tag used in JSON envelopes and CLI arguments.
    pub fn tag(self) -> &'static str {
        match self {
            InstanceKind::Ov => "ov",
            InstanceKind::Xor => "xor",
            InstanceKind::Sum => "sum",
            InstanceKind::Graph => "graph",
            InstanceKind::Cnf => "cnf",
            InstanceKind::Factored => "factored",
        }
    }

    /// Parse a kind tag; the inverse of [`InstanceKind::tag`].
    pub fn parse(tag: &str) -> Result<Self> {
        match tag {
            "ov" => Ok(InstanceKind::Ov),
            "xor" => Ok(InstanceKind::Xor),
            "sum" => Ok(InstanceKind::Sum),
            "graph" => Ok(InstanceKind::Graph),
            "cnf" => Ok(InstanceKind::Cnf),
            "factored" => Ok(InstanceKind::Factored),
            other => Err(Error::argument(format!("unknown instance kind {other:?}"))),
        }
    }
}

impl fmt::Display for InstanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// A type-erased instance: the unit of file, CLI, and pipeline I/O.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Instance {
    Ov(OvInstance),
    Xor(XorInstance),
    Sum(SumInstance),
    Graph(Graph),
    Cnf(CnfFormula),
    Factored(FactoredInstance),
}

impl Instance {
    /// The kind tag of this instance.
    pub fn kind(&self) -> InstanceKind {
        match self {
            Instance::Ov(_) => InstanceKind::Ov,
            Instance::Xor(_) => InstanceKind::Xor,
            Instance::Sum(_) => InstanceKind::Sum,
            Instance::Graph(_) => InstanceKind::Graph,
            Instance::Cnf(_) => InstanceKind::Cnf,
            Instance::Factored(_) => InstanceKind::Factored,
        }
    }
}

fn bitvector_to_json(v: &BitVector) -> Value {
    Value::Array(v.iter().map(|b| json!(u8::from(b))).collect())
}

fn bitvector_from_json(v: &Value, expect_len: usize) -> Result<BitVector> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::structural("bit vector must be a JSON array of 0/1"))?;
    if arr.len() != expect_len {
        return Err(Error::structural(format!(
            "bit vector has {} entries, expected dimension {expect_len}",
            arr.len()
        )));
    }
    let mut bits = Vec::with_capacity(arr.len());
    for entry in arr {
        match entry.as_u64() {
            Some(0) => bits.push(false),
            Some(1) => bits.push(true),
            _ => return Err(Error::structural(format!("bit entry {entry} is not 0 or 1"))),
        }
    }
    Ok(BitVector::from_bools(&bits))
}

fn field<'v>(obj: &'v Value, key: &str) -> Result<&'v Value> {
    obj.get(key)
        .ok_or_else(|| Error::structural(format!("missing field {key:?}")))
}

fn usize_field(obj: &Value, key: &str) -> Result<usize> {
    field(obj, key)?
        .as_u64()
        .map(|v| v as usize)
        .ok_or_else(|| Error::structural(format!("field {key:?} must be a non-negative integer")))
}

fn predicate_to_json(p: &Predicate) -> Value {
    match p {
        Predicate::Custom(table) => json!({
            "table": table.entries().iter().map(|&b| u8::from(b)).collect::<Vec<_>>(),
            "tag": "custom",
        }),
        other => Value::String(other.tag().to_string()),
    }
}

fn predicate_from_json(v: &Value, k: usize, b: usize) -> Result<Predicate> {
    if let Some(tag) = v.as_str() {
        return match tag {
            "ov" => Ok(Predicate::Ov),
            "xor" => Ok(Predicate::Xor),
            "sum" => Ok(Predicate::Sum),
            other => Err(Error::structural(format!("unknown predicate tag {other:?}"))),
        };
    }
    let tag = field(v, "tag")?
        .as_str()
        .ok_or_else(|| Error::structural("predicate tag must be a string"))?;
    if tag != "custom" {
        return Err(Error::structural(format!("unknown predicate tag {tag:?}")));
    }
    let entries = field(v, "table")?
        .as_array()
        .ok_or_else(|| Error::structural("custom predicate table must be an array"))?;
    let mut table = Vec::with_capacity(entries.len());
    for e in entries {
        match e.as_u64() {
            Some(0) => table.push(false),
            Some(1) => table.push(true),
            _ => return Err(Error::structural("custom table entries must be 0 or 1")),
        }
    }
    Ok(Predicate::Custom(TruthTable::new(k, b, table)?))
}

/// Serialize an instance to its canonical JSON value (sorted keys).
pub fn to_json(inst: &Instance) -> Value {
    match inst {
        Instance::Ov(inner) => json!({
            "kind": "ov",
            "k": inner.lists.len(),
            "d": inner.dimension,
            "lists": inner
                .lists
                .iter()
                .map(|list| Value::Array(list.iter().map(bitvector_to_json).collect()))
                .collect::<Vec<_>>(),
        }),
        Instance::Xor(inner) => json!({
            "kind": "xor",
            "k": inner.lists.len(),
            "d": inner.dimension,
            "lists": inner
                .lists
                .iter()
                .map(|list| Value::Array(list.iter().map(bitvector_to_json).collect()))
                .collect::<Vec<_>>(),
        }),
        Instance::Sum(inner) => json!({
            "kind": "sum",
            "k": inner.lists.len(),
            "lists": inner
                .lists
                .iter()
                .map(|list| {
                    Value::Array(list.iter().map(|v| Value::String(v.to_string())).collect())
                })
                .collect::<Vec<_>>(),
        }),
        Instance::Graph(g) => json!({
            "kind": "graph",
            "nodes": g.node_count(),
            "edges": g
                .edges()
                .map(|(u, v)| json!([u, v]))
                .collect::<Vec<_>>(),
        }),
        Instance::Cnf(f) => json!({
            "kind": "cnf",
            "vars": f.var_count,
            "clauses": f.clauses,
        }),
        Instance::Factored(inst) => json!({
            "kind": "factored",
            "k": inst.k(),
            "n": inst.max_list_len(),
            "g": inst.g,
            "b": inst.b,
            "predicate": predicate_to_json(&inst.predicate),
            "lists": inst
                .lists
                .iter()
                .map(|list| {
                    Value::Array(
                        list.iter()
                            .map(|vector| {
                                Value::Array(
                                    vector
                                        .sets()
                                        .iter()
                                        .map(|set| {
                                            Value::Array(
                                                set.iter()
                                                    .map(|&s| {
                                                        Value::String(format_bits(s, inst.b))
                                                    })
                                                    .collect(),
                                            )
                                        })
                                        .collect(),
                                )
                            })
                            .collect(),
                    )
                })
                .collect::<Vec<_>>(),
        }),
    }
}

/// Serialize an instance as a single compact JSON line (no trailing newline).
pub fn to_json_line(inst: &Instance) -> String {
    to_json(inst).to_string()
}

/// Deserialize an instance from a JSON value produced by [`to_json`].
pub fn from_json(v: &Value) -> Result<Instance> {
    let kind = field(v, "kind")?
        .as_str()
        .ok_or_else(|| Error::structural("field \"kind\" must be a string"))?;
    match InstanceKind::parse(kind)? {
        InstanceKind::Ov => {
            let (lists, d) = vector_lists_from_json(v)?;
            Ok(Instance::Ov(OvInstance::new(lists, d)?))
        }
        InstanceKind::Xor => {
            let (lists, d) = vector_lists_from_json(v)?;
            Ok(Instance::Xor(XorInstance::new(lists, d)?))
        }
        InstanceKind::Sum => {
            let k = usize_field(v, "k")?;
            let raw = field(v, "lists")?
                .as_array()
                .ok_or_else(|| Error::structural("field \"lists\" must be an array"))?;
            if raw.len() != k {
                return Err(Error::structural(format!(
                    "header k={k} but {} lists present",
                    raw.len()
                )));
            }
            let mut lists = Vec::with_capacity(raw.len());
            for list in raw {
                let list = list
                    .as_array()
                    .ok_or_else(|| Error::structural("each list must be an array"))?;
                let mut out = Vec::with_capacity(list.len());
                for entry in list {
                    let s = entry
                        .as_str()
                        .ok_or_else(|| Error::structural("sum values must be decimal strings"))?;
                    let value: BigInt = s
                        .parse()
                        .map_err(|_| Error::structural(format!("bad decimal integer {s:?}")))?;
                    out.push(value);
                }
                lists.push(out);
            }
            Ok(Instance::Sum(SumInstance::new(lists)?))
        }
        InstanceKind::Graph => {
            let nodes = usize_field(v, "nodes")?;
            let raw = field(v, "edges")?
                .as_array()
                .ok_or_else(|| Error::structural("field \"edges\" must be an array"))?;
            let mut edges = Vec::with_capacity(raw.len());
            for e in raw {
                let pair = e
                    .as_array()
                    .filter(|p| p.len() == 2)
                    .ok_or_else(|| Error::structural("each edge must be a [u, v] pair"))?;
                let u = pair[0]
                    .as_u64()
                    .ok_or_else(|| Error::structural("edge endpoints must be integers"))?;
                let w = pair[1]
                    .as_u64()
                    .ok_or_else(|| Error::structural("edge endpoints must be integers"))?;
                edges.push((u as usize, w as usize));
            }
            Ok(Instance::Graph(Graph::new(nodes, edges)?))
        }
        InstanceKind::Cnf => {
            let vars = usize_field(v, "vars")?;
            let raw = field(v, "clauses")?
                .as_array()
                .ok_or_else(|| Error::structural("field \"clauses\" must be an array"))?;
            let mut clauses = Vec::with_capacity(raw.len());
            for clause in raw {
                let clause = clause
                    .as_array()
                    .ok_or_else(|| Error::structural("each clause must be an array"))?;
                let mut lits = Vec::with_capacity(clause.len());
                for lit in clause {
                    let lit = lit
                        .as_i64()
                        .ok_or_else(|| Error::structural("literals must be integers"))?;
                    lits.push(lit);
                }
                clauses.push(lits);
            }
            Ok(Instance::Cnf(CnfFormula::new(vars, clauses)?))
        }
        InstanceKind::Factored => {
            let k = usize_field(v, "k")?;
            let n = usize_field(v, "n")?;
            let g = usize_field(v, "g")?;
            let b = usize_field(v, "b")?;
            let predicate = predicate_from_json(field(v, "predicate")?, k, b)?;
            let raw = field(v, "lists")?
                .as_array()
                .ok_or_else(|| Error::structural("field \"lists\" must be an array"))?;
            if raw.len() != k {
                return Err(Error::structural(format!(
                    "header k={k} but {} lists present",
                    raw.len()
                )));
            }
            let mut lists = Vec::with_capacity(raw.len());
            for list in raw {
                let list = list
                    .as_array()
                    .ok_or_else(|| Error::structural("each list must be an array"))?;
                let mut vectors = Vec::with_capacity(list.len());
                for vector in list {
                    let sets_raw = vector
                        .as_array()
                        .ok_or_else(|| Error::structural("each vector must be an array of sets"))?;
                    if sets_raw.len() != g {
                        return Err(Error::structural(format!(
                            "vector has {} sets, header says g={g}",
                            sets_raw.len()
                        )));
                    }
                    let mut sets = Vec::with_capacity(g);
                    for set in sets_raw {
                        let set = set
                            .as_array()
                            .ok_or_else(|| Error::structural("each set must be an array"))?;
                        let mut members = Vec::with_capacity(set.len());
                        for s in set {
                            let s = s.as_str().ok_or_else(|| {
                                Error::structural("set members must be 0/1 strings")
                            })?;
                            members.push(parse_bits(s, b)?);
                        }
                        sets.push(members);
                    }
                    vectors.push(FactoredVector::new(b, sets)?);
                }
                lists.push(vectors);
            }
            let inst = FactoredInstance::new(lists, b, g, predicate)?;
            if inst.max_list_len() != n {
                return Err(Error::structural(format!(
                    "header n={n} but longest list has {} vectors",
                    inst.max_list_len()
                )));
            }
            Ok(Instance::Factored(inst))
        }
    }
}

fn vector_lists_from_json(v: &Value) -> Result<(Vec<Vec<BitVector>>, usize)> {
    let k = usize_field(v, "k")?;
    let d = usize_field(v, "d")?;
    let raw = field(v, "lists")?
        .as_array()
        .ok_or_else(|| Error::structural("field \"lists\" must be an array"))?;
    if raw.len() != k {
        return Err(Error::structural(format!(
            "header k={k} but {} lists present",
            raw.len()
        )));
    }
    let mut lists = Vec::with_capacity(raw.len());
    for list in raw {
        let list = list
            .as_array()
            .ok_or_else(|| Error::structural("each list must be an array"))?;
        let mut vectors = Vec::with_capacity(list.len());
        for vector in list {
            vectors.push(bitvector_from_json(vector, d)?);
        }
        lists.push(vectors);
    }
    Ok((lists, d))
}

/// Parse one JSON line into an instance.
pub fn parse_json_line(line: &str) -> Result<Instance> {
    let value: Value = serde_json::from_str(line)?;
    from_json(&value)
}

/// Read all instances from line-delimited JSON.
///
/// Blank lines and lines starting with `#` are skipped.
pub fn read_instances<R: BufRead>(reader: R) -> Result<Vec<Instance>> {
    let mut out = Vec::new();
    for line in reader.lines() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        out.push(parse_json_line(trimmed)?);
    }
    Ok(out)
}

/// Write instances as line-delimited JSON, one per line.
pub fn write_instances<W: Write>(mut writer: W, instances: &[Instance]) -> Result<()> {
    for inst in instances {
        writeln!(writer, "{}", to_json_line(inst))?;
    }
    Ok(())
}

/// SHA-256 digest (lower-case hex) of the canonical JSON line.
///
/// Canonical means [`to_json_line`]: compact separators, keys in sorted
/// order, decimal-string integers. Equal instances hash equally; any
/// change to lists, parameters, or kind changes the digest.
pub fn instance_digest(inst: &Instance) -> String {
    let mut hasher = Sha256::new();
    hasher.update(to_json_line(inst).as_bytes());
    let digest = hasher.finalize();
    let mut hex = String::with_capacity(64);
    for byte in digest {
        use fmt::Write as _;
        let _ = write!(hex, "{byte:02x}");
    }
    hex
}

/// Render a CNF formula in DIMACS format.
///
/// Emits `p cnf <vars> <clauses>` followed by one zero-terminated clause
/// per line.
pub fn cnf_to_dimacs(f: &CnfFormula) -> String {
    let mut out = String::new();
    out.push_str(&format!("p cnf {} {}\n", f.var_count, f.clauses.len()));
    for clause in &f.clauses {
        for lit in clause {
            out.push_str(&format!("{lit} "));
        }
        out.push_str("0\n");
    }
    out
}

/// Parse a DIMACS CNF document.
///
/// Accepts `c` comment lines anywhere before or between clauses; clauses
/// may span lines and are terminated by a literal `0`. The clause count in
/// the `p cnf` header must match the body.
pub fn cnf_from_dimacs(text: &str) -> Result<CnfFormula> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses: Vec<Vec<i64>> = Vec::new();
    let mut current: Vec<i64> = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("p ") {
            if header.is_some() {
                return Err(Error::structural("duplicate DIMACS problem line"));
            }
            let mut parts = rest.split_whitespace();
            if parts.next() != Some("cnf") {
                return Err(Error::structural("problem line must be \"p cnf <vars> <clauses>\""));
            }
            let vars = parts
                .next()
                .and_then(|s| s.parse::<usize>().ok())
                .ok_or_else(|| Error::structural("bad variable count in problem line"))?;
            let count = parts
                .next()
                .and_then(|s| s.parse::<usize>().ok())
                .ok_or_else(|| Error::structural("bad clause count in problem line"))?;
            header = Some((vars, count));
            continue;
        }
        if header.is_none() {
            return Err(Error::structural("clause data before DIMACS problem line"));
        }
        for token in line.split_whitespace() {
            let lit: i64 = token
                .parse()
                .map_err(|_| Error::structural(format!("bad DIMACS literal {token:?}")))?;
            if lit == 0 {
                clauses.push(std::mem::take(&mut current));
            } else {
                current.push(lit);
            }
        }
    }
    let (vars, count) = header.ok_or_else(|| Error::structural("missing DIMACS problem line"))?;
    if !current.is_empty() {
        return Err(Error::structural("unterminated final clause (missing 0)"));
    }
    if clauses.len() != count {
        return Err(Error::structural(format!(
            "problem line declares {count} clauses but {} found",
            clauses.len()
        )));
    }
    CnfFormula::new(vars, clauses)
}

/// Render a graph as edge-list text.
///
/// The first line is the node count; every following line is one `u v`
/// edge with `u < v`.
pub fn graph_to_edge_list(g: &Graph) -> String {
    let mut out = format!("{}\n", g.node_count());
    for (u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

/// Parse edge-list text produced by [`graph_to_edge_list`].
///
/// Lines starting with `#` are comments; the first data line is the node
/// count and each later line is one `u v` edge (0-indexed endpoints).
pub fn graph_from_edge_list(text: &str) -> Result<Graph> {
    let mut nodes: Option<usize> = None;
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        match nodes {
            None => {
                let n = parts
                    .next()
                    .and_then(|s| s.parse::<usize>().ok())
                    .ok_or_else(|| Error::structural("first line must be the node count"))?;
                if parts.next().is_some() {
                    return Err(Error::structural("node-count line must hold a single number"));
                }
                nodes = Some(n);
            }
            Some(_) => {
                let u = parts
                    .next()
                    .and_then(|s| s.parse::<usize>().ok())
                    .ok_or_else(|| Error::structural(format!("bad edge line {line:?}")))?;
                let v = parts
                    .next()
                    .and_then(|s| s.parse::<usize>().ok())
                    .ok_or_else(|| Error::structural(format!("bad edge line {line:?}")))?;
                if parts.next().is_some() {
                    return Err(Error::structural(format!("edge line {line:?} has extra tokens")));
                }
                edges.push((u, v));
            }
        }
    }
    let nodes = nodes.ok_or_else(|| Error::structural("empty edge-list document"))?;
    Graph::new(nodes, edges)
}
