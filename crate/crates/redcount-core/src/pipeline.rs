//! Reduction pipelines: samplers for the hard distributions, composable
//! reduction chains with provenance, presets, and a verification harness.
//!
//! A [`ReductionStep`] is one instance-to-instance transformation with a
//! declared input and output kind; a chain is a list of steps whose kinds
//! compose. [`run_chain`] applies a chain and records a provenance log:
//! the digest of every intermediate instance, each step's parameters, and
//! the per-step random stream derived from a single root seed by a
//! counter-based split, so any pipeline run can be replayed exactly.
//!
//! [`sample_distribution`] draws from the planted average-case input
//! distributions: a uniformly random factored instance is grounded into an
//! ordinary instance, and the factored pre-image is kept alongside the
//! output so tests can compare counts and parities against it.
//!
//! [`verify_step`] and [`verify_chain`] are the self-check harness: each
//! trial samples a random input within size bounds, applies the reduction,
//! brute-forces both sides with independent counters, and compares counts
//! and parities. Failing trials carry a serialized counterexample. Trials
//! run concurrently but the report is deterministic: every trial derives
//! its own stream from the root seed and the report is sorted by index.

use std::thread;

use serde_json::{json, Value};

use crate::bits::random_bitvector;
use crate::clique::{clique_to_ov, clique_to_sum, clique_to_xor, sample_gnp};
use crate::error::{Error, Result};
use crate::factored::{
    count_factored, sample_uniform_factored, FactoredInstance, FactoredVector, Predicate,
    TruthTable,
};
use crate::ground::{ground_ov, ground_sum, ground_xor};
use crate::instances::{
    count_cliques, count_ov, count_sat, count_sum, count_xor, BigCount, OvInstance, SumInstance,
    XorInstance,
};
use crate::lift::{count_blockwise_sum, factor_ov, factor_sum_blockwise, factor_xor};
use crate::rng::{self, Rng};
use crate::sat::{fov_to_sat, sample_uniform_cnf, sat_to_ov, split_padding};
use crate::serial::{instance_digest, to_json_line, Instance, InstanceKind};
use crate::xfactor::{
    generic_to_ov, generic_to_sum, generic_to_xor, ov_to_sum_padded, xor_to_sum_padded,
};
use crate::{clique, ground};

use rand::Rng as _;

/// Brute-force work ceiling per verify trial (approximate tuple evaluations).
pub const MAX_VERIFY_WORK: u128 = 100_000_000;

/// One instance-to-instance reduction with declared input/output kinds.
///
/// The `Mutated*` variants are deliberately broken copies of the grounding
/// and clique gadgets (one design constant flipped each). They exist so the
/// verification harness has known-bad reductions to detect; their declared
/// count contract is the honest one, which they do not meet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReductionStep {
    /// Split OV vectors into `g` singleton sets of `b` bits.
    FactorOv { b: usize, g: usize },
    /// Split XOR vectors into `g` singleton sets of `b` bits.
    FactorXor { b: usize, g: usize },
    /// Split SUM values into `g` blocks of `b` bits (blockwise, no carries).
    FactorSum { b: usize, g: usize },
    /// Re-encode any factored instance under the XOR predicate.
    GenericToXor,
    /// Re-encode any factored instance under the OV predicate.
    GenericToOv,
    /// Re-encode any factored instance under the SUM predicate.
    GenericToSum,
    /// Factored OV to factored (k+1)-SUM by digit padding.
    OvToSumPadded,
    /// Factored XOR to factored (k+1)-SUM by digit padding.
    XorToSumPadded,
    /// Ground a factored XOR instance into an ordinary XOR instance.
    GroundXor,
    /// Ground a factored OV instance into an ordinary OV instance.
    GroundOv,
    /// Ground a factored SUM instance into an ordinary SUM instance.
    GroundSum,
    /// Encode k-cliques of a graph as a XOR instance over C(k,2) lists.
    CliqueToXor { k: usize },
    /// Encode k-cliques of a graph as an OV instance.
    CliqueToOv { k: usize },
    /// Encode k-cliques of a graph as a SUM instance.
    CliqueToSum { k: usize },
    /// Split CNF variables into `groups` lists of partial assignments.
    SatToOv { groups: usize },
    /// Encode a factored OV instance as a CNF formula (exact counting).
    FovToSat,
    /// Broken grounding: XOR check slots complemented (for verify demos).
    MutatedGroundXor,
    /// Broken grounding: OV filler zeroed (for verify demos).
    MutatedGroundOv,
    /// Broken grounding: SUM closing label term unsigned (for verify demos).
    MutatedGroundSum,
    /// Broken clique gadget: consumer code complemented (for verify demos).
    MutatedCliqueXor { k: usize },
    /// Broken clique gadget: consumer term unsigned (for verify demos).
    MutatedCliqueSum { k: usize },
}

impl ReductionStep {
    /// Stable kebab-case step name used by the CLI and plan files.
    pub fn name(&self) -> &'static str {
        match self {
            ReductionStep::FactorOv { .. } => "factor-ov",
            ReductionStep::FactorXor { .. } => "factor-xor",
            ReductionStep::FactorSum { .. } => "factor-sum",
            ReductionStep::GenericToXor => "generic-to-xor",
            ReductionStep::GenericToOv => "generic-to-ov",
            ReductionStep::GenericToSum => "generic-to-sum",
            ReductionStep::OvToSumPadded => "ov-to-sum-padded",
            ReductionStep::XorToSumPadded => "xor-to-sum-padded",
            ReductionStep::GroundXor => "ground-xor",
            ReductionStep::GroundOv => "ground-ov",
            ReductionStep::GroundSum => "ground-sum",
            ReductionStep::CliqueToXor { .. } => "clique-to-xor",
            ReductionStep::CliqueToOv { .. } => "clique-to-ov",
            ReductionStep::CliqueToSum { .. } => "clique-to-sum",
            ReductionStep::SatToOv { .. } => "sat-to-ov",
            ReductionStep::FovToSat => "fov-to-sat",
            ReductionStep::MutatedGroundXor => "mutated-ground-xor",
            ReductionStep::MutatedGroundOv => "mutated-ground-ov",
            ReductionStep::MutatedGroundSum => "mutated-ground-sum",
            ReductionStep::MutatedCliqueXor { .. } => "mutated-clique-xor",
            ReductionStep::MutatedCliqueSum { .. } => "mutated-clique-sum",
        }
    }

    /// Kind of instance this step consumes.
    pub fn input_kind(&self) -> InstanceKind {
        match self {
            ReductionStep::FactorOv { .. } => InstanceKind::Ov,
            ReductionStep::FactorXor { .. } => InstanceKind::Xor,
            ReductionStep::FactorSum { .. } => InstanceKind::Sum,
            ReductionStep::GenericToXor
            | ReductionStep::GenericToOv
            | ReductionStep::GenericToSum
            | ReductionStep::OvToSumPadded
            | ReductionStep::XorToSumPadded
            | ReductionStep::GroundXor
            | ReductionStep::GroundOv
            | ReductionStep::GroundSum
            | ReductionStep::MutatedGroundXor
            | ReductionStep::MutatedGroundOv
            | ReductionStep::MutatedGroundSum
            | ReductionStep::FovToSat => InstanceKind::Factored,
            ReductionStep::CliqueToXor { .. }
            | ReductionStep::CliqueToOv { .. }
            | ReductionStep::CliqueToSum { .. }
            | ReductionStep::MutatedCliqueXor { .. }
            | ReductionStep::MutatedCliqueSum { .. } => InstanceKind::Graph,
            ReductionStep::SatToOv { .. } => InstanceKind::Cnf,
        }
    }

    /// Kind of instance this step produces.
    pub fn output_kind(&self) -> InstanceKind {
        match self {
            ReductionStep::FactorOv { .. }
            | ReductionStep::FactorXor { .. }
            | ReductionStep::FactorSum { .. }
            | ReductionStep::GenericToXor
            | ReductionStep::GenericToOv
            | ReductionStep::GenericToSum
            | ReductionStep::OvToSumPadded
            | ReductionStep::XorToSumPadded => InstanceKind::Factored,
            ReductionStep::GroundXor
            | ReductionStep::MutatedGroundXor
            | ReductionStep::CliqueToXor { .. }
            | ReductionStep::MutatedCliqueXor { .. } => InstanceKind::Xor,
            ReductionStep::GroundOv
            | ReductionStep::MutatedGroundOv
            | ReductionStep::CliqueToOv { .. }
            | ReductionStep::SatToOv { .. } => InstanceKind::Ov,
            ReductionStep::GroundSum
            | ReductionStep::MutatedGroundSum
            | ReductionStep::CliqueToSum { .. }
            | ReductionStep::MutatedCliqueSum { .. } => InstanceKind::Sum,
            ReductionStep::FovToSat => InstanceKind::Cnf,
        }
    }

    /// Step parameters as a JSON object (empty for parameterless steps).
    pub fn params(&self) -> Value {
        match self {
            ReductionStep::FactorOv { b, g }
            | ReductionStep::FactorXor { b, g }
            | ReductionStep::FactorSum { b, g } => json!({ "b": b, "g": g }),
            ReductionStep::CliqueToXor { k }
            | ReductionStep::CliqueToOv { k }
            | ReductionStep::CliqueToSum { k }
            | ReductionStep::MutatedCliqueXor { k }
            | ReductionStep::MutatedCliqueSum { k } => json!({ "k": k }),
            ReductionStep::SatToOv { groups } => json!({ "groups": groups }),
            _ => json!({}),
        }
    }

    /// Apply the step to an instance.
    ///
    /// Every current step is deterministic; the stream argument is the
    /// step's own split of the chain's root seed, reserved so randomized
    /// steps can be added without changing the provenance format.
    pub fn apply(&self, input: &Instance, _stream: &mut Rng) -> Result<Instance> {
        let mismatch = || {
            Error::Config(format!(
                "step {} expects a {} instance, got {}",
                self.name(),
                self.input_kind(),
                input.kind()
            ))
        };
        match self {
            ReductionStep::FactorOv { b, g } => match input {
                Instance::Ov(inner) => Ok(Instance::Factored(factor_ov(inner, *b, *g)?)),
                _ => Err(mismatch()),
            },
            ReductionStep::FactorXor { b, g } => match input {
                Instance::Xor(inner) => Ok(Instance::Factored(factor_xor(inner, *b, *g)?)),
                _ => Err(mismatch()),
            },
            ReductionStep::FactorSum { b, g } => match input {
                Instance::Sum(inner) => {
                    Ok(Instance::Factored(factor_sum_blockwise(inner, *b, *g)?))
                }
                _ => Err(mismatch()),
            },
            ReductionStep::GenericToXor => match input {
                Instance::Factored(inner) => Ok(Instance::Factored(generic_to_xor(inner)?)),
                _ => Err(mismatch()),
            },
            ReductionStep::GenericToOv => match input {
                Instance::Factored(inner) => Ok(Instance::Factored(generic_to_ov(inner)?)),
                _ => Err(mismatch()),
            },
            ReductionStep::GenericToSum => match input {
                Instance::Factored(inner) => Ok(Instance::Factored(generic_to_sum(inner)?)),
                _ => Err(mismatch()),
            },
            ReductionStep::OvToSumPadded => match input {
                Instance::Factored(inner) => Ok(Instance::Factored(ov_to_sum_padded(inner)?)),
                _ => Err(mismatch()),
            },
            ReductionStep::XorToSumPadded => match input {
                Instance::Factored(inner) => Ok(Instance::Factored(xor_to_sum_padded(inner)?)),
                _ => Err(mismatch()),
            },
            ReductionStep::GroundXor => match input {
                Instance::Factored(inner) => Ok(Instance::Xor(ground_xor(inner)?)),
                _ => Err(mismatch()),
            },
            ReductionStep::GroundOv => match input {
                Instance::Factored(inner) => Ok(Instance::Ov(ground_ov(inner)?)),
                _ => Err(mismatch()),
            },
            ReductionStep::GroundSum => match input {
                Instance::Factored(inner) => Ok(Instance::Sum(ground_sum(inner)?)),
                _ => Err(mismatch()),
            },
            ReductionStep::CliqueToXor { k } => match input {
                Instance::Graph(g) => Ok(Instance::Xor(clique_to_xor(g, *k)?)),
                _ => Err(mismatch()),
            },
            ReductionStep::CliqueToOv { k } => match input {
                Instance::Graph(g) => Ok(Instance::Ov(clique_to_ov(g, *k)?)),
                _ => Err(mismatch()),
            },
            ReductionStep::CliqueToSum { k } => match input {
                Instance::Graph(g) => Ok(Instance::Sum(clique_to_sum(g, *k)?)),
                _ => Err(mismatch()),
            },
            ReductionStep::SatToOv { groups } => match input {
                Instance::Cnf(f) => Ok(Instance::Ov(sat_to_ov(f, *groups)?)),
                _ => Err(mismatch()),
            },
            ReductionStep::FovToSat => match input {
                Instance::Factored(inner) => Ok(Instance::Cnf(fov_to_sat(inner)?)),
                _ => Err(mismatch()),
            },
            ReductionStep::MutatedGroundXor => match input {
                Instance::Factored(inner) => Ok(Instance::Xor(
                    ground::mutated::ground_xor_complemented_check(inner)?,
                )),
                _ => Err(mismatch()),
            },
            ReductionStep::MutatedGroundOv => match input {
                Instance::Factored(inner) => {
                    Ok(Instance::Ov(ground::mutated::ground_ov_zero_filler(inner)?))
                }
                _ => Err(mismatch()),
            },
            ReductionStep::MutatedGroundSum => match input {
                Instance::Factored(inner) => Ok(Instance::Sum(
                    ground::mutated::ground_sum_unsigned_close(inner)?,
                )),
                _ => Err(mismatch()),
            },
            ReductionStep::MutatedCliqueXor { k } => match input {
                Instance::Graph(g) => Ok(Instance::Xor(
                    clique::mutated::clique_to_xor_complemented_consumer(g, *k)?,
                )),
                _ => Err(mismatch()),
            },
            ReductionStep::MutatedCliqueSum { k } => match input {
                Instance::Graph(g) => Ok(Instance::Sum(
                    clique::mutated::clique_to_sum_unsigned_consumer(g, *k)?,
                )),
                _ => Err(mismatch()),
            },
        }
    }

    /// Solution count the output must have, brute-forced from the input.
    ///
    /// This is the step's declared counting contract, computed with the
    /// independent reference counters; the mutated variants declare the
    /// honest contract they deliberately fail.
    pub fn expected_output_count(&self, input: &Instance) -> Result<BigCount> {
        match (self, input) {
            (ReductionStep::FactorOv { .. }, Instance::Ov(inner)) => count_ov(inner),
            (ReductionStep::FactorXor { .. }, Instance::Xor(inner)) => count_xor(inner),
            (ReductionStep::FactorSum { b, g }, Instance::Sum(inner)) => {
                count_blockwise_sum(inner, *b, *g)
            }
            (
                ReductionStep::GenericToXor
                | ReductionStep::GenericToOv
                | ReductionStep::GenericToSum
                | ReductionStep::OvToSumPadded
                | ReductionStep::XorToSumPadded
                | ReductionStep::GroundXor
                | ReductionStep::GroundOv
                | ReductionStep::GroundSum
                | ReductionStep::MutatedGroundXor
                | ReductionStep::MutatedGroundOv
                | ReductionStep::MutatedGroundSum
                | ReductionStep::FovToSat,
                Instance::Factored(inner),
            ) => count_factored(inner),
            (
                ReductionStep::CliqueToXor { k }
                | ReductionStep::CliqueToOv { k }
                | ReductionStep::CliqueToSum { k }
                | ReductionStep::MutatedCliqueXor { k }
                | ReductionStep::MutatedCliqueSum { k },
                Instance::Graph(g),
            ) => count_cliques(g, *k),
            (ReductionStep::SatToOv { groups }, Instance::Cnf(f)) => {
                let pad = split_padding(f.var_count, *groups);
                let mut count = count_sat(f)?;
                for _ in 0..pad {
                    count = count.clone() + count;
                }
                Ok(count)
            }
            _ => Err(Error::Config(format!(
                "step {} expects a {} instance, got {}",
                self.name(),
                self.input_kind(),
                input.kind()
            ))),
        }
    }

    /// Propagate an already-known input-side count through this step.
    ///
    /// Equals the output count for every exact step; [`ReductionStep::SatToOv`]
    /// scales by `2^pad` for the padding variables it introduces.
    pub fn propagate_count(&self, input: &Instance, count: BigCount) -> Result<BigCount> {
        match (self, input) {
            (ReductionStep::SatToOv { groups }, Instance::Cnf(f)) => {
                let pad = split_padding(f.var_count, *groups);
                let mut scaled = count;
                for _ in 0..pad {
                    scaled = scaled.clone() + scaled;
                }
                Ok(scaled)
            }
            _ => Ok(count),
        }
    }
}

/// Optional named parameters collected from the CLI or a plan line.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StepParams {
    /// Bits per factored position.
    pub b: Option<usize>,
    /// Sets per factored vector.
    pub g: Option<usize>,
    /// Clique size.
    pub k: Option<usize>,
    /// Variable groups for the CNF split.
    pub groups: Option<usize>,
}

impl StepParams {
    fn require(&self, step: &str, key: &str) -> Result<usize> {
        let value = match key {
            "b" => self.b,
            "g" => self.g,
            "k" => self.k,
            "groups" => self.groups,
            _ => None,
        };
        value.ok_or_else(|| Error::Config(format!("step {step} requires parameter {key}")))
    }
}

/// All step names [`parse_step`] accepts, in display order.
pub fn step_names() -> Vec<&'static str> {
    ALL_STEP_TEMPLATES.iter().map(|s| s.name()).collect()
}

const ALL_STEP_TEMPLATES: &[ReductionStep] = &[
    ReductionStep::FactorOv { b: 1, g: 1 },
    ReductionStep::FactorXor { b: 1, g: 1 },
    ReductionStep::FactorSum { b: 1, g: 1 },
    ReductionStep::GenericToXor,
    ReductionStep::GenericToOv,
    ReductionStep::GenericToSum,
    ReductionStep::OvToSumPadded,
    ReductionStep::XorToSumPadded,
    ReductionStep::GroundXor,
    ReductionStep::GroundOv,
    ReductionStep::GroundSum,
    ReductionStep::CliqueToXor { k: 3 },
    ReductionStep::CliqueToOv { k: 3 },
    ReductionStep::CliqueToSum { k: 3 },
    ReductionStep::SatToOv { groups: 2 },
    ReductionStep::FovToSat,
    ReductionStep::MutatedGroundXor,
    ReductionStep::MutatedGroundOv,
    ReductionStep::MutatedGroundSum,
    ReductionStep::MutatedCliqueXor { k: 3 },
    ReductionStep::MutatedCliqueSum { k: 3 },
];

/// Build a step from its name and named parameters.
///
/// Missing required parameters and unknown names are configuration errors.
pub fn parse_step(name: &str, params: &StepParams) -> Result<ReductionStep> {
    match name {
        "factor-ov" => Ok(ReductionStep::FactorOv {
            b: params.require(name, "b")?,
            g: params.require(name, "g")?,
        }),
        "factor-xor" => Ok(ReductionStep::FactorXor {
            b: params.require(name, "b")?,
            g: params.require(name, "g")?,
        }),
        "factor-sum" => Ok(ReductionStep::FactorSum {
            b: params.require(name, "b")?,
            g: params.require(name, "g")?,
        }),
        "generic-to-xor" => Ok(ReductionStep::GenericToXor),
        "generic-to-ov" => Ok(ReductionStep::GenericToOv),
        "generic-to-sum" => Ok(ReductionStep::GenericToSum),
        "ov-to-sum-padded" => Ok(ReductionStep::OvToSumPadded),
        "xor-to-sum-padded" => Ok(ReductionStep::XorToSumPadded),
        "ground-xor" => Ok(ReductionStep::GroundXor),
        "ground-ov" => Ok(ReductionStep::GroundOv),
        "ground-sum" => Ok(ReductionStep::GroundSum),
        "clique-to-xor" => Ok(ReductionStep::CliqueToXor {
            k: params.require(name, "k")?,
        }),
        "clique-to-ov" => Ok(ReductionStep::CliqueToOv {
            k: params.require(name, "k")?,
        }),
        "clique-to-sum" => Ok(ReductionStep::CliqueToSum {
            k: params.require(name, "k")?,
        }),
        "sat-to-ov" => Ok(ReductionStep::SatToOv {
            groups: params.require(name, "groups")?,
        }),
        "fov-to-sat" => Ok(ReductionStep::FovToSat),
        "mutated-ground-xor" => Ok(ReductionStep::MutatedGroundXor),
        "mutated-ground-ov" => Ok(ReductionStep::MutatedGroundOv),
        "mutated-ground-sum" => Ok(ReductionStep::MutatedGroundSum),
        "mutated-clique-xor" => Ok(ReductionStep::MutatedCliqueXor {
            k: params.require(name, "k")?,
        }),
        "mutated-clique-sum" => Ok(ReductionStep::MutatedCliqueSum {
            k: params.require(name, "k")?,
        }),
        other => Err(Error::Config(format!(
            "unknown step {other:?}; known steps: {}",
            step_names().join(", ")
        ))),
    }
}

/// Parse a plan document: one JSON object per line, `{"step": name, ...}`.
///
/// Parameters appear as optional integer fields `b`, `g`, `k`, `groups`.
/// Blank lines and `#` comments are skipped.
pub fn parse_plan(text: &str) -> Result<Vec<ReductionStep>> {
    let mut steps = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let value: Value = serde_json::from_str(line)?;
        let name = value
            .get("step")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Config("plan line needs a \"step\" name".into()))?;
        let get = |key: &str| -> Result<Option<usize>> {
            match value.get(key) {
                None => Ok(None),
                Some(v) => v
                    .as_u64()
                    .map(|v| Some(v as usize))
                    .ok_or_else(|| Error::Config(format!("plan field {key:?} must be an integer"))),
            }
        };
        let params = StepParams {
            b: get("b")?,
            g: get("g")?,
            k: get("k")?,
            groups: get("groups")?,
        };
        steps.push(parse_step(name, &params)?);
    }
    Ok(steps)
}

/// Render steps as a plan document accepted by [`parse_plan`].
pub fn write_plan(steps: &[ReductionStep]) -> String {
    let mut out = String::new();
    for step in steps {
        let mut object = serde_json::Map::new();
        object.insert("step".into(), Value::String(step.name().into()));
        if let Value::Object(params) = step.params() {
            for (key, value) in params {
                object.insert(key, value);
            }
        }
        out.push_str(&Value::Object(object).to_string());
        out.push('\n');
    }
    out
}

/// Provenance record for one applied step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepRecord {
    /// Zero-based position in the chain.
    pub index: usize,
    /// Step name.
    pub step: String,
    /// Step parameters (JSON object).
    pub params: Value,
    /// Counter used to split this step's stream off the root seed.
    pub stream: u64,
    /// Digest of the instance the step consumed.
    pub input_digest: String,
    /// Digest of the instance the step produced.
    pub output_digest: String,
}

/// Full provenance log of a chain run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Provenance {
    /// Root seed all per-step streams are split from.
    pub root_seed: u64,
    /// One record per applied step, in order.
    pub records: Vec<StepRecord>,
}

impl Provenance {
    /// Render the log as a JSON value.
    pub fn to_json(&self) -> Value {
        json!({
            "root_seed": self.root_seed,
            "steps": self
                .records
                .iter()
                .map(|r| {
                    json!({
                        "index": r.index,
                        "step": r.step,
                        "params": r.params,
                        "stream": r.stream,
                        "input": r.input_digest,
                        "output": r.output_digest,
                    })
                })
                .collect::<Vec<_>>(),
        })
    }
}

/// Check that adjacent steps compose and the first accepts `input`.
pub fn check_chain(steps: &[ReductionStep], input_kind: InstanceKind) -> Result<()> {
    let mut current = input_kind;
    for (index, step) in steps.iter().enumerate() {
        if step.input_kind() != current {
            return Err(Error::Config(format!(
                "step {index} ({}) expects {} input but receives {}",
                step.name(),
                step.input_kind(),
                current
            )));
        }
        current = step.output_kind();
    }
    Ok(())
}

/// Apply a chain of steps, recording full provenance.
///
/// The empty chain is the identity. Every step gets its own random stream,
/// split from `root_seed` by the step index; the log records each stream
/// counter together with the digests of every intermediate instance, so a
/// run can be replayed and audited hash by hash.
pub fn run_chain(
    steps: &[ReductionStep],
    input: &Instance,
    root_seed: u64,
) -> Result<(Instance, Provenance)> {
    check_chain(steps, input.kind())?;
    let mut current = input.clone();
    let mut records = Vec::with_capacity(steps.len());
    for (index, step) in steps.iter().enumerate() {
        let stream = index as u64;
        let mut stream_rng = rng::split(root_seed, stream);
        let input_digest = instance_digest(&current);
        let next = step.apply(&current, &mut stream_rng)?;
        records.push(StepRecord {
            index,
            step: step.name().to_string(),
            params: step.params(),
            stream,
            input_digest,
            output_digest: instance_digest(&next),
        });
        current = next;
    }
    Ok((current, Provenance { root_seed, records }))
}

/// Name of a plantable average-case input distribution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum DistributionName {
    /// Grounded uniform factored OV.
    DOv,
    /// Grounded uniform factored XOR.
    DXor,
    /// Grounded uniform factored SUM.
    DSum,
}

impl DistributionName {
    /// Canonical lower-case tag (`d-ov`, `d-xor`, `d-sum`).
    pub fn tag(self) -> &'static str {
        match self {
            DistributionName::DOv => "d-ov",
            DistributionName::DXor => "d-xor",
            DistributionName::DSum => "d-sum",
        }
    }

    /// Parse a distribution name; accepts `d-ov`, `d_ov`, `D_OV`, etc.
    pub fn parse(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().replace('_', "-").as_str() {
            "d-ov" => Ok(DistributionName::DOv),
            "d-xor" => Ok(DistributionName::DXor),
            "d-sum" => Ok(DistributionName::DSum),
            other => Err(Error::argument(format!(
                "unknown distribution {other:?}; expected d-ov, d-xor, or d-sum"
            ))),
        }
    }

    fn predicate(self) -> Predicate {
        match self {
            DistributionName::DOv => Predicate::Ov,
            DistributionName::DXor => Predicate::Xor,
            DistributionName::DSum => Predicate::Sum,
        }
    }

    fn ground_step(self) -> ReductionStep {
        match self {
            DistributionName::DOv => ReductionStep::GroundOv,
            DistributionName::DXor => ReductionStep::GroundXor,
            DistributionName::DSum => ReductionStep::GroundSum,
        }
    }
}

impl std::fmt::Display for DistributionName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

/// A draw from one of the hard input distributions.
#[derive(Clone, Debug)]
pub struct DistributionSample {
    /// The grounded instance handed to a solver.
    pub instance: Instance,
    /// The uniform factored pre-image the instance was grounded from.
    pub preimage: FactoredInstance,
    /// Vectors per factored list before power-of-two padding.
    pub derived_n: usize,
    /// Vectors per factored list after padding with empty-set vectors.
    pub padded_n: usize,
}

/// Sample from a hard distribution with total size `N` over `K` lists.
///
/// The size accounting is `N = n * 2^b * g * k` with `k = K / g`: the
/// grounded instance has `K` lists and at most `n * 2^b` vectors each.
/// Requires `g | K`, `k >= 2`, and `2^b * K | N` with a derived `n >= 1`;
/// `n` is then padded to a power of two with empty-set vectors (which
/// contribute no tuples). The factored pre-image is uniform, the output is
/// its grounding under the matching gadget, and both are returned.
pub fn sample_distribution(
    name: DistributionName,
    size_n: u64,
    size_k: usize,
    b: usize,
    g: usize,
    rng: &mut Rng,
) -> Result<DistributionSample> {
    if g == 0 || size_k == 0 || b == 0 {
        return Err(Error::argument("K, b, and g must all be positive"));
    }
    if !size_k.is_multiple_of(g) {
        return Err(Error::argument(format!(
            "g must divide K: got K={size_k}, g={g}"
        )));
    }
    let k = size_k / g;
    if k < 2 {
        return Err(Error::argument(format!(
            "K/g must be at least 2: got K={size_k}, g={g}"
        )));
    }
    if b >= 24 {
        return Err(Error::argument(format!("b={b} too large to enumerate 2^b strings")));
    }
    let per_vector = (1u64 << b)
        .checked_mul(size_k as u64)
        .ok_or_else(|| Error::argument("2^b * K overflows"))?;
    if !size_n.is_multiple_of(per_vector) {
        return Err(Error::argument(format!(
            "size accounting N = n * 2^b * g * k needs (2^b * K) | N; \
             got N={size_n}, 2^b*K={per_vector}"
        )));
    }
    let derived_n = (size_n / per_vector) as usize;
    if derived_n < 1 {
        return Err(Error::argument(format!(
            "derived n = N / (2^b * K) = 0 for N={size_n}"
        )));
    }
    let padded_n = derived_n.next_power_of_two();
    let drawn = sample_uniform_factored(k, derived_n, g, b, name.predicate(), rng)?;
    let preimage = if padded_n == derived_n {
        drawn
    } else {
        let mut lists = drawn.lists;
        for list in &mut lists {
            while list.len() < padded_n {
                list.push(FactoredVector::new(b, vec![Vec::new(); g])?);
            }
        }
        FactoredInstance::new(lists, b, g, name.predicate())?
    };
    let mut stream = rng::split(rng.gen(), 0);
    let instance = name
        .ground_step()
        .apply(&Instance::Factored(preimage.clone()), &mut stream)?;
    Ok(DistributionSample {
        instance,
        preimage,
        derived_n,
        padded_n,
    })
}

/// A named desk-scale parameter set for one target/source pair.
///
/// The asymptotic parameter shapes (which of `b`, `g`, `n`, `k` scale like
/// `sqrt(K)`, `K^(2/3)`, `lg N`) follow the reduction roadmaps; the exact
/// small constants here are pinned choices so the presets run in
/// milliseconds, not asserted optima.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Preset {
    /// Preset name, e.g. `table2-ov-from-xor`.
    pub name: &'static str,
    /// What the preset demonstrates and which constants were pinned.
    pub description: &'static str,
    /// Distribution to sample.
    pub distribution: DistributionName,
    /// Total instance size `N`.
    pub size_n: u64,
    /// Number of output lists `K`.
    pub size_k: usize,
    /// Bits per factored position.
    pub b: usize,
    /// Sets per factored vector.
    pub g: usize,
}

/// All built-in presets.
///
/// `table2-*` target OV, `table3-*` target XOR, `table4-*` target SUM; the
/// suffix names the source hypothesis whose parameter shape is used.
pub fn presets() -> &'static [Preset] {
    &[
        Preset {
            name: "table2-ov-from-eth",
            description: "OV target, OV-shaped source (g = k = sqrt(K)); \
                          pinned K=4, g=2, b=2, N=64 so n=4.",
            distribution: DistributionName::DOv,
            size_n: 64,
            size_k: 4,
            b: 2,
            g: 2,
        },
        Preset {
            name: "table2-ov-from-xor",
            description: "OV target, XOR source (g = K^(2/3), k = K^(1/3)); \
                          pinned K=8, g=4, b=2, N=64 so n=2.",
            distribution: DistributionName::DOv,
            size_n: 64,
            size_k: 8,
            b: 2,
            g: 4,
        },
        Preset {
            name: "table2-ov-from-sum",
            description: "OV target, SUM source (g = K^(2/3), k = K^(1/3)); \
                          pinned K=8, g=4, b=2, N=64 so n=2.",
            distribution: DistributionName::DOv,
            size_n: 64,
            size_k: 8,
            b: 2,
            g: 4,
        },
        Preset {
            name: "table3-xor-from-eth",
            description: "XOR target, OV-shaped source (g = K^(2/3)); \
                          pinned K=8, g=4, b=2, N=64 so n=2.",
            distribution: DistributionName::DXor,
            size_n: 64,
            size_k: 8,
            b: 2,
            g: 4,
        },
        Preset {
            name: "table3-xor-from-xor",
            description: "XOR target, XOR source (g = k = sqrt(K)); \
                          pinned K=4, g=2, b=2, N=64 so n=4.",
            distribution: DistributionName::DXor,
            size_n: 64,
            size_k: 4,
            b: 2,
            g: 2,
        },
        Preset {
            name: "table3-xor-from-sum",
            description: "XOR target, SUM source (g = K^(2/3)); \
                          pinned K=8, g=4, b=2, N=64 so n=2.",
            distribution: DistributionName::DXor,
            size_n: 64,
            size_k: 8,
            b: 2,
            g: 4,
        },
        Preset {
            name: "table4-sum-from-eth",
            description: "SUM target, OV-shaped source (k near sqrt(K/lg K), \
                          g = k lg k); pinned K=4, g=2, b=2, N=64 so n=4.",
            distribution: DistributionName::DSum,
            size_n: 64,
            size_k: 4,
            b: 2,
            g: 2,
        },
        Preset {
            name: "table4-sum-from-xor",
            description: "SUM target, XOR source (k near sqrt(2K/lg K), \
                          g = k lg k); pinned K=4, g=2, b=2, N=64 so n=4.",
            distribution: DistributionName::DSum,
            size_n: 64,
            size_k: 4,
            b: 2,
            g: 2,
        },
        Preset {
            name: "table4-sum-from-sum",
            description: "SUM target, SUM source (g = k = sqrt(K)); \
                          pinned K=4, g=2, b=2, N=64 so n=4.",
            distribution: DistributionName::DSum,
            size_n: 64,
            size_k: 4,
            b: 2,
            g: 2,
        },
    ]
}

/// Look up a preset by name.
pub fn find_preset(name: &str) -> Result<&'static Preset> {
    presets()
        .iter()
        .find(|p| p.name == name)
        .ok_or_else(|| {
            let known: Vec<&str> = presets().iter().map(|p| p.name).collect();
            Error::Config(format!(
                "unknown preset {name:?}; known presets: {}",
                known.join(", ")
            ))
        })
}

/// The source problem a preset reduces from, inferred from its name.
fn preset_source(p: &Preset) -> InstanceKind {
    if p.name.ends_with("from-xor") {
        InstanceKind::Xor
    } else if p.name.ends_with("from-sum") {
        InstanceKind::Sum
    } else {
        // ETH-based presets enter through the OV side.
        InstanceKind::Ov
    }
}

/// Demonstration chain for a preset: factor the source problem, convert the
/// predicate to the target if it differs, and ground.
///
/// The factoring uses one bit per position (`b = 1`) with the preset's `g`,
/// so the chain accepts source instances of dimension `g` (values in
/// `[-2^(g-1), 2^(g-1))` for SUM sources).
pub fn preset_chain(p: &Preset) -> Vec<ReductionStep> {
    let source = preset_source(p);
    let target = p.distribution;
    let mut steps = Vec::new();
    steps.push(match source {
        InstanceKind::Xor => ReductionStep::FactorXor { b: 1, g: p.g },
        InstanceKind::Sum => ReductionStep::FactorSum { b: 1, g: p.g },
        _ => ReductionStep::FactorOv { b: 1, g: p.g },
    });
    let matches_target = matches!(
        (source, target),
        (InstanceKind::Ov, DistributionName::DOv)
            | (InstanceKind::Xor, DistributionName::DXor)
            | (InstanceKind::Sum, DistributionName::DSum)
    );
    if !matches_target {
        steps.push(match target {
            DistributionName::DOv => ReductionStep::GenericToOv,
            DistributionName::DXor => ReductionStep::GenericToXor,
            DistributionName::DSum => ReductionStep::GenericToSum,
        });
    }
    steps.push(target.ground_step());
    steps
}

/// Size bounds for verification sampling.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SizeBounds {
    /// Cap on list lengths, node counts, and variable counts.
    pub max_n: usize,
    /// Cap on the number of lists.
    pub max_k: usize,
}

impl Default for SizeBounds {
    fn default() -> Self {
        SizeBounds { max_n: 4, max_k: 3 }
    }
}

/// Outcome of one verification trial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrialReport {
    /// Trial index (also the stream counter used for its randomness).
    pub index: usize,
    /// Whether expected and actual counts (and parities) agreed.
    pub passed: bool,
    /// Count brute-forced on the input side, as a decimal string.
    pub expected: String,
    /// Count brute-forced on the output side, as a decimal string.
    pub actual: String,
    /// Short human-readable description of the sampled input.
    pub detail: String,
    /// Serialized input instance, present when the trial failed.
    pub counterexample: Option<String>,
}

/// Aggregated verification report.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyReport {
    /// Step or chain under test.
    pub target: String,
    /// Trial outcomes, sorted by index.
    pub trials: Vec<TrialReport>,
    /// Number of failing trials.
    pub failures: usize,
}

impl VerifyReport {
    /// True when every trial passed (vacuously true for zero trials).
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    /// Render the report as a JSON value.
    pub fn to_json(&self) -> Value {
        json!({
            "target": self.target,
            "trials": self
                .trials
                .iter()
                .map(|t| {
                    json!({
                        "index": t.index,
                        "passed": t.passed,
                        "expected": t.expected,
                        "actual": t.actual,
                        "detail": t.detail,
                        "counterexample": t.counterexample,
                    })
                })
                .collect::<Vec<_>>(),
            "failures": self.failures,
            "passed": self.passed(),
        })
    }
}

fn describe(inst: &Instance) -> String {
    match inst {
        Instance::Ov(i) => format!("ov k={} n={} d={}", i.k(), i.max_list_len(), i.dimension),
        Instance::Xor(i) => format!("xor k={} n={} d={}", i.k(), i.max_list_len(), i.dimension),
        Instance::Sum(i) => format!("sum k={} n={}", i.k(), i.max_list_len()),
        Instance::Graph(g) => format!("graph n={} m={}", g.node_count(), g.edge_count()),
        Instance::Cnf(f) => format!("cnf vars={} clauses={}", f.var_count, f.clause_count()),
        Instance::Factored(i) => format!(
            "factored pred={} k={} n={} g={} b={}",
            i.predicate.tag(),
            i.k(),
            i.max_list_len(),
            i.g,
            i.b
        ),
    }
}

/// Rough tuple-evaluation work of brute-forcing an instance's count.
fn brute_force_work(inst: &Instance) -> u128 {
    match inst {
        Instance::Ov(i) => {
            let tuples: u128 = i.lists.iter().map(|l| l.len().max(1) as u128).product();
            tuples.saturating_mul(i.dimension.max(1) as u128)
        }
        Instance::Xor(i) => {
            let tuples: u128 = i.lists.iter().map(|l| l.len().max(1) as u128).product();
            tuples.saturating_mul(i.dimension.max(1) as u128)
        }
        Instance::Sum(i) => i.lists.iter().map(|l| l.len().max(1) as u128).product(),
        Instance::Graph(g) => {
            let n = g.node_count().max(1) as u128;
            n.saturating_pow(4)
        }
        Instance::Cnf(f) => {
            let assignments = 1u128 << f.var_count.min(100);
            assignments.saturating_mul(f.clause_count().max(1) as u128)
        }
        Instance::Factored(i) => {
            let tuples: u128 = i.lists.iter().map(|l| l.len().max(1) as u128).product();
            // Per tuple: g set-products, each over the largest set of a list.
            let per_position: u128 = i
                .lists
                .iter()
                .map(|l| {
                    l.iter()
                        .flat_map(|v| v.sets().iter().map(|s| s.len()))
                        .max()
                        .unwrap_or(1)
                        .max(1) as u128
                })
                .product();
            tuples.saturating_mul((i.g.max(1) as u128).saturating_mul(per_position))
        }
    }
}

fn guarded_count(inst: &Instance) -> Result<BigCount> {
    let work = brute_force_work(inst);
    if work > MAX_VERIFY_WORK {
        return Err(Error::Capacity {
            context: "verify trial brute force".into(),
            estimated: work,
            limit: MAX_VERIFY_WORK,
        });
    }
    match inst {
        Instance::Ov(i) => count_ov(i),
        Instance::Xor(i) => count_xor(i),
        Instance::Sum(i) => count_sum(i),
        Instance::Cnf(f) => count_sat(f),
        Instance::Factored(i) => count_factored(i),
        Instance::Graph(_) => Err(Error::argument(
            "a bare graph has no solution count without a clique size",
        )),
    }
}

fn sample_uniform_bit_lists(
    lists: usize,
    n: usize,
    dimension: usize,
    rng: &mut Rng,
) -> Vec<Vec<crate::bits::BitVector>> {
    (0..lists)
        .map(|_| (0..n).map(|_| random_bitvector(dimension, rng)).collect())
        .collect()
}

/// Power-of-two list length within `max_n` (grounding-compatible).
fn pow2_len(max_n: usize, rng: &mut Rng) -> usize {
    if max_n >= 4 && rng.gen_bool(0.5) {
        4
    } else {
        2
    }
}

/// Draw a random input within bounds for a step's input kind.
///
/// Grounding steps need the matching predicate, power-of-two list lengths,
/// and (for SUM) a power-of-two list count, so sampling is steered by the
/// concrete step, not just its input kind. List lengths are always uniform
/// powers of two so factoring steps compose with grounding in chains.
pub fn sample_step_input(
    step: &ReductionStep,
    bounds: &SizeBounds,
    rng: &mut Rng,
) -> Result<Instance> {
    let max_n = bounds.max_n.max(1);
    let max_k = bounds.max_k.max(2);
    match step {
        ReductionStep::FactorOv { b, g } => {
            let lists = rng.gen_range(2..=max_k);
            let n = pow2_len(max_n, rng);
            let lists = sample_uniform_bit_lists(lists, n, b * g, rng);
            Ok(Instance::Ov(OvInstance::new(lists, b * g)?))
        }
        ReductionStep::FactorXor { b, g } => {
            let lists = rng.gen_range(2..=max_k);
            let n = pow2_len(max_n, rng);
            let lists = sample_uniform_bit_lists(lists, n, b * g, rng);
            Ok(Instance::Xor(XorInstance::new(lists, b * g)?))
        }
        ReductionStep::FactorSum { b, g } => {
            let width = b * g;
            if width == 0 || width > 20 {
                return Err(Error::argument(format!(
                    "factor-sum sampling supports 1..=20 total bits, got {width}"
                )));
            }
            let bound = 1i64 << (width - 1);
            let lists = rng.gen_range(2..=max_k);
            let n = pow2_len(max_n, rng);
            let lists: Vec<Vec<i64>> = (0..lists)
                .map(|_| (0..n).map(|_| rng.gen_range(-bound..bound)).collect())
                .collect();
            Ok(Instance::Sum(SumInstance::from_i64(&lists)?))
        }
        ReductionStep::GenericToXor | ReductionStep::GenericToOv | ReductionStep::GenericToSum => {
            let k = rng.gen_range(2..=max_k.min(3));
            let b = rng.gen_range(1..=2);
            let g = rng.gen_range(1..=2);
            let n = pow2_len(max_n, rng);
            let predicate = match rng.gen_range(0..4) {
                0 => Predicate::Ov,
                1 => Predicate::Xor,
                2 => Predicate::Sum,
                _ => Predicate::Custom(TruthTable::random(k, b, rng)?),
            };
            let inst = sample_uniform_factored(k, n, g, b, predicate, rng)?;
            Ok(Instance::Factored(inst))
        }
        ReductionStep::OvToSumPadded | ReductionStep::FovToSat => {
            let k = rng.gen_range(2..=max_k.min(3));
            let b = rng.gen_range(1..=2);
            let g = rng.gen_range(1..=2);
            let n = pow2_len(max_n, rng);
            let inst = sample_uniform_factored(k, n, g, b, Predicate::Ov, rng)?;
            Ok(Instance::Factored(inst))
        }
        ReductionStep::XorToSumPadded => {
            let k = rng.gen_range(2..=max_k.min(3));
            let b = rng.gen_range(1..=2);
            let g = rng.gen_range(1..=2);
            let n = pow2_len(max_n, rng);
            let inst = sample_uniform_factored(k, n, g, b, Predicate::Xor, rng)?;
            Ok(Instance::Factored(inst))
        }
        ReductionStep::GroundXor | ReductionStep::MutatedGroundXor => {
            let inst = sample_ground_input(Predicate::Xor, bounds, false, rng)?;
            Ok(Instance::Factored(inst))
        }
        ReductionStep::GroundOv | ReductionStep::MutatedGroundOv => {
            let inst = sample_ground_input(Predicate::Ov, bounds, false, rng)?;
            Ok(Instance::Factored(inst))
        }
        ReductionStep::GroundSum | ReductionStep::MutatedGroundSum => {
            let inst = sample_ground_input(Predicate::Sum, bounds, true, rng)?;
            Ok(Instance::Factored(inst))
        }
        ReductionStep::CliqueToXor { k }
        | ReductionStep::CliqueToOv { k }
        | ReductionStep::CliqueToSum { k }
        | ReductionStep::MutatedCliqueXor { k }
        | ReductionStep::MutatedCliqueSum { k } => {
            let n = rng.gen_range(*k..=max_n.max(*k));
            let p = [0.3, 0.6, 1.0][rng.gen_range(0..3)];
            Ok(Instance::Graph(sample_gnp(n, p, rng)?))
        }
        ReductionStep::SatToOv { .. } => {
            let vars = rng.gen_range(2..=max_n.clamp(2, 10));
            let clauses = rng.gen_range(1..=4);
            Ok(Instance::Cnf(sample_uniform_cnf(vars, clauses, rng)?))
        }
    }
}

fn sample_ground_input(
    predicate: Predicate,
    bounds: &SizeBounds,
    k_power_of_two: bool,
    rng: &mut Rng,
) -> Result<FactoredInstance> {
    let k = if k_power_of_two {
        2
    } else {
        rng.gen_range(2..=bounds.max_k.clamp(2, 3))
    };
    let n = if bounds.max_n >= 4 && rng.gen_bool(0.5) {
        4
    } else {
        2
    };
    let b = rng.gen_range(1..=2);
    let g = rng.gen_range(1..=2);
    sample_uniform_factored(k, n, g, b, predicate, rng)
}

fn run_trial(steps: &[ReductionStep], index: usize, bounds: &SizeBounds, root_seed: u64) -> TrialReport {
    let mut rng = rng::split(root_seed, index as u64);
    let failure = |detail: String, counterexample: Option<String>| TrialReport {
        index,
        passed: false,
        expected: String::new(),
        actual: String::new(),
        detail,
        counterexample,
    };
    let input = match sample_step_input(&steps[0], bounds, &mut rng) {
        Ok(input) => input,
        Err(err) => return failure(format!("sampling failed: {err}"), None),
    };
    let serialized = to_json_line(&input);
    let detail = describe(&input);

    let mut current = input.clone();
    let mut expected: Option<BigCount> = None;
    for (position, step) in steps.iter().enumerate() {
        expected = match expected {
            None => match step.expected_output_count(&current) {
                Ok(count) => Some(count),
                Err(err) => {
                    return failure(
                        format!("{detail}; input brute force failed: {err}"),
                        Some(serialized),
                    )
                }
            },
            Some(count) => match step.propagate_count(&current, count) {
                Ok(count) => Some(count),
                Err(err) => {
                    return failure(
                        format!("{detail}; count propagation failed: {err}"),
                        Some(serialized),
                    )
                }
            },
        };
        let mut stream = rng::split(root_seed, (index as u64) << 16 | position as u64);
        current = match step.apply(&current, &mut stream) {
            Ok(next) => next,
            Err(err) => {
                return failure(
                    format!("{detail}; step {} failed: {err}", step.name()),
                    Some(serialized),
                )
            }
        };
    }
    let expected = expected.expect("verify chain is never empty");
    let actual = match guarded_count(&current) {
        Ok(count) => count,
        Err(err) => {
            return failure(
                format!("{detail}; output brute force failed: {err}"),
                Some(serialized),
            )
        }
    };
    let passed = actual == expected;
    TrialReport {
        index,
        passed,
        expected: expected.to_decimal(),
        actual: actual.to_decimal(),
        detail,
        counterexample: if passed { None } else { Some(serialized) },
    }
}

/// Verify a chain: sample, apply, brute-force both sides, compare.
///
/// Trials are distributed over worker threads; each trial seeds its own
/// stream from `root_seed` and the report is sorted by trial index, so the
/// result is independent of scheduling. Zero trials yield an empty passing
/// report.
pub fn verify_chain(
    steps: &[ReductionStep],
    trials: usize,
    bounds: &SizeBounds,
    root_seed: u64,
) -> Result<VerifyReport> {
    if steps.is_empty() {
        return Err(Error::Config("cannot verify an empty chain".into()));
    }
    check_chain(steps, steps[0].input_kind())?;
    let target = steps
        .iter()
        .map(|s| s.name())
        .collect::<Vec<_>>()
        .join(" -> ");
    let workers = thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
        .min(8)
        .min(trials.max(1));
    let mut reports: Vec<TrialReport> = if trials == 0 {
        Vec::new()
    } else {
        thread::scope(|scope| {
            let mut handles = Vec::with_capacity(workers);
            for worker in 0..workers {
                let steps = &steps;
                let bounds = &bounds;
                handles.push(scope.spawn(move || {
                    let mut local = Vec::new();
                    let mut index = worker;
                    while index < trials {
                        local.push(run_trial(steps, index, bounds, root_seed));
                        index += workers;
                    }
                    local
                }));
            }
            let mut all = Vec::with_capacity(trials);
            for handle in handles {
                all.extend(handle.join().expect("verify worker panicked"));
            }
            all
        })
    };
    reports.sort_by_key(|r| r.index);
    let failures = reports.iter().filter(|r| !r.passed).count();
    Ok(VerifyReport {
        target,
        trials: reports,
        failures,
    })
}

/// Verify a single step; see [`verify_chain`].
pub fn verify_step(
    step: &ReductionStep,
    trials: usize,
    bounds: &SizeBounds,
    root_seed: u64,
) -> Result<VerifyReport> {
    verify_chain(std::slice::from_ref(step), trials, bounds, root_seed)
}

/// Count the solutions of an instance with the reference counters.
///
/// Graphs are rejected: clique counting needs an explicit `k`, so the CLI
/// handles graphs separately.
pub fn solve_count(inst: &Instance) -> Result<BigCount> {
    match inst {
        Instance::Ov(i) => count_ov(i),
        Instance::Xor(i) => count_xor(i),
        Instance::Sum(i) => count_sum(i),
        Instance::Cnf(f) => count_sat(f),
        Instance::Factored(i) => count_factored(i),
        Instance::Graph(_) => Err(Error::argument(
            "solving a graph requires a clique size; pass --clique-k",
        )),
    }
}
