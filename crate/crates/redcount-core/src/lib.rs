//! Exact counting problems, factored representations, and the reductions
//! connecting them.
//!
//! The crate is organized around three layers:
//!
//! * **Ground truth** ([`instances`], [`bits`]): canonical OV / XOR / SUM /
//!   clique / CNF instance types with exact brute-force counters. Everything
//!   else is tested against these.
//! * **Factored layer** ([`factored`], [`lift`], [`xfactor`], [`ground`]):
//!   a compressed instance representation (each vector is a product of small
//!   sets), reductions between factored problems with different inner
//!   predicates, and the grounding reductions that turn factored instances
//!   back into ordinary ones while preserving the exact solution count.
//! * **Self-reduction and bridges** ([`selfred`], [`clique`], [`sat`]):
//!   worst-case-to-average-case correction of parity and integer oracles via
//!   low-degree polynomial masking, clique-counting gadgets, and the
//!   SAT-to-OV / OV-to-SAT encodings.
//!
//! [`serial`] and [`pipeline`] provide the file formats, seeded instance
//! distributions, composable reduction chains, and the verification harness
//! used by the `redcount` command-line tool.

pub mod bits;
pub mod clique;
pub mod error;
pub mod factored;
pub mod ground;
pub mod instances;
pub mod lift;
pub mod pipeline;
pub mod rng;
pub mod sat;
pub mod selfred;
pub mod serial;
pub mod xfactor;

pub use error::{Error, Result};
