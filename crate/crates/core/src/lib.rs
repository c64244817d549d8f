//! Core library for exploring proper, frugal and frozen (Δ+1)-colourings:
//! exhaustive enumeration, recolouring (meta) graphs, Glauber dynamics with
//! exact and statistical mixing diagnostics, the graph families the
//! experiments run on, and closed-form counting bounds.

pub mod bounds;
pub mod colouring;
pub mod constructions;
pub mod glauber;
pub mod graph;
pub mod reconfiguration;

use thiserror::Error;

/// Unified error type for the whole crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller violated a documented precondition.
    #[error("invalid input: {0}")]
    Input(String),
    /// An exhaustive computation ran out of its node/state/step budget.
    /// `partial` is whatever count had been accumulated when the budget hit.
    #[error("budget exhausted after {nodes} nodes (partial count {partial})")]
    Budget { nodes: u64, partial: u64 },
    /// The requested chain is not irreducible on the chosen state set.
    #[error("chain not irreducible on the chosen state set: {components} communicating classes")]
    NotIrreducible { components: usize },
    /// A structural guarantee that should hold for the input did not.
    #[error("structure violation: {0}")]
    Structure(String),
    /// The operation has no applicable computation route for this input.
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Render an exact rational as "p/q" (or "p" when q = 1) in JSON output.
pub(crate) fn serialize_ratio<S: serde::Serializer>(
    r: &num_rational::Ratio<u64>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

pub use colouring::{Colouring, Filter, LinearOrder, PartialColouring};
pub use graph::{Girth, Graph, VertexSet};
