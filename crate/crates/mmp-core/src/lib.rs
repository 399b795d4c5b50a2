//! Library for working with MMP hypergraphs: ASCII-encoded hypergraphs whose
//! vertices stand for rays of an n-dimensional Hilbert space and whose
//! hyperedges stand for measurement contexts (sets of mutually orthogonal
//! rays). The crate parses and serializes the string language, computes
//! structural and contextuality measures (binary/non-binary verdicts,
//! classical vertex and hyperedge indices, criticality, parity witnesses),
//! handles coordinatizations over complex vectors, generates master sets
//! from small component pools, and evaluates the associated inequalities.

pub mod analysis;
pub mod assign;
pub mod catalog;
mod cli;
pub mod coord;
pub mod error;
pub mod ineq;
pub mod lang;
pub mod structure;

pub use cli::cli_main;
pub use error::{Error, Result};
pub use lang::{Hypergraph, VertexLabel};
