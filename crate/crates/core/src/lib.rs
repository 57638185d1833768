//! Certifier for the Shearer and cluster-expansion conditions of the
//! Lovász Local Lemma.
//!
//! Given a dependency graph and per-event probability bounds, the engines
//! decide whether each condition holds, produce the certified lower bound on
//! the probability that no event occurs, and check every identity and
//! inequality involved against explicit finite probability spaces.

pub mod cli;
pub mod error;
pub mod graph;
pub mod instances;
pub mod numeric;
pub mod oracle;
pub mod cluster;
pub mod shearer;
pub mod symmetric;

pub use error::{Error, Result};
pub use graph::{parse_graph, Graph, VertexSet};
pub use numeric::{Mode, NumericPolicy, Rational, Scalar, Sign};
