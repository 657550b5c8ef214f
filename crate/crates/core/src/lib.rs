//! Boosting a constant-factor approximate maximum matching oracle into a
//! `(1 + ε)`-approximate maximum cardinality matching.

pub mod blossom;
pub mod corpus;
pub mod dynamic;
pub mod engine;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod matching;
pub mod oracle;
pub mod params;
pub mod problem1;
pub mod structure;

pub use blossom::{BlossomId, LaminarBlossomSet};
pub use error::{Error, Result};
pub use graph::{AdjacencyView, Graph, Vertex};
pub use matching::{AltPath, Arc, Matching};
pub use params::{Constants, Epsilon, PhaseParams};
