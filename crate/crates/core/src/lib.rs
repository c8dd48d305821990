//! Edge sign prediction in directed signed networks.
//!
//! Signs are predicted from two node-level statistics: the fraction of
//! negative edges a node sends (trollness) and receives (unpleasantness).
//! The crate provides the graph store, feature estimation, batch and active
//! (query-selecting) classifiers, metrics, synthetic labelings with Monte
//! Carlo checks of the active-learning mistake bounds, and dataset ingestion.

pub mod active;
pub mod classify;
pub mod error;
pub mod eval;
pub mod experiment;
pub mod features;
pub mod graph;
pub mod ingest;
pub mod par;
pub mod seed;
pub mod synth;
pub mod wcc;

pub use error::{Error, Result};
pub use graph::{EdgeId, NodeId, Sign, SignedDigraph};
