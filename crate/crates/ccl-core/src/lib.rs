//! Congested-clique simulation of quantum distributed graph algorithms:
//! all-pairs shortest paths with routing tables, approximate Steiner trees
//! and directed minimum spanning trees, with per-phase round accounting.

pub mod error;
pub mod apsp;
pub mod graph;
pub mod grover;
pub mod sim;
pub mod analyzer;
pub mod steiner;
pub mod dmst;
pub mod cli;

pub use error::{Error, Result};
