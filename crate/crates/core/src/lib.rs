//! Reduction pipeline from positive NAE-3-SAT to degree balancing, to
//! mim/sim-balancing of partitioned graphs, and to mim/sim-width, with exact
//! oracles and witness checkers for every stage.

pub mod bits;
pub mod cli;
pub mod doc;
pub mod error;
pub mod formula;
pub mod graph;
pub mod layout;
pub mod matching;
pub mod red1;
pub mod red2;
pub mod red3;
pub mod tree;
pub mod wgraph;
pub mod widths;

pub use error::{Error, Result};
