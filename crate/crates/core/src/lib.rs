//! Generating certified branching algorithms for vertex cover on graphs of
//! maximum degree three, and running them.

pub mod boundary;
pub mod branching;
pub mod config;
pub mod error;
pub mod graph;
pub mod measure;
pub mod rulegen;
pub mod runtime;
pub mod simplify;
pub mod subspace;
pub mod tree;

pub use config::{ChildLabel, LocalConfiguration};
pub use error::{Error, Result};
pub use graph::{enumerate_cycles, vc_oracle, Graph, Instance};
