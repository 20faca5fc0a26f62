//! Finds every complex solution of the power flow equations of small
//! networks by homotopy continuation, and relates the solution counts to
//! the networks' maximal-clique structure.

pub mod bounds;
pub mod casegen;
pub mod cliques;
pub mod error;
pub mod graph;
pub mod harness;
pub mod homotopy;
pub mod linalg;
pub mod pfmodel;
pub mod polysys;

pub use error::{Error, Result};
