//! Random generalized satisfiability and its phase transitions.
//!
//! - [`constraint`]: templates, implicates, sharp/coarse classification
//! - [`instance`], [`format`]: random instances and their text formats
//! - [`solver`]: DPLL, GF(2) elimination, brute force
//! - [`spine`]: spine, backbone and minimally unsatisfiable cores
//! - [`hypergraph`]: subformula density, deficiency, sparsity
//! - [`harness`]: Monte Carlo sweeps and threshold estimation

pub mod cnf;
pub mod constraint;
pub mod error;
pub mod format;
pub mod harness;
pub mod hypergraph;
pub mod instance;
pub mod rng;
pub mod solver;
pub mod spine;

pub use error::{Error, Result};
