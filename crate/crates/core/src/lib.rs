//! Workbench for parallel quantum query complexity: learning-graph primal
//! and dual programs, parallel adversary constructions, Johnson-graph walk
//! cost models, and small state-vector simulations.

pub mod adversary;
pub mod boolfn;
pub mod certstruct;
pub mod cli;
pub mod error;
pub mod learngraph;
pub mod linalg;
pub mod qsim;
pub mod report;
pub mod stats;
pub mod subsets;
pub mod walks;

pub use error::{Error, Result};
