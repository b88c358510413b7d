//! Exact solvers for matroid interdiction and the minimum-cost blocker
//! problem on graphic, uniform and partition matroids.

pub mod bounds;
pub mod error;
pub mod generate;
pub mod graph;
pub mod instance;
pub mod io;
pub mod matroid;
pub mod oracle;
pub mod search;

#[cfg(test)]
mod testutil;

pub use error::{Error, Result};
pub use graph::{Multigraph, UnionFindUndo};
pub use instance::{Instance, RawInstance};
pub use matroid::{Block, Matroid, MatroidSpec};
pub use search::{Mode, SearchStats, Solution, SolverConfig};
