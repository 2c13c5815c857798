//! Constraint search with tie-grouped domain partitioning.
//!
//! When a value-ordering heuristic ranks several domain values equally, the
//! branching decision among them can be postponed: the tie is grouped into
//! one sub-domain and branched on as a whole, deferring the choice to a
//! sub-problem below the last branching level. This crate implements both
//! that *partitioning* brancher and plain *labelling* under depth-first
//! based strategies (DFS, LDS, DDS), an exact probability model that
//! compares the two leaf orderings, and two problem back-ends for
//! experiments: symmetric TSP with a reduced-cost heuristic from an
//! assignment relaxation, and partial Latin square completion with an
//! occurrence-count heuristic.
//!
//! The `partsearch` binary exposes the experiments; see the README.

pub mod alldiff;
pub mod assignment;
pub mod batch;
pub mod brancher;
pub mod cli;
pub mod domain;
pub mod error;
pub mod pls;
pub mod probsim;
pub mod search;
pub mod state;
pub mod tsp;

pub use brancher::{BranchMode, RankedValue, TieGroup};
pub use domain::Domain;
pub use error::{Error, Result};
pub use search::{BranchPolicy, Model, SearchLimits, SearchStats, Strategy, StrategyKind};
pub use state::{ProblemState, PropagationResult, Propagator, Space, Status};
