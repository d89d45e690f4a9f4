//! The randomized bicriteria scheme: upper bounds and marking, the sampling loop
//! for a fixed guess, the guess-search driver, and run diagnostics.

pub mod bounds;
pub mod diag;
pub mod driver;
pub mod state;

pub use bounds::{compute_upper_bounds, greedy_mark, UpperBounds};
pub use diag::{
    bound_violations, find_consistent_labeling, scatter_diagnostics, upper_bound_violations,
    witness_mass, ClusterScatter, ScatterReport, WitnessMass,
};
pub use driver::{
    guess_grid, one_center, solve, BestSolution, GuessGrid, GuessReport, GuessStatus, RunRecord,
    SolveReport, SolverConfig,
};
pub use state::{
    default_iteration_cap, run_from, run_single, Branch, FailReason, IterationRecord, RunParams,
    RunResult, RunSolution, SolverState, StepOutcome,
};
