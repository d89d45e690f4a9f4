//! Hybrid k-clustering: choose at most `k` centers minimizing the sum of
//! `r`-distances `max(d(p, X) - r, 0)` from every client to its nearest center.
//!
//! The crate provides
//! - [`metric`]: Euclidean and explicit-matrix metric spaces, `r`-distances, costs and balls;
//! - [`ball`]: the ball-intersection subroutine (discrete scan and a continuous solver);
//! - [`solver`]: the randomized bicriteria scheme with upper bounds, greedy marking,
//!   witness sampling, the guess search driver and run diagnostics;
//! - [`coreset`]: anchor-set construction and the ring/net coreset;
//! - [`oracle`]: exhaustive reference optima used to certify the above;
//! - [`cli`]: the command layer behind the `hybrid` binary (generation, reports, replay, bench).

pub mod ball;
pub mod cli;
pub mod coreset;
pub mod error;
pub mod gen;
pub mod io;
pub mod metric;
pub mod oracle;
pub mod rng;
pub mod solver;

pub use error::{Error, Result};
pub use metric::{Instance, MetricSpace, Site, Solution, WeightedClientSet};
