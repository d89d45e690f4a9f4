//! Density-based upper bounds `u(p)` and the greedy disjoint-ball marking.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::MetricSpace;

/// Relative offset realizing the open condition `alpha > r`.
pub const STRICT_OFFSET: f64 = 1e-9;

/// `u(p)` for every client.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UpperBounds {
    values: Vec<f64>,
}

impl UpperBounds {
    pub fn from_values(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, p: usize) -> f64 {
        self.values[p]
    }
}

/// `u(p) = 3 * min{alpha > r : |ball(p, alpha)| >= G / alpha}`.
///
/// `|ball(p, .)| * alpha` is nondecreasing and right-continuous, so the minimum is
/// attained at a client distance, at some `G / i`, or just above `r`.
pub fn compute_upper_bounds(space: &MetricSpace, guess: f64, r: f64) -> Result<UpperBounds> {
    if !(guess.is_finite() && guess > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "guess {guess} must be positive"
        )));
    }
    let n = space.n_clients();
    let just_above_r = r * (1.0 + STRICT_OFFSET);
    let mut values = Vec::with_capacity(n);
    let mut dists = Vec::with_capacity(n);
    let mut candidates = Vec::with_capacity(2 * n + 1);
    for p in 0..n {
        dists.clear();
        dists.extend((0..n).map(|q| space.client_dist(p, q)));
        dists.sort_by(f64::total_cmp);

        candidates.clear();
        candidates.extend(dists.iter().copied().filter(|&d| d > r));
        candidates.extend((1..=n).map(|i| guess / i as f64).filter(|&a| a > r));
        if just_above_r > r {
            candidates.push(just_above_r);
        }
        let feasible = |alpha: f64| {
            let count = dists.partition_point(|&d| d <= alpha);
            count as f64 * alpha >= guess
        };
        let alpha = candidates
            .iter()
            .copied()
            .filter(|&a| feasible(a))
            .fold(f64::INFINITY, f64::min);
        if !alpha.is_finite() {
            return Err(Error::GuessTooLarge { guess });
        }
        values.push(3.0 * alpha);
    }
    Ok(UpperBounds { values })
}

/// Processes clients by nondecreasing `u` (index breaks ties) and marks a client when
/// `d(p, q) > u(p) + u(q)` for every previously marked `q`.
pub fn greedy_mark(space: &MetricSpace, upper: &UpperBounds) -> Vec<usize> {
    let mut order: Vec<usize> = (0..space.n_clients()).collect();
    order.sort_by(|&a, &b| upper.get(a).total_cmp(&upper.get(b)).then(a.cmp(&b)));
    let mut marked: Vec<usize> = Vec::new();
    for p in order {
        let up = upper.get(p);
        if marked
            .iter()
            .all(|&q| space.client_dist(p, q) > up + upper.get(q))
        {
            marked.push(p);
        }
    }
    marked
}
