//! Exact reference optima by exhaustive enumeration of facility subsets.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{alpha_distance, cost_unchecked, pow_z, MetricSpace, Site, Solution};

/// Largest number of subsets [`brute_force`] will enumerate.
pub const ENUMERATION_BUDGET: u128 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub opt_cost: f64,
    pub opt_solution: Solution,
    pub enumerated_count: u64,
    /// Set when the facility set is a candidate grid standing in for `R^dim`.
    #[serde(default)]
    pub grid_restricted: bool,
}

/// `C(n, k)` in 128-bit arithmetic, saturating.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

fn facility_count(space: &MetricSpace) -> Result<usize> {
    space
        .n_facilities()
        .ok_or_else(|| Error::Unsupported("exhaustive search needs a finite facility set".into()))
}

fn check_budget(m: usize, k: usize) -> Result<()> {
    let count = binomial(m, k);
    if count > ENUMERATION_BUDGET {
        return Err(Error::TooLarge {
            count,
            budget: ENUMERATION_BUDGET,
        });
    }
    Ok(())
}

/// Client-by-facility distance table, row-major by client.
fn distance_table(space: &MetricSpace, m: usize) -> Vec<f64> {
    let n = space.n_clients();
    let mut table = Vec::with_capacity(n * m);
    for p in 0..n {
        for f in 0..m {
            table.push(space.client_site_dist(p, &Site::Facility(f)));
        }
    }
    table
}

/// Advances `idx` to the next `k`-subset of `0..m` in lexicographic order.
pub(crate) fn next_subset(idx: &mut [usize], m: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if idx[i] < m - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Enumerates every subset starting with `first`, keeping the lexicographically first
/// minimizer of `score`.
fn scan_block<F>(m: usize, k: usize, first: usize, score: &F) -> Option<(f64, Vec<usize>, u64)>
where
    F: Fn(&[usize]) -> f64 + Sync,
{
    if first + k > m {
        return None;
    }
    let mut rest: Vec<usize> = (first + 1..first + k).collect();
    let mut subset = vec![0; k];
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut count = 0u64;
    loop {
        subset[0] = first;
        subset[1..].copy_from_slice(&rest);
        let v = score(&subset);
        count += 1;
        if best.as_ref().is_none_or(|(b, _)| v < *b) {
            best = Some((v, subset.clone()));
        }
        if k == 1 || !next_subset_above(&mut rest, m, first + 1) {
            break;
        }
    }
    best.map(|(v, s)| (v, s, count))
}

/// Next subset of `lo..m` of size `idx.len()` in lexicographic order.
fn next_subset_above(idx: &mut [usize], m: usize, lo: usize) -> bool {
    for v in idx.iter_mut() {
        *v -= lo;
    }
    let more = next_subset(idx, m - lo);
    for v in idx.iter_mut() {
        *v += lo;
    }
    more
}

fn minimize<F>(m: usize, k: usize, score: F) -> (f64, Vec<usize>, u64)
where
    F: Fn(&[usize]) -> f64 + Sync,
{
    let blocks: Vec<(f64, Vec<usize>, u64)> = (0..m)
        .into_par_iter()
        .filter_map(|first| scan_block(m, k, first, &score))
        .collect();
    let total = blocks.iter().map(|b| b.2).sum();
    let (v, s, _) = blocks
        .into_iter()
        .reduce(|a, b| if b.0 < a.0 { b } else { a })
        .expect("at least one subset");
    (v, s, total)
}

/// Exact `OPT_r` over all facility subsets of size `min(k, |F|)`; ties go to the
/// lexicographically first subset.
pub fn brute_force(space: &MetricSpace, k: usize, r: f64, z: f64) -> Result<OracleResult> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let m = facility_count(space)?;
    let kk = k.min(m);
    check_budget(m, kk)?;
    let n = space.n_clients();
    let table = distance_table(space, m);
    let (_, subset, count) = minimize(m, kk, |s| {
        (0..n)
            .map(|p| {
                let row = &table[p * m..(p + 1) * m];
                let d = s.iter().map(|&f| row[f]).fold(f64::INFINITY, f64::min);
                pow_z(alpha_distance(d, r), z)
            })
            .sum()
    });
    let centers: Vec<Site> = subset.iter().map(|&f| Site::Facility(f)).collect();
    let opt_cost = cost_unchecked(space, &centers, r, z);
    Ok(OracleResult {
        opt_cost,
        opt_solution: Solution::new(space, centers, k)?,
        enumerated_count: count,
        grid_restricted: false,
    })
}

/// [`brute_force`] over a continuous space with the facility set replaced by `candidates`.
/// The result is an upper bound on the continuous optimum, accurate to the grid resolution.
pub fn brute_force_grid(
    space: &MetricSpace,
    candidates: &[Vec<f64>],
    k: usize,
    r: f64,
    z: f64,
) -> Result<(MetricSpace, OracleResult)> {
    let restricted = space.with_candidate_facilities(candidates)?;
    let mut res = brute_force(&restricted, k, r, z)?;
    res.grid_restricted = true;
    Ok((restricted, res))
}

/// Axis-aligned grid with spacing `step` covering the clients' bounding box.
pub fn candidate_grid(space: &MetricSpace, step: f64) -> Result<Vec<Vec<f64>>> {
    let dim = space
        .dim()
        .ok_or_else(|| Error::Unsupported("candidate grids need coordinates".into()))?;
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "grid step {step} must be positive"
        )));
    }
    let mut lo = vec![f64::INFINITY; dim];
    let mut hi = vec![f64::NEG_INFINITY; dim];
    for p in 0..space.n_clients() {
        for (d, &c) in space
            .client_coords(p)
            .expect("euclidean")
            .iter()
            .enumerate()
        {
            lo[d] = lo[d].min(c);
            hi[d] = hi[d].max(c);
        }
    }
    let counts: Vec<usize> = (0..dim)
        .map(|d| ((hi[d] - lo[d]) / step).floor() as usize + 1)
        .collect();
    let total: u128 = counts.iter().map(|&c| c as u128).product();
    if total > ENUMERATION_BUDGET {
        return Err(Error::TooLarge {
            count: total,
            budget: ENUMERATION_BUDGET,
        });
    }
    let mut out = Vec::with_capacity(total as usize);
    let mut idx = vec![0usize; dim];
    loop {
        out.push((0..dim).map(|d| lo[d] + idx[d] as f64 * step).collect());
        let mut d = 0;
        loop {
            if d == dim {
                return Ok(out);
            }
            idx[d] += 1;
            if idx[d] < counts[d] {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}

/// Optimal `k`-center radius `min_X max_p d(p, X)` over facility subsets.
pub fn kcenter_radius(space: &MetricSpace, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let m = facility_count(space)?;
    let kk = k.min(m);
    check_budget(m, kk)?;
    let n = space.n_clients();
    let table = distance_table(space, m);
    let (v, _, _) = minimize(m, kk, |s| {
        (0..n)
            .map(|p| {
                let row = &table[p * m..(p + 1) * m];
                s.iter().map(|&f| row[f]).fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    });
    Ok(v)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BicriteriaCheck {
    pub ok: bool,
    pub size: usize,
    /// `cost_{(1+eps) r}(P, X)`.
    pub cost: f64,
    /// `(1 + eps) * opt_cost`.
    pub bound: f64,
}

/// `|X| <= k` and `cost_{(1+eps) r}(P, X) <= (1 + eps) OPT_r (1 + 1e-9)`.
pub fn verify_bicriteria(
    space: &MetricSpace,
    centers: &[Site],
    k: usize,
    r: f64,
    epsilon: f64,
    opt_cost: f64,
    z: f64,
) -> BicriteriaCheck {
    let cost = if centers.is_empty() {
        f64::INFINITY
    } else {
        cost_unchecked(space, centers, (1.0 + epsilon) * r, z)
    };
    let bound = (1.0 + epsilon) * opt_cost;
    BicriteriaCheck {
        ok: !centers.is_empty() && centers.len() <= k && cost <= bound * (1.0 + 1e-9),
        size: centers.len(),
        cost,
        bound,
    }
}
