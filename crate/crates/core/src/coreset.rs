//! Anchor sets and the ring/net coreset.
//!
//! An anchor set `T` has `cost_r(P, T) <= alpha * OPT_r`. With `R = cost_r(P, T) / (alpha n)`,
//! every client is associated with the smallest ring `ball(t_i, r + 2^j R)` containing it,
//! each ring's associated clients are covered by a greedy net of radius `eps 2^j R / (4 alpha)`,
//! and every net point becomes a coreset member weighted by the size of its cell.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{cost_unchecked, nearest_dist, Instance, MetricSpace, Site, WeightedClientSet};
use crate::oracle::{self, next_subset};
use crate::solver::{self, SolverConfig};

/// Factor assumed for `alpha` when no exact optimum is available.
pub const ANALYTIC_ALPHA: f64 = 36.0;

/// A net point and the clients assigned to it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetCell {
    pub point: usize,
    pub members: Vec<usize>,
}

/// Greedy net over `clients` (processed in the given order): the first unassigned client
/// opens a cell and absorbs every unassigned client within `radius` of it.
pub fn greedy_net(space: &MetricSpace, clients: &[usize], radius: f64) -> Vec<NetCell> {
    let mut assigned = vec![false; clients.len()];
    let mut cells = Vec::new();
    for a in 0..clients.len() {
        if assigned[a] {
            continue;
        }
        let q = clients[a];
        let mut members = Vec::new();
        for b in a..clients.len() {
            if !assigned[b] && space.client_dist(q, clients[b]) <= radius {
                assigned[b] = true;
                members.push(clients[b]);
            }
        }
        cells.push(NetCell { point: q, members });
    }
    cells
}

/// Greedy net of `ball(center, big_radius)` at `small_radius`, lowest client index first.
pub fn net_decompose(
    space: &MetricSpace,
    center: &Site,
    big_radius: f64,
    small_radius: f64,
) -> Result<Vec<NetCell>> {
    if !(small_radius > 0.0 && small_radius <= big_radius) {
        return Err(Error::InvalidArgument(format!(
            "net radii must satisfy 0 < {small_radius} <= {big_radius}"
        )));
    }
    let ball = space.ball(center, big_radius)?;
    Ok(greedy_net(space, &ball, small_radius))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseSource {
    /// Centers returned by the bicriteria solver.
    Solver,
    /// Farthest-point seeding, used when the solver found nothing.
    FarthestPoint,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlphaSource {
    /// `max(1, cost_r(P, T) / OPT_r)` with `OPT_r` from exhaustive search.
    Measured,
    /// [`ANALYTIC_ALPHA`].
    Analytic,
    /// `OPT_r = 0 < cost_r(P, T)`: no finite factor exists.
    Unbounded,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnchorSet {
    pub points: Vec<Site>,
    pub base: Vec<Site>,
    pub base_source: BaseSource,
    pub alpha_bound: f64,
    pub alpha_source: AlphaSource,
    /// `ceil(|T| / k)`.
    pub gamma_bound: usize,
    /// `cost_r(P, T)`.
    pub cost: f64,
    /// `OPT_r` when it could be enumerated.
    pub opt_cost: Option<f64>,
}

impl AnchorSet {
    /// `cost_r(P, T) / OPT_r`, when `OPT_r` is known and positive.
    pub fn measured_ratio(&self) -> Option<f64> {
        match self.opt_cost {
            Some(o) if o > 0.0 => Some(self.cost / o),
            Some(_) if self.cost == 0.0 => Some(1.0),
            Some(_) => Some(f64::INFINITY),
            None => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnchorOptions {
    /// Error parameter of the solver run that produces the base set.
    pub epsilon: f64,
    pub repetitions: usize,
    pub seed: u64,
}

impl Default for AnchorOptions {
    fn default() -> Self {
        Self {
            epsilon: 0.99,
            repetitions: 20,
            seed: 0,
        }
    }
}

/// Farthest-point seeding: start next to client 0, then repeatedly serve the client
/// farthest from the chosen centers with its nearest candidate.
pub fn farthest_point_centers(space: &MetricSpace, k: usize) -> Vec<Site> {
    let candidates: Vec<Site> = if space.is_discrete() {
        space.facility_sites()
    } else {
        (0..space.n_clients())
            .map(|p| Site::Coords(space.client_coords(p).expect("euclidean").to_vec()))
            .collect()
    };
    let nearest_candidate = |p: usize| {
        candidates
            .iter()
            .min_by(|a, b| {
                space
                    .client_site_dist(p, a)
                    .total_cmp(&space.client_site_dist(p, b))
            })
            .expect("nonempty candidate set")
            .clone()
    };
    let mut centers = vec![nearest_candidate(0)];
    while centers.len() < k {
        let (p, d) = (0..space.n_clients())
            .map(|p| (p, nearest_dist(space, p, &centers)))
            .fold(
                (0, f64::NEG_INFINITY),
                |acc, x| if x.1 > acc.1 { x } else { acc },
            );
        if d <= 0.0 {
            break;
        }
        let c = nearest_candidate(p);
        if centers.contains(&c) {
            break;
        }
        centers.push(c);
    }
    centers
}

/// `T = A ∪ {net points of ball(a, 12r) over P ∪ F at radius r/2 : a in A}`.
pub fn build_anchor_set(instance: &Instance, options: &AnchorOptions) -> Result<AnchorSet> {
    let space = &instance.space;
    let (k, r) = (instance.k, instance.r);
    let mut cfg = SolverConfig::new(options.epsilon);
    cfg.repetitions = options.repetitions;
    cfg.seed = options.seed;
    let (base, base_source) = match solver::solve(instance, &cfg) {
        Ok(rep) => (
            rep.best
                .expect("successful solve has a best solution")
                .centers,
            BaseSource::Solver,
        ),
        Err(Error::NoSolutionFound(_)) => {
            (farthest_point_centers(space, k), BaseSource::FarthestPoint)
        }
        Err(e) => return Err(e),
    };

    let mut points = base.clone();
    if r > 0.0 {
        let candidates: Vec<Site> = (0..space.n_clients())
            .map(Site::Client)
            .chain(space.facility_sites())
            .collect();
        for a in &base {
            let near: Vec<&Site> = candidates
                .iter()
                .filter(|c| space.dist_unchecked(a, c) <= 12.0 * r)
                .collect();
            let mut assigned = vec![false; near.len()];
            for i in 0..near.len() {
                if assigned[i] {
                    continue;
                }
                for j in i..near.len() {
                    if !assigned[j] && space.dist_unchecked(near[i], near[j]) <= r / 2.0 {
                        assigned[j] = true;
                    }
                }
                if !points.contains(near[i]) {
                    points.push(near[i].clone());
                }
            }
        }
    }

    let cost = cost_unchecked(space, &points, r, 1.0);
    let opt_cost = if space.is_discrete() {
        match oracle::brute_force(space, k, r, 1.0) {
            Ok(res) => Some(res.opt_cost),
            Err(Error::TooLarge { .. }) => None,
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    let (alpha_bound, alpha_source) = match opt_cost {
        Some(o) if o > 0.0 => ((cost / o).max(1.0), AlphaSource::Measured),
        Some(_) if cost == 0.0 => (1.0, AlphaSource::Measured),
        Some(_) => (f64::MAX, AlphaSource::Unbounded),
        None => (ANALYTIC_ALPHA, AlphaSource::Analytic),
    };
    Ok(AnchorSet {
        gamma_bound: points.len().div_ceil(k),
        points,
        base,
        base_source,
        alpha_bound,
        alpha_source,
        cost,
        opt_cost,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoresetOutput {
    pub coreset: WeightedClientSet,
    /// `R = cost_r(P, T) / (alpha n)`; zero for the exact fallback.
    pub unit: f64,
    /// Largest ring level `ceil(2 log2 ceil(alpha n))`.
    pub max_level: u32,
    /// Clients outside every ring, clamped to the outermost level.
    pub uncovered: usize,
    /// Set when only coincident clients were merged.
    pub exact: bool,
}

fn exact_merge(space: &MetricSpace) -> Result<WeightedClientSet> {
    let all: Vec<usize> = (0..space.n_clients()).collect();
    let cells = greedy_net(space, &all, 0.0);
    WeightedClientSet::new(
        space,
        cells
            .iter()
            .map(|c| (c.point, c.members.len() as u64))
            .collect(),
    )
}

/// Builds the weighted coreset for radius `r` and error `epsilon` from an anchor set.
pub fn build_coreset(
    space: &MetricSpace,
    r: f64,
    epsilon: f64,
    anchors: &AnchorSet,
) -> Result<CoresetOutput> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "epsilon {epsilon} must lie in (0, 1)"
        )));
    }
    if anchors.points.is_empty() {
        return Err(Error::EmptySolution);
    }
    if anchors.alpha_bound.is_nan() || anchors.alpha_bound < 1.0 {
        return Err(Error::InvalidArgument(
            "alpha bound must be at least 1".into(),
        ));
    }
    let n = space.n_clients();
    let t = &anchors.points;
    let cost = cost_unchecked(space, t, r, 1.0);
    if cost == 0.0 || anchors.alpha_source == AlphaSource::Unbounded {
        return Ok(CoresetOutput {
            coreset: exact_merge(space)?,
            unit: 0.0,
            max_level: 0,
            uncovered: 0,
            exact: true,
        });
    }
    let alpha = anchors.alpha_bound;
    let unit = cost / (alpha * n as f64);
    let max_level = (2.0 * (alpha * n as f64).ceil().log2()).ceil().max(0.0) as u32;

    // smallest ring per client: level first, then anchor index
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); t.len() * (max_level as usize + 1)];
    let mut uncovered = 0;
    for p in 0..n {
        let dists: Vec<f64> = t.iter().map(|s| space.client_site_dist(p, s)).collect();
        let dr = dists.iter().copied().fold(f64::INFINITY, f64::min) - r;
        let mut level = 0u32;
        while level < max_level && dr > unit * 2f64.powi(level as i32) {
            level += 1;
        }
        let radius = r + unit * 2f64.powi(level as i32);
        let anchor = match dists.iter().position(|&d| d <= radius) {
            Some(i) => i,
            None => {
                uncovered += 1;
                dists
                    .iter()
                    .enumerate()
                    .min_by(|a, b| a.1.total_cmp(b.1))
                    .map(|(i, _)| i)
                    .expect("nonempty anchor set")
            }
        };
        groups[anchor * (max_level as usize + 1) + level as usize].push(p);
    }

    let mut members = Vec::new();
    for (g, clients) in groups.iter().enumerate() {
        if clients.is_empty() {
            continue;
        }
        let level = (g % (max_level as usize + 1)) as i32;
        let cell = epsilon * 2f64.powi(level) * unit / (4.0 * alpha);
        for c in greedy_net(space, clients, cell) {
            members.push((c.point, c.members.len() as u64));
        }
    }
    members.sort_unstable();
    Ok(CoresetOutput {
        coreset: WeightedClientSet::new(space, members)?,
        unit,
        max_level,
        uncovered,
        exact: false,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub solutions_checked: u64,
    pub violations: u64,
    /// Largest `|wcost - cost| / cost` over solutions with positive cost.
    pub max_relative_error: f64,
}

/// Compares weighted and true cost on every facility subset of size `1..=k`.
pub fn certify(
    space: &MetricSpace,
    set: &WeightedClientSet,
    k: usize,
    r: f64,
    epsilon: f64,
) -> Result<Certificate> {
    let m = space
        .n_facilities()
        .ok_or_else(|| Error::Unsupported("certification needs a finite facility set".into()))?;
    let total: u128 = (1..=k.min(m)).map(|s| oracle::binomial(m, s)).sum();
    if total > oracle::ENUMERATION_BUDGET {
        return Err(Error::TooLarge {
            count: total,
            budget: oracle::ENUMERATION_BUDGET,
        });
    }
    let mut cert = Certificate {
        solutions_checked: 0,
        violations: 0,
        max_relative_error: 0.0,
    };
    for size in 1..=k.min(m) {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            let centers: Vec<Site> = idx.iter().map(|&f| Site::Facility(f)).collect();
            let c = cost_unchecked(space, &centers, r, 1.0);
            let w = crate::metric::weighted_cost(space, set, &centers, r, 1.0)?;
            cert.solutions_checked += 1;
            let err = (w - c).abs();
            if c > 0.0 {
                cert.max_relative_error = cert.max_relative_error.max(err / c);
                if err > epsilon * c {
                    cert.violations += 1;
                }
            } else if w != 0.0 {
                cert.violations += 1;
            }
            if !next_subset(&mut idx, m) {
                break;
            }
        }
    }
    Ok(cert)
}
