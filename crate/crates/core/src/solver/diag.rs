//! Observable invariants of a run: request-radius intervals, bound checks against
//! `u`, witness mass and consistency with a known optimum.

use serde::{Deserialize, Serialize};

use crate::ball::RequestSet;
use crate::metric::{alpha_distance, nearest_dist, pow_z, MetricSpace, Site, TOL};

use super::bounds::UpperBounds;
use super::state::{Branch, IterationRecord, StepOutcome};

/// Request radii of one cluster, split by the branch that produced them.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ClusterScatter {
    pub cluster: usize,
    pub nearby: Vec<f64>,
    pub faraway: Vec<f64>,
    pub length: usize,
    /// Nearby radii outside `[r, 8r/eps]`.
    pub nearby_violations: usize,
    /// Faraway radii above `(1e5 k / eps^2) * r_min`, with `r_min` the smallest faraway radius.
    pub faraway_violations: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ScatterReport {
    pub clusters: Vec<ClusterScatter>,
    pub violations: usize,
}

/// Per-cluster radius sequences of the accepted requests in `trace`.
pub fn scatter_diagnostics(
    trace: &[IterationRecord],
    epsilon: f64,
    k: usize,
    r: f64,
) -> ScatterReport {
    let mut clusters: Vec<ClusterScatter> = Vec::new();
    for rec in trace {
        if rec.outcome != StepOutcome::Accepted {
            continue;
        }
        let (Some(i), Some(delta)) = (rec.cluster, rec.delta) else {
            continue;
        };
        let slot = match clusters.iter().position(|c| c.cluster == i) {
            Some(s) => s,
            None => {
                clusters.push(ClusterScatter {
                    cluster: i,
                    ..Default::default()
                });
                clusters.len() - 1
            }
        };
        let c = &mut clusters[slot];
        match rec.branch {
            Branch::Nearby => c.nearby.push(delta),
            Branch::Faraway => c.faraway.push(delta),
        }
        c.length += 1;
    }
    clusters.sort_by_key(|c| c.cluster);
    let (lo, hi) = (r * (1.0 - TOL), 8.0 * r / epsilon * (1.0 + TOL));
    let spread = 1e5 * k as f64 / (epsilon * epsilon) * (1.0 + TOL);
    let mut violations = 0;
    for c in &mut clusters {
        c.nearby_violations = c.nearby.iter().filter(|&&d| d < lo || d > hi).count();
        let r_min = c.faraway.iter().copied().fold(f64::INFINITY, f64::min);
        c.faraway_violations = c.faraway.iter().filter(|&&d| d > spread * r_min).count();
        violations += c.nearby_violations + c.faraway_violations;
    }
    ScatterReport {
        clusters,
        violations,
    }
}

/// Clients with `d(p, X) > factor * u(p)`, given `dist[p] = d(p, X)`.
pub fn bound_violations(dist: &[f64], upper: &UpperBounds, factor: f64) -> Vec<usize> {
    dist.iter()
        .enumerate()
        .filter(|&(p, &d)| d > factor * upper.get(p) + TOL)
        .map(|(p, _)| p)
        .collect()
}

/// Clients among `points` with `d(p, O) > u(p)`.
pub fn upper_bound_violations(
    space: &MetricSpace,
    upper: &UpperBounds,
    opt: &[Site],
    points: &[usize],
) -> Vec<usize> {
    points
        .iter()
        .copied()
        .filter(|&p| nearest_dist(space, p, opt) > upper.get(p) + TOL)
        .collect()
}

/// Witness set `W = {p : d_{r'}(p, X) > (1 + eps/3) d_r(p, O)}` and its share of the cost.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessMass {
    pub witnesses: Vec<usize>,
    /// `sum_{p in W} d_{r'}(p, X)^z`.
    pub witness: f64,
    /// `sum_{p in P} d_{r'}(p, X)^z`.
    pub total: f64,
}

impl WitnessMass {
    /// `C_W >= (eps / 10) C_P`.
    pub fn holds(&self, epsilon: f64) -> bool {
        self.witness >= epsilon / 10.0 * self.total - TOL
    }
}

pub fn witness_mass(
    space: &MetricSpace,
    centers: &[Site],
    opt: &[Site],
    r: f64,
    epsilon: f64,
    z: f64,
) -> WitnessMass {
    let r_prime = r * (1.0 + epsilon / 3.0);
    let mut out = WitnessMass {
        witnesses: Vec::new(),
        witness: 0.0,
        total: 0.0,
    };
    for p in 0..space.n_clients() {
        let dx = alpha_distance(nearest_dist(space, p, centers), r_prime);
        let dopt = alpha_distance(nearest_dist(space, p, opt), r);
        let mass = pow_z(dx, z);
        out.total += mass;
        if dx > (1.0 + epsilon / 3.0) * dopt {
            out.witnesses.push(p);
            out.witness += mass;
        }
    }
    out
}

/// An injective labeling `i -> pi(i)` of the clusters with nonempty request sets such
/// that every request `(p, delta)` of cluster `i` has `d(p, o_{pi(i)}) <= delta`.
pub fn find_consistent_labeling(
    space: &MetricSpace,
    requests: &[RequestSet],
    opt: &[Site],
) -> Option<Vec<Option<usize>>> {
    let fits = |i: usize, o: usize| {
        requests[i]
            .requests()
            .iter()
            .all(|q| space.client_site_dist(q.point, &opt[o]) <= q.radius + TOL)
    };
    fn search(
        i: usize,
        requests: &[RequestSet],
        used: &mut Vec<bool>,
        label: &mut Vec<Option<usize>>,
        fits: &dyn Fn(usize, usize) -> bool,
    ) -> bool {
        if i == requests.len() {
            return true;
        }
        if requests[i].is_empty() {
            return search(i + 1, requests, used, label, fits);
        }
        for o in 0..used.len() {
            if !used[o] && fits(i, o) {
                used[o] = true;
                label[i] = Some(o);
                if search(i + 1, requests, used, label, fits) {
                    return true;
                }
                used[o] = false;
                label[i] = None;
            }
        }
        false
    }
    let mut used = vec![false; opt.len()];
    let mut label = vec![None; requests.len()];
    search(0, requests, &mut used, &mut label, &fits).then_some(label)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ball::Request;

    fn rec(cluster: usize, branch: Branch, delta: f64, outcome: StepOutcome) -> IterationRecord {
        IterationRecord {
            iteration: 0,
            branch,
            point: Some(0),
            cluster: Some(cluster),
            distance: Some(delta),
            delta: Some(delta),
            center_before: None,
            outcome,
        }
    }

    #[test]
    fn empty_trace_gives_empty_report() {
        let rep = scatter_diagnostics(&[], 0.5, 2, 1.0);
        assert!(rep.clusters.is_empty());
        assert_eq!(rep.violations, 0);
    }

    #[test]
    fn nearby_interval_is_checked() {
        let t = vec![
            rec(0, Branch::Nearby, 1.0, StepOutcome::Accepted),
            rec(0, Branch::Nearby, 16.0, StepOutcome::Accepted),
            rec(1, Branch::Nearby, 17.0, StepOutcome::Accepted),
            rec(1, Branch::Nearby, 0.5, StepOutcome::Accepted),
            rec(1, Branch::Nearby, 0.1, StepOutcome::BallIntersectionFail),
        ];
        let rep = scatter_diagnostics(&t, 0.5, 2, 1.0);
        assert_eq!(rep.clusters.len(), 2);
        assert_eq!(rep.clusters[0].nearby_violations, 0);
        assert_eq!(rep.clusters[1].nearby_violations, 2);
        assert_eq!(rep.clusters[1].length, 2);
        assert!(rep
            .clusters
            .iter()
            .all(|c| c.faraway.is_empty() && c.faraway_violations == 0));
        assert_eq!(rep.violations, 2);
    }

    #[test]
    fn faraway_spread_is_checked() {
        let t = vec![
            rec(0, Branch::Faraway, 1e-3, StepOutcome::Accepted),
            rec(0, Branch::Faraway, 1e3, StepOutcome::Accepted),
        ];
        // bound is 1e5 * 1 / 0.25 = 4e5 times r_min = 400
        let rep = scatter_diagnostics(&t, 0.5, 1, 0.0);
        assert_eq!(rep.violations, 1);
    }

    #[test]
    fn witness_mass_on_a_line() {
        let pts: Vec<Vec<f64>> = vec![vec![0.0], vec![1.0], vec![10.0]];
        let s = MetricSpace::euclidean(1, &pts, Some(&pts)).unwrap();
        let x = [Site::Facility(0)];
        let o = [Site::Facility(0), Site::Facility(2)];
        let w = witness_mass(&s, &x, &o, 0.0, 0.3, 1.0);
        assert_eq!(w.witnesses, vec![2]);
        assert_eq!(w.total, 11.0);
        assert_eq!(w.witness, 10.0);
        assert!(w.holds(0.3));
    }

    #[test]
    fn consistency_search_finds_the_swap() {
        let pts: Vec<Vec<f64>> = vec![vec![0.0], vec![10.0]];
        let s = MetricSpace::euclidean(1, &pts, Some(&pts)).unwrap();
        let q = |p, d| RequestSet::from_requests(vec![Request::new(p, d).unwrap()]).unwrap();
        let reqs = vec![q(1, 1.0), RequestSet::new(), q(0, 1.0)];
        let opt = [Site::Facility(0), Site::Facility(1)];
        assert_eq!(
            find_consistent_labeling(&s, &reqs, &opt),
            Some(vec![Some(1), None, Some(0)])
        );
        let bad = vec![q(1, 1.0), q(1, 1.0), q(0, 1.0)];
        assert_eq!(find_consistent_labeling(&s, &bad, &opt), None);
    }

    #[test]
    fn bound_checks() {
        let u = UpperBounds::from_values(vec![1.0, 2.0]);
        assert_eq!(bound_violations(&[3.1, 6.3], &u, 3.1), vec![1]);
        let pts: Vec<Vec<f64>> = vec![vec![0.0], vec![3.0]];
        let s = MetricSpace::euclidean(1, &pts, Some(&pts)).unwrap();
        let v = upper_bound_violations(&s, &u, &[Site::Facility(0)], &[0, 1]);
        assert_eq!(v, vec![1]);
    }
}
