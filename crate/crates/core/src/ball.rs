//! Ball intersection: given requests `(p, delta)`, find a center `x` with
//! `d(x, p) <= (1 + eta) * delta` for every request, or report that none exists.
//!
//! Both solvers minimize the ratio `g(x) = max_{(p, delta)} d(x, p) / delta`.
//! The discrete solver scans the facility list. The continuous solver works on the
//! Lagrangian dual of `min_x max_i w_i |x - p_i|^2` (with `w_i = 1 / delta_i^2`),
//! whose value for any weight vector on the simplex lower-bounds `min g^2`, and
//! whose weighted centroid is the primal candidate. Frank-Wolfe with away steps and
//! exact line search closes the gap.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{MetricSpace, Site};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Request {
    pub point: usize,
    pub radius: f64,
}

impl Request {
    pub fn new(point: usize, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "request radius {radius} must be positive and finite"
            )));
        }
        Ok(Self { point, radius })
    }
}

/// Requests for one cluster, in insertion order.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RequestSet {
    requests: Vec<Request>,
}

impl RequestSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_requests(requests: Vec<Request>) -> Result<Self> {
        for r in &requests {
            Request::new(r.point, r.radius)?;
        }
        Ok(Self { requests })
    }

    pub fn push(&mut self, r: Request) {
        self.requests.push(r);
    }

    pub fn requests(&self) -> &[Request] {
        &self.requests
    }

    pub fn len(&self) -> usize {
        self.requests.len()
    }

    pub fn is_empty(&self) -> bool {
        self.requests.is_empty()
    }

    fn validate(&self, space: &MetricSpace) -> Result<()> {
        if self.requests.is_empty() {
            return Err(Error::EmptyRequests);
        }
        for r in &self.requests {
            if r.point >= space.n_clients() {
                return Err(Error::InvalidPoint(format!(
                    "request client {} out of range",
                    r.point
                )));
            }
            Request::new(r.point, r.radius)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "status")]
pub enum BallOutcome<C> {
    /// `ratio` is `g(center)`, at most `1 + eta`.
    Found { center: C, ratio: f64 },
    /// `lower_bound` is a certified lower bound on `min g` (exact for the discrete scan).
    Infeasible { lower_bound: f64 },
}

impl<C> BallOutcome<C> {
    pub fn center(&self) -> Option<&C> {
        match self {
            BallOutcome::Found { center, .. } => Some(center),
            BallOutcome::Infeasible { .. } => None,
        }
    }

    pub fn is_found(&self) -> bool {
        matches!(self, BallOutcome::Found { .. })
    }
}

fn check_eta(eta: f64) -> Result<()> {
    if eta.is_finite() && eta > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "eta {eta} must be positive"
        )))
    }
}

/// `g(x) = max d(x, p) / delta` for an arbitrary center site.
pub fn ratio(space: &MetricSpace, q: &RequestSet, center: &Site) -> f64 {
    q.requests()
        .iter()
        .map(|r| space.client_site_dist(r.point, center) / r.radius)
        .fold(0.0, f64::max)
}

/// Exhaustive scan of a finite facility set. Returns the facility with the smallest
/// ratio (lowest index on ties) when that ratio is at most `1 + eta`.
pub fn solve_discrete(space: &MetricSpace, q: &RequestSet, eta: f64) -> Result<BallOutcome<usize>> {
    check_eta(eta)?;
    q.validate(space)?;
    let m = space
        .n_facilities()
        .ok_or_else(|| Error::Unsupported("discrete scan needs a finite facility set".into()))?;
    let mut best = (f64::INFINITY, 0usize);
    for f in 0..m {
        let g = ratio(space, q, &Site::Facility(f));
        if g < best.0 {
            best = (g, f);
        }
    }
    Ok(if best.0 <= 1.0 + eta {
        BallOutcome::Found {
            center: best.1,
            ratio: best.0,
        }
    } else {
        BallOutcome::Infeasible {
            lower_bound: best.0,
        }
    })
}

/// Step budget for the continuous solver: `10 * ceil(1/eta) * |Q|`, at least 200.
pub fn euclidean_budget(eta: f64, requests: usize) -> usize {
    (10 * (1.0 / eta).ceil() as usize * requests).max(200)
}

/// Continuous ball intersection over `R^dim`.
///
/// Runs until `g(best) <= (1 + eta/2) * lower_bound`. The returned center then lies
/// within a factor `1 + eta` of the true minimum of `g`.
pub fn solve_euclidean(
    space: &MetricSpace,
    q: &RequestSet,
    eta: f64,
) -> Result<BallOutcome<Vec<f64>>> {
    check_eta(eta)?;
    q.validate(space)?;
    let dim = space.dim().ok_or_else(|| {
        Error::Unsupported("continuous solver needs euclidean coordinates".into())
    })?;
    let pts: Vec<&[f64]> = q
        .requests()
        .iter()
        .map(|r| space.client_coords(r.point).expect("validated request"))
        .collect();
    let w: Vec<f64> = q
        .requests()
        .iter()
        .map(|r| 1.0 / (r.radius * r.radius))
        .collect();
    let len = pts.len();
    let budget = euclidean_budget(eta, len);

    // Start from uniform weights, i.e. the 1/delta^2-weighted centroid.
    let mut lam = vec![1.0 / len as f64; len];
    let mut c = vec![0.0; dim];
    let mut f = vec![0.0; len];
    let mut best_ub = f64::INFINITY;
    let mut best_x = vec![0.0; dim];
    let mut best_lb = 0.0f64;
    let mut converged = false;

    for _ in 0..budget {
        let s: f64 = lam.iter().zip(&w).map(|(l, w)| l * w).sum();
        c.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..len {
            let coef = lam[i] * w[i] / s;
            for (cd, pd) in c.iter_mut().zip(pts[i]) {
                *cd += coef * pd;
            }
        }
        for i in 0..len {
            let sq: f64 = c.iter().zip(pts[i]).map(|(a, b)| (a - b) * (a - b)).sum();
            f[i] = w[i] * sq;
        }
        let lb: f64 = lam.iter().zip(&f).map(|(l, v)| l * v).sum();
        let (j, ub) = f
            .iter()
            .copied()
            .enumerate()
            .fold(
                (0, f64::NEG_INFINITY),
                |acc, (i, v)| if v > acc.1 { (i, v) } else { acc },
            );
        if ub < best_ub {
            best_ub = ub;
            best_x.copy_from_slice(&c);
        }
        best_lb = best_lb.max(lb);
        let (g_ub, g_lb) = (best_ub.sqrt(), best_lb.sqrt());
        if g_ub <= 1e-12 || g_ub <= (1.0 + eta / 2.0) * g_lb {
            converged = true;
            break;
        }

        // Frank-Wolfe toward vertex j, or away from the worst active vertex.
        let away = (0..len)
            .filter(|&i| lam[i] > 0.0)
            .min_by(|&a, &b| f[a].total_cmp(&f[b]))
            .expect("weights stay on the simplex");
        let fw_gap = f[j] - lb;
        let away_gap = lb - f[away];
        let use_away = away_gap > fw_gap && lam[away] < 1.0;
        let (slope, s_dir, m_sq, tau_max) = if use_away {
            // |m|^2 = w_i^2 |p_i - c|^2 = w_i * f_i
            (
                away_gap,
                s - w[away],
                w[away] * f[away],
                lam[away] / (1.0 - lam[away]),
            )
        } else {
            (fw_gap, w[j] - s, w[j] * f[j], 1.0)
        };
        let tau = line_search(s, slope, s_dir, m_sq, tau_max);
        if tau <= 0.0 {
            // No ascent direction left at machine precision.
            converged = true;
            break;
        }
        if use_away {
            for l in lam.iter_mut() {
                *l *= 1.0 + tau;
            }
            lam[away] -= tau;
            if tau >= tau_max {
                lam[away] = 0.0;
            }
        } else {
            for l in lam.iter_mut() {
                *l *= 1.0 - tau;
            }
            lam[j] += tau;
        }
        // keep on the simplex against rounding drift
        let total: f64 = lam.iter().map(|l| l.max(0.0)).sum();
        for l in lam.iter_mut() {
            *l = l.max(0.0) / total;
        }
    }

    let g_best = best_ub.sqrt();
    let g_lb = best_lb.sqrt();
    if g_best <= 1.0 + eta {
        return Ok(BallOutcome::Found {
            center: best_x,
            ratio: g_best,
        });
    }
    if converged || g_lb > 1.0 {
        return Ok(BallOutcome::Infeasible {
            lower_bound: if converged {
                g_lb.max(g_best / (1.0 + eta / 2.0)).min(g_best)
            } else {
                g_lb
            },
        });
    }
    Err(Error::BudgetExceeded { budget })
}

/// Exact maximizer over `[0, tau_max]` of `D(tau) = D0 + tau*a - tau^2 |m|^2 / (S + tau*s)`,
/// the dual objective along a simplex direction (coordinates centered at the current centroid).
fn line_search(s0: f64, a: f64, s: f64, m_sq: f64, tau_max: f64) -> f64 {
    if a <= 0.0 {
        return 0.0;
    }
    let neg_k = m_sq - a * s;
    if neg_k <= 0.0 || m_sq <= 0.0 {
        return tau_max;
    }
    let root = neg_k.sqrt();
    let tau = s0 * a / (root * (m_sq.sqrt() + root));
    if tau.is_finite() {
        tau.clamp(0.0, tau_max)
    } else {
        tau_max
    }
}

/// Dispatches on the facility set: scan when finite, continuous solver otherwise.
pub fn solve(space: &MetricSpace, q: &RequestSet, eta: f64) -> Result<BallOutcome<Site>> {
    if space.is_discrete() {
        Ok(match solve_discrete(space, q, eta)? {
            BallOutcome::Found { center, ratio } => BallOutcome::Found {
                center: Site::Facility(center),
                ratio,
            },
            BallOutcome::Infeasible { lower_bound } => BallOutcome::Infeasible { lower_bound },
        })
    } else {
        Ok(match solve_euclidean(space, q, eta)? {
            BallOutcome::Found { center, ratio } => BallOutcome::Found {
                center: Site::Coords(center),
                ratio,
            },
            BallOutcome::Infeasible { lower_bound } => BallOutcome::Infeasible { lower_bound },
        })
    }
}
