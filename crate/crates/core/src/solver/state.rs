//! One randomized run for a fixed guess: initialization from marked points, then
//! witness sampling and request refinement until the cost target is met.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::ball::{self, BallOutcome, Request, RequestSet};
use crate::error::{Error, Result};
use crate::metric::{self, alpha_distance, pow_z, MetricSpace, Site, Solution, TOL};
use crate::rng::{rng_from_seed, SolverRng};

use super::bounds::{compute_upper_bounds, greedy_mark, UpperBounds};

/// Parameters of a single run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunParams {
    pub k: usize,
    pub r: f64,
    pub z: f64,
    pub epsilon: f64,
    pub guess: f64,
}

impl RunParams {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidArgument("k must be at least 1".into()));
        }
        if !(self.r.is_finite() && self.r >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "radius {} must be >= 0",
                self.r
            )));
        }
        if !(self.z.is_finite() && self.z >= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "power {} must be >= 1",
                self.z
            )));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "epsilon {} must lie in (0, 1)",
                self.epsilon
            )));
        }
        if !(self.guess.is_finite() && self.guess > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "guess {} must be positive",
                self.guess
            )));
        }
        Ok(())
    }

    /// `r' = r (1 + eps/3)`, the radius the loop measures cost at.
    pub fn r_prime(&self) -> f64 {
        self.r * (1.0 + self.epsilon / 3.0)
    }

    /// Error parameter handed to ball intersection.
    pub fn eta(&self) -> f64 {
        self.epsilon / 40.0
    }

    /// Loop target `(1 + eps) G`.
    pub fn target(&self) -> f64 {
        (1.0 + self.epsilon) * self.guess
    }

    /// Distance bound defining the nearby set.
    pub fn nearby_radius(&self) -> f64 {
        8.0 * self.r / self.epsilon
    }

    /// Factor on `u(p)` defining the faraway set.
    pub fn faraway_factor(&self) -> f64 {
        self.epsilon / (1000.0 * self.k as f64)
    }

    /// Divisor turning `d(p, X)` into the request radius.
    pub fn delta_divisor(&self) -> f64 {
        1.0 + self.epsilon / 12.0
    }
}

/// Default iteration cap `ceil(40 (k/eps) ln(k/eps + e) 100)`.
pub fn default_iteration_cap(k: usize, epsilon: f64) -> u64 {
    let ratio = k as f64 / epsilon;
    (40.0 * ratio * (ratio + std::f64::consts::E).ln() * 100.0).ceil() as u64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FailReason {
    BallIntersectionFail,
    /// The continuous ball-intersection solver ran out of steps without a verdict.
    BallIntersectionBudget,
    IterationCap,
    TooManyMarks,
    EmptySampleSet,
    GuessTooLarge,
}

impl FailReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            FailReason::BallIntersectionFail => "ball-intersection-fail",
            FailReason::BallIntersectionBudget => "ball-intersection-budget",
            FailReason::IterationCap => "iteration-cap",
            FailReason::TooManyMarks => "too-many-marks",
            FailReason::EmptySampleSet => "empty-sample-set",
            FailReason::GuessTooLarge => "guess-too-large",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Nearby,
    Faraway,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepOutcome {
    Accepted,
    BallIntersectionFail,
    EmptySampleSet,
}

/// One loop iteration as recorded in the trace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: u64,
    pub branch: Branch,
    pub point: Option<usize>,
    pub cluster: Option<usize>,
    /// `d(p, X)` at sampling time.
    pub distance: Option<f64>,
    pub delta: Option<f64>,
    /// The cluster's center just before the request was added (`None` while its request set was empty).
    pub center_before: Option<Site>,
    pub outcome: StepOutcome,
}

/// Center `X`, request sets `Q_1..Q_k`, the generator and the trace.
#[derive(Clone, Debug)]
pub struct SolverState {
    params: RunParams,
    upper: UpperBounds,
    marked: Vec<usize>,
    centers: Vec<Option<Site>>,
    requests: Vec<RequestSet>,
    rng: SolverRng,
    dist: Vec<f64>,
    trace: Vec<IterationRecord>,
    record_trace: bool,
    iterations: u64,
    nearby_steps: u64,
    faraway_steps: u64,
}

fn ball_center(
    space: &MetricSpace,
    q: &RequestSet,
    eta: f64,
) -> std::result::Result<Site, FailReason> {
    match ball::solve(space, q, eta) {
        Ok(BallOutcome::Found { center, .. }) => Ok(center),
        Ok(BallOutcome::Infeasible { .. }) => Err(FailReason::BallIntersectionFail),
        Err(Error::BudgetExceeded { .. }) => Err(FailReason::BallIntersectionBudget),
        Err(e) => {
            debug_assert!(false, "ball intersection rejected validated input: {e}");
            Err(FailReason::BallIntersectionFail)
        }
    }
}

impl SolverState {
    /// Upper bounds, marking and initial centers for guess `params.guess`.
    pub fn start(
        space: &MetricSpace,
        params: RunParams,
        seed: u64,
        record_trace: bool,
    ) -> Result<std::result::Result<Self, FailReason>> {
        params.validate()?;
        let upper = match compute_upper_bounds(space, params.guess, params.r) {
            Ok(u) => u,
            Err(Error::GuessTooLarge { .. }) => return Ok(Err(FailReason::GuessTooLarge)),
            Err(e) => return Err(e),
        };
        let marked = greedy_mark(space, &upper);
        Ok(Self::initialize(
            space,
            params,
            upper,
            marked,
            seed,
            record_trace,
        ))
    }

    /// `Q_i = {(p_i, u(p_i))}` for the marked points, empty for the rest; each nonempty
    /// cluster gets a center from ball intersection at error `eps/40`.
    pub fn initialize(
        space: &MetricSpace,
        params: RunParams,
        upper: UpperBounds,
        marked: Vec<usize>,
        seed: u64,
        record_trace: bool,
    ) -> std::result::Result<Self, FailReason> {
        if marked.len() > params.k {
            return Err(FailReason::TooManyMarks);
        }
        let mut requests = vec![RequestSet::new(); params.k];
        let mut centers = vec![None; params.k];
        for (i, &p) in marked.iter().enumerate() {
            requests[i].push(Request {
                point: p,
                radius: upper.get(p),
            });
            centers[i] = Some(ball_center(space, &requests[i], params.eta())?);
        }
        let mut state = Self {
            params,
            upper,
            marked,
            centers,
            requests,
            rng: rng_from_seed(seed),
            dist: Vec::new(),
            trace: Vec::new(),
            record_trace,
            iterations: 0,
            nearby_steps: 0,
            faraway_steps: 0,
        };
        state.refresh_distances(space);
        Ok(state)
    }

    fn refresh_distances(&mut self, space: &MetricSpace) {
        let centers: Vec<&Site> = self.centers.iter().flatten().collect();
        self.dist = (0..space.n_clients())
            .map(|p| {
                centers
                    .iter()
                    .map(|c| space.client_site_dist(p, c))
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
    }

    /// A copy of this state driven by a fresh generator, for an independent repetition.
    pub fn with_seed(&self, seed: u64) -> Self {
        let mut s = self.clone();
        s.rng = rng_from_seed(seed);
        s
    }

    pub fn params(&self) -> &RunParams {
        &self.params
    }

    pub fn upper_bounds(&self) -> &UpperBounds {
        &self.upper
    }

    pub fn marked(&self) -> &[usize] {
        &self.marked
    }

    pub fn requests(&self) -> &[RequestSet] {
        &self.requests
    }

    /// Per-cluster centers; `None` while the cluster's request set is empty.
    pub fn cluster_centers(&self) -> &[Option<Site>] {
        &self.centers
    }

    /// The concrete centers making up the current solution.
    pub fn centers(&self) -> Vec<Site> {
        self.centers.iter().flatten().cloned().collect()
    }

    pub fn solution(&self, space: &MetricSpace) -> Solution {
        Solution::new(space, self.centers(), self.params.k).expect("state holds valid centers")
    }

    /// `d(p, X)` for every client.
    pub fn distances(&self) -> &[f64] {
        &self.dist
    }

    pub fn trace(&self) -> &[IterationRecord] {
        &self.trace
    }

    pub fn into_trace(self) -> Vec<IterationRecord> {
        self.trace
    }

    pub fn iterations(&self) -> u64 {
        self.iterations
    }

    pub fn branch_counts(&self) -> (u64, u64) {
        (self.nearby_steps, self.faraway_steps)
    }

    /// `cost_{alpha}(P, X)` with the run's power.
    pub fn cost_at(&self, alpha: f64) -> f64 {
        self.dist
            .iter()
            .map(|&d| pow_z(alpha_distance(d, alpha), self.params.z))
            .sum()
    }

    /// True while `cost_{r'}(P, X) > (1 + eps) G`.
    pub fn needs_step(&self) -> bool {
        self.cost_at(self.params.r_prime()) > self.params.target()
    }

    fn record(&mut self, rec: IterationRecord) {
        if self.record_trace {
            self.trace.push(rec);
        }
    }

    /// One loop body. `weights`, when given, multiplies each client's sampling mass.
    pub fn iterate(
        &mut self,
        space: &MetricSpace,
        weights: Option<&[f64]>,
    ) -> std::result::Result<(), FailReason> {
        let p = self.params;
        let r_prime = p.r_prime();
        let iteration = self.iterations;
        self.iterations += 1;

        let branch = if self.rng.gen_bool(0.5) {
            Branch::Nearby
        } else {
            Branch::Faraway
        };
        match branch {
            Branch::Nearby => self.nearby_steps += 1,
            Branch::Faraway => self.faraway_steps += 1,
        }
        let near_radius = p.nearby_radius() + TOL;
        let far_factor = p.faraway_factor();
        let mut prefix = Vec::with_capacity(self.dist.len());
        let mut total = 0.0;
        for (q, &d) in self.dist.iter().enumerate() {
            let dr = alpha_distance(d, r_prime);
            let member = match branch {
                Branch::Nearby => d <= near_radius,
                Branch::Faraway => dr > far_factor * self.upper.get(q),
            };
            if member && dr > 0.0 {
                total += weights.map_or(1.0, |w| w[q]) * pow_z(dr, p.z);
            }
            prefix.push(total);
        }
        if total.is_nan() || total <= 0.0 {
            self.record(IterationRecord {
                iteration,
                branch,
                point: None,
                cluster: None,
                distance: None,
                delta: None,
                center_before: None,
                outcome: StepOutcome::EmptySampleSet,
            });
            return Err(FailReason::EmptySampleSet);
        }
        let u: f64 = self.rng.gen::<f64>() * total;
        let mut point = prefix.partition_point(|&c| c <= u).min(prefix.len() - 1);
        // rounding at the top end: fall back to the last client with mass
        while point > 0 && prefix[point] == prefix[point - 1] {
            point -= 1;
        }
        let cluster = self.rng.gen_range(0..p.k);
        let distance = self.dist[point];
        let delta = distance / p.delta_divisor();
        let center_before = self.centers[cluster].clone();

        self.requests[cluster].push(Request {
            point,
            radius: delta,
        });
        let result = ball_center(space, &self.requests[cluster], p.eta());
        let outcome = match &result {
            Ok(_) => StepOutcome::Accepted,
            Err(_) => StepOutcome::BallIntersectionFail,
        };
        self.record(IterationRecord {
            iteration,
            branch,
            point: Some(point),
            cluster: Some(cluster),
            distance: Some(distance),
            delta: Some(delta),
            center_before,
            outcome,
        });
        let center = result?;
        self.centers[cluster] = Some(center);
        self.refresh_distances(space);
        Ok(())
    }
}

/// Result of [`run_single`].
#[derive(Clone, Debug)]
pub struct RunResult {
    pub outcome: std::result::Result<RunSolution, FailReason>,
    pub iterations: u64,
    pub nearby_steps: u64,
    pub faraway_steps: u64,
    pub marked: usize,
    pub trace: Vec<IterationRecord>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunSolution {
    pub solution: Solution,
    /// `cost_{r'}(P, X)`, at most `(1 + eps) G`.
    pub cost_r_prime: f64,
    /// `cost_{(1+eps) r}(P, X)`, the bicriteria cost.
    pub cost_bicriteria: f64,
}

/// Runs the loop from a prepared initial state until the target is met, a step fails,
/// or `iteration_cap` iterations have been spent.
pub fn run_from(
    space: &MetricSpace,
    mut state: SolverState,
    iteration_cap: u64,
    weights: Option<&[f64]>,
) -> RunResult {
    let mut failure = None;
    while state.needs_step() {
        if state.iterations() >= iteration_cap {
            failure = Some(FailReason::IterationCap);
            break;
        }
        if let Err(f) = state.iterate(space, weights) {
            failure = Some(f);
            break;
        }
    }
    let (nearby_steps, faraway_steps) = state.branch_counts();
    let params = *state.params();
    let outcome = match failure {
        Some(f) => Err(f),
        None => Ok(RunSolution {
            solution: state.solution(space),
            cost_r_prime: state.cost_at(params.r_prime()),
            cost_bicriteria: state.cost_at((1.0 + params.epsilon) * params.r),
        }),
    };
    RunResult {
        outcome,
        iterations: state.iterations(),
        nearby_steps,
        faraway_steps,
        marked: state.marked().len(),
        trace: state.into_trace(),
    }
}

/// A complete run for one guess and seed.
pub fn run_single(
    space: &MetricSpace,
    params: RunParams,
    seed: u64,
    iteration_cap: u64,
    record_trace: bool,
) -> Result<RunResult> {
    let failed = |reason, marked| RunResult {
        outcome: Err(reason),
        iterations: 0,
        nearby_steps: 0,
        faraway_steps: 0,
        marked,
        trace: Vec::new(),
    };
    params.validate()?;
    let upper = match compute_upper_bounds(space, params.guess, params.r) {
        Ok(u) => u,
        Err(Error::GuessTooLarge { .. }) => return Ok(failed(FailReason::GuessTooLarge, 0)),
        Err(e) => return Err(e),
    };
    let marked = greedy_mark(space, &upper);
    let n_marked = marked.len();
    Ok(
        match SolverState::initialize(space, params, upper, marked, seed, record_trace) {
            Ok(state) => run_from(space, state, iteration_cap, None),
            Err(reason) => failed(reason, n_marked),
        },
    )
}

/// `cost_{r'}` evaluated directly from a solution; shared by tests and the driver.
pub fn solution_cost(space: &MetricSpace, solution: &Solution, alpha: f64, z: f64) -> f64 {
    metric::cost_unchecked(space, solution.centers(), alpha, z)
}
