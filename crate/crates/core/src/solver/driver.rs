//! Guess search: a geometric grid of guesses `G`, independent seeded repetitions for
//! each, and selection of the cheapest successful solution.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{alpha_distance, cost_unchecked, pow_z, Instance, MetricSpace, Site};
use crate::rng::derive_seed;

use super::bounds::{compute_upper_bounds, greedy_mark};
use super::diag::scatter_diagnostics;
use super::state::{
    default_iteration_cap, run_from, FailReason, IterationRecord, RunParams, SolverState,
};

fn default_repetitions() -> usize {
    50
}

fn default_min_guess_ratio() -> f64 {
    1e-6
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub epsilon: f64,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    #[serde(default)]
    pub seed: u64,
    /// Defaults to [`default_iteration_cap`].
    #[serde(default)]
    pub iteration_cap: Option<u64>,
    /// Defaults to `1 + eps/3`.
    #[serde(default)]
    pub guess_multiplier: Option<f64>,
    /// Runs this single guess instead of the grid.
    #[serde(default)]
    pub guess: Option<f64>,
    /// Lowest guess relative to the upper end when no positive single-client distance is available.
    #[serde(default = "default_min_guess_ratio")]
    pub min_guess_ratio: f64,
    /// Keep one [`RunRecord`] per repetition in the report.
    #[serde(default)]
    pub keep_runs: bool,
    /// Record traces, check their radius intervals and keep the best run's trace.
    #[serde(default)]
    pub trace: bool,
}

impl SolverConfig {
    pub fn new(epsilon: f64) -> Self {
        Self {
            epsilon,
            repetitions: default_repetitions(),
            seed: 0,
            iteration_cap: None,
            guess_multiplier: None,
            guess: None,
            min_guess_ratio: default_min_guess_ratio(),
            keep_runs: false,
            trace: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "epsilon {} must lie in (0, 1)",
                self.epsilon
            )));
        }
        if self.repetitions == 0 {
            return Err(Error::InvalidArgument(
                "repetitions must be at least 1".into(),
            ));
        }
        if self.iteration_cap == Some(0) {
            return Err(Error::InvalidArgument(
                "iteration cap must be at least 1".into(),
            ));
        }
        if let Some(m) = self.guess_multiplier {
            if !(m.is_finite() && m > 1.0) {
                return Err(Error::InvalidArgument(format!(
                    "guess multiplier {m} must exceed 1"
                )));
            }
        }
        if let Some(g) = self.guess {
            if !(g.is_finite() && g > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "guess {g} must be positive"
                )));
            }
        }
        if !(self.min_guess_ratio > 0.0 && self.min_guess_ratio < 1.0) {
            return Err(Error::InvalidArgument(
                "min guess ratio must lie in (0, 1)".into(),
            ));
        }
        Ok(())
    }

    pub fn multiplier(&self) -> f64 {
        self.guess_multiplier.unwrap_or(1.0 + self.epsilon / 3.0)
    }

    pub fn cap(&self, k: usize) -> u64 {
        self.iteration_cap
            .unwrap_or_else(|| default_iteration_cap(k, self.epsilon))
    }
}

/// One repetition of one guess.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub rep: usize,
    pub seed: u64,
    /// `"success"` or a failure reason.
    pub outcome: String,
    pub iterations: u64,
    pub nearby_steps: u64,
    pub faraway_steps: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost_r_prime: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost_bicriteria: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GuessStatus {
    /// Repetitions were run.
    Ran,
    /// The guess was rejected before any repetition.
    Rejected(FailReason),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GuessReport {
    pub index: usize,
    pub guess: f64,
    pub marked: usize,
    pub status: GuessStatus,
    pub successes: usize,
    pub failures: BTreeMap<String, usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub best_cost: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub runs: Vec<RunRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BestSolution {
    /// `None` for the zero-cost single-center shortcut.
    pub guess_index: Option<usize>,
    pub guess: Option<f64>,
    pub seed: Option<u64>,
    pub centers: Vec<Site>,
    /// `cost_{r(1 + eps/3)}(P, X)`.
    pub cost_r_prime: f64,
    /// `cost_{(1 + eps) r}(P, X)`.
    pub cost_bicriteria: f64,
    /// `(1 + eps) r`.
    pub radius_used: f64,
    pub iterations: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub trace: Vec<IterationRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub k: usize,
    pub r: f64,
    pub z: f64,
    pub epsilon: f64,
    pub lower: f64,
    pub upper: f64,
    pub multiplier: f64,
    pub iteration_cap: u64,
    pub guesses: Vec<GuessReport>,
    pub best: Option<BestSolution>,
    /// Runs whose traces were checked for radius-interval violations.
    pub traced_runs: usize,
    pub scatter_violations: usize,
}

/// Cheapest single center: a facility, or a client location in the continuous case.
/// Returns the center and `cost_r(P, {x})`.
pub fn one_center(space: &MetricSpace, r: f64, z: f64) -> (Site, f64) {
    let candidates: Vec<Site> = if space.is_discrete() {
        space.facility_sites()
    } else {
        (0..space.n_clients())
            .map(|p| Site::Coords(space.client_coords(p).expect("euclidean").to_vec()))
            .collect()
    };
    candidates
        .into_iter()
        .map(|c| {
            let cost = cost_unchecked(space, std::slice::from_ref(&c), r, z);
            (c, cost)
        })
        .fold(None, |best: Option<(Site, f64)>, (c, v)| match best {
            Some((_, b)) if b <= v => best,
            _ => Some((c, v)),
        })
        .expect("spaces have at least one candidate center")
}

/// The guess grid `L * m^j`, `j = 0, 1, ...`, up to and including the first value `>= U`.
#[derive(Clone, Debug, PartialEq)]
pub struct GuessGrid {
    pub lower: f64,
    pub upper: f64,
    pub guesses: Vec<f64>,
}

/// Lower end: in a discrete space the smallest positive value among `d_r(p, f)^z` and
/// `d_{r'}(p, f)^z / (1 + eps)^2` over clients and facilities, which lies below any positive
/// optimum and also lets a zero-cost solution pass; in a continuous space `U * min_guess_ratio`.
pub fn guess_grid(instance: &Instance, config: &SolverConfig, upper: f64) -> GuessGrid {
    let space = &instance.space;
    let (r, z, eps) = (instance.r, instance.z, config.epsilon);
    let r_prime = r * (1.0 + eps / 3.0);
    let mut lower = f64::INFINITY;
    if space.is_discrete() {
        for f in space.facility_sites() {
            for p in 0..space.n_clients() {
                let d = space.client_site_dist(p, &f);
                let a = pow_z(alpha_distance(d, r), z);
                let b = pow_z(alpha_distance(d, r_prime), z) / ((1.0 + eps) * (1.0 + eps));
                for v in [a, b] {
                    if v > 0.0 && v < lower {
                        lower = v;
                    }
                }
            }
        }
    }
    if !lower.is_finite() || lower <= 0.0 {
        lower = upper * config.min_guess_ratio;
    }
    let lower = lower.min(upper);
    let m = config.multiplier();
    let mut guesses = vec![lower];
    while *guesses.last().unwrap() < upper {
        let next = lower * m.powi(guesses.len() as i32);
        guesses.push(next);
    }
    GuessGrid {
        lower,
        upper,
        guesses,
    }
}

struct RunOutcome {
    record: RunRecord,
    centers: Option<Vec<Site>>,
    trace: Vec<IterationRecord>,
    violations: usize,
}

/// Runs the guess grid (or the single configured guess) and returns the cheapest
/// success by `cost_{r'}`, ties broken by the smaller seed.
pub fn solve(instance: &Instance, config: &SolverConfig) -> Result<SolveReport> {
    config.validate()?;
    let space = &instance.space;
    let (k, r, z, eps) = (instance.k, instance.r, instance.z, config.epsilon);
    let cap = config.cap(k);
    let r_prime = r * (1.0 + eps / 3.0);
    let radius_used = (1.0 + eps) * r;

    let (center, upper) = one_center(space, r, z);
    let mut report = SolveReport {
        k,
        r,
        z,
        epsilon: eps,
        lower: 0.0,
        upper,
        multiplier: config.multiplier(),
        iteration_cap: cap,
        guesses: Vec::new(),
        best: None,
        traced_runs: 0,
        scatter_violations: 0,
    };
    if upper == 0.0 && config.guess.is_none() {
        report.best = Some(BestSolution {
            guess_index: None,
            guess: None,
            seed: None,
            cost_r_prime: 0.0,
            cost_bicriteria: 0.0,
            centers: vec![center],
            radius_used,
            iterations: 0,
            trace: Vec::new(),
        });
        return Ok(report);
    }
    let guesses = match config.guess {
        Some(g) => {
            report.lower = g;
            vec![g]
        }
        None => {
            let grid = guess_grid(instance, config, upper);
            report.lower = grid.lower;
            grid.guesses
        }
    };

    let per_guess: Vec<(GuessReport, Vec<RunOutcome>)> = guesses
        .par_iter()
        .enumerate()
        .map(|(gi, &guess)| {
            let params = RunParams {
                k,
                r,
                z,
                epsilon: eps,
                guess,
            };
            let seeds: Vec<u64> = (0..config.repetitions)
                .map(|rep| derive_seed(config.seed, gi as u64, rep as u64))
                .collect();
            let rejected = |reason: FailReason, marked: usize| {
                let runs = seeds
                    .iter()
                    .enumerate()
                    .map(|(rep, &seed)| RunOutcome {
                        record: RunRecord {
                            rep,
                            seed,
                            outcome: reason.as_str().to_string(),
                            iterations: 0,
                            nearby_steps: 0,
                            faraway_steps: 0,
                            cost_r_prime: None,
                            cost_bicriteria: None,
                        },
                        centers: None,
                        trace: Vec::new(),
                        violations: 0,
                    })
                    .collect();
                let report = GuessReport {
                    index: gi,
                    guess,
                    marked,
                    status: GuessStatus::Rejected(reason),
                    successes: 0,
                    failures: BTreeMap::from([(reason.as_str().to_string(), seeds.len())]),
                    best_cost: None,
                    runs: Vec::new(),
                };
                (report, runs)
            };
            let upper_bounds = match compute_upper_bounds(space, guess, r) {
                Ok(u) => u,
                Err(_) => return rejected(FailReason::GuessTooLarge, 0),
            };
            let marked = greedy_mark(space, &upper_bounds);
            let n_marked = marked.len();
            let initial =
                match SolverState::initialize(space, params, upper_bounds, marked, 0, config.trace)
                {
                    Ok(s) => s,
                    Err(reason) => return rejected(reason, n_marked),
                };
            let runs: Vec<RunOutcome> = seeds
                .par_iter()
                .enumerate()
                .map(|(rep, &seed)| {
                    let res = run_from(space, initial.with_seed(seed), cap, None);
                    let violations = if config.trace {
                        scatter_diagnostics(&res.trace, eps, k, r).violations
                    } else {
                        0
                    };
                    let (outcome, centers, c1, c2) = match res.outcome {
                        Ok(sol) => (
                            "success".to_string(),
                            Some(sol.solution.into_centers()),
                            Some(sol.cost_r_prime),
                            Some(sol.cost_bicriteria),
                        ),
                        Err(f) => (f.as_str().to_string(), None, None, None),
                    };
                    RunOutcome {
                        record: RunRecord {
                            rep,
                            seed,
                            outcome,
                            iterations: res.iterations,
                            nearby_steps: res.nearby_steps,
                            faraway_steps: res.faraway_steps,
                            cost_r_prime: c1,
                            cost_bicriteria: c2,
                        },
                        centers,
                        trace: res.trace,
                        violations,
                    }
                })
                .collect();
            let mut failures = BTreeMap::new();
            let mut successes = 0;
            let mut best_cost: Option<f64> = None;
            for run in &runs {
                match run.record.cost_r_prime {
                    Some(c) => {
                        successes += 1;
                        best_cost = Some(best_cost.map_or(c, |b| b.min(c)));
                    }
                    None => *failures.entry(run.record.outcome.clone()).or_insert(0) += 1,
                }
            }
            let report = GuessReport {
                index: gi,
                guess,
                marked: n_marked,
                status: GuessStatus::Ran,
                successes,
                failures,
                best_cost,
                runs: Vec::new(),
            };
            (report, runs)
        })
        .collect();

    let mut best: Option<(f64, u64, usize, RunOutcome)> = None;
    for (mut guess_report, runs) in per_guess {
        let gi = guess_report.index;
        for run in runs {
            if config.trace && guess_report.status == GuessStatus::Ran {
                report.traced_runs += 1;
                report.scatter_violations += run.violations;
            }
            if config.keep_runs {
                guess_report.runs.push(run.record.clone());
            }
            if let Some(c) = run.record.cost_r_prime {
                let better = match &best {
                    None => true,
                    Some((bc, bs, _, _)) => c < *bc || (c == *bc && run.record.seed < *bs),
                };
                if better {
                    best = Some((c, run.record.seed, gi, run));
                }
            }
        }
        report.guesses.push(guess_report);
    }

    match best {
        Some((_, seed, gi, run)) => {
            let centers = run.centers.expect("successful runs carry centers");
            debug_assert_eq!(
                cost_unchecked(space, &centers, r_prime, z),
                run.record.cost_r_prime.unwrap()
            );
            report.best = Some(BestSolution {
                guess_index: Some(gi),
                guess: Some(report.guesses[gi].guess),
                seed: Some(seed),
                cost_r_prime: run.record.cost_r_prime.unwrap(),
                cost_bicriteria: run.record.cost_bicriteria.unwrap(),
                centers,
                radius_used,
                iterations: run.record.iterations,
                trace: run.trace,
            });
            Ok(report)
        }
        None => Err(Error::NoSolutionFound(Box::new(report))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn instance(r: f64, k: usize) -> Instance {
        let clients: Vec<Vec<f64>> = [
            [0.0, 0.0],
            [1.0, 0.0],
            [0.0, 1.0],
            [10.0, 10.0],
            [11.0, 10.0],
        ]
        .iter()
        .map(|p| p.to_vec())
        .collect();
        let facilities: Vec<Vec<f64>> = [[0.3, 0.3], [10.5, 10.0], [5.0, 5.0]]
            .iter()
            .map(|p| p.to_vec())
            .collect();
        let space = MetricSpace::euclidean(2, &clients, Some(&facilities)).unwrap();
        Instance::new(space, k, r, 1.0).unwrap()
    }

    #[test]
    fn grid_spans_lower_to_upper() {
        let inst = instance(0.0, 2);
        let cfg = SolverConfig::new(0.5);
        let (_, u) = one_center(&inst.space, 0.0, 1.0);
        let g = guess_grid(&inst, &cfg, u);
        assert!(g.lower > 0.0 && g.lower <= u);
        assert!(*g.guesses.last().unwrap() >= u);
        assert!(g.guesses[g.guesses.len() - 2] < u);
        for w in g.guesses.windows(2) {
            assert!((w[1] / w[0] - (1.0 + 0.5 / 3.0)).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_upper_bound_shortcut() {
        let inst = instance(100.0, 1);
        let rep = solve(&inst, &SolverConfig::new(0.5)).unwrap();
        let best = rep.best.unwrap();
        assert_eq!(best.cost_r_prime, 0.0);
        assert_eq!(best.guess_index, None);
        assert!(rep.guesses.is_empty());
    }

    #[test]
    fn solves_two_clusters() {
        let inst = instance(0.5, 2);
        let mut cfg = SolverConfig::new(0.5);
        cfg.repetitions = 20;
        cfg.seed = 9;
        let rep = solve(&inst, &cfg).unwrap();
        let best = rep.best.unwrap();
        assert!(best.centers.len() <= 2);
        let direct =
            crate::metric::cost(&inst.space, &best.centers, 0.5 * (1.0 + 0.5 / 3.0), 1.0).unwrap();
        assert_eq!(direct, best.cost_r_prime);
        // facilities 0 and 1 are optimal: cost_r = 2 * (sqrt(0.58) - 0.5)
        let opt = 2.0 * (0.58f64.sqrt() - 0.5);
        assert!(best.cost_bicriteria <= 1.5 * opt + 1e-9);
    }

    #[test]
    fn report_is_deterministic_and_keeps_runs() {
        let inst = instance(0.2, 2);
        let mut cfg = SolverConfig::new(0.4);
        cfg.repetitions = 5;
        cfg.keep_runs = true;
        cfg.trace = true;
        let a = solve(&inst, &cfg).unwrap();
        let b = solve(&inst, &cfg).unwrap();
        assert_eq!(a, b);
        for g in &a.guesses {
            assert_eq!(g.runs.len(), 5);
        }
        assert_eq!(a.scatter_violations, 0);
    }

    #[test]
    fn single_guess_failure_is_an_error() {
        let inst = instance(0.0, 1);
        let mut cfg = SolverConfig::new(0.5);
        cfg.guess = Some(1e-6);
        cfg.repetitions = 3;
        match solve(&inst, &cfg) {
            Err(Error::NoSolutionFound(rep)) => {
                assert_eq!(rep.guesses.len(), 1);
                assert!(rep.best.is_none());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_bad_config() {
        let inst = instance(0.0, 1);
        assert!(solve(&inst, &SolverConfig::new(1.0)).is_err());
        let mut cfg = SolverConfig::new(0.5);
        cfg.repetitions = 0;
        assert!(solve(&inst, &cfg).is_err());
    }
}
