//! Acceptance suite: one line per criterion, nonzero exit if any fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use hybrid_core::ball::{self, BallOutcome, Request, RequestSet};
use hybrid_core::cli::{self, Job, RunReport};
use hybrid_core::coreset::{self, AnchorOptions};
use hybrid_core::gen::{GenKind, GenParams};
use hybrid_core::io::InstanceFile;
use hybrid_core::metric::{self, Site};
use hybrid_core::oracle;
use hybrid_core::solver::{
    self, compute_upper_bounds, greedy_mark, upper_bound_violations, witness_mass, SolveReport,
    SolverConfig, SolverState,
};
use hybrid_core::{Instance, MetricSpace};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EPS: f64 = 0.5;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn solve_suite(suite: &[Instance], trace: bool) -> Vec<Result<SolveReport, String>> {
    suite
        .iter()
        .enumerate()
        .map(|(i, inst)| {
            let mut cfg = SolverConfig::new(EPS);
            cfg.repetitions = 200;
            cfg.seed = i as u64;
            cfg.trace = trace;
            solver::solve(inst, &cfg).map_err(|e| e.to_string())
        })
        .collect()
}

fn bicriteria(suite: &[Instance], reports: &[Result<SolveReport, String>]) -> Verdict {
    let mut ok = 0;
    for (inst, rep) in suite.iter().zip(reports) {
        let opt = oracle::brute_force(&inst.space, inst.k, inst.r, inst.z).unwrap();
        if let Ok(rep) = rep {
            let best = rep.best.as_ref().unwrap();
            let cost =
                metric::cost(&inst.space, &best.centers, (1.0 + EPS) * inst.r, inst.z).unwrap();
            if best.centers.len() <= inst.k && cost <= (1.0 + EPS) * opt.opt_cost + 1e-9 {
                ok += 1;
            }
        }
    }
    let need = (suite.len() * 9).div_ceil(10);
    verdict(
        ok >= need,
        format!(
            "{ok}/{} instances within (1+eps) OPT at radius (1+eps) r",
            suite.len()
        ),
    )
}

fn kmedian(suite: &[Instance]) -> Verdict {
    let zero: Vec<Instance> = suite.iter().map(|i| common::with_radius(i, 0.0)).collect();
    let reports = solve_suite(&zero, false);
    let mut solved = 0;
    let mut bad = 0;
    for (inst, rep) in zero.iter().zip(&reports) {
        let opt = oracle::brute_force(&inst.space, inst.k, 0.0, 1.0).unwrap();
        if let Ok(rep) = rep {
            solved += 1;
            let cost =
                metric::cost(&inst.space, &rep.best.as_ref().unwrap().centers, 0.0, 1.0).unwrap();
            if cost > (1.0 + EPS).powi(2) * opt.opt_cost + 1e-9 {
                bad += 1;
            }
        }
    }
    // exact agreement of the r = 0 cost with a direct k-median evaluation
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut mismatches = 0;
    for t in 0..100 {
        let inst = common::instance(
            common::KINDS[t % 3],
            rng.gen_range(3..=15),
            rng.gen_range(1..=8),
            1,
            0.0,
            rng.gen(),
        );
        let m = inst.space.n_facilities().unwrap();
        let size = rng.gen_range(1..=m);
        let centers: Vec<Site> = (0..size)
            .map(|_| Site::Facility(rng.gen_range(0..m)))
            .collect();
        let mut direct = 0.0;
        for p in 0..inst.space.n_clients() {
            let mut best = f64::INFINITY;
            for c in &centers {
                let d = inst.space.distance(&Site::Client(p), c).unwrap();
                if d < best {
                    best = d;
                }
            }
            direct += best;
        }
        if metric::cost(&inst.space, &centers, 0.0, 1.0).unwrap() != direct {
            mismatches += 1;
        }
    }
    verdict(
        bad == 0 && mismatches == 0,
        format!(
            "{solved}/{} solved at r = 0, {bad} above (1+eps)^2 k-median OPT; {mismatches}/100 cost mismatches",
            zero.len()
        ),
    )
}

fn kcenter() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut ok = 0;
    for i in 0..20 {
        let k = 1 + i % 3;
        let base = common::instance(
            common::KINDS[i % 3],
            rng.gen_range(6..=12),
            rng.gen_range(3..=8),
            k,
            0.0,
            rng.gen(),
        );
        let rstar = oracle::kcenter_radius(&base.space, k).unwrap();
        let inst = common::with_radius(&base, rstar);
        let mut cfg = SolverConfig::new(EPS);
        cfg.repetitions = 200;
        cfg.seed = i as u64;
        if let Ok(rep) = solver::solve(&inst, &cfg) {
            let c = metric::cost(
                &inst.space,
                &rep.best.unwrap().centers,
                (1.0 + EPS / 3.0) * rstar,
                1.0,
            )
            .unwrap();
            if c <= 1e-9 {
                ok += 1;
            }
        }
    }
    verdict(
        ok >= 18,
        format!("{ok}/20 instances with zero cost at radius (1+eps/3) r*"),
    )
}

struct CoresetCase {
    inst: Instance,
    epsilon: f64,
}

fn coreset_suite() -> Vec<CoresetCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    (0..30)
        .map(|i| {
            let k = 1 + i % 3;
            let n = rng.gen_range(10..=40);
            let m = rng.gen_range(3..=7);
            let base = common::instance(common::KINDS[i % 3], n, m, k, 0.0, rng.gen());
            let r = common::pick_radius(&base.space, k, i, &mut rng);
            CoresetCase {
                inst: common::with_radius(&base, r),
                epsilon: if i % 2 == 0 { 0.5 } else { 0.3 },
            }
        })
        .collect()
}

fn coreset_and_anchor(cases: &[CoresetCase]) -> (Verdict, Verdict) {
    let mut violations = 0;
    let mut checked = 0;
    let mut worst_err: f64 = 0.0;
    let mut worst_ratio: f64 = 0.0;
    let mut anchor_bad = 0;
    for (i, case) in cases.iter().enumerate() {
        let inst = &case.inst;
        let t = coreset::build_anchor_set(
            inst,
            &AnchorOptions {
                seed: i as u64,
                ..AnchorOptions::default()
            },
        )
        .unwrap();
        let opt = oracle::brute_force(&inst.space, inst.k, inst.r, 1.0)
            .unwrap()
            .opt_cost;
        let ratio = if opt > 0.0 {
            t.cost / opt
        } else if t.cost == 0.0 {
            1.0
        } else {
            f64::INFINITY
        };
        worst_ratio = worst_ratio.max(ratio);
        if ratio > 36.0 {
            anchor_bad += 1;
        }
        let out = coreset::build_coreset(&inst.space, inst.r, case.epsilon, &t).unwrap();
        assert_eq!(out.coreset.total_weight() as usize, inst.space.n_clients());
        let cert =
            coreset::certify(&inst.space, &out.coreset, inst.k, inst.r, case.epsilon).unwrap();
        violations += cert.violations;
        checked += cert.solutions_checked;
        worst_err = worst_err.max(cert.max_relative_error / case.epsilon);
    }
    (
        verdict(
            violations == 0,
            format!(
                "{violations} violations over {checked} solutions on {} instances (worst error {:.3} of eps)",
                cases.len(),
                worst_err
            ),
        ),
        verdict(
            anchor_bad == 0,
            format!("{anchor_bad}/{} anchor sets above 36 OPT (worst ratio {worst_ratio:.3})", cases.len()),
        ),
    )
}

#[derive(Default)]
struct InvariantCounts {
    marking_states: usize,
    marking_bad: usize,
    solution_states: usize,
    solution_bad: usize,
    upper_states: usize,
    upper_bad: usize,
    witness_states: usize,
    witness_bad: usize,
}

fn solver_invariants(suite: &[Instance]) -> Verdict {
    let mut c = InvariantCounts::default();
    for (i, inst) in suite.iter().enumerate() {
        let space = &inst.space;
        let opt = oracle::brute_force(space, inst.k, inst.r, 1.0).unwrap();
        if opt.opt_cost == 0.0 {
            continue;
        }
        let o = opt.opt_solution.centers();
        for factor in [1.0, 1.0 + EPS / 6.0, 1.0 + EPS / 3.0, 2.0] {
            let guess = opt.opt_cost * factor;
            let u = compute_upper_bounds(space, guess, inst.r).unwrap();
            let marked = greedy_mark(space, &u);
            c.marking_states += 1;
            if marked.len() > inst.k {
                c.marking_bad += 1;
            }
            let all: Vec<usize> = (0..space.n_clients()).collect();
            c.upper_states += 1;
            if !upper_bound_violations(space, &u, o, &all).is_empty() {
                c.upper_bad += 1;
            }
            let params = solver::RunParams {
                k: inst.k,
                r: inst.r,
                z: 1.0,
                epsilon: EPS,
                guess,
            };
            for seed in 0..10u64 {
                let Ok(Ok(mut state)) =
                    SolverState::start(space, params, (i as u64) << 8 | seed, true)
                else {
                    continue;
                };
                let mut states = Vec::new();
                loop {
                    states.push((
                        state.distances().to_vec(),
                        state.centers(),
                        state.needs_step(),
                    ));
                    if !state.needs_step()
                        || state.iterations() >= 500
                        || state.iterate(space, None).is_err()
                    {
                        break;
                    }
                }
                for (dist, centers, looping) in states {
                    c.solution_states += 1;
                    if !solver::bound_violations(&dist, state.upper_bounds(), 3.1).is_empty() {
                        c.solution_bad += 1;
                    }
                    if looping {
                        c.witness_states += 1;
                        if !witness_mass(space, &centers, o, inst.r, EPS, 1.0).holds(EPS) {
                            c.witness_bad += 1;
                        }
                    }
                }
            }
        }
    }
    let enough = c.marking_states >= 100
        && c.solution_states >= 100
        && c.upper_states >= 100
        && c.witness_states >= 100;
    let clean = c.marking_bad + c.solution_bad + c.upper_bad + c.witness_bad == 0;
    verdict(
        enough && clean,
        format!(
            "marking {}/{}, d(p,X) <= 3.1u {}/{}, d(p,O) <= u {}/{}, witness mass {}/{} (violations/states)",
            c.marking_bad,
            c.marking_states,
            c.solution_bad,
            c.solution_states,
            c.upper_bad,
            c.upper_states,
            c.witness_bad,
            c.witness_states
        ),
    )
}

fn ball_soundness() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let mut disagreements = 0;
    for t in 0..200 {
        let inst = common::instance(
            common::KINDS[t % 3],
            rng.gen_range(2..=12),
            rng.gen_range(1..=8),
            1,
            0.0,
            rng.gen(),
        );
        let space = &inst.space;
        let len = rng.gen_range(1..=5);
        let reqs: Vec<Request> = (0..len)
            .map(|_| {
                Request::new(rng.gen_range(0..space.n_clients()), rng.gen_range(0.5..8.0)).unwrap()
            })
            .collect();
        let q = RequestSet::from_requests(reqs.clone()).unwrap();
        let eta = [0.0125, 0.05, 0.2][t % 3];
        let mut best = (f64::INFINITY, 0);
        for f in 0..space.n_facilities().unwrap() {
            let g = reqs
                .iter()
                .map(|r| {
                    space
                        .distance(&Site::Client(r.point), &Site::Facility(f))
                        .unwrap()
                        / r.radius
                })
                .fold(0.0, f64::max);
            if g < best.0 {
                best = (g, f);
            }
        }
        let expect = if best.0 <= 1.0 + eta {
            BallOutcome::Found {
                center: best.1,
                ratio: best.0,
            }
        } else {
            BallOutcome::Infeasible {
                lower_bound: best.0,
            }
        };
        if ball::solve_discrete(space, &q, eta).unwrap() != expect {
            disagreements += 1;
        }
    }

    let mut off = 0;
    let mut errors = 0;
    for t in 0..50 {
        let len = rng.gen_range(2..=5);
        let pts: Vec<Vec<f64>> = (0..len)
            .map(|_| vec![rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)])
            .collect();
        let space = MetricSpace::euclidean(2, &pts, None).unwrap();
        let reqs: Vec<Request> = (0..len)
            .map(|p| Request::new(p, rng.gen_range(0.25..0.8)).unwrap())
            .collect();
        let q = RequestSet::from_requests(reqs).unwrap();
        let eta = [0.0125, 0.05][t % 2];
        let mut grid = f64::INFINITY;
        for i in 0..=1000 {
            for j in 0..=1000 {
                let x = Site::Coords(vec![i as f64 * 1e-3, j as f64 * 1e-3]);
                grid = grid.min(ball::ratio(&space, &q, &x));
            }
        }
        match ball::solve_euclidean(&space, &q, eta) {
            Ok(BallOutcome::Found { center, ratio }) => {
                let g = ball::ratio(&space, &q, &Site::Coords(center));
                if (g - ratio).abs() > 1e-12 * g || ratio > (1.0 + eta) * grid {
                    off += 1;
                }
            }
            Ok(BallOutcome::Infeasible { lower_bound }) => {
                if lower_bound > grid * (1.0 + 1e-9)
                    || grid > (1.0 + eta) * lower_bound
                    || grid <= 1.0
                {
                    off += 1;
                }
            }
            Err(_) => errors += 1,
        }
    }
    verdict(
        disagreements == 0 && off == 0 && errors == 0,
        format!(
            "discrete {disagreements}/200 disagreements; continuous {off}/50 outside 1+eta of the grid, {errors} budget errors"
        ),
    )
}

fn scattering(reports: &[Result<SolveReport, String>]) -> Verdict {
    let runs: usize = reports.iter().flatten().map(|r| r.traced_runs).sum();
    let violations: usize = reports.iter().flatten().map(|r| r.scatter_violations).sum();
    verdict(
        violations == 0 && runs > 0,
        format!("{violations} radius-interval violations over {runs} traced runs"),
    )
}

fn determinism(suite: &[Instance]) -> Verdict {
    let mut jobs = Vec::new();
    for (i, inst) in suite.iter().take(5).enumerate() {
        let mut cfg = SolverConfig::new(EPS);
        cfg.repetitions = 20;
        cfg.seed = i as u64;
        cfg.trace = true;
        cfg.keep_runs = i % 2 == 0;
        jobs.push(Job::Solve {
            instance: InstanceFile::from_instance(inst),
            solver: cfg,
        });
        jobs.push(Job::Oracle {
            instance: InstanceFile::from_instance(inst),
            kcenter: i % 2 == 1,
            grid_step: None,
        });
    }
    let inst = &suite[2];
    jobs.push(Job::Coreset {
        instance: InstanceFile::from_instance(inst),
        epsilon: 0.3,
        certify: true,
        anchor: AnchorOptions::default(),
    });
    jobs.push(Job::Ballcheck {
        instance: InstanceFile::from_instance(inst),
        requests: vec![Request::new(0, 2.0).unwrap(), Request::new(1, 3.0).unwrap()],
        eta: 0.0125,
    });
    jobs.push(Job::Gen {
        params: GenParams {
            kind: GenKind::EuclideanPlanted,
            n: 10,
            m: 4,
            dim: 3,
            k: 2,
            r: 0.5,
            z: 1.0,
            seed: 5,
        },
    });
    let continuous = common::instance(GenKind::EuclideanUniform, 8, 0, 2, 1.0, 12);
    jobs.push(Job::Solve {
        instance: InstanceFile::from_instance(&continuous),
        solver: SolverConfig {
            repetitions: 10,
            ..SolverConfig::new(EPS)
        },
    });
    let total = jobs.len();
    let mut differing = 0;
    for job in jobs {
        let (report, _) = cli::run_job(job, vec!["acceptance".into()]).unwrap();
        let text = serde_json::to_string_pretty(&report).unwrap();
        let parsed: RunReport = serde_json::from_str(&text).unwrap();
        let (fresh, same) = cli::replay(&parsed).unwrap();
        if !same || cli::normalized(&fresh.outcome) != cli::normalized(&report.outcome) {
            differing += 1;
        }
    }
    verdict(
        differing == 0,
        format!("{differing}/{total} replayed reports differ"),
    )
}

fn main() -> ExitCode {
    let start = Instant::now();
    let suite = common::small_suite(50, 2024);
    let reports = solve_suite(&suite, true);
    let cases = coreset_suite();
    let (c4, c5) = coreset_and_anchor(&cases);
    let results = [
        ("1 bicriteria guarantee", bicriteria(&suite, &reports)),
        ("2 k-median reduction", kmedian(&suite)),
        ("3 k-center reduction", kcenter()),
        ("4 coreset bound", c4),
        ("5 anchor-set quality", c5),
        ("6 solver invariants", solver_invariants(&suite)),
        ("7 ball-intersection soundness", ball_soundness()),
        ("8 scattering intervals", scattering(&reports)),
        ("9 replay determinism", determinism(&suite)),
    ];
    let mut failed = 0;
    for (name, v) in &results {
        println!(
            "criterion {name}: {} ({})",
            if v.pass { "PASS" } else { "FAIL" },
            v.detail
        );
        if !v.pass {
            failed += 1;
        }
    }
    println!(
        "acceptance: {}/{} passed in {:.1?}",
        results.len() - failed,
        results.len(),
        start.elapsed()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
