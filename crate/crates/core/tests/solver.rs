mod common;

use hybrid_core::gen::GenKind;
use hybrid_core::metric::{self, Site};
use hybrid_core::oracle;
use hybrid_core::solver::{self, find_consistent_labeling, RunParams, SolverConfig, SolverState};
use hybrid_core::Instance;

#[test]
fn continuous_instances_beat_the_grid_oracle() {
    for seed in 0..6 {
        let inst = common::instance(GenKind::EuclideanPlanted, 12, 0, 2, 0.5, seed);
        let grid = oracle::candidate_grid(&inst.space, 0.5).unwrap();
        let (_, opt) = oracle::brute_force_grid(&inst.space, &grid, inst.k, inst.r, 1.0).unwrap();
        assert!(opt.grid_restricted);
        let mut cfg = SolverConfig::new(0.5);
        cfg.repetitions = 60;
        cfg.seed = seed;
        let rep = solver::solve(&inst, &cfg).unwrap();
        let best = rep.best.unwrap();
        assert!(best.centers.iter().all(|c| matches!(c, Site::Coords(_))));
        let cost = metric::cost(&inst.space, &best.centers, 1.5 * inst.r, 1.0).unwrap();
        assert!(
            cost <= 1.5 * opt.opt_cost + 1e-9,
            "seed {seed}: {cost} vs {}",
            opt.opt_cost
        );
    }
}

#[test]
fn power_two_objective_meets_the_bound() {
    let mut solved = 0;
    for (i, base) in common::small_suite(12, 91).iter().enumerate() {
        let inst = Instance::new(base.space.clone(), base.k, base.r, 2.0).unwrap();
        let opt = oracle::brute_force(&inst.space, inst.k, inst.r, 2.0).unwrap();
        let mut cfg = SolverConfig::new(0.5);
        cfg.repetitions = 200;
        cfg.seed = i as u64;
        if let Ok(rep) = solver::solve(&inst, &cfg) {
            let best = rep.best.unwrap();
            let check = oracle::verify_bicriteria(
                &inst.space,
                &best.centers,
                inst.k,
                inst.r,
                0.5,
                opt.opt_cost,
                2.0,
            );
            assert!(check.ok, "instance {i}: {check:?}");
            solved += 1;
        }
    }
    assert!(solved >= 10, "{solved}/12");
}

#[test]
fn successful_runs_from_valid_guesses_are_mostly_consistent() {
    let eps = 0.5;
    let (mut runs, mut consistent) = (0, 0);
    for inst in common::small_suite(30, 5150) {
        let opt = oracle::brute_force(&inst.space, inst.k, inst.r, 1.0).unwrap();
        if opt.opt_cost == 0.0 {
            continue;
        }
        let params = RunParams {
            k: inst.k,
            r: inst.r,
            z: 1.0,
            epsilon: eps,
            guess: opt.opt_cost * (1.0 + eps / 6.0),
        };
        for seed in 0..20 {
            let Ok(mut state) = SolverState::start(&inst.space, params, seed, false).unwrap()
            else {
                continue;
            };
            while state.needs_step() && state.iterations() < 1000 {
                if state.iterate(&inst.space, None).is_err() {
                    break;
                }
            }
            if state.needs_step() {
                continue;
            }
            runs += 1;
            if find_consistent_labeling(&inst.space, state.requests(), opt.opt_solution.centers())
                .is_some()
            {
                consistent += 1;
            }
        }
    }
    println!("{consistent}/{runs} successful runs consistent");
    assert!(runs >= 100);
    assert!(consistent * 20 >= runs * 19, "{consistent}/{runs}");
}
