mod common;

use gencol::counterexample::{build_fixture, verify_stationarity};
use gencol::gencol::{GenCol, StepOutcome};
use gencol::model::{marginal_error, Configuration, CostSpec, DiscreteMarginal};
use gencol::oracle::{full_active_set, solve_dense_lp};
use gencol::reduced_lp::solve_reduced;
use gencol::{
    run, run_from, Certificate, Error, GenColConfig, Problem, Problem32, SearchRule, Termination,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn single_row_problem_exhausts_immediately() {
    for sizes in [[1usize, 5], [5, 1]] {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let problem = common::random_problem(&mut rng, &sizes);
        let report = run(&problem, GenColConfig::default()).unwrap();
        assert_eq!(report.termination, Termination::ExhaustedProposals);
        assert!(report.accepted.is_empty());
        assert_eq!(report.final_plan.len(), 5);
        assert_eq!(report.certificate, Certificate::CertifiedOptimal);
    }
    let one = Problem::new(
        vec![DiscreteMarginal::<f64>::uniform(1).unwrap(); 2],
        CostSpec::from_matrix(vec![vec![3.5]]).unwrap(),
    )
    .unwrap();
    let report = run(&one, GenColConfig::default()).unwrap();
    assert_eq!(report.final_plan.iter().collect::<Vec<_>>(), vec![(&Configuration::from([0, 0]), 1.0)]);
    assert_eq!(report.objective, 3.5);
}

#[test]
fn global_optimum_on_two_by_two_is_stationary() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let problem = common::random_problem(&mut rng, &[2, 2]);
    let omega = full_active_set(problem.sizes()).unwrap();
    let mut state = GenCol::with_active_set(&problem, GenColConfig::default(), omega).unwrap();
    assert_eq!(state.step().unwrap(), StepOutcome::Exhausted);
    let dense = solve_dense_lp(&problem).unwrap();
    assert!((state.solution().objective - dense.objective).abs() <= common::tol_lp(&problem));
}

#[test]
fn ten_by_ten_matches_dense_over_seeds() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let problem = common::random_problem(&mut rng, &[10, 10]);
    let dense = solve_dense_lp(&problem).unwrap();
    for seed in 0..20 {
        let report = run(&problem, GenColConfig { seed, ..GenColConfig::default() }).unwrap();
        assert_eq!(report.termination, Termination::ExhaustedProposals);
        assert!((report.objective - dense.objective).abs() <= common::tol_lp(&problem));
        assert_eq!(report.certificate, Certificate::CertifiedOptimal);
        assert_eq!(report.rng_seed, seed);
    }
}

#[test]
fn tail_clearing_keeps_support_and_plan() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let problem = common::random_problem(&mut rng, &[20, 20]);
    let config = GenColConfig { beta: 2.0, seed: 4, ..GenColConfig::default() };
    let mut state = GenCol::new(&problem, config).unwrap();
    let mut cleared = false;
    loop {
        let before = state.active_set().len();
        let out = state.step().unwrap();
        if out == StepOutcome::Exhausted {
            break;
        }
        cleared |= state.active_set().len() <= before;
        let sol = state.solution();
        assert!(sol.plan.support().all(|r| state.active_set().contains(r)));
        assert!(state.active_set().len() <= state.bound());
        let again = solve_reduced(state.active_set(), &problem, Some(&sol.basis)).unwrap();
        assert_eq!(again.plan, sol.plan);
        assert_eq!(again.pivots, 0);
    }
    assert!(cleared, "run never hit the active-set bound");
}

#[test]
fn single_entry_counterexample_is_stationary() {
    let fixture = build_fixture::<f64>();
    assert!(verify_stationarity(&fixture).unwrap());
    let omega = fixture.gamma0_active_set().unwrap();
    let config = GenColConfig { rule: Some(SearchRule::SingleEntry), seed: 7, ..GenColConfig::default() };
    let report = run_from(&fixture.problem, config, omega).unwrap();
    assert_eq!(report.termination, Termination::ExhaustedProposals);
    assert_eq!(report.objective, 1.0);
    assert_eq!(report.final_plan, fixture.gamma0);
    assert!(report.objective_trajectory.iter().all(|&(_, v)| v == 1.0));
    assert!(report.accepted.len() <= fixture.one_entry_proposals.len());
    assert!(report.accepted.iter().all(|a| fixture.one_entry_proposals.contains(&a.child)));
    assert_eq!(report.certificate, Certificate::StationaryUnderRule);
}

#[test]
fn many_entry_counterexample_escapes() {
    let fixture = build_fixture::<f64>();
    let omega = fixture.gamma0_active_set().unwrap();
    let config = GenColConfig { rule: Some(SearchRule::ManyEntry), seed: 7, ..GenColConfig::default() };
    let report = run_from(&fixture.problem, config, omega).unwrap();
    assert_eq!(report.objective, 0.0);
    assert_eq!(report.final_plan, fixture.gamma_star);
    assert!(report.accepted.iter().any(|a| {
        let c = a.child.indices();
        c[0] == c[1] && c[1] == c[2]
    }));
    assert_eq!(report.certificate, Certificate::CertifiedOptimal);
}

#[test]
fn f32_run_agrees_with_f64() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let p64 = common::random_problem(&mut rng, &[6, 5]);
    let marginals = p64
        .marginals()
        .iter()
        .map(|m| {
            let w: Vec<f32> = m.weights().iter().map(|&x| x as f32).collect();
            DiscreteMarginal::new(w).unwrap()
        })
        .collect();
    let c64 = p64.cost().clone();
    let cost = CostSpec::from_fn(vec![6, 5], move |idx| c64.eval(idx) as f32).unwrap();
    let p32: Problem32 = Problem::new(marginals, cost).unwrap();
    let r32 = run(&p32, GenColConfig::default()).unwrap();
    let dense = solve_dense_lp(&p64).unwrap();
    assert_eq!(r32.termination, Termination::ExhaustedProposals);
    assert!((r32.objective as f64 - dense.objective).abs() < 1e-4);
    assert!(marginal_error(&r32.final_plan, p32.marginals()).unwrap() < 1e-5);
}

#[test]
fn beta_is_validated_and_flagged() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let problem = common::random_problem(&mut rng, &[4, 4]);
    for beta in [1.0, 0.5, f64::NAN, f64::INFINITY] {
        let err = run(&problem, GenColConfig { beta, ..GenColConfig::default() }).unwrap_err();
        assert!(matches!(err, Error::InvalidConfig(_)));
    }
    let report = run(&problem, GenColConfig { beta: 1.5, ..GenColConfig::default() }).unwrap();
    assert!(!report.beta_certified);
    assert_eq!(report.active_bound, 12);
    let err = run(
        &problem,
        GenColConfig { rule: Some(SearchRule::TwoMarginal), ..GenColConfig::default() },
    );
    assert!(err.is_ok());
    let mmot = common::random_problem(&mut rng, &[2, 2, 2]);
    let err = run(&mmot, GenColConfig { rule: Some(SearchRule::TwoMarginal), ..GenColConfig::default() });
    assert!(matches!(err, Err(Error::InvalidConfig(_))));
}

#[test]
fn huge_product_runs_lazily_and_is_uncertified() {
    // 10 marginals on 10 points: 1e10 configurations, never enumerated.
    // A repulsive pairwise cost, so the northwest start is far from optimal.
    let n = 10;
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let marginals: Vec<_> = (0..n)
        .map(|_| DiscreteMarginal::new(common::random_weights(&mut rng, 10)).unwrap())
        .collect();
    let cost = CostSpec::from_fn(vec![10; n], |idx: &[usize]| {
        let mut s = 0.0;
        for i in 0..idx.len() {
            for j in i + 1..idx.len() {
                s += 1.0 / (1.0 + idx[i].abs_diff(idx[j]) as f64);
            }
        }
        s
    })
    .unwrap()
    .with_sup_norm(45.0);
    let problem = Problem::new(marginals, cost).unwrap();
    let config = GenColConfig { max_outer_iterations: 150, seed: 1, ..GenColConfig::default() };
    let report = run(&problem, config).unwrap();
    assert_eq!(report.certificate, Certificate::Uncertified);
    assert!(report.final_plan.len() <= problem.support_bound());
    assert!(report.active_set_sizes.iter().all(|&s| s <= report.active_bound));
    assert!(marginal_error(&report.final_plan, problem.marginals()).unwrap() < 1e-9);
    let (first, last) = (report.objective_trajectory[0].1, report.objective);
    assert!(last < first, "{first} -> {last} after {} steps ({})", report.accepted.len(), report.termination.name());
}
