use std::path::{Path, PathBuf};

use gencol::counterexample::{build_fixture, verify_stationarity};
use gencol::model::marginal_error;
use gencol::oracle::{audit_sparsity, certify_full_dual_feasibility, check_ccm, solve_dense_lp};
use gencol::{
    run_from, ActiveSet, Configuration, GenColConfig, SearchRule, Termination,
};
use serde::Serialize;

use crate::error::{CliError, Result};
use crate::problem::{self, counterexample_document};
use crate::report::{emit, now, plan_entries, to_json, trajectory_csv, ResultFile, RunSettings};
use crate::{InitMode, SolveArgs, EXIT_CHECK_FAILED, EXIT_MAX_ITER, EXIT_OK};

pub fn solve(args: &SolveArgs) -> Result<u8> {
    let loaded = problem::load(&args.problem)?;
    let problem = &loaded.problem;
    let rule = args
        .rule
        .as_deref()
        .map(str::parse::<SearchRule>)
        .transpose()?;
    let omega = match (args.init, loaded.initial_set) {
        (InitMode::Northwest, _) | (InitMode::Auto, None) => {
            gencol::reduced_lp::initial_feasible_set(problem.marginals())
        }
        (InitMode::Auto | InitMode::File, Some(set)) => set,
        (InitMode::File, None) => {
            return Err(CliError::Input {
                file: args.problem.display().to_string(),
                line: 1,
                column: 1,
                message: "--init file needs an `initial_set` in the problem document".into(),
            })
        }
    };
    let config = GenColConfig {
        beta: args.beta,
        rule,
        seed: args.seed,
        max_outer_iterations: args.max_iter,
        rel_tol: args.tol,
        certify: true,
    };
    let report = run_from(problem, config, omega)?;
    let settings = RunSettings {
        beta: args.beta,
        rule: report.rule.name().into(),
        max_iter: args.max_iter,
        tol: args.tol,
        init: args.init.name().into(),
    };
    let result = ResultFile::from_report(&report, settings);
    if let Some(path) = &args.trajectory_out {
        emit(Some(path), &trajectory_csv(&result.trajectory))?;
    }
    emit(args.out.as_deref(), &to_json(&result))?;
    Ok(match report.termination {
        Termination::ExhaustedProposals => EXIT_OK,
        Termination::MaxIterations => EXIT_MAX_ITER,
    })
}

pub fn oracle(problem_path: &Path, out: Option<&Path>) -> Result<u8> {
    let loaded = problem::load(problem_path)?;
    let sol = solve_dense_lp(&loaded.problem)?;
    let result = ResultFile {
        solver: "oracle".into(),
        objective: sol.objective,
        plan: plan_entries(&sol.plan),
        potentials: sol.potentials.axes().to_vec(),
        trajectory: Vec::new(),
        termination: None,
        certificate: None,
        seed: None,
        config: None,
        timestamp: now(),
    };
    emit(out, &to_json(&result))?;
    Ok(EXIT_OK)
}

#[derive(Debug, Serialize)]
struct Check {
    name: &'static str,
    passed: bool,
    detail: String,
}

#[derive(Debug, Serialize)]
struct VerifyReport {
    passed: bool,
    checks: Vec<Check>,
}

pub fn verify(
    result_path: &Path,
    problem_path: &Path,
    ccm_k: Option<usize>,
    dual_cert: bool,
    out: Option<&Path>,
) -> Result<u8> {
    let loaded = problem::load(problem_path)?;
    let problem = &loaded.problem;
    let result = ResultFile::read(result_path)?;
    let mismatch = |message: String| CliError::Input {
        file: result_path.display().to_string(),
        line: 1,
        column: 1,
        message,
    };
    let plan = result.sparse_plan().map_err(|e| mismatch(e.to_string()))?;
    if let Some(r) = plan.support().find(|r| !r.in_range(problem.sizes())) {
        return Err(mismatch(format!(
            "plan configuration {r} does not fit problem sizes {:?}",
            problem.sizes()
        )));
    }
    let mut checks = Vec::new();

    let bound = problem.support_bound();
    checks.push(Check {
        name: "sparsity",
        passed: audit_sparsity(&plan, problem.sizes()),
        detail: format!("support {} against bound {bound}", plan.len()),
    });

    let err = marginal_error(&plan, problem.marginals())?;
    checks.push(Check {
        name: "marginals",
        passed: err <= problem.tolerances().mass,
        detail: format!("max marginal error {err:e}"),
    });

    if let Some(k) = ccm_k {
        let support: Vec<Configuration> = plan.support().cloned().collect();
        let check = match check_ccm(&support, problem.cost(), k) {
            Ok(None) => Check {
                name: "cyclical_monotonicity",
                passed: true,
                detail: format!("no improving cycle of length <= {k}"),
            },
            Ok(Some(v)) => Check {
                name: "cyclical_monotonicity",
                passed: false,
                detail: format!(
                    "{}-cycle through {} lowers cost {} -> {}",
                    v.k(),
                    v.points.iter().map(ToString::to_string).collect::<Vec<_>>().join(" "),
                    v.original_cost,
                    v.permuted_cost
                ),
            },
            Err(gencol::Error::Unsupported(msg)) => Check {
                name: "cyclical_monotonicity",
                passed: true,
                detail: format!("skipped: {msg}"),
            },
            Err(e) => return Err(e.into()),
        };
        checks.push(check);
    }

    if dual_cert {
        let check = match result.dual_potentials() {
            None => Check {
                name: "dual_certificate",
                passed: false,
                detail: "result carries no potentials".into(),
            },
            Some(u) => {
                if u.sizes() != problem.sizes() {
                    return Err(mismatch(format!(
                        "potentials have sizes {:?}, problem has {:?}",
                        u.sizes(),
                        problem.sizes()
                    )));
                }
                let tol = problem.tolerances().lp;
                match certify_full_dual_feasibility(&u, problem.cost(), tol)? {
                    None => Check {
                        name: "dual_certificate",
                        passed: true,
                        detail: format!("no configuration with gain above {tol:e}"),
                    },
                    Some((r, g)) => Check {
                        name: "dual_certificate",
                        passed: false,
                        detail: format!("violator {r} with gain {g}"),
                    },
                }
            }
        };
        checks.push(check);
    }

    let passed = checks.iter().all(|c| c.passed);
    emit(out, &to_json(&VerifyReport { passed, checks }))?;
    Ok(if passed { EXIT_OK } else { EXIT_CHECK_FAILED })
}

#[derive(Debug, Serialize)]
struct RunSummary {
    rule: &'static str,
    seed: u64,
    objective: f64,
    termination: &'static str,
    certificate: &'static str,
    accepted: usize,
    plan: Vec<(Vec<usize>, f64)>,
}

#[derive(Debug, Serialize)]
struct CounterexampleSummary {
    one_entry_mutations: usize,
    listed_proposals: usize,
    missing_from_list: Vec<Vec<usize>>,
    stationary: bool,
    stationary_with_listed_only: bool,
    oracle_objective: f64,
    runs: Vec<RunSummary>,
}

pub fn counterexample(
    seed: u64,
    max_iter: u64,
    write_problem: Option<&PathBuf>,
    out: Option<&Path>,
) -> Result<u8> {
    let fixture = build_fixture::<f64>();
    let missing: Vec<Vec<usize>> = fixture
        .one_entry_proposals
        .iter()
        .filter(|r| !fixture.listed_proposals.contains(r))
        .map(|r| r.indices().to_vec())
        .collect();
    let mut listed_only = fixture.clone();
    listed_only.one_entry_proposals = fixture.listed_proposals.clone();

    let mut runs = Vec::new();
    for rule in [SearchRule::SingleEntry, SearchRule::ManyEntry] {
        let omega: ActiveSet = fixture.gamma0_active_set()?;
        let config = GenColConfig {
            rule: Some(rule),
            seed,
            max_outer_iterations: max_iter,
            ..GenColConfig::default()
        };
        let report = run_from(&fixture.problem, config, omega)?;
        runs.push(RunSummary {
            rule: rule.name(),
            seed,
            objective: report.objective,
            termination: report.termination.name(),
            certificate: report.certificate.name(),
            accepted: report.accepted.len(),
            plan: plan_entries(&report.final_plan),
        });
    }
    let summary = CounterexampleSummary {
        one_entry_mutations: fixture.one_entry_proposals.len(),
        listed_proposals: fixture.listed_proposals.len(),
        missing_from_list: missing,
        stationary: verify_stationarity(&fixture)?,
        stationary_with_listed_only: verify_stationarity(&listed_only)?,
        oracle_objective: solve_dense_lp(&fixture.problem)?.objective,
        runs,
    };
    if let Some(path) = write_problem {
        emit(Some(path), &to_json(&counterexample_document()))?;
    }
    emit(out, &to_json(&summary))?;
    Ok(EXIT_OK)
}
