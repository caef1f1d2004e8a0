//! A three-marginal instance on which the single-entry search rule stalls.
//!
//! Three uniform marginals on `{0, 1, 2}` with cost 0 when all entries are
//! equal, 1 when they are pairwise distinct and 2 otherwise. The plan
//! `gamma0 = (1/3)[(0,1,2) + (1,2,0) + (2,0,1)]` costs 1, every one-entry
//! mutation of its support costs 2, so single-entry GenCol never leaves it,
//! while the diagonal plan `gamma_star` costs 0.

use crate::error::Result;
use crate::gencol::{CandidateSpace, SearchRule};
use crate::model::{
    plan_cost, Configuration, CostSpec, DiscreteMarginal, Problem, SparsePlan,
};
use crate::reduced_lp::{solve_reduced, ActiveSet};
use crate::scalar::Real;

pub const POINTS: usize = 3;

const GAMMA0: [[usize; 3]; 3] = [[0, 1, 2], [1, 2, 0], [2, 0, 1]];

/// The sixteen mutations usually quoted for this instance, in that order.
/// Two one-entry mutations of `(0,1,2)`, namely `(0,0,2)` and `(0,1,0)`, are
/// absent from it; [`one_entry_mutations`] has all eighteen.
pub const LISTED_PROPOSALS: [[usize; 3]; 16] = [
    [0, 1, 1],
    [0, 2, 2],
    [1, 1, 2],
    [2, 1, 2],
    [1, 0, 0],
    [1, 1, 0],
    [1, 2, 1],
    [1, 2, 2],
    [0, 2, 0],
    [2, 2, 0],
    [2, 1, 1],
    [2, 2, 1],
    [2, 0, 0],
    [2, 0, 2],
    [0, 0, 1],
    [1, 0, 1],
];

/// 0 if all equal, 1 if pairwise distinct, 2 otherwise.
pub fn cost_value(idx: &[usize]) -> f64 {
    let (a, b, c) = (idx[0], idx[1], idx[2]);
    if a == b && b == c {
        0.0
    } else if a != b && a != c && b != c {
        1.0
    } else {
        2.0
    }
}

pub fn gamma0_support() -> Vec<Configuration> {
    GAMMA0.iter().map(|r| Configuration::from(*r)).collect()
}

/// Every configuration differing from some `gamma0` support point in
/// exactly one entry, in support order then candidate order.
pub fn one_entry_mutations() -> Vec<Configuration> {
    let sizes = [POINTS; 3];
    gamma0_support()
        .iter()
        .flat_map(|p| {
            CandidateSpace::new(p, SearchRule::SingleEntry, &sizes)
                .map(|s| s.iter().collect::<Vec<_>>())
                .unwrap_or_default()
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct CounterexampleFixture<T> {
    pub problem: Problem<T>,
    pub gamma0: SparsePlan<T>,
    pub gamma_star: SparsePlan<T>,
    /// All one-entry mutations of `supp(gamma0)` (eighteen).
    pub one_entry_proposals: Vec<Configuration>,
    /// [`LISTED_PROPOSALS`] as configurations.
    pub listed_proposals: Vec<Configuration>,
}

pub fn build_fixture<T: Real>() -> CounterexampleFixture<T> {
    build_fixture_with_cost(|idx| T::from_f64_lossy(cost_value(idx)))
}

/// The fixture with a replacement cost, e.g. to perturb single entries.
pub fn build_fixture_with_cost<T, F>(cost: F) -> CounterexampleFixture<T>
where
    T: Real,
    F: Fn(&[usize]) -> T + Send + Sync + 'static,
{
    let marginals: Vec<DiscreteMarginal<T>> = (0..3)
        .map(|_| DiscreteMarginal::uniform(POINTS).expect("three points"))
        .collect();
    let cost = CostSpec::from_fn(vec![POINTS; 3], cost).expect("finite cost");
    let problem = Problem::new(marginals, cost).expect("matching shapes");
    let third = T::one() / T::from_f64_lossy(3.0);
    let gamma0 = SparsePlan::new(gamma0_support().into_iter().map(|r| (r, third)))
        .expect("gamma0 has unit mass");
    let gamma_star = SparsePlan::new((0..POINTS).map(|x| (Configuration::from([x, x, x]), third)))
        .expect("gamma_star has unit mass");
    CounterexampleFixture {
        problem,
        gamma0,
        gamma_star,
        one_entry_proposals: one_entry_mutations(),
        listed_proposals: LISTED_PROPOSALS.iter().map(|r| Configuration::from(*r)).collect(),
    }
}

impl<T: Real> CounterexampleFixture<T> {
    /// `supp(gamma0)` as a feasible active set.
    pub fn gamma0_active_set(&self) -> Result<ActiveSet> {
        ActiveSet::new(self.gamma0.support().cloned(), self.problem.marginals())
    }
}

/// True iff `gamma0` is stationary for the single-entry rule:
/// (a) every one-entry mutation of its support is among the fixture's
/// proposals or the support itself, (b) every proposal costs 2, and
/// (c) the reduced optimum over the support plus all proposals still costs
/// as much as `gamma0`.
pub fn verify_stationarity<T: Real>(fixture: &CounterexampleFixture<T>) -> Result<bool> {
    let cost = fixture.problem.cost();
    let covered = one_entry_mutations().iter().all(|r| {
        fixture.one_entry_proposals.contains(r) || fixture.gamma0.contains(r)
    });
    let two = T::from_f64_lossy(2.0);
    let all_cost_two = fixture.one_entry_proposals.iter().all(|r| cost.at(r) == two);
    if !covered || !all_cost_two {
        return Ok(false);
    }
    let mut configs: Vec<Configuration> = fixture.gamma0.support().cloned().collect();
    configs.extend(
        fixture
            .one_entry_proposals
            .iter()
            .filter(|r| !fixture.gamma0.contains(r))
            .cloned(),
    );
    let omega = ActiveSet::new(configs, fixture.problem.marginals())?;
    let sol = solve_reduced(&omega, &fixture.problem, None)?;
    let c0 = plan_cost(&fixture.gamma0, cost)?;
    Ok((sol.objective - c0).abs() <= fixture.problem.tolerances().lp)
}
