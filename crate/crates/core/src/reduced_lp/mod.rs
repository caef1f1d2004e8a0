//! Exact solver for the transport LP restricted to an active configuration
//! set, returning an extreme-point plan and complementary-slack potentials.
//!
//! The solver is a revised primal simplex. Two-marginal bases are spanning
//! trees of the bipartite support graph; multi-marginal bases use a dense LU
//! factorization, affordable because the rank is `1 + sum(l_i - 1)`.
//! Passing the previous [`Basis`] warm-starts the solve, so the returned plan
//! only changes when some active column has negative reduced cost.

mod dense;
mod simplex;
mod tree;

use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::model::{
    gain, support_bound, Configuration, DiscreteMarginal, DualPotentials, Problem, SparsePlan,
};
use crate::scalar::Real;

use simplex::{staircase, Simplex};

/// The active configuration pool, in insertion order, with the iteration at
/// which each configuration last carried mass (or was inserted).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ActiveSet {
    configs: Vec<Configuration>,
    last_active: Vec<u64>,
    index: HashMap<Configuration, usize>,
}

impl ActiveSet {
    /// Builds an active set and checks that some plan is supported on it.
    pub fn new<T: Real>(
        configs: impl IntoIterator<Item = Configuration>,
        marginals: &[DiscreteMarginal<T>],
    ) -> Result<Self> {
        let sizes: Vec<usize> = marginals.iter().map(DiscreteMarginal::len).collect();
        let mut set = ActiveSet::default();
        for r in configs {
            r.check_range(&sizes)?;
            if !set.insert(r.clone(), 0) {
                return Err(Error::DuplicateConfiguration(r.indices().to_vec()));
            }
        }
        if set.is_empty() {
            return Err(Error::EmptyActiveSet);
        }
        check_feasible(&set, marginals)?;
        Ok(set)
    }

    /// Inserts without any feasibility check; returns false on a duplicate.
    pub(crate) fn insert(&mut self, r: Configuration, iteration: u64) -> bool {
        if self.index.contains_key(&r) {
            return false;
        }
        self.index.insert(r.clone(), self.configs.len());
        self.configs.push(r);
        self.last_active.push(iteration);
        true
    }

    pub fn len(&self) -> usize {
        self.configs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }

    pub fn contains(&self, r: &Configuration) -> bool {
        self.index.contains_key(r)
    }

    /// Configurations in insertion order.
    pub fn configs(&self) -> &[Configuration] {
        &self.configs
    }

    pub fn iter(&self) -> impl Iterator<Item = &Configuration> + '_ {
        self.configs.iter()
    }

    pub fn last_active(&self, r: &Configuration) -> Option<u64> {
        self.index.get(r).map(|&k| self.last_active[k])
    }

    /// Marks `r` as used at `iteration`.
    pub fn touch(&mut self, r: &Configuration, iteration: u64) {
        if let Some(&k) = self.index.get(r) {
            self.last_active[k] = self.last_active[k].max(iteration);
        }
    }

    /// Removes every configuration in `drop`, keeping insertion order.
    pub(crate) fn remove_all(&mut self, drop: &HashSet<Configuration>) {
        let mut configs = Vec::with_capacity(self.configs.len());
        let mut last = Vec::with_capacity(self.configs.len());
        for (r, t) in self.configs.drain(..).zip(self.last_active.drain(..)) {
            if !drop.contains(&r) {
                configs.push(r);
                last.push(t);
            }
        }
        self.index = configs.iter().cloned().enumerate().map(|(k, r)| (r, k)).collect();
        self.configs = configs;
        self.last_active = last;
    }

    /// Insertion-ordered `(configuration, last_active)` pairs.
    pub fn ages(&self) -> impl Iterator<Item = (&Configuration, u64)> + '_ {
        self.configs.iter().zip(self.last_active.iter().copied())
    }
}

/// Result of [`add_column`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AddOutcome {
    Inserted,
    /// The configuration was already active; nothing changed.
    Duplicate,
}

/// Adds `r` to the active set, stamping it with `iteration`.
pub fn add_column(omega: &mut ActiveSet, r: Configuration, iteration: u64) -> AddOutcome {
    if omega.insert(r, iteration) {
        AddOutcome::Inserted
    } else {
        AddOutcome::Duplicate
    }
}

/// Cells of a simplex basis in position order. Enough to warm-start a solve:
/// the factorization is rebuilt deterministically from them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Basis {
    cells: Vec<Configuration>,
}

impl Basis {
    /// Wraps arbitrary cells; a solve validates them and falls back to a
    /// cold start if they are not a feasible basis.
    pub fn from_cells(cells: Vec<Configuration>) -> Self {
        Basis { cells }
    }

    pub fn cells(&self) -> &[Configuration] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains(&self, r: &Configuration) -> bool {
        self.cells.contains(r)
    }
}

/// Optimal primal/dual pair of a reduced problem.
#[derive(Debug, Clone)]
pub struct ReducedSolution<T> {
    pub plan: SparsePlan<T>,
    pub potentials: DualPotentials<T>,
    pub basis: Basis,
    pub objective: T,
    /// Simplex pivots performed by this solve.
    pub pivots: usize,
}

impl<T: Real> ReducedSolution<T> {
    /// Largest gain over the active set; at most `tol_lp` at an optimum.
    pub fn max_active_gain(&self, omega: &ActiveSet, problem: &Problem<T>) -> T {
        omega
            .iter()
            .map(|r| gain(&self.potentials, r, problem.cost()))
            .fold(T::neg_infinity(), T::max)
    }
}

/// Solves the transport LP restricted to `omega`, optionally warm-started.
pub fn solve_reduced<T: Real>(
    omega: &ActiveSet,
    problem: &Problem<T>,
    warm: Option<&Basis>,
) -> Result<ReducedSolution<T>> {
    solve_reduced_with_tol(omega, problem, warm, problem.tolerances().lp)
}

/// As [`solve_reduced`], with an explicit optimality threshold.
pub fn solve_reduced_with_tol<T: Real>(
    omega: &ActiveSet,
    problem: &Problem<T>,
    warm: Option<&Basis>,
    tol_lp: T,
) -> Result<ReducedSolution<T>> {
    if omega.is_empty() {
        return Err(Error::EmptyActiveSet);
    }
    let lp = Simplex::new(problem.marginals(), Some(problem.cost()), omega.configs(), tol_lp);
    let out = lp.solve(warm.map(|b| b.cells.as_slice()))?;

    let plan = SparsePlan::from_raw(
        out.basis
            .iter()
            .zip(&out.values)
            .zip(&out.real)
            .filter(|(_, &real)| real)
            .map(|((r, &v), _)| (r.clone(), v)),
    );
    if plan.len() > support_bound(problem.sizes()) {
        return Err(Error::Internal(format!(
            "plan support {} exceeds the extreme-point bound",
            plan.len()
        )));
    }
    let objective = plan
        .iter()
        .fold(T::zero(), |acc, (r, m)| acc + problem.cost().at(r) * m);
    Ok(ReducedSolution {
        plan,
        potentials: out.potentials,
        basis: Basis { cells: out.basis },
        objective,
        pivots: out.pivots,
    })
}

/// Phase-1 check that some plan with the given marginals lives on `omega`.
pub fn check_feasible<T: Real>(omega: &ActiveSet, marginals: &[DiscreteMarginal<T>]) -> Result<()> {
    let residual = Simplex::new(marginals, None, omega.configs(), T::rel_tol()).feasibility_residual()?;
    if residual > T::mass_tol() {
        Err(Error::Infeasible {
            residual: residual.to_f64_lossy(),
        })
    } else {
        Ok(())
    }
}

/// Northwest-corner plan: exactly `1 + sum(l_i - 1)` cells with their masses
/// (zero-mass cells included; together they form a basis).
pub fn northwest_corner<T: Real>(marginals: &[DiscreteMarginal<T>]) -> Vec<(Configuration, T)> {
    let w: Vec<&[T]> = marginals.iter().map(DiscreteMarginal::weights).collect();
    staircase(&w)
}

/// Active set built from the northwest-corner sweep. It carries a feasible
/// plan and contains a full basis, so the first solve needs no phase 1.
pub fn initial_feasible_set<T: Real>(marginals: &[DiscreteMarginal<T>]) -> ActiveSet {
    let mut set = ActiveSet::default();
    for (r, _) in northwest_corner(marginals) {
        set.insert(r, 0);
    }
    set
}
