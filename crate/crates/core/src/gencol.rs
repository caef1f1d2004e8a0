//! The genetic column generation outer loop.
//!
//! Each step walks a seeded random permutation of every (parent, child)
//! pair, where parents are the configurations carrying mass in the current
//! reduced plan and children come from the search rule. The first child
//! whose gain exceeds the acceptance threshold joins the active set; if the
//! set outgrows `ceil(beta * sum(l_i))`, the longest-unused configurations
//! are cleared, and the reduced problem is re-solved from the previous basis.
//! A walk that exhausts the whole candidate space without an acceptance ends
//! the run.

use std::collections::{HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{Configuration, DualPotentials, Problem, SparsePlan};
use crate::oracle::{self, Certificate};
use crate::reduced_lp::{
    add_column, initial_feasible_set, solve_reduced_with_tol, ActiveSet, AddOutcome, Basis,
    ReducedSolution,
};
use crate::scalar::Real;

/// How children are proposed from a parent configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SearchRule {
    /// Change the row or the column of the parent (two marginals only).
    TwoMarginal,
    /// Change exactly one entry of the parent.
    SingleEntry,
    /// Keep at least one entry of the parent, change any of the others.
    ManyEntry,
}

impl SearchRule {
    pub fn default_for(arity: usize) -> Self {
        if arity == 2 {
            SearchRule::TwoMarginal
        } else {
            SearchRule::SingleEntry
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SearchRule::TwoMarginal => "two_marginal",
            SearchRule::SingleEntry => "single_entry",
            SearchRule::ManyEntry => "many_entry",
        }
    }
}

impl std::str::FromStr for SearchRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "two_marginal" => Ok(SearchRule::TwoMarginal),
            "single_entry" => Ok(SearchRule::SingleEntry),
            "many_entry" => Ok(SearchRule::ManyEntry),
            other => Err(Error::InvalidConfig(format!("unknown search rule '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenColConfig {
    /// Active-set multiplier; `|omega| <= ceil(beta * sum(l_i))`.
    pub beta: f64,
    /// `None` picks [`SearchRule::default_for`] the problem arity.
    pub rule: Option<SearchRule>,
    pub seed: u64,
    /// Cap on accepted children (outer iterations).
    pub max_outer_iterations: u64,
    /// Relative acceptance / optimality threshold, scaled by `1 + |c|_inf`.
    /// `None` uses the scalar type's default.
    pub rel_tol: Option<f64>,
    /// Fill [`SolveReport::certificate`] with a full dual scan when the
    /// product is small enough.
    pub certify: bool,
}

impl Default for GenColConfig {
    fn default() -> Self {
        GenColConfig {
            beta: 3.0,
            rule: None,
            seed: 0,
            max_outer_iterations: 100_000,
            rel_tol: None,
            certify: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    ExhaustedProposals,
    MaxIterations,
}

impl Termination {
    pub fn name(self) -> &'static str {
        match self {
            Termination::ExhaustedProposals => "exhausted_proposals",
            Termination::MaxIterations => "max_iterations",
        }
    }
}

/// A child that passed the acceptance test.
#[derive(Debug, Clone, PartialEq)]
pub struct AcceptedChild<T> {
    pub iteration: u64,
    pub parent: Configuration,
    pub child: Configuration,
    /// Gain under the potentials current when it was proposed.
    pub gain: T,
}

#[derive(Debug, Clone)]
pub struct SolveReport<T> {
    pub final_plan: SparsePlan<T>,
    pub final_potentials: DualPotentials<T>,
    pub final_basis: Basis,
    pub final_active_set: ActiveSet,
    pub objective: T,
    /// `(iteration, objective)` after every reduced solve, starting at 0.
    pub objective_trajectory: Vec<(u64, T)>,
    /// `|omega|` after every iteration, aligned with the trajectory.
    pub active_set_sizes: Vec<usize>,
    pub accepted: Vec<AcceptedChild<T>>,
    pub termination: Termination,
    pub certificate: Certificate,
    pub rng_seed: u64,
    pub rule: SearchRule,
    pub beta: f64,
    /// `ceil(beta * sum(l_i))`.
    pub active_bound: usize,
    /// False when `beta < 2`, where exhaustion no longer implies optimality.
    pub beta_certified: bool,
    pub accept_tol: T,
}

/// `ceil(beta * sum(l_i))`.
pub fn active_set_bound(beta: f64, sizes: &[usize]) -> usize {
    (beta * sizes.iter().sum::<usize>() as f64).ceil() as usize
}

/// The candidate children of one parent under a search rule, addressable by
/// index so that huge spaces can be walked lazily.
#[derive(Debug, Clone)]
pub struct CandidateSpace {
    parent: Vec<usize>,
    sizes: Vec<usize>,
    rule: SearchRule,
    /// Cumulative counts per axis block (single entry) or slab (many entry).
    offsets: Vec<u128>,
    /// Many entry: position of the parent inside slab 0.
    parent_slot: u128,
}

impl CandidateSpace {
    pub fn new(parent: &Configuration, rule: SearchRule, sizes: &[usize]) -> Result<Self> {
        parent.check_range(sizes)?;
        let n = sizes.len();
        let overflow = || Error::InvalidConfig("candidate space exceeds 2^128 configurations".into());
        let mut offsets = vec![0u128];
        let mut parent_slot = 0u128;
        match rule {
            SearchRule::TwoMarginal | SearchRule::SingleEntry => {
                if rule == SearchRule::TwoMarginal && n != 2 {
                    return Err(Error::InvalidConfig(
                        "the two-marginal rule needs exactly two marginals".into(),
                    ));
                }
                for &l in sizes {
                    let last = *offsets.last().unwrap_or(&0);
                    offsets.push(last + (l as u128 - 1));
                }
            }
            SearchRule::ManyEntry => {
                let p = parent.indices();
                for i in 0..n {
                    let mut count = 1u128;
                    for (j, &l) in sizes.iter().enumerate() {
                        let radix = if j < i {
                            l as u128 - 1
                        } else if j > i {
                            l as u128
                        } else {
                            1
                        };
                        count = count.checked_mul(radix).ok_or_else(overflow)?;
                    }
                    if i == 0 {
                        count -= 1;
                        parent_slot = p[1..]
                            .iter()
                            .zip(&sizes[1..])
                            .fold(0u128, |acc, (&x, &l)| acc * l as u128 + x as u128);
                    }
                    let last = *offsets.last().unwrap_or(&0);
                    offsets.push(last.checked_add(count).ok_or_else(overflow)?);
                }
            }
        }
        Ok(CandidateSpace {
            parent: parent.indices().to_vec(),
            sizes: sizes.to_vec(),
            rule,
            offsets,
            parent_slot,
        })
    }

    pub fn len(&self) -> u128 {
        *self.offsets.last().unwrap_or(&0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The `k`-th candidate, `k < len()`.
    pub fn get(&self, k: u128) -> Configuration {
        debug_assert!(k < self.len());
        let block = self.offsets.partition_point(|&o| o <= k) - 1;
        let mut local = k - self.offsets[block];
        let mut child = self.parent.clone();
        match self.rule {
            SearchRule::TwoMarginal | SearchRule::SingleEntry => {
                let v = local as usize;
                child[block] = if v < self.parent[block] { v } else { v + 1 };
            }
            SearchRule::ManyEntry => {
                if block == 0 && local >= self.parent_slot {
                    local += 1;
                }
                for j in (0..self.sizes.len()).rev() {
                    if j == block {
                        continue;
                    }
                    let l = self.sizes[j] as u128;
                    if j < block {
                        let v = (local % (l - 1)) as usize;
                        local /= l - 1;
                        child[j] = if v < self.parent[j] { v } else { v + 1 };
                    } else {
                        child[j] = (local % l) as usize;
                        local /= l;
                    }
                }
            }
        }
        Configuration::from(child)
    }

    pub fn iter(&self) -> impl Iterator<Item = Configuration> + '_ {
        (0..self.len()).map(move |k| self.get(k))
    }
}

/// Lazy uniform permutation of `0..n` (Fisher-Yates with a sparse swap table).
#[derive(Debug, Clone)]
pub struct LazyPermutation {
    n: u128,
    next: u128,
    swaps: HashMap<u128, u128>,
}

impl LazyPermutation {
    pub fn new(n: u128) -> Self {
        LazyPermutation {
            n,
            next: 0,
            swaps: HashMap::new(),
        }
    }

    pub fn next_index<R: Rng>(&mut self, rng: &mut R) -> Option<u128> {
        if self.next >= self.n {
            return None;
        }
        let t = self.next;
        let j = rng.gen_range(t..self.n);
        let at_j = self.swaps.get(&j).copied().unwrap_or(j);
        let at_t = self.swaps.remove(&t).unwrap_or(t);
        if j != t {
            self.swaps.insert(j, at_t);
        }
        self.next += 1;
        Some(at_j)
    }
}

/// Every candidate child of `parent`, in a uniformly random order drawn from
/// `rng`, without repeats.
pub fn propose_children<'r, R: Rng>(
    parent: &Configuration,
    rule: SearchRule,
    sizes: &[usize],
    rng: &'r mut R,
) -> Result<impl Iterator<Item = Configuration> + 'r> {
    let space = CandidateSpace::new(parent, rule, sizes)?;
    let mut perm = LazyPermutation::new(space.len());
    Ok(std::iter::from_fn(move || perm.next_index(rng).map(|k| space.get(k))))
}

/// Removes up to `batch` configurations from `omega`, least recently active
/// first (insertion order on ties). Configurations carrying mass in `plan`,
/// cells of `basis` and anything in `keep` are never removed. Does nothing
/// unless `|omega| > bound`. Returns the removed configurations.
pub fn tail_clear<T: Real>(
    omega: &mut ActiveSet,
    plan: &SparsePlan<T>,
    basis: &Basis,
    keep: &[Configuration],
    bound: usize,
    batch: usize,
) -> Vec<Configuration> {
    if omega.len() <= bound {
        return Vec::new();
    }
    let protected: HashSet<&Configuration> = plan
        .support()
        .chain(basis.cells())
        .chain(keep)
        .collect();
    let mut candidates: Vec<(u64, usize, &Configuration)> = omega
        .ages()
        .enumerate()
        .filter(|(_, (r, _))| !protected.contains(r))
        .map(|(pos, (r, age))| (age, pos, r))
        .collect();
    candidates.sort_unstable_by_key(|&(age, pos, _)| (age, pos));
    let removed: Vec<Configuration> = candidates
        .into_iter()
        .take(batch)
        .map(|(_, _, r)| r.clone())
        .collect();
    let drop: HashSet<Configuration> = removed.iter().cloned().collect();
    omega.remove_all(&drop);
    removed
}

/// Outcome of one [`GenCol::step`].
#[derive(Debug, Clone, PartialEq)]
pub enum StepOutcome<T> {
    Accepted(AcceptedChild<T>),
    Exhausted,
}

/// Solver state between outer iterations.
pub struct GenCol<'a, T> {
    problem: &'a Problem<T>,
    config: GenColConfig,
    rule: SearchRule,
    omega: ActiveSet,
    solution: ReducedSolution<T>,
    iteration: u64,
    rng: ChaCha8Rng,
    accept_tol: T,
    bound: usize,
    batch: usize,
    trajectory: Vec<(u64, T)>,
    sizes_log: Vec<usize>,
    accepted: Vec<AcceptedChild<T>>,
    exhausted: bool,
}

impl<'a, T: Real> GenCol<'a, T> {
    /// Starts from the northwest-corner active set.
    pub fn new(problem: &'a Problem<T>, config: GenColConfig) -> Result<Self> {
        let omega = initial_feasible_set(problem.marginals());
        Self::with_active_set(problem, config, omega)
    }

    /// Starts from a caller-supplied feasible active set.
    pub fn with_active_set(
        problem: &'a Problem<T>,
        config: GenColConfig,
        omega: ActiveSet,
    ) -> Result<Self> {
        if !(config.beta > 1.0) || !config.beta.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "beta must be a finite number above 1, got {}",
                config.beta
            )));
        }
        let rule = config.rule.unwrap_or_else(|| SearchRule::default_for(problem.arity()));
        if rule == SearchRule::TwoMarginal && problem.arity() != 2 {
            return Err(Error::InvalidConfig(
                "the two-marginal rule needs exactly two marginals".into(),
            ));
        }
        if let Some(r) = omega.iter().find(|r| !r.in_range(problem.sizes())) {
            return Err(Error::ConfigOutOfRange {
                config: r.indices().to_vec(),
                sizes: problem.sizes().to_vec(),
            });
        }
        let rel = config
            .rel_tol
            .map_or_else(T::rel_tol, T::from_f64_lossy);
        let accept_tol = rel * (T::one() + problem.cost_scale());
        let bound = active_set_bound(config.beta, problem.sizes());
        let batch = problem.total_size();
        let solution = solve_reduced_with_tol(&omega, problem, None, accept_tol)?;
        let mut state = GenCol {
            problem,
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            config,
            rule,
            omega,
            solution,
            iteration: 0,
            accept_tol,
            bound,
            batch,
            trajectory: Vec::new(),
            sizes_log: Vec::new(),
            accepted: Vec::new(),
            exhausted: false,
        };
        // A caller-supplied set may exceed the bound.
        state.clear_tail(&[]);
        state.record();
        Ok(state)
    }

    pub fn active_set(&self) -> &ActiveSet {
        &self.omega
    }

    pub fn solution(&self) -> &ReducedSolution<T> {
        &self.solution
    }

    pub fn iteration(&self) -> u64 {
        self.iteration
    }

    pub fn rule(&self) -> SearchRule {
        self.rule
    }

    pub fn accept_tol(&self) -> T {
        self.accept_tol
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn is_exhausted(&self) -> bool {
        self.exhausted
    }

    fn record(&mut self) {
        let it = self.iteration;
        for r in self.solution.plan.support() {
            self.omega.touch(r, it);
        }
        self.trajectory.push((it, self.solution.objective));
        self.sizes_log.push(self.omega.len());
    }

    fn clear_tail(&mut self, keep: &[Configuration]) -> Vec<Configuration> {
        tail_clear(
            &mut self.omega,
            &self.solution.plan,
            &self.solution.basis,
            keep,
            self.bound,
            self.batch,
        )
    }

    /// Searches the current candidate space for an improving child.
    fn search(&mut self) -> Result<Option<AcceptedChild<T>>> {
        let sizes = self.problem.sizes();
        let spaces: Vec<(Configuration, CandidateSpace)> = self
            .solution
            .plan
            .support()
            .map(|p| Ok((p.clone(), CandidateSpace::new(p, self.rule, sizes)?)))
            .collect::<Result<_>>()?;
        let mut offsets = Vec::with_capacity(spaces.len() + 1);
        let mut total = 0u128;
        offsets.push(0u128);
        for (_, s) in &spaces {
            total = total.checked_add(s.len()).ok_or_else(|| {
                Error::InvalidConfig("candidate space exceeds 2^128 configurations".into())
            })?;
            offsets.push(total);
        }
        let mut perm = LazyPermutation::new(total);
        while let Some(k) = perm.next_index(&mut self.rng) {
            let which = offsets.partition_point(|&o| o <= k) - 1;
            let (parent, space) = &spaces[which];
            let child = space.get(k - offsets[which]);
            if self.omega.contains(&child) {
                continue;
            }
            let g = self.problem.gain(&self.solution.potentials, &child);
            if g > self.accept_tol {
                return Ok(Some(AcceptedChild {
                    iteration: self.iteration + 1,
                    parent: parent.clone(),
                    child,
                    gain: g,
                }));
            }
        }
        Ok(None)
    }

    /// One outer iteration: either accept a child, clear the tail if needed
    /// and re-solve, or report exhaustion.
    pub fn step(&mut self) -> Result<StepOutcome<T>> {
        if self.exhausted {
            return Ok(StepOutcome::Exhausted);
        }
        let Some(acc) = self.search()? else {
            self.exhausted = true;
            return Ok(StepOutcome::Exhausted);
        };
        let it = acc.iteration;
        if add_column(&mut self.omega, acc.child.clone(), it) == AddOutcome::Duplicate {
            return Err(Error::Internal(format!("accepted child {} already active", acc.child)));
        }
        self.clear_tail(std::slice::from_ref(&acc.child));
        let next = solve_reduced_with_tol(
            &self.omega,
            self.problem,
            Some(&self.solution.basis),
            self.accept_tol,
        )
        .map_err(|e| match e {
            Error::Infeasible { residual } => Error::Internal(format!(
                "active set became infeasible after tail clearing (residual {residual})"
            )),
            other => other,
        })?;
        self.solution = next;
        self.iteration = it;
        self.record();
        self.accepted.push(acc.clone());
        Ok(StepOutcome::Accepted(acc))
    }

    /// Steps until exhaustion or the iteration cap.
    pub fn run(mut self) -> Result<SolveReport<T>> {
        let termination = loop {
            if self.exhausted {
                break Termination::ExhaustedProposals;
            }
            if self.iteration >= self.config.max_outer_iterations {
                break Termination::MaxIterations;
            }
            self.step()?;
        };
        let mut report = SolveReport {
            final_plan: self.solution.plan,
            final_potentials: self.solution.potentials,
            final_basis: self.solution.basis,
            final_active_set: self.omega,
            objective: self.solution.objective,
            objective_trajectory: self.trajectory,
            active_set_sizes: self.sizes_log,
            accepted: self.accepted,
            termination,
            certificate: Certificate::Uncertified,
            rng_seed: self.config.seed,
            rule: self.rule,
            beta: self.config.beta,
            active_bound: self.bound,
            beta_certified: self.config.beta >= 2.0,
            accept_tol: self.accept_tol,
        };
        if self.config.certify {
            report.certificate = oracle::certify_report(self.problem, &report);
        }
        Ok(report)
    }
}

/// Runs GenCol from the northwest-corner active set.
pub fn run<T: Real>(problem: &Problem<T>, config: GenColConfig) -> Result<SolveReport<T>> {
    GenCol::new(problem, config)?.run()
}

/// Runs GenCol from a caller-supplied feasible active set.
pub fn run_from<T: Real>(
    problem: &Problem<T>,
    config: GenColConfig,
    omega: ActiveSet,
) -> Result<SolveReport<T>> {
    GenCol::with_active_set(problem, config, omega)?.run()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn cfg(v: &[usize]) -> Configuration {
        Configuration::from(v)
    }

    fn brute_candidates(parent: &[usize], rule: SearchRule, sizes: &[usize]) -> BTreeSet<Configuration> {
        let mut out = BTreeSet::new();
        crate::model::for_each_index(sizes, |idx| {
            if idx == parent {
                return;
            }
            let same = idx.iter().zip(parent).filter(|(a, b)| a == b).count();
            let ok = match rule {
                SearchRule::TwoMarginal | SearchRule::SingleEntry => same + 1 == sizes.len(),
                SearchRule::ManyEntry => same >= 1,
            };
            if ok {
                out.insert(Configuration::from(idx));
            }
        });
        out
    }

    #[test]
    fn two_marginal_children_share_row_or_column() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let kids: Vec<_> = propose_children(&cfg(&[1, 2]), SearchRule::TwoMarginal, &[3, 3], &mut rng)
            .unwrap()
            .collect();
        assert_eq!(kids.len(), 4);
        let set: BTreeSet<_> = kids.into_iter().collect();
        let expect: BTreeSet<_> = [[0, 2], [2, 2], [1, 0], [1, 1]].into_iter().map(Configuration::from).collect();
        assert_eq!(set, expect);
    }

    #[test]
    fn single_entry_counts_match_enumeration() {
        let sizes = [3, 3, 3];
        let space = CandidateSpace::new(&cfg(&[0, 1, 2]), SearchRule::SingleEntry, &sizes).unwrap();
        assert_eq!(space.len(), 6);
        let got: BTreeSet<_> = space.iter().collect();
        assert_eq!(got, brute_candidates(&[0, 1, 2], SearchRule::SingleEntry, &sizes));
    }

    #[test]
    fn many_entry_counts_match_enumeration() {
        let sizes = [3, 3, 3];
        let space = CandidateSpace::new(&cfg(&[0, 0, 0]), SearchRule::ManyEntry, &sizes).unwrap();
        let brute = brute_candidates(&[0, 0, 0], SearchRule::ManyEntry, &sizes);
        // 27 cells, 8 differ everywhere, minus the parent
        assert_eq!(brute.len(), 18);
        assert_eq!(space.len(), 18);
        let got: Vec<_> = space.iter().collect();
        assert_eq!(got.iter().cloned().collect::<BTreeSet<_>>(), brute);
        assert_eq!(got.len(), 18);
    }

    #[test]
    fn many_entry_irregular_sizes() {
        let sizes = [2, 4, 3, 2];
        crate::model::for_each_index(&sizes, |p| {
            let space = CandidateSpace::new(&cfg(p), SearchRule::ManyEntry, &sizes).unwrap();
            let got: Vec<_> = space.iter().collect();
            let set: BTreeSet<_> = got.iter().cloned().collect();
            assert_eq!(set.len(), got.len(), "repeat for parent {p:?}");
            assert_eq!(set, brute_candidates(p, SearchRule::ManyEntry, &sizes));
        });
    }

    #[test]
    fn lazy_permutation_is_a_permutation() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for n in [0u128, 1, 2, 7, 100] {
            let mut p = LazyPermutation::new(n);
            let mut seen: Vec<u128> = std::iter::from_fn(|| p.next_index(&mut rng)).collect();
            seen.sort_unstable();
            assert_eq!(seen, (0..n).collect::<Vec<_>>());
        }
    }

    #[test]
    fn two_marginal_rule_rejected_for_three_marginals() {
        assert!(CandidateSpace::new(&cfg(&[0, 0, 0]), SearchRule::TwoMarginal, &[2, 2, 2]).is_err());
    }

    #[test]
    fn rule_names_parse() {
        assert_eq!("single-entry".parse::<SearchRule>().unwrap(), SearchRule::SingleEntry);
        assert_eq!("many_entry".parse::<SearchRule>().unwrap(), SearchRule::ManyEntry);
        assert_eq!("two-marginal".parse::<SearchRule>().unwrap(), SearchRule::TwoMarginal);
        assert!("grid".parse::<SearchRule>().is_err());
    }

    #[test]
    fn bound_uses_ceiling() {
        assert_eq!(active_set_bound(3.0, &[10, 10]), 60);
        assert_eq!(active_set_bound(2.5, &[3, 4]), 18);
        assert_eq!(active_set_bound(1.1, &[3, 3]), 7);
    }

    fn plan_of(entries: &[(&[usize], f64)]) -> SparsePlan<f64> {
        SparsePlan::new(entries.iter().map(|(r, m)| (cfg(r), *m))).unwrap()
    }

    #[test]
    fn tail_clear_noop_at_bound() {
        let mut omega = ActiveSet::default();
        for (k, r) in [[0, 0], [0, 1], [1, 0]].into_iter().enumerate() {
            omega.insert(cfg(&r), k as u64);
        }
        let plan = plan_of(&[(&[0, 0], 1.0)]);
        let basis_cells = Basis::from_cells(vec![cfg(&[0, 0])]);
        let removed = tail_clear(&mut omega, &plan, &basis_cells, &[], 3, 2);
        assert!(removed.is_empty());
        assert_eq!(omega.len(), 3);
    }

    #[test]
    fn tail_clear_oldest_unprotected_first() {
        let mut omega = ActiveSet::default();
        omega.insert(cfg(&[0, 0]), 0);
        omega.insert(cfg(&[1, 1]), 0);
        omega.insert(cfg(&[0, 1]), 2);
        omega.insert(cfg(&[1, 0]), 1);
        let plan = plan_of(&[(&[0, 0], 0.5), (&[1, 1], 0.5)]);
        let basis = Basis::from_cells(vec![cfg(&[0, 0]), cfg(&[1, 1])]);
        let removed = tail_clear(&mut omega, &plan, &basis, &[], 3, 1);
        assert_eq!(removed, vec![cfg(&[1, 0])]);
        assert_eq!(omega.configs(), &[cfg(&[0, 0]), cfg(&[1, 1]), cfg(&[0, 1])]);

        // batch larger than the removable pool
        let removed = tail_clear(&mut omega, &plan, &basis, &[], 2, 5);
        assert_eq!(removed, vec![cfg(&[0, 1])]);
        assert_eq!(omega.len(), 2);
    }
}
