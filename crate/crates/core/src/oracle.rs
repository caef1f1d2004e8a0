//! Ground truth for small instances: the dense LP over the full product,
//! c-cyclical monotonicity search, full dual-feasibility scans and the
//! sparsity audit.

use crate::error::{Error, Result};
use crate::gencol::{SolveReport, Termination};
use crate::model::{
    for_each_index, product_size, support_bound, Configuration, CostSpec, DualPotentials,
    Problem, SparsePlan,
};
use crate::reduced_lp::{solve_reduced_with_tol, ActiveSet, Basis};
use crate::scalar::Real;

/// Largest product size the dense oracles will enumerate.
pub const DENSE_LIMIT: u128 = 1_000_000;

fn guard(sizes: &[usize]) -> Result<usize> {
    let size = product_size(sizes);
    if size > DENSE_LIMIT {
        Err(Error::GuardExceeded {
            size,
            limit: DENSE_LIMIT,
        })
    } else {
        Ok(size as usize)
    }
}

/// Every configuration of the product as an active set, lexicographic order.
pub fn full_active_set(sizes: &[usize]) -> Result<ActiveSet> {
    guard(sizes)?;
    let mut set = ActiveSet::default();
    for_each_index(sizes, |idx| {
        set.insert(Configuration::from(idx), 0);
    });
    Ok(set)
}

#[derive(Debug, Clone)]
pub struct DenseSolution<T> {
    pub plan: SparsePlan<T>,
    pub potentials: DualPotentials<T>,
    pub objective: T,
    pub basis: Basis,
}

/// Exact optimum of the full transport LP, by simplex over every
/// configuration. Refuses products above [`DENSE_LIMIT`].
pub fn solve_dense_lp<T: Real>(problem: &Problem<T>) -> Result<DenseSolution<T>> {
    let omega = full_active_set(problem.sizes())?;
    let sol = solve_reduced_with_tol(&omega, problem, None, problem.tolerances().lp)?;
    Ok(DenseSolution {
        plan: sol.plan,
        potentials: sol.potentials,
        objective: sol.objective,
        basis: sol.basis,
    })
}

/// A cycle in a two-marginal support whose rerouting lowers the cost.
#[derive(Debug, Clone, PartialEq)]
pub struct CcmViolation<T> {
    /// `(x_j, y_j)`, in the order they appear in the tested support.
    pub points: Vec<Configuration>,
    /// `permutation[j]` is the point whose second coordinate `x_j` is
    /// paired with after rerouting.
    pub permutation: Vec<usize>,
    pub original_cost: T,
    pub permuted_cost: T,
}

impl<T: Real> CcmViolation<T> {
    pub fn k(&self) -> usize {
        self.points.len()
    }

    /// The configurations `(x_j, y_sigma(j))`.
    pub fn permuted_points(&self) -> Vec<Configuration> {
        self.points
            .iter()
            .zip(&self.permutation)
            .map(|(p, &s)| Configuration::from(vec![p.indices()[0], self.points[s].indices()[1]]))
            .collect()
    }

    /// Moves the smallest mass on the cycle onto the permuted points. The
    /// result has the same marginals and costs `delta * (original -
    /// permuted)` less.
    pub fn rotate(&self, plan: &SparsePlan<T>) -> Result<SparsePlan<T>> {
        let delta = self
            .points
            .iter()
            .map(|p| plan.get(p).unwrap_or_else(T::zero))
            .fold(T::infinity(), T::min);
        if !(delta > T::zero()) {
            return Err(Error::MalformedPlan(
                "cycle points do not all carry mass in the plan".into(),
            ));
        }
        let mut entries: Vec<(Configuration, T)> =
            plan.iter().map(|(r, m)| (r.clone(), m)).collect();
        for p in &self.points {
            if let Some(e) = entries.iter_mut().find(|(r, _)| r == p) {
                e.1 -= delta;
            }
        }
        for q in self.permuted_points() {
            entries.push((q, delta));
        }
        Ok(SparsePlan::from_raw(entries))
    }
}

/// Next lexicographic permutation in place; false at the last one.
fn next_permutation(v: &mut [usize]) -> bool {
    let n = v.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Next `k`-subset of `0..n` in lexicographic order.
fn next_subset(s: &mut [usize], n: usize) -> bool {
    let k = s.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if s[i] < n - k + i {
            s[i] += 1;
            for j in i + 1..k {
                s[j] = s[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Searches cycles of length `2..=max_k` in a two-marginal support for one
/// whose rerouting is strictly cheaper (beyond `1e-9 (1 + |c|_inf)` for
/// f64). Returns the first found in order of increasing length,
/// lexicographic point subsets, then cycles with the first point fixed.
pub fn check_ccm<T: Real>(
    support: &[Configuration],
    cost: &CostSpec<T>,
    max_k: usize,
) -> Result<Option<CcmViolation<T>>> {
    if cost.arity() != 2 {
        return Err(Error::Unsupported(
            "cyclical monotonicity is checked for two marginals only".into(),
        ));
    }
    for r in support {
        r.check_range(cost.sizes())?;
    }
    let scale = cost.sup_norm().unwrap_or_else(|| {
        support
            .iter()
            .map(|r| cost.at(r).abs())
            .fold(T::zero(), T::max)
    });
    let tol = T::rel_tol() * (T::one() + scale);
    let n = support.len();
    for k in 2..=max_k.min(n) {
        let mut subset: Vec<usize> = (0..k).collect();
        loop {
            let pts: Vec<&Configuration> = subset.iter().map(|&i| &support[i]).collect();
            let original = pts.iter().fold(T::zero(), |a, r| a + cost.at(r));
            let mut tail: Vec<usize> = (1..k).collect();
            loop {
                // cycle order 0 -> tail[0] -> ... -> tail[k-2] -> 0
                let order: Vec<usize> = std::iter::once(0).chain(tail.iter().copied()).collect();
                let mut perm = vec![0usize; k];
                for j in 0..k {
                    perm[order[j]] = order[(j + 1) % k];
                }
                let permuted = (0..k).fold(T::zero(), |a, j| {
                    a + cost.eval(&[pts[j].indices()[0], pts[perm[j]].indices()[1]])
                });
                if permuted < original - tol {
                    return Ok(Some(CcmViolation {
                        points: pts.into_iter().cloned().collect(),
                        permutation: perm,
                        original_cost: original,
                        permuted_cost: permuted,
                    }));
                }
                if !next_permutation(&mut tail) {
                    break;
                }
            }
            if !next_subset(&mut subset, n) {
                break;
            }
        }
    }
    Ok(None)
}

/// Scans the whole product for the configuration of largest gain and
/// returns it if that gain exceeds `accept_tol`. Ties go to the
/// lexicographically first configuration.
pub fn certify_full_dual_feasibility<T: Real>(
    u: &DualPotentials<T>,
    cost: &CostSpec<T>,
    accept_tol: T,
) -> Result<Option<(Configuration, T)>> {
    if u.sizes() != cost.sizes() {
        return Err(Error::ShapeMismatch {
            cost: cost.sizes().to_vec(),
            marginals: u.sizes(),
        });
    }
    guard(cost.sizes())?;
    let mut best: Option<(Vec<usize>, T)> = None;
    for_each_index(cost.sizes(), |idx| {
        let g = u.sum_at(idx) - cost.eval(idx);
        if best.as_ref().is_none_or(|(_, b)| g > *b) {
            best = Some((idx.to_vec(), g));
        }
    });
    Ok(best
        .filter(|(_, g)| *g > accept_tol)
        .map(|(idx, g)| (Configuration::from(idx), g)))
}

/// True iff the plan's support fits the extreme-point bound
/// `1 + sum(l_i - 1)`.
pub fn audit_sparsity<T: Real>(plan: &SparsePlan<T>, sizes: &[usize]) -> bool {
    plan.len() <= support_bound(sizes)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Certificate {
    /// No configuration of the product has positive gain.
    CertifiedOptimal,
    /// Not checked (product too large) or not conclusive.
    Uncertified,
    /// The search rule is exhausted but some configuration outside its
    /// reach still has positive gain.
    StationaryUnderRule,
}

impl Certificate {
    pub fn name(self) -> &'static str {
        match self {
            Certificate::CertifiedOptimal => "certified_optimal",
            Certificate::Uncertified => "uncertified",
            Certificate::StationaryUnderRule => "stationary_under_rule",
        }
    }
}

/// Certificate for a finished run, by a full dual scan when the product is
/// within [`DENSE_LIMIT`].
pub fn certify_report<T: Real>(problem: &Problem<T>, report: &SolveReport<T>) -> Certificate {
    match certify_full_dual_feasibility(&report.final_potentials, problem.cost(), report.accept_tol) {
        Ok(None) => Certificate::CertifiedOptimal,
        Ok(Some(_)) if report.termination == Termination::ExhaustedProposals => {
            Certificate::StationaryUnderRule
        }
        _ => Certificate::Uncertified,
    }
}
