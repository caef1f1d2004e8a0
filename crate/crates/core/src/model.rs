//! Problem model: marginals, costs, configurations, sparse plans and dual
//! potentials, together with the plan/potential arithmetic used everywhere
//! else in the crate.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::{Real, Tolerances};

/// Largest product space whose cost is scanned eagerly to find its sup-norm.
pub const COST_SCAN_LIMIT: u128 = 10_000_000;

/// One cell of the product space: an index per marginal.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration(Box<[usize]>);

impl Configuration {
    pub fn new(indices: impl Into<Box<[usize]>>) -> Self {
        Configuration(indices.into())
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn in_range(&self, sizes: &[usize]) -> bool {
        self.0.len() == sizes.len() && self.0.iter().zip(sizes).all(|(&i, &l)| i < l)
    }

    pub(crate) fn check_range(&self, sizes: &[usize]) -> Result<()> {
        if self.in_range(sizes) {
            Ok(())
        } else {
            Err(Error::ConfigOutOfRange {
                config: self.0.to_vec(),
                sizes: sizes.to_vec(),
            })
        }
    }
}

impl From<Vec<usize>> for Configuration {
    fn from(v: Vec<usize>) -> Self {
        Configuration(v.into_boxed_slice())
    }
}

impl From<&[usize]> for Configuration {
    fn from(v: &[usize]) -> Self {
        Configuration(v.into())
    }
}

impl<const K: usize> From<[usize; K]> for Configuration {
    fn from(v: [usize; K]) -> Self {
        Configuration(Box::new(v))
    }
}

impl fmt::Debug for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{i}")?;
        }
        f.write_str(")")
    }
}

/// A probability vector with strictly positive weights.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMarginal<T> {
    weights: Vec<T>,
}

impl<T: Real> DiscreteMarginal<T> {
    /// Validates and wraps `weights`. Zero-mass atoms are rejected, not stripped.
    pub fn new(weights: Vec<T>) -> Result<Self> {
        Self::validate(&weights).map_err(|reason| Error::InvalidMarginal { axis: 0, reason })?;
        Ok(DiscreteMarginal { weights })
    }

    pub fn uniform(size: usize) -> Result<Self> {
        let w = T::one() / T::from_usize(size.max(1)).unwrap_or_else(T::one);
        Self::new(vec![w; size])
    }

    fn validate(weights: &[T]) -> std::result::Result<(), String> {
        if weights.is_empty() {
            return Err("empty support".into());
        }
        for (x, &w) in weights.iter().enumerate() {
            if !w.is_finite() {
                return Err(format!("weight {x} is not finite"));
            }
            if w <= T::zero() {
                return Err(format!("weight {x} is not strictly positive ({w})"));
            }
        }
        let total: T = weights.iter().copied().sum();
        if (total - T::one()).abs() > T::mass_tol() {
            return Err(format!("weights sum to {total}, expected 1"));
        }
        Ok(())
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Builds a list of marginals, tagging validation errors with their axis.
pub fn marginals_from<T: Real>(weights: Vec<Vec<T>>) -> Result<Vec<DiscreteMarginal<T>>> {
    weights
        .into_iter()
        .enumerate()
        .map(|(axis, w)| {
            DiscreteMarginal::new(w).map_err(|e| match e {
                Error::InvalidMarginal { reason, .. } => Error::InvalidMarginal { axis, reason },
                other => other,
            })
        })
        .collect()
}

type CostFn<T> = Arc<dyn Fn(&[usize]) -> T + Send + Sync>;

#[derive(Clone)]
enum CostKind<T> {
    Dense(Arc<[T]>),
    Function(CostFn<T>),
}

/// A cost on the product of the marginal supports, stored either as a dense
/// row-major table or as an on-demand evaluator.
#[derive(Clone)]
pub struct CostSpec<T> {
    sizes: Vec<usize>,
    kind: CostKind<T>,
    sup_norm: Option<T>,
}

impl<T: fmt::Debug> fmt::Debug for CostSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            CostKind::Dense(_) => "dense",
            CostKind::Function(_) => "function",
        };
        f.debug_struct("CostSpec")
            .field("sizes", &self.sizes)
            .field("kind", &kind)
            .field("sup_norm", &self.sup_norm)
            .finish()
    }
}

impl<T: Real> CostSpec<T> {
    /// Dense row-major table over the product `sizes[0] x ... x sizes[N-1]`.
    pub fn dense(sizes: Vec<usize>, values: Vec<T>) -> Result<Self> {
        check_arity(&sizes)?;
        let expected = product_size(&sizes);
        if values.len() as u128 != expected {
            return Err(Error::ShapeMismatch {
                cost: vec![values.len()],
                marginals: sizes,
            });
        }
        let mut sup = T::zero();
        for (k, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFiniteCost(unravel(k, &sizes)));
            }
            sup = sup.max(v.abs());
        }
        Ok(CostSpec {
            sizes,
            kind: CostKind::Dense(values.into()),
            sup_norm: Some(sup),
        })
    }

    /// Two-marginal dense cost from a matrix given row by row.
    pub fn from_matrix(rows: Vec<Vec<T>>) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::ShapeMismatch {
                cost: rows.iter().map(Vec::len).collect(),
                marginals: vec![n, m],
            });
        }
        Self::dense(vec![n, m], rows.into_iter().flatten().collect())
    }

    /// On-demand cost. Products up to [`COST_SCAN_LIMIT`] cells are scanned
    /// once to validate finiteness and record the sup-norm.
    pub fn from_fn<F>(sizes: Vec<usize>, f: F) -> Result<Self>
    where
        F: Fn(&[usize]) -> T + Send + Sync + 'static,
    {
        check_arity(&sizes)?;
        let f: CostFn<T> = Arc::new(f);
        let mut sup_norm = None;
        if product_size(&sizes) <= COST_SCAN_LIMIT {
            let mut sup = T::zero();
            let mut bad = None;
            for_each_index(&sizes, |idx| {
                let v = f(idx);
                if !v.is_finite() && bad.is_none() {
                    bad = Some(idx.to_vec());
                }
                sup = sup.max(v.abs());
            });
            if let Some(idx) = bad {
                return Err(Error::NonFiniteCost(idx));
            }
            sup_norm = Some(sup);
        }
        Ok(CostSpec {
            sizes,
            kind: CostKind::Function(f),
            sup_norm,
        })
    }

    /// Overrides the sup-norm used to scale tolerances. Needed for evaluator
    /// costs on products too large to scan.
    pub fn with_sup_norm(mut self, sup: T) -> Self {
        self.sup_norm = Some(sup.abs());
        self
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn arity(&self) -> usize {
        self.sizes.len()
    }

    pub fn sup_norm(&self) -> Option<T> {
        self.sup_norm
    }

    pub fn dense_table(&self) -> Option<&[T]> {
        match &self.kind {
            CostKind::Dense(v) => Some(v),
            CostKind::Function(_) => None,
        }
    }

    /// Cost of one index tuple. Indices must be in range.
    #[inline]
    pub fn eval(&self, idx: &[usize]) -> T {
        debug_assert_eq!(idx.len(), self.sizes.len());
        match &self.kind {
            CostKind::Dense(v) => v[ravel(idx, &self.sizes)],
            CostKind::Function(f) => f(idx),
        }
    }

    pub fn at(&self, r: &Configuration) -> T {
        self.eval(r.indices())
    }
}

fn check_arity(sizes: &[usize]) -> Result<()> {
    if sizes.len() < 2 {
        return Err(Error::ArityMismatch {
            cost: sizes.len(),
            marginals: 2,
        });
    }
    if sizes.contains(&0) {
        return Err(Error::ShapeMismatch {
            cost: sizes.to_vec(),
            marginals: sizes.to_vec(),
        });
    }
    Ok(())
}

/// Number of cells in the product space, saturating at `u128::MAX`.
pub fn product_size(sizes: &[usize]) -> u128 {
    sizes
        .iter()
        .try_fold(1u128, |acc, &l| acc.checked_mul(l as u128))
        .unwrap_or(u128::MAX)
}

/// Upper bound on the support of an extreme plan: `1 + sum(l_i - 1)`.
pub fn support_bound(sizes: &[usize]) -> usize {
    1 + sizes.iter().map(|&l| l.saturating_sub(1)).sum::<usize>()
}

pub(crate) fn ravel(idx: &[usize], sizes: &[usize]) -> usize {
    idx.iter().zip(sizes).fold(0, |acc, (&i, &l)| acc * l + i)
}

pub(crate) fn unravel(mut k: usize, sizes: &[usize]) -> Vec<usize> {
    let mut idx = vec![0; sizes.len()];
    for (slot, &l) in idx.iter_mut().zip(sizes).rev() {
        *slot = k % l;
        k /= l;
    }
    idx
}

/// Calls `f` on every index tuple of the product, in lexicographic order.
pub fn for_each_index(sizes: &[usize], mut f: impl FnMut(&[usize])) {
    if sizes.contains(&0) {
        return;
    }
    let mut idx = vec![0usize; sizes.len()];
    'outer: loop {
        f(&idx);
        for axis in (0..sizes.len()).rev() {
            idx[axis] += 1;
            if idx[axis] < sizes[axis] {
                continue 'outer;
            }
            idx[axis] = 0;
        }
        break;
    }
}

/// Every configuration of the product, lexicographically ordered.
pub fn all_configurations(sizes: &[usize]) -> Vec<Configuration> {
    let mut out = Vec::new();
    for_each_index(sizes, |idx| out.push(Configuration::from(idx)));
    out
}

/// Marginals plus cost: a complete (multi-marginal) transport problem.
#[derive(Debug, Clone)]
pub struct Problem<T> {
    marginals: Vec<DiscreteMarginal<T>>,
    cost: CostSpec<T>,
    cost_scale: T,
}

impl<T: Real> Problem<T> {
    pub fn new(marginals: Vec<DiscreteMarginal<T>>, cost: CostSpec<T>) -> Result<Self> {
        if marginals.len() != cost.arity() {
            return Err(Error::ArityMismatch {
                cost: cost.arity(),
                marginals: marginals.len(),
            });
        }
        let sizes: Vec<usize> = marginals.iter().map(DiscreteMarginal::len).collect();
        if sizes != cost.sizes() {
            return Err(Error::ShapeMismatch {
                cost: cost.sizes().to_vec(),
                marginals: sizes,
            });
        }
        let cost_scale = cost
            .sup_norm()
            .ok_or_else(|| Error::CostScaleUnknown(product_size(&sizes)))?;
        Ok(Problem {
            marginals,
            cost,
            cost_scale,
        })
    }

    pub fn marginals(&self) -> &[DiscreteMarginal<T>] {
        &self.marginals
    }

    pub fn cost(&self) -> &CostSpec<T> {
        &self.cost
    }

    pub fn sizes(&self) -> &[usize] {
        self.cost.sizes()
    }

    pub fn arity(&self) -> usize {
        self.marginals.len()
    }

    /// `|c|_inf` used to scale tolerances.
    pub fn cost_scale(&self) -> T {
        self.cost_scale
    }

    pub fn tolerances(&self) -> Tolerances<T> {
        Tolerances::for_cost_scale(self.cost_scale)
    }

    /// `sum(l_i)`, the quantity the active-set bound is measured against.
    pub fn total_size(&self) -> usize {
        self.sizes().iter().sum()
    }

    pub fn product_size(&self) -> u128 {
        product_size(self.sizes())
    }

    pub fn support_bound(&self) -> usize {
        support_bound(self.sizes())
    }

    pub fn gain(&self, u: &DualPotentials<T>, r: &Configuration) -> T {
        gain(u, r, &self.cost)
    }
}

/// A finitely supported transport plan with strictly positive masses.
#[derive(Debug, Clone, PartialEq)]
pub struct SparsePlan<T> {
    entries: BTreeMap<Configuration, T>,
}

impl<T: Real> SparsePlan<T> {
    /// Collects `entries`, merging repeated configurations. Masses must be
    /// strictly positive and finite, and must total one.
    pub fn new(entries: impl IntoIterator<Item = (Configuration, T)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (r, m) in entries {
            if !m.is_finite() || m <= T::zero() {
                return Err(Error::MalformedPlan(format!(
                    "mass {m} at {r} is not strictly positive"
                )));
            }
            *map.entry(r).or_insert_with(T::zero) += m;
        }
        let plan = SparsePlan { entries: map };
        let total = plan.total_mass();
        if (total - T::one()).abs() > T::mass_tol() {
            return Err(Error::MalformedPlan(format!("total mass {total}, expected 1")));
        }
        Ok(plan)
    }

    /// Solver-internal constructor: drops non-positive entries, no mass check.
    pub(crate) fn from_raw(entries: impl IntoIterator<Item = (Configuration, T)>) -> Self {
        let mut map = BTreeMap::new();
        for (r, m) in entries {
            if m > T::zero() {
                *map.entry(r).or_insert_with(T::zero) += m;
            }
        }
        SparsePlan { entries: map }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, r: &Configuration) -> Option<T> {
        self.entries.get(r).copied()
    }

    pub fn contains(&self, r: &Configuration) -> bool {
        self.entries.contains_key(r)
    }

    /// Entries in lexicographic configuration order.
    pub fn iter(&self) -> impl Iterator<Item = (&Configuration, T)> + '_ {
        self.entries.iter().map(|(r, &m)| (r, m))
    }

    pub fn support(&self) -> impl Iterator<Item = &Configuration> + '_ {
        self.entries.keys()
    }

    pub fn total_mass(&self) -> T {
        self.entries.values().copied().sum()
    }

    /// `alpha * self + (1 - alpha) * other`, with supports merged.
    pub fn mix(&self, alpha: T, other: &Self) -> Self {
        let beta = T::one() - alpha;
        SparsePlan::from_raw(
            self.iter()
                .map(|(r, m)| (r.clone(), alpha * m))
                .chain(other.iter().map(|(r, m)| (r.clone(), beta * m))),
        )
    }
}

/// Kantorovich potentials, one vector per marginal.
#[derive(Debug, Clone, PartialEq)]
pub struct DualPotentials<T> {
    potentials: Vec<Vec<T>>,
}

impl<T: Real> DualPotentials<T> {
    pub fn new(potentials: Vec<Vec<T>>) -> Self {
        DualPotentials { potentials }
    }

    pub fn zeros(sizes: &[usize]) -> Self {
        DualPotentials {
            potentials: sizes.iter().map(|&l| vec![T::zero(); l]).collect(),
        }
    }

    pub fn axis(&self, i: usize) -> &[T] {
        &self.potentials[i]
    }

    pub fn axes(&self) -> &[Vec<T>] {
        &self.potentials
    }

    pub fn into_inner(self) -> Vec<Vec<T>> {
        self.potentials
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.potentials.iter().map(Vec::len).collect()
    }

    /// `sum_i u_i(r_i)`.
    #[inline]
    pub fn sum_at(&self, idx: &[usize]) -> T {
        self.potentials
            .iter()
            .zip(idx)
            .fold(T::zero(), |acc, (u, &x)| acc + u[x])
    }

    /// Shifts into the gauge `u_i(0) = 0` for every axis but the last, which
    /// absorbs the total shift. Gains and the dual objective are unchanged.
    pub fn normalized(&self) -> Self {
        let mut p = self.potentials.clone();
        let n = p.len();
        if n == 0 {
            return self.clone();
        }
        let mut slack = T::zero();
        for u in p.iter_mut().take(n - 1) {
            let s = u[0];
            u.iter_mut().for_each(|v| *v -= s);
            slack += s;
        }
        p[n - 1].iter_mut().for_each(|v| *v += slack);
        DualPotentials { potentials: p }
    }
}

/// Axis-wise projections of `plan`.
pub fn plan_marginals<T: Real>(plan: &SparsePlan<T>, sizes: &[usize]) -> Result<Vec<Vec<T>>> {
    let mut out: Vec<Vec<T>> = sizes.iter().map(|&l| vec![T::zero(); l]).collect();
    for (r, m) in plan.iter() {
        if !r.in_range(sizes) {
            return Err(Error::MalformedPlan(format!(
                "configuration {r} out of range for sizes {sizes:?}"
            )));
        }
        for (axis, &x) in r.indices().iter().enumerate() {
            out[axis][x] += m;
        }
    }
    Ok(out)
}

/// `<c, plan>`.
pub fn plan_cost<T: Real>(plan: &SparsePlan<T>, cost: &CostSpec<T>) -> Result<T> {
    let mut total = T::zero();
    for (r, m) in plan.iter() {
        if !r.in_range(cost.sizes()) {
            return Err(Error::ArityMismatch {
                cost: cost.arity(),
                marginals: r.arity(),
            });
        }
        total += cost.at(r) * m;
    }
    Ok(total)
}

/// `sum_i u_i(r_i) - c(r)`. Positive gain means `r` violates the dual
/// constraint of the full problem.
#[inline]
pub fn gain<T: Real>(u: &DualPotentials<T>, r: &Configuration, cost: &CostSpec<T>) -> T {
    u.sum_at(r.indices()) - cost.at(r)
}

/// `sum_i <mu_i, u_i>`.
pub fn dual_objective<T: Real>(u: &DualPotentials<T>, marginals: &[DiscreteMarginal<T>]) -> T {
    debug_assert_eq!(u.axes().len(), marginals.len());
    u.axes()
        .iter()
        .zip(marginals)
        .map(|(ui, mu)| {
            ui.iter()
                .zip(mu.weights())
                .fold(T::zero(), |acc, (&a, &b)| acc + a * b)
        })
        .sum()
}

/// Largest deviation between the plan's marginals and the prescribed ones.
pub fn marginal_error<T: Real>(plan: &SparsePlan<T>, marginals: &[DiscreteMarginal<T>]) -> Result<T> {
    let sizes: Vec<usize> = marginals.iter().map(DiscreteMarginal::len).collect();
    let proj = plan_marginals(plan, &sizes)?;
    Ok(proj
        .iter()
        .zip(marginals)
        .flat_map(|(p, mu)| p.iter().zip(mu.weights()).map(|(&a, &b)| (a - b).abs()))
        .fold(T::zero(), T::max))
}
