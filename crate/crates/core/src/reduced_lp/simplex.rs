//! Revised primal simplex over a configuration subset.
//!
//! Every basis is a set of product cells. Cells outside the active set are
//! artificial: they may carry mass during phase 1 and are pinned at zero in
//! phase 2, so a rank-deficient active set never needs unit-vector columns
//! and the two-marginal basis stays a spanning tree throughout.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::model::{Configuration, CostSpec, DiscreteMarginal, DualPotentials};
use crate::scalar::Real;

use super::dense::DenseFactor;
use super::tree::TreeFactor;

/// Consecutive degenerate pivots after which pricing switches to Bland's rule.
const DEGENERATE_STREAK: usize = 25;

#[derive(Debug, Clone)]
enum Factor<T> {
    Tree(TreeFactor),
    Dense(DenseFactor<T>),
}

impl<T: Real> Factor<T> {
    fn new(sizes: &[usize]) -> Self {
        if sizes.len() == 2 {
            Factor::Tree(TreeFactor::new(sizes[0], sizes[1]))
        } else {
            Factor::Dense(DenseFactor::new(sizes))
        }
    }

    fn refactor(&mut self, cells: &[&[usize]]) -> bool {
        match self {
            Factor::Tree(t) => t.refactor(cells),
            Factor::Dense(d) => d.refactor(cells),
        }
    }

    fn solve_primal(&self, marginals: &[&[T]]) -> Vec<T> {
        match self {
            Factor::Tree(t) => t.solve_primal(marginals[0], marginals[1]),
            Factor::Dense(d) => d.solve_primal(marginals),
        }
    }

    fn solve_dual(&self, costs: &[T]) -> Vec<Vec<T>> {
        match self {
            Factor::Tree(t) => {
                let (u1, u2) = t.solve_dual(costs);
                vec![u1, u2]
            }
            Factor::Dense(d) => d.solve_dual(costs),
        }
    }

    fn direction(&self, cell: &[usize]) -> Vec<(usize, T)> {
        match self {
            Factor::Tree(t) => t.direction(cell),
            Factor::Dense(d) => d.direction(cell),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    /// Minimize artificial mass.
    Feasibility,
    /// Minimize transport cost with artificial cells pinned at zero.
    Optimality,
}

struct Column<T> {
    config: Configuration,
    cost: T,
    artificial: bool,
}

pub(crate) struct Outcome<T> {
    /// Basic cells in position order.
    pub basis: Vec<Configuration>,
    /// Basic values, aligned with `basis`.
    pub values: Vec<T>,
    /// Whether each basic cell belongs to the active set.
    pub real: Vec<bool>,
    pub potentials: DualPotentials<T>,
    pub pivots: usize,
}

pub(crate) struct Simplex<'a, T> {
    sizes: Vec<usize>,
    marginals: Vec<&'a [T]>,
    cost: Option<&'a CostSpec<T>>,
    columns: Vec<Column<T>>,
    n_real: usize,
    col_of: HashMap<Configuration, usize>,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    x: Vec<T>,
    factor: Factor<T>,
    tol_lp: T,
    pivots: usize,
}

impl<'a, T: Real> Simplex<'a, T> {
    /// `omega` are the real columns in insertion order. With `cost == None`
    /// only the feasibility phase can run.
    pub(crate) fn new(
        marginals: &'a [DiscreteMarginal<T>],
        cost: Option<&'a CostSpec<T>>,
        omega: &[Configuration],
        tol_lp: T,
    ) -> Self {
        let sizes: Vec<usize> = marginals.iter().map(DiscreteMarginal::len).collect();
        let mut columns = Vec::with_capacity(omega.len());
        let mut col_of = HashMap::with_capacity(omega.len());
        for r in omega {
            col_of.insert(r.clone(), columns.len());
            columns.push(Column {
                config: r.clone(),
                cost: cost.map_or(T::zero(), |c| c.at(r)),
                artificial: false,
            });
        }
        let n_real = columns.len();
        Simplex {
            factor: Factor::new(&sizes),
            sizes,
            marginals: marginals.iter().map(DiscreteMarginal::weights).collect(),
            cost,
            is_basic: vec![false; n_real],
            columns,
            n_real,
            col_of,
            basis: Vec::new(),
            x: Vec::new(),
            tol_lp,
            pivots: 0,
        }
    }

    fn rank(&self) -> usize {
        1 + self.sizes.iter().map(|&l| l - 1).sum::<usize>()
    }

    fn column_for(&mut self, r: &Configuration) -> usize {
        if let Some(&j) = self.col_of.get(r) {
            return j;
        }
        let j = self.columns.len();
        self.col_of.insert(r.clone(), j);
        self.columns.push(Column {
            config: r.clone(),
            cost: self.cost.map_or(T::zero(), |c| c.at(r)),
            artificial: true,
        });
        self.is_basic.push(false);
        j
    }

    fn refactor(&mut self) -> bool {
        let cells: Vec<&[usize]> = self
            .basis
            .iter()
            .map(|&j| self.columns[j].config.indices())
            .collect();
        self.factor.refactor(&cells)
    }

    fn fresh_primal(&self) -> Vec<T> {
        let zero = T::zero_tol();
        self.factor
            .solve_primal(&self.marginals)
            .into_iter()
            .map(|v| if v.abs() <= zero { T::zero() } else { v })
            .collect()
    }

    /// Installs `cells` as the basis. Fails if they are not a valid basis or
    /// the basic solution is not (primal) feasible.
    fn install(&mut self, cells: &[Configuration]) -> bool {
        if cells.len() != self.rank() || cells.iter().any(|r| !r.in_range(&self.sizes)) {
            return false;
        }
        for &j in &self.basis {
            self.is_basic[j] = false;
        }
        self.basis.clear();
        for r in cells {
            let j = self.column_for(r);
            if self.is_basic[j] {
                for &k in &self.basis {
                    self.is_basic[k] = false;
                }
                self.basis.clear();
                return false;
            }
            self.is_basic[j] = true;
            self.basis.push(j);
        }
        if !self.refactor() {
            return false;
        }
        self.x = self.fresh_primal();
        let tol = T::mass_tol();
        self.x.iter().all(|&v| v >= -tol)
    }

    /// Staircase (northwest-corner) basis on the full product: always a
    /// feasible basis, whatever the active set.
    fn install_staircase(&mut self) -> Result<()> {
        let marginals: Vec<&[T]> = self.marginals.clone();
        let cells: Vec<Configuration> = staircase(&marginals)
            .into_iter()
            .map(|(r, _)| r)
            .collect();
        if self.install(&cells) {
            Ok(())
        } else {
            Err(Error::Internal("staircase basis is singular".into()))
        }
    }

    fn artificial_mass(&self) -> T {
        self.basis
            .iter()
            .zip(&self.x)
            .filter(|(&j, _)| self.columns[j].artificial)
            .fold(T::zero(), |acc, (_, &v)| acc + v.max(T::zero()))
    }

    fn phase_cost(&self, j: usize, phase: Phase) -> T {
        match phase {
            Phase::Feasibility => {
                if self.columns[j].artificial {
                    T::one()
                } else {
                    T::zero()
                }
            }
            Phase::Optimality => self.columns[j].cost,
        }
    }

    fn duals(&self, phase: Phase) -> Vec<Vec<T>> {
        let costs: Vec<T> = self.basis.iter().map(|&j| self.phase_cost(j, phase)).collect();
        self.factor.solve_dual(&costs)
    }

    fn run_phase(&mut self, phase: Phase) -> Result<()> {
        let tol = match phase {
            Phase::Feasibility => T::rel_tol(),
            Phase::Optimality => self.tol_lp,
        };
        let limit = 50 * (self.n_real + self.rank()) + 10_000;
        let mut streak = 0usize;
        let mut steps = 0usize;
        loop {
            let u = self.duals(phase);
            let bland = streak >= DEGENERATE_STREAK;
            let mut entering: Option<(usize, T)> = None;
            for j in 0..self.n_real {
                if self.is_basic[j] {
                    continue;
                }
                let idx = self.columns[j].config.indices();
                let sum = u.iter().zip(idx).fold(T::zero(), |acc, (ui, &x)| acc + ui[x]);
                let rc = self.phase_cost(j, phase) - sum;
                if rc < -tol {
                    match entering {
                        None => entering = Some((j, rc)),
                        Some((_, best)) if !bland && rc < best => entering = Some((j, rc)),
                        _ => {}
                    }
                    if bland {
                        break;
                    }
                }
            }
            let Some((q, _)) = entering else {
                return Ok(());
            };

            let dir = self.factor.direction(self.columns[q].config.indices());
            let piv = T::from_f64_lossy(1e-9);
            // (position, ratio, artificial, column id)
            let mut leave: Option<(usize, T, bool, usize)> = None;
            for &(p, d) in &dir {
                let j = self.basis[p];
                let art = self.columns[j].artificial;
                let ratio = if phase == Phase::Optimality && art && d.abs() > piv {
                    T::zero()
                } else if d > piv {
                    self.x[p].max(T::zero()) / d
                } else {
                    continue;
                };
                let better = match leave {
                    None => true,
                    Some((_, r, a, id)) => {
                        if ratio < r - T::zero_tol() {
                            true
                        } else if ratio <= r + T::zero_tol() {
                            // ties: purge artificial cells first, then lowest id
                            (art && !a) || (art == a && j < id)
                        } else {
                            false
                        }
                    }
                };
                if better {
                    leave = Some((p, ratio, art, j));
                }
            }
            let Some((p, theta, _, out)) = leave else {
                return Err(Error::Internal(
                    "unbounded direction in a bounded transport polytope".into(),
                ));
            };

            for &(k, d) in &dir {
                let v = self.x[k] - theta * d;
                self.x[k] = if v.abs() <= T::zero_tol() { T::zero() } else { v };
            }
            self.x[p] = theta;
            self.is_basic[out] = false;
            self.is_basic[q] = true;
            self.basis[p] = q;
            if !self.refactor() {
                return Err(Error::Internal("basis became singular after a pivot".into()));
            }
            self.pivots += 1;
            streak = if theta <= T::zero_tol() { streak + 1 } else { 0 };
            steps += 1;
            if steps > limit {
                return Err(Error::Internal(format!(
                    "simplex exceeded {limit} pivots without converging"
                )));
            }
        }
    }

    /// Runs phase 1 from the current basis; returns the residual artificial mass.
    fn feasibility(&mut self) -> Result<T> {
        if self.artificial_mass() > T::zero() {
            self.run_phase(Phase::Feasibility)?;
            self.x = self.fresh_primal();
        }
        Ok(self.artificial_mass())
    }

    fn start(&mut self, warm: Option<&[Configuration]>) -> Result<T> {
        if let Some(cells) = warm {
            if self.install(cells) {
                let residual = self.feasibility()?;
                if residual <= T::mass_tol() {
                    return Ok(residual);
                }
            }
        }
        self.install_staircase()?;
        self.feasibility()
    }

    /// Phase 1 only: residual artificial mass of the best plan supported on
    /// the active set.
    pub(crate) fn feasibility_residual(mut self) -> Result<T> {
        self.start(None)
    }

    pub(crate) fn solve(mut self, warm: Option<&[Configuration]>) -> Result<Outcome<T>> {
        let residual = self.start(warm)?;
        if residual > T::mass_tol() {
            return Err(Error::Infeasible {
                residual: residual.to_f64_lossy(),
            });
        }
        self.run_phase(Phase::Optimality)?;
        let values = self.fresh_primal();
        let potentials = DualPotentials::new(self.duals(Phase::Optimality));
        Ok(Outcome {
            basis: self.basis.iter().map(|&j| self.columns[j].config.clone()).collect(),
            real: self.basis.iter().map(|&j| !self.columns[j].artificial).collect(),
            values,
            potentials,
            pivots: self.pivots,
        })
    }
}

/// Multi-axis northwest-corner sweep: place the smallest remaining mass on
/// the current tuple, then advance the axis with the least remaining mass
/// (lowest axis on ties). Yields exactly `1 + sum(l_i - 1)` cells, some
/// possibly with zero mass, forming a triangular (hence nonsingular) basis.
pub(crate) fn staircase<T: Real>(marginals: &[&[T]]) -> Vec<(Configuration, T)> {
    let n = marginals.len();
    let mut idx = vec![0usize; n];
    let mut rem: Vec<T> = marginals.iter().map(|mu| mu[0]).collect();
    let mut out = Vec::new();
    loop {
        let m = rem.iter().copied().fold(T::infinity(), T::min).max(T::zero());
        out.push((Configuration::from(idx.as_slice()), m));
        for r in rem.iter_mut() {
            *r -= m;
        }
        let next = (0..n)
            .filter(|&i| idx[i] + 1 < marginals[i].len())
            .min_by(|&a, &b| rem[a].partial_cmp(&rem[b]).unwrap_or(std::cmp::Ordering::Equal));
        let Some(axis) = next else {
            break;
        };
        idx[axis] += 1;
        rem[axis] += marginals[axis][idx[axis]];
    }
    out
}
