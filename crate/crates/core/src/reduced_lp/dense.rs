//! Dense LU basis for multi-marginal problems.
//!
//! Constraint rows are the pairs `(axis, point)` with the rows `(i, 0)`,
//! `i < N - 1`, dropped; what remains has full rank `1 + sum(l_i - 1)`.
//! Dropping those rows fixes the dual gauge `u_i(0) = 0` for `i < N - 1`.

use crate::scalar::Real;

#[derive(Debug, Clone)]
pub(crate) struct DenseFactor<T> {
    sizes: Vec<usize>,
    /// Offset of axis `i` in the kept-row numbering (may underflow by one for
    /// axes whose point 0 is dropped, handled in `row`).
    offsets: Vec<usize>,
    m: usize,
    /// Packed LU of `P B`, row-major, unit lower triangle implicit.
    lu: Vec<T>,
    perm: Vec<usize>,
}

impl<T: Real> DenseFactor<T> {
    pub(crate) fn new(sizes: &[usize]) -> Self {
        let n = sizes.len();
        let mut offsets = Vec::with_capacity(n);
        let mut next = 0usize;
        for (i, &l) in sizes.iter().enumerate() {
            offsets.push(next);
            next += if i + 1 < n { l - 1 } else { l };
        }
        DenseFactor {
            sizes: sizes.to_vec(),
            offsets,
            m: next,
            lu: Vec::new(),
            perm: Vec::new(),
        }
    }

    #[cfg(test)]
    pub(crate) fn rank(&self) -> usize {
        self.m
    }

    fn row(&self, axis: usize, x: usize) -> Option<usize> {
        if axis + 1 < self.sizes.len() {
            (x > 0).then(|| self.offsets[axis] + x - 1)
        } else {
            Some(self.offsets[axis] + x)
        }
    }

    fn column(&self, cell: &[usize]) -> impl Iterator<Item = usize> + '_ {
        let cell = cell.to_vec();
        (0..self.sizes.len()).filter_map(move |i| self.row(i, cell[i]))
    }

    /// LU with partial pivoting; returns false on a (numerically) singular basis.
    pub(crate) fn refactor(&mut self, cells: &[&[usize]]) -> bool {
        let m = self.m;
        if cells.len() != m {
            return false;
        }
        let mut a = vec![T::zero(); m * m];
        for (j, cell) in cells.iter().enumerate() {
            for r in self.column(cell) {
                a[r * m + j] = T::one();
            }
        }
        let mut perm: Vec<usize> = (0..m).collect();
        let tiny = T::from_f64_lossy(1e-9);
        for k in 0..m {
            let (p, best) = (k..m)
                .map(|i| (i, a[i * m + k].abs()))
                .fold((k, T::zero()), |acc, it| if it.1 > acc.1 { it } else { acc });
            if best <= tiny {
                return false;
            }
            if p != k {
                for c in 0..m {
                    a.swap(k * m + c, p * m + c);
                }
                perm.swap(k, p);
            }
            let pivot = a[k * m + k];
            for i in k + 1..m {
                let f = a[i * m + k] / pivot;
                if f != T::zero() {
                    a[i * m + k] = f;
                    for c in k + 1..m {
                        let v = a[k * m + c];
                        a[i * m + c] -= f * v;
                    }
                }
            }
        }
        self.lu = a;
        self.perm = perm;
        true
    }

    /// Solves `B z = rhs`.
    fn solve(&self, rhs: &[T]) -> Vec<T> {
        let m = self.m;
        let mut z: Vec<T> = self.perm.iter().map(|&p| rhs[p]).collect();
        for i in 0..m {
            let mut s = z[i];
            for k in 0..i {
                s -= self.lu[i * m + k] * z[k];
            }
            z[i] = s;
        }
        for i in (0..m).rev() {
            let mut s = z[i];
            for k in i + 1..m {
                s -= self.lu[i * m + k] * z[k];
            }
            z[i] = s / self.lu[i * m + i];
        }
        z
    }

    /// Solves `B^T y = rhs`.
    fn solve_transposed(&self, rhs: &[T]) -> Vec<T> {
        let m = self.m;
        // B^T = U^T L^T P, so solve U^T w = rhs, L^T v = w, y = P^T v.
        let mut w = rhs.to_vec();
        for i in 0..m {
            let mut s = w[i];
            for k in 0..i {
                s -= self.lu[k * m + i] * w[k];
            }
            w[i] = s / self.lu[i * m + i];
        }
        for i in (0..m).rev() {
            let mut s = w[i];
            for k in i + 1..m {
                s -= self.lu[k * m + i] * w[k];
            }
            w[i] = s;
        }
        let mut y = vec![T::zero(); m];
        for (k, &p) in self.perm.iter().enumerate() {
            y[p] = w[k];
        }
        y
    }

    pub(crate) fn solve_primal(&self, marginals: &[&[T]]) -> Vec<T> {
        let mut b = vec![T::zero(); self.m];
        for (axis, mu) in marginals.iter().enumerate() {
            for (x, &w) in mu.iter().enumerate() {
                if let Some(r) = self.row(axis, x) {
                    b[r] = w;
                }
            }
        }
        self.solve(&b)
    }

    pub(crate) fn solve_dual(&self, costs: &[T]) -> Vec<Vec<T>> {
        let y = self.solve_transposed(costs);
        self.sizes
            .iter()
            .enumerate()
            .map(|(axis, &l)| {
                (0..l)
                    .map(|x| self.row(axis, x).map_or(T::zero(), |r| y[r]))
                    .collect()
            })
            .collect()
    }

    pub(crate) fn direction(&self, cell: &[usize]) -> Vec<(usize, T)> {
        let mut a = vec![T::zero(); self.m];
        for r in self.column(cell) {
            a[r] = T::one();
        }
        self.solve(&a)
            .into_iter()
            .enumerate()
            .filter(|(_, v)| *v != T::zero())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn refs(cells: &[Vec<usize>]) -> Vec<&[usize]> {
        cells.iter().map(Vec::as_slice).collect()
    }

    #[test]
    fn rank_matches_support_bound() {
        let f = DenseFactor::<f64>::new(&[3, 4, 5]);
        assert_eq!(f.rank(), 1 + 2 + 3 + 4);
    }

    #[test]
    fn staircase_basis_solves() {
        // 2x2x2 staircase: (0,0,0) (1,0,0) (1,1,0) (1,1,1)
        let cells = vec![vec![0, 0, 0], vec![1, 0, 0], vec![1, 1, 0], vec![1, 1, 1]];
        let mut f = DenseFactor::<f64>::new(&[2, 2, 2]);
        assert!(f.refactor(&refs(&cells)));
        let mu1 = [0.2, 0.8];
        let mu2 = [0.5, 0.5];
        let mu3 = [0.7, 0.3];
        let x = f.solve_primal(&[&mu1, &mu2, &mu3]);
        let expect = [0.2, 0.3, 0.2, 0.3];
        for (a, b) in x.iter().zip(expect) {
            assert!((a - b).abs() < 1e-14, "{x:?}");
        }
        let costs = [1.0, 2.0, 3.0, 4.0];
        let u = f.solve_dual(&costs);
        assert_eq!(u[0][0], 0.0);
        assert_eq!(u[1][0], 0.0);
        for (cell, c) in cells.iter().zip(costs) {
            let s: f64 = (0..3).map(|i| u[i][cell[i]]).sum();
            assert!((s - c).abs() < 1e-14);
        }
    }

    #[test]
    fn direction_reconstructs_column() {
        let cells = vec![vec![0, 0, 0], vec![1, 0, 0], vec![1, 1, 0], vec![1, 1, 1]];
        let mut f = DenseFactor::<f64>::new(&[2, 2, 2]);
        assert!(f.refactor(&refs(&cells)));
        let target = [0usize, 1, 1];
        let d = f.direction(&target);
        let mut rebuilt = vec![0.0; f.rank()];
        for (pos, v) in d {
            for r in f.column(&cells[pos]) {
                rebuilt[r] += v;
            }
        }
        let mut expect = vec![0.0; f.rank()];
        for r in f.column(&target) {
            expect[r] = 1.0;
        }
        for (a, b) in rebuilt.iter().zip(&expect) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn dependent_columns_are_singular() {
        // (0,0,0)+(1,1,0) and (0,1,0)+(1,0,0) have equal row sums.
        let cells = vec![vec![0, 0, 0], vec![1, 1, 0], vec![0, 1, 0], vec![1, 0, 0]];
        let mut f = DenseFactor::<f64>::new(&[2, 2, 2]);
        assert!(!f.refactor(&refs(&cells)));
    }
}
