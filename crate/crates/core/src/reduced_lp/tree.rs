//! Spanning-tree basis for two-marginal problems.
//!
//! Row nodes are `0..l1`, column nodes `l1..l1+l2`. A basis of the
//! transport constraint matrix is exactly a spanning tree of the bipartite
//! graph on these nodes, so all solves reduce to tree walks.

use std::collections::VecDeque;

use crate::scalar::Real;

const NONE: usize = usize::MAX;

#[derive(Debug, Clone)]
pub(crate) struct TreeFactor {
    l1: usize,
    l2: usize,
    /// Node endpoints `(row node, column node)` of each basis position.
    edges: Vec<(usize, usize)>,
    parent: Vec<usize>,
    parent_edge: Vec<usize>,
    depth: Vec<usize>,
    /// Nodes in BFS order from the root (row node 0).
    order: Vec<usize>,
}

impl TreeFactor {
    pub(crate) fn new(l1: usize, l2: usize) -> Self {
        TreeFactor {
            l1,
            l2,
            edges: Vec::new(),
            parent: Vec::new(),
            parent_edge: Vec::new(),
            depth: Vec::new(),
            order: Vec::new(),
        }
    }

    fn nodes(&self) -> usize {
        self.l1 + self.l2
    }

    /// Rebuilds the tree for `cells`; returns false if they do not form a
    /// spanning tree (i.e. the basis matrix would be singular).
    pub(crate) fn refactor(&mut self, cells: &[&[usize]]) -> bool {
        let n = self.nodes();
        if cells.len() + 1 != n {
            return false;
        }
        self.edges = cells.iter().map(|c| (c[0], self.l1 + c[1])).collect();
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for (pos, &(a, b)) in self.edges.iter().enumerate() {
            adj[a].push((b, pos));
            adj[b].push((a, pos));
        }
        self.parent = vec![NONE; n];
        self.parent_edge = vec![NONE; n];
        self.depth = vec![0; n];
        self.order.clear();
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            self.order.push(v);
            for &(w, pos) in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    self.parent[w] = v;
                    self.parent_edge[w] = pos;
                    self.depth[w] = self.depth[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        self.order.len() == n
    }

    /// Basic values `x_B` with `B x_B = (mu_1, mu_2)`.
    pub(crate) fn solve_primal<T: Real>(&self, mu1: &[T], mu2: &[T]) -> Vec<T> {
        let n = self.nodes();
        let mut x = vec![T::zero(); self.edges.len()];
        let mut acc = vec![T::zero(); n];
        for &v in self.order.iter().skip(1).rev() {
            let w = if v < self.l1 { mu1[v] } else { mu2[v - self.l1] };
            let flow = w - acc[v];
            x[self.parent_edge[v]] = flow;
            acc[self.parent[v]] += flow;
        }
        x
    }

    /// Potentials with `u_1(0) = 0` and `u_1(x) + u_2(y) = cost` on every
    /// basis edge.
    pub(crate) fn solve_dual<T: Real>(&self, costs: &[T]) -> (Vec<T>, Vec<T>) {
        let mut pot = vec![T::zero(); self.nodes()];
        for &v in self.order.iter().skip(1) {
            pot[v] = costs[self.parent_edge[v]] - pot[self.parent[v]];
        }
        let u2 = pot.split_off(self.l1);
        (pot, u2)
    }

    /// Sparse representation `B d = a` of the column of cell `(x, y)`:
    /// alternating +1/-1 along the tree path from row node `x` to column
    /// node `y`.
    pub(crate) fn direction<T: Real>(&self, cell: &[usize]) -> Vec<(usize, T)> {
        let mut a = cell[0];
        let mut b = self.l1 + cell[1];
        let mut from_a = Vec::new();
        let mut from_b = Vec::new();
        while self.depth[a] > self.depth[b] {
            from_a.push(self.parent_edge[a]);
            a = self.parent[a];
        }
        while self.depth[b] > self.depth[a] {
            from_b.push(self.parent_edge[b]);
            b = self.parent[b];
        }
        while a != b {
            from_a.push(self.parent_edge[a]);
            a = self.parent[a];
            from_b.push(self.parent_edge[b]);
            b = self.parent[b];
        }
        from_a
            .into_iter()
            .chain(from_b.into_iter().rev())
            .enumerate()
            .map(|(k, pos)| (pos, if k % 2 == 0 { T::one() } else { -T::one() }))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn staircase_tree_solves() {
        // cells (0,0) (1,0) (1,1) on 2x2
        let cells: Vec<Vec<usize>> = vec![vec![0, 0], vec![1, 0], vec![1, 1]];
        let refs: Vec<&[usize]> = cells.iter().map(Vec::as_slice).collect();
        let mut t = TreeFactor::new(2, 2);
        assert!(t.refactor(&refs));
        let x = t.solve_primal(&[0.3f64, 0.7], &[0.6, 0.4]);
        assert!((x[0] - 0.3).abs() < 1e-15);
        assert!((x[1] - 0.3).abs() < 1e-15);
        assert!((x[2] - 0.4).abs() < 1e-15);

        let (u1, u2) = t.solve_dual(&[1.0f64, 2.0, 5.0]);
        assert_eq!(u1[0], 0.0);
        assert_eq!(u1[0] + u2[0], 1.0);
        assert_eq!(u1[1] + u2[0], 2.0);
        assert_eq!(u1[1] + u2[1], 5.0);

        // (0,1) = (0,0) - (1,0) + (1,1)
        let mut d = t.direction::<f64>(&[0, 1]);
        d.sort_by_key(|&(p, _)| p);
        assert_eq!(d, vec![(0, 1.0), (1, -1.0), (2, 1.0)]);
    }

    #[test]
    fn cycle_is_not_a_tree() {
        let cells: Vec<Vec<usize>> = vec![vec![0, 0], vec![0, 1], vec![1, 0]];
        let refs: Vec<&[usize]> = cells.iter().map(Vec::as_slice).collect();
        let mut t = TreeFactor::new(2, 2);
        assert!(t.refactor(&refs));
        let cyc: Vec<Vec<usize>> = vec![vec![0, 0], vec![0, 1], vec![0, 1]];
        let refs: Vec<&[usize]> = cyc.iter().map(Vec::as_slice).collect();
        assert!(!t.refactor(&refs));
    }
}
