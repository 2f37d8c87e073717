//! Perfect matchings on the bipartite support graph of a square matrix.
//!
//! Rows are the left vertex set, columns the right one, and `(i, j)` is an
//! edge iff the entry exceeds the graph's threshold. Three engines:
//!
//! * [`perfect_matching`] - Hopcroft-Karp, any perfect matching.
//! * [`max_weight_perfect_matching`] - assignment problem, O(N^3).
//! * [`bottleneck_perfect_matching`] - maximin matching via binary search over
//!   the distinct edge weights with a Hopcroft-Karp feasibility probe.
//!
//! All engines scan rows and columns in ascending order so results are
//! reproducible.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::matrix::{Matrix, Permutation};

#[derive(Clone, Debug)]
pub struct SupportGraph {
    n: usize,
    weights: Vec<f64>,
    threshold: f64,
}

impl SupportGraph {
    /// Edge `(i, j)` exists iff `m[i][j] > threshold`.
    pub fn new(m: &Matrix, threshold: f64) -> Self {
        Self {
            n: m.dim(),
            weights: m.as_slice().to_vec(),
            threshold,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    #[inline]
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[i * self.n + j]
    }

    #[inline]
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.weight(i, j) > self.threshold
    }

    pub fn edge_count(&self) -> usize {
        self.weights.iter().filter(|&&w| w > self.threshold).count()
    }

    fn adjacency(&self, min_weight: f64) -> Vec<Vec<usize>> {
        (0..self.n)
            .map(|i| {
                (0..self.n)
                    .filter(|&j| self.has_edge(i, j) && self.weight(i, j) >= min_weight)
                    .collect()
            })
            .collect()
    }

    fn result_for(&self, map: Vec<usize>) -> MatchingResult {
        let mut min_edge = f64::INFINITY;
        let mut total_weight = 0.0;
        for (i, &j) in map.iter().enumerate() {
            let w = self.weight(i, j);
            min_edge = min_edge.min(w);
            total_weight += w;
        }
        MatchingResult {
            perm: Permutation::from_vec_unchecked(map),
            min_edge,
            total_weight,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchingResult {
    pub perm: Permutation,
    /// Smallest selected entry.
    pub min_edge: f64,
    /// Sum of the selected entries, accumulated in row order.
    pub total_weight: f64,
}

const UNMATCHED: usize = usize::MAX;

/// Hopcroft-Karp maximum cardinality matching on a fixed adjacency.
struct HopcroftKarp<'a> {
    adj: &'a [Vec<usize>],
    match_row: Vec<usize>,
    match_col: Vec<usize>,
    dist: Vec<usize>,
    cursor: Vec<usize>,
}

impl<'a> HopcroftKarp<'a> {
    fn new(adj: &'a [Vec<usize>]) -> Self {
        let n = adj.len();
        Self {
            adj,
            match_row: vec![UNMATCHED; n],
            match_col: vec![UNMATCHED; n],
            dist: vec![0; n],
            cursor: vec![0; n],
        }
    }

    fn bfs(&mut self) -> bool {
        let mut queue = VecDeque::new();
        for (i, &m) in self.match_row.iter().enumerate() {
            if m == UNMATCHED {
                self.dist[i] = 0;
                queue.push_back(i);
            } else {
                self.dist[i] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(i) = queue.pop_front() {
            for &j in &self.adj[i] {
                let k = self.match_col[j];
                if k == UNMATCHED {
                    found = true;
                } else if self.dist[k] == usize::MAX {
                    self.dist[k] = self.dist[i] + 1;
                    queue.push_back(k);
                }
            }
        }
        found
    }

    fn dfs(&mut self, i: usize) -> bool {
        while self.cursor[i] < self.adj[i].len() {
            let j = self.adj[i][self.cursor[i]];
            self.cursor[i] += 1;
            let k = self.match_col[j];
            if k == UNMATCHED || (self.dist[k] == self.dist[i] + 1 && self.dfs(k)) {
                self.match_row[i] = j;
                self.match_col[j] = i;
                return true;
            }
        }
        self.dist[i] = usize::MAX;
        false
    }

    fn solve(mut self) -> Option<Vec<usize>> {
        let n = self.adj.len();
        let mut size = 0;
        while self.bfs() {
            self.cursor.iter_mut().for_each(|c| *c = 0);
            for i in 0..n {
                if self.match_row[i] == UNMATCHED && self.dfs(i) {
                    size += 1;
                }
            }
        }
        (size == n).then_some(self.match_row)
    }
}

pub fn perfect_matching(g: &SupportGraph) -> Option<MatchingResult> {
    let adj = g.adjacency(f64::NEG_INFINITY);
    HopcroftKarp::new(&adj).solve().map(|map| g.result_for(map))
}

/// Maximum total weight over perfect matchings that use only present edges.
///
/// Solved as a min-cost assignment on the complete bipartite graph with cost
/// `-w` on present edges and a large sentinel on absent ones; a solution that
/// still uses a sentinel edge means no perfect matching exists.
pub fn max_weight_perfect_matching(g: &SupportGraph) -> Option<MatchingResult> {
    let n = g.n;
    let max_abs = g.weights.iter().fold(0.0f64, |m, w| m.max(w.abs()));
    let sentinel = 4.0 * (n as f64 + 1.0) * (max_abs + 1.0);
    let cost = |i: usize, j: usize| {
        if g.has_edge(i, j) {
            -g.weight(i, j)
        } else {
            sentinel
        }
    };
    let map = solve_assignment(n, cost);
    if map.iter().enumerate().any(|(i, &j)| !g.has_edge(i, j)) {
        return None;
    }
    Some(g.result_for(map))
}

/// Shortest augmenting path Hungarian method with row/column potentials.
/// Returns `col_of_row` minimizing the total cost.
fn solve_assignment(n: usize, cost: impl Fn(usize, usize) -> f64) -> Vec<usize> {
    // 1-based internally; index 0 is the virtual root column.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut row_of_col = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    let mut minv = vec![0.0; n + 1];
    let mut used = vec![false; n + 1];

    for i in 1..=n {
        row_of_col[0] = i;
        let mut j0 = 0;
        minv.iter_mut().for_each(|m| *m = f64::INFINITY);
        used.iter_mut().for_each(|b| *b = false);
        loop {
            used[j0] = true;
            let i0 = row_of_col[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of_col[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of_col[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of_col[j0] = row_of_col[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut col_of_row = vec![0; n];
    for j in 1..=n {
        col_of_row[row_of_col[j] - 1] = j - 1;
    }
    col_of_row
}

/// Perfect matching maximizing the smallest selected entry.
pub fn bottleneck_perfect_matching(g: &SupportGraph) -> Option<MatchingResult> {
    let mut levels: Vec<f64> = g
        .weights
        .iter()
        .copied()
        .filter(|&w| w > g.threshold)
        .collect();
    levels.sort_by(f64::total_cmp);
    levels.dedup();

    let probe = |min_weight: f64| {
        let adj = g.adjacency(min_weight);
        HopcroftKarp::new(&adj).solve()
    };

    // invariant: levels[lo] is feasible, levels[hi] (if in range) is not
    let mut best = probe(*levels.first()?)?;
    let (mut lo, mut hi) = (0, levels.len());
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        match probe(levels[mid]) {
            Some(map) => {
                lo = mid;
                best = map;
            }
            None => hi = mid,
        }
    }
    Some(g.result_for(best))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(rows: &[&[f64]]) -> SupportGraph {
        SupportGraph::new(&Matrix::from_rows(rows).unwrap(), 1e-12)
    }

    #[test]
    fn any_matching_examples() {
        let g = SupportGraph::new(&Matrix::identity(5), 1e-12);
        assert_eq!(perfect_matching(&g).unwrap().perm, Permutation::identity(5));

        let m = perfect_matching(&graph(&[&[0.3, 0.7], &[0.7, 0.3]])).unwrap();
        assert_eq!(m.perm.len(), 2);

        assert!(perfect_matching(&graph(&[&[1.0, 0.0], &[1.0, 0.0]])).is_none());
    }

    #[test]
    fn max_weight_examples() {
        let m = max_weight_perfect_matching(&graph(&[&[0.9, 0.1], &[0.1, 0.9]])).unwrap();
        assert_eq!(m.perm.map(), &[0, 1]);
        assert_eq!(m.total_weight, 1.8);

        let g = SupportGraph::new(&Matrix::identity(4), 1e-12);
        assert_eq!(
            max_weight_perfect_matching(&g).unwrap().perm,
            Permutation::identity(4)
        );

        assert!(max_weight_perfect_matching(&graph(&[&[1.0, 0.0], &[1.0, 0.0]])).is_none());
    }

    #[test]
    fn max_weight_avoids_absent_heavy_alternative() {
        // the heavy anti-diagonal entry at (1,0) is absent under threshold 0.5
        let g = SupportGraph::new(&Matrix::from_rows(&[[0.6, 0.6], [0.4, 0.6]]).unwrap(), 0.5);
        let m = max_weight_perfect_matching(&g).unwrap();
        assert_eq!(m.perm.map(), &[0, 1]);
    }

    #[test]
    fn bottleneck_examples() {
        let m = bottleneck_perfect_matching(&graph(&[&[0.9, 0.1], &[0.1, 0.9]])).unwrap();
        assert_eq!(m.min_edge, 0.9);

        let d = Matrix::from_rows(&[[0.7, 0.0, 0.0], [0.0, 0.2, 0.0], [0.0, 0.0, 0.5]]).unwrap();
        let m = bottleneck_perfect_matching(&SupportGraph::new(&d, 1e-12)).unwrap();
        assert_eq!(m.min_edge, 0.2);
        assert_eq!(m.perm, Permutation::identity(3));

        assert!(bottleneck_perfect_matching(&graph(&[&[1.0, 0.0], &[1.0, 0.0]])).is_none());
        assert!(
            bottleneck_perfect_matching(&SupportGraph::new(&Matrix::zeros(3), 1e-12)).is_none()
        );
    }

    #[test]
    fn bottleneck_prefers_balanced_matching() {
        // max-weight takes the diagonal (1.0 + 0.05), bottleneck the anti-diagonal
        let g = graph(&[&[1.0, 0.3], &[0.4, 0.05]]);
        let mw = max_weight_perfect_matching(&g).unwrap();
        let bn = bottleneck_perfect_matching(&g).unwrap();
        assert_eq!(mw.perm.map(), &[0, 1]);
        assert_eq!(bn.perm.map(), &[1, 0]);
        assert_eq!(bn.min_edge, 0.3);
    }

    #[test]
    fn hall_violation_in_larger_graph() {
        // rows 0..3 only reach columns 0 and 1
        let mut rows = vec![vec![0.0; 4]; 4];
        for r in rows.iter_mut().take(3) {
            r[0] = 1.0;
            r[1] = 1.0;
        }
        rows[3] = vec![1.0; 4];
        let g = SupportGraph::new(&Matrix::from_rows(&rows).unwrap(), 1e-12);
        assert!(perfect_matching(&g).is_none());
        assert!(max_weight_perfect_matching(&g).is_none());
        assert!(bottleneck_perfect_matching(&g).is_none());
    }
}
