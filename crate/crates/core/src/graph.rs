// SPDX-License-Identifier: Apache-2.0

//! Undirected, unweighted graphs and their symmetric normalized operators.
//!
//! A [`Graph`] is immutable once built. [`normalized_operators`] derives the
//! normalized adjacency `Â = D^{-1/2} A D^{-1/2}` and the normalized Laplacian
//! `L = I - Â` from it. Isolated nodes are rejected at construction because
//! `D^{-1/2}` is undefined there.

use std::collections::{BTreeSet, VecDeque};

use nalgebra::DMatrix;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    /// Unordered pairs stored as `(min, max)`.
    edges: BTreeSet<(usize, usize)>,
    adjacency: DMatrix<f64>,
    degrees: Vec<usize>,
}

impl Graph {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Edges as `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn adjacency(&self) -> &DMatrix<f64> {
        &self.adjacency
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edges.contains(&(i.min(j), i.max(j)))
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        let col = self.adjacency.column(i);
        (0..self.n).filter(move |&j| col[j] != 0.0)
    }

    /// Number of connected components, by breadth-first search.
    pub fn component_count(&self) -> usize {
        let mut seen = vec![false; self.n];
        let mut components = 0;
        let mut queue = VecDeque::new();
        for root in 0..self.n {
            if seen[root] {
                continue;
            }
            components += 1;
            seen[root] = true;
            queue.push_back(root);
            while let Some(u) = queue.pop_front() {
                for v in self.neighbors(u) {
                    if !seen[v] {
                        seen[v] = true;
                        queue.push_back(v);
                    }
                }
            }
        }
        components
    }

    pub fn is_connected(&self) -> bool {
        self.component_count() == 1
    }
}

/// Builds a graph on `n` nodes. Duplicate pairs (in either orientation) are
/// collapsed into a single undirected edge.
pub fn build_graph(edge_list: &[(usize, usize)], n: usize) -> Result<Graph> {
    let mut edges = BTreeSet::new();
    for &(i, j) in edge_list {
        for index in [i, j] {
            if index >= n {
                return Err(Error::IndexOutOfRange { index, n });
            }
        }
        if i == j {
            return Err(Error::SelfLoop(i));
        }
        edges.insert((i.min(j), i.max(j)));
    }

    let mut adjacency = DMatrix::zeros(n, n);
    let mut degrees = vec![0usize; n];
    for &(i, j) in &edges {
        adjacency[(i, j)] = 1.0;
        adjacency[(j, i)] = 1.0;
        degrees[i] += 1;
        degrees[j] += 1;
    }
    if let Some(isolated) = degrees.iter().position(|&d| d == 0) {
        return Err(Error::IsolatedNode(isolated));
    }

    Ok(Graph {
        n,
        edges,
        adjacency,
        degrees,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedOperators {
    a_hat: DMatrix<f64>,
    laplacian: DMatrix<f64>,
}

impl NormalizedOperators {
    pub fn n(&self) -> usize {
        self.a_hat.nrows()
    }

    /// `Â = D^{-1/2} A D^{-1/2}`.
    pub fn a_hat(&self) -> &DMatrix<f64> {
        &self.a_hat
    }

    /// `L = I - Â`.
    pub fn laplacian(&self) -> &DMatrix<f64> {
        &self.laplacian
    }
}

pub fn normalized_operators(g: &Graph) -> NormalizedOperators {
    let n = g.n;
    let inv_sqrt: Vec<f64> = g.degrees.iter().map(|&d| 1.0 / (d as f64).sqrt()).collect();
    let mut a_hat = DMatrix::zeros(n, n);
    for &(i, j) in &g.edges {
        let w = 1.0 / ((g.degrees[i] * g.degrees[j]) as f64).sqrt();
        debug_assert!((w - inv_sqrt[i] * inv_sqrt[j]).abs() < 1e-15);
        a_hat[(i, j)] = w;
        a_hat[(j, i)] = w;
    }
    let laplacian = DMatrix::identity(n, n) - &a_hat;
    NormalizedOperators { a_hat, laplacian }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_graph() {
        let g = build_graph(&[(0, 1)], 2).unwrap();
        assert_eq!(g.degrees(), &[1, 1]);
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn duplicate_edges_collapse() {
        let a = build_graph(&[(0, 1)], 2).unwrap();
        let b = build_graph(&[(0, 1), (1, 0), (0, 1)], 2).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn construction_errors() {
        assert!(matches!(
            build_graph(&[(0, 1)], 3),
            Err(Error::IsolatedNode(2))
        ));
        assert!(matches!(
            build_graph(&[(0, 3)], 3),
            Err(Error::IndexOutOfRange { index: 3, n: 3 })
        ));
        assert!(matches!(
            build_graph(&[(0, 1), (1, 1)], 2),
            Err(Error::SelfLoop(1))
        ));
    }

    #[test]
    fn edge_count_is_half_degree_sum() {
        let g = build_graph(&[(0, 1), (1, 2), (2, 0), (2, 3)], 4).unwrap();
        let total: usize = g.degrees().iter().sum();
        assert_eq!(2 * g.edge_count(), total);
        assert_eq!(g.adjacency(), &g.adjacency().transpose());
        assert!((0..4).all(|i| g.adjacency()[(i, i)] == 0.0));
    }

    #[test]
    fn two_node_operators() {
        let ops = normalized_operators(&build_graph(&[(0, 1)], 2).unwrap());
        assert_eq!(
            ops.a_hat(),
            &DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0])
        );
        assert_eq!(
            ops.laplacian(),
            &DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0])
        );
    }

    #[test]
    fn triangle_and_star() {
        let tri = normalized_operators(&build_graph(&[(0, 1), (1, 2), (0, 2)], 3).unwrap());
        for i in 0..3 {
            for j in 0..3 {
                let expected = if i == j { 0.0 } else { 0.5 };
                assert!((tri.a_hat()[(i, j)] - expected).abs() < 1e-15);
            }
        }
        let star = normalized_operators(&build_graph(&[(0, 1), (0, 2), (0, 3)], 4).unwrap());
        for leaf in 1..4 {
            assert!((star.a_hat()[(0, leaf)] - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        }
    }

    #[test]
    fn laplacian_is_identity_minus_a_hat_exactly() {
        let g = build_graph(&[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)], 4).unwrap();
        let ops = normalized_operators(&g);
        let residual = DMatrix::<f64>::identity(4, 4) - ops.a_hat() - ops.laplacian();
        assert!(residual.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn components() {
        let g = build_graph(&[(0, 1), (2, 3)], 4).unwrap();
        assert_eq!(g.component_count(), 2);
        assert!(!g.is_connected());
    }
}
