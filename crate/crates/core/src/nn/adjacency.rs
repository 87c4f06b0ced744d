use alloc::vec::Vec;

use super::{Matrix, NnError};
use crate::netmodel::Topology;

/// `Â = D^{-1/2} (A + I) D^{-1/2}` for an undirected graph, stored by rows
/// with only the nonzero entries (self-loop plus neighbors, ascending column).
///
/// `d_i` is the degree of node `i` in `A + I`, so `Â[i][j] = 1/sqrt(d_i d_j)`
/// on the diagonal and on edges, zero elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedAdjacency {
    node_count: usize,
    offsets: Vec<usize>,
    columns: Vec<usize>,
    values: Vec<f64>,
}

impl NormalizedAdjacency {
    /// Builds `Â` from an edge list. Self-loops in the input are ignored (one
    /// is always added), as are repeated edges.
    pub fn new(
        node_count: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, NnError> {
        let mut neighbors: Vec<Vec<usize>> = alloc::vec![Vec::new(); node_count];
        for (u, v) in edges {
            if u >= node_count || v >= node_count {
                return Err(NnError::shape("adjacency", (u, v), (node_count, node_count)));
            }
            if u != v {
                neighbors[u].push(v);
                neighbors[v].push(u);
            }
        }
        for (i, list) in neighbors.iter_mut().enumerate() {
            list.push(i);
            list.sort_unstable();
            list.dedup();
        }
        let degree: Vec<f64> = neighbors.iter().map(|l| l.len() as f64).collect();
        let mut offsets = Vec::with_capacity(node_count + 1);
        let mut columns = Vec::new();
        let mut values = Vec::new();
        offsets.push(0);
        for (i, list) in neighbors.iter().enumerate() {
            for &j in list {
                columns.push(j);
                values.push(1.0 / libm::sqrt(degree[i] * degree[j]));
            }
            offsets.push(columns.len());
        }
        Ok(Self { node_count, offsets, columns, values })
    }

    pub fn from_topology(topology: &Topology) -> Self {
        Self::new(topology.node_count(), topology.edges()).expect("topology edges are in range")
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    /// Nonzero entries of row `i` as `(column, value)`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.offsets[i]..self.offsets[i + 1];
        self.columns[span.clone()].iter().copied().zip(self.values[span].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.row(i).find(|&(c, _)| c == j).map_or(0.0, |(_, v)| v)
    }

    pub fn to_dense(&self) -> Matrix {
        let mut m = Matrix::zeros(self.node_count, self.node_count);
        for i in 0..self.node_count {
            for (j, v) in self.row(i) {
                m[(i, j)] = v;
            }
        }
        m
    }

    /// `Â · x`. Since `Â` is symmetric this is also the backward rule.
    pub fn apply(&self, x: &Matrix) -> Result<Matrix, NnError> {
        if x.rows() != self.node_count {
            return Err(NnError::shape("adjacency apply", (self.node_count, self.node_count), x.shape()));
        }
        let cols = x.cols();
        let mut out = Matrix::zeros(self.node_count, cols);
        for i in 0..self.node_count {
            let out_row = out.row_mut(i);
            for (j, a) in self.row(i) {
                for (o, &v) in out_row.iter_mut().zip(x.row(j)) {
                    *o += a * v;
                }
            }
        }
        Ok(out)
    }
}
