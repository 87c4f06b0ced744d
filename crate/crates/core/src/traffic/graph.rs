use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use super::{ClassId, TrafficRecord};
use crate::nn::{Matrix, NormalizedAdjacency};

/// Byte co-occurrence graph of one payload.
///
/// One node per distinct byte value (ascending), with features
/// `[value / 255, count / payload_len]`. Bytes `u != v` that appear next to
/// each other anywhere in the payload are joined by an undirected edge.
#[derive(Debug, Clone, PartialEq)]
pub struct PacketGraph {
    pub values: Vec<u8>,
    pub features: Matrix,
    /// `(i, j)` node-index pairs with `i < j`, ascending.
    pub edges: Vec<(usize, usize)>,
    pub label: Option<ClassId>,
}

pub fn packet_to_graph(record: &TrafficRecord) -> PacketGraph {
    let payload = &record.payload;
    let mut counts = [0usize; 256];
    for &b in payload {
        counts[b as usize] += 1;
    }
    let mut index = [usize::MAX; 256];
    let mut values = Vec::new();
    for (b, &c) in counts.iter().enumerate() {
        if c > 0 {
            index[b] = values.len();
            values.push(b as u8);
        }
    }
    let len = payload.len().max(1) as f64;
    let mut features = Matrix::zeros(values.len(), 2);
    for (i, &v) in values.iter().enumerate() {
        features[(i, 0)] = f64::from(v) / 255.0;
        features[(i, 1)] = counts[v as usize] as f64 / len;
    }
    let edges: BTreeSet<(usize, usize)> = payload
        .windows(2)
        .filter(|w| w[0] != w[1])
        .map(|w| {
            let (a, b) = (index[w[0] as usize], index[w[1] as usize]);
            (a.min(b), a.max(b))
        })
        .collect();
    PacketGraph { values, features, edges: edges.into_iter().collect(), label: Some(record.label) }
}

impl PacketGraph {
    pub fn node_count(&self) -> usize {
        self.values.len()
    }

    pub fn adjacency(&self) -> NormalizedAdjacency {
        NormalizedAdjacency::new(self.node_count(), self.edges.iter().copied())
            .expect("edges index existing nodes")
    }

    /// Same graph with node `i` moved to position `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> PacketGraph {
        assert_eq!(perm.len(), self.node_count());
        let n = self.node_count();
        let mut values = alloc::vec![0u8; n];
        let mut features = Matrix::zeros(n, self.features.cols());
        for (i, &p) in perm.iter().enumerate() {
            values[p] = self.values[i];
            features.row_mut(p).copy_from_slice(self.features.row(i));
        }
        let mut edges: Vec<_> = self
            .edges
            .iter()
            .map(|&(a, b)| (perm[a].min(perm[b]), perm[a].max(perm[b])))
            .collect();
        edges.sort_unstable();
        PacketGraph { values, features, edges, label: self.label }
    }
}
