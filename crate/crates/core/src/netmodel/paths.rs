use alloc::vec::Vec;

use super::{Demand, NetError, Topology};

/// Default ceiling on enumerated paths per demand.
pub const DEFAULT_PATH_CAP: usize = 100_000;

/// A simple path, stored as its node sequence from source to destination.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Path {
    nodes: Vec<usize>,
}

impl Path {
    /// Wraps a node sequence after checking it is a simple path in `topology`.
    pub fn new(topology: &Topology, nodes: Vec<usize>) -> Option<Self> {
        let path = Self { nodes };
        path.is_simple_in(topology).then_some(path)
    }

    /// Wraps a node sequence without validation.
    pub fn from_nodes_unchecked(nodes: Vec<usize>) -> Self {
        Self { nodes }
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, node: usize) -> bool {
        self.nodes.contains(&node)
    }

    pub fn reversed(&self) -> Self {
        Self { nodes: self.nodes.iter().rev().copied().collect() }
    }

    /// True when consecutive nodes are adjacent and no node repeats.
    pub fn is_simple_in(&self, topology: &Topology) -> bool {
        if self.nodes.is_empty() || self.nodes.iter().any(|&n| n >= topology.node_count()) {
            return false;
        }
        let mut seen = alloc::vec![false; topology.node_count()];
        for &n in &self.nodes {
            if core::mem::replace(&mut seen[n], true) {
                return false;
            }
        }
        self.nodes.windows(2).all(|w| topology.has_edge(w[0], w[1]))
    }

    /// True when the path is simple and joins the demand's endpoints.
    pub fn serves(&self, topology: &Topology, demand: Demand) -> bool {
        self.is_simple_in(topology)
            && self.nodes.first() == Some(&demand.src)
            && self.nodes.last() == Some(&demand.dst)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationLimits {
    /// Keep only the first `n` paths in canonical order.
    pub max_paths: Option<usize>,
    /// Fail if more paths than this exist (after truncation is considered).
    pub hard_cap: usize,
}

impl Default for EnumerationLimits {
    fn default() -> Self {
        Self { max_paths: None, hard_cap: DEFAULT_PATH_CAP }
    }
}

/// All simple paths for `demand`, in lexicographic order of node sequence.
///
/// Depth-first search over ascending adjacency lists emits paths in
/// lexicographic order directly: no path is a prefix of another because the
/// search stops at the destination.
pub fn enumerate_simple_paths(
    topology: &Topology,
    demand: Demand,
    limits: EnumerationLimits,
) -> Result<Vec<Path>, NetError> {
    let n = topology.node_count();
    for node in [demand.src, demand.dst] {
        if node >= n {
            return Err(NetError::NodeOutOfRange { node, node_count: n });
        }
    }
    if demand.src == demand.dst {
        return Err(NetError::DegenerateDemand(demand.src));
    }

    let mut out = Vec::new();
    let mut on_path = alloc::vec![false; n];
    let mut path = alloc::vec![demand.src];
    // Per depth: index of the next neighbor to try.
    let mut cursor = alloc::vec![0usize];
    on_path[demand.src] = true;

    while let Some(next) = cursor.last_mut() {
        let tip = *path.last().expect("path tracks cursor depth");
        let neighbors = topology.neighbors(tip);
        if *next >= neighbors.len() {
            cursor.pop();
            on_path[tip] = false;
            path.pop();
            continue;
        }
        let v = neighbors[*next];
        *next += 1;
        if on_path[v] {
            continue;
        }
        if v == demand.dst {
            if limits.max_paths.is_some_and(|m| out.len() >= m) {
                break;
            }
            if out.len() >= limits.hard_cap {
                return Err(NetError::TooManyPaths {
                    src: demand.src,
                    dst: demand.dst,
                    cap: limits.hard_cap,
                });
            }
            let mut nodes = path.clone();
            nodes.push(v);
            out.push(Path { nodes });
            continue;
        }
        on_path[v] = true;
        path.push(v);
        cursor.push(0);
    }
    Ok(out)
}
