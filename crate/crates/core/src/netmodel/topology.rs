use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use super::NetError;

pub const MIN_COST: u32 = 1;
pub const MAX_COST: u32 = 200;

/// Undirected network with a communication cost on every node.
///
/// Edges are stored normalized as `(low, high)`; adjacency lists are sorted
/// ascending, which fixes the canonical order of path enumeration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    node_count: usize,
    edges: BTreeSet<(usize, usize)>,
    cost: Vec<u32>,
    adjacency: Vec<Vec<usize>>,
}

impl Topology {
    pub fn new(
        node_count: usize,
        cost: Vec<u32>,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, NetError> {
        if cost.len() != node_count {
            return Err(NetError::CostCount { expected: node_count, got: cost.len() });
        }
        for (node, &c) in cost.iter().enumerate() {
            if !(MIN_COST..=MAX_COST).contains(&c) {
                return Err(NetError::CostOutOfRange { node, cost: c as i64 });
            }
        }
        let mut set = BTreeSet::new();
        let mut adjacency = alloc::vec![Vec::new(); node_count];
        for (u, v) in edges {
            for node in [u, v] {
                if node >= node_count {
                    return Err(NetError::NodeOutOfRange { node, node_count });
                }
            }
            if u == v {
                return Err(NetError::SelfLoop(u));
            }
            let key = (u.min(v), u.max(v));
            if !set.insert(key) {
                return Err(NetError::DuplicateEdge(key.0, key.1));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Self { node_count, edges: set, cost, adjacency })
    }

    /// Parses the line-oriented topology text format:
    ///
    /// ```text
    /// # comment
    /// nodes 4
    /// cost 0 10
    /// ...
    /// edge 0 1
    /// ```
    ///
    /// `nodes` must come first; every node needs exactly one `cost` line.
    pub fn parse(text: &str) -> Result<Self, NetError> {
        let mut node_count: Option<usize> = None;
        let mut cost: Vec<Option<u32>> = Vec::new();
        let mut edges = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: &str| NetError::Parse { line: line_no, message: message.into() };
            let mut fields = line.split_whitespace();
            let keyword = fields.next().unwrap_or_default();
            let args: Vec<&str> = fields.collect();
            match (keyword, node_count) {
                ("nodes", None) => {
                    let [n] = args[..] else {
                        return Err(err("expected `nodes <count>`"));
                    };
                    let n: usize = parse_int(n, line_no)?;
                    node_count = Some(n);
                    cost = alloc::vec![None; n];
                }
                ("nodes", Some(_)) => return Err(err("duplicate `nodes` line")),
                (_, None) => return Err(err("first entry must be `nodes <count>`")),
                ("cost", Some(n)) => {
                    let [id, value] = args[..] else {
                        return Err(err("expected `cost <id> <value>`"));
                    };
                    let id: usize = parse_int(id, line_no)?;
                    let value: i64 = parse_int(value, line_no)?;
                    if id >= n {
                        return Err(NetError::NodeOutOfRange { node: id, node_count: n });
                    }
                    if !(MIN_COST as i64..=MAX_COST as i64).contains(&value) {
                        return Err(NetError::CostOutOfRange { node: id, cost: value });
                    }
                    if cost[id].replace(value as u32).is_some() {
                        return Err(err(&format!("second cost for node {id}")));
                    }
                }
                ("edge", Some(_)) => {
                    let [u, v] = args[..] else {
                        return Err(err("expected `edge <u> <v>`"));
                    };
                    edges.push((parse_int(u, line_no)?, parse_int(v, line_no)?));
                }
                (other, Some(_)) => return Err(err(&format!("unknown keyword `{other}`"))),
            }
        }
        let Some(n) = node_count else {
            return Err(NetError::Parse { line: 0, message: "missing `nodes` line".into() });
        };
        let given = cost.iter().filter(|c| c.is_some()).count();
        if given != n {
            return Err(NetError::CostCount { expected: n, got: given });
        }
        Self::new(n, cost.into_iter().map(|c| c.unwrap_or(MIN_COST)).collect(), edges)
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(low, high)` pairs in ascending order.
    pub fn edges(&self) -> impl ExactSizeIterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.adjacency[node]
    }

    pub fn cost(&self, node: usize) -> u32 {
        self.cost[node]
    }

    pub fn costs(&self) -> &[u32] {
        &self.cost
    }

    pub fn demand(&self, src: usize, dst: usize) -> Result<Demand, NetError> {
        Demand::new(src, dst, self.node_count)
    }
}

impl FromStr for Topology {
    type Err = NetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

/// Writes the same text format that [`Topology::parse`] reads.
impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "nodes {}", self.node_count)?;
        for (id, c) in self.cost.iter().enumerate() {
            writeln!(f, "cost {id} {c}")?;
        }
        for (u, v) in &self.edges {
            writeln!(f, "edge {u} {v}")?;
        }
        Ok(())
    }
}

fn parse_int<T: FromStr>(s: &str, line: usize) -> Result<T, NetError> {
    s.parse().map_err(|_| NetError::Parse { line, message: format!("bad integer `{s}`") })
}

/// A routing request between two distinct nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Demand {
    pub src: usize,
    pub dst: usize,
}

impl Demand {
    pub fn new(src: usize, dst: usize, node_count: usize) -> Result<Self, NetError> {
        for node in [src, dst] {
            if node >= node_count {
                return Err(NetError::NodeOutOfRange { node, node_count });
            }
        }
        if src == dst {
            return Err(NetError::DegenerateDemand(src));
        }
        Ok(Self { src, dst })
    }
}
