use alloc::vec::Vec;

use super::{enumerate_simple_paths, Demand, EnumerationLimits, NetError, Path, Topology};

/// Index pair into the two demands' path lists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PathPairAction {
    pub first: usize,
    pub second: usize,
}

/// Every combination of one path for each of two demands.
///
/// Action `k` is the pair `(k / |P2|, k % |P2|)`, so indices follow the
/// canonical order of both path lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionSpace {
    demands: [Demand; 2],
    paths_1: Vec<Path>,
    paths_2: Vec<Path>,
    actions: Vec<PathPairAction>,
}

impl ActionSpace {
    /// Builds a space from explicit path lists. Used for hand-made test
    /// spaces; [`build_action_space`] is the normal entry point.
    pub fn from_paths(
        demands: [Demand; 2],
        paths_1: Vec<Path>,
        paths_2: Vec<Path>,
    ) -> Result<Self, NetError> {
        for (d, paths) in demands.iter().zip([&paths_1, &paths_2]) {
            if paths.is_empty() {
                return Err(NetError::NoPath { src: d.src, dst: d.dst });
            }
        }
        let actions = (0..paths_1.len())
            .flat_map(|first| (0..paths_2.len()).map(move |second| PathPairAction { first, second }))
            .collect();
        Ok(Self { demands, paths_1, paths_2, actions })
    }

    pub fn demands(&self) -> [Demand; 2] {
        self.demands
    }

    pub fn paths_1(&self) -> &[Path] {
        &self.paths_1
    }

    pub fn paths_2(&self) -> &[Path] {
        &self.paths_2
    }

    pub fn actions(&self) -> &[PathPairAction] {
        &self.actions
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn action(&self, index: usize) -> PathPairAction {
        self.actions[index]
    }

    /// The two paths of action `index`.
    pub fn paths(&self, index: usize) -> (&Path, &Path) {
        let a = self.actions[index];
        (&self.paths_1[a.first], &self.paths_2[a.second])
    }

    pub fn index_of(&self, action: PathPairAction) -> Option<usize> {
        (action.first < self.paths_1.len() && action.second < self.paths_2.len())
            .then(|| action.first * self.paths_2.len() + action.second)
    }
}

/// Enumerates both demands' simple paths and forms their Cartesian product.
pub fn build_action_space(
    topology: &Topology,
    demand1: Demand,
    demand2: Demand,
    limits: EnumerationLimits,
) -> Result<ActionSpace, NetError> {
    let p1 = enumerate_simple_paths(topology, demand1, limits)?;
    let p2 = enumerate_simple_paths(topology, demand2, limits)?;
    ActionSpace::from_paths([demand1, demand2], p1, p2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn four_cycle_space() {
        let t = Topology::new(4, vec![1; 4], [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let s = build_action_space(&t, t.demand(0, 2).unwrap(), t.demand(1, 3).unwrap(), Default::default())
            .unwrap();
        assert_eq!(s.len(), 4);
        assert_eq!(s.paths_1().len() * s.paths_2().len(), s.len());
        for k in 0..s.len() {
            assert_eq!(s.index_of(s.action(k)), Some(k));
        }
        let (a, b) = s.paths(3);
        assert_eq!(a.nodes(), &[0, 3, 2]);
        assert_eq!(b.nodes(), &[1, 2, 3]);
    }

    #[test]
    fn line_space_has_one_action() {
        let t = Topology::new(4, vec![1; 4], [(0, 1), (1, 2), (2, 3)]).unwrap();
        let s = build_action_space(&t, t.demand(0, 3).unwrap(), t.demand(1, 2).unwrap(), Default::default())
            .unwrap();
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn unreachable_demand_fails() {
        let t = Topology::new(4, vec![1; 4], [(0, 1), (2, 3)]).unwrap();
        let err = build_action_space(&t, t.demand(0, 1).unwrap(), t.demand(0, 3).unwrap(), Default::default());
        assert_eq!(err, Err(NetError::NoPath { src: 0, dst: 3 }));
    }
}
