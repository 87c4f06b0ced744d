use std::collections::BTreeSet;

use netres_core::netmodel::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Connected graph: random spanning tree plus extra random edges.
fn connected_graph(max_nodes: usize) -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
    (2..=max_nodes, any::<u64>()).prop_map(|(n, seed)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut edges = BTreeSet::new();
        for v in 1..n {
            let u = rng.gen_range(0..v);
            edges.insert((u, v));
        }
        let extra = rng.gen_range(0..=n * (n - 1) / 2);
        for _ in 0..extra {
            let u = rng.gen_range(0..n);
            let v = rng.gen_range(0..n);
            if u != v {
                edges.insert((u.min(v), u.max(v)));
            }
        }
        (n, edges.into_iter().collect())
    })
}

/// Naive recursive search over an adjacency matrix, sorted afterwards.
fn oracle_paths(n: usize, edges: &[(usize, usize)], src: usize, dst: usize) -> Vec<Vec<usize>> {
    let mut adj = vec![vec![false; n]; n];
    for &(u, v) in edges {
        adj[u][v] = true;
        adj[v][u] = true;
    }
    fn go(adj: &[Vec<bool>], dst: usize, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let tip = *path.last().unwrap();
        if tip == dst {
            out.push(path.clone());
            return;
        }
        for v in 0..adj.len() {
            if adj[tip][v] && !path.contains(&v) {
                path.push(v);
                go(adj, dst, path, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(&adj, dst, &mut vec![src], &mut out);
    out.sort();
    out
}

fn topo(n: usize, edges: &[(usize, usize)]) -> Topology {
    Topology::new(n, vec![1; n], edges.iter().copied()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn enumeration_matches_dfs_oracle((n, edges) in connected_graph(8), a in 0usize..8, b in 0usize..8) {
        let (src, dst) = (a % n, b % n);
        prop_assume!(src != dst);
        let t = topo(n, &edges);
        let d = t.demand(src, dst).unwrap();
        let got: Vec<Vec<usize>> = enumerate_simple_paths(&t, d, EnumerationLimits::default())
            .unwrap()
            .iter()
            .map(|p| p.nodes().to_vec())
            .collect();
        prop_assert_eq!(&got, &oracle_paths(n, &edges, src, dst));
        for p in enumerate_simple_paths(&t, d, EnumerationLimits::default()).unwrap() {
            prop_assert!(p.serves(&t, d));
        }
    }

    #[test]
    fn truncation_keeps_canonical_prefix((n, edges) in connected_graph(7), k in 0usize..6) {
        let t = topo(n, &edges);
        let d = t.demand(0, n - 1).unwrap();
        let all = enumerate_simple_paths(&t, d, EnumerationLimits::default()).unwrap();
        let some = enumerate_simple_paths(&t, d, EnumerationLimits { max_paths: Some(k), ..Default::default() }).unwrap();
        prop_assert_eq!(&some[..], &all[..k.min(all.len())]);
    }

    #[test]
    fn action_space_is_product((n, edges) in connected_graph(8), seed in any::<u64>()) {
        prop_assume!(n >= 3);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = topo(n, &edges);
        let d1 = t.demand(0, n - 1).unwrap();
        let s2 = rng.gen_range(1..n);
        let d2 = t.demand(s2, (s2 + 1) % n).unwrap();
        let space = build_action_space(&t, d1, d2, EnumerationLimits::default()).unwrap();
        prop_assert_eq!(space.len(), space.paths_1().len() * space.paths_2().len());
        for (k, &a) in space.actions().iter().enumerate() {
            prop_assert_eq!(space.index_of(a), Some(k));
        }
    }
}

/// Random 10-node instance: connected topology, random costs and weights,
/// and one random path per demand.
struct Instance {
    topology: Topology,
    weights: Vec<u32>,
    p1: Path,
    p2: Path,
    alpha: f64,
}

fn random_instance(rng: &mut ChaCha8Rng) -> Instance {
    let n = 10;
    let mut edges = BTreeSet::new();
    for v in 1..n {
        edges.insert((rng.gen_range(0..v), v));
    }
    for _ in 0..rng.gen_range(0..12) {
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if u != v {
            edges.insert((u.min(v), u.max(v)));
        }
    }
    let cost = (0..n).map(|_| rng.gen_range(1..=200)).collect();
    let topology = Topology::new(n, cost, edges).unwrap();
    let weights = (0..n).map(|_| rng.gen_range(1..=200)).collect();
    let pick = |rng: &mut ChaCha8Rng| {
        let s = rng.gen_range(0..n);
        let mut d = rng.gen_range(0..n - 1);
        if d >= s {
            d += 1;
        }
        let limits = EnumerationLimits { max_paths: Some(50), ..Default::default() };
        let paths = enumerate_simple_paths(&topology, topology.demand(s, d).unwrap(), limits).unwrap();
        paths[rng.gen_range(0..paths.len())].clone()
    };
    let p1 = pick(rng);
    let p2 = pick(rng);
    let alpha = [0.0, 1.0, 100.0, 37.25, rng.gen_range(0.0..500.0)][rng.gen_range(0..5)];
    Instance { topology, weights, p1, p2, alpha }
}

/// Writes out every term of both sums and the overlap set explicitly.
fn oracle_reward(inst: &Instance) -> f64 {
    let mut terms: Vec<f64> = Vec::new();
    for p in [&inst.p1, &inst.p2] {
        for &v in p.nodes() {
            terms.push(-(f64::from(inst.weights[v]) + f64::from(inst.topology.cost(v))));
        }
    }
    let a: BTreeSet<usize> = inst.p1.nodes().iter().copied().collect();
    let b: BTreeSet<usize> = inst.p2.nodes().iter().copied().collect();
    let overlap = a.intersection(&b).count() as f64;
    terms.iter().sum::<f64>() - inst.alpha * overlap
}

#[test]
fn reward_matches_term_by_term_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..10_000 {
        let inst = random_instance(&mut rng);
        let spec = RewardSpec::new(inst.alpha).unwrap();
        let r = compute_reward(&inst.topology, &inst.weights, &inst.p1, &inst.p2, spec);
        assert_eq!(r, oracle_reward(&inst));
        assert!(r < 0.0);
    }
}

#[test]
fn reward_properties() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..2000 {
        let inst = random_instance(&mut rng);
        let spec = RewardSpec::new(inst.alpha).unwrap();
        let r = compute_reward(&inst.topology, &inst.weights, &inst.p1, &inst.p2, spec);

        let rev = compute_reward(&inst.topology, &inst.weights, &inst.p1.reversed(), &inst.p2.reversed(), spec);
        assert_eq!(r, rev);

        let free = RewardSpec::new(0.0).unwrap();
        let r0 = compute_reward(&inst.topology, &inst.weights, &inst.p1, &inst.p2, free);
        let o = overlap_count(&inst.p1, &inst.p2) as f64;
        assert_eq!(r, r0 - inst.alpha * o);

        let v = inst.p1.nodes()[rng.gen_range(0..inst.p1.len())];
        if inst.weights[v] < 200 {
            let mut heavier = inst.weights.clone();
            heavier[v] += 1;
            assert!(compute_reward(&inst.topology, &heavier, &inst.p1, &inst.p2, spec) < r);
        }
    }
}

#[test]
fn overlap_derivative_is_minus_alpha() {
    // Nodes 1 and 5 have equal cost and weight, so swapping one for the other
    // changes only the overlap.
    let edges = [(0, 1), (1, 2), (3, 1), (1, 4), (0, 5), (5, 2), (3, 5), (5, 4)];
    let t = Topology::new(6, vec![7; 6], edges).unwrap();
    let w = [3u32; 6];
    let p1 = Path::new(&t, vec![0, 1, 2]).unwrap();
    let shared = Path::new(&t, vec![3, 1, 4]).unwrap();
    let apart = Path::new(&t, vec![3, 5, 4]).unwrap();
    for alpha in [0.0, 1.0, 100.0, 12.5] {
        let spec = RewardSpec::new(alpha).unwrap();
        let with = compute_reward(&t, &w, &p1, &shared, spec);
        let without = compute_reward(&t, &w, &p1, &apart, spec);
        assert_eq!(overlap_count(&p1, &shared), overlap_count(&p1, &apart) + 1);
        assert_eq!(with - without, -alpha);
    }
}

#[test]
fn k5_count_matches_closed_form() {
    let edges: Vec<_> = (0..5).flat_map(|u| (u + 1..5).map(move |v| (u, v))).collect();
    let t = topo(5, &edges);
    let paths = enumerate_simple_paths(&t, t.demand(0, 4).unwrap(), EnumerationLimits::default()).unwrap();
    // Ordered selections of k of the 3 intermediate nodes, k = 0..=3.
    let expected: usize = (0..=3).map(|k| (0..k).map(|i| 3 - i).product::<usize>()).sum();
    assert_eq!(paths.len(), expected);
    assert_eq!(expected, 16);
}
