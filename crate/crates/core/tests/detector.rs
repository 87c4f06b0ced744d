use std::sync::OnceLock;
use std::time::{Duration, Instant};

use netres_core::detector::*;
use netres_core::traffic::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Trained {
    model: DetectorModel,
    metrics: Vec<EpochMetrics>,
    train: Vec<TrafficRecord>,
    elapsed: Duration,
}

/// 2000 balanced synthetic records, trained once and shared.
fn trained() -> &'static Trained {
    static CELL: OnceLock<Trained> = OnceLock::new();
    CELL.get_or_init(|| {
        let train = generate_dataset(2000, ClassMix::BALANCED, PayloadBounds::default(), 21).unwrap();
        let config = DetectorConfig { seed: 5, ..Default::default() };
        let start = Instant::now();
        let (model, metrics) = train_detector(&train, &config).unwrap();
        Trained { model, metrics, train, elapsed: start.elapsed() }
    })
}

fn accuracy(model: &DetectorModel, recs: &[TrafficRecord]) -> f64 {
    let hits = recs.iter().filter(|r| predict(model, &packet_to_graph(r)).unwrap() == r.label).count();
    hits as f64 / recs.len() as f64
}

#[test]
fn skill_on_separable_traffic() {
    let t = trained();
    assert!(t.model.epochs_run <= 20);
    assert!(t.elapsed <= Duration::from_secs(60), "training took {:?}", t.elapsed);
    let held_out = generate_dataset(1000, ClassMix::BALANCED, PayloadBounds::default(), 987).unwrap();
    let acc = accuracy(&t.model, &held_out);
    assert!(acc >= 0.95, "held-out accuracy {acc}");
    let best_val = t.metrics.iter().map(|m| m.val_accuracy).fold(0.0, f64::max);
    assert!(best_val >= 0.95, "validation accuracy {best_val}");
}

#[test]
fn loss_is_finite_and_falls() {
    let m = &trained().metrics;
    assert!(!m.is_empty());
    assert!(m.iter().all(|e| e.loss.is_finite() && (0.0..=1.0).contains(&e.val_accuracy)));
    assert!(m.last().unwrap().loss < m[0].loss);
    for (k, e) in m.iter().enumerate() {
        assert_eq!(e.epoch, k);
    }
}

#[test]
fn training_is_deterministic() {
    let recs = generate_dataset(200, ClassMix::BALANCED, PayloadBounds::default(), 3).unwrap();
    let cfg = DetectorConfig { hidden: 16, epochs: 3, seed: 8, ..Default::default() };
    assert_eq!(train_detector(&recs, &cfg).unwrap(), train_detector(&recs, &cfg).unwrap());
}

#[test]
fn flood_packet_from_training_set() {
    let t = trained();
    let flood = t.train.iter().find(|r| r.label == ClassSet::FLOOD).unwrap();
    let p = classify(&t.model, &packet_to_graph(flood)).unwrap();
    assert!(p[ClassSet::FLOOD.0] > 0.5, "{p:?}");
    assert_eq!(predict(&t.model, &packet_to_graph(flood)).unwrap(), ClassSet::FLOOD);
}

#[test]
fn distribution_sums_to_one() {
    let t = trained();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..500 {
        let len = rng.gen_range(1..=200);
        let payload: Vec<u8> = (0..len).map(|_| rng.gen()).collect();
        let rec = TrafficRecord::new(0, payload, ClassSet::BENIGN, 0).unwrap();
        let p = classify(&t.model, &packet_to_graph(&rec)).unwrap();
        assert!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
        assert_eq!(p, classify(&t.model, &packet_to_graph(&rec)).unwrap());
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for slot in 0..n {
            let mut q = p.clone();
            q.insert(slot, n - 1);
            out.push(q);
        }
    }
    out
}

#[test]
fn node_order_does_not_matter() {
    let t = trained();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..40 {
        let alphabet = rng.gen_range(1..=5u8);
        let len = rng.gen_range(1..=30);
        let payload: Vec<u8> = (0..len).map(|_| rng.gen_range(0..alphabet) * 37).collect();
        let graph = packet_to_graph(&TrafficRecord::new(0, payload, ClassSet::BENIGN, 0).unwrap());
        assert!(graph.node_count() <= 5);
        let base = classify(&t.model, &graph).unwrap();
        for perm in permutations(graph.node_count()) {
            let p = classify(&t.model, &graph.permuted(&perm)).unwrap();
            for (a, b) in base.iter().zip(&p) {
                assert!((a - b).abs() <= 1e-12, "{base:?} vs {p:?} under {perm:?}");
            }
        }
    }
}

#[test]
fn classify_throughput() {
    let t = trained();
    let recs = generate_dataset(1000, ClassMix::BALANCED, PayloadBounds::default(), 44).unwrap();
    let start = Instant::now();
    for r in &recs {
        classify(&t.model, &packet_to_graph(r)).unwrap();
    }
    let elapsed = start.elapsed();
    assert!(elapsed <= Duration::from_secs(2), "1000 graphs took {elapsed:?}");
}

#[test]
fn attack_ratio_matches_tally() {
    let t = trained();
    let topo = netres_core::netmodel::Topology::new(4, vec![1; 4], [(0, 1), (1, 2), (2, 3)]).unwrap();
    let mut cfg = TrafficGenConfig { packets_per_node: 30, seed: 6, ..Default::default() };
    cfg.node_mix.insert(1, ClassMix::attacked(0.9));
    let recs = generate_traffic(&cfg, &topo).unwrap();
    for window in [0..u64::MAX, 5..17, 0..1, 40..50] {
        let got = node_attack_ratio(&t.model, &recs, window.clone(), 4).unwrap();
        let mut expected = vec![(0u64, 0u64); 4];
        let mut in_window = 0;
        for r in &recs {
            if r.timestamp >= window.start && r.timestamp < window.end {
                in_window += 1;
                expected[r.node_id].1 += 1;
                if predict(&t.model, &packet_to_graph(r)).unwrap() != ClassSet::BENIGN {
                    expected[r.node_id].0 += 1;
                }
            }
        }
        assert_eq!(got, expected);
        assert_eq!(got.iter().map(|c| c.1).sum::<u64>(), in_window);
        assert!(got.iter().all(|c| c.0 <= c.1));
    }
    let full = node_attack_ratio(&t.model, &recs, 0..u64::MAX, 4).unwrap();
    assert!(full[1].0 > full[0].0, "{full:?}");
}

#[test]
fn three_of_ten_flagged() {
    let t = trained();
    let mut recs = Vec::new();
    let flood = generate_dataset(400, ClassMix { benign: 0.0, flood: 1.0, brute_force: 0.0 }, PayloadBounds::default(), 8)
        .unwrap();
    let benign = generate_dataset(400, ClassMix::BENIGN, PayloadBounds::default(), 9).unwrap();
    let flagged = |r: &TrafficRecord| predict(&t.model, &packet_to_graph(r)).unwrap() != ClassSet::BENIGN;
    recs.extend(flood.into_iter().filter(|r| flagged(r)).take(3));
    recs.extend(benign.into_iter().filter(|r| !flagged(r)).take(7));
    for r in &mut recs {
        r.node_id = 2;
        r.timestamp = 0;
    }
    assert_eq!(node_attack_ratio(&t.model, &recs, 0..1, 3).unwrap(), vec![(0, 0), (0, 0), (3, 10)]);
}
