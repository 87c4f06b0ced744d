//! Synthetic traffic whose classes differ in byte statistics:
//!
//! - benign: uniformly random bytes (high entropy);
//! - flood: a random 1–4 byte motif repeated to the payload length (entropy ≤ 2 bits);
//! - brute force: one of [`BRUTE_FORCE_HEADERS`] followed by a random
//!   alphanumeric credential tail (ASCII-only, medium entropy).
//!
//! Every record draws from its own ChaCha stream, keyed by its position, so a
//! record does not depend on how many draws earlier records made.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use rand::Rng;

use super::{ClassId, ClassSet, TrafficError, TrafficRecord, MAX_PAYLOAD};
use crate::netmodel::Topology;
use crate::rng::{stream_rng, SimRng};

/// Login-request prefixes used for brute-force payloads.
pub const BRUTE_FORCE_HEADERS: [&[u8]; 4] = [
    b"USER admin\r\nPASS ",
    b"AUTH LOGIN ",
    b"POST /login HTTP/1.1\r\nuser=root&pass=",
    b"SSH-2.0-libssh\r\npassword:",
];

const ALNUM: &[u8] = b"ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789";

/// Minimum credential tail length after a brute-force header.
const MIN_TAIL: usize = 8;

/// Probabilities of the three built-in classes.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ClassMix {
    pub benign: f64,
    pub flood: f64,
    pub brute_force: f64,
}

impl ClassMix {
    pub const BENIGN: Self = Self { benign: 1.0, flood: 0.0, brute_force: 0.0 };
    pub const BALANCED: Self = Self { benign: 1.0 / 3.0, flood: 1.0 / 3.0, brute_force: 1.0 / 3.0 };

    /// `attack_share` of the traffic malicious, split evenly between flood
    /// and brute force.
    pub fn attacked(attack_share: f64) -> Self {
        Self { benign: 1.0 - attack_share, flood: attack_share / 2.0, brute_force: attack_share / 2.0 }
    }

    pub fn validate(&self) -> Result<(), TrafficError> {
        let p = [self.benign, self.flood, self.brute_force];
        let in_range = p.iter().all(|v| (0.0..=1.0).contains(v));
        if !in_range || (p.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(TrafficError::BadMix(p));
        }
        Ok(())
    }

    fn sample(&self, rng: &mut SimRng) -> ClassId {
        let u: f64 = rng.gen();
        if u < self.benign {
            ClassSet::BENIGN
        } else if u < self.benign + self.flood {
            ClassSet::FLOOD
        } else if self.brute_force > 0.0 {
            ClassSet::BRUTE_FORCE
        } else if self.flood > 0.0 {
            // only reachable through rounding of the cumulative sum
            ClassSet::FLOOD
        } else {
            ClassSet::BENIGN
        }
    }
}

/// Inclusive payload length range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PayloadBounds {
    pub min: usize,
    pub max: usize,
}

impl PayloadBounds {
    pub fn validate(&self) -> Result<(), TrafficError> {
        if self.min == 0 || self.min > self.max || self.max > MAX_PAYLOAD {
            return Err(TrafficError::BadBounds { min: self.min, max: self.max });
        }
        Ok(())
    }
}

impl Default for PayloadBounds {
    fn default() -> Self {
        Self { min: 64, max: 256 }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct TrafficGenConfig {
    /// Mix for nodes without an override.
    pub default_mix: ClassMix,
    pub node_mix: BTreeMap<usize, ClassMix>,
    pub packets_per_node: usize,
    pub payload: PayloadBounds,
    pub seed: u64,
}

impl Default for TrafficGenConfig {
    fn default() -> Self {
        Self {
            default_mix: ClassMix::BENIGN,
            node_mix: BTreeMap::new(),
            packets_per_node: 40,
            payload: PayloadBounds::default(),
            seed: 0,
        }
    }
}

impl TrafficGenConfig {
    pub fn mix_for(&self, node: usize) -> ClassMix {
        self.node_mix.get(&node).copied().unwrap_or(self.default_mix)
    }

    pub fn validate(&self, node_count: usize) -> Result<(), TrafficError> {
        self.payload.validate()?;
        self.default_mix.validate()?;
        for (&node, mix) in &self.node_mix {
            if node >= node_count {
                return Err(TrafficError::NodeOutOfRange { node, node_count });
            }
            mix.validate()?;
        }
        Ok(())
    }
}

/// `packets_per_node` records for every node, interleaved by tick: the
/// record at tick `t` belongs to node `t % node_count`.
pub fn generate_traffic(config: &TrafficGenConfig, topology: &Topology) -> Result<Vec<TrafficRecord>, TrafficError> {
    let n = topology.node_count();
    config.validate(n)?;
    let total = config.packets_per_node * n;
    let mut out = Vec::with_capacity(total);
    for tick in 0..total {
        let node = tick % n;
        let mut rng = stream_rng(config.seed, tick as u64);
        let class = config.mix_for(node).sample(&mut rng);
        let payload = synth_payload(class, config.payload, &mut rng);
        out.push(TrafficRecord { node_id: node, payload, label: class, timestamp: tick as u64 });
    }
    Ok(out)
}

/// `count` records at node 0 with classes drawn from `mix`; used for
/// detector training sets.
pub fn generate_dataset(
    count: usize,
    mix: ClassMix,
    bounds: PayloadBounds,
    seed: u64,
) -> Result<Vec<TrafficRecord>, TrafficError> {
    mix.validate()?;
    bounds.validate()?;
    Ok((0..count)
        .map(|tick| {
            let mut rng = stream_rng(seed, tick as u64);
            let class = mix.sample(&mut rng);
            let payload = synth_payload(class, bounds, &mut rng);
            TrafficRecord { node_id: 0, payload, label: class, timestamp: tick as u64 }
        })
        .collect())
}

fn synth_payload(class: ClassId, bounds: PayloadBounds, rng: &mut SimRng) -> Vec<u8> {
    let len = rng.gen_range(bounds.min..=bounds.max);
    match class {
        ClassSet::FLOOD => {
            let motif_len = rng.gen_range(1..=4);
            let motif: Vec<u8> = (0..motif_len).map(|_| rng.gen()).collect();
            motif.iter().copied().cycle().take(len).collect()
        }
        ClassSet::BRUTE_FORCE => {
            let header = BRUTE_FORCE_HEADERS[rng.gen_range(0..BRUTE_FORCE_HEADERS.len())];
            let len = len.max(header.len() + MIN_TAIL).min(MAX_PAYLOAD);
            let mut payload = header.to_vec();
            payload.extend((header.len()..len).map(|_| ALNUM[rng.gen_range(0..ALNUM.len())]));
            payload
        }
        _ => (0..len).map(|_| rng.gen()).collect(),
    }
}
