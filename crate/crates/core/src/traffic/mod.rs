//! Labeled traffic records, the synthetic generator, and byte-level packet graphs.

mod gen;
mod graph;

pub use gen::{
    generate_dataset, generate_traffic, ClassMix, PayloadBounds, TrafficGenConfig, BRUTE_FORCE_HEADERS,
};
pub use graph::{packet_to_graph, PacketGraph};

use alloc::string::{String, ToString};
use alloc::vec::Vec;

/// Largest payload accepted anywhere (one Ethernet MTU).
pub const MAX_PAYLOAD: usize = 1500;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TrafficError {
    #[error("payload length {0} outside 1..=1500")]
    PayloadLength(usize),
    #[error("unknown class `{0}`")]
    UnknownClass(String),
    #[error("class id {0} not in the class set")]
    ClassOutOfRange(usize),
    #[error("class set needs at least two distinct names including the benign class")]
    BadClassSet,
    #[error("node {node} out of range for a {node_count}-node topology")]
    NodeOutOfRange { node: usize, node_count: usize },
    #[error("class mix probabilities must lie in [0, 1] and sum to 1, got {0:?}")]
    BadMix([f64; 3]),
    #[error("payload bounds {min}..={max} invalid")]
    BadBounds { min: usize, max: usize },
}

/// Index into a [`ClassSet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClassId(pub usize);

/// Ordered traffic class names; one of them is the benign class.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "ClassSetRepr", into = "ClassSetRepr"))]
pub struct ClassSet {
    names: Vec<String>,
    benign: usize,
}

impl ClassSet {
    pub const BENIGN: ClassId = ClassId(0);
    pub const FLOOD: ClassId = ClassId(1);
    pub const BRUTE_FORCE: ClassId = ClassId(2);

    pub fn new(names: Vec<String>, benign: &str) -> Result<Self, TrafficError> {
        let mut sorted = names.clone();
        sorted.sort();
        sorted.dedup();
        let benign = names.iter().position(|n| n == benign).ok_or(TrafficError::BadClassSet)?;
        if names.len() < 2 || sorted.len() != names.len() {
            return Err(TrafficError::BadClassSet);
        }
        Ok(Self { names, benign })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn benign(&self) -> ClassId {
        ClassId(self.benign)
    }

    pub fn is_attack(&self, class: ClassId) -> bool {
        class.0 != self.benign
    }

    pub fn id(&self, name: &str) -> Result<ClassId, TrafficError> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(ClassId)
            .ok_or_else(|| TrafficError::UnknownClass(name.to_string()))
    }

    pub fn name(&self, class: ClassId) -> Result<&str, TrafficError> {
        self.names.get(class.0).map(String::as_str).ok_or(TrafficError::ClassOutOfRange(class.0))
    }
}

/// Serialized form: the names plus the benign class name.
#[cfg(feature = "serde")]
#[derive(serde::Serialize, serde::Deserialize)]
struct ClassSetRepr {
    names: Vec<String>,
    benign: String,
}

#[cfg(feature = "serde")]
impl TryFrom<ClassSetRepr> for ClassSet {
    type Error = TrafficError;

    fn try_from(repr: ClassSetRepr) -> Result<Self, TrafficError> {
        ClassSet::new(repr.names, &repr.benign)
    }
}

#[cfg(feature = "serde")]
impl From<ClassSet> for ClassSetRepr {
    fn from(set: ClassSet) -> Self {
        let benign = set.names[set.benign].clone();
        Self { names: set.names, benign }
    }
}

/// `benign`, `flood`, `brute_force`, with benign first.
impl Default for ClassSet {
    fn default() -> Self {
        Self { names: ["benign", "flood", "brute_force"].map(String::from).to_vec(), benign: 0 }
    }
}

/// One packet observed at a topology node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrafficRecord {
    pub node_id: usize,
    pub payload: Vec<u8>,
    pub label: ClassId,
    pub timestamp: u64,
}

impl TrafficRecord {
    pub fn new(node_id: usize, payload: Vec<u8>, label: ClassId, timestamp: u64) -> Result<Self, TrafficError> {
        if payload.is_empty() || payload.len() > MAX_PAYLOAD {
            return Err(TrafficError::PayloadLength(payload.len()));
        }
        Ok(Self { node_id, payload, label, timestamp })
    }
}

/// Shannon entropy of the byte histogram, in bits per byte.
pub fn payload_entropy(payload: &[u8]) -> f64 {
    if payload.is_empty() {
        return 0.0;
    }
    let mut counts = [0usize; 256];
    for &b in payload {
        counts[b as usize] += 1;
    }
    let n = payload.len() as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * libm::log2(p)
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn default_classes() {
        let cs = ClassSet::default();
        assert_eq!(cs.id("flood"), Ok(ClassSet::FLOOD));
        assert_eq!(cs.name(ClassSet::BRUTE_FORCE), Ok("brute_force"));
        assert!(!cs.is_attack(ClassSet::BENIGN));
        assert!(cs.is_attack(ClassSet::FLOOD));
        assert!(cs.id("ddos").is_err());
    }

    #[test]
    fn class_set_validation() {
        let names = |v: &[&str]| v.iter().map(|s| String::from(*s)).collect::<Vec<_>>();
        assert!(ClassSet::new(names(&["benign"]), "benign").is_err());
        assert!(ClassSet::new(names(&["a", "b"]), "benign").is_err());
        assert!(ClassSet::new(names(&["a", "a"]), "a").is_err());
        let cs = ClassSet::new(names(&["ddos", "normal", "scan"]), "normal").unwrap();
        assert_eq!(cs.benign(), ClassId(1));
    }

    #[test]
    fn record_payload_bounds() {
        assert!(TrafficRecord::new(0, vec![], ClassSet::BENIGN, 0).is_err());
        assert!(TrafficRecord::new(0, vec![0; 1501], ClassSet::BENIGN, 0).is_err());
        assert!(TrafficRecord::new(0, vec![0; 1500], ClassSet::BENIGN, 0).is_ok());
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(payload_entropy(&[7; 10]), 0.0);
        assert!((payload_entropy(&[1, 2, 1, 2]) - 1.0).abs() < 1e-12);
        let all: Vec<u8> = (0..=255).collect();
        assert!((payload_entropy(&all) - 8.0).abs() < 1e-12);
    }
}
