//! Binary model checkpoints.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic      8 bytes   "NRCKPT01"
//! kind       string    "detector" or "qmodel"
//! seed       u64
//! meta       u32 count, then count × (key string, value string)
//! params     u32 count, then count × (name string, rows u32, cols u32,
//!                                      rows·cols × f64 bits as u64, row-major)
//! string  =  u32 byte length, UTF-8 bytes
//! ```
//!
//! Values are stored as raw bit patterns, so save → load is bit-exact.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use netres_core::agent::{AgentConfig, QModel};
use netres_core::detector::{DetectorConfig, DetectorModel};
use netres_core::nn::{GcnClassifier, Matrix, ParameterSet};
use netres_core::traffic::ClassSet;

use crate::error::{Error, Result};

pub const MAGIC: &[u8; 8] = b"NRCKPT01";

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub kind: String,
    pub seed: u64,
    pub meta: BTreeMap<String, String>,
    pub params: ParameterSet,
}

impl Checkpoint {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = MAGIC.to_vec();
        put_str(&mut out, &self.kind);
        out.extend_from_slice(&self.seed.to_le_bytes());
        put_u32(&mut out, self.meta.len());
        for (k, v) in &self.meta {
            put_str(&mut out, k);
            put_str(&mut out, v);
        }
        put_u32(&mut out, self.params.len());
        for p in self.params.iter() {
            put_str(&mut out, &p.name);
            put_u32(&mut out, p.value.rows());
            put_u32(&mut out, p.value.cols());
            for v in p.value.data() {
                out.extend_from_slice(&v.to_bits().to_le_bytes());
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> std::result::Result<Self, String> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(8)? != MAGIC {
            return Err("not a checkpoint (bad magic)".into());
        }
        let kind = r.string()?;
        let seed = r.u64()?;
        let mut meta = BTreeMap::new();
        for _ in 0..r.u32()? {
            let k = r.string()?;
            meta.insert(k, r.string()?);
        }
        let mut params = ParameterSet::new();
        for _ in 0..r.u32()? {
            let name = r.string()?;
            let (rows, cols) = (r.u32()? as usize, r.u32()? as usize);
            let len = rows.checked_mul(cols).ok_or("parameter too large")?;
            if len.saturating_mul(8) > r.remaining() {
                return Err(format!("parameter `{name}` truncated"));
            }
            let data = (0..len).map(|_| r.u64().map(f64::from_bits)).collect::<std::result::Result<Vec<_>, _>>()?;
            let m = Matrix::new(rows, cols, data).map_err(|e| e.to_string())?;
            params.add(name, m).map_err(|e| e.to_string())?;
        }
        if r.remaining() != 0 {
            return Err(format!("{} trailing bytes", r.remaining()));
        }
        Ok(Self { kind, seed, meta, params })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&bytes).map_err(|m| Error::format(path, m))
    }

    fn meta(&self, key: &str) -> std::result::Result<&str, String> {
        self.meta.get(key).map(String::as_str).ok_or_else(|| format!("missing metadata `{key}`"))
    }

    fn expect_kind(&self, kind: &str) -> std::result::Result<(), String> {
        if self.kind == kind {
            Ok(())
        } else {
            Err(format!("expected a {kind} checkpoint, found {}", self.kind))
        }
    }
}

fn put_u32(out: &mut Vec<u8>, v: usize) {
    out.extend_from_slice(&u32::try_from(v).expect("fits in u32").to_le_bytes());
}

fn put_str(out: &mut Vec<u8>, s: &str) {
    put_u32(out, s.len());
    out.extend_from_slice(s.as_bytes());
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn remaining(&self) -> usize {
        self.bytes.len() - self.pos
    }

    fn take(&mut self, n: usize) -> std::result::Result<&'a [u8], String> {
        if n > self.remaining() {
            return Err("unexpected end of file".into());
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self) -> std::result::Result<u32, String> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn u64(&mut self) -> std::result::Result<u64, String> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn string(&mut self) -> std::result::Result<String, String> {
        let n = self.u32()? as usize;
        String::from_utf8(self.take(n)?.to_vec()).map_err(|e| e.to_string())
    }
}

/// `config` is stored as JSON under the `config` key.
pub fn detector_checkpoint(model: &DetectorModel, config: &DetectorConfig) -> Checkpoint {
    let mut meta = BTreeMap::new();
    meta.insert("config".into(), serde_json::to_string(config).expect("config serializes"));
    meta.insert("classes".into(), model.classes.names().join(","));
    meta.insert("benign".into(), model.classes.name(model.classes.benign()).expect("own class").to_string());
    meta.insert("epochs_run".into(), model.epochs_run.to_string());
    meta.insert("hidden".into(), model.network.shape().hidden.to_string());
    Checkpoint { kind: "detector".into(), seed: model.seed, meta, params: model.network.params().clone() }
}

pub fn detector_from_checkpoint(ckpt: &Checkpoint) -> std::result::Result<DetectorModel, String> {
    ckpt.expect_kind("detector")?;
    let names = ckpt.meta("classes")?.split(',').map(String::from).collect();
    let classes = ClassSet::new(names, ckpt.meta("benign")?).map_err(|e| e.to_string())?;
    let network = GcnClassifier::from_params(ckpt.params.clone()).map_err(|e| e.to_string())?;
    if network.shape().classes != classes.len() {
        return Err("class count does not match the output layer".into());
    }
    let epochs_run = ckpt.meta("epochs_run")?.parse().map_err(|e| format!("epochs_run: {e}"))?;
    Ok(DetectorModel { network, classes, seed: ckpt.seed, epochs_run })
}

pub fn qmodel_checkpoint(model: &QModel, config: &AgentConfig) -> Checkpoint {
    let shape = model.shape();
    let mut meta = BTreeMap::new();
    meta.insert("config".into(), serde_json::to_string(config).expect("config serializes"));
    meta.insert("nodes".into(), shape.nodes.to_string());
    meta.insert("embed".into(), shape.embed.to_string());
    meta.insert("hidden".into(), shape.hidden.to_string());
    meta.insert("attack_aware".into(), model.attack_aware().to_string());
    Checkpoint { kind: "qmodel".into(), seed: config.seed, meta, params: model.params().clone() }
}

pub fn qmodel_from_checkpoint(ckpt: &Checkpoint) -> std::result::Result<QModel, String> {
    ckpt.expect_kind("qmodel")?;
    let nodes = ckpt.meta("nodes")?.parse().map_err(|e| format!("nodes: {e}"))?;
    let aware = ckpt.meta("attack_aware")?.parse().map_err(|e| format!("attack_aware: {e}"))?;
    QModel::from_params(ckpt.params.clone(), nodes, aware).map_err(|e| e.to_string())
}
