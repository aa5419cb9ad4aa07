//! The simulated cluster: a directory holding `meta.json`, one
//! `share_<i>.bin` per node and an append-only `events.jsonl`.

use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use rsl_core::field::{ExtensionSpec, Field, FieldSpec};
use rsl_core::pmmsr::{CodeParams, PmMsrCode};
use rsl_core::secrecy::SecureScheme;

pub const LAYOUT_VERSION: u32 = 1;
const LOCK_FILE: &str = ".lock";

#[derive(Debug, Error)]
pub enum ClusterError {
    #[error("payload of {got} {unit} exceeds the capacity of {capacity} {unit}")]
    PayloadTooLarge { got: usize, capacity: usize, unit: &'static str },
    #[error("cluster {0} is locked by another writer (remove {1} if stale)")]
    Locked(PathBuf, PathBuf),
    #[error("{0} is not a cluster directory (no meta.json)")]
    NotACluster(PathBuf),
    #[error("{0} already holds a cluster")]
    AlreadyExists(PathBuf),
    #[error("unsupported layout version {0}")]
    LayoutVersion(u32),
    #[error("share of node {0} is missing")]
    MissingShare(usize),
    #[error("share of node {node} is corrupt: {reason}")]
    CorruptShare { node: usize, reason: String },
    #[error("repaired share of node {0} differs from the share it replaces")]
    RepairMismatch(usize),
}

/// How the payload was given, and its length in those units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PayloadMeta {
    Bytes { len: usize },
    Symbols { len: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecureMeta {
    pub l1: usize,
    pub l2: usize,
    pub randomness: usize,
    pub secret_size: usize,
    pub extension: ExtensionSpec,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub layout_version: u32,
    pub params: CodeParams,
    pub field: FieldSpec,
    pub points: Vec<u64>,
    pub payload: PayloadMeta,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub secure: Option<SecureMeta>,
}

/// The field share symbols live in: F for plain clusters, L for secure ones.
#[derive(Debug, Clone, PartialEq)]
pub enum SymbolField {
    Base(FieldSpec),
    Ext(ExtensionSpec),
}

impl Field for SymbolField {
    fn order(&self) -> u128 {
        match self {
            SymbolField::Base(f) => f.order(),
            SymbolField::Ext(l) => l.order(),
        }
    }

    fn add(&self, a: u64, b: u64) -> u64 {
        match self {
            SymbolField::Base(f) => f.add(a, b),
            SymbolField::Ext(l) => l.add(a, b),
        }
    }

    fn sub(&self, a: u64, b: u64) -> u64 {
        match self {
            SymbolField::Base(f) => f.sub(a, b),
            SymbolField::Ext(l) => l.sub(a, b),
        }
    }

    fn neg(&self, a: u64) -> u64 {
        match self {
            SymbolField::Base(f) => f.neg(a),
            SymbolField::Ext(l) => l.neg(a),
        }
    }

    fn mul(&self, a: u64, b: u64) -> u64 {
        match self {
            SymbolField::Base(f) => f.mul(a, b),
            SymbolField::Ext(l) => l.mul(a, b),
        }
    }

    fn inv(&self, a: u64) -> Option<u64> {
        match self {
            SymbolField::Base(f) => f.inv(a),
            SymbolField::Ext(l) => l.inv(a),
        }
    }

    fn symbol_field(&self) -> &FieldSpec {
        match self {
            SymbolField::Base(f) => f,
            SymbolField::Ext(l) => l.symbol_field(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum Event {
    /// Initial shares, one symbol list per node.
    Encode { epoch: u64, shares: Vec<Vec<u64>> },
    /// One repair of `failed`, with the β symbols each helper sent.
    Repair {
        epoch: u64,
        failed: usize,
        helpers: Vec<usize>,
        symbols: Vec<Vec<u64>>,
    },
}

impl Event {
    pub fn epoch(&self) -> u64 {
        match self {
            Event::Encode { epoch, .. } | Event::Repair { epoch, .. } => *epoch,
        }
    }
}

/// Advisory single-writer lock, released on drop.
pub struct Lock(PathBuf);

impl Lock {
    pub fn acquire(dir: &Path) -> Result<Self> {
        let path = dir.join(LOCK_FILE);
        match OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(mut f) => {
                writeln!(f, "{}", std::process::id())?;
                Ok(Lock(path))
            }
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => {
                Err(ClusterError::Locked(dir.to_path_buf(), path).into())
            }
            Err(e) => Err(e).with_context(|| format!("creating {}", path.display())),
        }
    }
}

impl Drop for Lock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.0);
    }
}

pub struct Cluster {
    dir: PathBuf,
    meta: Meta,
    code: PmMsrCode,
    symbols: SymbolField,
    scheme: Option<SecureScheme>,
}

impl Cluster {
    /// Writes a fresh cluster: metadata, all shares and the encode event.
    pub fn create(dir: &Path, meta: Meta, code: PmMsrCode, scheme: Option<SecureScheme>, shares: &[Vec<u64>]) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        if dir.join("meta.json").exists() {
            return Err(ClusterError::AlreadyExists(dir.to_path_buf()).into());
        }
        let symbols = match &scheme {
            Some(s) => SymbolField::Ext(s.extension().clone()),
            None => SymbolField::Base(code.field().clone()),
        };
        let cluster = Cluster {
            dir: dir.to_path_buf(),
            meta,
            code,
            symbols,
            scheme,
        };
        for (i, share) in shares.iter().enumerate() {
            cluster.write_share(i + 1, share)?;
        }
        fs::write(dir.join("events.jsonl"), "")?;
        cluster.append_event(&Event::Encode {
            epoch: 0,
            shares: shares.to_vec(),
        })?;
        let text = serde_json::to_string_pretty(&cluster.meta)? + "\n";
        fs::write(dir.join("meta.json"), text)?;
        Ok(cluster)
    }

    pub fn open(dir: &Path) -> Result<Self> {
        let path = dir.join("meta.json");
        if !path.exists() {
            return Err(ClusterError::NotACluster(dir.to_path_buf()).into());
        }
        let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
        let meta: Meta = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        if meta.layout_version != LAYOUT_VERSION {
            return Err(ClusterError::LayoutVersion(meta.layout_version).into());
        }
        let code = PmMsrCode::new(meta.params, meta.field.clone(), Some(meta.points.clone()))?;
        let scheme = match &meta.secure {
            Some(s) => Some(SecureScheme::with_extension(&code, s.extension.clone(), s.l1, s.l2, s.randomness)?),
            None => None,
        };
        let symbols = match &scheme {
            Some(s) => SymbolField::Ext(s.extension().clone()),
            None => SymbolField::Base(code.field().clone()),
        };
        Ok(Cluster {
            dir: dir.to_path_buf(),
            meta,
            code,
            symbols,
            scheme,
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn meta(&self) -> &Meta {
        &self.meta
    }

    pub fn code(&self) -> &PmMsrCode {
        &self.code
    }

    pub fn symbols(&self) -> &SymbolField {
        &self.symbols
    }

    pub fn scheme(&self) -> Option<&SecureScheme> {
        self.scheme.as_ref()
    }

    pub fn share_path(&self, node: usize) -> PathBuf {
        self.dir.join(format!("share_{node}.bin"))
    }

    /// Nodes whose share file exists, ascending.
    pub fn live_nodes(&self) -> Vec<usize> {
        self.code.nodes().filter(|&i| self.share_path(i).exists()).collect()
    }

    /// The share of `node`, or `None` if its file is absent.
    pub fn read_share(&self, node: usize) -> Result<Option<Vec<u64>>> {
        self.code.check_node(node)?;
        let path = self.share_path(node);
        if !path.exists() {
            return Ok(None);
        }
        let bytes = fs::read(&path).with_context(|| format!("reading {}", path.display()))?;
        let width = self.symbols.byte_width();
        let alpha = self.code.params().alpha;
        if bytes.len() != alpha * width {
            return Err(ClusterError::CorruptShare {
                node,
                reason: format!("{} bytes, expected {}", bytes.len(), alpha * width),
            }
            .into());
        }
        bytes
            .chunks(width)
            .map(|c| {
                self.symbols.decode_le(c).ok_or_else(|| {
                    ClusterError::CorruptShare {
                        node,
                        reason: "value outside the symbol field".into(),
                    }
                    .into()
                })
            })
            .collect::<Result<Vec<u64>>>()
            .map(Some)
    }

    pub fn require_share(&self, node: usize) -> Result<Vec<u64>> {
        self.read_share(node)?.ok_or_else(|| ClusterError::MissingShare(node).into())
    }

    pub fn write_share(&self, node: usize, share: &[u64]) -> Result<()> {
        let mut bytes = Vec::with_capacity(share.len() * self.symbols.byte_width());
        for &s in share {
            self.symbols.encode_le(s, &mut bytes);
        }
        let path = self.share_path(node);
        fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))
    }

    pub fn remove_share(&self, node: usize) -> Result<()> {
        let path = self.share_path(node);
        if path.exists() {
            fs::remove_file(&path).with_context(|| format!("removing {}", path.display()))?;
        }
        Ok(())
    }

    pub fn events(&self) -> Result<Vec<Event>> {
        let path = self.dir.join("events.jsonl");
        let file = File::open(&path).with_context(|| format!("opening {}", path.display()))?;
        let mut out = Vec::new();
        for (n, line) in BufReader::new(file).lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let event = serde_json::from_str(&line).with_context(|| format!("{}:{}", path.display(), n + 1))?;
            out.push(event);
        }
        Ok(out)
    }

    pub fn append_event(&self, event: &Event) -> Result<()> {
        let path = self.dir.join("events.jsonl");
        let mut f = OpenOptions::new()
            .append(true)
            .open(&path)
            .with_context(|| format!("opening {}", path.display()))?;
        writeln!(f, "{}", serde_json::to_string(event)?)?;
        Ok(())
    }

    pub fn next_epoch(&self) -> Result<u64> {
        Ok(self.events()?.iter().map(Event::epoch).max().map_or(0, |e| e + 1))
    }
}
