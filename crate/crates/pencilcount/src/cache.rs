//! Persistent result cache, one JSON record per line.
//!
//! Field order on disk is fixed: kind, a, b, d, l, value, convention, version.
//! Writes append a single line under a process-wide lock; readers work from
//! the in-memory map loaded at open.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Gw2,
    W2,
    Gw3,
    W3,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantRecord {
    pub kind: Kind,
    pub a: Option<u32>,
    pub b: Option<u32>,
    pub d: Option<u32>,
    pub l: Option<u32>,
    pub value: String,
    pub convention: Option<String>,
    pub version: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Key {
    pub kind: Kind,
    pub a: Option<u32>,
    pub b: Option<u32>,
    pub d: Option<u32>,
    pub l: Option<u32>,
    pub convention: Option<String>,
}

impl InvariantRecord {
    pub fn key(&self) -> Key {
        Key {
            kind: self.kind,
            a: self.a,
            b: self.b,
            d: self.d,
            l: self.l,
            convention: self.convention.clone(),
        }
    }

    pub fn from_key(key: &Key, value: &BigInt) -> Self {
        InvariantRecord {
            kind: key.kind,
            a: key.a,
            b: key.b,
            d: key.d,
            l: key.l,
            value: value.to_string(),
            convention: key.convention.clone(),
            version: VERSION.to_string(),
        }
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("record serializes")
    }

    pub fn parse_line(line: &str) -> Result<Self> {
        let rec: InvariantRecord =
            serde_json::from_str(line).map_err(|e| Error::Cache(format!("bad record {:?}: {}", line, e)))?;
        rec.value.parse::<BigInt>().map_err(|_| Error::Cache(format!("bad value {:?}", rec.value)))?;
        Ok(rec)
    }
}

#[derive(Debug)]
pub struct Cache {
    path: Option<PathBuf>,
    inner: Mutex<HashMap<Key, BigInt>>,
}

impl Cache {
    /// Cache that lives only in memory.
    pub fn memory() -> Self {
        Cache { path: None, inner: Mutex::new(HashMap::new()) }
    }

    /// Opens (or lazily creates) a cache file. Records written by another
    /// engine version are ignored.
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let mut map = HashMap::new();
        if path.exists() {
            let f = File::open(&path)?;
            for (i, line) in BufReader::new(f).lines().enumerate() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let rec = InvariantRecord::parse_line(&line)
                    .map_err(|e| Error::Cache(format!("{}:{}: {}", path.display(), i + 1, e)))?;
                if rec.version != VERSION {
                    continue;
                }
                map.insert(rec.key(), rec.value.parse().unwrap());
            }
        }
        Ok(Cache { path: Some(path), inner: Mutex::new(map) })
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn get(&self, key: &Key) -> Option<BigInt> {
        self.inner.lock().unwrap().get(key).cloned()
    }

    pub fn len(&self) -> usize {
        self.inner.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn put(&self, key: Key, value: &BigInt) -> Result<()> {
        let mut map = self.inner.lock().unwrap();
        if map.get(&key) == Some(value) {
            return Ok(());
        }
        if let Some(p) = &self.path {
            let mut line = InvariantRecord::from_key(&key, value).to_line();
            line.push('\n');
            let mut f = OpenOptions::new().create(true).append(true).open(p)?;
            f.write_all(line.as_bytes())?;
        }
        map.insert(key, value.clone());
        Ok(())
    }

    /// Drops every in-memory entry. The file is left alone.
    pub fn evict(&self) {
        self.inner.lock().unwrap().clear();
    }
}
