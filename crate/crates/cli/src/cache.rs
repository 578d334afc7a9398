//! Content-addressed store of computed series.
//!
//! A record lives at `<root>/<sha256(key)>.json` and carries the format
//! version, the full key, the serialized series and the digest of that
//! serialization. Stores go through a temporary file and a rename.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use nekrasov_core::format::SeriesRecord;
use nekrasov_core::LamSeries;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const CACHE_VERSION: u32 = 1;
pub const CACHE_ENV: &str = "NEKRASOV_CACHE";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CacheError {
    Io(String),
    Corrupt(String),
}

impl std::fmt::Display for CacheError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CacheError::Io(m) => write!(f, "cache i/o error: {m}"),
            CacheError::Corrupt(m) => write!(f, "cache record is corrupt: {m}"),
        }
    }
}

impl std::error::Error for CacheError {}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheRecord {
    pub version: u32,
    pub key: String,
    pub payload: String,
    pub digest: String,
}

fn sha_hex(s: &str) -> String {
    format!("{:x}", Sha256::digest(s.as_bytes()))
}

impl CacheRecord {
    pub fn new(key: &str, series: &LamSeries) -> Self {
        let payload = SeriesRecord::from_series(series).to_json();
        CacheRecord { version: CACHE_VERSION, key: key.to_string(), digest: sha_hex(&payload), payload }
    }

    pub fn series(&self) -> Result<LamSeries, CacheError> {
        if sha_hex(&self.payload) != self.digest {
            return Err(CacheError::Corrupt(format!("digest mismatch for key {}", self.key)));
        }
        SeriesRecord::from_json(&self.payload)
            .and_then(|r| r.to_series())
            .map_err(|e| CacheError::Corrupt(e.to_string()))
    }
}

pub struct Cache {
    root: PathBuf,
}

impl Cache {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Cache { root: root.into() }
    }

    /// Root from the flag if given, else from the environment; `None` disables caching.
    pub fn from_config(flag: Option<&Path>) -> Option<Self> {
        flag.map(Path::to_path_buf)
            .or_else(|| std::env::var_os(CACHE_ENV).map(PathBuf::from))
            .map(Cache::new)
    }

    pub fn path_for(&self, key: &str) -> PathBuf {
        self.root.join(format!("{}.json", sha_hex(key)))
    }

    /// `Ok(None)` on a miss, including records written by another format version.
    pub fn load(&self, key: &str) -> Result<Option<LamSeries>, CacheError> {
        let path = self.path_for(key);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(CacheError::Io(format!("{}: {e}", path.display()))),
        };
        let rec: CacheRecord =
            serde_json::from_str(&text).map_err(|e| CacheError::Corrupt(format!("{}: {e}", path.display())))?;
        if rec.version != CACHE_VERSION || rec.key != key {
            return Ok(None);
        }
        rec.series().map(Some)
    }

    pub fn store(&self, key: &str, series: &LamSeries) -> Result<(), CacheError> {
        let io = |e: std::io::Error| CacheError::Io(e.to_string());
        fs::create_dir_all(&self.root).map_err(io)?;
        let rec = CacheRecord::new(key, series);
        let text = serde_json::to_string(&rec).expect("record serializes");
        let nanos = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_nanos()).unwrap_or(0);
        let tmp = self.root.join(format!(".tmp-{}-{nanos}", std::process::id()));
        let mut f = fs::File::create(&tmp).map_err(io)?;
        f.write_all(text.as_bytes()).map_err(io)?;
        f.sync_all().map_err(io)?;
        drop(f);
        fs::rename(&tmp, self.path_for(key)).map_err(io)
    }

    /// Loads `key`, or computes and stores it on a miss.
    pub fn get_or_compute<F, E>(&self, key: &str, compute: F) -> Result<LamSeries, E>
    where
        F: FnOnce() -> Result<LamSeries, E>,
        E: From<CacheError>,
    {
        if let Some(s) = self.load(key)? {
            return Ok(s);
        }
        let s = compute()?;
        self.store(key, &s)?;
        Ok(s)
    }
}
