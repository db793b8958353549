//! On-disk cache of oracle tables: one JSON file per `(weights, d, p)`, named by
//! a hash of the canonical key, written via temp file and rename.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::witness::Witness;
use crate::error::{Error, Result};
use crate::koszul::{BettiTable, IncompleteCell, OracleChecks};

pub const SCHEMA_VERSION: u32 = 1;

/// `w=1,1,2;d=5;p=32003`
pub fn cache_key(weights: &[u32], d: u32, prime: u64) -> String {
    let w: Vec<String> = weights.iter().map(|a| a.to_string()).collect();
    format!("w={};d={};p={}", w.join(","), d, prime)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Timings {
    pub oracle_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub schema_version: u32,
    pub key: String,
    pub weights: Vec<u32>,
    pub d: u32,
    pub prime: u64,
    pub entries: Vec<(u32, u32, u64)>,
    pub pdim: u32,
    pub max_row: u32,
    pub num_generators: u32,
    pub complete: bool,
    pub incomplete_cells: Vec<IncompleteCell>,
    pub max_cell: u64,
    pub checks: OracleChecks,
    pub witnesses: Vec<Witness>,
    pub timings: Timings,
    pub checksum: String,
}

impl CacheEntry {
    pub fn new(
        table: &BettiTable,
        max_cell: u64,
        witnesses: Vec<Witness>,
        timings: Timings,
    ) -> Self {
        CacheEntry {
            schema_version: SCHEMA_VERSION,
            key: cache_key(&table.weights, table.d, table.prime),
            weights: table.weights.clone(),
            d: table.d,
            prime: table.prime,
            entries: table.entries.clone(),
            pdim: table.pdim(),
            max_row: table.max_row(),
            num_generators: table.num_generators,
            complete: table.complete,
            incomplete_cells: table.incomplete_cells.clone(),
            max_cell,
            checks: table.checks.clone(),
            witnesses,
            timings,
            checksum: String::new(),
        }
    }

    pub fn table(&self) -> BettiTable {
        BettiTable {
            weights: self.weights.clone(),
            d: self.d,
            prime: self.prime,
            num_generators: self.num_generators,
            entries: self.entries.clone(),
            complete: self.complete,
            incomplete_cells: self.incomplete_cells.clone(),
            checks: self.checks.clone(),
        }
    }

    /// sha256 of the canonical JSON with an empty checksum field.
    fn compute_checksum(&self) -> String {
        let mut v = serde_json::to_value(self).expect("serializable");
        v["checksum"] = serde_json::Value::String(String::new());
        hex::encode(Sha256::digest(v.to_string().as_bytes()))
    }

    pub fn sealed(mut self) -> Self {
        self.checksum = self.compute_checksum();
        self
    }
}

#[derive(Debug, Clone)]
pub struct Cache {
    dir: PathBuf,
}

static TMP_COUNTER: AtomicU64 = AtomicU64::new(0);

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(Cache { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path(&self, key: &str) -> PathBuf {
        let h = hex::encode(Sha256::digest(key.as_bytes()));
        self.dir.join(format!("betti-{}.json", &h[..16]))
    }

    /// `Ok(None)` when absent; a malformed or tampered file is an integrity error.
    pub fn load(&self, key: &str) -> Result<Option<CacheEntry>> {
        let path = self.path(key);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        let bad = |why: String| Error::CacheIntegrity(format!("{}: {why}", path.display()));
        let entry: CacheEntry = serde_json::from_str(&text).map_err(|e| bad(e.to_string()))?;
        if entry.schema_version != SCHEMA_VERSION {
            return Err(bad(format!("schema version {}", entry.schema_version)));
        }
        if entry.key != key {
            return Err(bad(format!("key {:?} does not match {key:?}", entry.key)));
        }
        if entry.checksum != entry.compute_checksum() {
            return Err(bad("checksum mismatch".into()));
        }
        Ok(Some(entry))
    }

    pub fn store(&self, entry: CacheEntry) -> Result<CacheEntry> {
        let entry = entry.sealed();
        let path = self.path(&entry.key);
        let tmp = self.dir.join(format!(
            ".{}.{}.{}.tmp",
            path.file_name().unwrap().to_string_lossy(),
            std::process::id(),
            TMP_COUNTER.fetch_add(1, Ordering::Relaxed)
        ));
        let text = serde_json::to_string_pretty(&entry).map_err(|e| Error::Io(e.to_string()))?;
        fs::write(&tmp, text)?;
        fs::rename(&tmp, &path)?;
        Ok(entry)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::koszul::{betti_table, OracleOptions, PrimeField};
    use crate::{QuotientModule, VeroneseModel};

    fn sample() -> BettiTable {
        let qm = QuotientModule::new(VeroneseModel::one_n_two(2, 4).unwrap());
        betti_table(
            &qm,
            &PrimeField::new(32003).unwrap(),
            &OracleOptions::default(),
        )
        .unwrap()
    }

    #[test]
    fn round_trip_is_identity() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path()).unwrap();
        let table = sample();
        let key = cache_key(&table.weights, table.d, table.prime);
        assert_eq!(key, "w=1,1,2;d=4;p=32003");
        assert_eq!(cache.load(&key).unwrap(), None);
        let stored = cache
            .store(CacheEntry::new(
                &table,
                7,
                Vec::new(),
                Timings { oracle_ms: 3 },
            ))
            .unwrap();
        let loaded = cache.load(&key).unwrap().unwrap();
        assert_eq!(loaded, stored);
        assert_eq!(loaded.table(), table);
        let leftovers: Vec<_> = fs::read_dir(dir.path()).unwrap().collect();
        assert_eq!(leftovers.len(), 1);
    }

    #[test]
    fn tampering_is_detected() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path()).unwrap();
        let table = sample();
        let key = cache_key(&table.weights, table.d, table.prime);
        cache
            .store(CacheEntry::new(&table, 7, Vec::new(), Timings::default()))
            .unwrap();
        let path = cache.path(&key);
        let text = fs::read_to_string(&path).unwrap();
        let e = table.entries[1];
        let edited = text.replacen(
            &format!("{},\n      {}\n", e.1, e.2),
            &format!("{},\n      {}\n", e.1, e.2 + 1),
            1,
        );
        assert_ne!(edited, text);
        fs::write(&path, edited).unwrap();
        assert!(matches!(cache.load(&key), Err(Error::CacheIntegrity(_))));
        fs::write(&path, "{ not json").unwrap();
        assert!(matches!(cache.load(&key), Err(Error::CacheIntegrity(_))));
    }
}
