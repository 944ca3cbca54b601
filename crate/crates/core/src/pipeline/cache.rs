//! Content-addressed on-disk store of reduced Gröbner bases.
//!
//! One JSON file per request key under a two-character fan-out directory.
//! Writes go to a unique temporary file first and are renamed into place, so
//! readers never see partial entries. Unreadable or inconsistent entries are
//! reported as warnings and overwritten by the recomputed basis.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::algebra::store::BasisStore;

#[derive(Serialize, Deserialize)]
struct Entry {
    key: String,
    basis: Vec<String>,
    checksum: String,
}

fn checksum(basis: &[String]) -> String {
    let mut h = Sha256::new();
    for b in basis {
        h.update(b.as_bytes());
        h.update(b"\n");
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Default, Clone, Copy, Serialize, PartialEq, Eq)]
pub struct CacheStats {
    pub hits: u64,
    pub misses: u64,
    pub writes: u64,
    pub rejected: u64,
}

#[derive(Debug)]
pub struct DiskCache {
    dir: PathBuf,
    hits: AtomicU64,
    misses: AtomicU64,
    writes: AtomicU64,
    rejected: AtomicU64,
    warnings: Mutex<Vec<String>>,
}

static TMP_COUNTER: AtomicU64 = AtomicU64::new(0);

impl DiskCache {
    pub fn open(dir: &Path) -> std::io::Result<DiskCache> {
        fs::create_dir_all(dir)?;
        Ok(DiskCache {
            dir: dir.to_path_buf(),
            hits: AtomicU64::new(0),
            misses: AtomicU64::new(0),
            writes: AtomicU64::new(0),
            rejected: AtomicU64::new(0),
            warnings: Mutex::new(Vec::new()),
        })
    }

    pub fn path_for(&self, key: &str) -> PathBuf {
        let fan = key.get(..2).unwrap_or("__");
        self.dir.join(fan).join(format!("{key}.json"))
    }

    pub fn stats(&self) -> CacheStats {
        CacheStats {
            hits: self.hits.load(Ordering::Relaxed),
            misses: self.misses.load(Ordering::Relaxed),
            writes: self.writes.load(Ordering::Relaxed),
            rejected: self.rejected.load(Ordering::Relaxed),
        }
    }

    /// Warnings collected so far, sorted so reports do not depend on the
    /// order in which entries were touched.
    pub fn warnings(&self) -> Vec<String> {
        let mut w = self.warnings.lock().unwrap().clone();
        w.sort();
        w.dedup();
        w
    }

    fn warn(&self, key: &str, reason: &str) {
        self.rejected.fetch_add(1, Ordering::Relaxed);
        self.warnings
            .lock()
            .unwrap()
            .push(format!("cache entry {key}: {reason}; recomputed"));
    }

    fn write_entry(&self, key: &str, basis: &[String]) -> std::io::Result<()> {
        let path = self.path_for(key);
        let parent = path.parent().unwrap();
        fs::create_dir_all(parent)?;
        let entry = Entry {
            key: key.to_string(),
            basis: basis.to_vec(),
            checksum: checksum(basis),
        };
        let tmp = parent.join(format!(
            ".{key}.{}.{}.tmp",
            std::process::id(),
            TMP_COUNTER.fetch_add(1, Ordering::Relaxed)
        ));
        {
            let mut file = fs::File::create(&tmp)?;
            file.write_all(serde_json::to_string(&entry)?.as_bytes())?;
            file.sync_all()?;
        }
        fs::rename(&tmp, &path)
    }
}

impl BasisStore for DiskCache {
    fn get(&self, key: &str) -> Option<Vec<String>> {
        let path = self.path_for(key);
        let Ok(text) = fs::read_to_string(&path) else {
            self.misses.fetch_add(1, Ordering::Relaxed);
            return None;
        };
        let entry: Entry = match serde_json::from_str(&text) {
            Ok(e) => e,
            Err(_) => {
                self.warn(key, "unreadable");
                return None;
            }
        };
        if entry.key != key || entry.checksum != checksum(&entry.basis) {
            self.warn(key, "checksum mismatch");
            return None;
        }
        self.hits.fetch_add(1, Ordering::Relaxed);
        Some(entry.basis)
    }

    fn put(&self, key: &str, basis: &[String]) {
        match self.write_entry(key, basis) {
            Ok(()) => {
                self.writes.fetch_add(1, Ordering::Relaxed);
            }
            Err(e) => self
                .warnings
                .lock()
                .unwrap()
                .push(format!("cache entry {key}: write failed: {e}")),
        }
    }

    fn reject(&self, key: &str, reason: &str) {
        self.hits.fetch_sub(1, Ordering::Relaxed);
        self.warn(key, reason);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let c = DiskCache::open(dir.path()).unwrap();
        assert!(c.get("abcd").is_none());
        let basis = vec!["x^2".to_string(), "y".to_string()];
        c.put("abcd", &basis);
        assert_eq!(c.get("abcd"), Some(basis.clone()));
        fs::write(c.path_for("abcd"), "{ not json").unwrap();
        assert!(c.get("abcd").is_none());
        assert_eq!(c.warnings().len(), 1);
        let forged = Entry {
            key: "abcd".into(),
            basis: vec!["x".into()],
            checksum: checksum(&basis),
        };
        fs::write(c.path_for("abcd"), serde_json::to_string(&forged).unwrap()).unwrap();
        assert!(c.get("abcd").is_none());
        assert_eq!(c.stats().rejected, 2);
    }
}
