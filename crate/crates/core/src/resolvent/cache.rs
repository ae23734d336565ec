//! Memo of single-mode resolvent solves.
//!
//! Entries are deterministic functions of their key, so concurrent inserts of
//! the same key are harmless and the first stored value wins.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, RwLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::Backend;
use crate::error::{Error, Result};
use crate::geometry::QuadratureGrid;

/// SHA-256 of the backend, the grid's radial rule, `|k|` and the input samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CacheKey([u8; 32]);

impl CacheKey {
    pub fn new(
        backend: Backend,
        grid: &QuadratureGrid,
        abs_mode: usize,
        values: &[Complex64],
    ) -> Self {
        let mut h = Sha256::new();
        h.update(backend.as_str().as_bytes());
        h.update((grid.radial_count() as u64).to_le_bytes());
        h.update(grid.outer_radius().to_bits().to_le_bytes());
        h.update((abs_mode as u64).to_le_bytes());
        for v in values {
            h.update(v.re.to_bits().to_le_bytes());
            h.update(v.im.to_bits().to_le_bytes());
        }
        CacheKey(h.finalize().into())
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }

    pub fn from_hex(s: &str) -> Option<Self> {
        let bytes = hex::decode(s).ok()?;
        Some(CacheKey(bytes.try_into().ok()?))
    }
}

#[derive(Debug, Default)]
pub struct ResolventCache {
    entries: RwLock<HashMap<CacheKey, Arc<Vec<Complex64>>>>,
    hits: AtomicU64,
    misses: AtomicU64,
}

#[derive(Serialize, Deserialize)]
struct Persisted {
    config_digest: String,
    entries: Vec<(String, Vec<[f64; 2]>)>,
}

impl ResolventCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, key: &CacheKey) -> Option<Arc<Vec<Complex64>>> {
        let found = self.entries.read().expect("poisoned").get(key).cloned();
        let counter = if found.is_some() {
            &self.hits
        } else {
            &self.misses
        };
        counter.fetch_add(1, Ordering::Relaxed);
        found
    }

    /// Stores `values` unless the key is present; returns the stored entry.
    pub fn insert_if_absent(&self, key: CacheKey, values: Vec<Complex64>) -> Arc<Vec<Complex64>> {
        let mut map = self.entries.write().expect("poisoned");
        map.entry(key).or_insert_with(|| Arc::new(values)).clone()
    }

    pub fn len(&self) -> usize {
        self.entries.read().expect("poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(hits, misses)` since creation.
    pub fn stats(&self) -> (u64, u64) {
        (
            self.hits.load(Ordering::Relaxed),
            self.misses.load(Ordering::Relaxed),
        )
    }

    /// Writes all entries to `path` atomically, tagged with `config_digest`.
    pub fn export(&self, path: &Path, config_digest: &str) -> Result<()> {
        let mut entries: Vec<(String, Vec<[f64; 2]>)> = self
            .entries
            .read()
            .expect("poisoned")
            .iter()
            .map(|(k, v)| (k.to_hex(), v.iter().map(|c| [c.re, c.im]).collect()))
            .collect();
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        let body = serde_json::to_vec(&Persisted {
            config_digest: config_digest.to_string(),
            entries,
        })
        .map_err(|e| Error::config(format!("cannot serialize cache: {e}")))?;
        let dir = path.parent().unwrap_or(Path::new("."));
        fs::create_dir_all(dir)
            .map_err(|e| Error::config(format!("cannot create {}: {e}", dir.display())))?;
        let mut tmp = tempfile::NamedTempFile::new_in(dir)
            .map_err(|e| Error::config(format!("cannot write cache: {e}")))?;
        tmp.write_all(&body)
            .map_err(|e| Error::config(format!("cannot write cache: {e}")))?;
        tmp.persist(path)
            .map_err(|e| Error::config(format!("cannot write cache: {e}")))?;
        Ok(())
    }

    /// Loads entries from `path` if it exists and carries `config_digest`.
    /// Returns the number of entries loaded; a mismatched digest loads nothing.
    pub fn import(&self, path: &Path, config_digest: &str) -> Result<usize> {
        let Ok(bytes) = fs::read(path) else {
            return Ok(0);
        };
        let Ok(persisted) = serde_json::from_slice::<Persisted>(&bytes) else {
            return Ok(0);
        };
        if persisted.config_digest != config_digest {
            return Ok(0);
        }
        let mut map = self.entries.write().expect("poisoned");
        let mut loaded = 0;
        for (key, values) in persisted.entries {
            if let Some(key) = CacheKey::from_hex(&key) {
                let values = values
                    .into_iter()
                    .map(|[re, im]| Complex64::new(re, im))
                    .collect();
                map.entry(key).or_insert_with(|| Arc::new(values));
                loaded += 1;
            }
        }
        Ok(loaded)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_grid;

    #[test]
    fn keys_separate_modes_and_backends() {
        let grid = build_grid(8, 2).unwrap();
        let v = vec![Complex64::new(1.0, 0.5); 8];
        let a = CacheKey::new(Backend::ModeBvp, &grid, 1, &v);
        assert_eq!(a, CacheKey::new(Backend::ModeBvp, &grid, 1, &v));
        assert_ne!(a, CacheKey::new(Backend::ModeBvp, &grid, 2, &v));
        assert_ne!(a, CacheKey::new(Backend::KernelConvolution, &grid, 1, &v));
        assert_eq!(CacheKey::from_hex(&a.to_hex()), Some(a));
    }

    #[test]
    fn first_insert_wins() {
        let grid = build_grid(4, 0).unwrap();
        let cache = ResolventCache::new();
        let key = CacheKey::new(Backend::ModeBvp, &grid, 0, &[]);
        cache.insert_if_absent(key, vec![Complex64::new(1.0, 0.0)]);
        let stored = cache.insert_if_absent(key, vec![Complex64::new(2.0, 0.0)]);
        assert_eq!(stored[0].re, 1.0);
        assert_eq!(cache.len(), 1);
    }

    #[test]
    fn export_import_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.json");
        let grid = build_grid(4, 0).unwrap();
        let cache = ResolventCache::new();
        let key = CacheKey::new(Backend::ModeBvp, &grid, 0, &[]);
        cache.insert_if_absent(key, vec![Complex64::new(0.1, -1.0 / 3.0)]);
        cache.export(&path, "abc").unwrap();

        let fresh = ResolventCache::new();
        assert_eq!(fresh.import(&path, "other").unwrap(), 0);
        assert_eq!(fresh.import(&path, "abc").unwrap(), 1);
        assert_eq!(fresh.get(&key).unwrap()[0], Complex64::new(0.1, -1.0 / 3.0));
    }
}
