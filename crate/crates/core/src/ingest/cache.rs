use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::RwLock;

use log::warn;
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::exactmat::QmodZ;
use crate::linkform::{LinkError, LinkingForm};

pub const CACHE_VERSION: u32 = 1;

/// Invariants computed from a Seifert matrix, in serializable form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CachedInvariants {
    #[serde(with = "crate::serde_bigint")]
    pub det: BigInt,
    pub sigma: i64,
    pub orders: Vec<u64>,
    pub gram: Vec<QmodZ>,
}

impl CachedInvariants {
    pub fn new(det: BigInt, sigma: i64, form: &LinkingForm) -> Self {
        CachedInvariants {
            det,
            sigma,
            orders: form.orders().to_vec(),
            gram: form.gram_matrix().into_iter().flatten().collect(),
        }
    }

    pub fn form(&self) -> Result<LinkingForm, LinkError> {
        LinkingForm::from_gram(self.orders.clone(), &self.gram)
    }
}

#[derive(Serialize, Deserialize)]
struct CacheFile {
    version: u32,
    entries: BTreeMap<String, CachedInvariants>,
}

/// Persistent map from `(table digest, expression)` to computed invariants.
///
/// A missing, unreadable or corrupt file starts an empty cache; the problem
/// is logged and kept in [`InvariantCache::warning`].
#[derive(Debug)]
pub struct InvariantCache {
    path: Option<PathBuf>,
    entries: RwLock<BTreeMap<String, CachedInvariants>>,
    dirty: RwLock<bool>,
    warning: Option<String>,
}

impl InvariantCache {
    pub fn in_memory() -> Self {
        InvariantCache {
            path: None,
            entries: RwLock::new(BTreeMap::new()),
            dirty: RwLock::new(false),
            warning: None,
        }
    }

    pub fn open(path: impl AsRef<Path>) -> Self {
        let path = path.as_ref().to_path_buf();
        let mut cache = InvariantCache::in_memory();
        match std::fs::read_to_string(&path) {
            Ok(text) => match serde_json::from_str::<CacheFile>(&text) {
                Ok(file) if file.version == CACHE_VERSION => {
                    cache.entries = RwLock::new(file.entries);
                }
                Ok(file) => {
                    cache.warning = Some(format!(
                        "cache {} has version {}, expected {CACHE_VERSION}; ignoring it",
                        path.display(),
                        file.version
                    ));
                }
                Err(e) => {
                    cache.warning = Some(format!(
                        "cache {} is corrupt ({e}); rebuilding",
                        path.display()
                    ));
                }
            },
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {}
            Err(e) => {
                cache.warning = Some(format!("cannot read cache {}: {e}", path.display()));
            }
        }
        if let Some(w) = &cache.warning {
            warn!("{w}");
        }
        cache.path = Some(path);
        cache
    }

    pub fn key(digest: &str, expr: &str) -> String {
        format!("{digest}:{expr}")
    }

    pub fn warning(&self) -> Option<&str> {
        self.warning.as_deref()
    }

    pub fn len(&self) -> usize {
        self.entries.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, digest: &str, expr: &str) -> Option<CachedInvariants> {
        self.entries
            .read()
            .unwrap()
            .get(&Self::key(digest, expr))
            .cloned()
    }

    pub fn put(&self, digest: &str, expr: &str, value: CachedInvariants) {
        let mut entries = self.entries.write().unwrap();
        let key = Self::key(digest, expr);
        if entries.get(&key) != Some(&value) {
            entries.insert(key, value);
            *self.dirty.write().unwrap() = true;
        }
    }

    /// Writes the cache back to its file if anything changed. No-op for an in-memory cache.
    pub fn save(&self) -> std::io::Result<()> {
        let Some(path) = &self.path else {
            return Ok(());
        };
        if !*self.dirty.read().unwrap() && path.exists() {
            return Ok(());
        }
        let entries = self.entries.read().unwrap().clone();
        let text = serde_json::to_string_pretty(&CacheFile {
            version: CACHE_VERSION,
            entries,
        })
        .map_err(std::io::Error::other)?;
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, text + "\n")?;
        std::fs::rename(&tmp, path)?;
        *self.dirty.write().unwrap() = false;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> CachedInvariants {
        let form = LinkingForm::from_gram(vec![3], &[QmodZ::new(1, 3)]).unwrap();
        CachedInvariants::new(BigInt::from(3), -2, &form)
    }

    #[test]
    fn put_get_save_reload() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.json");
        let cache = InvariantCache::open(&path);
        assert!(cache.warning().is_none());
        cache.put("abc", "3_1", sample());
        assert_eq!(cache.get("abc", "3_1"), Some(sample()));
        assert_eq!(cache.get("abd", "3_1"), None);
        cache.save().unwrap();

        let again = InvariantCache::open(&path);
        assert_eq!(again.get("abc", "3_1"), Some(sample()));
        assert_eq!(again.get("abc", "3_1").unwrap().form().unwrap().to_string(), "Z/3 with gram [1/3]");
    }

    #[test]
    fn corrupt_file_is_a_miss() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.json");
        std::fs::write(&path, "{not json").unwrap();
        let cache = InvariantCache::open(&path);
        assert!(cache.warning().unwrap().contains("corrupt"));
        assert!(cache.get("abc", "3_1").is_none());
        cache.put("abc", "3_1", sample());
        cache.save().unwrap();
        assert!(InvariantCache::open(&path).warning().is_none());
    }

    #[test]
    fn wrong_version_is_ignored() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.json");
        std::fs::write(&path, r#"{"version":99,"entries":{}}"#).unwrap();
        assert!(InvariantCache::open(&path).warning().unwrap().contains("version 99"));
    }
}
