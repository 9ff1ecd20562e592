//! Content-addressed on-disk cache for series and sequence tables.
//!
//! Entries are addressed by the SHA-256 of `(object, prime, backend, tool
//! version)`. The precision is stored inside the entry: a request at lower
//! precision truncates a cached entry instead of rebuilding. Each payload
//! carries its own checksum; entries that fail to parse or verify are rebuilt.
//! If the directory cannot be created or written, the cache silently degrades
//! to an in-memory map.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::modular::{build_dictionary, Dictionary, ModularError, ModularObjectName};
use crate::ring::Ring;
use crate::sequence::{SequenceCache, SequenceError, SequenceProvenance};
use crate::series::{Series, SeriesJson};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CacheOutcome {
    Hit,
    /// Served from an entry with higher precision.
    HitTruncated,
    Built,
    /// A corrupted or unreadable entry was replaced.
    Rebuilt,
}

#[derive(Serialize, Deserialize)]
struct Entry {
    key: String,
    checksum: String,
    payload: String,
}

pub struct ArtifactCache {
    dir: Option<PathBuf>,
    tool_version: String,
    memory: Mutex<HashMap<String, String>>,
}

fn sha256_hex(s: &str) -> String {
    hex::encode(Sha256::digest(s.as_bytes()))
}

impl ArtifactCache {
    /// Disk-backed cache in `dir`, or memory-only when `dir` is `None` or unusable.
    pub fn new(dir: Option<&Path>, tool_version: &str) -> Self {
        let dir = dir.and_then(|d| fs::create_dir_all(d).ok().map(|_| d.to_path_buf()));
        Self { dir, tool_version: tool_version.to_owned(), memory: Mutex::new(HashMap::new()) }
    }

    pub fn in_memory(tool_version: &str) -> Self {
        Self::new(None, tool_version)
    }

    pub fn is_persistent(&self) -> bool {
        self.dir.is_some()
    }

    fn key(&self, object: &str, prime: u64, backend: &str) -> String {
        format!("{object}|p={prime}|{backend}|v={}", self.tool_version)
    }

    fn path(&self, key: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{}.json", sha256_hex(key))))
    }

    /// Raw payload lookup. `Err(())` marks an entry that exists but is corrupt.
    fn read(&self, key: &str) -> Result<Option<String>, ()> {
        if let Some(v) = self.memory.lock().expect("cache lock").get(key) {
            return Ok(Some(v.clone()));
        }
        let Some(path) = self.path(key) else { return Ok(None) };
        let Ok(text) = fs::read_to_string(&path) else { return Ok(None) };
        let entry: Entry = serde_json::from_str(&text).map_err(|_| ())?;
        if entry.key != key || entry.checksum != sha256_hex(&entry.payload) {
            return Err(());
        }
        Ok(Some(entry.payload))
    }

    fn write(&self, key: &str, payload: String) {
        if let Some(path) = self.path(key) {
            let entry = Entry { key: key.to_owned(), checksum: sha256_hex(&payload), payload: payload.clone() };
            let tmp = path.with_extension("tmp");
            let ok = fs::write(&tmp, serde_json::to_string(&entry).expect("entry serializes")).is_ok()
                && fs::rename(&tmp, &path).is_ok();
            if ok {
                return;
            }
        }
        self.memory.lock().expect("cache lock").insert(key.to_owned(), payload);
    }

    /// Returns the cached series for `object` at `precision`, building and
    /// storing it on a miss.
    pub fn series_get_or_build<R: Ring, E>(
        &self,
        object: &str,
        prime: u64,
        ring: &R,
        precision: i64,
        build: impl FnOnce() -> Result<Series<R>, E>,
    ) -> Result<(Series<R>, CacheOutcome), E> {
        let key = self.key(object, prime, &ring.descriptor().to_string());
        let mut corrupt = false;
        match self.read(&key) {
            Ok(Some(payload)) => {
                let parsed = serde_json::from_str::<SeriesJson>(&payload)
                    .ok()
                    .and_then(|j| Series::from_json(ring.clone(), &j).ok());
                match parsed {
                    Some(s) if s.precision() == precision => return Ok((s, CacheOutcome::Hit)),
                    Some(s) if s.precision() > precision => {
                        return Ok((s.truncated(precision), CacheOutcome::HitTruncated))
                    }
                    Some(_) => {}
                    None => corrupt = true,
                }
            }
            Ok(None) => {}
            Err(()) => corrupt = true,
        }
        let s = build()?;
        self.write(&key, serde_json::to_string(&s.to_json()).expect("series serializes"));
        Ok((s, if corrupt { CacheOutcome::Rebuilt } else { CacheOutcome::Built }))
    }

    /// Dictionary at `precision` built directly over `ring`.
    pub fn dictionary<R: Ring>(
        &self,
        prime: u64,
        precision: i64,
        ring: &R,
    ) -> Result<(Dictionary<R>, CacheOutcome), ModularError> {
        self.dictionary_with(prime, precision, ring, || build_dictionary(precision, ring.clone()))
    }

    /// Dictionary at `precision`, assembled from cached objects when all are
    /// present and produced by `build` otherwise.
    pub fn dictionary_with<R: Ring>(
        &self,
        prime: u64,
        precision: i64,
        ring: &R,
        build: impl FnOnce() -> Result<Dictionary<R>, ModularError>,
    ) -> Result<(Dictionary<R>, CacheOutcome), ModularError> {
        let backend = ring.descriptor().to_string();
        let mut objects = Vec::new();
        let mut outcome = CacheOutcome::Hit;
        for name in ModularObjectName::ALL {
            let key = self.key(&format!("dict/{name}"), prime, &backend);
            let series = match self.read(&key) {
                Ok(Some(payload)) => serde_json::from_str::<SeriesJson>(&payload)
                    .ok()
                    .and_then(|j| Series::from_json(ring.clone(), &j).ok()),
                Ok(None) => None,
                Err(()) => {
                    outcome = CacheOutcome::Rebuilt;
                    None
                }
            };
            match series {
                Some(s) if s.precision() >= precision => {
                    if s.precision() > precision && outcome == CacheOutcome::Hit {
                        outcome = CacheOutcome::HitTruncated;
                    }
                    objects.push((name, s.truncated(precision)));
                }
                // the 1/3-constant Eisenstein entry is legitimately absent over Z
                None if name == ModularObjectName::E5Chi0Chi3 && ring.inv(&ring.from_i64(3)).is_none() => {}
                _ => {
                    objects.clear();
                    break;
                }
            }
        }
        if !objects.is_empty() {
            if let Some(d) = Dictionary::from_cached(precision, objects) {
                return Ok((d, outcome));
            }
        }
        let d = build()?;
        for obj in d.objects() {
            let key = self.key(&format!("dict/{}", obj.name), prime, &backend);
            self.write(&key, serde_json::to_string(&obj.series.to_json()).expect("series serializes"));
        }
        let outcome = if outcome == CacheOutcome::Rebuilt { CacheOutcome::Rebuilt } else { CacheOutcome::Built };
        Ok((d, outcome))
    }

    /// `A_0..=A_{n_max}` and the divisor-sum tables.
    pub fn sequences(&self, n_max: usize) -> Result<(SequenceCache, CacheOutcome), SequenceError> {
        let key = self.key("sequences/recurrence", 0, "integers");
        let mut corrupt = false;
        match self.read(&key) {
            Ok(Some(payload)) => match SequenceCache::from_json(&payload) {
                Ok(mut c) if c.n_max() >= n_max => {
                    let outcome = if c.n_max() == n_max { CacheOutcome::Hit } else { CacheOutcome::HitTruncated };
                    c.a_mix.truncate(n_max + 1);
                    c.s_vals.truncate(n_max);
                    c.beta_vals.truncate(n_max);
                    c.c_mix.truncate(n_max);
                    return Ok((c, outcome));
                }
                Ok(_) => {}
                Err(_) => corrupt = true,
            },
            Ok(None) => {}
            Err(()) => corrupt = true,
        }
        let c = SequenceCache::build(n_max, SequenceProvenance::Recurrence)?;
        self.write(&key, c.to_json());
        Ok((c, if corrupt { CacheOutcome::Rebuilt } else { CacheOutcome::Built }))
    }
}
