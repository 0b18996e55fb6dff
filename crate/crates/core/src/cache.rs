//! On-disk cache of Gram blocks, one JSON file per (datum, multidegree).
//!
//! Writes go to a temporary file in the cache directory and are renamed into
//! place, so readers only ever see complete records and concurrent writers of
//! the same key race harmlessly (both produce identical bytes).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

use crate::cartan::CartanDatum;
use crate::error::{Error, Result};
use crate::freebraided::Multidegree;
use crate::pairing::{GramBlock, GramRecord};

/// Bumped whenever the record layout or the elimination order changes.
pub const CACHE_FORMAT_VERSION: u32 = 1;

/// Environment variable naming the cache directory.
pub const CACHE_DIR_ENV: &str = "QBOSON_CACHE_DIR";

#[derive(Serialize, Deserialize)]
struct CacheFile {
    format: u32,
    engine: String,
    datum_digest: String,
    block: GramRecord,
}

#[derive(Clone, Debug)]
pub struct GramCache {
    dir: PathBuf,
}

static TMP_COUNTER: AtomicU64 = AtomicU64::new(0);

impl GramCache {
    pub fn new(dir: impl Into<PathBuf>) -> Result<GramCache> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(GramCache { dir })
    }

    /// Cache rooted at `$QBOSON_CACHE_DIR`, if set and non-empty.
    pub fn from_env() -> Result<Option<GramCache>> {
        match std::env::var_os(CACHE_DIR_ENV) {
            Some(v) if !v.is_empty() => GramCache::new(PathBuf::from(v)).map(Some),
            _ => Ok(None),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path_for(&self, digest: &str, alpha: &Multidegree) -> PathBuf {
        let deg: Vec<String> = alpha.0.iter().map(|x| x.to_string()).collect();
        let name = format!("gram-v{}-{}-{}.json", CACHE_FORMAT_VERSION, &digest[..16], deg.join("_"));
        self.dir.join(name)
    }

    /// A stale, foreign or corrupt record is treated as a miss.
    pub fn load(&self, d: &CartanDatum, alpha: &Multidegree) -> Option<GramBlock> {
        let digest = d.digest();
        let text = fs::read_to_string(self.path_for(&digest, alpha)).ok()?;
        let file: CacheFile = serde_json::from_str(&text).ok()?;
        if file.format != CACHE_FORMAT_VERSION
            || file.engine != env!("CARGO_PKG_VERSION")
            || file.datum_digest != digest
            || &file.block.alpha != alpha
        {
            return None;
        }
        file.block.into_block(d).ok()
    }

    pub fn store(&self, d: &CartanDatum, block: &GramBlock) -> Result<()> {
        let digest = d.digest();
        let file = CacheFile {
            format: CACHE_FORMAT_VERSION,
            engine: env!("CARGO_PKG_VERSION").to_string(),
            datum_digest: digest.clone(),
            block: GramRecord::from_block(block),
        };
        let bytes = serde_json::to_vec(&file)?;
        let target = self.path_for(&digest, &block.alpha);
        let tmp = self.dir.join(format!(
            ".tmp-{}-{}",
            std::process::id(),
            TMP_COUNTER.fetch_add(1, Ordering::Relaxed)
        ));
        let mut f = fs::File::create(&tmp)?;
        f.write_all(&bytes)?;
        f.sync_all()?;
        drop(f);
        fs::rename(&tmp, &target).map_err(|e| {
            let _ = fs::remove_file(&tmp);
            Error::Cache(format!("cannot publish {}: {e}", target.display()))
        })
    }
}
