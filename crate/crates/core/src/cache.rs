//! On-disk cache of exact operators.
//!
//! One JSON file per operator:
//! `{version, N, L, name, dim, entries: [[row, col, ["num/den", ...]], ...]}`
//! with entries in row-major order, so identical operators serialize to
//! identical bytes.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::cyclotomic::{CoeffText, Cyclotomic};
use crate::error::{Error, Result};
use crate::sparse::SparseOp;
use crate::state::LatticeConfig;

pub const CACHE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Serialize, Deserialize)]
struct CacheFile<C> {
    version: String,
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "L")]
    l: usize,
    name: String,
    dim: usize,
    entries: Vec<(usize, usize, C)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CacheOutcome {
    Hit,
    Built,
    /// The stored file was unreadable or stale and has been replaced.
    Rebuilt(String),
}

#[derive(Clone, Debug)]
pub struct OperatorCache {
    dir: PathBuf,
}

impl OperatorCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        OperatorCache { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path(&self, cfg: &LatticeConfig, name: &str) -> PathBuf {
        let safe: String = name
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
            .collect();
        self.dir.join(format!("N{}_L{}_{safe}.json", cfg.n, cfg.l))
    }

    pub fn store<T: CoeffText, const N: usize>(
        &self,
        cfg: &LatticeConfig,
        name: &str,
        op: &SparseOp<Cyclotomic<T, N>>,
    ) -> Result<PathBuf> {
        fs::create_dir_all(&self.dir)?;
        let file = CacheFile {
            version: CACHE_VERSION.to_string(),
            n: cfg.n,
            l: cfg.l,
            name: name.to_string(),
            dim: op.dim(),
            entries: op.entries_row_major(),
        };
        let path = self.path(cfg, name);
        let tmp = path.with_extension("json.tmp");
        fs::write(&tmp, serde_json::to_vec(&file)?)?;
        fs::rename(&tmp, &path)?;
        Ok(path)
    }

    /// `Ok(None)` when nothing is stored; an error when the file exists but
    /// is corrupt or was written for a different key.
    pub fn load<T: CoeffText, const N: usize>(
        &self,
        cfg: &LatticeConfig,
        name: &str,
    ) -> Result<Option<SparseOp<Cyclotomic<T, N>>>> {
        let path = self.path(cfg, name);
        let bytes = match fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        let file: CacheFile<Cyclotomic<T, N>> =
            serde_json::from_slice(&bytes).map_err(|e| Error::Cache(format!("{}: {e}", path.display())))?;
        if file.version != CACHE_VERSION || file.n != cfg.n || file.l != cfg.l || file.name != name {
            return Err(Error::Cache(format!(
                "{}: key ({}, N={}, L={}, {}) does not match",
                path.display(),
                file.version,
                file.n,
                file.l,
                file.name
            )));
        }
        SparseOp::from_triplets(file.dim, file.entries)
            .map(Some)
            .map_err(|e| Error::Cache(format!("{}: {e}", path.display())))
    }

    pub fn get_or_build<T: CoeffText, const N: usize>(
        &self,
        cfg: &LatticeConfig,
        name: &str,
        build: impl FnOnce() -> Result<SparseOp<Cyclotomic<T, N>>>,
    ) -> Result<(SparseOp<Cyclotomic<T, N>>, CacheOutcome)> {
        let outcome = match self.load::<T, N>(cfg, name) {
            Ok(Some(op)) => return Ok((op, CacheOutcome::Hit)),
            Ok(None) => CacheOutcome::Built,
            Err(e) => CacheOutcome::Rebuilt(e.to_string()),
        };
        let op = build()?;
        self.store(cfg, name, &op)?;
        Ok((op, outcome))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divided::{divided_power, GenLabel};
    use crate::Cyclo;
    use num_rational::BigRational;

    #[test]
    fn round_trip_and_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let cache = OperatorCache::new(dir.path());
        let cfg = LatticeConfig::new(3, 3, 0).unwrap();
        let op = divided_power::<BigRational, 3>(GenLabel::X1Minus, 1, &cfg).unwrap();

        let (_, first) = cache.get_or_build(&cfg, "x1minus", || Ok(op.clone())).unwrap();
        assert_eq!(first, CacheOutcome::Built);
        let bytes = fs::read(cache.path(&cfg, "x1minus")).unwrap();
        let (back, second) = cache.get_or_build::<BigRational, 3>(&cfg, "x1minus", || unreachable!()).unwrap();
        assert_eq!(second, CacheOutcome::Hit);
        assert_eq!(back, op);

        cache.store(&cfg, "x1minus", &back).unwrap();
        assert_eq!(fs::read(cache.path(&cfg, "x1minus")).unwrap(), bytes);

        fs::write(cache.path(&cfg, "x1minus"), b"{not json").unwrap();
        let (again, third) = cache.get_or_build(&cfg, "x1minus", || Ok(op.clone())).unwrap();
        assert!(matches!(third, CacheOutcome::Rebuilt(_)));
        assert_eq!(again, op);
    }

    #[test]
    fn key_mismatch_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let cache = OperatorCache::new(dir.path());
        let cfg = LatticeConfig::new(3, 3, 0).unwrap();
        let id = SparseOp::<Cyclo<3>>::identity(cfg.dim());
        cache.store(&cfg, "id", &id).unwrap();
        let other = LatticeConfig::new(3, 3, 0).unwrap();
        fs::rename(cache.path(&cfg, "id"), cache.path(&other, "other")).unwrap();
        assert!(cache.load::<BigRational, 3>(&other, "other").is_err());
    }
}
