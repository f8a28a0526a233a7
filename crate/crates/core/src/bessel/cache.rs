//! Persistent, append-only store of computed zeros.
//!
//! One text file per kind (`zeros-J.txt`, `zeros-JP.txt`) in the cache
//! directory. Format:
//!
//! ```text
//! weylzeros v1
//! J,0,1,2.4048255576957729e0
//! J,0,2,5.5200781102863106e0
//! ```
//!
//! Values are written with 17 significant digits, which round-trips every
//! `f64` exactly. Lines are strictly sorted by `(kind, n, k)`. Saving writes a
//! temporary file in the same directory and renames it over the old one.

use super::zeros::{self, target, BesselZero, ZeroKind};
use crate::error::{Result, WeylError};
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::RwLock;

pub const CACHE_VERSION: u32 = 1;
pub const CACHE_HEADER: &str = "weylzeros v1";
pub const CACHE_ENV: &str = "WEYL_CACHE_DIR";
pub const DEFAULT_CACHE_DIR: &str = ".weyl-cache";

type Table = BTreeMap<(u32, u32), f64>;

/// Zero cache shared by the counting code. Readers run concurrently; inserts
/// take a short write lock.
#[derive(Debug)]
pub struct ZeroCache {
    dir: Option<PathBuf>,
    tables: [RwLock<Table>; 2],
    dirty: [AtomicBool; 2],
}

fn slot(kind: ZeroKind) -> usize {
    match kind {
        ZeroKind::J => 0,
        ZeroKind::JPrime => 1,
    }
}

const KINDS: [ZeroKind; 2] = [ZeroKind::J, ZeroKind::JPrime];

impl Default for ZeroCache {
    fn default() -> Self {
        Self::in_memory()
    }
}

impl ZeroCache {
    /// Cache that is never written to disk.
    pub fn in_memory() -> Self {
        ZeroCache {
            dir: None,
            tables: [RwLock::new(Table::new()), RwLock::new(Table::new())],
            dirty: [AtomicBool::new(false), AtomicBool::new(false)],
        }
    }

    /// Open (and load, if present) the cache stored in `dir`.
    pub fn open(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref().to_path_buf();
        let cache = ZeroCache { dir: Some(dir.clone()), ..Self::in_memory() };
        for kind in KINDS {
            let path = file_path(&dir, kind);
            if path.exists() {
                let file = fs::File::open(&path)?;
                let table = parse(BufReader::new(file), kind)
                    .map_err(|e| WeylError::Cache(format!("{}: {e}", path.display())))?;
                *cache.tables[slot(kind)].write().expect("cache lock") = table;
            }
        }
        Ok(cache)
    }

    /// Directory from `WEYL_CACHE_DIR`, else `.weyl-cache`.
    pub fn default_dir() -> PathBuf {
        std::env::var_os(CACHE_ENV)
            .filter(|v| !v.is_empty())
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from(DEFAULT_CACHE_DIR))
    }

    pub fn from_env() -> Result<Self> {
        Self::open(Self::default_dir())
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    pub fn version(&self) -> u32 {
        CACHE_VERSION
    }

    pub fn len(&self, kind: ZeroKind) -> usize {
        self.tables[slot(kind)].read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        KINDS.iter().all(|&k| self.len(k) == 0)
    }

    fn lookup(&self, n: u32, k: u32, kind: ZeroKind) -> Option<f64> {
        self.tables[slot(kind)].read().expect("cache lock").get(&(n, k)).copied()
    }

    fn insert(&self, n: u32, k: u32, kind: ZeroKind, value: f64) {
        let mut t = self.tables[slot(kind)].write().expect("cache lock");
        if t.insert((n, k), value).is_none() {
            self.dirty[slot(kind)].store(true, Ordering::Relaxed);
        }
    }

    /// Value of zero `k` of order `n`, computed on a miss.
    pub fn zero_value(&self, n: u32, k: u32, kind: ZeroKind) -> Result<f64> {
        if let Some(v) = self.lookup(n, k, kind) {
            return Ok(v);
        }
        let z = zeros::zero(n, k, kind)?;
        self.insert(n, k, kind, z.value);
        Ok(z.value)
    }

    /// Zero `k` of order `n` with its residual.
    pub fn zero(&self, n: u32, k: u32, kind: ZeroKind) -> Result<BesselZero> {
        if let Some(value) = self.lookup(n, k, kind) {
            return with_residual(n, k, kind, value);
        }
        let z = zeros::zero(n, k, kind)?;
        self.insert(n, k, kind, z.value);
        Ok(z)
    }

    /// Number of zeros of order `n` strictly below `mu`.
    pub fn count_zeros_below(&self, n: u32, mu: f64, kind: ZeroKind) -> Result<u64> {
        zeros::count_with(n, mu, kind, |k| self.zero_value(n, k, kind))
    }

    /// Zero values of order `n` below `mu`, from the cache where possible.
    pub fn zeros_below(&self, n: u32, mu: f64, kind: ZeroKind) -> Result<Vec<f64>> {
        let count = self.count_zeros_below(n, mu, kind)?;
        if count == 0 {
            return Ok(Vec::new());
        }
        let cached: Vec<f64> = {
            let t = self.tables[slot(kind)].read().expect("cache lock");
            t.range((n, 1)..=(n, count as u32)).map(|(_, &v)| v).collect()
        };
        if cached.len() as u64 == count {
            return Ok(cached);
        }
        let fresh = zeros::zeros_below(n, mu, kind)?;
        let mut t = self.tables[slot(kind)].write().expect("cache lock");
        for z in &fresh {
            if t.insert((n, z.k), z.value).is_none() {
                self.dirty[slot(kind)].store(true, Ordering::Relaxed);
            }
        }
        Ok(fresh.iter().map(|z| z.value).collect())
    }

    /// All cached `(n, k, value)` triples of a kind, sorted.
    pub fn values(&self, kind: ZeroKind) -> Vec<(u32, u32, f64)> {
        let t = self.tables[slot(kind)].read().expect("cache lock");
        t.iter().map(|(&(n, k), &v)| (n, k, v)).collect()
    }

    /// All cached zeros of a kind with freshly computed residuals, sorted.
    pub fn entries(&self, kind: ZeroKind) -> Result<Vec<BesselZero>> {
        self.values(kind)
            .into_par_iter()
            .map(|(n, k, v)| with_residual(n, k, kind, v))
            .collect()
    }

    /// Violations of `j_{n,k} < j_{n+1,k} < j_{n,k+1}` among cached triples.
    ///
    /// For `J'` the order-0 row holds only positive zeros, so `j'_{0,k}` takes
    /// the place of index `k + 1` (the zero at the origin being index 1).
    /// Reported pairs use the cache's own `(n, k)` numbering.
    pub fn interlacing_violations(&self, kind: ZeroKind) -> Vec<(u32, u32)> {
        let shifted = |n: u32| u32::from(kind == ZeroKind::JPrime && n == 0);
        let t: BTreeMap<(u32, u32), f64> = self.tables[slot(kind)]
            .read()
            .expect("cache lock")
            .iter()
            .map(|(&(n, k), &v)| ((n, k + shifted(n)), v))
            .collect();
        let mut bad = Vec::new();
        for (&(n, k), &v) in t.iter() {
            let k_own = k - shifted(n);
            if let Some(&up) = t.get(&(n + 1, k)) {
                if !(v < up) {
                    bad.push((n, k_own));
                    continue;
                }
                if let Some(&next) = t.get(&(n, k + 1)) {
                    if !(up < next) {
                        bad.push((n, k_own));
                        continue;
                    }
                }
            }
            if let Some(&next) = t.get(&(n, k + 1)) {
                if !(v < next) {
                    bad.push((n, k_own));
                }
            }
        }
        bad
    }

    /// Write dirty tables to disk. No-op for an in-memory cache.
    pub fn save(&self) -> Result<()> {
        let Some(dir) = &self.dir else { return Ok(()) };
        for kind in KINDS {
            if !self.dirty[slot(kind)].load(Ordering::Relaxed) {
                continue;
            }
            fs::create_dir_all(dir)?;
            let path = file_path(dir, kind);
            let tmp = dir.join(format!(".zeros-{}.{}.tmp", kind.tag(), std::process::id()));
            {
                let t = self.tables[slot(kind)].read().expect("cache lock");
                let mut w = std::io::BufWriter::new(fs::File::create(&tmp)?);
                write_table(&mut w, kind, &t)?;
                w.into_inner().map_err(|e| WeylError::Cache(e.to_string()))?.sync_all()?;
            }
            fs::rename(&tmp, &path)?;
            self.dirty[slot(kind)].store(false, Ordering::Relaxed);
        }
        Ok(())
    }
}

fn with_residual(n: u32, k: u32, kind: ZeroKind, value: f64) -> Result<BesselZero> {
    let (f, _) = target(n, value, kind)?;
    Ok(BesselZero { n, k, kind, value, residual: f.abs() })
}

pub fn file_path(dir: &Path, kind: ZeroKind) -> PathBuf {
    dir.join(format!("zeros-{}.txt", kind.tag()))
}

/// Write a table in the cache file format.
pub fn write_table<W: Write>(w: &mut W, kind: ZeroKind, table: &BTreeMap<(u32, u32), f64>) -> Result<()> {
    writeln!(w, "{CACHE_HEADER}")?;
    for (&(n, k), &v) in table {
        writeln!(w, "{},{n},{k},{v:.16e}", kind.tag())?;
    }
    Ok(())
}

/// Parse a cache file, checking the header, kind tags and strict ordering.
pub fn parse<R: BufRead>(r: R, kind: ZeroKind) -> std::result::Result<BTreeMap<(u32, u32), f64>, String> {
    let mut lines = r.lines();
    match lines.next() {
        Some(Ok(h)) if h.trim_end() == CACHE_HEADER => {}
        Some(Ok(h)) => return Err(format!("bad header {h:?}")),
        Some(Err(e)) => return Err(e.to_string()),
        None => return Err("empty file".into()),
    }
    let mut table = BTreeMap::new();
    let mut prev: Option<(u32, u32)> = None;
    for (i, line) in lines.enumerate() {
        let line = line.map_err(|e| e.to_string())?;
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        let bad = || format!("line {}: malformed entry {line:?}", i + 2);
        let mut f = line.split(',');
        let (Some(tag), Some(n), Some(k), Some(v), None) = (f.next(), f.next(), f.next(), f.next(), f.next())
        else {
            return Err(bad());
        };
        if ZeroKind::from_tag(tag) != Some(kind) {
            return Err(format!("line {}: kind {tag:?} in {} file", i + 2, kind.tag()));
        }
        let n: u32 = n.parse().map_err(|_| bad())?;
        let k: u32 = k.parse().map_err(|_| bad())?;
        let v: f64 = v.parse().map_err(|_| bad())?;
        if k == 0 || !(v > 0.0) || !v.is_finite() {
            return Err(bad());
        }
        if prev.is_some_and(|p| p >= (n, k)) {
            return Err(format!("line {}: entries not strictly sorted", i + 2));
        }
        prev = Some((n, k));
        table.insert((n, k), v);
    }
    Ok(table)
}
