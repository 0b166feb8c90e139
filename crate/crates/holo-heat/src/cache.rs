//! On-disk cache of propagator samples.
//!
//! File layout (little endian): magic `HOLOPC`, `u16` version, `u32` complex
//! dimension `n`, then records of `4n` `i64` quantised coordinates of
//! `(z, w)`, `2·d` `u32` derivative entries and `n` coefficient pairs
//! `(re, im)` as `f64`. Writes go to a temporary file that is renamed into
//! place, so readers only ever see complete files.

use std::collections::BTreeMap;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::sync::RwLock;

use num_complex::Complex64;

use crate::{HeatError, LegDerivs};

const MAGIC: &[u8; 6] = b"HOLOPC";
const VERSION: u16 = 1;
/// Quantisation step for cached coordinates.
pub const QUANTUM: f64 = 1e-12;

type Key = (Vec<i64>, Vec<u32>);

#[derive(Debug)]
pub struct PropagatorCache {
    path: PathBuf,
    n: usize,
    entries: RwLock<BTreeMap<Key, Vec<Complex64>>>,
}

fn quantise(x: &[f64]) -> Vec<i64> {
    x.iter().map(|v| (v / QUANTUM).round() as i64).collect()
}

fn io(e: std::io::Error) -> HeatError {
    HeatError::Io(e.to_string())
}

impl PropagatorCache {
    /// Opens (or starts) the cache file for a kernel fingerprint in `dir`.
    pub fn open(dir: &Path, fingerprint: &str, n: usize) -> Result<Self, HeatError> {
        fs::create_dir_all(dir).map_err(io)?;
        let path = dir.join(format!("{fingerprint}.bin"));
        let cache = Self { path, n, entries: RwLock::new(BTreeMap::new()) };
        if cache.path.exists() {
            cache.load()?;
        }
        Ok(cache)
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    fn key(&self, z: &[f64], w: &[f64], d: &LegDerivs) -> Key {
        let mut q = quantise(z);
        q.extend(quantise(w));
        let mut dv: Vec<u32> = (0..self.n).map(|j| d.head.get(j).copied().unwrap_or(0)).collect();
        dv.extend((0..self.n).map(|j| d.tail.get(j).copied().unwrap_or(0)));
        (q, dv)
    }

    pub fn get(&self, z: &[f64], w: &[f64], d: &LegDerivs) -> Option<Vec<Complex64>> {
        self.entries.read().ok()?.get(&self.key(z, w, d)).cloned()
    }

    pub fn insert(&self, z: &[f64], w: &[f64], d: &LegDerivs, coeffs: Vec<Complex64>) {
        let k = self.key(z, w, d);
        if let Ok(mut m) = self.entries.write() {
            m.entry(k).or_insert(coeffs);
        }
    }

    pub fn len(&self) -> usize {
        self.entries.read().map(|m| m.len()).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Writes all entries atomically.
    pub fn flush(&self) -> Result<(), HeatError> {
        let m = self.entries.read().map_err(|_| HeatError::Io("cache lock poisoned".into()))?;
        let mut buf = Vec::new();
        buf.extend_from_slice(MAGIC);
        buf.extend_from_slice(&VERSION.to_le_bytes());
        buf.extend_from_slice(&(self.n as u32).to_le_bytes());
        for ((q, d), c) in m.iter() {
            for v in q {
                buf.extend_from_slice(&v.to_le_bytes());
            }
            for v in d {
                buf.extend_from_slice(&v.to_le_bytes());
            }
            for v in c {
                buf.extend_from_slice(&v.re.to_le_bytes());
                buf.extend_from_slice(&v.im.to_le_bytes());
            }
        }
        let tmp = self.path.with_extension(format!("tmp{}", std::process::id()));
        let mut f = fs::File::create(&tmp).map_err(io)?;
        f.write_all(&buf).map_err(io)?;
        f.sync_all().map_err(io)?;
        fs::rename(&tmp, &self.path).map_err(io)
    }

    fn load(&self) -> Result<(), HeatError> {
        let mut buf = Vec::new();
        fs::File::open(&self.path).map_err(io)?.read_to_end(&mut buf).map_err(io)?;
        let bad = |m: &str| HeatError::Io(format!("{}: {m}", self.path.display()));
        if buf.len() < 12 || &buf[..6] != MAGIC {
            return Err(bad("not a propagator cache"));
        }
        let version = u16::from_le_bytes([buf[6], buf[7]]);
        if version != VERSION {
            return Err(bad(&format!("unsupported version {version}")));
        }
        let n = u32::from_le_bytes(buf[8..12].try_into().unwrap()) as usize;
        if n != self.n {
            return Err(bad(&format!("dimension {n}, expected {}", self.n)));
        }
        let rec = 4 * n * 8 + 2 * n * 4 + n * 16;
        let body = &buf[12..];
        if body.len() % rec != 0 {
            return Err(bad("truncated record"));
        }
        let mut m = self.entries.write().map_err(|_| bad("lock poisoned"))?;
        for r in body.chunks_exact(rec) {
            let mut off = 0;
            let mut take = |k: usize| {
                let s = &r[off..off + k];
                off += k;
                s
            };
            let q: Vec<i64> = (0..4 * n).map(|_| i64::from_le_bytes(take(8).try_into().unwrap())).collect();
            let d: Vec<u32> = (0..2 * n).map(|_| u32::from_le_bytes(take(4).try_into().unwrap())).collect();
            let c: Vec<Complex64> = (0..n)
                .map(|_| {
                    let re = f64::from_le_bytes(take(8).try_into().unwrap());
                    let im = f64::from_le_bytes(take(8).try_into().unwrap());
                    Complex64::new(re, im)
                })
                .collect();
            m.insert((q, d), c);
        }
        Ok(())
    }
}
