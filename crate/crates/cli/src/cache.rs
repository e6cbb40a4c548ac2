//! Optional on-disk cache of covering data and factorizations.
//!
//! One JSON file per key. Writes go to a temporary file that is renamed
//! into place, so concurrent processes never observe partial files. A file
//! that fails to parse is a miss.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{SystemTime, UNIX_EPOCH};

use ntlab::arith::Factorization;
use ntlab::coverings::CoveringSpec;
use ntlab::BigInt;
use serde_json::{json, Value};

static COUNTER: AtomicU64 = AtomicU64::new(0);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CacheState {
    Off,
    Hit,
    Miss,
}

impl CacheState {
    pub fn label(self) -> &'static str {
        match self {
            CacheState::Off => "off",
            CacheState::Hit => "hit",
            CacheState::Miss => "miss",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Cache {
    dir: Option<PathBuf>,
}

impl Cache {
    pub fn new(dir: Option<PathBuf>) -> Self {
        Cache { dir }
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    fn path(&self, key: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{key}.json")))
    }

    pub fn get(&self, key: &str) -> Option<Value> {
        let text = fs::read_to_string(self.path(key)?).ok()?;
        serde_json::from_str(&text).ok()
    }

    /// Best effort: a failed write leaves the cache unchanged.
    pub fn put(&self, key: &str, value: &Value) -> std::io::Result<()> {
        let (Some(dir), Some(target)) = (&self.dir, self.path(key)) else { return Ok(()) };
        fs::create_dir_all(dir)?;
        let nanos = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_nanos()).unwrap_or(0);
        let tmp = dir.join(format!(
            ".{key}.{}.{}.{nanos}.tmp",
            std::process::id(),
            COUNTER.fetch_add(1, Ordering::Relaxed)
        ));
        fs::write(&tmp, value.to_string())?;
        fs::rename(&tmp, &target).inspect_err(|_| {
            let _ = fs::remove_file(&tmp);
        })
    }

    pub fn covering(&self, triple: (i64, i64, i64), build: impl FnOnce() -> ntlab::Result<CoveringSpec>) -> ntlab::Result<(CoveringSpec, CacheState)> {
        if self.dir.is_none() {
            return Ok((build()?, CacheState::Off));
        }
        let key = format!("covering_{}_{}_{}", triple.0, triple.1, triple.2).replace('-', "m");
        if let Some(spec) = self.get(&key).and_then(|v| CoveringSpec::from_json(&v).ok()) {
            let k = spec.field;
            if (k.d1, k.d2, k.d3) == triple {
                return Ok((spec, CacheState::Hit));
            }
        }
        let spec = build()?;
        if let Err(e) = self.put(&key, &spec.to_json()) {
            eprintln!("warning: cache write failed: {e}");
        }
        Ok((spec, CacheState::Miss))
    }

    pub fn factorization(&self, n: &BigInt, build: impl FnOnce() -> ntlab::Result<Factorization>) -> ntlab::Result<Factorization> {
        if self.dir.is_none() {
            return build();
        }
        let key = format!("factor_{n}").replace('-', "m");
        if let Some(f) = self.get(&key).and_then(|v| factorization_from_json(&v)) {
            if &f.value() == n && f.factors.keys().all(ntlab::arith::is_prime) {
                return Ok(f);
            }
        }
        let f = build()?;
        if let Err(e) = self.put(&key, &factorization_to_json(&f)) {
            eprintln!("warning: cache write failed: {e}");
        }
        Ok(f)
    }
}

pub fn factorization_to_json(f: &Factorization) -> Value {
    let factors: Vec<Value> = f.factors.iter().map(|(p, e)| json!([p.to_string(), e])).collect();
    json!({ "factors": factors, "sign": f.sign })
}

fn factorization_from_json(v: &Value) -> Option<Factorization> {
    let sign = v["sign"].as_i64()?;
    if sign != 1 && sign != -1 {
        return None;
    }
    let mut factors = std::collections::BTreeMap::new();
    for item in v["factors"].as_array()? {
        let p: BigInt = item.get(0)?.as_str()?.parse().ok()?;
        let e = u32::try_from(item.get(1)?.as_u64()?).ok()?;
        factors.insert(p, e);
    }
    Some(Factorization { sign: sign as i8, factors })
}
