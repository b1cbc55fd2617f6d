//! Layered settings: command-line flags, then a `key = value` config file,
//! then built-in defaults.

use std::collections::HashMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use hcf_core::{Error, Result};

const KEYS: &[&str] = &[
    "k", "L", "region", "base", "method", "fill", "smoothing", "iters", "workers", "seed", "n",
    "format", "grids", "steps", "samples", "depth",
];

pub const MIN_K: u32 = 5;
pub const MAX_K: u32 = 16;
pub const MAX_L: usize = 12;

#[derive(Debug, Default)]
pub struct Settings {
    values: HashMap<String, String>,
}

impl Settings {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut values = HashMap::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", no + 1)))?;
            let key = key.trim();
            if !KEYS.contains(&key) {
                return Err(Error::Config(format!("line {}: unknown key {key:?}", no + 1)));
            }
            values.insert(key.to_string(), value.trim().to_string());
        }
        Ok(Self { values })
    }

    /// Flag if given, else config file entry, else `None`.
    pub fn get<T>(&self, key: &str, flag: Option<T>) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        self.values
            .get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|e| Error::Config(format!("config key {key}: {e}")))
            })
            .transpose()
    }

    pub fn get_or<T>(&self, key: &str, flag: Option<T>, default: T) -> Result<T>
    where
        T: FromStr,
        T::Err: Display,
    {
        Ok(self.get(key, flag)?.unwrap_or(default))
    }
}

/// Resolution list: `7`, `7..10` (inclusive) or `7,9,11`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KList(pub Vec<u32>);

impl FromStr for KList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let num = |t: &str| {
            t.trim()
                .parse::<u32>()
                .map_err(|_| format!("bad resolution {t:?}"))
        };
        let ks: Vec<u32> = if let Some((lo, hi)) = s.split_once("..") {
            let (lo, hi) = (num(lo)?, num(hi.trim_start_matches('='))?);
            if lo > hi {
                return Err(format!("empty range {s:?}"));
            }
            (lo..=hi).collect()
        } else {
            s.split(',').map(num).collect::<Result<_, _>>()?
        };
        if let Some(k) = ks.iter().find(|k| !(MIN_K..=MAX_K).contains(k)) {
            return Err(format!("k = {k} outside {MIN_K}..={MAX_K}"));
        }
        Ok(KList(ks))
    }
}

/// `x,y` pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Base(pub f64, pub f64);

impl FromStr for Base {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (x, y) = s
            .split_once(',')
            .ok_or_else(|| format!("expected x,y, got {s:?}"))?;
        let p = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("bad number {t:?}"));
        Ok(Base(p(x)?, p(y)?))
    }
}

/// Iteration counts; accepts `1e6` style.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Count(pub u64);

impl FromStr for Count {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim().replace('_', "");
        if let Ok(v) = s.parse::<u64>() {
            return Ok(Count(v));
        }
        match s.parse::<f64>() {
            Ok(v) if v >= 0.0 && v.fract() == 0.0 && v <= u64::MAX as f64 => Ok(Count(v as u64)),
            _ => Err(format!("bad count {s:?}")),
        }
    }
}

pub fn check_k(k: u32) -> Result<u32> {
    if (MIN_K..=MAX_K).contains(&k) {
        Ok(k)
    } else {
        Err(Error::Config(format!("k = {k} outside {MIN_K}..={MAX_K}")))
    }
}

pub fn check_l(l: usize) -> Result<usize> {
    if l <= MAX_L {
        Ok(l)
    } else {
        Err(Error::Config(format!("L = {l} exceeds {MAX_L}")))
    }
}
