//! Text cache of a finished BSGS, keyed by genus, mode, generator hash and seed.
//!
//! ```text
//! crosscap-bsgs 1
//! genus 7
//! mode full
//! generators <sha256 hex>
//! seed <u64>
//! certificate reached-target
//! dim 7
//! base 1 2 4
//! orbits 63 62 60
//! gen <column codes in hex>
//! ```
//! Loading re-checks the header against the request, rebuilds every orbit
//! from the stored generators and rejects the file if any size differs.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::bsgs::Bsgs;
use super::packed::PackedMatrix;
use super::{Certificate, Mode};
use crate::error::{Error, Result};

pub const CACHE_FORMAT: u32 = 1;

/// What a cache file must match before it is trusted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CacheKey {
    pub genus: usize,
    pub mode: Mode,
    pub generator_hash: String,
    pub seed: u64,
}

impl CacheKey {
    pub fn file_name(&self) -> String {
        format!(
            "bsgs-g{}-{}-{}-s{}.txt",
            self.genus,
            self.mode.as_str(),
            &self.generator_hash[..16],
            self.seed
        )
    }

    pub fn path(&self, dir: &Path) -> PathBuf {
        dir.join(self.file_name())
    }
}

/// SHA-256 over the dimension and the column codes of every generator.
pub fn generator_hash(mode: Mode, gens: &[PackedMatrix]) -> String {
    let mut h = Sha256::new();
    h.update(mode.as_str().as_bytes());
    for g in gens {
        h.update((g.dim() as u64).to_le_bytes());
        for c in g.cols() {
            h.update(c.to_le_bytes());
        }
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

pub fn render(key: &CacheKey, cert: Certificate, bsgs: &Bsgs) -> String {
    let mut s = String::new();
    let join = |v: Vec<String>| v.join(" ");
    writeln!(s, "crosscap-bsgs {CACHE_FORMAT}").unwrap();
    writeln!(s, "genus {}", key.genus).unwrap();
    writeln!(s, "mode {}", key.mode.as_str()).unwrap();
    writeln!(s, "generators {}", key.generator_hash).unwrap();
    writeln!(s, "seed {}", key.seed).unwrap();
    writeln!(s, "certificate {}", cert.as_str()).unwrap();
    writeln!(s, "dim {}", bsgs.dim()).unwrap();
    writeln!(s, "base {}", join(bsgs.base().iter().map(|p| p.to_string()).collect())).unwrap();
    writeln!(
        s,
        "orbits {}",
        join(bsgs.orbit_sizes().iter().map(|p| p.to_string()).collect())
    )
    .unwrap();
    for g in bsgs.strong_generators() {
        writeln!(s, "gen {}", join(g.cols().iter().map(|c| format!("{c:x}")).collect())).unwrap();
    }
    s
}

pub fn save(dir: &Path, key: &CacheKey, cert: Certificate, bsgs: &Bsgs) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = key.path(dir);
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, render(key, cert, bsgs))?;
    fs::rename(&tmp, &path)?;
    Ok(path)
}

fn field<'a>(lines: &mut impl Iterator<Item = &'a str>, name: &str) -> Result<&'a str> {
    let line = lines.next().ok_or_else(|| Error::Cache(format!("missing {name}")))?;
    line.strip_prefix(name)
        .and_then(|rest| rest.strip_prefix(' ').or(if rest.is_empty() { Some("") } else { None }))
        .ok_or_else(|| Error::Cache(format!("expected {name}, found {line:?}")))
}

fn numbers<T: TryFrom<u64>>(s: &str, radix16: bool) -> Result<Vec<T>> {
    s.split_whitespace()
        .map(|t| {
            let v = if radix16 {
                u64::from_str_radix(t, 16)
            } else {
                t.parse::<u64>()
            };
            v.ok()
                .and_then(|v| T::try_from(v).ok())
                .ok_or_else(|| Error::Cache(format!("bad number {t:?}")))
        })
        .collect()
}

/// Parses and re-verifies a cache file against `key`.
pub fn parse(text: &str, key: &CacheKey) -> Result<(Bsgs, Certificate)> {
    let mut lines = text.lines();
    if field(&mut lines, "crosscap-bsgs")? != CACHE_FORMAT.to_string() {
        return Err(Error::Cache("unsupported format".into()));
    }
    let genus: usize = field(&mut lines, "genus")?
        .parse()
        .map_err(|_| Error::Cache("bad genus".into()))?;
    let mode = field(&mut lines, "mode")?;
    let hash = field(&mut lines, "generators")?;
    let seed: u64 = field(&mut lines, "seed")?
        .parse()
        .map_err(|_| Error::Cache("bad seed".into()))?;
    if genus != key.genus || mode != key.mode.as_str() || hash != key.generator_hash || seed != key.seed {
        return Err(Error::Cache("header does not match the requested run".into()));
    }
    let cert =
        Certificate::parse(field(&mut lines, "certificate")?).ok_or_else(|| Error::Cache("bad certificate".into()))?;
    let n: usize = field(&mut lines, "dim")?
        .parse()
        .map_err(|_| Error::Cache("bad dim".into()))?;
    let base: Vec<u64> = numbers(field(&mut lines, "base")?, false)?;
    let orbits: Vec<usize> = numbers(field(&mut lines, "orbits")?, false)?;
    let mut gens = Vec::new();
    for line in lines {
        let body = line
            .strip_prefix("gen ")
            .ok_or_else(|| Error::Cache(format!("unexpected line {line:?}")))?;
        let cols: Vec<u64> = numbers(body, true)?;
        if cols.len() != n {
            return Err(Error::Cache("generator has the wrong dimension".into()));
        }
        gens.push(PackedMatrix::from_cols(cols));
    }
    let bsgs = Bsgs::from_parts(n, &base, gens)?;
    if bsgs.orbit_sizes() != orbits {
        return Err(Error::Cache(
            "recomputed orbit sizes differ from the stored ones".into(),
        ));
    }
    Ok((bsgs, cert))
}

/// Loads a cache entry if one exists. A present but invalid file is an error.
pub fn load(dir: &Path, key: &CacheKey) -> Result<Option<(Bsgs, Certificate)>> {
    let path = key.path(dir);
    if !path.exists() {
        return Ok(None);
    }
    let text = fs::read_to_string(&path)?;
    parse(&text, key).map(Some)
}
