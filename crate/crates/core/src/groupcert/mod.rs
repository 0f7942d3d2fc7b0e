//! Order certification for groups of isometries.
//!
//! The group acts on the nonzero vectors of its module (the full homology, or
//! the symplectic quotient). A randomized Schreier–Sims run with a fixed seed
//! builds a base and strong generating set. The product of basic orbit sizes
//! is always the order of a subgroup of the generated group, so reaching the
//! known order of the ambient image group certifies generation.

mod bsgs;
pub mod cache;
mod closure;
mod packed;

use std::path::PathBuf;

use num_bigint::BigUint;
use num_traits::One;
use serde::Serialize;

pub use bsgs::Bsgs;
pub use closure::{brute_force_closure, Closure, MAX_CLOSURE_DIM};
pub use packed::{ApplyTable, PackedMatrix};

use crate::error::{Error, Result};
use crate::gf2::GF2Matrix;
use crate::surface::{quotient_action, GenusConfig};
use bsgs::RandomElements;
use cache::CacheKey;

/// Fixed default seed for randomized runs.
pub const DEFAULT_SEED: u64 = 0x5eed_0019;

/// Largest degree at which a missed target is followed by full verification.
pub const VERIFY_DEGREE_LIMIT: u64 = 1 << 20;

/// Degree above which orbit tables need an explicit override.
pub const GUARD_DEGREE: u64 = 1 << 27;

/// Estimated table memory above which an explicit override is needed.
pub const GUARD_BYTES: u64 = 1 << 30;

/// Consecutive trivially-sifting random elements that end the random phase.
const QUIET_SIFTS: usize = 48;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Full,
    Quotient,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Full => "full",
            Mode::Quotient => "quotient",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "full" => Some(Mode::Full),
            "quotient" => Some(Mode::Quotient),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Certificate {
    /// Deterministic Schreier–Sims verification completed.
    Proved,
    /// The computed order equals the supplied target.
    ReachedTarget,
    /// The computed order is smaller than the target.
    BelowTarget,
}

impl Certificate {
    pub fn as_str(&self) -> &'static str {
        match self {
            Certificate::Proved => "proved",
            Certificate::ReachedTarget => "reached-target",
            Certificate::BelowTarget => "below-target",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "proved" => Some(Certificate::Proved),
            "reached-target" => Some(Certificate::ReachedTarget),
            "below-target" => Some(Certificate::BelowTarget),
            _ => None,
        }
    }

    pub fn is_success(&self) -> bool {
        !matches!(self, Certificate::BelowTarget)
    }
}

/// `|Sp(2n, 2)| = 2^{n^2} prod_{i=1..n} (4^i - 1)`.
pub fn sp_order(n: usize) -> BigUint {
    let mut acc = BigUint::one() << (n * n);
    for i in 1..=n {
        acc *= (BigUint::one() << (2 * i)) - BigUint::one();
    }
    acc
}

/// Order of the full isometry group of the mod-2 pairing.
pub fn expected_order(cfg: &GenusConfig) -> BigUint {
    let h = cfg.h();
    if cfg.is_even() {
        sp_order(h) << (2 * h + 1)
    } else {
        sp_order(h)
    }
}

/// Order of the image in the symplectic quotient.
pub fn expected_quotient_order(cfg: &GenusConfig) -> BigUint {
    sp_order(cfg.h())
}

pub fn expected_for(cfg: &GenusConfig, mode: Mode) -> BigUint {
    match mode {
        Mode::Full => expected_order(cfg),
        Mode::Quotient => expected_quotient_order(cfg),
    }
}

/// The matrices the group acts by in the chosen mode.
pub fn action_matrices(gens: &[GF2Matrix], cfg: &GenusConfig, mode: Mode) -> Result<Vec<GF2Matrix>> {
    match mode {
        Mode::Full => {
            for g in gens {
                if g.rows() != cfg.genus() || !g.preserves_form(&cfg.gram())? {
                    return Err(Error::NotAnIsometry);
                }
            }
            Ok(gens.to_vec())
        }
        Mode::Quotient => gens.iter().map(|g| quotient_action(cfg, g)).collect(),
    }
}

/// Breadth-first orbit of `start` with its Schreier vector.
#[derive(Clone, Debug)]
pub struct Orbit {
    gens: Vec<PackedMatrix>,
    inverses: Vec<PackedMatrix>,
    start: u64,
    points: Vec<u64>,
    /// `labels[p] = k + 1` when `p` was reached by generator `k`.
    labels: Vec<u8>,
}

impl Orbit {
    pub fn points(&self) -> &[u64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: u64) -> bool {
        p == self.start || self.labels.get(p as usize).is_some_and(|&l| l != 0)
    }

    /// Generator index that first reached `p`, or `None` for the start point.
    pub fn schreier_label(&self, p: u64) -> Option<usize> {
        match self.labels.get(p as usize) {
            Some(&l) if l != 0 && p != self.start => Some(l as usize - 1),
            _ => None,
        }
    }

    /// An element mapping the start point to `p`, from the Schreier vector.
    pub fn representative(&self, mut p: u64) -> Option<GF2Matrix> {
        if !self.contains(p) {
            return None;
        }
        let n = self.gens[0].dim();
        let mut u = PackedMatrix::identity(n);
        while p != self.start {
            let k = self.schreier_label(p)?;
            u = u.compose(&self.gens[k]);
            p = self.inverses[k].apply(p);
        }
        Some(u.to_matrix())
    }
}

fn check_dims(gens: &[GF2Matrix]) -> Result<usize> {
    let n = gens.first().ok_or(Error::EmptyMatrix)?.rows();
    for g in gens {
        if !g.is_square() || g.rows() != n {
            return Err(Error::shape("group", (n, n), (g.rows(), g.cols())));
        }
    }
    if n > 32 {
        return Err(Error::MemoryGuard {
            degree: u64::MAX,
            bytes: u64::MAX,
        });
    }
    Ok(n)
}

pub fn orbit(gens: &[GF2Matrix], start: u64) -> Result<Orbit> {
    let n = check_dims(gens)?;
    if gens.len() >= u8::MAX as usize {
        return Err(Error::shape("orbit", (gens.len(), 0), (254, 0)));
    }
    if start == 0 || start >> n != 0 {
        return Err(Error::shape("orbit", (n, n), (start as usize, 0)));
    }
    let packed: Vec<PackedMatrix> = gens.iter().map(PackedMatrix::from_matrix).collect::<Result<_>>()?;
    let inverses: Vec<PackedMatrix> = packed.iter().map(|g| g.inverse()).collect::<Result<_>>()?;
    let tables: Vec<ApplyTable> = packed.iter().map(ApplyTable::new).collect();
    let mut labels = vec![0u8; 1usize << n];
    labels[start as usize] = u8::MAX;
    let mut points = vec![start];
    let mut head = 0;
    while head < points.len() {
        let p = points[head];
        head += 1;
        for (k, t) in tables.iter().enumerate() {
            let q = t.apply(p);
            if labels[q as usize] == 0 {
                labels[q as usize] = (k + 1) as u8;
                points.push(q);
            }
        }
    }
    Ok(Orbit {
        gens: packed,
        inverses,
        start,
        points,
        labels,
    })
}

/// Options for [`group_order`].
#[derive(Clone, Debug)]
pub struct OrderOptions {
    pub mode: Mode,
    pub seed: u64,
    /// Expected order; reaching it ends the run with `ReachedTarget`.
    pub target: Option<BigUint>,
    /// Overrides the memory guard.
    pub force: bool,
    pub cache_dir: Option<PathBuf>,
}

impl OrderOptions {
    pub fn new(mode: Mode) -> Self {
        Self {
            mode,
            seed: DEFAULT_SEED,
            target: None,
            force: false,
            cache_dir: None,
        }
    }

    pub fn with_target(mut self, target: BigUint) -> Self {
        self.target = Some(target);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrderResult {
    #[serde(serialize_with = "big_as_string")]
    pub order: BigUint,
    #[serde(serialize_with = "opt_big_as_string")]
    pub target: Option<BigUint>,
    pub certificate: Certificate,
    pub mode: Mode,
    pub dimension: usize,
    pub degree: u64,
    pub base: Vec<u64>,
    pub orbit_sizes: Vec<usize>,
    pub strong_generators: usize,
    /// True when the chain passed deterministic verification.
    pub verified: bool,
    pub from_cache: bool,
    pub seed: u64,
}

fn big_as_string<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn opt_big_as_string<S: serde::Serializer>(v: &Option<BigUint>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.serialize_str(&v.to_string()),
        None => s.serialize_none(),
    }
}

/// Estimated bytes of orbit tables for dimension `n`: one label array per
/// level plus point lists whose lengths roughly halve from level to level.
pub fn table_bytes(n: usize) -> u64 {
    (n as u64 + 16) * (1u64 << n)
}

fn guard(n: usize, force: bool) -> Result<()> {
    let degree = (1u64 << n) - 1;
    let bytes = table_bytes(n);
    if !force && (degree > GUARD_DEGREE || bytes > GUARD_BYTES) {
        return Err(Error::MemoryGuard { degree, bytes });
    }
    Ok(())
}

/// Order of the group generated by `gens` acting in `opts.mode`.
///
/// Without a target the run must end in deterministic verification, which is
/// refused above [`VERIFY_DEGREE_LIMIT`].
pub fn group_order(gens: &[GF2Matrix], cfg: &GenusConfig, opts: &OrderOptions) -> Result<OrderResult> {
    let action = action_matrices(gens, cfg, opts.mode)?;
    let n = check_dims(&action)?;
    let degree = (1u64 << n) - 1;
    guard(n, opts.force)?;
    if opts.target.is_none() && degree > VERIFY_DEGREE_LIMIT {
        return Err(Error::VerificationTooLarge { degree });
    }
    let packed: Vec<PackedMatrix> = action.iter().map(PackedMatrix::from_matrix).collect::<Result<_>>()?;
    let key = CacheKey {
        genus: cfg.genus(),
        mode: opts.mode,
        generator_hash: cache::generator_hash(opts.mode, &packed),
        seed: opts.seed,
    };
    let finish = |bsgs: &Bsgs, certificate, verified, from_cache| OrderResult {
        order: bsgs.order(),
        target: opts.target.clone(),
        certificate,
        mode: opts.mode,
        dimension: n,
        degree,
        base: bsgs.base(),
        orbit_sizes: bsgs.orbit_sizes(),
        strong_generators: bsgs.strong_generators().count(),
        verified,
        from_cache,
        seed: opts.seed,
    };
    if let Some(dir) = &opts.cache_dir {
        if let Some((bsgs, cert)) = cache::load(dir, &key)? {
            let consistent = match (&opts.target, cert) {
                (_, Certificate::Proved) => true,
                (Some(t), Certificate::ReachedTarget) => bsgs.order() == *t,
                (Some(t), Certificate::BelowTarget) => bsgs.order() < *t,
                (None, _) => false,
            };
            if consistent {
                return Ok(finish(&bsgs, cert, cert == Certificate::Proved, true));
            }
        }
    }

    let mut bsgs = Bsgs::new(n);
    for g in &packed {
        bsgs.absorb(g.clone(), 0)?;
    }
    let reached = |b: &Bsgs| opts.target.as_ref().is_some_and(|t| b.order() == *t);
    let mut rand = RandomElements::new(&packed, n, opts.seed);
    let mut quiet = 0;
    while !reached(&bsgs) && quiet < QUIET_SIFTS {
        if bsgs.absorb(rand.next(), 0)? {
            quiet = 0;
        } else {
            quiet += 1;
        }
    }
    let mut verified = false;
    if !reached(&bsgs) && degree <= VERIFY_DEGREE_LIMIT {
        bsgs.verify()?;
        verified = true;
    }
    let certificate = match &opts.target {
        Some(t) if bsgs.order() == *t => Certificate::ReachedTarget,
        Some(_) => Certificate::BelowTarget,
        None => Certificate::Proved,
    };
    if let Some(dir) = &opts.cache_dir {
        cache::save(dir, &key, certificate, &bsgs)?;
    }
    Ok(finish(&bsgs, certificate, verified, false))
}

/// Builds a verified chain directly (small degrees only), for property checks.
pub fn verified_bsgs(gens: &[GF2Matrix], seed: u64) -> Result<Bsgs> {
    let n = check_dims(gens)?;
    let degree = (1u64 << n) - 1;
    if degree > VERIFY_DEGREE_LIMIT {
        return Err(Error::VerificationTooLarge { degree });
    }
    let packed: Vec<PackedMatrix> = gens.iter().map(PackedMatrix::from_matrix).collect::<Result<_>>()?;
    let mut bsgs = Bsgs::new(n);
    for g in &packed {
        bsgs.absorb(g.clone(), 0)?;
    }
    let mut rand = RandomElements::new(&packed, n, seed);
    let mut quiet = 0;
    while quiet < QUIET_SIFTS {
        quiet = if bsgs.absorb(rand.next(), 0)? { 0 } else { quiet + 1 };
    }
    bsgs.verify()?;
    Ok(bsgs)
}
