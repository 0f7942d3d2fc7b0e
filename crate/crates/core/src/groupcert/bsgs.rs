//! Base and strong generating set for a matrix group acting on nonzero vectors.
//!
//! Orbit tables are dense arrays indexed by point code. Label `0` marks a point
//! outside the orbit, [`ROOT`] marks the base point, and label `k` means the
//! point was reached from its parent by the level's `k`-th generator.

use num_bigint::BigUint;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::packed::{ApplyTable, PackedMatrix};
use crate::error::{Error, Result};

const ROOT: u8 = u8::MAX;
const MAX_LEVEL_GENS: usize = (u8::MAX - 1) as usize;

/// A strong generator with its inverse and lookup tables for both.
#[derive(Clone, Debug)]
pub(crate) struct StrongGen {
    pub(crate) matrix: PackedMatrix,
    table: ApplyTable,
    inverse_table: ApplyTable,
}

impl StrongGen {
    fn new(matrix: PackedMatrix) -> Result<Self> {
        let inverse = matrix.inverse()?;
        Ok(Self {
            table: ApplyTable::new(&matrix),
            inverse_table: ApplyTable::new(&inverse),
            matrix,
        })
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Level {
    pub(crate) point: u64,
    /// Indices into `Bsgs::gens` of the generators of this stabilizer.
    pub(crate) gens: Vec<usize>,
    labels: Vec<u8>,
    pub(crate) orbit: Vec<u64>,
}

/// Base, strong generators and orbit tables; order is the product of orbit sizes.
#[derive(Clone, Debug)]
pub struct Bsgs {
    n: usize,
    pub(crate) gens: Vec<StrongGen>,
    pub(crate) levels: Vec<Level>,
}

impl Bsgs {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            gens: Vec::new(),
            levels: Vec::new(),
        }
    }

    /// Rebuilds a chain from its base and strong generators, recomputing
    /// every orbit. Each generator joins the levels up to the first base
    /// point it moves.
    pub fn from_parts(n: usize, base: &[u64], gens: Vec<PackedMatrix>) -> Result<Self> {
        let mut b = Self::new(n);
        for &p in base {
            if p == 0 || p >> n != 0 {
                return Err(Error::Cache(format!("base point {p} out of range")));
            }
            b.new_level(p);
        }
        for m in gens {
            if m.dim() != n {
                return Err(Error::Cache("generator has the wrong dimension".into()));
            }
            let depth = base
                .iter()
                .position(|&p| m.apply(p) != p)
                .ok_or_else(|| Error::Cache("generator fixes the whole base".into()))?;
            let idx = b.gens.len();
            b.gens.push(StrongGen::new(m)?);
            for l in 0..=depth {
                b.levels[l].gens.push(idx);
                b.extend_orbit(l);
            }
        }
        Ok(b)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn base(&self) -> Vec<u64> {
        self.levels.iter().map(|l| l.point).collect()
    }

    pub fn orbit_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.orbit.len()).collect()
    }

    pub fn order(&self) -> BigUint {
        self.levels
            .iter()
            .fold(BigUint::one(), |acc, l| acc * BigUint::from(l.orbit.len()))
    }

    pub fn strong_generators(&self) -> impl Iterator<Item = &PackedMatrix> {
        self.gens.iter().map(|g| &g.matrix)
    }

    /// Strong generators of the stabilizer at `level`.
    pub fn level_generators(&self, level: usize) -> impl Iterator<Item = &PackedMatrix> {
        self.levels[level].gens.iter().map(|&k| &self.gens[k].matrix)
    }

    fn new_level(&mut self, point: u64) {
        let mut labels = vec![0u8; 1usize << self.n];
        labels[point as usize] = ROOT;
        self.levels.push(Level {
            point,
            gens: Vec::new(),
            labels,
            orbit: vec![point],
        });
    }

    /// Adds `m` as a strong generator fixing the first `depth` base points,
    /// opening a new base point when `depth` equals the base length.
    pub(crate) fn add_generator(&mut self, m: PackedMatrix, depth: usize) -> Result<()> {
        if depth == self.levels.len() {
            let j = m.first_moved().expect("non-identity residue");
            self.new_level(1u64 << j);
        }
        let idx = self.gens.len();
        self.gens.push(StrongGen::new(m)?);
        for l in 0..=depth {
            if self.levels[l].gens.len() >= MAX_LEVEL_GENS {
                return Err(Error::Cache(format!("level {l} exceeds {MAX_LEVEL_GENS} generators")));
            }
            self.levels[l].gens.push(idx);
            self.extend_orbit(l);
        }
        Ok(())
    }

    /// Closes the orbit of level `l` after its last generator was appended.
    fn extend_orbit(&mut self, l: usize) {
        let level = &mut self.levels[l];
        let k = level.gens.len();
        let newest = &self.gens[level.gens[k - 1]].table;
        let start = level.orbit.len();
        for i in 0..start {
            let q = newest.apply(level.orbit[i]);
            if level.labels[q as usize] == 0 {
                level.labels[q as usize] = k as u8;
                level.orbit.push(q);
            }
        }
        let mut head = start;
        while head < level.orbit.len() {
            let p = level.orbit[head];
            head += 1;
            for (slot, &g) in level.gens.iter().enumerate() {
                let q = self.gens[g].table.apply(p);
                if level.labels[q as usize] == 0 {
                    level.labels[q as usize] = (slot + 1) as u8;
                    level.orbit.push(q);
                }
            }
        }
    }

    /// Strips `h` through the chain starting at `from`. Returns the residue and
    /// the level at which it dropped out (`levels.len()` if it passed all).
    pub(crate) fn sift_from(&self, mut h: PackedMatrix, from: usize) -> (PackedMatrix, usize) {
        for (i, level) in self.levels.iter().enumerate().skip(from) {
            let mut p = h.apply(level.point);
            if level.labels[p as usize] == 0 {
                return (h, i);
            }
            while p != level.point {
                let label = level.labels[p as usize];
                let s = &self.gens[level.gens[label as usize - 1]];
                h = s.inverse_table.compose(&h);
                p = s.inverse_table.apply(p);
            }
        }
        let depth = self.levels.len();
        (h, depth)
    }

    pub fn contains(&self, m: &PackedMatrix) -> bool {
        self.sift_from(m.clone(), 0).0.is_identity()
    }

    /// Coset representative `u` at `level` with `u(base point) = p`.
    fn transversal(&self, level: usize, mut p: u64) -> PackedMatrix {
        let lv = &self.levels[level];
        let mut u = PackedMatrix::identity(self.n);
        while p != lv.point {
            let s = &self.gens[lv.gens[lv.labels[p as usize] as usize - 1]];
            u = u.compose(&s.matrix);
            p = s.inverse_table.apply(p);
        }
        u
    }

    /// Sifts `h`; adds the residue as a new strong generator if nontrivial.
    /// Returns whether the chain changed.
    pub(crate) fn absorb(&mut self, h: PackedMatrix, from: usize) -> Result<bool> {
        let (res, depth) = self.sift_from(h, from);
        if res.is_identity() {
            return Ok(false);
        }
        self.add_generator(res, depth)?;
        Ok(true)
    }

    /// Deterministic Schreier–Sims completion: every Schreier generator of
    /// every level sifts to the identity through the deeper levels.
    pub(crate) fn verify(&mut self) -> Result<()> {
        'restart: loop {
            for l in (0..self.levels.len()).rev() {
                let orbit = self.levels[l].orbit.clone();
                let gens = self.levels[l].gens.clone();
                for &p in &orbit {
                    let up = self.transversal(l, p);
                    for &g in &gens {
                        let s = &self.gens[g];
                        let q = s.table.apply(p);
                        let uq_inv = self.transversal(l, q).inverse()?;
                        let schreier = uq_inv.compose(&s.table.compose(&up));
                        if self.absorb(schreier, l + 1)? {
                            continue 'restart;
                        }
                    }
                }
            }
            return Ok(());
        }
    }
}

/// Product-replacement random elements (with accumulator), seeded.
pub(crate) struct RandomElements {
    slots: Vec<PackedMatrix>,
    acc: PackedMatrix,
    rng: ChaCha8Rng,
}

impl RandomElements {
    pub(crate) fn new(gens: &[PackedMatrix], n: usize, seed: u64) -> Self {
        let mut slots: Vec<PackedMatrix> = gens.to_vec();
        if slots.is_empty() {
            slots.push(PackedMatrix::identity(n));
        }
        let base = slots.clone();
        while slots.len() < 10 {
            slots.push(base[slots.len() % base.len()].clone());
        }
        let mut r = Self {
            slots,
            acc: PackedMatrix::identity(n),
            rng: ChaCha8Rng::seed_from_u64(seed),
        };
        for _ in 0..60 {
            r.next();
        }
        r
    }

    pub(crate) fn next(&mut self) -> PackedMatrix {
        let len = self.slots.len();
        let i = self.rng.random_range(0..len);
        let mut j = self.rng.random_range(0..len - 1);
        if j >= i {
            j += 1;
        }
        let s = self.slots[i].compose(&self.slots[j]);
        self.slots[i] = s;
        self.acc = self.acc.compose(&self.slots[i]);
        self.acc.clone()
    }
}
