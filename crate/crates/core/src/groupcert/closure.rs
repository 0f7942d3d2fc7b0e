//! Exhaustive closure of a small matrix group; the oracle for order checks.

use std::collections::HashSet;

use super::packed::PackedMatrix;
use crate::error::{Error, Result};
use crate::gf2::GF2Matrix;

/// Largest dimension whose matrices pack into a single `u128` key.
pub const MAX_CLOSURE_DIM: usize = 11;

/// Every element of a finite matrix group, stored as packed column images.
#[derive(Clone, Debug)]
pub struct Closure {
    n: usize,
    elements: HashSet<u128>,
}

fn key(m: &PackedMatrix, n: usize) -> u128 {
    m.cols()
        .iter()
        .enumerate()
        .fold(0u128, |acc, (j, &c)| acc | (c as u128) << (n * j))
}

fn unkey(k: u128, n: usize) -> PackedMatrix {
    let mask = (1u128 << n) - 1;
    PackedMatrix::from_cols((0..n).map(|j| ((k >> (n * j)) & mask) as u64).collect())
}

impl Closure {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, m: &GF2Matrix) -> bool {
        m.rows() == self.n
            && PackedMatrix::from_matrix(m)
                .map(|p| self.elements.contains(&key(&p, self.n)))
                .unwrap_or(false)
    }

    pub fn iter(&self) -> impl Iterator<Item = GF2Matrix> + '_ {
        self.elements.iter().map(|&k| unkey(k, self.n).to_matrix())
    }
}

/// Breadth-first closure of `gens` under right multiplication, starting from
/// the identity. Fails once more than `cap` elements are found.
pub fn brute_force_closure(gens: &[GF2Matrix], cap: usize) -> Result<Closure> {
    let n = match gens.first() {
        Some(g) => g.rows(),
        None => return Err(Error::EmptyMatrix),
    };
    if n > MAX_CLOSURE_DIM {
        return Err(Error::shape("closure", (n, n), (MAX_CLOSURE_DIM, MAX_CLOSURE_DIM)));
    }
    let packed: Vec<PackedMatrix> = gens
        .iter()
        .map(|g| {
            if g.rows() != n {
                return Err(Error::shape("closure", (n, n), (g.rows(), g.cols())));
            }
            PackedMatrix::from_matrix(g)
        })
        .collect::<Result<_>>()?;
    let id = key(&PackedMatrix::identity(n), n);
    let mut elements = HashSet::from([id]);
    let mut queue = vec![id];
    let mut head = 0;
    while head < queue.len() {
        let x = unkey(queue[head], n);
        head += 1;
        for g in &packed {
            let k = key(&x.compose(g), n);
            if elements.insert(k) {
                if elements.len() > cap {
                    return Err(Error::OracleOverflow { cap });
                }
                queue.push(k);
            }
        }
    }
    Ok(Closure { n, elements })
}
