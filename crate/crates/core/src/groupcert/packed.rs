//! Column-packed matrices acting on integer-coded vectors of dimension <= 64.

use crate::error::{Error, Result};
use crate::gf2::{GF2Matrix, GF2Vector};

/// A square matrix stored by column images: `cols[j]` is the code of `M e_j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PackedMatrix {
    cols: Vec<u64>,
}

impl PackedMatrix {
    pub fn identity(n: usize) -> Self {
        Self {
            cols: (0..n).map(|j| 1u64 << j).collect(),
        }
    }

    pub fn from_matrix(m: &GF2Matrix) -> Result<Self> {
        if !m.is_square() || m.rows() > 64 {
            return Err(Error::shape("pack", (m.rows(), m.cols()), (64, 64)));
        }
        Ok(Self {
            cols: (0..m.cols()).map(|j| m.column(j).code()).collect(),
        })
    }

    pub fn from_cols(cols: Vec<u64>) -> Self {
        Self { cols }
    }

    pub fn to_matrix(&self) -> GF2Matrix {
        let n = self.dim();
        let cols: Vec<GF2Vector> = self.cols.iter().map(|&c| GF2Vector::from_code(n, c)).collect();
        GF2Matrix::from_columns(&cols).expect("square")
    }

    pub fn dim(&self) -> usize {
        self.cols.len()
    }

    pub fn cols(&self) -> &[u64] {
        &self.cols
    }

    #[inline]
    pub fn apply(&self, mut x: u64) -> u64 {
        let mut y = 0;
        while x != 0 {
            let j = x.trailing_zeros() as usize;
            y ^= self.cols[j];
            x &= x - 1;
        }
        y
    }

    /// `self * other`: apply `other` first.
    pub fn compose(&self, other: &PackedMatrix) -> PackedMatrix {
        PackedMatrix {
            cols: other.cols.iter().map(|&c| self.apply(c)).collect(),
        }
    }

    pub fn inverse(&self) -> Result<PackedMatrix> {
        PackedMatrix::from_matrix(&self.to_matrix().inverse()?)
    }

    pub fn is_identity(&self) -> bool {
        self.cols.iter().enumerate().all(|(j, &c)| c == 1u64 << j)
    }

    /// Index of the first basis vector this matrix moves.
    pub fn first_moved(&self) -> Option<usize> {
        self.cols.iter().enumerate().position(|(j, &c)| c != 1u64 << j)
    }
}

/// Byte-indexed lookup tables: `apply` costs one load per byte of the input.
#[derive(Clone, Debug)]
pub struct ApplyTable {
    chunks: Vec<[u64; 256]>,
}

impl ApplyTable {
    pub fn new(m: &PackedMatrix) -> Self {
        let n = m.dim();
        let chunks = (0..n.div_ceil(8))
            .map(|c| {
                let mut t = [0u64; 256];
                for byte in 1..256usize {
                    let low = byte.trailing_zeros() as usize;
                    let j = 8 * c + low;
                    let col = if j < n { m.cols[j] } else { 0 };
                    t[byte] = t[byte & (byte - 1)] ^ col;
                }
                t
            })
            .collect();
        Self { chunks }
    }

    #[inline]
    pub fn apply(&self, x: u64) -> u64 {
        let mut y = 0;
        for (c, t) in self.chunks.iter().enumerate() {
            y ^= t[((x >> (8 * c)) & 0xff) as usize];
        }
        y
    }

    /// `table * other`.
    pub fn compose(&self, other: &PackedMatrix) -> PackedMatrix {
        PackedMatrix::from_cols(other.cols.iter().map(|&c| self.apply(c)).collect())
    }
}
