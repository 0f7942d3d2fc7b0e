//! Bit-packed linear algebra over GF(2).
//!
//! Vectors and matrix rows are packed into `u64` words, least significant bit
//! first. Bit `j` of a row lives in word `j / 64` at position `j % 64`. Padding
//! bits past the logical length are kept at zero by every constructor and
//! operation, so word-level equality and hashing agree with logical equality.

use std::fmt;

use crate::error::{Error, Result};

const WORD_BITS: usize = 64;

#[inline]
fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD_BITS)
}

#[inline]
fn tail_mask(bits: usize) -> u64 {
    match bits % WORD_BITS {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

/// A vector over GF(2) of fixed dimension.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GF2Vector {
    dim: usize,
    words: Vec<u64>,
}

impl GF2Vector {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "GF2Vector dimension must be positive");
        Self {
            dim,
            words: vec![0; words_for(dim)],
        }
    }

    /// The standard basis vector with a single one at `index` (0-based).
    pub fn unit(dim: usize, index: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.set(index, true);
        v
    }

    /// Vector with ones at the given 0-based positions. Repeated positions cancel.
    pub fn from_support<I: IntoIterator<Item = usize>>(dim: usize, support: I) -> Self {
        let mut v = Self::zeros(dim);
        for i in support {
            v.flip(i);
        }
        v
    }

    /// Builds a vector from the low `dim` bits of `code` (requires `dim <= 64`).
    pub fn from_code(dim: usize, code: u64) -> Self {
        assert!(dim <= WORD_BITS);
        let mut v = Self::zeros(dim);
        v.words[0] = code & tail_mask(dim);
        v
    }

    /// Integer code of the vector (requires `dim <= 64`).
    pub fn code(&self) -> u64 {
        assert!(self.dim <= WORD_BITS);
        self.words[0]
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.dim, "bit index {i} out of range for dimension {}", self.dim);
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.dim, "bit index {i} out of range for dimension {}", self.dim);
        let mask = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.dim, "bit index {i} out of range for dimension {}", self.dim);
        self.words[i / WORD_BITS] ^= 1u64 << (i % WORD_BITS);
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// 0-based positions of the set bits, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.dim).filter(|&i| self.get(i)).collect()
    }

    pub fn xor_assign(&mut self, other: &GF2Vector) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::shape("vector add", (self.dim, 1), (other.dim, 1)));
        }
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
        Ok(())
    }

    pub fn add(&self, other: &GF2Vector) -> Result<GF2Vector> {
        let mut out = self.clone();
        out.xor_assign(other)?;
        Ok(out)
    }

    /// Standard dot product `sum x_i y_i` over GF(2).
    pub fn dot(&self, other: &GF2Vector) -> Result<bool> {
        if self.dim != other.dim {
            return Err(Error::shape("dot product", (self.dim, 1), (other.dim, 1)));
        }
        Ok(dot_words(&self.words, &other.words))
    }
}

#[inline]
fn dot_words(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).fold(0u32, |acc, (x, y)| acc ^ (x & y).count_ones()) & 1 == 1
}

impl fmt::Debug for GF2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.dim {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// A dense matrix over GF(2), row-major, each row packed into `u64` words.
///
/// Matrices act on column vectors: `apply(m, x)_i = sum_j m[i][j] x_j`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GF2Matrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl GF2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        let stride = words_for(cols);
        Self {
            rows,
            cols,
            stride,
            data: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Matrix whose rows are the given vectors.
    pub fn from_rows(rows: &[GF2Vector]) -> Result<Self> {
        let cols = rows.first().map(|r| r.dim()).ok_or(Error::EmptyMatrix)?;
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            if r.dim() != cols {
                return Err(Error::shape("from_rows", (1, cols), (1, r.dim())));
            }
            m.row_words_mut(i).copy_from_slice(r.words());
        }
        Ok(m)
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[GF2Vector]) -> Result<Self> {
        Ok(Self::from_rows(cols)?.transpose())
    }

    /// Square matrix from single-word row codes (requires `n <= 64`).
    pub fn from_row_codes(n: usize, codes: &[u64]) -> Self {
        assert!(n <= WORD_BITS && codes.len() == n);
        let mut m = Self::zeros(n, n);
        let mask = tail_mask(n);
        for (i, &c) in codes.iter().enumerate() {
            m.data[i] = c & mask;
        }
        m
    }

    /// Row codes of a matrix with at most 64 columns.
    pub fn row_codes(&self) -> Vec<u64> {
        assert_eq!(self.stride, 1, "row_codes needs at most 64 columns");
        self.data.clone()
    }

    /// Permutation matrix sending basis vector `j` to basis vector `perm[j]`.
    pub fn permutation(perm: &[usize]) -> Result<Self> {
        let n = perm.len();
        let mut seen = vec![false; n];
        let mut m = Self::zeros(n, n);
        for (j, &p) in perm.iter().enumerate() {
            if p >= n || seen[p] {
                return Err(Error::InvalidPermutation);
            }
            seen[p] = true;
            m.set(p, j, true);
        }
        Ok(m)
    }

    /// Permutation matrix exchanging basis vectors `i` and `j`.
    pub fn swap(n: usize, i: usize, j: usize) -> Self {
        let mut perm: Vec<usize> = (0..n).collect();
        perm.swap(i, j);
        Self::permutation(&perm).expect("swap is a permutation")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn row_words(&self, i: usize) -> &[u64] {
        &self.data[i * self.stride..(i + 1) * self.stride]
    }

    #[inline]
    fn row_words_mut(&mut self, i: usize) -> &mut [u64] {
        &mut self.data[i * self.stride..(i + 1) * self.stride]
    }

    pub fn row(&self, i: usize) -> GF2Vector {
        GF2Vector {
            dim: self.cols,
            words: self.row_words(i).to_vec(),
        }
    }

    pub fn column(&self, j: usize) -> GF2Vector {
        let mut v = GF2Vector::zeros(self.rows);
        for i in 0..self.rows {
            if self.get(i, j) {
                v.set(i, true);
            }
        }
        v
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        assert!(i < self.rows && j < self.cols);
        (self.data[i * self.stride + j / WORD_BITS] >> (j % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        assert!(i < self.rows && j < self.cols);
        let w = &mut self.data[i * self.stride + j / WORD_BITS];
        let mask = 1u64 << (j % WORD_BITS);
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && *self == Self::identity(self.rows)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                if self.get(i, j) {
                    t.set(j, i, true);
                }
            }
        }
        t
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &GF2Matrix) -> Result<GF2Matrix> {
        if self.cols != rhs.rows {
            return Err(Error::shape(
                "matrix product",
                (self.rows, self.cols),
                (rhs.rows, rhs.cols),
            ));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let (lhs_row, acc) = (self.row_words(i), i * out.stride);
            for (wi, &word) in lhs_row.iter().enumerate() {
                let mut bits = word;
                while bits != 0 {
                    let j = wi * WORD_BITS + bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    let src = rhs.row_words(j);
                    for (d, s) in out.data[acc..acc + out.stride].iter_mut().zip(src) {
                        *d ^= s;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product.
    pub fn apply(&self, x: &GF2Vector) -> Result<GF2Vector> {
        if self.cols != x.dim() {
            return Err(Error::shape(
                "matrix-vector product",
                (self.rows, self.cols),
                (x.dim(), 1),
            ));
        }
        let mut y = GF2Vector::zeros(self.rows);
        for i in 0..self.rows {
            if dot_words(self.row_words(i), x.words()) {
                y.set(i, true);
            }
        }
        Ok(y)
    }

    /// Inverse by Gauss-Jordan elimination with first-set-bit pivoting.
    pub fn inverse(&self) -> Result<GF2Matrix> {
        if !self.is_square() {
            return Err(Error::shape("inverse", (self.rows, self.cols), (self.cols, self.rows)));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let pivot = (col..n).find(|&r| a.get(r, col)).ok_or(Error::NotInvertible)?;
            if pivot != col {
                a.swap_rows(pivot, col);
                inv.swap_rows(pivot, col);
            }
            for r in 0..n {
                if r != col && a.get(r, col) {
                    a.xor_row_into(col, r);
                    inv.xor_row_into(col, r);
                }
            }
        }
        Ok(inv)
    }

    pub fn rank(&self) -> usize {
        let mut a = self.clone();
        let mut rank = 0;
        for col in 0..self.cols {
            let Some(pivot) = (rank..self.rows).find(|&r| a.get(r, col)) else {
                continue;
            };
            a.swap_rows(pivot, rank);
            for r in 0..self.rows {
                if r != rank && a.get(r, col) {
                    a.xor_row_into(rank, r);
                }
            }
            rank += 1;
            if rank == self.rows {
                break;
            }
        }
        rank
    }

    /// `x^T self y` for a square matrix used as a bilinear form.
    pub fn bilinear(&self, x: &GF2Vector, y: &GF2Vector) -> Result<bool> {
        let gy = self.apply(y)?;
        x.dot(&gy)
    }

    /// Whether `self^T gram self = gram`.
    pub fn preserves_form(&self, gram: &GF2Matrix) -> Result<bool> {
        let lhs = self.transpose().mul(gram)?.mul(self)?;
        Ok(&lhs == gram)
    }

    /// Integer power; negative exponents use the inverse.
    pub fn pow(&self, exp: i64) -> Result<GF2Matrix> {
        if !self.is_square() {
            return Err(Error::shape("power", (self.rows, self.cols), (self.cols, self.rows)));
        }
        let mut base = if exp < 0 { self.inverse()? } else { self.clone() };
        let mut e = exp.unsigned_abs();
        let mut acc = Self::identity(self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for w in 0..self.stride {
            self.data.swap(a * self.stride + w, b * self.stride + w);
        }
    }

    fn xor_row_into(&mut self, src: usize, dst: usize) {
        for w in 0..self.stride {
            let s = self.data[src * self.stride + w];
            self.data[dst * self.stride + w] ^= s;
        }
    }
}

impl fmt::Debug for GF2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "GF2Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

/// The linear map `x -> x + <x, v> v` with `<x, v> = x^T gram v`.
///
/// It preserves `gram` whenever `<v, v> = 0`.
pub fn transvection(v: &GF2Vector, gram: &GF2Matrix) -> Result<GF2Matrix> {
    if v.is_zero() {
        return Err(Error::DegenerateClass);
    }
    if !gram.is_square() || gram.rows() != v.dim() {
        return Err(Error::shape("transvection", (gram.rows(), gram.cols()), (v.dim(), 1)));
    }
    let gv = gram.apply(v)?;
    let mut m = GF2Matrix::identity(v.dim());
    for i in v.support() {
        for (d, s) in m.row_words_mut(i).iter_mut().zip(gv.words()) {
            *d ^= s;
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn vec_from(bits: &[usize], dim: usize) -> GF2Vector {
        GF2Vector::from_support(dim, bits.iter().copied())
    }

    #[test]
    fn identity_is_neutral() {
        let m = GF2Matrix::from_row_codes(5, &[0b10110, 0b00001, 0b11111, 0b01000, 0b10101]);
        let i5 = GF2Matrix::identity(5);
        assert_eq!(i5.mul(&m).unwrap(), m);
        assert_eq!(m.mul(&i5).unwrap(), m);
    }

    #[test]
    fn swap_squared_is_identity() {
        let p = GF2Matrix::swap(2, 0, 1);
        assert!(p.mul(&p).unwrap().is_identity());
    }

    #[test]
    fn shape_errors_are_reported() {
        let a = GF2Matrix::zeros(2, 3);
        let b = GF2Matrix::zeros(2, 3);
        assert!(matches!(a.mul(&b), Err(Error::Shape { .. })));
        assert!(matches!(a.apply(&GF2Vector::zeros(2)), Err(Error::Shape { .. })));
        assert!(matches!(a.inverse(), Err(Error::Shape { .. })));
    }

    #[test]
    fn singular_matrix_has_no_inverse() {
        let m = GF2Matrix::from_row_codes(3, &[0b011, 0b011, 0b100]);
        assert!(matches!(m.inverse(), Err(Error::NotInvertible)));
        assert_eq!(m.rank(), 2);
    }

    #[test]
    fn permutation_inverse_is_transpose() {
        let p = GF2Matrix::permutation(&[2, 0, 3, 1, 4]).unwrap();
        assert_eq!(p.inverse().unwrap(), p.transpose());
        assert_eq!(GF2Matrix::identity(6).inverse().unwrap(), GF2Matrix::identity(6));
    }

    #[test]
    fn swap_acts_on_basis() {
        let s = GF2Matrix::swap(4, 0, 1);
        assert_eq!(s.apply(&GF2Vector::unit(4, 0)).unwrap(), GF2Vector::unit(4, 1));
    }

    #[test]
    fn transvection_by_sum_of_two_basis_vectors() {
        let gram = GF2Matrix::identity(4);
        let v = vec_from(&[0, 1], 4);
        let t = transvection(&v, &gram).unwrap();
        // x = mu_1: <x, v> = 1 so x + v = mu_2
        assert_eq!(t.apply(&GF2Vector::unit(4, 0)).unwrap(), GF2Vector::unit(4, 1));
        // columns 3 and 4 untouched; columns 1 and 2 differ from the identity
        let id = GF2Matrix::identity(4);
        for j in 0..4 {
            let differs = t.column(j) != id.column(j);
            assert_eq!(differs, j < 2, "column {j}");
        }
        assert!(t.mul(&t).unwrap().is_identity());
        assert_eq!(t.inverse().unwrap(), t);
        assert!(t.preserves_form(&gram).unwrap());
    }

    #[test]
    fn transvection_fixes_kernel_of_pairing() {
        let gram = GF2Matrix::identity(6);
        let v = vec_from(&[1, 2, 3, 4], 6);
        let x = vec_from(&[1, 2, 5], 6);
        assert!(!gram.bilinear(&x, &v).unwrap());
        assert_eq!(transvection(&v, &gram).unwrap().apply(&x).unwrap(), x);
    }

    #[test]
    fn anisotropic_transvection_is_singular() {
        let gram = GF2Matrix::identity(3);
        let t = transvection(&GF2Vector::unit(3, 0), &gram).unwrap();
        assert_eq!(t.rank(), 2);
    }

    #[test]
    fn zero_transvection_is_rejected() {
        let gram = GF2Matrix::identity(3);
        assert!(matches!(
            transvection(&GF2Vector::zeros(3), &gram),
            Err(Error::DegenerateClass)
        ));
    }

    #[test]
    fn wide_matrices_cross_word_boundaries() {
        let n = 130;
        let mut perm: Vec<usize> = (0..n).collect();
        perm.rotate_left(67);
        let p = GF2Matrix::permutation(&perm).unwrap();
        let x = GF2Vector::unit(n, 0);
        assert_eq!(p.apply(&x).unwrap(), GF2Vector::unit(n, perm[0]));
        assert!(p.mul(&p.inverse().unwrap()).unwrap().is_identity());
        assert_eq!(p.pow(n as i64).unwrap(), GF2Matrix::identity(n));
    }

    fn elementary(n: usize, i: usize, j: usize) -> GF2Matrix {
        // row i += row j
        let mut e = GF2Matrix::identity(n);
        e.set(i, j, true);
        e
    }

    fn arb_invertible() -> impl Strategy<Value = GF2Matrix> {
        (2usize..40).prop_flat_map(|n| {
            prop::collection::vec((0..n, 0..n), 0..60).prop_map(move |ops| {
                ops.into_iter()
                    .filter(|(i, j)| i != j)
                    .fold(GF2Matrix::identity(n), |m, (i, j)| elementary(n, i, j).mul(&m).unwrap())
            })
        })
    }

    fn arb_matrix(rows: usize, cols: usize) -> impl Strategy<Value = GF2Matrix> {
        prop::collection::vec(any::<bool>(), rows * cols).prop_map(move |bits| {
            let mut m = GF2Matrix::zeros(rows, cols);
            for (k, b) in bits.into_iter().enumerate() {
                m.set(k / cols, k % cols, b);
            }
            m
        })
    }

    proptest! {
        #[test]
        fn inverse_round_trips(m in arb_invertible()) {
            let inv = m.inverse().unwrap();
            let n = m.rows();
            prop_assert!(m.mul(&inv).unwrap() == GF2Matrix::identity(n));
            prop_assert!(inv.mul(&m).unwrap() == GF2Matrix::identity(n));
        }

        #[test]
        fn product_is_associative(
            (a, b, c) in (1usize..9, 1usize..9, 1usize..9, 1usize..9).prop_flat_map(|(p, q, r, s)| {
                (arb_matrix(p, q), arb_matrix(q, r), arb_matrix(r, s))
            })
        ) {
            let left = a.mul(&b).unwrap().mul(&c).unwrap();
            let right = a.mul(&b.mul(&c).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }

        #[test]
        fn rank_matches_transpose(m in (1usize..12, 1usize..12).prop_flat_map(|(r, c)| arb_matrix(r, c))) {
            prop_assert_eq!(m.rank(), m.transpose().rank());
        }

        #[test]
        fn transvections_are_involutions(bits in prop::collection::vec(any::<bool>(), 2..70)) {
            let dim = bits.len();
            let v = GF2Vector::from_support(dim, bits.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| i));
            // t^2 = x + <x,v><v,v> v, so only isotropic v give involutions
            prop_assume!(!v.is_zero() && v.weight() % 2 == 0);
            let t = transvection(&v, &GF2Matrix::identity(dim)).unwrap();
            prop_assert!(t.mul(&t).unwrap().is_identity());
        }
    }
}
