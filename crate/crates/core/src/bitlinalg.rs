//! Bit-packed linear algebra over F2.
//!
//! Every diagnostic in this crate eventually reduces to a rank, a null space
//! or a linear solve over F2, so the kernels here operate on row-major
//! matrices packed into 64-bit words and eliminate by XOR-ing whole rows.
//!
//! Matrices and vectors are value types. The rank-style operations take
//! `&self` and eliminate on an internal copy.

use std::fmt;

use crate::error::{Error, Result};

const WORD: usize = 64;

#[inline]
fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD)
}

#[inline]
fn tail_mask(bits: usize) -> u64 {
    match bits % WORD {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

/// A packed vector over F2. Bits past `len` are always zero.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Vector of length `len` with ones at `indices`.
    pub fn from_indices(len: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zeros(len);
        for i in indices {
            v.set(i, true);
        }
        v
    }

    pub(crate) fn from_words(len: usize, mut words: Vec<u64>) -> Self {
        words.resize(words_for(len), 0);
        if let Some(last) = words.last_mut() {
            *last &= tail_mask(len);
        }
        Self { len, words }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub(crate) fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn xor_assign(&mut self, other: &BitVector) {
        assert_eq!(self.len, other.len, "length mismatch in xor");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// Parity of the bitwise AND, i.e. the F2 inner product.
    pub fn dot(&self, other: &BitVector) -> bool {
        assert_eq!(self.len, other.len, "length mismatch in dot");
        let mut acc = 0u32;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= (a & b).count_ones();
        }
        acc & 1 == 1
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * WORD + t)
                }
            })
        })
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.get(i)).collect()
    }

    /// Concatenation `self ++ other`.
    pub fn concat(&self, other: &BitVector) -> BitVector {
        let mut v = BitVector::zeros(self.len + other.len);
        for i in self.iter_ones() {
            v.set(i, true);
        }
        for i in other.iter_ones() {
            v.set(self.len + i, true);
        }
        v
    }

    /// Sub-vector of the given positions, in the given order.
    pub fn select(&self, positions: &[usize]) -> BitVector {
        let mut v = BitVector::zeros(positions.len());
        for (j, &p) in positions.iter().enumerate() {
            if self.get(p) {
                v.set(j, true);
            }
        }
        v
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector[")?;
        for i in 0..self.len {
            write!(f, "{}", u8::from(self.get(i)))?;
        }
        write!(f, "]")
    }
}

/// Reduced row-echelon form together with its pivot columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    pub matrix: BitMatrix,
    pub pivots: Vec<usize>,
}

/// Dense row-major matrix over F2.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
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

    /// Builds a matrix from rows of equal length. An empty slice gives a
    /// `0 × cols` matrix only through [`BitMatrix::zeros`]; here it gives `0 × 0`.
    pub fn from_rows(rows: &[BitVector]) -> Self {
        let cols = rows.first().map_or(0, BitVector::len);
        Self::from_rows_with_cols(rows, cols)
    }

    pub fn from_rows_with_cols(rows: &[BitVector], cols: usize) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "row {i} has wrong length");
            m.row_words_mut(i).copy_from_slice(r.words());
        }
        m
    }

    pub fn from_bool_rows(rows: &[Vec<bool>]) -> Self {
        let vs: Vec<BitVector> = rows.iter().map(|r| BitVector::from_bools(r)).collect();
        Self::from_rows(&vs)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        debug_assert!(r < self.rows && c < self.cols);
        (self.data[r * self.stride + c / WORD] >> (c % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of range");
        let w = &mut self.data[r * self.stride + c / WORD];
        let mask = 1u64 << (c % WORD);
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    #[inline]
    pub fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.stride..(r + 1) * self.stride]
    }

    #[inline]
    fn row_words_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.data[r * self.stride..(r + 1) * self.stride]
    }

    pub fn row(&self, r: usize) -> BitVector {
        BitVector::from_words(self.cols, self.row_words(r).to_vec())
    }

    pub fn row_vectors(&self) -> Vec<BitVector> {
        (0..self.rows).map(|r| self.row(r)).collect()
    }

    pub fn column(&self, c: usize) -> BitVector {
        let mut v = BitVector::zeros(self.rows);
        for r in 0..self.rows {
            if self.get(r, c) {
                v.set(r, true);
            }
        }
        v
    }

    pub fn row_is_zero(&self, r: usize) -> bool {
        self.row_words(r).iter().all(|&w| w == 0)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    pub fn push_row(&mut self, row: &BitVector) {
        assert_eq!(row.len(), self.cols, "pushed row has wrong length");
        self.data.extend_from_slice(row.words());
        self.rows += 1;
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let (lo, hi) = (a.min(b), a.max(b));
        let s = self.stride;
        let (left, right) = self.data.split_at_mut(hi * s);
        left[lo * s..(lo + 1) * s].swap_with_slice(&mut right[..s]);
    }

    /// `row[dst] ^= row[src]`, touching only words from `from_word` on.
    #[inline]
    fn xor_row_from(&mut self, dst: usize, src: usize, from_word: usize) {
        debug_assert_ne!(dst, src);
        let s = self.stride;
        let (d, sr) = if dst < src {
            let (left, right) = self.data.split_at_mut(src * s);
            (&mut left[dst * s..(dst + 1) * s], &right[..s])
        } else {
            let (left, right) = self.data.split_at_mut(dst * s);
            (&mut right[..s], &left[src * s..(src + 1) * s])
        };
        for (a, b) in d[from_word..].iter_mut().zip(&sr[from_word..]) {
            *a ^= b;
        }
    }

    pub fn xor_rows(&mut self, dst: usize, src: usize) {
        self.xor_row_from(dst, src, 0);
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for (wi, &w) in self.row_words(r).iter().enumerate() {
                let mut w = w;
                while w != 0 {
                    let c = wi * WORD + w.trailing_zeros() as usize;
                    t.set(c, r, true);
                    w &= w - 1;
                }
            }
        }
        t
    }

    /// Matrix product over F2.
    pub fn mul(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = BitMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for (wi, &w) in self.row_words(r).iter().enumerate() {
                let mut w = w;
                while w != 0 {
                    let k = wi * WORD + w.trailing_zeros() as usize;
                    w &= w - 1;
                    let s = out.stride;
                    let src = other.row_words(k);
                    for (a, b) in out.data[r * s..(r + 1) * s].iter_mut().zip(src) {
                        *a ^= b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &BitVector) -> Result<BitVector> {
        if self.cols != v.len() {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        let mut out = BitVector::zeros(self.rows);
        for r in 0..self.rows {
            let mut acc = 0u32;
            for (a, b) in self.row_words(r).iter().zip(v.words()) {
                acc ^= (a & b).count_ones();
            }
            if acc & 1 == 1 {
                out.set(r, true);
            }
        }
        Ok(out)
    }

    /// `[self | other]`.
    pub fn hstack(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: other.rows,
            });
        }
        let mut out = BitMatrix::zeros(self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in self.row(r).iter_ones() {
                out.set(r, c, true);
            }
            for c in other.row(r).iter_ones() {
                out.set(r, self.cols + c, true);
            }
        }
        Ok(out)
    }

    /// `[self ; other]`.
    pub fn vstack(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.cols,
            });
        }
        let mut out = self.clone();
        out.data.extend_from_slice(&other.data);
        out.rows += other.rows;
        Ok(out)
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &BitMatrix) -> BitMatrix {
        let mut out = BitMatrix::zeros(self.rows * other.rows, self.cols * other.cols);
        for r1 in 0..self.rows {
            for c1 in self.row(r1).iter_ones() {
                for r2 in 0..other.rows {
                    for c2 in other.row(r2).iter_ones() {
                        out.set(r1 * other.rows + r2, c1 * other.cols + c2, true);
                    }
                }
            }
        }
        out
    }

    pub fn select_columns(&self, cols: &[usize]) -> BitMatrix {
        let mut out = BitMatrix::zeros(self.rows, cols.len());
        for r in 0..self.rows {
            for (j, &c) in cols.iter().enumerate() {
                if self.get(r, c) {
                    out.set(r, j, true);
                }
            }
        }
        out
    }

    pub fn select_rows(&self, rows: &[usize]) -> BitMatrix {
        let mut out = BitMatrix::zeros(rows.len(), self.cols);
        for (j, &r) in rows.iter().enumerate() {
            let src = self.row_words(r).to_vec();
            out.row_words_mut(j).copy_from_slice(&src);
        }
        out
    }

    /// Gauss–Jordan elimination in place, considering only pivot columns
    /// `< limit`. Returns the pivot columns; rows `pivots.len()..` end up
    /// zero on the first `limit` columns.
    fn eliminate(&mut self, limit: usize) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..limit.min(self.cols) {
            if r == self.rows {
                break;
            }
            let wi = c / WORD;
            let mask = 1u64 << (c % WORD);
            let Some(p) = (r..self.rows).find(|&i| self.data[i * self.stride + wi] & mask != 0)
            else {
                continue;
            };
            self.swap_rows(r, p);
            for i in 0..self.rows {
                if i != r && self.data[i * self.stride + wi] & mask != 0 {
                    self.xor_row_from(i, r, wi);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.forward_rank()
    }

    /// Forward elimination only; cheaper than full reduction when only the
    /// rank is needed.
    fn forward_rank(&mut self) -> usize {
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let wi = c / WORD;
            let mask = 1u64 << (c % WORD);
            let Some(p) = (r..self.rows).find(|&i| self.data[i * self.stride + wi] & mask != 0)
            else {
                continue;
            };
            self.swap_rows(r, p);
            for i in r + 1..self.rows {
                if self.data[i * self.stride + wi] & mask != 0 {
                    self.xor_row_from(i, r, wi);
                }
            }
            r += 1;
        }
        r
    }

    /// Unique reduced row-echelon form. Zero rows are dropped.
    pub fn rref(&self) -> Rref {
        let mut m = self.clone();
        let pivots = m.eliminate(m.cols);
        m.rows = pivots.len();
        m.data.truncate(m.rows * m.stride);
        Rref { matrix: m, pivots }
    }

    /// Basis of `{v : vᵀ M = 0}`, one vector per row.
    pub fn left_null_space(&self) -> BitMatrix {
        let aug = self
            .hstack(&BitMatrix::identity(self.rows))
            .expect("row counts agree by construction");
        let mut aug = aug;
        let rank = aug.eliminate(self.cols).len();
        let mut out = BitMatrix::zeros(self.rows - rank, self.rows);
        for (j, r) in (rank..self.rows).enumerate() {
            for c in 0..self.rows {
                if aug.get(r, self.cols + c) {
                    out.set(j, c, true);
                }
            }
        }
        out
    }

    /// Basis of `{x : M x = 0}`, one vector per row.
    pub fn null_space(&self) -> BitMatrix {
        self.transpose().left_null_space()
    }

    /// Some `x` with `M x = b`, or `None` when the system is inconsistent.
    /// Free variables are set to zero.
    pub fn solve(&self, b: &BitVector) -> Result<Option<BitVector>> {
        if b.len() != self.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: b.len(),
            });
        }
        let mut bm = BitMatrix::zeros(self.rows, 1);
        for i in b.iter_ones() {
            bm.set(i, 0, true);
        }
        Ok(self.solve_many(&bm)?.map(|x| x.column(0)))
    }

    /// Some `X` with `M X = B` (one elimination for all columns of `B`),
    /// or `None` when any column is inconsistent. Free variables are zero.
    pub fn solve_many(&self, b: &BitMatrix) -> Result<Option<BitMatrix>> {
        if b.rows != self.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: b.rows,
            });
        }
        let mut aug = self.hstack(b)?;
        let pivots = aug.eliminate(self.cols);
        for r in pivots.len()..self.rows {
            if (0..b.cols).any(|c| aug.get(r, self.cols + c)) {
                return Ok(None);
            }
        }
        let mut x = BitMatrix::zeros(self.cols, b.cols);
        for (r, &c) in pivots.iter().enumerate() {
            for j in 0..b.cols {
                if aug.get(r, self.cols + j) {
                    x.set(c, j, true);
                }
            }
        }
        Ok(Some(x))
    }

    /// True when `v` lies in the row space.
    pub fn row_space_contains(&self, v: &BitVector) -> bool {
        self.transpose()
            .solve(v)
            .map(|s| s.is_some())
            .unwrap_or(false)
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                write!(f, "{}", u8::from(self.get(r, c)))?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Incremental reducer against a fixed row space: keeps an echelon basis
/// and reduces new vectors against it. Used to quotient by check groups.
#[derive(Clone, Debug)]
pub struct EchelonBasis {
    len: usize,
    rows: Vec<BitVector>,
    pivots: Vec<usize>,
}

impl EchelonBasis {
    pub fn new(len: usize) -> Self {
        Self {
            len,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn from_matrix(m: &BitMatrix) -> Self {
        let mut b = Self::new(m.cols());
        for r in 0..m.rows() {
            b.insert(m.row(r));
        }
        b
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the basis in place.
    pub fn reduce(&self, v: &mut BitVector) {
        debug_assert_eq!(v.len(), self.len);
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if v.get(p) {
                v.xor_assign(row);
            }
        }
    }

    /// Adds `v` to the span. Returns false when it was already contained.
    pub fn insert(&mut self, mut v: BitVector) -> bool {
        self.reduce(&mut v);
        let lead = v.iter_ones().next();
        match lead {
            None => false,
            Some(p) => {
                self.rows.push(v);
                self.pivots.push(p);
                true
            }
        }
    }

    pub fn contains(&self, v: &BitVector) -> bool {
        let mut v = v.clone();
        self.reduce(&mut v);
        v.is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    // Unpacked reference implementation: one byte per bit.
    fn dense_rank(rows: &[Vec<u8>]) -> usize {
        let mut m: Vec<Vec<u8>> = rows.to_vec();
        let ncols = m.first().map_or(0, Vec::len);
        let mut r = 0;
        for c in 0..ncols {
            if let Some(p) = (r..m.len()).find(|&i| m[i][c] == 1) {
                m.swap(r, p);
                for i in 0..m.len() {
                    if i != r && m[i][c] == 1 {
                        let pr = m[r].clone();
                        for (a, b) in m[i].iter_mut().zip(pr) {
                            *a ^= b;
                        }
                    }
                }
                r += 1;
            }
        }
        r
    }

    fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> BitMatrix {
        let mut m = BitMatrix::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m.set(r, c, rng.random());
            }
        }
        m
    }

    fn to_bytes(m: &BitMatrix) -> Vec<Vec<u8>> {
        (0..m.rows())
            .map(|r| (0..m.cols()).map(|c| u8::from(m.get(r, c))).collect())
            .collect()
    }

    // Enumerates the whole row space (≤ 2^rows combinations).
    fn row_space(m: &BitMatrix) -> std::collections::BTreeSet<Vec<bool>> {
        let mut out = std::collections::BTreeSet::new();
        for mask in 0u32..(1 << m.rows()) {
            let mut v = BitVector::zeros(m.cols());
            for r in 0..m.rows() {
                if mask >> r & 1 == 1 {
                    v.xor_assign(&m.row(r));
                }
            }
            out.insert(v.to_bools());
        }
        out
    }

    #[test]
    fn rank_of_identity_and_zero() {
        assert_eq!(BitMatrix::identity(4).rank(), 4);
        assert_eq!(BitMatrix::zeros(3, 5).rank(), 0);
    }

    #[test]
    fn rank_matches_dense_elimination_and_row_combinations() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let m = random_matrix(&mut rng, 6, 9);
            let r = m.rank();
            assert_eq!(r, dense_rank(&to_bytes(&m)));
            // 2^rank distinct row combinations
            assert_eq!(row_space(&m).len(), 1 << r);
        }
    }

    #[test]
    fn rref_identity_and_duplicate_rows() {
        let id = BitMatrix::identity(5).rref();
        assert_eq!(id.matrix, BitMatrix::identity(5));
        assert_eq!(id.pivots, vec![0, 1, 2, 3, 4]);

        let m = BitMatrix::from_bool_rows(&[vec![true, false, true], vec![true, false, true]]);
        let r = m.rref();
        assert_eq!(r.matrix.rows(), 1);
        assert_eq!(r.matrix.row(0).to_bools(), vec![true, false, true]);
    }

    #[test]
    fn rref_preserves_row_space() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..100 {
            let m = random_matrix(&mut rng, 5, 7);
            let r = m.rref();
            assert_eq!(row_space(&m), row_space(&r.matrix));
            assert!(r.pivots.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn left_null_space_small_cases() {
        assert_eq!(BitMatrix::identity(4).left_null_space().rows(), 0);
        let m = BitMatrix::from_bool_rows(&[vec![true, true, false], vec![true, true, false]]);
        let n = m.left_null_space();
        assert_eq!(n.rows(), 1);
        assert_eq!(n.row(0).to_bools(), vec![true, true]);
    }

    #[test]
    fn left_null_space_exhaustive() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..50 {
            let m = random_matrix(&mut rng, 8, 5);
            let ns = m.left_null_space();
            assert_eq!(ns.rows(), 8 - m.rank());
            let mt = m.transpose();
            for r in 0..ns.rows() {
                assert!(mt.mul_vec(&ns.row(r)).unwrap().is_zero());
            }
            // count all null vectors by brute force
            let mut count = 0;
            for mask in 0u32..256 {
                let v = BitVector::from_indices(8, (0..8).filter(|i| mask >> i & 1 == 1));
                if mt.mul_vec(&v).unwrap().is_zero() {
                    count += 1;
                }
            }
            assert_eq!(count, 1 << ns.rows());
            assert_eq!(ns.rank(), ns.rows());
        }
    }

    #[test]
    fn solve_identity_and_inconsistent() {
        let b = BitVector::from_bools(&[true, false, true, true]);
        assert_eq!(BitMatrix::identity(4).solve(&b).unwrap(), Some(b.clone()));

        let m = BitMatrix::from_bool_rows(&[vec![true, false], vec![false, false]]);
        let b = BitVector::from_bools(&[false, true]);
        assert_eq!(m.solve(&b).unwrap(), None);
        assert!(matches!(
            m.solve(&BitVector::zeros(3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn solve_full_rank_matches_exhaustive_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let mut checked = 0;
        while checked < 50 {
            let m = random_matrix(&mut rng, 6, 6);
            if m.rank() < 6 {
                continue;
            }
            let mut b = BitVector::zeros(6);
            for i in 0..6 {
                b.set(i, rng.random());
            }
            let found: Vec<BitVector> = (0u32..64)
                .map(|mask| BitVector::from_indices(6, (0..6).filter(|i| mask >> i & 1 == 1)))
                .filter(|x| m.mul_vec(x).unwrap() == b)
                .collect();
            assert_eq!(found.len(), 1);
            assert_eq!(m.solve(&b).unwrap(), Some(found[0].clone()));
            checked += 1;
        }
    }

    #[test]
    fn solve_many_matches_columnwise_solve() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for _ in 0..100 {
            let m = random_matrix(&mut rng, 7, 5);
            let x = random_matrix(&mut rng, 5, 3);
            let b = m.mul(&x).unwrap();
            let sol = m.solve_many(&b).unwrap().unwrap();
            assert_eq!(m.mul(&sol).unwrap(), b);
            for j in 0..3 {
                assert_eq!(sol.column(j), m.solve(&b.column(j)).unwrap().unwrap());
            }
        }
    }

    #[test]
    fn echelon_basis_membership() {
        let m = BitMatrix::from_bool_rows(&[vec![true, true, false], vec![false, true, true]]);
        let basis = EchelonBasis::from_matrix(&m);
        assert_eq!(basis.rank(), 2);
        assert!(basis.contains(&BitVector::from_bools(&[true, false, true])));
        assert!(!basis.contains(&BitVector::from_bools(&[true, false, false])));
    }

    fn arb_matrix(max: usize) -> impl Strategy<Value = BitMatrix> {
        (1..=max, 1..=max).prop_flat_map(|(r, c)| {
            proptest::collection::vec(any::<bool>(), r * c).prop_map(move |bits| {
                let rows: Vec<Vec<bool>> = bits.chunks(c).map(<[bool]>::to_vec).collect();
                BitMatrix::from_bool_rows(&rows)
            })
        })
    }

    proptest! {
        #[test]
        fn rank_nullity(m in arb_matrix(12)) {
            prop_assert_eq!(m.rank() + m.left_null_space().rows(), m.rows());
        }

        #[test]
        fn rank_equals_transpose_rank(m in arb_matrix(12)) {
            prop_assert_eq!(m.rank(), m.transpose().rank());
        }

        #[test]
        fn rref_is_idempotent(m in arb_matrix(12)) {
            let once = m.rref().matrix;
            prop_assert_eq!(once.rref().matrix, once);
        }

        #[test]
        fn agrees_with_unpacked_reference(m in arb_matrix(8)) {
            prop_assert_eq!(m.rank(), dense_rank(&to_bytes(&m)));
            let ns = m.left_null_space();
            let mt = m.transpose();
            for r in 0..ns.rows() {
                prop_assert!(mt.mul_vec(&ns.row(r)).unwrap().is_zero());
            }
            // solve: b taken from the column space must be solvable
            let x = BitVector::from_indices(m.cols(), (0..m.cols()).step_by(2));
            let b = m.mul_vec(&x).unwrap();
            let sol = m.solve(&b).unwrap().expect("consistent system");
            prop_assert_eq!(m.mul_vec(&sol).unwrap(), b);
        }
    }
}
