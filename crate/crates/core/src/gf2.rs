//! Dense bit-packed vectors and matrices over GF(2).
//!
//! Everything here is sized for detector models with at most a few thousand
//! rows, so storage is dense: one `u64` word per 64 bits, rows of a matrix
//! stored back to back.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

const WORD_BITS: usize = 64;

#[inline]
fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD_BITS)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Gf2Error {
    #[error("index {index} out of range for length {len}")]
    OutOfRange { index: usize, len: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("not a permutation of 0..{len}")]
    NotAPermutation { len: usize },
}

/// A fixed-length vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
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
                v.words[i / WORD_BITS] |= 1 << (i % WORD_BITS);
            }
        }
        v
    }

    /// Builds a vector of length `len` with ones at `indices`.
    pub fn from_indices(len: usize, indices: &[usize]) -> Result<Self, Gf2Error> {
        let mut v = Self::zeros(len);
        for &i in indices {
            v.set(i, true)?;
        }
        Ok(v)
    }

    /// Parses a string of `0`/`1` characters, index 0 first.
    pub fn parse_bits(text: &str) -> Option<Self> {
        let bits: Option<Vec<bool>> = text
            .trim()
            .chars()
            .map(|c| match c {
                '0' => Some(false),
                '1' => Some(true),
                _ => None,
            })
            .collect();
        bits.map(|b| Self::from_bools(&b))
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, index: usize) -> Result<bool, Gf2Error> {
        if index >= self.len {
            return Err(Gf2Error::OutOfRange {
                index,
                len: self.len,
            });
        }
        Ok(self.bit(index))
    }

    #[inline]
    pub(crate) fn bit(&self, index: usize) -> bool {
        (self.words[index / WORD_BITS] >> (index % WORD_BITS)) & 1 == 1
    }

    pub fn set(&mut self, index: usize, value: bool) -> Result<(), Gf2Error> {
        if index >= self.len {
            return Err(Gf2Error::OutOfRange {
                index,
                len: self.len,
            });
        }
        let mask = 1u64 << (index % WORD_BITS);
        if value {
            self.words[index / WORD_BITS] |= mask;
        } else {
            self.words[index / WORD_BITS] &= !mask;
        }
        Ok(())
    }

    pub fn flip(&mut self, index: usize) -> Result<(), Gf2Error> {
        if index >= self.len {
            return Err(Gf2Error::OutOfRange {
                index,
                len: self.len,
            });
        }
        self.words[index / WORD_BITS] ^= 1 << (index % WORD_BITS);
        Ok(())
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Indices of the set bits, ascending.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let t = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(wi * WORD_BITS + t)
            })
        })
    }

    pub fn xor(&self, other: &BitVector) -> Result<BitVector, Gf2Error> {
        let mut out = self.clone();
        out.xor_assign(other)?;
        Ok(out)
    }

    pub fn xor_assign(&mut self, other: &BitVector) -> Result<(), Gf2Error> {
        self.check_len(other)?;
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
        Ok(())
    }

    /// Inner product mod 2.
    pub fn dot(&self, other: &BitVector) -> Result<bool, Gf2Error> {
        self.check_len(other)?;
        Ok(self.dot_unchecked(other))
    }

    #[inline]
    fn dot_unchecked(&self, other: &BitVector) -> bool {
        let ones: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        ones & 1 == 1
    }

    /// Lexicographic order with index 0 as the most significant position:
    /// at the first index where the vectors differ, the one holding `0` is
    /// smaller.
    pub fn lex_cmp(&self, other: &BitVector) -> Ordering {
        for (a, b) in self.words.iter().zip(&other.words) {
            let diff = a ^ b;
            if diff != 0 {
                let lowest = diff & diff.wrapping_neg();
                return if a & lowest == 0 {
                    Ordering::Less
                } else {
                    Ordering::Greater
                };
            }
        }
        self.len.cmp(&other.len)
    }

    /// Restriction to the given positions, in the order given.
    pub fn gather(&self, indices: &[usize]) -> BitVector {
        let mut out = BitVector::zeros(indices.len());
        for (k, &i) in indices.iter().enumerate() {
            if self.bit(i) {
                out.words[k / WORD_BITS] |= 1 << (k % WORD_BITS);
            }
        }
        out
    }

    /// Writes `part[k]` into position `indices[k]`.
    pub fn scatter(&mut self, indices: &[usize], part: &BitVector) {
        for (k, &i) in indices.iter().enumerate() {
            let mask = 1u64 << (i % WORD_BITS);
            if part.bit(k) {
                self.words[i / WORD_BITS] |= mask;
            } else {
                self.words[i / WORD_BITS] &= !mask;
            }
        }
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }

    fn check_len(&self, other: &BitVector) -> Result<(), Gf2Error> {
        if self.len != other.len {
            return Err(Gf2Error::DimensionMismatch {
                expected: self.len,
                got: other.len,
            });
        }
        Ok(())
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.bit(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

/// A bijection on `0..len`, stored as the image of each index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn identity(len: usize) -> Self {
        Self((0..len).collect())
    }

    pub fn new(map: Vec<usize>) -> Result<Self, Gf2Error> {
        let len = map.len();
        let mut seen = vec![false; len];
        for &i in &map {
            if i >= len || seen[i] {
                return Err(Gf2Error::NotAPermutation { len });
            }
            seen[i] = true;
        }
        Ok(Self(map))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        Self(inv)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }
}

/// A dense row-major matrix over GF(2).
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
            m.put(i, i, true);
        }
        m
    }

    /// Builds a matrix from nested rows of `0`/`1` values.
    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self, Gf2Error> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Gf2Error::DimensionMismatch {
                    expected: cols,
                    got: row.len(),
                });
            }
            for (j, &b) in row.iter().enumerate() {
                m.put(i, j, b & 1 == 1);
            }
        }
        Ok(m)
    }

    /// Builds a `rows x cols` matrix whose column `j` has ones at `supports[j]`.
    pub fn from_column_supports(rows: usize, supports: &[Vec<usize>]) -> Result<Self, Gf2Error> {
        let mut m = Self::zeros(rows, supports.len());
        for (j, support) in supports.iter().enumerate() {
            for &i in support {
                if i >= rows {
                    return Err(Gf2Error::OutOfRange {
                        index: i,
                        len: rows,
                    });
                }
                m.put(i, j, true);
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> Result<bool, Gf2Error> {
        if row >= self.rows {
            return Err(Gf2Error::OutOfRange {
                index: row,
                len: self.rows,
            });
        }
        if col >= self.cols {
            return Err(Gf2Error::OutOfRange {
                index: col,
                len: self.cols,
            });
        }
        Ok(self.at(row, col))
    }

    pub fn set(&mut self, row: usize, col: usize, value: bool) -> Result<(), Gf2Error> {
        self.get(row, col)?;
        self.put(row, col, value);
        Ok(())
    }

    #[inline]
    pub(crate) fn at(&self, row: usize, col: usize) -> bool {
        (self.data[row * self.stride + col / WORD_BITS] >> (col % WORD_BITS)) & 1 == 1
    }

    #[inline]
    fn put(&mut self, row: usize, col: usize, value: bool) {
        let w = &mut self.data[row * self.stride + col / WORD_BITS];
        let mask = 1u64 << (col % WORD_BITS);
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    fn row_words(&self, row: usize) -> &[u64] {
        &self.data[row * self.stride..(row + 1) * self.stride]
    }

    pub fn row(&self, row: usize) -> BitVector {
        BitVector {
            len: self.cols,
            words: self.row_words(row).to_vec(),
        }
    }

    pub fn column(&self, col: usize) -> BitVector {
        let mut v = BitVector::zeros(self.rows);
        for i in 0..self.rows {
            if self.at(i, col) {
                v.words[i / WORD_BITS] |= 1 << (i % WORD_BITS);
            }
        }
        v
    }

    /// Row indices of the ones in column `col`.
    pub fn column_support(&self, col: usize) -> Vec<usize> {
        (0..self.rows).filter(|&i| self.at(i, col)).collect()
    }

    pub fn count_ones(&self) -> usize {
        self.data.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// `M v` over GF(2).
    pub fn mat_vec(&self, v: &BitVector) -> Result<BitVector, Gf2Error> {
        if v.len != self.cols {
            return Err(Gf2Error::DimensionMismatch {
                expected: self.cols,
                got: v.len,
            });
        }
        let mut out = BitVector::zeros(self.rows);
        for i in 0..self.rows {
            let parity = self
                .row_words(i)
                .iter()
                .zip(&v.words)
                .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones())
                & 1;
            if parity == 1 {
                out.words[i / WORD_BITS] |= 1 << (i % WORD_BITS);
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                if self.at(i, j) {
                    t.put(j, i, true);
                }
            }
        }
        t
    }

    /// Rank by row elimination on a copy. Columns are scanned left to right and
    /// the first row at or below the pivot position with a one is used.
    pub fn rank(&self) -> usize {
        self.clone().row_reduce().len()
    }

    /// Reduces `self` in place to reduced row echelon form and returns the pivot
    /// columns, one per nonzero row.
    pub(crate) fn row_reduce(&mut self) -> Vec<usize> {
        self.row_reduce_leading(self.cols)
    }

    /// Like [`Self::row_reduce`] but only the first `limit` columns are
    /// eligible as pivots; later columns are carried along.
    pub(crate) fn row_reduce_leading(&mut self, limit: usize) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..limit.min(self.cols) {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| self.at(i, c)) else {
                continue;
            };
            self.swap_rows(r, p);
            for i in 0..self.rows {
                if i != r && self.at(i, c) {
                    self.xor_row_into(r, i);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for k in 0..self.stride {
            self.data.swap(a * self.stride + k, b * self.stride + k);
        }
    }

    fn xor_row_into(&mut self, src: usize, dst: usize) {
        for k in 0..self.stride {
            let w = self.data[src * self.stride + k];
            self.data[dst * self.stride + k] ^= w;
        }
    }

    /// `result[i][j] = self[row_perm(i)][col_perm(j)]`.
    pub fn permute(
        &self,
        row_perm: &Permutation,
        col_perm: &Permutation,
    ) -> Result<BitMatrix, Gf2Error> {
        if row_perm.len() != self.rows {
            return Err(Gf2Error::DimensionMismatch {
                expected: self.rows,
                got: row_perm.len(),
            });
        }
        if col_perm.len() != self.cols {
            return Err(Gf2Error::DimensionMismatch {
                expected: self.cols,
                got: col_perm.len(),
            });
        }
        let mut out = BitMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            let src = row_perm.apply(i);
            for j in 0..self.cols {
                if self.at(src, col_perm.apply(j)) {
                    out.put(i, j, true);
                }
            }
        }
        Ok(out)
    }

    /// Sub-matrix on the given rows and columns, in the order given.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> BitMatrix {
        let mut out = BitMatrix::zeros(rows.len(), cols.len());
        for (i, &r) in rows.iter().enumerate() {
            for (j, &c) in cols.iter().enumerate() {
                if self.at(r, c) {
                    out.put(i, j, true);
                }
            }
        }
        out
    }

    /// Places `block` with its top-left corner at `(row, col)`.
    pub fn paste(&mut self, row: usize, col: usize, block: &BitMatrix) -> Result<(), Gf2Error> {
        if row + block.rows > self.rows {
            return Err(Gf2Error::OutOfRange {
                index: row + block.rows,
                len: self.rows,
            });
        }
        if col + block.cols > self.cols {
            return Err(Gf2Error::OutOfRange {
                index: col + block.cols,
                len: self.cols,
            });
        }
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.put(row + i, col + j, block.at(i, j));
            }
        }
        Ok(())
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {}", self.row(i))?;
        }
        write!(f, "]")
    }
}
