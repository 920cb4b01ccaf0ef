//! Bit-packed matrices over GF(2).
//!
//! Parity-check and generator matrices are small (at most a few dozen rows
//! and columns) but sit inside hot verification loops, so rows are packed
//! into `u64` words and row operations are word-wise XOR.

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::scalar::Real;
use std::fmt;
use std::str::FromStr;

const WORD_BITS: usize = 64;

/// Dense binary matrix with row-major bit packing.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinMatrix {
    rows: usize,
    cols: usize,
    words_per_row: usize,
    bits: Vec<u64>,
}

impl BinMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words_per_row = cols.div_ceil(WORD_BITS).max(1);
        BinMatrix {
            rows,
            cols,
            words_per_row,
            bits: vec![0; rows * words_per_row],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = BinMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Build from a row-major slice of 0/1 bytes.
    pub fn from_bits(rows: usize, cols: usize, data: &[u8]) -> Self {
        assert_eq!(data.len(), rows * cols, "bit slice has wrong length");
        let mut m = BinMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                if data[i * cols + j] != 0 {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        debug_assert!(i < self.rows && j < self.cols);
        let w = self.bits[i * self.words_per_row + j / WORD_BITS];
        (w >> (j % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        debug_assert!(i < self.rows && j < self.cols);
        let w = &mut self.bits[i * self.words_per_row + j / WORD_BITS];
        let mask = 1u64 << (j % WORD_BITS);
        if v {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    fn row_words(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words_per_row..(i + 1) * self.words_per_row]
    }

    /// XOR row `src` into row `dst`.
    pub fn xor_rows(&mut self, dst: usize, src: usize) {
        let (d, s) = (dst * self.words_per_row, src * self.words_per_row);
        for k in 0..self.words_per_row {
            let v = self.bits[s + k];
            self.bits[d + k] ^= v;
        }
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for k in 0..self.words_per_row {
            self.bits
                .swap(a * self.words_per_row + k, b * self.words_per_row + k);
        }
    }

    pub fn row_weight(&self, i: usize) -> usize {
        self.row_words(i).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero_row(&self, i: usize) -> bool {
        self.row_words(i).iter().all(|&w| w == 0)
    }

    /// Column indices of the ones in row `i`.
    pub fn ones_in_row(&self, i: usize) -> Vec<usize> {
        (0..self.cols).filter(|&j| self.get(i, j)).collect()
    }

    /// Column `j` packed into words over the row index.
    pub fn column_bits(&self, j: usize) -> Vec<u64> {
        let mut out = vec![0u64; self.rows.div_ceil(WORD_BITS).max(1)];
        for i in 0..self.rows {
            if self.get(i, j) {
                out[i / WORD_BITS] |= 1 << (i % WORD_BITS);
            }
        }
        out
    }

    pub fn transpose(&self) -> BinMatrix {
        let mut t = BinMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                if self.get(i, j) {
                    t.set(j, i, true);
                }
            }
        }
        t
    }

    /// New matrix keeping `keep` columns in the given order.
    pub fn select_columns(&self, keep: &[usize]) -> BinMatrix {
        let mut m = BinMatrix::zeros(self.rows, keep.len());
        for i in 0..self.rows {
            for (jj, &j) in keep.iter().enumerate() {
                if self.get(i, j) {
                    m.set(i, jj, true);
                }
            }
        }
        m
    }

    /// New matrix keeping `keep` rows in the given order.
    pub fn select_rows(&self, keep: &[usize]) -> BinMatrix {
        let mut m = BinMatrix::zeros(keep.len(), self.cols);
        for (ii, &i) in keep.iter().enumerate() {
            for j in 0..self.cols {
                if self.get(i, j) {
                    m.set(ii, j, true);
                }
            }
        }
        m
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hconcat(&self, other: &BinMatrix) -> BinMatrix {
        assert_eq!(self.rows, other.rows, "hconcat row mismatch");
        let mut m = BinMatrix::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                if self.get(i, j) {
                    m.set(i, j, true);
                }
            }
            for j in 0..other.cols {
                if other.get(i, j) {
                    m.set(i, self.cols + j, true);
                }
            }
        }
        m
    }

    /// ASCII 0/1 grid, one row per line.
    pub fn to_ascii(&self) -> String {
        let mut s = String::with_capacity(self.rows * (self.cols + 1));
        for i in 0..self.rows {
            for j in 0..self.cols {
                s.push(if self.get(i, j) { '1' } else { '0' });
            }
            if i + 1 < self.rows {
                s.push('\n');
            }
        }
        s
    }
}

impl fmt::Display for BinMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_ascii())
    }
}

impl fmt::Debug for BinMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BinMatrix {}x{}", self.rows, self.cols)?;
        write!(f, "{}", self.to_ascii())
    }
}

impl FromStr for BinMatrix {
    type Err = Error;

    /// Parse an ASCII grid: one row per line, `0`/`1` with optional spaces.
    fn from_str(s: &str) -> Result<Self> {
        let mut rows: Vec<Vec<u8>> = Vec::new();
        for line in s.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut row = Vec::new();
            for ch in line.chars() {
                match ch {
                    '0' => row.push(0),
                    '1' => row.push(1),
                    ' ' | '\t' | ',' => {}
                    _ => {
                        return Err(Error::InvalidConfig(format!(
                            "unexpected character `{ch}` in matrix grid"
                        )))
                    }
                }
            }
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(Error::InvalidConfig("empty matrix grid".into()));
        }
        let cols = rows[0].len();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidConfig("ragged matrix grid".into()));
        }
        let flat: Vec<u8> = rows.concat();
        Ok(BinMatrix::from_bits(rows.len(), cols, &flat))
    }
}

/// Product over GF(2).
pub fn matmul_gf2(a: &BinMatrix, b: &BinMatrix) -> Result<BinMatrix> {
    if a.cols != b.rows {
        return Err(Error::DimensionMismatch(format!(
            "matmul_gf2: {}x{} times {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    let mut out = BinMatrix::zeros(a.rows, b.cols);
    for i in 0..a.rows {
        for t in 0..a.cols {
            if a.get(i, t) {
                out.xor_row_from(i, b, t);
            }
        }
    }
    Ok(out)
}

impl BinMatrix {
    fn xor_row_from(&mut self, dst: usize, other: &BinMatrix, src: usize) {
        debug_assert_eq!(self.words_per_row, other.words_per_row);
        let d = dst * self.words_per_row;
        let s = src * other.words_per_row;
        for k in 0..self.words_per_row {
            self.bits[d + k] ^= other.bits[s + k];
        }
    }
}

/// Rank over GF(2) by Gaussian elimination.
pub fn rank_gf2(m: &BinMatrix) -> usize {
    let mut a = m.clone();
    let mut rank = 0;
    for col in 0..a.cols {
        if rank == a.rows {
            break;
        }
        let pivot = (rank..a.rows).find(|&r| a.get(r, col));
        let Some(p) = pivot else { continue };
        a.swap_rows(rank, p);
        for r in 0..a.rows {
            if r != rank && a.get(r, col) {
                a.xor_rows(r, rank);
            }
        }
        rank += 1;
    }
    rank
}

/// Reduce a full-row-rank matrix to standard form `[I | P]`.
///
/// Returns the reduced matrix and the column permutation that was applied:
/// `perm[new_position] = original_column`. Row reduction keeps the row space;
/// the permutation yields an equivalent code.
pub fn standard_form(g: &BinMatrix) -> Result<(BinMatrix, Vec<usize>)> {
    let mut a = g.clone();
    let mut pivots: Vec<usize> = Vec::with_capacity(a.rows);
    let mut rank = 0;
    for col in 0..a.cols {
        if rank == a.rows {
            break;
        }
        let pivot = (rank..a.rows).find(|&r| a.get(r, col));
        let Some(p) = pivot else { continue };
        a.swap_rows(rank, p);
        for r in 0..a.rows {
            if r != rank && a.get(r, col) {
                a.xor_rows(r, rank);
            }
        }
        pivots.push(col);
        rank += 1;
    }
    if rank < a.rows {
        return Err(Error::RankDeficient);
    }
    let mut perm = pivots.clone();
    perm.extend((0..a.cols).filter(|c| !pivots.contains(c)));
    Ok((a.select_columns(&perm), perm))
}

/// Interpret 0/1 entries as real numbers.
pub fn lift_to_real<T: Real>(m: &BinMatrix) -> Mat<T> {
    Mat::from_fn(m.rows(), m.cols(), |i, j| {
        if m.get(i, j) {
            T::one()
        } else {
            T::zero()
        }
    })
}
