//! Dense linear algebra over GF(2).
//!
//! Rows are packed into `u64` words, so row operations are word-wise XORs.

use std::fmt;

use crate::error::{Error, Result};

const W: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    bits: Vec<u64>,
}

impl BinMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = cols.div_ceil(W).max(1);
        BinMatrix { rows, cols, stride, bits: vec![0; rows * stride] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                if f(i, j) {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    /// Builds a matrix from rows of 0/1 values. Panics on ragged input.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            assert_eq!(r.len(), cols, "ragged rows");
            for (j, &v) in r.iter().enumerate() {
                m.set(i, j, v & 1 == 1);
            }
        }
        m
    }

    /// Builds a matrix whose row `i` has bit `j` equal to bit `j` of `masks[i]`.
    pub fn from_row_masks(cols: usize, masks: &[u64]) -> Self {
        assert!(cols <= W);
        let mut m = Self::zeros(masks.len(), cols);
        let keep = if cols == W { !0 } else { (1u64 << cols) - 1 };
        for (i, &r) in masks.iter().enumerate() {
            m.bits[i * m.stride] = r & keep;
        }
        m
    }

    /// Row `i` as a bitmask. Only valid for matrices with at most 64 columns.
    pub fn row_mask(&self, i: usize) -> u64 {
        debug_assert!(self.cols <= W);
        self.bits[i * self.stride]
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
    pub fn get(&self, i: usize, j: usize) -> bool {
        debug_assert!(i < self.rows && j < self.cols);
        (self.bits[i * self.stride + j / W] >> (j % W)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        debug_assert!(i < self.rows && j < self.cols);
        let w = &mut self.bits[i * self.stride + j / W];
        let b = 1u64 << (j % W);
        if v {
            *w |= b;
        } else {
            *w &= !b;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize, j: usize) {
        self.bits[i * self.stride + j / W] ^= 1u64 << (j % W);
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.stride..(i + 1) * self.stride]
    }

    /// `row[dst] ^= row[src]`
    pub fn add_row(&mut self, src: usize, dst: usize) {
        debug_assert_ne!(src, dst);
        let s = self.stride;
        for k in 0..s {
            let v = self.bits[src * s + k];
            self.bits[dst * s + k] ^= v;
        }
    }

    /// `col[dst] ^= col[src]`
    pub fn add_col(&mut self, src: usize, dst: usize) {
        debug_assert_ne!(src, dst);
        for i in 0..self.rows {
            if self.get(i, src) {
                self.flip(i, dst);
            }
        }
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let s = self.stride;
        for k in 0..s {
            self.bits.swap(a * s + k, b * s + k);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            let (x, y) = (self.get(i, a), self.get(i, b));
            self.set(i, a, y);
            self.set(i, b, x);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && *self == Self::identity(self.rows)
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && *self == self.transpose()
    }

    pub fn is_lower_triangular(&self) -> bool {
        (0..self.rows).all(|i| (i + 1..self.cols).all(|j| !self.get(i, j)))
    }

    pub fn is_upper_triangular(&self) -> bool {
        (0..self.rows).all(|i| (0..i.min(self.cols)).all(|j| !self.get(i, j)))
    }

    pub fn is_diagonal(&self) -> bool {
        self.is_lower_triangular() && self.is_upper_triangular()
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} + {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = self.clone();
        for (a, b) in out.bits.iter_mut().zip(&other.bits) {
            *a ^= b;
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        let s = out.stride;
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self.get(i, k) {
                    let src = other.row(k);
                    for (d, v) in out.bits[i * s..(i + 1) * s].iter_mut().zip(src) {
                        *d ^= v;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Product for callers that already know the shapes agree.
    pub fn dot(&self, other: &Self) -> Self {
        self.mul(other).expect("shape mismatch")
    }

    pub fn submatrix(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |i, j| self.get(r0 + i, c0 + j))
    }

    /// Assembles `[[a, b], [c, d]]`.
    pub fn from_blocks(a: &Self, b: &Self, c: &Self, d: &Self) -> Self {
        assert!(a.rows == b.rows && c.rows == d.rows && a.cols == c.cols && b.cols == d.cols);
        let (r, k) = (a.rows, a.cols);
        Self::from_fn(a.rows + c.rows, a.cols + b.cols, |i, j| match (i < r, j < k) {
            (true, true) => a.get(i, j),
            (true, false) => b.get(i, j - k),
            (false, true) => c.get(i - r, j),
            (false, false) => d.get(i - r, j - k),
        })
    }

    /// Applies `x -> M x` to a vector given as a bitmask (at most 64 columns).
    pub fn apply(&self, x: u64) -> u64 {
        let mut y = 0;
        for i in 0..self.rows {
            if (self.row_mask(i) & x).count_ones() & 1 == 1 {
                y |= 1 << i;
            }
        }
        y
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut r = 0;
        for c in 0..m.cols {
            let Some(p) = (r..m.rows).find(|&i| m.get(i, c)) else { continue };
            m.swap_rows(r, p);
            for i in r + 1..m.rows {
                if m.get(i, c) {
                    m.add_row(r, i);
                }
            }
            r += 1;
        }
        r
    }

    pub fn invert(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "cannot invert {}x{}",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let mut m = self.clone();
        let mut inv = Self::identity(n);
        for c in 0..n {
            let p = (c..n).find(|&i| m.get(i, c)).ok_or(Error::SingularMatrix)?;
            m.swap_rows(c, p);
            inv.swap_rows(c, p);
            for i in 0..n {
                if i != c && m.get(i, c) {
                    m.add_row(c, i);
                    inv.add_row(c, i);
                }
            }
        }
        Ok(inv)
    }

    /// Conjugation by the index-reversal permutation: `R M R`.
    pub fn reversed(&self) -> Self {
        let (r, c) = (self.rows, self.cols);
        Self::from_fn(r, c, |i, j| self.get(r - 1 - i, c - 1 - j))
    }

    /// Permutation matrix with `P[p[j]][j] = 1`, i.e. `(P x)[p[j]] = x[j]`.
    pub fn permutation(p: &[usize]) -> Self {
        let mut m = Self::zeros(p.len(), p.len());
        for (j, &i) in p.iter().enumerate() {
            m.set(i, j, true);
        }
        m
    }
}

impl fmt::Debug for BinMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BinMatrix {}x{}", self.rows, self.cols)?;
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for BinMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let line: Vec<&str> =
                (0..self.cols).map(|j| if self.get(i, j) { "1" } else { "0" }).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

/// A matrix with at most one 1 in each row and each column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermPattern {
    pub rows: usize,
    pub cols: usize,
    /// `(row, col)` pairs, sorted by row.
    pub entries: Vec<(usize, usize)>,
}

impl PermPattern {
    pub fn new(rows: usize, cols: usize, mut entries: Vec<(usize, usize)>) -> Result<Self> {
        entries.sort_unstable();
        let mut seen_r = vec![false; rows];
        let mut seen_c = vec![false; cols];
        for &(i, j) in &entries {
            if i >= rows || j >= cols || seen_r[i] || seen_c[j] {
                return Err(Error::DimensionMismatch(format!("bad pattern entry ({i},{j})")));
            }
            seen_r[i] = true;
            seen_c[j] = true;
        }
        Ok(PermPattern { rows, cols, entries })
    }

    pub fn rank(&self) -> usize {
        self.entries.len()
    }

    pub fn to_matrix(&self) -> BinMatrix {
        let mut m = BinMatrix::zeros(self.rows, self.cols);
        for &(i, j) in &self.entries {
            m.set(i, j, true);
        }
        m
    }

    /// Reads the pattern off a matrix that is already one.
    fn from_matrix(m: &BinMatrix) -> Self {
        let mut entries = vec![];
        for i in 0..m.rows {
            for j in 0..m.cols {
                if m.get(i, j) {
                    entries.push((i, j));
                }
            }
        }
        PermPattern::new(m.rows, m.cols, entries).expect("not a permutation pattern")
    }
}

/// `m = L · P · U` with `L` lower and `U` upper unitriangular.
///
/// Columns are scanned left to right; the pivot is the topmost unused row
/// holding a 1. Entries below the pivot are cleared by row operations and
/// entries to its right by column operations.
pub fn lpu_decompose(m: &BinMatrix) -> Result<(BinMatrix, PermPattern, BinMatrix)> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch("lpu needs a square matrix".into()));
    }
    let n = m.rows;
    let mut w = m.clone();
    let mut l = BinMatrix::identity(n);
    let mut u = BinMatrix::identity(n);
    let mut used = vec![false; n];
    for c in 0..n {
        let Some(r) = (0..n).find(|&i| !used[i] && w.get(i, c)) else { continue };
        used[r] = true;
        for i in r + 1..n {
            if w.get(i, c) {
                w.add_row(r, i);
                l.add_col(i, r);
            }
        }
        for j in c + 1..n {
            if w.get(r, j) {
                w.add_col(c, j);
                u.add_row(j, c);
            }
        }
    }
    Ok((l, PermPattern::from_matrix(&w), u))
}

/// `m = L1 · P · L2` with both outer factors lower unitriangular.
///
/// Pivots start in the upper right corner: rows are taken top to bottom and
/// each pivot is the rightmost 1 of its row. Entries below it are cleared by
/// row operations, entries to its left by column operations.
pub fn lpl_decompose(m: &BinMatrix) -> Result<(BinMatrix, PermPattern, BinMatrix)> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch("lpl needs a square matrix".into()));
    }
    let n = m.rows;
    let mut w = m.clone();
    let mut l1 = BinMatrix::identity(n);
    let mut l2 = BinMatrix::identity(n);
    for r in 0..n {
        let Some(c) = (0..n).rev().find(|&j| w.get(r, j)) else { continue };
        for i in r + 1..n {
            if w.get(i, c) {
                w.add_row(r, i);
                l1.add_col(i, r);
            }
        }
        for j in 0..c {
            if w.get(r, j) {
                w.add_col(c, j);
                l2.add_row(j, c);
            }
        }
    }
    Ok((l1, PermPattern::from_matrix(&w), l2))
}

/// Writes a symmetric `a` as `U·Uᵗ + Λ` with `U` upper unitriangular and `Λ` diagonal.
///
/// For `i < j`, `(UUᵗ)[i][j] = U[i][j] + Σ_{k>j} U[i][k]·U[j][k]`, so each row is
/// solved right to left once all rows below it are known.
pub fn symmetric_udu(a: &BinMatrix) -> Result<(BinMatrix, BinMatrix)> {
    if !a.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let n = a.rows;
    let mut u = BinMatrix::identity(n);
    for i in (0..n).rev() {
        for j in (i + 1..n).rev() {
            let mut v = a.get(i, j);
            for k in j + 1..n {
                v ^= u.get(i, k) & u.get(j, k);
            }
            u.set(i, j, v);
        }
    }
    let uut = u.dot(&u.transpose());
    let lambda = BinMatrix::from_fn(n, n, |i, j| i == j && (a.get(i, i) ^ uut.get(i, i)));
    Ok((u, lambda))
}
