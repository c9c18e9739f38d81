//! Dense bit-packed linear algebra over GF(2).
//!
//! Rows are packed into `u64` words. Bits past `len` in the last word are
//! always zero, so word-level comparisons and popcounts are exact.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::F2Error;

const WORD: usize = 64;

#[inline]
fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

/// A fixed-length vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    /// Vector with ones exactly at `support`.
    ///
    /// # Panics
    /// If an index is `>= len`.
    pub fn from_support(len: usize, support: &[usize]) -> Self {
        let mut v = Self::zeros(len);
        for &i in support {
            v.set(i, true);
        }
        v
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

    /// Unit vector `e_i`.
    pub fn unit(len: usize, i: usize) -> Self {
        Self::from_support(len, &[i])
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// # Panics
    /// If `i >= len`.
    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    /// # Panics
    /// If `i >= len`.
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
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    /// `self ^= other`.
    ///
    /// # Panics
    /// If lengths differ.
    #[inline]
    pub fn xor_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len, "xor of vectors with different lengths");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    pub fn xor(&self, other: &BitVec) -> BitVec {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    /// `self &= other`.
    pub fn and_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len, "and of vectors with different lengths");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= *b;
        }
    }

    /// Clears every bit set in `mask`.
    pub fn clear_mask(&mut self, mask: &BitVec) {
        assert_eq!(self.len, mask.len, "mask length mismatch");
        for (a, b) in self.words.iter_mut().zip(&mask.words) {
            *a &= !*b;
        }
    }

    /// Inner product over GF(2).
    #[inline]
    pub fn dot(&self, other: &BitVec) -> bool {
        assert_eq!(self.len, other.len, "dot of vectors with different lengths");
        let mut acc = 0u32;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= (a & b).count_ones() & 1;
        }
        acc == 1
    }

    /// Number of positions set in both vectors.
    pub fn overlap(&self, other: &BitVec) -> usize {
        assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// True if every set bit of `self` is also set in `other`.
    pub fn is_subset_of(&self, other: &BitVec) -> bool {
        assert_eq!(self.len, other.len);
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let tz = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * WORD + tz)
            })
        })
    }

    pub fn support(&self) -> Vec<usize> {
        self.iter_ones().collect()
    }

    pub fn first_one(&self) -> Option<usize> {
        self.iter_ones().next()
    }

    /// Restriction to `indices`, in the given order.
    pub fn select(&self, indices: &[usize]) -> BitVec {
        let mut out = BitVec::zeros(indices.len());
        for (j, &i) in indices.iter().enumerate() {
            if self.get(i) {
                out.set(j, true);
            }
        }
        out
    }

    /// Inverse of [`BitVec::select`]: places bit `j` at position `indices[j]`.
    pub fn embed(&self, len: usize, indices: &[usize]) -> BitVec {
        assert_eq!(self.len, indices.len(), "embedding index count mismatch");
        let mut out = BitVec::zeros(len);
        for j in self.iter_ones() {
            out.set(indices[j], true);
        }
        out
    }

    pub fn concat(&self, other: &BitVec) -> BitVec {
        let mut out = BitVec::zeros(self.len + other.len);
        for i in self.iter_ones() {
            out.set(i, true);
        }
        for i in other.iter_ones() {
            out.set(self.len + i, true);
        }
        out
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec[")?;
        for i in 0..self.len {
            write!(f, "{}", u8::from(self.get(i)))?;
        }
        write!(f, "]")
    }
}

impl Serialize for BitVec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        (self.len, self.support()).serialize(s)
    }
}

impl<'de> Deserialize<'de> for BitVec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let (len, support): (usize, Vec<usize>) = Deserialize::deserialize(d)?;
        if let Some(&bad) = support.iter().find(|&&i| i >= len) {
            return Err(serde::de::Error::custom(format!(
                "support index {bad} out of range {len}"
            )));
        }
        Ok(BitVec::from_support(len, &support))
    }
}

/// A dense matrix over GF(2), stored as packed rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BitVec>,
}

/// Reduced row-echelon form together with the row operations that produced it.
///
/// `transform * original == reduced`, and the first `pivots.len()` rows of
/// `reduced` are the nonzero ones.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub reduced: BitMatrix,
    pub pivots: Vec<usize>,
    pub transform: BitMatrix,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![BitVec::zeros(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from rows that all have length `cols`.
    ///
    /// # Panics
    /// If a row has the wrong length.
    pub fn from_rows(cols: usize, rows: Vec<BitVec>) -> Self {
        for r in &rows {
            assert_eq!(r.len(), cols, "row length {} != cols {cols}", r.len());
        }
        Self {
            rows: rows.len(),
            cols,
            data: rows,
        }
    }

    /// Builds a matrix from 0/1 entries.
    ///
    /// # Panics
    /// If rows are ragged.
    pub fn from_dense(cols: usize, entries: &[Vec<u8>]) -> Self {
        let rows = entries
            .iter()
            .map(|r| {
                assert_eq!(r.len(), cols, "ragged dense matrix");
                BitVec::from_bools(&r.iter().map(|&b| b & 1 == 1).collect::<Vec<_>>())
            })
            .collect();
        Self::from_rows(cols, rows)
    }

    pub fn from_supports(cols: usize, supports: &[Vec<usize>]) -> Self {
        Self::from_rows(
            cols,
            supports
                .iter()
                .map(|s| BitVec::from_support(cols, s))
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        self.data[r].get(c)
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.data[r].set(c, value);
    }

    pub fn row(&self, r: usize) -> &BitVec {
        &self.data[r]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut BitVec {
        &mut self.data[r]
    }

    pub fn iter_rows(&self) -> std::slice::Iter<'_, BitVec> {
        self.data.iter()
    }

    pub fn into_rows(self) -> Vec<BitVec> {
        self.data
    }

    pub fn push_row(&mut self, row: BitVec) {
        assert_eq!(row.len(), self.cols, "pushed row has wrong length");
        self.data.push(row);
        self.rows += 1;
    }

    pub fn column(&self, c: usize) -> BitVec {
        let mut v = BitVec::zeros(self.rows);
        for (r, row) in self.data.iter().enumerate() {
            if row.get(c) {
                v.set(r, true);
            }
        }
        v
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(BitVec::is_zero)
    }

    pub fn row_supports(&self) -> Vec<Vec<usize>> {
        self.data.iter().map(BitVec::support).collect()
    }

    pub fn max_row_weight(&self) -> usize {
        self.data.iter().map(BitVec::weight).max().unwrap_or(0)
    }

    pub fn max_col_weight(&self) -> usize {
        (0..self.cols)
            .map(|c| self.data.iter().filter(|r| r.get(c)).count())
            .max()
            .unwrap_or(0)
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for (r, row) in self.data.iter().enumerate() {
            for c in row.iter_ones() {
                t.set(c, r, true);
            }
        }
        t
    }

    /// Matrix product `self * other`.
    pub fn matmul(&self, other: &BitMatrix) -> Result<BitMatrix, F2Error> {
        if self.cols != other.rows {
            return Err(F2Error::shape("matmul", self.shape(), other.shape()));
        }
        let data = self
            .data
            .iter()
            .map(|row| {
                let mut acc = BitVec::zeros(other.cols);
                for k in row.iter_ones() {
                    acc.xor_assign(&other.data[k]);
                }
                acc
            })
            .collect();
        Ok(BitMatrix::from_rows(other.cols, data))
    }

    /// Row vector times matrix: `v * self`.
    pub fn left_mul_vec(&self, v: &BitVec) -> Result<BitVec, F2Error> {
        if v.len() != self.rows {
            return Err(F2Error::shape("left_mul_vec", (1, v.len()), self.shape()));
        }
        let mut acc = BitVec::zeros(self.cols);
        for k in v.iter_ones() {
            acc.xor_assign(&self.data[k]);
        }
        Ok(acc)
    }

    /// Matrix times column vector: `self * v`.
    pub fn mul_vec(&self, v: &BitVec) -> Result<BitVec, F2Error> {
        if v.len() != self.cols {
            return Err(F2Error::shape("mul_vec", self.shape(), (v.len(), 1)));
        }
        let mut out = BitVec::zeros(self.rows);
        for (r, row) in self.data.iter().enumerate() {
            if row.dot(v) {
                out.set(r, true);
            }
        }
        Ok(out)
    }

    /// Entrywise sum over GF(2).
    pub fn add(&self, other: &BitMatrix) -> Result<BitMatrix, F2Error> {
        if self.shape() != other.shape() {
            return Err(F2Error::shape("add", self.shape(), other.shape()));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.xor(b))
            .collect();
        Ok(BitMatrix::from_rows(self.cols, data))
    }

    /// Kronecker product: entry `(i*rB + j, k*cB + l)` is `A[i,k] * B[j,l]`.
    pub fn kron(&self, other: &BitMatrix) -> BitMatrix {
        let (rb, cb) = other.shape();
        let mut out = BitMatrix::zeros(self.rows * rb, self.cols * cb);
        for i in 0..self.rows {
            for k in self.data[i].iter_ones() {
                for j in 0..rb {
                    for l in other.data[j].iter_ones() {
                        out.set(i * rb + j, k * cb + l, true);
                    }
                }
            }
        }
        out
    }

    /// Rows of `self` followed by rows of `other`.
    pub fn vstack(&self, other: &BitMatrix) -> Result<BitMatrix, F2Error> {
        if self.cols != other.cols {
            return Err(F2Error::shape("vstack", self.shape(), other.shape()));
        }
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Ok(BitMatrix::from_rows(self.cols, data))
    }

    /// Columns of `self` followed by columns of `other`.
    pub fn hstack(&self, other: &BitMatrix) -> Result<BitMatrix, F2Error> {
        if self.rows != other.rows {
            return Err(F2Error::shape("hstack", self.shape(), other.shape()));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.concat(b))
            .collect();
        Ok(BitMatrix::from_rows(self.cols + other.cols, data))
    }

    pub fn select_rows(&self, rows: &[usize]) -> BitMatrix {
        BitMatrix::from_rows(self.cols, rows.iter().map(|&r| self.data[r].clone()).collect())
    }

    pub fn select_cols(&self, cols: &[usize]) -> BitMatrix {
        BitMatrix::from_rows(
            cols.len(),
            self.data.iter().map(|r| r.select(cols)).collect(),
        )
    }

    /// Submatrix on the given rows and columns.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> BitMatrix {
        BitMatrix::from_rows(
            cols.len(),
            rows.iter().map(|&r| self.data[r].select(cols)).collect(),
        )
    }

    /// `self * 1_keep`: zeroes every column outside `keep`.
    pub fn mask_cols(&self, keep: &[usize]) -> BitMatrix {
        let mask = BitVec::from_support(self.cols, keep);
        let data = self
            .data
            .iter()
            .map(|r| {
                let mut r = r.clone();
                r.and_assign(&mask);
                r
            })
            .collect();
        BitMatrix::from_rows(self.cols, data)
    }

    /// `1_keep * self`: zeroes every row outside `keep`.
    pub fn mask_rows(&self, keep: &[usize]) -> BitMatrix {
        let mut out = BitMatrix::zeros(self.rows, self.cols);
        for &r in keep {
            out.data[r] = self.data[r].clone();
        }
        out
    }

    /// Drops all-zero rows, returning the kept original row indices.
    pub fn drop_zero_rows(&self) -> (BitMatrix, Vec<usize>) {
        let kept: Vec<usize> = (0..self.rows).filter(|&r| !self.data[r].is_zero()).collect();
        (self.select_rows(&kept), kept)
    }

    /// Reduced row-echelon form with the accumulated row operations.
    pub fn echelon(&self) -> Echelon {
        let mut reduced = self.data.clone();
        let mut transform: Vec<BitVec> = (0..self.rows).map(|i| BitVec::unit(self.rows, i)).collect();
        let mut pivots = Vec::new();
        let mut rank = 0;
        for c in 0..self.cols {
            let Some(p) = (rank..self.rows).find(|&r| reduced[r].get(c)) else {
                continue;
            };
            reduced.swap(rank, p);
            transform.swap(rank, p);
            for r in 0..self.rows {
                if r != rank && reduced[r].get(c) {
                    let (pr, pt) = (reduced[rank].clone(), transform[rank].clone());
                    reduced[r].xor_assign(&pr);
                    transform[r].xor_assign(&pt);
                }
            }
            pivots.push(c);
            rank += 1;
            if rank == self.rows {
                break;
            }
        }
        Echelon {
            reduced: BitMatrix::from_rows(self.cols, reduced),
            pivots,
            transform: BitMatrix::from_rows(self.rows, transform),
        }
    }

    /// Reduced row-echelon form with zero rows removed. This is the canonical
    /// basis of the row space.
    pub fn rref(&self) -> BitMatrix {
        let mut reduced = self.data.clone();
        let mut rank = 0;
        for c in 0..self.cols {
            let Some(p) = (rank..reduced.len()).find(|&r| reduced[r].get(c)) else {
                continue;
            };
            reduced.swap(rank, p);
            let pivot = reduced[rank].clone();
            for (r, row) in reduced.iter_mut().enumerate() {
                if r != rank && row.get(c) {
                    row.xor_assign(&pivot);
                }
            }
            rank += 1;
            if rank == reduced.len() {
                break;
            }
        }
        reduced.truncate(rank);
        BitMatrix::from_rows(self.cols, reduced)
    }

    pub fn rank(&self) -> usize {
        let mut rows = self.data.clone();
        let mut rank = 0;
        for c in 0..self.cols {
            let Some(p) = (rank..rows.len()).find(|&r| rows[r].get(c)) else {
                continue;
            };
            rows.swap(rank, p);
            let pivot = rows[rank].clone();
            for row in rows.iter_mut().skip(rank + 1) {
                if row.get(c) {
                    row.xor_assign(&pivot);
                }
            }
            rank += 1;
            if rank == rows.len() {
                break;
            }
        }
        rank
    }

    /// Basis of `{x : self * x = 0}` in reduced row-echelon form.
    pub fn kernel_basis(&self) -> BitMatrix {
        let reduced = self.rref();
        let pivots: Vec<usize> = reduced.iter_rows().map(|r| r.first_one().unwrap()).collect();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let basis: Vec<BitVec> = (0..self.cols)
            .filter(|&f| !is_pivot[f])
            .map(|f| {
                let mut v = BitVec::unit(self.cols, f);
                for (i, &p) in pivots.iter().enumerate() {
                    if reduced.get(i, f) {
                        v.set(p, true);
                    }
                }
                v
            })
            .collect();
        BitMatrix::from_rows(self.cols, basis).rref()
    }

    /// Basis of `{r : r * self = 0}`, i.e. the kernel of the transpose.
    pub fn left_kernel_basis(&self) -> BitMatrix {
        self.transpose().kernel_basis()
    }

    /// Coset representatives of `F_2^cols / rowspace(self)`: standard basis
    /// vectors on the non-pivot columns of the reduced echelon form.
    pub fn quotient_basis(&self) -> BitMatrix {
        let reduced = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for r in reduced.iter_rows() {
            is_pivot[r.first_one().unwrap()] = true;
        }
        let reps = (0..self.cols)
            .filter(|&c| !is_pivot[c])
            .map(|c| BitVec::unit(self.cols, c))
            .collect();
        BitMatrix::from_rows(self.cols, reps)
    }

    /// Finds `x` with `x * self = v`, if one exists.
    pub fn solve_left(&self, v: &BitVec) -> Result<Option<BitVec>, F2Error> {
        self.solver().solve(v)
    }

    pub fn row_space_contains(&self, v: &BitVec) -> Result<bool, F2Error> {
        if v.len() != self.cols {
            return Err(F2Error::shape("row_space_contains", self.shape(), (1, v.len())));
        }
        Ok(RowReducer::from_matrix(self).reduce(v).is_zero())
    }

    /// Precomputes an elimination so many right-hand sides can be solved.
    pub fn solver(&self) -> LeftSolver {
        let ech = self.echelon();
        let rank = ech.rank();
        LeftSolver {
            cols: self.cols,
            rows: self.rows,
            reduced: ech.reduced.data[..rank].to_vec(),
            transform: ech.transform.data[..rank].to_vec(),
            pivots: ech.pivots,
        }
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{} [", self.rows, self.cols)?;
        for r in &self.data {
            write!(f, "  ")?;
            for c in 0..self.cols {
                write!(f, "{}", u8::from(r.get(c)))?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Left-solver for `x * M = v` built from one elimination of `M`.
#[derive(Clone, Debug)]
pub struct LeftSolver {
    cols: usize,
    rows: usize,
    reduced: Vec<BitVec>,
    transform: Vec<BitVec>,
    pivots: Vec<usize>,
}

impl LeftSolver {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn solve(&self, v: &BitVec) -> Result<Option<BitVec>, F2Error> {
        if v.len() != self.cols {
            return Err(F2Error::shape("solve_left", (self.rows, self.cols), (1, v.len())));
        }
        let mut residual = v.clone();
        let mut x = BitVec::zeros(self.rows);
        for (i, &p) in self.pivots.iter().enumerate() {
            if residual.get(p) {
                residual.xor_assign(&self.reduced[i]);
                x.xor_assign(&self.transform[i]);
            }
        }
        Ok(residual.is_zero().then_some(x))
    }
}

/// Incremental row-space basis with membership and rank-extension queries.
///
/// Stored rows are kept fully reduced on their pivot columns.
#[derive(Clone, Debug)]
pub struct RowReducer {
    cols: usize,
    rows: Vec<BitVec>,
    pivots: Vec<usize>,
}

impl RowReducer {
    pub fn new(cols: usize) -> Self {
        Self {
            cols,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn from_matrix(m: &BitMatrix) -> Self {
        let mut r = Self::new(m.cols());
        for row in m.iter_rows() {
            r.insert(row);
        }
        r
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Residual of `v` after eliminating against the stored basis.
    pub fn reduce(&self, v: &BitVec) -> BitVec {
        assert_eq!(v.len(), self.cols, "row reducer length mismatch");
        let mut v = v.clone();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if v.get(p) {
                v.xor_assign(row);
            }
        }
        v
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        self.reduce(v).is_zero()
    }

    /// Adds `v` to the span; returns true if the rank increased.
    pub fn insert(&mut self, v: &BitVec) -> bool {
        let r = self.reduce(v);
        let Some(p) = r.first_one() else {
            return false;
        };
        for row in &mut self.rows {
            if row.get(p) {
                row.xor_assign(&r);
            }
        }
        self.rows.push(r);
        self.pivots.push(p);
        true
    }
}

/// Rows of `candidates` that extend the span of `seed`, chosen greedily in order.
pub fn greedy_extension(seed: &BitMatrix, candidates: &BitMatrix) -> Vec<usize> {
    let mut span = RowReducer::from_matrix(seed);
    (0..candidates.rows())
        .filter(|&i| span.insert(candidates.row(i)))
        .collect()
}
