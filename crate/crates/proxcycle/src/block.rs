//! Linear algebra of the product space `X^m` with `X = R^d`.
//!
//! A [`BlockVector`] is a tuple `x = (x_1, ..., x_m)` of `m` points of
//! `R^d`. The module provides the circular right shift `R`, the
//! orthogonal projections onto the diagonal `Delta = {(x, ..., x)}` and
//! its complement, and the skew operator
//! `T = (1/2m) * sum_{k=1}^{m-1} (m - 2k) R^k`,
//! together with the identities tying them to each other:
//!
//! * `<Tx, x> = 0`,
//! * `(Id/2 + T)(Id - R + 2 P_Delta) = Id`,
//! * `(Id/2 + T)(Id - R) = P_{Delta perp}`.

use crate::error::{Error, Result};

/// An element of the product space `X^m = (R^d)^m`, stored as `m`
/// contiguous blocks of length `d`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockVector {
    data: Vec<f64>,
    m: usize,
    d: usize,
}

impl BlockVector {
    /// Builds a block vector from a flat coordinate list of length `m * d`.
    pub fn new(m: usize, d: usize, data: Vec<f64>) -> Result<Self> {
        if m == 0 || d == 0 {
            return Err(Error::DimensionMismatch(format!(
                "block vector needs m >= 1 and d >= 1, got m = {m}, d = {d}"
            )));
        }
        if data.len() != m * d {
            return Err(Error::DimensionMismatch(format!(
                "expected {} coordinates for m = {m}, d = {d}, got {}",
                m * d,
                data.len()
            )));
        }
        Ok(Self { data, m, d })
    }

    /// The zero vector of `X^m`.
    pub fn zeros(m: usize, d: usize) -> Result<Self> {
        Self::new(m, d, vec![0.0; m * d])
    }

    /// Builds a block vector from explicit blocks, all of equal length.
    pub fn from_blocks(blocks: &[Vec<f64>]) -> Result<Self> {
        let m = blocks.len();
        if m == 0 {
            return Err(Error::DimensionMismatch("no blocks given".into()));
        }
        let d = blocks[0].len();
        for (i, b) in blocks.iter().enumerate() {
            if b.len() != d {
                return Err(Error::DimensionMismatch(format!(
                    "block {i} has length {}, expected {d}",
                    b.len()
                )));
            }
        }
        let mut data = Vec::with_capacity(m * d);
        for b in blocks {
            data.extend_from_slice(b);
        }
        Self::new(m, d, data)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Immutable view of block `i` (0-based).
    pub fn block(&self, i: usize) -> &[f64] {
        &self.data[i * self.d..(i + 1) * self.d]
    }

    /// Mutable view of block `i` (0-based).
    pub fn block_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.d..(i + 1) * self.d]
    }

    /// Flat coordinate slice, block after block.
    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Blocks as owned vectors, convenient for serialization.
    pub fn to_blocks(&self) -> Vec<Vec<f64>> {
        (0..self.m).map(|i| self.block(i).to_vec()).collect()
    }

    fn check_same_shape(&self, rhs: &Self, op: &str) -> Result<()> {
        if self.m != rhs.m || self.d != rhs.d {
            return Err(Error::DimensionMismatch(format!(
                "{op}: left is {}x{}, right is {}x{}",
                self.m, self.d, rhs.m, rhs.d
            )));
        }
        Ok(())
    }

    /// Componentwise sum.
    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.check_same_shape(rhs, "add")?;
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self { data, m: self.m, d: self.d })
    }

    /// Componentwise difference `self - rhs`.
    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.check_same_shape(rhs, "sub")?;
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self { data, m: self.m, d: self.d })
    }

    /// Scalar multiple.
    pub fn scale(&self, s: f64) -> Self {
        let data = self.data.iter().map(|a| a * s).collect();
        Self { data, m: self.m, d: self.d }
    }

    /// `self + s * rhs`.
    pub fn axpy(&self, s: f64, rhs: &Self) -> Result<Self> {
        self.check_same_shape(rhs, "axpy")?;
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a + s * b)
            .collect();
        Ok(Self { data, m: self.m, d: self.d })
    }

    /// Euclidean inner product of the product space.
    pub fn dot(&self, rhs: &Self) -> Result<f64> {
        self.check_same_shape(rhs, "dot")?;
        Ok(self.data.iter().zip(&rhs.data).map(|(a, b)| a * b).sum())
    }

    /// Euclidean norm; the square equals the sum of block norm squares.
    pub fn norm(&self) -> f64 {
        self.data.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    /// Largest coordinate magnitude.
    pub fn norm_inf(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, a| acc.max(a.abs()))
    }

    /// Circular right shift `R: (x_1, ..., x_m) -> (x_m, x_1, ..., x_{m-1})`.
    pub fn shift(&self) -> Self {
        let mut data = Vec::with_capacity(self.m * self.d);
        data.extend_from_slice(self.block(self.m - 1));
        data.extend_from_slice(&self.data[..(self.m - 1) * self.d]);
        Self { data, m: self.m, d: self.d }
    }

    /// `R^k` applied to `self`, with `k` reduced mod `m`.
    pub fn shift_pow(&self, k: usize) -> Self {
        let k = k % self.m;
        if k == 0 {
            return self.clone();
        }
        let cut = (self.m - k) * self.d;
        let mut data = Vec::with_capacity(self.m * self.d);
        data.extend_from_slice(&self.data[cut..]);
        data.extend_from_slice(&self.data[..cut]);
        Self { data, m: self.m, d: self.d }
    }

    /// Mean of the blocks, a point of `R^d`.
    pub fn block_mean(&self) -> Vec<f64> {
        let mut mean = vec![0.0; self.d];
        for i in 0..self.m {
            for (s, v) in mean.iter_mut().zip(self.block(i)) {
                *s += v;
            }
        }
        let inv = 1.0 / self.m as f64;
        for s in &mut mean {
            *s *= inv;
        }
        mean
    }

    /// Orthogonal projection onto the diagonal `Delta`: every block of
    /// the result is the mean of the input blocks.
    pub fn proj_diagonal(&self) -> Self {
        DiagonalVector::new(self.block_mean(), self.m).expand()
    }

    /// Orthogonal projection onto `Delta perp`: `x - P_Delta(x)`; the
    /// blocks of the result sum to zero.
    pub fn proj_diagonal_perp(&self) -> Self {
        let mean = self.block_mean();
        let mut data = self.data.clone();
        for i in 0..self.m {
            for (v, mu) in data[i * self.d..(i + 1) * self.d].iter_mut().zip(&mean) {
                *v -= mu;
            }
        }
        Self { data, m: self.m, d: self.d }
    }

    /// The skew operator `T x = (1/2m) sum_{k=1}^{m-1} (m - 2k) R^k x`.
    /// Vanishes identically for `m = 1` and `m = 2`.
    pub fn skew_t(&self) -> Self {
        let m = self.m;
        let mut out = vec![0.0; m * self.d];
        let inv = 1.0 / (2.0 * m as f64);
        for k in 1..m {
            let coeff = (m as f64 - 2.0 * k as f64) * inv;
            if coeff == 0.0 {
                continue;
            }
            let shifted = self.shift_pow(k);
            for (o, s) in out.iter_mut().zip(&shifted.data) {
                *o += coeff * s;
            }
        }
        Self { data: out, m, d: self.d }
    }

    /// The cyclic gap `Rx - x`; its block mean is always zero.
    pub fn cyclic_gap(&self) -> Self {
        self.shift().sub(self).expect("same shape")
    }
}

/// A point of `R^d` together with the block count it expands to; its
/// expansion `(point, ..., point)` lies in the diagonal `Delta`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalVector {
    point: Vec<f64>,
    m: usize,
}

impl DiagonalVector {
    pub fn new(point: Vec<f64>, m: usize) -> Self {
        Self { point, m }
    }

    pub fn point(&self) -> &[f64] {
        &self.point
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// The block vector `(point, ..., point) in Delta`.
    pub fn expand(&self) -> BlockVector {
        let d = self.point.len();
        let mut data = Vec::with_capacity(self.m * d);
        for _ in 0..self.m {
            data.extend_from_slice(&self.point);
        }
        BlockVector { data, m: self.m, d }
    }
}
