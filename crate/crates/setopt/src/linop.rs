//! Dense linear operators (candidate subgradients `T`).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

/// A dense `rows x cols` matrix in row-major order, acting `x -> T x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinOp {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl LinOp {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                context: "LinOp::new",
                expected: rows * cols,
                got: data.len(),
            });
        }
        if !linalg::is_finite(&data) {
            return Err(Error::NonFinite("LinOp entries"));
        }
        Ok(LinOp { rows, cols, data })
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        LinOp {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = LinOp::zero(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// Build from a list of rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |v| v.len());
        if rows.iter().any(|v| v.len() != c) {
            return Err(Error::DimensionMismatch {
                context: "LinOp::from_rows",
                expected: c,
                got: rows.iter().map(|v| v.len()).find(|&l| l != c).unwrap_or(c),
            });
        }
        LinOp::new(r, c, rows.concat())
    }

    /// Rank-one operator `x -> (xstar . x) e`.
    pub fn outer(e: &[f64], xstar: &[f64]) -> Self {
        let mut data = Vec::with_capacity(e.len() * xstar.len());
        for &ei in e {
            for &sj in xstar {
                data.push(ei * sj);
            }
        }
        LinOp {
            rows: e.len(),
            cols: xstar.len(),
            data,
        }
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| linalg::dot(&self.data[i * self.cols..(i + 1) * self.cols], x))
            .collect()
    }

    /// The row functional `y* . T` as a coefficient vector over the domain.
    pub fn compose_functional(&self, y: &[f64]) -> Vec<f64> {
        debug_assert_eq!(y.len(), self.rows);
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| y[i] * self.entry(i, j)).sum())
            .collect()
    }

    pub fn add(&self, other: &LinOp) -> Result<LinOp> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                context: "LinOp::add",
                expected: self.data.len(),
                got: other.data.len(),
            });
        }
        Ok(LinOp {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn scale(&self, s: f64) -> LinOp {
        LinOp {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| s * v).collect(),
        }
    }

    /// Entrywise max-abs difference; in finite dimensions SOT convergence of a
    /// sequence of operators is exactly entrywise convergence.
    pub fn max_abs_diff(&self, other: &LinOp) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn outer_product_matches_expected_shape() {
        let t = LinOp::outer(&[1.0, 0.0], &[1.0]);
        assert_eq!((t.rows, t.cols), (2, 1));
        assert_eq!(t.apply(&[3.0]), vec![3.0, 0.0]);
    }

    #[test]
    fn compose_functional_is_row_action() {
        let t = LinOp::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        assert_eq!(t.compose_functional(&[1.0, 1.0]), vec![4.0, 6.0]);
    }
}
