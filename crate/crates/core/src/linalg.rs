//! Dense row-major matrices and the minimum-norm least-squares solve backing
//! every output-weight evaluation.
//!
//! The solve is rank-revealing: we take an SVD and treat singular values at or
//! below `rel_cutoff * sigma_max` as exact zeros, so rank-deficient systems
//! yield the minimum-norm solution instead of amplified noise. Everything is
//! f64; constructors reject non-finite input so NaN/Inf never propagates.

use nalgebra::DMatrix;

use crate::error::{Result, ScnError};

/// Dense row-major matrix. Invariants: `rows >= 1`, `cols >= 1`, every entry
/// finite, `data.len() == rows * cols`.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(ScnError::DimensionMismatch(format!(
                "matrix must be non-empty, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(ScnError::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(ScnError::NonFinite(format!(
                "entry ({}, {}) is {}",
                i / cols,
                i % cols,
                data[i]
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(ScnError::DimensionMismatch("no rows given".into()));
        }
        let cols = rows[0].len();
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(ScnError::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {cols}",
                    r.len()
                )));
            }
        }
        Self::from_vec(n, cols, rows.concat())
    }

    /// Builds a matrix from equal-length columns (the trainer accumulates
    /// activation columns and materializes them here before each solve).
    pub fn from_cols(cols: &[Vec<f64>]) -> Result<Self> {
        let l = cols.len();
        if l == 0 {
            return Err(ScnError::DimensionMismatch("no columns given".into()));
        }
        let n = cols[0].len();
        for (j, c) in cols.iter().enumerate() {
            if c.len() != n {
                return Err(ScnError::DimensionMismatch(format!(
                    "column {j} has {} entries, expected {n}",
                    c.len()
                )));
            }
        }
        let mut data = vec![0.0; n * l];
        for (j, c) in cols.iter().enumerate() {
            for (i, v) in c.iter().enumerate() {
                data[i * l + j] = *v;
            }
        }
        Self::from_vec(n, l, data)
    }

    /// All-zero matrix. Zero dimensions are a programmer error here, unlike
    /// the fallible constructors that guard user-supplied data.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "zero-sized matrix");
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn matmul(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.cols != rhs.rows {
            return Err(ScnError::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs.get(k, j);
                }
            }
        }
        Ok(out)
    }

    pub fn sub(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(ScnError::DimensionMismatch(format!(
                "cannot subtract {}x{} from {}x{}",
                rhs.rows, rhs.cols, self.rows, self.cols
            )));
        }
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    /// Rows `lo..hi` as a new matrix.
    pub fn slice_rows(&self, lo: usize, hi: usize) -> Result<Matrix> {
        if lo >= hi || hi > self.rows {
            return Err(ScnError::DimensionMismatch(format!(
                "row range {lo}..{hi} out of bounds for {} rows",
                self.rows
            )));
        }
        Ok(Matrix {
            rows: hi - lo,
            cols: self.cols,
            data: self.data[lo * self.cols..hi * self.cols].to_vec(),
        })
    }

    /// Columns `lo..hi` as a new matrix.
    pub fn slice_cols(&self, lo: usize, hi: usize) -> Result<Matrix> {
        if lo >= hi || hi > self.cols {
            return Err(ScnError::DimensionMismatch(format!(
                "column range {lo}..{hi} out of bounds for {} columns",
                self.cols
            )));
        }
        let cols = hi - lo;
        let mut data = Vec::with_capacity(self.rows * cols);
        for i in 0..self.rows {
            data.extend_from_slice(&self.row(i)[lo..hi]);
        }
        Ok(Matrix {
            rows: self.rows,
            cols,
            data,
        })
    }

    pub fn vstack(top: &Matrix, bottom: &Matrix) -> Result<Matrix> {
        if top.cols != bottom.cols {
            return Err(ScnError::DimensionMismatch(format!(
                "cannot stack {} columns on {} columns",
                bottom.cols, top.cols
            )));
        }
        let mut data = top.data.clone();
        data.extend_from_slice(&bottom.data);
        Ok(Matrix {
            rows: top.rows + bottom.rows,
            cols: top.cols,
            data,
        })
    }
}

/// Inner product of two equal-length vectors.
pub fn col_inner(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.is_empty() {
        return Err(ScnError::DimensionMismatch("empty vectors".into()));
    }
    if u.len() != v.len() {
        return Err(ScnError::DimensionMismatch(format!(
            "vector lengths {} and {} differ",
            u.len(),
            v.len()
        )));
    }
    Ok(u.iter().zip(v).map(|(a, b)| a * b).sum())
}

pub fn frob_norm_sq(m: &Matrix) -> f64 {
    m.data.iter().map(|v| v * v).sum()
}

pub fn frob_norm(m: &Matrix) -> f64 {
    frob_norm_sq(m).sqrt()
}

/// Relative singular-value cutoff for the rank decision.
/// Invariant: `0 < rel_cutoff < 1e-3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveTolerance {
    rel_cutoff: f64,
}

impl SolveTolerance {
    pub fn new(rel_cutoff: f64) -> Result<Self> {
        if !(rel_cutoff > 0.0 && rel_cutoff < 1e-3) {
            return Err(ScnError::InvalidConfig(format!(
                "rel_cutoff must lie in (0, 1e-3), got {rel_cutoff}"
            )));
        }
        Ok(Self { rel_cutoff })
    }

    /// Dimension-scaled default: `max(rows, cols)` times a machine-epsilon
    /// scale constant, the usual pseudoinverse truncation practice. A coarser
    /// cutoff discards directions the residual still needs, which would let
    /// the training error grow between solves.
    pub fn default_for(rows: usize, cols: usize) -> Self {
        let rel_cutoff = rows.max(cols) as f64 * 1e-15;
        Self::new(rel_cutoff).expect("dimension too large for the default cutoff")
    }

    pub fn rel_cutoff(&self) -> f64 {
        self.rel_cutoff
    }
}

/// Minimum-norm least-squares solution of `A X = B`.
///
/// Singular values at or below `rel_cutoff * sigma_max` are treated as zero,
/// so the returned X is the pseudoinverse solution for any rank.
pub fn lstsq_min_norm(a: &Matrix, b: &Matrix, tol: SolveTolerance) -> Result<Matrix> {
    if a.rows != b.rows {
        return Err(ScnError::DimensionMismatch(format!(
            "A has {} rows but B has {}",
            a.rows, b.rows
        )));
    }
    let na = DMatrix::from_row_slice(a.rows, a.cols, &a.data);
    let nb = DMatrix::from_row_slice(b.rows, b.cols, &b.data);
    let svd = na.svd(true, true);
    let sigma_max = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let eps = tol.rel_cutoff * sigma_max;
    let x = svd
        .solve(&nb, eps)
        .map_err(|e| ScnError::Solver(e.to_string()))?;
    let mut data = Vec::with_capacity(a.cols * b.cols);
    for i in 0..a.cols {
        for j in 0..b.cols {
            data.push(x[(i, j)]);
        }
    }
    Matrix::from_vec(a.cols, b.cols, data)
}
