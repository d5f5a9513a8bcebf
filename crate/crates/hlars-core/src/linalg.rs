//! Dense matrix primitives sized for small design matrices (tens of columns):
//! column standardization, cross products, and least squares on a column subset.

use crate::error::{Error, Result};

/// Pivot threshold for the Cholesky rank check, relative to the largest
/// pivot accepted so far.
const REL_PIVOT_TOL: f64 = 1e-10;

/// Dense `f64` matrix stored column-major: entry `(i, j)` lives at
/// `data[j * rows + i]`. Column-major keeps each column contiguous, which is
/// the dominant access pattern here (standardization, correlations,
/// active-column extraction).
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// Builds a matrix from column-major data.
    ///
    /// Panics if `data.len() != rows * cols` or `rows == 0`.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert!(rows >= 1, "matrix must have at least one row");
        assert_eq!(data.len(), rows * cols, "data length must match dimensions");
        Matrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix::new(rows, cols, vec![0.0; rows * cols])
    }

    /// Builds a matrix from equal-length columns.
    pub fn from_columns(columns: &[Vec<f64>]) -> Self {
        assert!(!columns.is_empty(), "need at least one column");
        let rows = columns[0].len();
        let mut data = Vec::with_capacity(rows * columns.len());
        for col in columns {
            assert_eq!(col.len(), rows, "columns must have equal length");
            data.extend_from_slice(col);
        }
        Matrix::new(rows, columns.len(), data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[col * self.rows + row]
    }

    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.data[col * self.rows + row] = value;
    }

    /// Contiguous view of column `j`.
    pub fn column(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn column_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    /// Copies the listed columns into a new matrix, in the given order.
    pub fn select_columns(&self, indices: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(self.rows * indices.len());
        for &j in indices {
            data.extend_from_slice(self.column(j));
        }
        Matrix::new(self.rows, indices.len(), data)
    }

    /// Matrix-vector product `self * x`.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols, "matvec dimension mismatch");
        let mut out = vec![0.0; self.rows];
        for (j, &xj) in x.iter().enumerate() {
            if xj == 0.0 {
                continue;
            }
            for (o, &v) in out.iter_mut().zip(self.column(j)) {
                *o += xj * v;
            }
        }
        out
    }

    /// Gram matrix `X' X` (symmetric, cols x cols). Requires at least one column.
    pub fn gram(&self) -> Matrix {
        let m = self.cols;
        assert!(m >= 1, "gram of a matrix with no columns");
        let mut g = Matrix::zeros(m, m);
        for i in 0..m {
            for j in i..m {
                let v = dot(self.column(i), self.column(j));
                g.set(i, j, v);
                g.set(j, i, v);
            }
        }
        g
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Per-column centering and scaling applied by [`standardize`].
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct StandardizationRecord {
    /// Column means of the input.
    pub centers: Vec<f64>,
    /// Euclidean norms of the centered columns; strictly positive.
    pub scales: Vec<f64>,
}

/// Centers every column to mean zero and scales it to unit Euclidean norm.
///
/// Returns the standardized matrix together with the centers and scales
/// needed to undo the transform. Fails with [`Error::ConstantColumn`] when a
/// column has zero scale.
pub fn standardize(m: &Matrix) -> Result<(Matrix, StandardizationRecord)> {
    let mut out = m.clone();
    let mut centers = Vec::with_capacity(m.cols());
    let mut scales = Vec::with_capacity(m.cols());
    let n = m.rows() as f64;
    for j in 0..m.cols() {
        let col = out.column_mut(j);
        let mean = col.iter().sum::<f64>() / n;
        for v in col.iter_mut() {
            *v -= mean;
        }
        let norm = col.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < f64::MIN_POSITIVE {
            return Err(Error::ConstantColumn { col: j });
        }
        for v in col.iter_mut() {
            *v /= norm;
        }
        centers.push(mean);
        scales.push(norm);
    }
    Ok((out, StandardizationRecord { centers, scales }))
}

/// Least squares of `y` on the columns of `xa`.
///
/// Solves the normal equations `(xa' xa) coef = xa' y` by Cholesky with a
/// relative pivot tolerance, and returns `(coef, fitted)` with
/// `fitted = xa * coef`. Fails with [`Error::RankDeficient`] naming the first
/// column that is linearly dependent on its predecessors.
pub fn least_squares(xa: &Matrix, y: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    if y.len() != xa.rows() {
        return Err(Error::DimensionMismatch {
            op: "least_squares",
            expected: xa.rows(),
            got: y.len(),
        });
    }
    let gram = xa.gram();
    let xty = crossprod(xa, y)?;
    let coef = solve_spd(&gram, &xty).map_err(|col| Error::RankDeficient { col })?;
    let fitted = xa.matvec(&coef);
    Ok((coef, fitted))
}

/// Cross product `m' v`: entry `j` is the dot product of column `j` with `v`.
pub fn crossprod(m: &Matrix, v: &[f64]) -> Result<Vec<f64>> {
    if v.len() != m.rows() {
        return Err(Error::DimensionMismatch {
            op: "crossprod",
            expected: m.rows(),
            got: v.len(),
        });
    }
    Ok((0..m.cols()).map(|j| dot(m.column(j), v)).collect())
}

/// Solves `g x = b` for symmetric positive-definite `g` via Cholesky.
///
/// A pivot that is not strictly larger than `REL_PIVOT_TOL` times the largest
/// accepted pivot marks the corresponding column as dependent; the error
/// carries its index.
pub(crate) fn solve_spd(g: &Matrix, b: &[f64]) -> std::result::Result<Vec<f64>, usize> {
    let n = g.cols();
    debug_assert_eq!(g.rows(), n);
    debug_assert_eq!(b.len(), n);
    // Lower-triangular factor, column-major in a local buffer.
    let mut l = vec![0.0; n * n];
    let at = |buf: &Vec<f64>, i: usize, j: usize| buf[j * n + i];
    let mut max_pivot = 0.0f64;
    for k in 0..n {
        let mut d = g.get(k, k);
        for j in 0..k {
            let v = at(&l, k, j);
            d -= v * v;
        }
        if d <= REL_PIVOT_TOL * max_pivot || d <= 0.0 {
            return Err(k);
        }
        max_pivot = max_pivot.max(d);
        let lkk = d.sqrt();
        l[k * n + k] = lkk;
        for i in (k + 1)..n {
            let mut v = g.get(i, k);
            for j in 0..k {
                v -= at(&l, i, j) * at(&l, k, j);
            }
            l[k * n + i] = v / lkk;
        }
    }
    // Forward substitution: L z = b.
    let mut z = b.to_vec();
    for i in 0..n {
        for j in 0..i {
            z[i] -= at(&l, i, j) * z[j];
        }
        z[i] /= at(&l, i, i);
    }
    // Back substitution: L' x = z.
    let mut x = z;
    for i in (0..n).rev() {
        for j in (i + 1)..n {
            x[i] -= at(&l, j, i) * x[j];
        }
        x[i] /= at(&l, i, i);
    }
    Ok(x)
}
