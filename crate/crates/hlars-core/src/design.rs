//! Model-matrix construction: main effects plus squares and pairwise
//! interactions, with per-column term metadata.
//!
//! Product columns are formed on the raw variables first and every column is
//! standardized afterwards, so an interaction column measures the product of
//! the original quantities rather than the product of rescaled ones.

use crate::error::{Error, Result};
use crate::linalg::{standardize, Matrix, StandardizationRecord};

/// What a design-matrix column measures. Variable indices are zero-based;
/// printed names are one-based ("X1", "X2:5").
#[derive(Debug, Clone, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum TermKind {
    /// Raw explanatory variable `i`.
    Main(usize),
    /// Square of variable `i`.
    Square(usize),
    /// Product of distinct variables `i < j`.
    Cross(usize, usize),
    /// One level of a categorical factor.
    Indicator { factor: String, level: String },
}

/// A named design-matrix column.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TermDescriptor {
    pub kind: TermKind,
    pub name: String,
}

impl TermDescriptor {
    pub fn main(i: usize) -> Self {
        TermDescriptor {
            kind: TermKind::Main(i),
            name: format!("X{}", i + 1),
        }
    }

    pub fn square(i: usize) -> Self {
        TermDescriptor {
            kind: TermKind::Square(i),
            name: format!("X{}:{}", i + 1, i + 1),
        }
    }

    /// Cross term between distinct variables; indices are stored sorted.
    ///
    /// Panics if `i == j` (that is a square, not a cross).
    pub fn cross(i: usize, j: usize) -> Self {
        assert_ne!(i, j, "cross term requires two distinct variables");
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        TermDescriptor {
            kind: TermKind::Cross(a, b),
            name: format!("X{}:{}", a + 1, b + 1),
        }
    }

    pub fn indicator(factor: impl Into<String>, level: impl Into<String>) -> Self {
        let factor = factor.into();
        let level = level.into();
        let name = format!("{factor}.{level}");
        TermDescriptor {
            kind: TermKind::Indicator { factor, level },
            name,
        }
    }
}

/// A standardized model matrix with term metadata and the standardization
/// record needed to map back to raw scale.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    /// Standardized columns (mean zero, unit Euclidean norm).
    pub data: Matrix,
    /// One descriptor per column, names unique.
    pub terms: Vec<TermDescriptor>,
    pub standardization: StandardizationRecord,
    /// Number of original explanatory variables the terms were built from.
    pub raw_cols: usize,
}

impl DesignMatrix {
    /// Standardizes `raw` and attaches term metadata. The column count must
    /// match the term count and names must be unique.
    pub fn from_parts(raw: Matrix, terms: Vec<TermDescriptor>, raw_cols: usize) -> Result<Self> {
        if raw.cols() != terms.len() {
            return Err(Error::DimensionMismatch {
                op: "design matrix terms",
                expected: raw.cols(),
                got: terms.len(),
            });
        }
        let mut seen = std::collections::HashSet::new();
        for t in &terms {
            if !seen.insert(t.name.as_str()) {
                return Err(Error::InvalidConfig(format!(
                    "duplicate term name {:?}",
                    t.name
                )));
            }
        }
        let (data, standardization) = standardize(&raw)?;
        Ok(DesignMatrix {
            data,
            terms,
            standardization,
            raw_cols,
        })
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn term_index(&self, name: &str) -> Option<usize> {
        self.terms.iter().position(|t| t.name == name)
    }

    pub fn term_names(&self) -> Vec<String> {
        self.terms.iter().map(|t| t.name.clone()).collect()
    }
}

/// Expands `raw` into mains, optionally all squares, and optionally all
/// pairwise cross products, then standardizes every column.
///
/// Column order is deterministic: mains `X1..Xm`, squares `X1:1..Xm:m`,
/// crosses in lexicographic `(i, j)` order. Products are computed on raw
/// values before standardization.
pub fn expand_second_order(
    raw: &Matrix,
    include_squares: bool,
    include_cross: bool,
) -> Result<DesignMatrix> {
    let m = raw.cols();
    let mut columns: Vec<Vec<f64>> = Vec::new();
    let mut terms: Vec<TermDescriptor> = Vec::new();
    for i in 0..m {
        columns.push(raw.column(i).to_vec());
        terms.push(TermDescriptor::main(i));
    }
    if include_squares {
        for i in 0..m {
            let xi = raw.column(i);
            columns.push(xi.iter().map(|v| v * v).collect());
            terms.push(TermDescriptor::square(i));
        }
    }
    if include_cross {
        for i in 0..m {
            for j in (i + 1)..m {
                let xi = raw.column(i);
                let xj = raw.column(j);
                columns.push(xi.iter().zip(xj).map(|(a, b)| a * b).collect());
                terms.push(TermDescriptor::cross(i, j));
            }
        }
    }
    DesignMatrix::from_parts(Matrix::from_columns(&columns), terms, m)
}

/// Standardized main effects only; equivalent to [`expand_second_order`] with
/// both flags off.
pub fn main_effects_only(raw: &Matrix) -> Result<DesignMatrix> {
    expand_second_order(raw, false, false)
}
