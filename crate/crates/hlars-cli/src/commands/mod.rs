//! Subcommand implementations and the input-loading helpers they share.

pub mod check;
pub mod fit;
pub mod gen;
pub mod replicate;

use std::path::Path;

use hlars_core::{
    expand_second_order, marginality_dependencies, DependencyStructure, DesignKind, DesignMatrix,
    Error, FactorGroup, Matrix,
};
use serde::Deserialize;

use crate::error::CliError;
use crate::io::read_csv;

/// Splits a CSV into the response vector and the explanatory matrix, keeping
/// the explanatory header order.
pub fn load_dataset(
    input: &Path,
    response: &str,
) -> Result<(Vec<String>, Matrix, Vec<f64>), CliError> {
    let (headers, mut columns) = read_csv(input)?;
    let resp_idx = headers.iter().position(|h| h == response).ok_or_else(|| {
        CliError::Input(format!(
            "response column {:?} not found in {} (columns: {})",
            response,
            input.display(),
            headers.join(", ")
        ))
    })?;
    let y = columns.remove(resp_idx);
    let mut raw_headers = headers;
    raw_headers.remove(resp_idx);
    if columns.is_empty() {
        return Err(CliError::Input(format!(
            "{}: no explanatory columns besides the response",
            input.display()
        )));
    }
    Ok((raw_headers, Matrix::from_columns(&columns), y))
}

/// Name of expanded column `col` without building the matrix, mirroring the
/// deterministic expansion order.
fn expansion_term_name(col: usize, m: usize, squares: bool, cross: bool) -> String {
    if col < m {
        return format!("X{}", col + 1);
    }
    let mut idx = col - m;
    if squares {
        if idx < m {
            return format!("X{}:{}", idx + 1, idx + 1);
        }
        idx -= m;
    }
    if cross {
        for i in 0..m {
            let block = m - 1 - i;
            if idx < block {
                return format!("X{}:{}", i + 1, i + idx + 2);
            }
            idx -= block;
        }
    }
    format!("column {col}")
}

/// Builds the requested design, naming the offending term (and raw input
/// column, when applicable) if a column cannot be standardized.
pub fn build_design(
    raw: &Matrix,
    design: DesignKind,
    raw_headers: &[String],
) -> Result<DesignMatrix, CliError> {
    let (squares, cross) = match design {
        DesignKind::MainOnly => (false, false),
        DesignKind::FullSecondOrder => (true, true),
    };
    expand_second_order(raw, squares, cross).map_err(|e| match e {
        Error::ConstantColumn { col } => {
            let name = expansion_term_name(col, raw.cols(), squares, cross);
            let origin = if col < raw.cols() {
                format!(" (input column {:?})", raw_headers[col])
            } else {
                String::new()
            };
            CliError::Input(format!("term {name}{origin} is constant; cannot standardize"))
        }
        other => other.into(),
    })
}

#[derive(Debug, Deserialize)]
struct DepsFile {
    #[serde(default)]
    dependencies: Vec<DepEntry>,
    #[serde(default)]
    factor_groups: Vec<GroupEntry>,
}

#[derive(Debug, Deserialize)]
struct DepEntry {
    term: String,
    requires: Vec<String>,
}

#[derive(Debug, Deserialize)]
struct GroupEntry {
    factor: String,
    members: Vec<String>,
    #[serde(default)]
    held_out: Option<String>,
}

/// Resolves `--deps`: "auto" derives the marginality relation from the term
/// metadata, anything else is a JSON file of named dependencies and factor
/// groups.
pub fn resolve_deps(
    spec: &str,
    dm: &DesignMatrix,
) -> Result<(DependencyStructure, Vec<FactorGroup>), CliError> {
    if spec == "auto" {
        return Ok((marginality_dependencies(&dm.terms)?, Vec::new()));
    }
    let text = std::fs::read_to_string(spec)
        .map_err(|e| CliError::Input(format!("cannot read dependency file {spec}: {e}")))?;
    let file: DepsFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("{spec}: bad dependency file: {e}")))?;
    let index = |name: &str| -> Result<usize, CliError> {
        dm.term_index(name)
            .ok_or_else(|| CliError::Input(format!("{spec}: unknown term {name:?}")))
    };
    let mut pairs = Vec::new();
    for entry in &file.dependencies {
        let i = index(&entry.term)?;
        for req in &entry.requires {
            pairs.push((i, index(req)?));
        }
    }
    let deps = DependencyStructure::from_pairs(dm.n_terms(), pairs)?;
    let mut groups = Vec::new();
    for g in &file.factor_groups {
        let members: Vec<usize> = g
            .members
            .iter()
            .map(|name| index(name))
            .collect::<Result<_, _>>()?;
        let held_out = match &g.held_out {
            Some(name) => index(name)?,
            None => *members.last().unwrap_or(&0),
        };
        groups.push(FactorGroup::new(g.factor.clone(), members, held_out)?);
    }
    Ok((deps, groups))
}
