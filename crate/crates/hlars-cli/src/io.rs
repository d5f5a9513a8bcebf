//! CSV input and the deterministic output writers.
//!
//! Output files are byte-stable: 17 significant digits in scientific
//! notation, '.' decimal separator, LF line endings, fixed column order.

use std::fs;
use std::path::Path;

use hlars_core::{coefficients_along_path, LarsPath, SelectionHistogram};

use crate::error::CliError;

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Reads a numeric CSV with a header row into per-column values. Errors name
/// the offending column and line.
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>), CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| CliError::Input(format!("{}: bad header row: {e}", path.display())))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); headers.len()];
    for (row, record) in reader.records().enumerate() {
        let record =
            record.map_err(|e| CliError::Input(format!("{}: line {}: {e}", path.display(), row + 2)))?;
        if record.len() != headers.len() {
            return Err(CliError::Input(format!(
                "{}: line {}: expected {} fields, found {}",
                path.display(),
                row + 2,
                headers.len(),
                record.len()
            )));
        }
        for (j, field) in record.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| {
                CliError::Input(format!(
                    "{}: line {}: column {:?} has non-numeric value {:?}",
                    path.display(),
                    row + 2,
                    headers[j],
                    field
                ))
            })?;
            if !v.is_finite() {
                return Err(CliError::Input(format!(
                    "{}: line {}: column {:?} has non-finite value {:?}",
                    path.display(),
                    row + 2,
                    headers[j],
                    field
                )));
            }
            columns[j].push(v);
        }
    }
    if columns.first().is_none_or(|c| c.is_empty()) {
        return Err(CliError::Input(format!(
            "{}: no data rows",
            path.display()
        )));
    }
    Ok((headers, columns))
}

/// `path.csv`: one row per (step, term), including the all-zero step 0.
pub fn write_path_csv(path: &LarsPath, file: &Path) -> Result<(), CliError> {
    let mut out = String::from("step,term,coefficient,sum_abs_beta\n");
    for row in coefficients_along_path(path) {
        let sum = fmt_f64(row.sum_abs);
        for (term, coef) in path.terms.iter().zip(&row.coef) {
            out.push_str(&format!("{},{},{},{}\n", row.step, term.name, fmt_f64(*coef), sum));
        }
    }
    fs::write(file, out)?;
    Ok(())
}

/// `corr.csv`: per step, the absolute correlation of every term at the step
/// start and the shared maximum.
pub fn write_corr_csv(path: &LarsPath, file: &Path) -> Result<(), CliError> {
    let mut out = String::from("step,term,abs_corr,Chat\n");
    for step in &path.steps {
        let chat_max = fmt_f64(step.chat_max);
        for (term, c) in path.terms.iter().zip(&step.chat) {
            out.push_str(&format!(
                "{},{},{},{}\n",
                step.k,
                term.name,
                fmt_f64(c.abs()),
                chat_max
            ));
        }
    }
    fs::write(file, out)?;
    Ok(())
}

/// `hist.csv`: per (term, step) counts and percentages up to `truncate` (or
/// the last step with any mass).
pub fn write_hist_csv(
    hist: &SelectionHistogram,
    truncate: Option<usize>,
    file: &Path,
) -> Result<(), CliError> {
    let observed_max = hist
        .counts
        .iter()
        .flat_map(|c| {
            c.iter()
                .enumerate()
                .filter(|(_, n)| **n > 0)
                .map(|(s, _)| s + 1)
        })
        .max()
        .unwrap_or(0);
    let last = truncate.unwrap_or(observed_max).min(hist.max_step());
    let mut out = String::from("term,step,count,percent\n");
    for (t, term) in hist.terms.iter().enumerate() {
        for step in 1..=last {
            out.push_str(&format!(
                "{},{},{},{}\n",
                term,
                step,
                hist.counts[t][step - 1],
                fmt_f64(hist.percent(t, step))
            ));
        }
    }
    fs::write(file, out)?;
    Ok(())
}
