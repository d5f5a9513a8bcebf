//! `hlars check`: recompute the fit described by a run manifest and validate
//! the exported tables against it, along with the path identities the
//! algorithm guarantees.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use hlars_core::{
    coefficients_along_path, factor_design_columns, lars_fit, least_squares, modified_lars_fit,
    AlgorithmKind, DependencyStructure, FactorGroup, LarsOptions, LarsPath,
};

use crate::commands::{build_design, load_dataset, resolve_deps};
use crate::error::CliError;
use crate::manifest::{RunConfig, RunManifest};
use crate::CheckArgs;

/// Relative mismatch between a recorded value and its recomputation.
fn rel_resid(recorded: f64, expected: f64) -> f64 {
    (recorded - expected).abs() / (1.0 + expected.abs())
}

struct Outcome {
    name: &'static str,
    pass: bool,
    detail: String,
}

struct PathTable {
    /// (step, term) -> (coefficient, sum_abs_beta)
    cells: BTreeMap<(usize, String), (f64, f64)>,
    duplicates: usize,
}

fn read_path_table(file: &Path) -> Result<PathTable, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(file)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", file.display())))?;
    let mut cells = BTreeMap::new();
    let mut duplicates = 0usize;
    for (row, record) in reader.records().enumerate() {
        let record = record
            .map_err(|e| CliError::Input(format!("{}: line {}: {e}", file.display(), row + 2)))?;
        let parse = |i: usize| -> Result<f64, CliError> {
            record
                .get(i)
                .and_then(|f| f.parse().ok())
                .ok_or_else(|| {
                    CliError::Input(format!(
                        "{}: line {}: bad numeric field {}",
                        file.display(),
                        row + 2,
                        i
                    ))
                })
        };
        let step: usize = record
            .get(0)
            .and_then(|f| f.parse().ok())
            .ok_or_else(|| {
                CliError::Input(format!("{}: line {}: bad step", file.display(), row + 2))
            })?;
        let term = record
            .get(1)
            .ok_or_else(|| {
                CliError::Input(format!("{}: line {}: missing term", file.display(), row + 2))
            })?
            .to_string();
        if cells.insert((step, term), (parse(2)?, parse(3)?)).is_some() {
            duplicates += 1;
        }
    }
    Ok(PathTable { cells, duplicates })
}

#[allow(clippy::type_complexity)]
fn read_corr_table(file: &Path) -> Result<BTreeMap<(usize, String), (f64, f64)>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(file)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", file.display())))?;
    let mut cells = BTreeMap::new();
    for (row, record) in reader.records().enumerate() {
        let record = record
            .map_err(|e| CliError::Input(format!("{}: line {}: {e}", file.display(), row + 2)))?;
        let step: usize = record.get(0).and_then(|f| f.parse().ok()).ok_or_else(|| {
            CliError::Input(format!("{}: line {}: bad step", file.display(), row + 2))
        })?;
        let term = record.get(1).unwrap_or_default().to_string();
        let abs_corr: f64 = record.get(2).and_then(|f| f.parse().ok()).ok_or_else(|| {
            CliError::Input(format!("{}: line {}: bad abs_corr", file.display(), row + 2))
        })?;
        let chat: f64 = record.get(3).and_then(|f| f.parse().ok()).ok_or_else(|| {
            CliError::Input(format!("{}: line {}: bad Chat", file.display(), row + 2))
        })?;
        cells.insert((step, term), (abs_corr, chat));
    }
    Ok(cells)
}

fn reconstruction_outcome(
    dir: &Path,
    path: &LarsPath,
) -> Result<Outcome, CliError> {
    let table = read_path_table(&dir.join("path.csv"))?;
    let mut issues: Vec<String> = Vec::new();
    if table.duplicates > 0 {
        issues.push(format!("{} duplicated rows", table.duplicates));
    }
    let mut max_resid = 0.0f64;
    let mut expected_keys: BTreeSet<(usize, String)> = BTreeSet::new();
    for row in coefficients_along_path(path) {
        for (term, coef) in path.terms.iter().zip(&row.coef) {
            let key = (row.step, term.name.clone());
            expected_keys.insert(key.clone());
            match table.cells.get(&key) {
                Some((c, s)) => {
                    max_resid = max_resid.max(rel_resid(*c, *coef));
                    max_resid = max_resid.max(rel_resid(*s, row.sum_abs));
                }
                None => issues.push(format!("missing row: step {} term {}", row.step, term.name)),
            }
        }
    }
    for key in table.cells.keys() {
        if !expected_keys.contains(key) {
            issues.push(format!("unexpected row: step {} term {}", key.0, key.1));
        }
    }

    // The correlation table, when present, must match the recomputed path too.
    let corr_file = dir.join("corr.csv");
    if corr_file.exists() {
        let corr = read_corr_table(&corr_file)?;
        let mut corr_keys: BTreeSet<(usize, String)> = BTreeSet::new();
        for step in &path.steps {
            for (term, c) in path.terms.iter().zip(&step.chat) {
                let key = (step.k, term.name.clone());
                corr_keys.insert(key.clone());
                match corr.get(&key) {
                    Some((a, cm)) => {
                        max_resid = max_resid.max(rel_resid(*a, c.abs()));
                        max_resid = max_resid.max(rel_resid(*cm, step.chat_max));
                    }
                    None => {
                        issues.push(format!("corr.csv missing: step {} term {}", step.k, term.name))
                    }
                }
            }
        }
        for key in corr.keys() {
            if !corr_keys.contains(key) {
                issues.push(format!("corr.csv unexpected: step {} term {}", key.0, key.1));
            }
        }
    }

    issues.truncate(5);
    let pass = issues.is_empty() && max_resid <= 1e-8;
    let detail = if issues.is_empty() {
        format!("max relative mismatch {max_resid:.2e} (tolerance 1e-8)")
    } else {
        format!(
            "max relative mismatch {max_resid:.2e}; structural issues: {}",
            issues.join("; ")
        )
    };
    Ok(Outcome {
        name: "reconstruction",
        pass,
        detail,
    })
}

fn decay_outcome(path: &LarsPath) -> Outcome {
    let anchor = path.steps.first().map_or(0.0, |s| s.chat_max);
    let mut worst = 0.0f64;
    for w in path.steps.windows(2) {
        let expected = (1.0 - w[0].gamma) * w[0].chat_max;
        let tol = 1e-8 * w[0].chat_max + 1e-12 * anchor;
        worst = worst.max((w[1].chat_max - expected).abs() / tol);
    }
    Outcome {
        name: "correlation_decay",
        pass: worst <= 1.0,
        detail: format!("max residual at {worst:.2e} of tolerance (1e-8 relative)"),
    }
}

fn equiangularity_outcome(path: &LarsPath) -> Outcome {
    let anchor = path.steps.first().map_or(0.0, |s| s.chat_max);
    let mut worst = 0.0f64;
    for step in &path.steps {
        let tol = 1e-8 * step.chat_max + 1e-12 * anchor;
        for &j in &step.a0 {
            let expected = step.chat[j].signum() * step.chat_max;
            worst = worst.max((step.avec[j] - expected).abs() / tol);
        }
    }
    Outcome {
        name: "equiangularity",
        pass: worst <= 1.0,
        detail: format!("max residual at {worst:.2e} of tolerance (1e-8 relative)"),
    }
}

fn closure_outcome(
    dir: &Path,
    path: &LarsPath,
    deps: Option<&DependencyStructure>,
    groups: &[FactorGroup],
) -> Result<Outcome, CliError> {
    let Some(deps) = deps else {
        return Ok(Outcome {
            name: "closure",
            pass: true,
            detail: "no dependency structure (plain fit)".into(),
        });
    };
    let table = read_path_table(&dir.join("path.csv"))?;
    let name_to_index: BTreeMap<&str, usize> = path
        .terms
        .iter()
        .enumerate()
        .map(|(i, t)| (t.name.as_str(), i))
        .collect();
    // Held-out factor columns are deliberately absent from the solve, so a
    // zero coefficient there is not a violation.
    let held: BTreeSet<usize> = groups
        .iter()
        .map(|g| g.held_out)
        .collect();
    let mut models: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for ((step, term), (coef, _)) in &table.cells {
        if *coef != 0.0 {
            if let Some(&idx) = name_to_index.get(term.as_str()) {
                models.entry(*step).or_default().insert(idx);
            }
        }
    }
    let mut violations: Vec<String> = Vec::new();
    for (step, model) in &models {
        for &i in model {
            for &j in deps.deps_of(i) {
                if !model.contains(&j) && !held.contains(&j) {
                    violations.push(format!(
                        "step {}: {} recorded without {}",
                        step, path.terms[i].name, path.terms[j].name
                    ));
                }
            }
        }
    }
    let pass = violations.is_empty();
    violations.truncate(5);
    Ok(Outcome {
        name: "closure",
        pass,
        detail: if pass {
            "every recorded model is closed under the dependency structure".into()
        } else {
            violations.join("; ")
        },
    })
}

fn completion_outcome(
    path: &LarsPath,
    dm: &hlars_core::DesignMatrix,
    y: &[f64],
    groups: &[FactorGroup],
) -> Outcome {
    let n = y.len() as f64;
    let mean = y.iter().sum::<f64>() / n;
    let yc: Vec<f64> = y.iter().map(|v| v - mean).collect();
    let all: BTreeSet<usize> = (0..dm.n_terms()).collect();
    let cols = factor_design_columns(&all, groups);
    let sub = dm.data.select_columns(&cols);
    let proj = match least_squares(&sub, &yc) {
        Ok((_, fitted)) => fitted,
        Err(e) => {
            return Outcome {
                name: "ols_completion",
                pass: false,
                detail: format!("full least squares failed: {e}"),
            }
        }
    };
    let Some(mu) = path.final_mu() else {
        return Outcome {
            name: "ols_completion",
            pass: false,
            detail: "path has no steps".into(),
        };
    };
    let scale = 1.0 + yc.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let diff = mu
        .iter()
        .zip(&proj)
        .fold(0.0f64, |a, (x, p)| a.max((x - p).abs()));
    Outcome {
        name: "ols_completion",
        pass: path.complete && diff <= 1e-8 * scale,
        detail: format!(
            "complete: {}; max |mu - projection| = {diff:.2e} (tolerance {:.2e})",
            path.complete,
            1e-8 * scale
        ),
    }
}

pub fn run(args: &CheckArgs) -> Result<(), CliError> {
    let manifest = RunManifest::read(&args.dir.join("manifest.json"))?;
    let RunConfig::Fit {
        input,
        response,
        design,
        algorithm,
        deps,
        columns,
    } = manifest.config
    else {
        return Err(CliError::Usage(
            "check requires the output directory of a fit run".into(),
        ));
    };

    let input_path = args.input.clone().unwrap_or_else(|| PathBuf::from(&input));
    let (raw_headers, raw, y) = load_dataset(&input_path, &response)?;
    if raw_headers != columns {
        return Err(CliError::Input(format!(
            "{}: explanatory columns {:?} do not match the manifest {:?}",
            input_path.display(),
            raw_headers,
            columns
        )));
    }
    let dm = build_design(&raw, design, &raw_headers)?;
    let (deps_structure, groups, path) = match algorithm {
        AlgorithmKind::Lars => (None, Vec::new(), lars_fit(&dm, &y, &LarsOptions::default())?),
        AlgorithmKind::ModifiedLars => {
            let spec = deps.as_deref().unwrap_or("auto");
            let (d, g) = resolve_deps(spec, &dm)?;
            let opts = LarsOptions {
                factor_groups: g.clone(),
                ..Default::default()
            };
            let p = modified_lars_fit(&dm, &y, &d, &opts)?;
            (Some(d), g, p)
        }
    };

    let outcomes = vec![
        reconstruction_outcome(&args.dir, &path)?,
        decay_outcome(&path),
        equiangularity_outcome(&path),
        closure_outcome(&args.dir, &path, deps_structure.as_ref(), &groups)?,
        completion_outcome(&path, &dm, &y, &groups),
    ];

    let mut all_pass = true;
    for o in &outcomes {
        println!(
            "check {}: {} ({})",
            o.name,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        all_pass &= o.pass;
    }
    if all_pass {
        println!("check: all invariants passed");
        Ok(())
    } else {
        Err(CliError::CheckFailed)
    }
}
