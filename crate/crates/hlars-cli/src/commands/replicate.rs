//! `hlars replicate`: run the seeded replication study and export the
//! selection-step histogram.

use std::fs;

use hlars_core::{replicate_study, SelectionHistogram, SimConfig};

use crate::error::CliError;
use crate::io::write_hist_csv;
use crate::manifest::{RunConfig, RunManifest};
use crate::ReplicateArgs;

pub fn parse_truncate(raw: &str) -> Result<Option<usize>, CliError> {
    if raw.eq_ignore_ascii_case("none") {
        return Ok(None);
    }
    raw.parse::<usize>()
        .ok()
        .filter(|k| *k >= 1)
        .map(Some)
        .ok_or_else(|| {
            CliError::Usage(format!(
                "--truncate expects a positive step count or \"none\", got {raw:?}"
            ))
        })
}

/// Runs the study on a pool sized by `HLARS_THREADS` when set; otherwise the
/// default pool.
#[cfg(feature = "parallel")]
fn run_study(cfg: &SimConfig) -> Result<SelectionHistogram, CliError> {
    match std::env::var("HLARS_THREADS") {
        Ok(raw) => {
            let threads: usize = raw
                .trim()
                .parse()
                .ok()
                .filter(|t| *t >= 1)
                .ok_or_else(|| {
                    CliError::Usage(format!(
                        "HLARS_THREADS must be a positive integer, got {raw:?}"
                    ))
                })?;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| CliError::Input(format!("cannot build thread pool: {e}")))?;
            Ok(pool.install(|| replicate_study(cfg))?)
        }
        Err(_) => Ok(replicate_study(cfg)?),
    }
}

#[cfg(not(feature = "parallel"))]
fn run_study(cfg: &SimConfig) -> Result<SelectionHistogram, CliError> {
    Ok(replicate_study(cfg)?)
}

pub fn run(args: &ReplicateArgs) -> Result<(), CliError> {
    let truncate = parse_truncate(&args.truncate)?;
    let cfg = SimConfig {
        n: args.n,
        reps: args.reps,
        noise_sd: args.noise_sd,
        master_seed: args.seed,
        design: args.design.kind(),
        algorithm: args.algorithm.kind(),
    };
    let hist = run_study(&cfg)?;

    fs::create_dir_all(&args.out)?;
    write_hist_csv(&hist, truncate, &args.out.join("hist.csv"))?;
    let manifest = RunManifest::new(
        "replicate",
        RunConfig::Replicate {
            model: args.model.clone(),
            n: cfg.n,
            reps: cfg.reps,
            noise_sd: cfg.noise_sd,
            seed: cfg.master_seed,
            design: cfg.design,
            algorithm: cfg.algorithm,
            truncate,
            completed: hist.completed,
            failures: hist.failures.len(),
        },
        vec!["hist.csv".into(), "manifest.json".into()],
    );
    manifest.write(&args.out.join("manifest.json"))?;

    if !hist.failures.is_empty() {
        eprintln!(
            "warning: {} of {} replications failed; first: replication {}: {}",
            hist.failures.len(),
            cfg.reps,
            hist.failures[0].rep,
            hist.failures[0].message
        );
    }
    println!(
        "replicate: {} of {} replications completed; wrote hist.csv, manifest.json to {}",
        hist.completed,
        cfg.reps,
        args.out.display()
    );
    if hist.completed == 0 {
        return Err(CliError::Numerical(format!(
            "no replication completed; first failure: {}",
            hist.failures[0].message
        )));
    }
    Ok(())
}
