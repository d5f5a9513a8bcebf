//! `hlars fit`: run one path fit on a CSV data set and export the
//! plot-ready path and correlation tables.

use std::fs;

use hlars_core::{lars_fit, modified_lars_fit, AlgorithmKind, LarsOptions};

use crate::commands::{build_design, load_dataset, resolve_deps};
use crate::error::CliError;
use crate::io::{write_corr_csv, write_path_csv};
use crate::manifest::{RunConfig, RunManifest};
use crate::FitArgs;

pub fn run(args: &FitArgs) -> Result<(), CliError> {
    let design = args.design.kind();
    let algorithm = args.algorithm.kind();
    if args.deps.is_some() && algorithm == AlgorithmKind::Lars {
        return Err(CliError::Usage(
            "--deps only applies to --algorithm mlars".into(),
        ));
    }

    let (raw_headers, raw, y) = load_dataset(&args.input, &args.response)?;
    let dm = build_design(&raw, design, &raw_headers)?;

    let (path, deps_used) = match algorithm {
        AlgorithmKind::Lars => (lars_fit(&dm, &y, &LarsOptions::default())?, None),
        AlgorithmKind::ModifiedLars => {
            let spec = args.deps.clone().unwrap_or_else(|| "auto".into());
            let (deps, factor_groups) = resolve_deps(&spec, &dm)?;
            let opts = LarsOptions {
                factor_groups,
                ..Default::default()
            };
            (modified_lars_fit(&dm, &y, &deps, &opts)?, Some(spec))
        }
    };

    fs::create_dir_all(&args.out)?;
    write_path_csv(&path, &args.out.join("path.csv"))?;
    write_corr_csv(&path, &args.out.join("corr.csv"))?;
    let manifest = RunManifest::new(
        "fit",
        RunConfig::Fit {
            input: args.input.display().to_string(),
            response: args.response.clone(),
            design,
            algorithm,
            deps: deps_used,
            columns: raw_headers,
        },
        vec!["path.csv".into(), "corr.csv".into(), "manifest.json".into()],
    );
    manifest.write(&args.out.join("manifest.json"))?;

    println!(
        "fit: {} terms, {} steps, complete: {}; wrote path.csv, corr.csv, manifest.json to {}",
        dm.n_terms(),
        path.steps.len(),
        path.complete,
        args.out.display()
    );
    Ok(())
}
