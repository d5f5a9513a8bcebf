//! `hlars gen`: write a benchmark data set as CSV.

use std::fs;

use hlars_core::gen_model1;

use crate::error::CliError;
use crate::io::fmt_f64;
use crate::manifest::{RunConfig, RunManifest};
use crate::GenArgs;

pub fn run(args: &GenArgs) -> Result<(), CliError> {
    let (raw, y) = gen_model1(args.n, args.noise_sd, args.seed);
    let headers: Vec<String> = (1..=raw.cols()).map(|i| format!("X{i}")).collect();
    let mut out = String::new();
    out.push_str(&headers.join(","));
    out.push_str(",Y\n");
    for (i, yi) in y.iter().enumerate() {
        for j in 0..raw.cols() {
            out.push_str(&fmt_f64(raw.get(i, j)));
            out.push(',');
        }
        out.push_str(&fmt_f64(*yi));
        out.push('\n');
    }
    if let Some(dir) = args.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(&args.out, out)?;

    let manifest_path = args.out.with_extension("manifest.json");
    RunManifest::new(
        "gen",
        RunConfig::Gen {
            model: args.model.clone(),
            n: args.n,
            noise_sd: args.noise_sd,
            seed: args.seed,
        },
        vec![args
            .out
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default()],
    )
    .write(&manifest_path)?;

    println!(
        "gen: {} rows, {} explanatory columns; wrote {} and {}",
        raw.rows(),
        raw.cols(),
        args.out.display(),
        manifest_path.display()
    );
    Ok(())
}
