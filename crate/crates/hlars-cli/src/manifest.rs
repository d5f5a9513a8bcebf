//! The run manifest written next to every output set: the full resolved
//! configuration, enough to regenerate each file byte for byte.

use std::fs;
use std::path::Path;

use hlars_core::{AlgorithmKind, DesignKind};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub config: RunConfig,
    pub outputs: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RunConfig {
    Fit {
        input: String,
        response: String,
        design: DesignKind,
        algorithm: AlgorithmKind,
        /// "auto", a path to a dependency file, or absent for plain fits.
        deps: Option<String>,
        /// Input header names of the explanatory columns, in order.
        columns: Vec<String>,
    },
    Replicate {
        model: String,
        n: usize,
        reps: usize,
        noise_sd: f64,
        seed: u64,
        design: DesignKind,
        algorithm: AlgorithmKind,
        truncate: Option<usize>,
        completed: usize,
        failures: usize,
    },
    Gen {
        model: String,
        n: usize,
        noise_sd: f64,
        seed: u64,
    },
}

impl RunManifest {
    pub fn new(command: &str, config: RunConfig, outputs: Vec<String>) -> Self {
        RunManifest {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            outputs,
        }
    }

    pub fn write(&self, file: &Path) -> Result<(), CliError> {
        let json = serde_json::to_string_pretty(self)
            .map_err(|e| CliError::Input(format!("cannot serialize manifest: {e}")))?;
        fs::write(file, json + "\n")?;
        Ok(())
    }

    pub fn read(file: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(file)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", file.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Input(format!("{}: bad manifest: {e}", file.display())))
    }
}
