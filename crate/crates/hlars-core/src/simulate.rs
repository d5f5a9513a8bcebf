//! Data generation for the ten-variable benchmark model and the replication
//! study that histograms the step at which each term enters the model.
//!
//! Replications are independent given their derived seeds, so the study can
//! fan out across threads; aggregation is a commutative fold over integer
//! counts and gives the same histogram in any execution order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::design::{expand_second_order, main_effects_only};
use crate::error::{Error, Result};
use crate::hierarchy::marginality_dependencies;
use crate::lars::{lars_fit, modified_lars_fit, LarsOptions, LarsPath};
use crate::linalg::Matrix;

/// Which design matrix the study builds per replication.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DesignKind {
    MainOnly,
    FullSecondOrder,
}

/// Which path algorithm the study runs per replication.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgorithmKind {
    Lars,
    ModifiedLars,
}

/// Replication-study parameters.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SimConfig {
    pub n: usize,
    pub reps: usize,
    pub noise_sd: f64,
    pub master_seed: u64,
    pub design: DesignKind,
    pub algorithm: AlgorithmKind,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 10 {
            return Err(Error::InvalidConfig(format!(
                "sample size must be at least 10, got {}",
                self.n
            )));
        }
        if self.reps < 1 {
            return Err(Error::InvalidConfig("replication count must be at least 1".into()));
        }
        if self.noise_sd.is_nan() || self.noise_sd < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "noise standard deviation must be nonnegative, got {}",
                self.noise_sd
            )));
        }
        Ok(())
    }
}

/// SplitMix64 finalizer.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for replication `rep`: the `rep`-th output of a SplitMix64 generator
/// whose Weyl sequence starts at `master`. Order-independent, so parallel
/// and sequential studies see identical streams.
pub fn replication_seed(master: u64, rep: u64) -> u64 {
    splitmix64(master.wrapping_add(rep.wrapping_mul(0x9E37_79B9_7F4A_7C15)))
}

/// Noise-free response of the benchmark model at one row of explanatory
/// variables: `(x1 - 0.5)^2 + x2 + x3 + x4 + x5`.
pub fn model1_mean(row: &[f64]) -> f64 {
    let d = row[0] - 0.5;
    d * d + row[1] + row[2] + row[3] + row[4]
}

/// Generates one benchmark data set: ten explanatory columns drawn iid
/// uniform on [0, 1) and the response with centered Gaussian noise of the
/// given standard deviation.
///
/// The generator is ChaCha8 keyed from the seed; columns are filled one at a
/// time, then the noise vector, so every draw has a fixed position in the
/// stream. Normal variates come from the ziggurat sampler in `rand_distr`.
pub fn gen_model1(n: usize, noise_sd: f64, seed: u64) -> (Matrix, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(10);
    for _ in 0..10 {
        cols.push((0..n).map(|_| rng.random::<f64>()).collect());
    }
    let raw = Matrix::from_columns(&cols);
    let y: Vec<f64> = (0..n)
        .map(|i| {
            let row = [cols[0][i], cols[1][i], cols[2][i], cols[3][i], cols[4][i]];
            let eps: f64 = StandardNormal.sample(&mut rng);
            model1_mean(&row) + noise_sd * eps
        })
        .collect();
    (raw, y)
}

/// Per-term 1-based step at which each term first became active.
///
/// Fails with [`Error::TermNeverEntered`] if the path stopped before some
/// term entered.
pub fn selection_steps(path: &LarsPath) -> Result<Vec<usize>> {
    path.first_entry
        .iter()
        .enumerate()
        .map(|(j, e)| {
            e.ok_or_else(|| Error::TermNeverEntered {
                term: path.terms[j].name.clone(),
            })
        })
        .collect()
}

/// One failed replication, kept for reporting; the study continues past it.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ReplicationFailure {
    pub rep: usize,
    pub message: String,
}

/// Selection-step counts across replications: `counts[term][step - 1]` is
/// the number of replications in which the term entered at that step.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionHistogram {
    pub terms: Vec<String>,
    /// Requested replication count; percentages are counts over this.
    pub reps: usize,
    /// Replications that produced a complete selection vector.
    pub completed: usize,
    pub counts: Vec<Vec<u64>>,
    pub failures: Vec<ReplicationFailure>,
}

impl SelectionHistogram {
    /// Number of step slots per term (the column count of the design).
    pub fn max_step(&self) -> usize {
        self.counts.first().map_or(0, Vec::len)
    }

    /// Percentage of replications in which `term` entered at `step`
    /// (1-based).
    pub fn percent(&self, term: usize, step: usize) -> f64 {
        100.0 * self.counts[term][step - 1] as f64 / self.reps as f64
    }

    /// Fraction of replications with the term's entry step inside
    /// `lo..=hi` (1-based, inclusive).
    pub fn mass_in_range(&self, term: usize, lo: usize, hi: usize) -> f64 {
        let total: u64 = self.counts[term][lo - 1..hi.min(self.max_step())].iter().sum();
        total as f64 / self.reps as f64
    }
}

fn run_replication(cfg: &SimConfig, rep: usize) -> Result<Vec<usize>> {
    let seed = replication_seed(cfg.master_seed, rep as u64);
    let (raw, y) = gen_model1(cfg.n, cfg.noise_sd, seed);
    let dm = match cfg.design {
        DesignKind::MainOnly => main_effects_only(&raw)?,
        DesignKind::FullSecondOrder => expand_second_order(&raw, true, true)?,
    };
    let opts = LarsOptions::default();
    let path = match cfg.algorithm {
        AlgorithmKind::Lars => lars_fit(&dm, &y, &opts)?,
        AlgorithmKind::ModifiedLars => {
            let deps = marginality_dependencies(&dm.terms)?;
            modified_lars_fit(&dm, &y, &deps, &opts)?
        }
    };
    selection_steps(&path)
}

fn term_names(cfg: &SimConfig) -> Vec<String> {
    // Term metadata is a pure function of the design kind; build it once
    // from a tiny throwaway data set.
    let (raw, _) = gen_model1(10, 0.0, 0);
    let dm = match cfg.design {
        DesignKind::MainOnly => main_effects_only(&raw),
        DesignKind::FullSecondOrder => expand_second_order(&raw, true, true),
    }
    .expect("uniform data never yields constant columns");
    dm.term_names()
}

fn aggregate(
    cfg: &SimConfig,
    results: Vec<Result<Vec<usize>>>,
) -> SelectionHistogram {
    let terms = term_names(cfg);
    let m = terms.len();
    let mut counts = vec![vec![0u64; m]; m];
    let mut failures = Vec::new();
    let mut completed = 0usize;
    for (rep, res) in results.into_iter().enumerate() {
        match res {
            Ok(steps) => {
                completed += 1;
                for (term, step) in steps.into_iter().enumerate() {
                    counts[term][step - 1] += 1;
                }
            }
            Err(e) => failures.push(ReplicationFailure {
                rep,
                message: e.to_string(),
            }),
        }
    }
    SelectionHistogram {
        terms,
        reps: cfg.reps,
        completed,
        counts,
        failures,
    }
}

/// Runs the replication study, fanning replications across the rayon thread
/// pool when the `parallel` feature is enabled. The result is identical to
/// [`replicate_study_serial`] on the same configuration.
pub fn replicate_study(cfg: &SimConfig) -> Result<SelectionHistogram> {
    cfg.validate()?;
    #[cfg(feature = "parallel")]
    {
        let results: Vec<Result<Vec<usize>>> = (0..cfg.reps)
            .into_par_iter()
            .map(|rep| run_replication(cfg, rep))
            .collect();
        Ok(aggregate(cfg, results))
    }
    #[cfg(not(feature = "parallel"))]
    {
        replicate_study_serial(cfg)
    }
}

/// Sequential replication study; always available, used as the fallback when
/// the `parallel` feature is off and as the baseline in benchmarks.
pub fn replicate_study_serial(cfg: &SimConfig) -> Result<SelectionHistogram> {
    cfg.validate()?;
    let results: Vec<Result<Vec<usize>>> = (0..cfg.reps)
        .map(|rep| run_replication(cfg, rep))
        .collect();
    Ok(aggregate(cfg, results))
}

/// Sample Pearson correlation.
fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let mut sab = 0.0;
    let mut saa = 0.0;
    let mut sbb = 0.0;
    for (&x, &y) in a.iter().zip(b) {
        let da = x - ma;
        let db = y - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    sab / (saa * sbb).sqrt()
}

/// Summary of the interaction-versus-main correlation comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationCheck {
    /// Mean over seeds of `corr(x2 * x5, y) / corr(x2, y)`.
    pub mean_ratio: f64,
    /// Standard error of the ratio across seeds.
    pub stderr_ratio: f64,
    /// Mean over seeds of `corr(x1, y)`.
    pub mean_corr_x1: f64,
    pub ratios: Vec<f64>,
}

/// Estimates, for each seed, how much more the raw product `x2 * x5`
/// correlates with the response than `x2` alone, and how little `x1`
/// correlates with it.
pub fn correlation_ratio_check(n: usize, noise_sd: f64, seeds: &[u64]) -> CorrelationCheck {
    let mut ratios = Vec::with_capacity(seeds.len());
    let mut corr_x1 = Vec::with_capacity(seeds.len());
    for &seed in seeds {
        let (raw, y) = gen_model1(n, noise_sd, seed);
        let x2 = raw.column(1);
        let x5 = raw.column(4);
        let prod: Vec<f64> = x2.iter().zip(x5).map(|(a, b)| a * b).collect();
        ratios.push(pearson(&prod, &y) / pearson(x2, &y));
        corr_x1.push(pearson(raw.column(0), &y));
    }
    let k = ratios.len() as f64;
    let mean_ratio = ratios.iter().sum::<f64>() / k;
    let var = ratios.iter().map(|r| (r - mean_ratio).powi(2)).sum::<f64>() / (k - 1.0).max(1.0);
    CorrelationCheck {
        mean_ratio,
        stderr_ratio: (var / k).sqrt(),
        mean_corr_x1: corr_x1.iter().sum::<f64>() / k,
        ratios,
    }
}

/// Entry steps shared by simultaneously entering terms of one path,
/// restricted to the given terms. Convenience for tests and reports.
pub fn entry_steps_of(path: &LarsPath, names: &[&str]) -> Result<Vec<usize>> {
    let steps = selection_steps(path)?;
    names
        .iter()
        .map(|name| {
            path.terms
                .iter()
                .position(|t| t.name == *name)
                .map(|idx| steps[idx])
                .ok_or(Error::UnknownTerm {
                    name: (*name).to_string(),
                })
        })
        .collect()
}
