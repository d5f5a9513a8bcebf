//! The least-angle path engine.
//!
//! Starting from a zero fit, each step finds the columns tying the maximal
//! absolute correlation with the residual, moves the fit toward the least
//! squares fit on the active columns, and stops the move exactly where a new
//! column ties the shrinking maximum. The marginality-constrained variant
//! differs in one place only: the active set is closed under a dependency
//! structure before the solve.

use std::collections::BTreeSet;

use crate::design::{DesignMatrix, TermDescriptor};
use crate::error::{Error, Result};
use crate::hierarchy::{expand_active, factor_design_columns, DependencyStructure, FactorGroup};
use crate::linalg::{crossprod, dot, solve_spd, Matrix};

/// Candidates at or below this value are treated as non-positive in the
/// step-length minimum, so a just-joined column cannot be re-selected.
const GAMMA_POSITIVE_FLOOR: f64 = 1e-12;

/// Complement columns whose step-length candidate lies within this distance
/// of the minimum join simultaneously.
const GAMMA_TIE_TOL: f64 = 1e-12;

/// Residual correlations below `1e-10 * ||y||` mean nothing is left to
/// select; the path stops there.
const STOP_REL_TOL: f64 = 1e-10;

/// Knobs for a path fit.
#[derive(Debug, Clone)]
pub struct LarsOptions {
    /// Step cap; defaults to `min(n - 1, m)`.
    pub max_steps: Option<usize>,
    /// Relative tolerance for membership in the tie set: a column is tied
    /// when its absolute correlation is at least `(1 - tie_tol)` times the
    /// maximum.
    pub tie_tol: f64,
    /// Factor groups whose held-out column is excluded from each solve.
    pub factor_groups: Vec<FactorGroup>,
}

impl Default for LarsOptions {
    fn default() -> Self {
        LarsOptions {
            max_steps: None,
            tie_tol: 1e-8,
            factor_groups: Vec::new(),
        }
    }
}

/// One step of the path.
///
/// `chat`, `chat_max`, and the active sets describe the state at the start of
/// the step (they determined the move); `mu` and `coef` hold the fit after
/// the move, so `mu = data * coef` at every step.
#[derive(Debug, Clone)]
pub struct PathStep {
    /// 1-based step index.
    pub k: usize,
    /// Correlations of every column with the residual at the step start.
    pub chat: Vec<f64>,
    /// Maximal absolute entry of `chat`.
    pub chat_max: f64,
    /// Columns tying the maximal absolute correlation.
    pub a0: BTreeSet<usize>,
    /// Columns pulled in by the dependency structure (empty for plain fits).
    pub a1: BTreeSet<usize>,
    /// Least squares fit of the response on the active columns.
    pub ybar: Vec<f64>,
    /// `x_j' (ybar - mu_prev)` for every column `j`; entries on `a0` equal
    /// `sign(chat_j) * chat_max` up to roundoff.
    pub avec: Vec<f64>,
    /// Fraction of the way toward `ybar` actually traveled, in `(0, 1]`.
    pub gamma: f64,
    /// Fitted vector after the move.
    pub mu: Vec<f64>,
    /// Coefficients after the move; zero outside the ever-active set.
    pub coef: Vec<f64>,
}

impl PathStep {
    /// The full active set `a0 ∪ a1`.
    pub fn active(&self) -> BTreeSet<usize> {
        self.a0.union(&self.a1).copied().collect()
    }
}

/// A recorded path: every step, term metadata, and per-term entry steps.
#[derive(Debug, Clone)]
pub struct LarsPath {
    pub steps: Vec<PathStep>,
    pub terms: Vec<TermDescriptor>,
    /// For each term, the 1-based step at which it first became active.
    pub first_entry: Vec<Option<usize>>,
    /// True when the path ran until no complement column remained (or the
    /// residual correlation vanished); false when the step cap cut it short.
    pub complete: bool,
}

impl LarsPath {
    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    /// Fitted vector after the last step, if any step was taken.
    pub fn final_mu(&self) -> Option<&[f64]> {
        self.steps.last().map(|s| s.mu.as_slice())
    }

    /// Union of all recorded active sets.
    pub fn ever_active(&self) -> BTreeSet<usize> {
        self.first_entry
            .iter()
            .enumerate()
            .filter_map(|(j, e)| e.map(|_| j))
            .collect()
    }
}

/// Correlations of every design column with the residual `y - mu`, and their
/// maximal absolute value. `y` is expected to be centered.
pub fn current_correlations(dm: &DesignMatrix, y: &[f64], mu: &[f64]) -> Result<(Vec<f64>, f64)> {
    if y.len() != mu.len() {
        return Err(Error::DimensionMismatch {
            op: "current_correlations",
            expected: y.len(),
            got: mu.len(),
        });
    }
    let resid: Vec<f64> = y.iter().zip(mu).map(|(a, b)| a - b).collect();
    let chat = crossprod(&dm.data, &resid)?;
    let chat_max = chat.iter().fold(0.0f64, |acc, c| acc.max(c.abs()));
    Ok((chat, chat_max))
}

/// Columns whose absolute correlation ties the maximum within a relative
/// tolerance: `{j : |chat_j| >= chat_max * (1 - tol)}`.
pub fn active_set(chat: &[f64], chat_max: f64, tol: f64) -> BTreeSet<usize> {
    debug_assert!(chat_max > 0.0);
    let cutoff = chat_max * (1.0 - tol);
    chat.iter()
        .enumerate()
        .filter(|(_, c)| c.abs() >= cutoff)
        .map(|(j, _)| j)
        .collect()
}

/// Step length: the smallest strictly positive value among
/// `(chat_max - chat_j) / (chat_max - avec_j)` and
/// `(chat_max + chat_j) / (chat_max + avec_j)` over the complement, clamped
/// to `(0, 1]`. An empty complement, or no positive candidate, gives 1.
pub fn gamma_step(chat_max: f64, chat: &[f64], avec: &[f64], complement: &[usize]) -> f64 {
    gamma_with_joiners(chat_max, chat, avec, complement).0
}

/// Smallest valid step-length candidate of one column, if any.
fn column_candidate(chat_max: f64, c: f64, a: f64) -> Option<f64> {
    let mut best: Option<f64> = None;
    for (num, den) in [(chat_max - c, chat_max - a), (chat_max + c, chat_max + a)] {
        let g = num / den;
        if g.is_finite() && g > GAMMA_POSITIVE_FLOOR {
            best = Some(best.map_or(g, |b: f64| b.min(g)));
        }
    }
    best
}

/// Step length plus the complement columns attaining it (within
/// `GAMMA_TIE_TOL`). Those columns tie the maximal correlation at the end of
/// the move by construction, so the engine forces them into the next tie set
/// rather than re-detecting the tie in floating point.
fn gamma_with_joiners(
    chat_max: f64,
    chat: &[f64],
    avec: &[f64],
    complement: &[usize],
) -> (f64, Vec<usize>) {
    let mut gamma = 1.0f64;
    let mut candidates: Vec<(usize, f64)> = Vec::new();
    for &j in complement {
        if let Some(g) = column_candidate(chat_max, chat[j], avec[j]) {
            if g < gamma {
                gamma = g;
            }
            candidates.push((j, g));
        }
    }
    let joiners = candidates
        .into_iter()
        .filter(|(_, g)| *g <= gamma + GAMMA_TIE_TOL)
        .map(|(j, _)| j)
        .collect();
    (gamma, joiners)
}

/// Plain least-angle path over a standardized design.
///
/// The response is centered internally; coefficients stay in standardized
/// coordinates. Runs until every column is active (final step has
/// `gamma = 1` and the fit equals the full least squares projection) or the
/// step cap is reached.
pub fn lars_fit(dm: &DesignMatrix, y: &[f64], opts: &LarsOptions) -> Result<LarsPath> {
    fit_engine(dm, y, None, opts)
}

/// Marginality-constrained path: identical to [`lars_fit`] except that each
/// step's active set is closed under the dependency structure, so a column
/// never enters without the columns it depends on.
pub fn modified_lars_fit(
    dm: &DesignMatrix,
    y: &[f64],
    deps: &DependencyStructure,
    opts: &LarsOptions,
) -> Result<LarsPath> {
    if deps.m() != dm.n_terms() {
        return Err(Error::DimensionMismatch {
            op: "modified_lars_fit dependency structure",
            expected: dm.n_terms(),
            got: deps.m(),
        });
    }
    fit_engine(dm, y, Some(deps), opts)
}

fn fit_engine(
    dm: &DesignMatrix,
    y: &[f64],
    deps: Option<&DependencyStructure>,
    opts: &LarsOptions,
) -> Result<LarsPath> {
    let n = dm.data.rows();
    let m = dm.data.cols();
    if y.len() != n {
        return Err(Error::DimensionMismatch {
            op: "lars response",
            expected: n,
            got: y.len(),
        });
    }
    let y_mean = y.iter().sum::<f64>() / n as f64;
    let yc: Vec<f64> = y.iter().map(|v| v - y_mean).collect();
    let stop_tol = STOP_REL_TOL * dot(&yc, &yc).sqrt();

    // The Gram matrix and X'y are fixed along the path; every active-set
    // solve reads submatrices of them.
    let gram = dm.data.gram();
    let xty = crossprod(&dm.data, &yc)?;

    let max_steps = opts.max_steps.unwrap_or_else(|| m.min(n.saturating_sub(1)));

    let mut mu = vec![0.0; n];
    let mut coef = vec![0.0; m];
    let mut steps: Vec<PathStep> = Vec::new();
    let mut first_entry: Vec<Option<usize>> = vec![None; m];
    let mut prev_a0: BTreeSet<usize> = BTreeSet::new();
    let mut forced: Vec<usize> = Vec::new();
    let mut complete = false;

    for k in 1..=max_steps {
        let (chat, chat_max) = current_correlations(dm, &yc, &mu)?;
        if chat_max <= stop_tol {
            complete = true;
            break;
        }

        // Tie set, plus previously active columns and the columns that
        // attained the last step's minimum: both tie exactly in real
        // arithmetic, the union only guards roundoff drift.
        let mut a0 = active_set(&chat, chat_max, opts.tie_tol);
        a0.extend(prev_a0.iter().copied());
        a0.extend(forced.iter().copied());
        let (a1, a) = match deps {
            Some(d) => expand_active(&a0, d),
            None => (BTreeSet::new(), a0.clone()),
        };
        let solve_cols = factor_design_columns(&a, &opts.factor_groups);

        let theta = solve_on(&gram, &xty, &solve_cols)
            .map_err(|pos| Error::RankDeficient { col: solve_cols[pos] })?;
        let ybar = dm.data.select_columns(&solve_cols).matvec(&theta);
        let dir: Vec<f64> = ybar.iter().zip(&mu).map(|(a, b)| a - b).collect();
        let avec = crossprod(&dm.data, &dir)?;

        let complement: Vec<usize> = (0..m).filter(|j| !a.contains(j)).collect();
        let (gamma, joiners) = if complement.is_empty() {
            (1.0, Vec::new())
        } else {
            gamma_with_joiners(chat_max, &chat, &avec, &complement)
        };

        for (mi, di) in mu.iter_mut().zip(&dir) {
            *mi += gamma * di;
        }
        for c in coef.iter_mut() {
            *c *= 1.0 - gamma;
        }
        for (t, &j) in solve_cols.iter().enumerate() {
            coef[j] += gamma * theta[t];
        }
        for &j in &a {
            first_entry[j].get_or_insert(k);
        }

        steps.push(PathStep {
            k,
            chat,
            chat_max,
            a0: a0.clone(),
            a1,
            ybar,
            avec,
            gamma,
            mu: mu.clone(),
            coef: coef.clone(),
        });
        prev_a0 = a0;
        forced = joiners;

        if complement.is_empty() {
            complete = true;
            break;
        }
    }

    Ok(LarsPath {
        steps,
        terms: dm.terms.clone(),
        first_entry,
        complete,
    })
}

/// Solves the normal equations restricted to `cols`, reading the cached Gram
/// matrix. The error carries the position within `cols` of the failing
/// column.
fn solve_on(gram: &Matrix, xty: &[f64], cols: &[usize]) -> std::result::Result<Vec<f64>, usize> {
    let k = cols.len();
    let mut g = Matrix::zeros(k, k);
    for (a, &i) in cols.iter().enumerate() {
        for (b, &j) in cols.iter().enumerate() {
            g.set(a, b, gram.get(i, j));
        }
    }
    let rhs: Vec<f64> = cols.iter().map(|&i| xty[i]).collect();
    solve_spd(&g, &rhs)
}

/// One row per step of the coefficient table behind the path plots.
#[derive(Debug, Clone, PartialEq)]
pub struct PathRow {
    pub step: usize,
    /// Sum of absolute coefficients at this step.
    pub sum_abs: f64,
    pub coef: Vec<f64>,
}

/// Coefficient table along the path, starting from the all-zero row at
/// step 0.
pub fn coefficients_along_path(path: &LarsPath) -> Vec<PathRow> {
    let m = path.terms.len();
    let mut rows = vec![PathRow {
        step: 0,
        sum_abs: 0.0,
        coef: vec![0.0; m],
    }];
    for s in &path.steps {
        rows.push(PathRow {
            step: s.k,
            sum_abs: s.coef.iter().map(|c| c.abs()).sum(),
            coef: s.coef.clone(),
        });
    }
    rows
}
