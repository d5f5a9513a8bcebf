//! Column dependency structures for hierarchical selection: which columns
//! must accompany a selected column, the closure of an active set under that
//! relation, and factor-group handling for the solve set.

use std::collections::{BTreeMap, BTreeSet};

use crate::design::{TermDescriptor, TermKind};
use crate::error::{Error, Result};

/// The relation `d`: `deps[i]` is the set of columns that must be in the
/// model whenever column `i` is. Self-dependencies are not representable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencyStructure {
    m: usize,
    deps: Vec<BTreeSet<usize>>,
}

impl DependencyStructure {
    /// No dependencies at all; the modified algorithm degenerates to the
    /// plain one under this structure.
    pub fn empty(m: usize) -> Self {
        DependencyStructure {
            m,
            deps: vec![BTreeSet::new(); m],
        }
    }

    /// Builds a structure from `(i, j)` pairs meaning "column i requires
    /// column j". Rejects self-dependencies and out-of-range indices.
    pub fn from_pairs(m: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut s = DependencyStructure::empty(m);
        for (i, j) in pairs {
            if i >= m || j >= m {
                return Err(Error::InvalidConfig(format!(
                    "dependency ({i}, {j}) out of range for {m} columns"
                )));
            }
            if i == j {
                return Err(Error::InvalidConfig(format!(
                    "column {i} cannot depend on itself"
                )));
            }
            s.deps[i].insert(j);
        }
        Ok(s)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn deps_of(&self, i: usize) -> &BTreeSet<usize> {
        &self.deps[i]
    }

    /// True when every dependency set is empty.
    pub fn is_trivial(&self) -> bool {
        self.deps.iter().all(|d| d.is_empty())
    }
}

/// Indicator columns encoding one categorical factor. The whole group enters
/// the model together; `held_out` is kept out of the solve set so the design
/// submatrix stays full rank.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorGroup {
    pub factor: String,
    pub members: Vec<usize>,
    pub held_out: usize,
}

impl FactorGroup {
    pub fn new(factor: impl Into<String>, members: Vec<usize>, held_out: usize) -> Result<Self> {
        let factor = factor.into();
        if members.len() < 2 {
            return Err(Error::InvalidFactorGroup {
                factor,
                reason: "needs at least two member columns".into(),
            });
        }
        let mut seen = BTreeSet::new();
        if !members.iter().all(|&c| seen.insert(c)) {
            return Err(Error::InvalidFactorGroup {
                factor,
                reason: "member columns must be distinct".into(),
            });
        }
        if !members.contains(&held_out) {
            return Err(Error::InvalidFactorGroup {
                factor,
                reason: format!("held-out column {held_out} is not a member"),
            });
        }
        Ok(FactorGroup {
            factor,
            members,
            held_out,
        })
    }

    /// Convenience constructor holding out the last member in declared order.
    pub fn with_last_held_out(factor: impl Into<String>, members: Vec<usize>) -> Result<Self> {
        let held_out = *members.last().ok_or_else(|| Error::InvalidFactorGroup {
            factor: "?".into(),
            reason: "needs at least two member columns".into(),
        })?;
        FactorGroup::new(factor, members, held_out)
    }
}

/// Derives the marginality relation from term metadata: a cross term requires
/// both of its mains, a square requires its main, an indicator requires every
/// other indicator of the same factor, and mains require nothing.
pub fn marginality_dependencies(terms: &[TermDescriptor]) -> Result<DependencyStructure> {
    let mut main_pos: BTreeMap<usize, usize> = BTreeMap::new();
    let mut factor_cols: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (pos, t) in terms.iter().enumerate() {
        match &t.kind {
            TermKind::Main(i) => {
                main_pos.insert(*i, pos);
            }
            TermKind::Indicator { factor, .. } => {
                factor_cols.entry(factor.as_str()).or_default().push(pos);
            }
            _ => {}
        }
    }
    let require_main = |i: usize| -> Result<usize> {
        main_pos.get(&i).copied().ok_or(Error::UnknownTerm {
            name: format!("X{}", i + 1),
        })
    };
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for (pos, t) in terms.iter().enumerate() {
        match &t.kind {
            TermKind::Main(_) => {}
            TermKind::Square(i) => pairs.push((pos, require_main(*i)?)),
            TermKind::Cross(i, j) => {
                pairs.push((pos, require_main(*i)?));
                pairs.push((pos, require_main(*j)?));
            }
            TermKind::Indicator { factor, .. } => {
                for &other in &factor_cols[factor.as_str()] {
                    if other != pos {
                        pairs.push((pos, other));
                    }
                }
            }
        }
    }
    DependencyStructure::from_pairs(terms.len(), pairs)
}

/// Closes `a0` under the dependency structure. Returns `(a1, a)` where
/// `a = a0 ∪ a1` and `a1` is the set of columns pulled in by dependencies,
/// followed transitively.
pub fn expand_active(
    a0: &BTreeSet<usize>,
    d: &DependencyStructure,
) -> (BTreeSet<usize>, BTreeSet<usize>) {
    let mut a = a0.clone();
    let mut stack: Vec<usize> = a0.iter().copied().collect();
    while let Some(i) = stack.pop() {
        for &j in d.deps_of(i) {
            if a.insert(j) {
                stack.push(j);
            }
        }
    }
    let a1: BTreeSet<usize> = a.difference(a0).copied().collect();
    (a1, a)
}

/// Columns to use for the active-set solve: every column of `a`, minus the
/// held-out column of each factor group whose members are all active.
pub fn factor_design_columns(a: &BTreeSet<usize>, groups: &[FactorGroup]) -> Vec<usize> {
    let held: BTreeSet<usize> = groups
        .iter()
        .filter(|g| g.members.iter().all(|c| a.contains(c)))
        .map(|g| g.held_out)
        .collect();
    a.iter().copied().filter(|c| !held.contains(c)).collect()
}
