//! Least angle regression with marginality constraints.
//!
//! The crate provides the plain least-angle path algorithm, a
//! marginality-constrained variant in which higher-order terms drag their
//! constituent lower-order terms into the model, a design-matrix builder for
//! second-order interaction expansions, and a seeded replication harness for
//! studying the order in which terms are selected.
//!
//! The `parallel` feature (on by default) fans replication studies across a
//! rayon thread pool; results are identical to the sequential fallback.

pub mod design;
pub mod error;
pub mod hierarchy;
pub mod lars;
pub mod linalg;
pub mod simulate;

pub use design::{expand_second_order, main_effects_only, DesignMatrix, TermDescriptor, TermKind};
pub use error::{Error, Result};
pub use hierarchy::{
    expand_active, factor_design_columns, marginality_dependencies, DependencyStructure,
    FactorGroup,
};
pub use lars::{
    active_set, coefficients_along_path, current_correlations, gamma_step, lars_fit,
    modified_lars_fit, LarsOptions, LarsPath, PathRow, PathStep,
};
pub use linalg::{crossprod, least_squares, standardize, Matrix, StandardizationRecord};
pub use simulate::{
    correlation_ratio_check, gen_model1, model1_mean, replicate_study, replicate_study_serial,
    replication_seed, selection_steps, AlgorithmKind, CorrelationCheck, DesignKind,
    ReplicationFailure, SelectionHistogram, SimConfig,
};
