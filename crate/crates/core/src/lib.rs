//! Delta calculus on products of three bounded time scales, and checkers for
//! three-variable Ostrowski and Cebysev type inequalities built on it.
//!
//! Time scales are finite point sets, so every delta derivative is a forward
//! difference quotient and every delta integral a weighted sum. The
//! continuous case is approached through uniform-grid refinement.

pub mod calculus;
pub mod domain;
pub mod error;
pub mod function;
pub mod identities;
pub mod inequality;
pub mod oracle;
pub mod timescale;

pub use calculus::{
    delta_integral_1d, mixed_partial, mixed_partial_in_order, pairwise_sum, partial_delta, sup_norm_mixed,
    triple_delta_integral, MixedPartialField, PrefixIntegrator,
};
pub use domain::{Box3, BoxSpec, GridIndex};
pub use error::{Error, Result};
pub use function::{AxisFactor, FactorKind, Function3, FunctionLiteral, Grid3, Monomial, Polynomial, TrigProduct};
pub use identities::{
    averaged_identity_residual, functional_a, functional_b, identity_residual, octant_identity_rhs, Analysis,
    CornerCombination, Octant, Side,
};
pub use inequality::{
    cebysev_check, cebysev_from_analyses, classical_cebysev_check, classical_ostrowski_check,
    continuous_convergence_study, discrete_instance_check, ostrowski_check, ostrowski_from_analysis, CebysevReport,
    ConvergenceRecord, ConvergenceTarget, Function1, Margin, OstrowskiReport,
};
pub use timescale::{ScaleKind, ScaleSpec, TimeScale, DEFAULT_TOLERANCE};
