//! Norms in the full, reduced and ideal completions of the group ring,
//! Schur multipliers, equality certificates and the coproduct.

mod coproduct;
mod gns;
mod multipliers;
mod norms;
mod report;

pub use coproduct::{coproduct, coproduct_checks, is_coassociative, sparse_rank, CoproductReport, TensorElement, DENSITY_LIMIT};
pub use gns::{gns_norm_lower, GnsContext, DENSE_LIMIT};
pub use multipliers::{
    default_thresholds, equality_certificate, schur_multiply, state_compose, state_compose_checked, witness_label,
    EqualityCertificate, FunctionCheck, SchurCheck,
};
pub use norms::{
    haagerup_upper_bound, radial_coefficients, radial_spectral_bound, reduced_norm_lower, reduced_norm_lower_with,
    reduced_upper_bound, trivial_norm, BoundKind, ConvolutionOperator, NormEstimate, Tolerances, POWER_ITERATION_CAP,
    POWER_ITERATION_TOL,
};
pub use report::{default_family, norm_gap_report, GapConfig, GnsEntry, NormGapReport};
