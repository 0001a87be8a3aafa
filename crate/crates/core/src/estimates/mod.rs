//! Attraction radii, comparison equation and decay envelopes.

mod check;
mod comparison;
mod envelope;
mod radius;
mod search;

pub use check::{check_comparison_bounds, ComparisonReport};
pub use comparison::{
    comparison_solution, connection_constants, connection_from, ComparisonSolution, Connection,
};
pub use envelope::{
    condition22_check, envelope_classical, envelope_razumikhin, Condition22, EstimateCertificate,
    IDENTITY_RTOL,
};
pub use radius::{
    attraction_radius_classical, attraction_radius_razumikhin, radius_residual, radius_root,
    ROOT_RTOL,
};
pub use search::{
    search_alpha_rho, validate_splits, CandidateDiagnostic, SearchGrid, SearchOutcome,
};
