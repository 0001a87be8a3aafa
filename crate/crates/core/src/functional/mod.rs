//! The Lyapunov–Krasovskii functional
//!
//! ```text
//! v(phi) = V(phi(0)) + dV(phi(0)) . int_{-h}^0 f(phi(0), phi(theta)) dtheta
//!        + int_{-h}^0 (w1 + (h + theta) w2) |phi(theta)|^(gamma + mu) dtheta
//! ```
//!
//! and the constants of its lower, upper and derivative bounds.

mod bounds;
mod certificate;
mod check;
mod evaluate;

pub use bounds::{
    choose_chi, derivative_bound_constants, h2_cap, lower_bound_constants, set_lower_bound,
    upper_bound_constants, DerivativeBound, LowerBound, SetBound, UpperBound, CHI_MARGIN,
    DELTA_FRACTION,
};
pub use certificate::{FunctionalCertificate, Variant};
pub use check::{
    check_functional_bounds, check_functional_series, functional_series, FunctionalBoundReport,
    DERIVATIVE_RTOL, FD_BUDGET, QUADRATURE_RTOL,
};
pub use evaluate::{
    eval_functional, functional_from_nodes, functional_parts, FunctionalParts, WeightSplit,
};
