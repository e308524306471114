//! Central registry of numeric tolerances.
//!
//! Every floating-point comparison in the crate goes through one of these
//! named constants so that a tolerance can be tightened in exactly one place.
//! All are relative to a problem-dependent scale unless noted otherwise.

/// Residual bound for polynomial root refinement, relative to the largest
/// coefficient magnitude.
pub const ROOT_RESIDUAL: f64 = 1e-8;

/// Relative tolerance for the adjugate identity `M * adj(M) = det(M) * I`.
pub const ADJUGATE_REL: f64 = 1e-10;

/// Residual bound for simultaneous diagonalization: off-diagonal mass of the
/// two congruence-transformed forms.
pub const DIAG_RESIDUAL: f64 = 1e-8;

/// Relative singular-value cutoff for numeric rank.
pub const RANK_REL: f64 = 1e-8;

/// Residual bound for membership of sampled points on the two quadrics.
pub const MEMBERSHIP: f64 = 1e-9;

/// Distance bound when matching two multisets of complex numbers.
pub const MATCH_TOL: f64 = 1e-6;

/// Agreement bound for values that must coincide across gauge choices.
pub const GAUGE_REL: f64 = 1e-8;

/// Agreement bound for quadratic homogeneity under covector scaling.
pub const HOMOGENEITY: f64 = 1e-10;

/// Agreement bound under the joint rescaling that fixes values.
pub const RESCALE: f64 = 1e-12;

/// Relative bound for Poisson brackets that must vanish.
pub const BRACKET_REL: f64 = 1e-5;

/// Relative conservation drift allowed along a thousand-step flow.
pub const DRIFT_REL: f64 = 1e-6;

/// Residual bound for Gram matrices that must vanish on lifted planes.
pub const GRAM_RESIDUAL: f64 = 1e-8;

/// Projective distance bound for the lift/recover round trip.
pub const ROUND_TRIP: f64 = 1e-6;

/// Minimal pairwise separation required between pencil parameters.
pub const PARAM_SEPARATION: f64 = 1e-6;

/// Minimal pairwise separation between branch points of a curve.
pub const BRANCH_SEPARATION: f64 = 1e-8;

/// Relative error contract for differentiation of chart quantities.
pub const DERIVATIVE_REL: f64 = 1e-7;

/// Squared-coordinate floor below which a chart refuses to take square roots.
pub const CHART_FLOOR: f64 = 1e-8;

/// Estimated single-step integration error that forces a step rejection.
pub const STEP_REJECT: f64 = 1e-8;

/// Relative residual allowed when fitting the linear map between the two
/// fiber encodings, and when checking it on held-out samples.
pub const ENCODING_FIT: f64 = 1e-6;

/// Relative cutoff under which the dual form declares a hyperplane tangent.
pub const DUAL_DIVISOR: f64 = 1e-8;

/// Threshold for treating a drawn coordinate as too close to zero to be safe.
pub const UNLUCKY_FLOOR: f64 = 1e-9;

/// Default finite-difference step for chart derivatives.
pub const FD_STEP: f64 = 1e-5;
