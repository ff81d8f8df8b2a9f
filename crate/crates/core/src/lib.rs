//! Local-hidden-variable (LHV) model of a two-photon polarization coincidence
//! experiment.
//!
//! The hidden variable of each emitted pair is a pair of unit vectors
//! `(u1, u2)` distributed with density `3/(4π)² (u1·R u2)²`, where `R` rotates
//! the x-y plane by `φ = arccos(|R|²/|T|²)`. A photon is detected behind its
//! polarizer with probability `C` when its vector lies in a small cap of
//! chord-squared size `ε` around the analyzer direction, and never otherwise.
//!
//! The crate is organised as:
//!
//! * [`model`]: domain types and the analytic formulas (quantum prediction,
//!   density, responses, leading-order coincidence probability).
//! * [`integration`]: three independent evaluators of the coincidence
//!   probability (exact-sampling Monte Carlo, cap-local quadrature and a
//!   closed form built from cap second moments), plus marginals and the
//!   density normalization check.
//! * [`analysis`]: the fair-sampling sum rule, the factorization assumption,
//!   and the Hardy four-probability report.

pub mod analysis;
pub mod error;
pub mod integration;
pub mod model;
pub mod vector;

pub use error::{ContractViolation, ModelError, Result};
pub use integration::{
    compute_p12_closed_form, compute_p12_quadrature, density_norm_check, estimate_p12_mc,
    marginal_exact, marginal_p1, marginal_p2, sample_hidden_pair, CapMoments, McEstimate, McSpec,
    QuadratureSpec,
};
pub use model::{
    analyzer_vector, density, leading_order_p12, normalize_params, quantum_prediction, response,
    rotate_phi, zero_condition_angle, BeamSplitter, HardySettings, HiddenPair, Method, ModelParams,
    Normalization, ProbabilityEstimate, Setting,
};
pub use vector::Vec3;
