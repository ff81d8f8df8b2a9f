//! The two critiques of the experimental argument, as measurable quantities,
//! and the Hardy four-probability report.

mod factorization;
mod hardy;
mod sum_rule;

pub use factorization::{
    factorization_check, factorize, FactorizationMode, FactorizationReport, Ratio,
};
pub use hardy::{hardy_report, HardyEntry, HardyReport, NFit};
pub use sum_rule::{
    fair_sampling_residual, residual_scaling, ResidualScaling, ScalingRow, SumRuleReport,
    SumRuleSides,
};

/// Residuals with magnitude below this are indistinguishable from rounding.
pub const NUMERICAL_FLOOR: f64 = 1e-13;

/// Closed form and quadrature must agree to this absolute tolerance.
pub const ORACLE_TOL: f64 = 1e-10;
