use thiserror::Error;

pub type Result<T, E = ModelError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid beam splitter: |R|^2 = {r_sq}, |T|^2 = {t_sq} ({reason})")]
    InvalidBeamSplitter {
        r_sq: f64,
        t_sq: f64,
        reason: &'static str,
    },

    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("invalid {what}: {reason}")]
    InvalidSpec { what: &'static str, reason: String },

    #[error("zero marginal probability for `{which}`")]
    ZeroMarginal { which: &'static str },
}

impl ModelError {
    pub(crate) fn param(name: &'static str, value: f64, reason: &'static str) -> Self {
        ModelError::InvalidParameter {
            name,
            value,
            reason,
        }
    }
}

/// Two evaluators that must agree did not.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{check}: |{left} - {right}| = {gap:e} exceeds tolerance {tolerance:e}")]
pub struct ContractViolation {
    pub check: String,
    pub left: f64,
    pub right: f64,
    pub gap: f64,
    pub tolerance: f64,
}

impl ContractViolation {
    /// Returns `Err` when `|left - right| > tolerance`.
    pub fn check_close(
        check: impl Into<String>,
        left: f64,
        right: f64,
        tolerance: f64,
    ) -> std::result::Result<(), ContractViolation> {
        let gap = (left - right).abs();
        if gap <= tolerance {
            Ok(())
        } else {
            Err(ContractViolation {
                check: check.into(),
                left,
                right,
                gap,
                tolerance,
            })
        }
    }
}
