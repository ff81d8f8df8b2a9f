use serde::Serialize;

use crate::error::{ModelError, Result};
use crate::integration::{compute_p12_closed_form, marginal_exact};
use crate::model::{HardySettings, ModelParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FactorizationMode {
    /// Model probabilities as they are.
    Raw,
    /// Joints divided by the largest of the four before factorizing.
    Renormalized,
}

impl FactorizationMode {
    pub fn as_str(self) -> &'static str {
        match self {
            FactorizationMode::Raw => "raw",
            FactorizationMode::Renormalized => "renormalized",
        }
    }
}

/// `rhs / lhs`, with the degenerate cases kept apart from NaN.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Ratio {
    Finite(f64),
    /// `lhs = 0`, `rhs != 0`.
    Infinite,
    /// `lhs = rhs = 0`.
    Undefined,
}

impl Ratio {
    pub fn of(numerator: f64, denominator: f64) -> Ratio {
        if denominator != 0.0 {
            Ratio::Finite(numerator / denominator)
        } else if numerator != 0.0 {
            Ratio::Infinite
        } else {
            Ratio::Undefined
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Ratio::Finite(r) => Some(r),
            _ => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Ratio::Finite(_) => "finite",
            Ratio::Infinite => "infinite",
            Ratio::Undefined => "undefined",
        }
    }
}

/// Both sides of `P12(θ10,θ20) = P12(θ1,θ2) P12(θ20|θ1) P12(θ10|θ2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorizationReport {
    pub mode: FactorizationMode,
    /// `(θ1,θ2), (θ1,θ20), (θ10,θ2), (θ10,θ20)`, after the mode's scaling.
    pub joints: [f64; 4],
    pub marginal1: f64,
    pub marginal2: f64,
    /// `P12(θ20 | θ1) = P12(θ1, θ20) / P1`.
    pub cond_20_given_1: f64,
    /// `P12(θ10 | θ2) = P12(θ10, θ2) / P2`.
    pub cond_10_given_2: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: Ratio,
}

/// Applies the factorization to four joint probabilities (ordered as
/// [`HardySettings::pairs`]) and the two single-arm marginals.
pub fn factorize(
    joints: [f64; 4],
    marginal1: f64,
    marginal2: f64,
    mode: FactorizationMode,
) -> Result<FactorizationReport> {
    if marginal1 == 0.0 {
        return Err(ModelError::ZeroMarginal { which: "P1" });
    }
    if marginal2 == 0.0 {
        return Err(ModelError::ZeroMarginal { which: "P2" });
    }
    let joints = match mode {
        FactorizationMode::Raw => joints,
        FactorizationMode::Renormalized => {
            let max = joints.iter().copied().fold(0.0, f64::max);
            if max > 0.0 {
                joints.map(|j| j / max)
            } else {
                joints
            }
        }
    };
    let [p12, p1_20, p10_2, p10_20] = joints;
    let cond_20_given_1 = p1_20 / marginal1;
    let cond_10_given_2 = p10_2 / marginal2;
    let rhs = p12 * cond_20_given_1 * cond_10_given_2;
    Ok(FactorizationReport {
        mode,
        joints,
        marginal1,
        marginal2,
        cond_20_given_1,
        cond_10_given_2,
        lhs: p10_20,
        rhs,
        ratio: Ratio::of(rhs, p10_20),
    })
}

/// Tests the factorization assumption on the model, with closed-form joints
/// and the exact marginal `C ε / 4` on both arms.
pub fn factorization_check(
    hs: &HardySettings,
    params: &ModelParams,
    mode: FactorizationMode,
) -> Result<FactorizationReport> {
    let joints = hs.pairs().map(|s| compute_p12_closed_form(s, params).value);
    let m = marginal_exact(params);
    factorize(joints, m, m, mode)
}
