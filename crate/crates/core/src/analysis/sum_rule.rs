use super::NUMERICAL_FLOOR;
use crate::error::{ContractViolation, ModelError, Result};
use crate::integration::{compute_p12_closed_form, compute_p12_quadrature, QuadratureSpec};
use crate::model::{canonical_angle, leading_order_p12, ModelParams, Setting};

/// The four probabilities entering the sum rule for one evaluator.
///
/// `lhs = P12(θ1, θ2) + P12(θ1, θ̄2)` and `rhs` is the same with `θ20`.
/// Unbarred probabilities use polarizer 2 physically at `θ2`, i.e. response
/// vector `analyzer_vector(θ2 - π/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SumRuleSides {
    pub p_theta2: f64,
    pub p_bar_theta2: f64,
    pub p_theta20: f64,
    pub p_bar_theta20: f64,
}

impl SumRuleSides {
    fn evaluate(theta1: f64, theta2: f64, theta20: f64, eval: impl Fn(Setting) -> f64) -> Self {
        SumRuleSides {
            p_theta2: eval(Setting::with_physical_polarizer2(theta1, theta2)),
            p_bar_theta2: eval(Setting::new(theta1, theta2)),
            p_theta20: eval(Setting::with_physical_polarizer2(theta1, theta20)),
            p_bar_theta20: eval(Setting::new(theta1, theta20)),
        }
    }

    pub fn lhs(&self) -> f64 {
        self.p_theta2 + self.p_bar_theta2
    }

    pub fn rhs(&self) -> f64 {
        self.p_theta20 + self.p_bar_theta20
    }

    pub fn residual(&self) -> f64 {
        self.lhs() - self.rhs()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SumRuleReport {
    pub theta1: f64,
    pub theta2: f64,
    pub theta20: f64,
    pub epsilon: f64,
    pub closed_form: SumRuleSides,
    pub quadrature: SumRuleSides,
    pub leading_order: SumRuleSides,
    /// `θ2 ≡ θ20 (mod π)`: both sides are the same probabilities.
    pub trivial: bool,
}

impl SumRuleReport {
    pub fn lhs(&self) -> f64 {
        self.closed_form.lhs()
    }

    pub fn rhs(&self) -> f64 {
        self.closed_form.rhs()
    }

    /// Closed-form residual; exactly zero for trivial reports.
    pub fn residual(&self) -> f64 {
        if self.trivial {
            0.0
        } else {
            self.closed_form.residual()
        }
    }

    pub fn quadrature_residual(&self) -> f64 {
        if self.trivial {
            0.0
        } else {
            self.quadrature.residual()
        }
    }

    pub fn leading_order_residual(&self) -> f64 {
        if self.trivial {
            0.0
        } else {
            self.leading_order.residual()
        }
    }

    pub fn at_floor(&self) -> bool {
        self.residual().abs() < NUMERICAL_FLOOR
    }

    /// Closed-form and quadrature probabilities agree within `tol`.
    pub fn check_oracles(&self, tol: f64) -> std::result::Result<(), ContractViolation> {
        let cf = &self.closed_form;
        let qd = &self.quadrature;
        let pairs = [
            ("P12(theta1, theta2)", cf.p_theta2, qd.p_theta2),
            ("P12(theta1, bar theta2)", cf.p_bar_theta2, qd.p_bar_theta2),
            ("P12(theta1, theta20)", cf.p_theta20, qd.p_theta20),
            (
                "P12(theta1, bar theta20)",
                cf.p_bar_theta20,
                qd.p_bar_theta20,
            ),
        ];
        for (name, a, b) in pairs {
            ContractViolation::check_close(
                format!("sum rule {name}: closed form vs quadrature"),
                a,
                b,
                tol,
            )?;
        }
        Ok(())
    }
}

fn same_mod_pi(a: f64, b: f64) -> bool {
    let d = canonical_angle(2.0 * (a - b));
    d.abs() < 1e-12
}

/// Both sides of the fair-sampling sum rule, by closed form, quadrature and
/// leading order.
pub fn fair_sampling_residual(
    theta1: f64,
    theta2: f64,
    theta20: f64,
    params: &ModelParams,
    quad: &QuadratureSpec,
) -> SumRuleReport {
    SumRuleReport {
        theta1: canonical_angle(theta1),
        theta2: canonical_angle(theta2),
        theta20: canonical_angle(theta20),
        epsilon: params.epsilon(),
        closed_form: SumRuleSides::evaluate(theta1, theta2, theta20, |s| {
            compute_p12_closed_form(s, params).value
        }),
        quadrature: SumRuleSides::evaluate(theta1, theta2, theta20, |s| {
            compute_p12_quadrature(s, params, quad).value
        }),
        leading_order: SumRuleSides::evaluate(theta1, theta2, theta20, |s| {
            leading_order_p12(s, params)
        }),
        trivial: same_mod_pi(theta2, theta20),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingRow {
    pub epsilon: f64,
    pub abs_residual: f64,
    pub residual_over_eps_sq: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualScaling {
    pub rows: Vec<ScalingRow>,
    pub reports: Vec<SumRuleReport>,
    /// Least-squares slope of `ln|residual|` against `ln ε`; `None` when any
    /// residual is below the numerical floor.
    pub slope: Option<f64>,
}

impl ResidualScaling {
    pub fn below_floor(&self) -> bool {
        self.slope.is_none()
    }
}

/// Tabulates the sum-rule residual over a strictly decreasing list of cap
/// sizes.
pub fn residual_scaling(
    theta1: f64,
    theta2: f64,
    theta20: f64,
    params: &ModelParams,
    eps_list: &[f64],
    quad: &QuadratureSpec,
) -> Result<ResidualScaling> {
    if eps_list.is_empty() {
        return Err(ModelError::InvalidSpec {
            what: "epsilon list",
            reason: "empty".into(),
        });
    }
    if eps_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(ModelError::InvalidSpec {
            what: "epsilon list",
            reason: "must be strictly decreasing".into(),
        });
    }
    let mut rows = Vec::with_capacity(eps_list.len());
    let mut reports = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let p = params.with_epsilon(eps)?;
        let report = fair_sampling_residual(theta1, theta2, theta20, &p, quad);
        let r = report.residual();
        rows.push(ScalingRow {
            epsilon: eps,
            abs_residual: r.abs(),
            residual_over_eps_sq: r / (eps * eps),
        });
        reports.push(report);
    }
    let slope = if rows.len() >= 2 && rows.iter().all(|r| r.abs_residual > NUMERICAL_FLOOR) {
        let pts: Vec<(f64, f64)> = rows
            .iter()
            .map(|r| (r.epsilon.ln(), r.abs_residual.ln()))
            .collect();
        Some(ls_slope(&pts))
    } else {
        None
    };
    Ok(ResidualScaling {
        rows,
        reports,
        slope,
    })
}

fn ls_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}
