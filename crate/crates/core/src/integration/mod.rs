//! Evaluators of the joint detection probability
//! `P12 = ∫ P1(θ1, u1) P2(θ̄2, u2) ρ(u1, u2) d²u1 d²u2`.
//!
//! Three routes are provided and are expected to agree with each other:
//! [`estimate_p12_mc`] samples the density exactly, [`compute_p12_quadrature`]
//! integrates over the two detection caps with a product rule, and
//! [`compute_p12_closed_form`] uses the second moments of the caps.

mod gauss;
mod monte_carlo;
mod quadrature;
mod sampler;

use std::f64::consts::PI;

pub use gauss::gauss_legendre;
pub use monte_carlo::{estimate_p12_mc, McEstimate, McSpec, LOW_HIT_THRESHOLD};
pub use sampler::sample_hidden_pair;

use crate::error::{ModelError, Result};
use crate::model::{
    density_vectors, rotate_phi, Method, ModelParams, ProbabilityEstimate, Setting,
    DENSITY_PREFACTOR,
};
use quadrature::{integrate_product, CapRule};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureSpec {
    n_radial: usize,
    n_azimuthal: usize,
}

impl QuadratureSpec {
    pub fn new(n_radial: usize, n_azimuthal: usize) -> Result<Self> {
        if n_radial < 2 {
            return Err(ModelError::InvalidSpec {
                what: "quadrature spec",
                reason: format!("n_radial = {n_radial}, must be at least 2"),
            });
        }
        if n_azimuthal < 4 {
            return Err(ModelError::InvalidSpec {
                what: "quadrature spec",
                reason: format!("n_azimuthal = {n_azimuthal}, must be at least 4"),
            });
        }
        Ok(QuadratureSpec {
            n_radial,
            n_azimuthal,
        })
    }

    pub fn n_radial(&self) -> usize {
        self.n_radial
    }

    pub fn n_azimuthal(&self) -> usize {
        self.n_azimuthal
    }

    fn cap(&self, axis: crate::Vec3, epsilon: f64) -> CapRule {
        CapRule::new(axis, 1.0 - epsilon / 2.0, self.n_radial, self.n_azimuthal)
    }

    fn sphere(&self) -> CapRule {
        CapRule::sphere(self.n_radial, self.n_azimuthal)
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            n_radial: 4,
            n_azimuthal: 8,
        }
    }
}

/// Second moments of the uniform measure on a detection cap of size `ε`.
///
/// For a cap with axis `r`, `∫ u uᵀ d²u = q I + (p - q) r rᵀ`: `p` is the
/// moment along the axis and `q` the moment along each transverse direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapMoments {
    pub p: f64,
    pub q: f64,
}

impl CapMoments {
    pub fn new(epsilon: f64) -> Self {
        let ca = 1.0 - epsilon / 2.0;
        let ca3 = ca * ca * ca;
        CapMoments {
            p: 2.0 * PI * (1.0 - ca3) / 3.0,
            q: PI * (2.0 - 3.0 * ca + ca3) / 3.0,
        }
    }

    /// `p + 2q`, which equals the cap area `πε`.
    pub fn trace(&self) -> f64 {
        self.p + 2.0 * self.q
    }
}

/// Exact joint probability from the cap second moments:
/// `C² 3/(4π)² [3q² + 2q(p - q) + (p - q)² (r1 · R r2)²]`.
pub fn compute_p12_closed_form(setting: Setting, params: &ModelParams) -> ProbabilityEstimate {
    let CapMoments { p, q } = CapMoments::new(params.epsilon());
    let (r1, r2) = setting.analyzers();
    let d = r1.dot(rotate_phi(r2, params.phi()));
    let a = p - q;
    let c2 = params.c() * params.c();
    let value = c2 * DENSITY_PREFACTOR * (3.0 * q * q + 2.0 * q * a + a * a * d * d);
    ProbabilityEstimate::exact(value, Method::ClosedForm)
}

/// Joint probability by a product rule over the two detection caps.
///
/// Inside the caps the integrand is `C² ρ`, a quadratic polynomial in the
/// coordinates of each vector, so the rule is exact for any valid spec.
pub fn compute_p12_quadrature(
    setting: Setting,
    params: &ModelParams,
    quad: &QuadratureSpec,
) -> ProbabilityEstimate {
    let (r1, r2) = setting.analyzers();
    let eps = params.epsilon();
    let phi = params.phi();
    let cap1 = quad.cap(r1, eps);
    // Rotate cap 2 once instead of every node pair.
    let cap2 = CapRule {
        nodes: quad
            .cap(r2, eps)
            .nodes
            .into_iter()
            .map(|(u, w)| (rotate_phi(u, phi), w))
            .collect(),
    };
    let integral = integrate_product(&cap1, &cap2, |u1, ru2| {
        let d = u1.dot(ru2);
        d * d
    });
    let c2 = params.c() * params.c();
    ProbabilityEstimate::exact(c2 * DENSITY_PREFACTOR * integral, Method::Quadrature)
}

/// Exact single-arm detection probability `C ε / 4`, the same for both arms
/// and every polarizer angle.
pub fn marginal_exact(params: &ModelParams) -> f64 {
    params.c() * params.epsilon() / 4.0
}

/// Probability that photon 1 is detected at `theta1`, by quadrature over its
/// cap and the whole sphere for `u2`.
pub fn marginal_p1(
    theta1: f64,
    params: &ModelParams,
    quad: &QuadratureSpec,
) -> ProbabilityEstimate {
    let phi = params.phi();
    let cap = quad.cap(crate::analyzer_vector(theta1), params.epsilon());
    let integral = integrate_product(&cap, &quad.sphere(), |u1, u2| density_vectors(u1, u2, phi));
    ProbabilityEstimate::exact(params.c() * integral, Method::Quadrature)
}

/// Arm-2 counterpart of [`marginal_p1`] for the unbarred angle `theta2`.
pub fn marginal_p2(
    theta2: f64,
    params: &ModelParams,
    quad: &QuadratureSpec,
) -> ProbabilityEstimate {
    let phi = params.phi();
    let cap = quad.cap(crate::analyzer_vector(theta2), params.epsilon());
    let integral = integrate_product(&quad.sphere(), &cap, |u1, u2| density_vectors(u1, u2, phi));
    ProbabilityEstimate::exact(params.c() * integral, Method::Quadrature)
}

/// Integral of the density over both spheres; equals 1.
pub fn density_norm_check(phi: f64, quad: &QuadratureSpec) -> f64 {
    let sphere = quad.sphere();
    integrate_product(&sphere, &sphere, |u1, u2| density_vectors(u1, u2, phi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::leading_order_p12;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, FRAC_PI_6};

    fn params(gamma: f64, c: f64, eps: f64) -> ModelParams {
        ModelParams::new(gamma, c, eps).unwrap()
    }

    #[test]
    fn cap_moment_trace_identity() {
        for i in 1..=200 {
            let eps = 2.0 * i as f64 / 200.0;
            let m = CapMoments::new(eps);
            assert_abs_diff_eq!(m.trace(), PI * eps, epsilon = 1e-12);
            if eps < 2.0 {
                assert!(m.p > m.q && m.q >= 0.0);
            }
        }
    }

    #[test]
    fn closed_form_matches_quadrature() {
        let quad = QuadratureSpec::default();
        for &gamma in &[0.25, 0.5, 1.0] {
            for &eps in &[0.05, 0.1, 0.2, 1.0, 2.0] {
                let p = params(gamma, 0.8, eps);
                for i in 0..7 {
                    for j in 0..7 {
                        let s = Setting::new(i as f64 * 0.45 - 1.3, j as f64 * 0.5 - 1.1);
                        let a = compute_p12_closed_form(s, &p).value;
                        let b = compute_p12_quadrature(s, &p, &quad).value;
                        assert_abs_diff_eq!(a, b, epsilon = 1e-12);
                    }
                }
            }
        }
    }

    // Values below were computed independently: the cap moment matrices were
    // integrated numerically in spherical coordinates and contracted as
    // tr(M1 R M2 Rᵀ), without using the p/q formulas.
    #[test]
    fn closed_form_frozen_values() {
        let cases = [
            ((0.0, 0.0), 0.5, 0.01, 1.856_351_328_320_316_4e-5),
            ((0.0, 0.0), 0.5, 0.1, 1.697_423_828_125_002_8e-3),
            ((FRAC_PI_6, FRAC_PI_3), 0.5, 0.2, 2.985_446_289_062_499_3e-3),
            (
                (FRAC_PI_4, -1.107_148_717_794_090_4),
                0.5,
                0.01,
                9.324_335_839_843_601e-8,
            ),
            ((FRAC_PI_6, PI / 5.0), 0.5, 0.1, 1.244_406_856_453_269_6e-3),
            (
                (FRAC_PI_3, 2.0 * PI / 5.0),
                0.5,
                0.1,
                6.047_217_400_495_224e-4,
            ),
        ];
        for ((t1, t2), gamma, eps, expected) in cases {
            let expected: f64 = expected;
            let v = compute_p12_closed_form(Setting::new(t1, t2), &params(gamma, 1.0, eps)).value;
            assert_abs_diff_eq!(v, expected, epsilon = 1e-12 * expected.max(1e-6));
        }
    }

    #[test]
    fn quadrature_is_exact_under_refinement() {
        let p = params(0.5, 1.0, 0.1);
        let s = Setting::new(0.0, 0.0);
        let base = compute_p12_quadrature(s, &p, &QuadratureSpec::new(2, 5).unwrap()).value;
        let fine = compute_p12_quadrature(s, &p, &QuadratureSpec::new(2, 10).unwrap()).value;
        let finer = compute_p12_quadrature(s, &p, &QuadratureSpec::new(6, 16).unwrap()).value;
        assert_abs_diff_eq!(base, fine, epsilon = 1e-13);
        assert_abs_diff_eq!(base, finer, epsilon = 1e-13);
        assert_abs_diff_eq!(base, compute_p12_closed_form(s, &p).value, epsilon = 1e-12);
    }

    #[test]
    fn closed_form_small_eps_limit() {
        let s = Setting::new(FRAC_PI_6, FRAC_PI_3);
        let eps = 1e-3;
        let p = params(0.5, 1.0, eps);
        let gap = compute_p12_closed_form(s, &p).value / leading_order_p12(s, &p) - 1.0;
        assert!(gap.abs() <= 5.0 * eps, "{gap}");

        let p = params(0.5, 1.0, 0.01);
        let s = Setting::new(0.0, 0.0);
        let v = compute_p12_closed_form(s, &p).value;
        assert!((v / 1.875e-5 - 1.0).abs() <= 2.0 * 0.01);
    }

    #[test]
    fn zero_setting_floor_is_order_eps_cubed() {
        let eps = 0.01;
        let p = params(0.5, 1.0, eps);
        let s = Setting::new(FRAC_PI_4, crate::zero_condition_angle(FRAC_PI_4, 0.5));
        let ratio = compute_p12_closed_form(s, &p).value / p.leading_scale();
        assert!((ratio / (eps / 2.0) - 1.0).abs() < 0.02, "{ratio}");
    }

    #[test]
    fn quadrature_spec_validation() {
        assert!(QuadratureSpec::new(1, 8).is_err());
        assert!(QuadratureSpec::new(2, 3).is_err());
        assert!(QuadratureSpec::new(2, 4).is_ok());
    }

    #[test]
    fn density_normalization() {
        let quad = QuadratureSpec::default();
        for phi in [0.0, FRAC_PI_3, 0.25f64.acos()] {
            assert_abs_diff_eq!(density_norm_check(phi, &quad), 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn marginal_examples() {
        let quad = QuadratureSpec::default();
        let p = params(0.5, 1.0, 0.01);
        let a = marginal_p1(0.0, &p, &quad).value;
        let b = marginal_p1(1.234, &p, &quad).value;
        assert_abs_diff_eq!(a, 0.0025, epsilon = 1e-10);
        assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        let half = params(0.5, 0.5, 0.01);
        assert_abs_diff_eq!(
            marginal_p1(0.3, &half, &quad).value,
            0.00125,
            epsilon = 1e-10
        );
        assert_abs_diff_eq!(
            marginal_p2(-0.8, &half, &quad).value,
            0.00125,
            epsilon = 1e-10
        );
        assert_eq!(marginal_exact(&half), 0.00125);
    }
}
