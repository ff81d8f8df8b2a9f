//! Domain types and the analytic formulas of the model.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;

use serde::Serialize;

use crate::error::{ModelError, Result};
use crate::vector::Vec3;

/// Largest admissible cap size: a chord-squared of 2 is a hemisphere.
pub const EPSILON_MAX: f64 = 2.0;

/// Above this cap size the leading-order comparison stops being meaningful.
pub const EPSILON_SOFT_MAX: f64 = 0.2;

/// Tolerance on the unit norm of hidden vectors.
pub const UNIT_NORM_TOL: f64 = 1e-12;

/// `3/(4π)²`, the normalization of the hidden-variable density.
pub const DENSITY_PREFACTOR: f64 = 3.0 / (16.0 * PI * PI);

/// Reduces an angle to the canonical range `(-π, π]`.
pub fn canonical_angle(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// How a probability was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    MonteCarlo,
    Quadrature,
    ClosedForm,
    LeadingOrder,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::MonteCarlo => "monte-carlo",
            Method::Quadrature => "quadrature",
            Method::ClosedForm => "closed-form",
            Method::LeadingOrder => "leading-order",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbabilityEstimate {
    pub value: f64,
    /// Zero for deterministic methods.
    pub std_error: f64,
    pub method: Method,
}

impl ProbabilityEstimate {
    pub fn exact(value: f64, method: Method) -> Self {
        debug_assert!(value >= 0.0, "negative probability {value}");
        ProbabilityEstimate {
            value,
            std_error: 0.0,
            method,
        }
    }
}

/// A pair of polarizer angles.
///
/// `theta2` is the unbarred angle of arm 2; the polarizer in arm 2 is
/// physically set to `bar_theta2 = theta2 + π/2`. Angles are stored reduced
/// to `(-π, π]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Setting {
    theta1: f64,
    theta2: f64,
}

impl Setting {
    pub fn new(theta1: f64, theta2: f64) -> Self {
        Setting {
            theta1: canonical_angle(theta1),
            theta2: canonical_angle(theta2),
        }
    }

    /// The setting probed when polarizer 2 is physically at `chi2`.
    ///
    /// Polarizer 2 at physical angle `χ` responds around
    /// `analyzer_vector(χ - π/2)`; the barred setting is the special case
    /// `χ = θ2 + π/2`.
    pub fn with_physical_polarizer2(theta1: f64, chi2: f64) -> Self {
        Setting::new(theta1, chi2 - FRAC_PI_2)
    }

    pub fn theta1(&self) -> f64 {
        self.theta1
    }

    pub fn theta2(&self) -> f64 {
        self.theta2
    }

    pub fn bar_theta2(&self) -> f64 {
        self.theta2 + FRAC_PI_2
    }

    pub fn analyzers(&self) -> (Vec3, Vec3) {
        (analyzer_vector(self.theta1), analyzer_vector(self.theta2))
    }
}

/// Reflectivity and transmissivity of the beam splitter, as squared moduli.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BeamSplitter {
    pub r_sq: f64,
    pub t_sq: f64,
}

impl BeamSplitter {
    pub fn new(r_sq: f64, t_sq: f64) -> Result<Self> {
        let invalid = |reason| ModelError::InvalidBeamSplitter { r_sq, t_sq, reason };
        if !r_sq.is_finite() || !t_sq.is_finite() {
            return Err(invalid("coefficients must be finite"));
        }
        if r_sq < 0.0 || t_sq < 0.0 {
            return Err(invalid("coefficients must be non-negative"));
        }
        if r_sq == 0.0 && t_sq == 0.0 {
            return Err(invalid("both coefficients are zero"));
        }
        Ok(BeamSplitter { r_sq, t_sq })
    }
}

/// Beam-splitter ratio brought into `(0, 1]`, with the angle map that goes
/// with it.
#[derive(Debug, Clone, PartialEq)]
pub struct Normalization {
    pub gamma: f64,
    /// `true` when `|R| > |T|` and every angle was mapped `θ -> π/2 - θ`.
    pub swapped: bool,
    pub settings: Vec<Setting>,
}

impl Normalization {
    pub fn phi(&self) -> f64 {
        self.gamma.acos()
    }

    /// Applies the same angle map as was applied to `settings`.
    pub fn map_angle(&self, theta: f64) -> f64 {
        if self.swapped {
            canonical_angle(FRAC_PI_2 - theta)
        } else {
            canonical_angle(theta)
        }
    }
}

/// Derives `γ = |R|²/|T|²` (or its inverse with the angle swap when
/// `|R| > |T|`) and maps the settings accordingly.
pub fn normalize_params(bs: BeamSplitter, settings: &[Setting]) -> Result<Normalization> {
    let bs = BeamSplitter::new(bs.r_sq, bs.t_sq)?;
    let swapped = bs.r_sq > bs.t_sq;
    let gamma = if bs.r_sq == bs.t_sq {
        1.0
    } else if swapped {
        bs.t_sq / bs.r_sq
    } else {
        bs.r_sq / bs.t_sq
    };
    if gamma <= 0.0 {
        return Err(ModelError::InvalidBeamSplitter {
            r_sq: bs.r_sq,
            t_sq: bs.t_sq,
            reason: "one coefficient is zero, ratio |R|^2/|T|^2 degenerates",
        });
    }
    let settings = if swapped {
        settings
            .iter()
            .map(|s| Setting::new(FRAC_PI_2 - s.theta1, FRAC_PI_2 - s.theta2))
            .collect()
    } else {
        settings.to_vec()
    };
    Ok(Normalization {
        gamma,
        swapped,
        settings,
    })
}

/// Parameters of the model: splitter ratio `γ`, response amplitude `C` and
/// cap size `ε`.
///
/// `φ = arccos γ` is derived on demand and never stored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    gamma: f64,
    c: f64,
    epsilon: f64,
}

impl ModelParams {
    pub fn new(gamma: f64, c: f64, epsilon: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 0.0 && gamma <= 1.0) {
            return Err(ModelError::param("gamma", gamma, "must lie in (0, 1]"));
        }
        if !(c.is_finite() && c > 0.0 && c <= 1.0) {
            return Err(ModelError::param("C", c, "must lie in (0, 1]"));
        }
        if !(epsilon.is_finite() && epsilon > 0.0 && epsilon <= EPSILON_MAX) {
            return Err(ModelError::param(
                "epsilon",
                epsilon,
                "must lie in (0, 2] (a cap larger than a hemisphere is not allowed)",
            ));
        }
        if epsilon > EPSILON_SOFT_MAX {
            log::warn!(
                "epsilon = {epsilon} exceeds {EPSILON_SOFT_MAX}; leading-order agreement degrades"
            );
        }
        Ok(ModelParams { gamma, c, epsilon })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn phi(&self) -> f64 {
        self.gamma.acos()
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self> {
        ModelParams::new(self.gamma, self.c, epsilon)
    }

    /// `(3/16) C² ε²`, the natural scale of the coincidence probability.
    pub fn leading_scale(&self) -> f64 {
        3.0 / 16.0 * self.c * self.c * self.epsilon * self.epsilon
    }
}

/// The hidden variable: one unit vector per arm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HiddenPair {
    pub(crate) u1: Vec3,
    pub(crate) u2: Vec3,
}

impl HiddenPair {
    pub fn new(u1: Vec3, u2: Vec3) -> Result<Self> {
        for (name, u) in [("u1", u1), ("u2", u2)] {
            let n = u.norm();
            if (n - 1.0).abs() > UNIT_NORM_TOL || n.is_nan() {
                return Err(ModelError::param(
                    name,
                    n,
                    "hidden vector must have unit norm",
                ));
            }
        }
        Ok(HiddenPair { u1, u2 })
    }

    pub fn u1(&self) -> Vec3 {
        self.u1
    }

    pub fn u2(&self) -> Vec3 {
        self.u2
    }
}

/// The four polarizer angles of a Hardy-type test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HardySettings {
    pub theta1: f64,
    pub theta2: f64,
    pub theta10: f64,
    pub theta20: f64,
}

impl HardySettings {
    pub fn new(theta1: f64, theta2: f64, theta10: f64, theta20: f64) -> Self {
        HardySettings {
            theta1: canonical_angle(theta1),
            theta2: canonical_angle(theta2),
            theta10: canonical_angle(theta10),
            theta20: canonical_angle(theta20),
        }
    }

    /// Hardy angles built from the zeros of the quantum prediction, starting
    /// from `theta1`.
    ///
    /// The result satisfies `Q(θ1, θ2) = Q(θ1 + π/2, θ20) = Q(θ10, θ2 + π/2) = 0`
    /// where `Q` is [`quantum_prediction`]; see [`HardySettings::hardy_settings`].
    pub fn on_zero_manifold(theta1: f64, gamma: f64) -> Self {
        let theta2 = zero_condition_angle(theta1, gamma);
        let theta20 = zero_condition_angle(theta1 + FRAC_PI_2, gamma);
        let theta10 = zero_condition_angle(theta2 + FRAC_PI_2, gamma);
        HardySettings::new(theta1, theta2, theta10, theta20)
    }

    /// The four plain pairs `(θ1,θ2), (θ1,θ20), (θ10,θ2), (θ10,θ20)`.
    pub fn pairs(&self) -> [Setting; 4] {
        [
            Setting::new(self.theta1, self.theta2),
            Setting::new(self.theta1, self.theta20),
            Setting::new(self.theta10, self.theta2),
            Setting::new(self.theta10, self.theta20),
        ]
    }

    /// The four pairs with the outcome structure of Hardy's argument: the
    /// second and third probe the orthogonal outcome on one side.
    ///
    /// `(θ1,θ2)`, `(θ1+π/2, θ20)`, `(θ10, θ2+π/2)`, `(θ10,θ20)`.
    pub fn hardy_settings(&self) -> [Setting; 4] {
        [
            Setting::new(self.theta1, self.theta2),
            Setting::new(self.theta1 + FRAC_PI_2, self.theta20),
            Setting::new(self.theta10, self.theta2 + FRAC_PI_2),
            Setting::new(self.theta10, self.theta20),
        ]
    }
}

/// `(sin θ, 0, cos θ)`.
pub fn analyzer_vector(theta: f64) -> Vec3 {
    let (s, c) = theta.sin_cos();
    Vec3::new(s, 0.0, c)
}

/// Rotation by `phi` in the x-y plane.
pub fn rotate_phi(v: Vec3, phi: f64) -> Vec3 {
    let (s, c) = phi.sin_cos();
    Vec3::new(v.x * c - v.y * s, v.x * s + v.y * c, v.z)
}

/// Hidden-variable density per `d²u1 d²u2`: `3/(4π)² (u1 · R u2)²`.
pub fn density(pair: &HiddenPair, phi: f64) -> f64 {
    density_vectors(pair.u1, pair.u2, phi)
}

pub(crate) fn density_vectors(u1: Vec3, u2: Vec3, phi: f64) -> f64 {
    let d = u1.dot(rotate_phi(u2, phi));
    DENSITY_PREFACTOR * d * d
}

/// Detection probability of a photon with hidden vector `u` behind a
/// polarizer whose analyzer direction is `analyzer_vector(theta)`.
///
/// Returns `c` inside the closed cap `|u - r|² <= epsilon`, zero outside.
pub fn response(u: Vec3, theta: f64, c: f64, epsilon: f64) -> f64 {
    if (u - analyzer_vector(theta)).norm_sq() <= epsilon {
        c
    } else {
        0.0
    }
}

/// Quantum coincidence probability with polarizer 2 at the barred angle:
/// `N (cos θ1 cos θ2 + γ sin θ1 sin θ2)²`.
pub fn quantum_prediction(setting: Setting, gamma: f64, n: f64) -> f64 {
    let amp = setting.theta1.cos() * setting.theta2.cos()
        + gamma * setting.theta1.sin() * setting.theta2.sin();
    n * amp * amp
}

/// `(3/16) C² ε² (r1 · R r2)²`, the coincidence probability to leading
/// order in the cap size.
pub fn leading_order_p12(setting: Setting, params: &ModelParams) -> f64 {
    let (r1, r2) = setting.analyzers();
    let d = r1.dot(rotate_phi(r2, params.phi()));
    params.leading_scale() * d * d
}

/// The angle `θ2` at which the quantum prediction vanishes for the given
/// `θ1`, in `(-π/2, π/2]`.
pub fn zero_condition_angle(theta1: f64, gamma: f64) -> f64 {
    let (s, c) = theta1.sin_cos();
    // Snap the two axis-aligned branches so they come out exact.
    if s.abs() < 1e-15 {
        return FRAC_PI_2;
    }
    if c.abs() < 1e-15 {
        return 0.0;
    }
    let t = (-c / (gamma * s)).atan();
    if t <= -FRAC_PI_2 {
        t + PI
    } else {
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, FRAC_PI_6};

    fn params(gamma: f64, c: f64, eps: f64) -> ModelParams {
        ModelParams::new(gamma, c, eps).unwrap()
    }

    #[test]
    fn canonical_angle_range() {
        assert_eq!(canonical_angle(PI), PI);
        assert_abs_diff_eq!(canonical_angle(-PI), PI, epsilon = 1e-15);
        assert_abs_diff_eq!(canonical_angle(3.0 * PI / 2.0), -FRAC_PI_2, epsilon = 1e-15);
        assert_abs_diff_eq!(canonical_angle(0.3 + 4.0 * TAU), 0.3, epsilon = 1e-13);
        assert_eq!(Setting::new(-PI, 0.0).theta1(), PI);
    }

    #[test]
    fn normalize_params_examples() {
        let n = normalize_params(BeamSplitter::new(0.2, 0.8).unwrap(), &[]).unwrap();
        assert_abs_diff_eq!(n.gamma, 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(n.phi(), 1.318_116_071_652_818, epsilon = 1e-8);
        assert!(!n.swapped);

        let n = normalize_params(BeamSplitter::new(0.5, 0.5).unwrap(), &[]).unwrap();
        assert_eq!(n.gamma, 1.0);
        assert_eq!(n.phi(), 0.0);

        let n = normalize_params(
            BeamSplitter::new(0.8, 0.2).unwrap(),
            &[Setting::new(FRAC_PI_6, 0.0)],
        )
        .unwrap();
        assert_abs_diff_eq!(n.gamma, 0.25, epsilon = 1e-15);
        assert!(n.swapped);
        assert_abs_diff_eq!(n.settings[0].theta1(), FRAC_PI_3, epsilon = 1e-15);
        assert_abs_diff_eq!(n.settings[0].theta2(), FRAC_PI_2, epsilon = 1e-15);
    }

    #[test]
    fn beam_splitter_errors() {
        assert!(matches!(
            BeamSplitter::new(0.0, 0.0),
            Err(ModelError::InvalidBeamSplitter { .. })
        ));
        assert!(BeamSplitter::new(-0.1, 0.5).is_err());
        assert!(BeamSplitter::new(f64::NAN, 0.5).is_err());
        // |R| = 0 gives gamma = 0, outside (0, 1]
        assert!(normalize_params(BeamSplitter::new(0.0, 1.0).unwrap(), &[]).is_err());
    }

    #[test]
    fn params_validation() {
        assert!(ModelParams::new(0.0, 1.0, 0.1).is_err());
        assert!(ModelParams::new(1.1, 1.0, 0.1).is_err());
        assert!(ModelParams::new(0.5, 0.0, 0.1).is_err());
        assert!(ModelParams::new(0.5, 1.0, 0.0).is_err());
        assert!(ModelParams::new(0.5, 1.0, 2.0001).is_err());
        assert!(ModelParams::new(0.5, 1.0, 2.0).is_ok());
        assert!(ModelParams::new(1.0, 1.0, 0.01).is_ok());
        let p = params(0.25, 1.0, 0.1);
        assert_eq!(p.phi(), 0.25_f64.acos());
    }

    #[test]
    fn analyzer_vector_examples() {
        assert_abs_diff_eq!(
            (analyzer_vector(0.0) - Vec3::Z).norm(),
            0.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            (analyzer_vector(FRAC_PI_2) - Vec3::X).norm(),
            0.0,
            epsilon = 1e-15
        );
        let h = 2f64.sqrt() / 2.0;
        assert_abs_diff_eq!(
            (analyzer_vector(FRAC_PI_4) - Vec3::new(h, 0.0, h)).norm(),
            0.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn rotate_phi_examples() {
        let v = rotate_phi(Vec3::X, FRAC_PI_3);
        assert_abs_diff_eq!(
            (v - Vec3::new(0.5, 3f64.sqrt() / 2.0, 0.0)).norm(),
            0.0,
            epsilon = 1e-15
        );
        assert_eq!(rotate_phi(Vec3::Z, 1.234), Vec3::Z);
        assert_eq!(rotate_phi(Vec3::X, 0.0), Vec3::X);
    }

    #[test]
    fn density_examples() {
        let pre = 3.0 / (4.0 * PI).powi(2);
        assert_abs_diff_eq!(pre, 0.018_997_721_932_938_33, epsilon = 1e-15);
        let zz = HiddenPair::new(Vec3::Z, Vec3::Z).unwrap();
        assert_abs_diff_eq!(density(&zz, FRAC_PI_3), pre, epsilon = 1e-15);
        let xx = HiddenPair::new(Vec3::X, Vec3::X).unwrap();
        assert_abs_diff_eq!(density(&xx, FRAC_PI_3), pre * 0.25, epsilon = 1e-15);
        let yz = HiddenPair::new(Vec3::Y, Vec3::Z).unwrap();
        assert_eq!(density(&yz, 0.7), 0.0);
    }

    #[test]
    fn hidden_pair_rejects_non_unit() {
        assert!(HiddenPair::new(Vec3::new(1.0, 1.0, 0.0), Vec3::Z).is_err());
        assert!(HiddenPair::new(Vec3::Z, Vec3::new(0.0, 0.0, 1.0 + 1e-9)).is_err());
    }

    #[test]
    fn response_examples() {
        let theta = 0.4;
        let r = analyzer_vector(theta);
        assert_eq!(response(r, theta, 0.7, 0.01), 0.7);
        assert_eq!(response(-r, theta, 0.7, 0.01), 0.0);

        // A vector at chord-squared exactly eps from r: |u - r|^2 = 2 - 2 cos a.
        // Pick eps from the realised distance so the boundary is hit exactly.
        let u = analyzer_vector(theta + 0.05);
        let eps = (u - r).norm_sq();
        assert_eq!(response(u, theta, 0.7, eps), 0.7);
        assert_eq!(response(u, theta, 0.7, eps * (1.0 - 1e-12)), 0.0);
    }

    #[test]
    fn quantum_prediction_examples() {
        assert_abs_diff_eq!(quantum_prediction(Setting::new(0.0, 0.0), 0.5, 1.0), 1.0);
        assert_abs_diff_eq!(
            quantum_prediction(Setting::new(FRAC_PI_2, FRAC_PI_2), 0.5, 1.0),
            0.25,
            epsilon = 1e-15
        );
        let q = quantum_prediction(Setting::new(FRAC_PI_4, (-2f64).atan()), 0.5, 1.0);
        assert!(q < 1e-30, "{q}");
    }

    #[test]
    fn leading_order_examples() {
        let p = params(0.5, 1.0, 0.01);
        assert_abs_diff_eq!(
            leading_order_p12(Setting::new(0.0, 0.0), &p),
            1.875e-5,
            epsilon = 1e-18
        );
        assert_abs_diff_eq!(
            leading_order_p12(Setting::new(FRAC_PI_2, FRAC_PI_2), &p),
            4.6875e-6,
            epsilon = 1e-18
        );
        assert!(leading_order_p12(Setting::new(FRAC_PI_4, (-2f64).atan()), &p) < 1e-30);
    }

    #[test]
    fn zero_condition_examples() {
        assert_abs_diff_eq!(
            zero_condition_angle(FRAC_PI_4, 1.0),
            -FRAC_PI_4,
            epsilon = 1e-15
        );
        // atan(-2), independently evaluated
        let t = zero_condition_angle(FRAC_PI_4, 0.5);
        assert_abs_diff_eq!(t, -1.107_148_717_794_090_4, epsilon = 1e-15);
        assert!(quantum_prediction(Setting::new(FRAC_PI_4, t), 0.5, 1.0) < 1e-12);
        assert_eq!(zero_condition_angle(0.0, 0.5), FRAC_PI_2);
        assert_eq!(zero_condition_angle(PI, 0.5), FRAC_PI_2);
        assert_eq!(zero_condition_angle(FRAC_PI_2, 0.5), 0.0);
        assert_eq!(zero_condition_angle(-FRAC_PI_2, 0.3), 0.0);
    }

    #[test]
    fn zero_manifold_hardy_settings_vanish() {
        for theta1 in [0.2, FRAC_PI_6, FRAC_PI_4, 1.1] {
            let hs = HardySettings::on_zero_manifold(theta1, 0.5);
            let q = hs.hardy_settings().map(|s| quantum_prediction(s, 0.5, 1.0));
            assert!(q[0] < 1e-12 && q[1] < 1e-12 && q[2] < 1e-12, "{q:?}");
        }
    }
}
