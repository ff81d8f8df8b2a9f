use std::f64::consts::{FRAC_PI_2, PI};

use lhv_core::analysis::fair_sampling_residual;
use lhv_core::integration::gauss_legendre;
use lhv_core::{
    analyzer_vector, compute_p12_closed_form, compute_p12_quadrature, density, leading_order_p12,
    normalize_params, quantum_prediction, response, rotate_phi, BeamSplitter, HiddenPair,
    ModelParams, QuadratureSpec, Setting, Vec3,
};
use proptest::prelude::*;

fn angle() -> impl Strategy<Value = f64> {
    -PI..PI
}

fn unit_vector() -> impl Strategy<Value = Vec3> {
    (-1.0f64..1.0, 0.0..std::f64::consts::TAU).prop_map(|(z, psi)| {
        let s = (1.0 - z * z).sqrt();
        Vec3::new(s * psi.cos(), s * psi.sin(), z)
    })
}

fn params() -> impl Strategy<Value = ModelParams> {
    (0.01f64..=1.0, 0.05f64..=1.0, 0.001f64..=0.2)
        .prop_map(|(g, c, e)| ModelParams::new(g, c, e).unwrap())
}

proptest! {
    #[test]
    fn rotation_preserves_norm(x in -5.0f64..5.0, y in -5.0f64..5.0, z in -5.0f64..5.0, phi in angle()) {
        let v = Vec3::new(x, y, z);
        prop_assert!((rotate_phi(v, phi).norm() - v.norm()).abs() < 1e-12);
    }

    #[test]
    fn leading_order_is_proportional_to_quantum(t1 in angle(), t2 in angle(), p in params()) {
        let s = Setting::new(t1, t2);
        let lo = leading_order_p12(s, &p);
        let q = p.leading_scale() * quantum_prediction(s, p.gamma(), 1.0);
        prop_assert!((lo - q).abs() <= 1e-14 * p.leading_scale());
    }

    #[test]
    fn density_is_non_negative(u1 in unit_vector(), u2 in unit_vector(), phi in angle()) {
        let pair = HiddenPair::new(u1, u2).unwrap();
        prop_assert!(density(&pair, phi) >= 0.0);
    }

    #[test]
    fn response_takes_two_values(u in unit_vector(), theta in angle(), p in params()) {
        let r = response(u, theta, p.c(), p.epsilon());
        prop_assert!(r == 0.0 || r == p.c());
    }

    #[test]
    fn swap_rule_reproduces_unswapped_prediction(
        t1 in angle(), t2 in angle(), r_sq in 0.51f64..0.99,
    ) {
        // |R| > |T|: the raw formula uses the ratio big = |R|²/|T|² > 1.
        let t_sq = 1.0 - r_sq;
        let big = r_sq / t_sq;
        let raw = (t1.cos() * t2.cos() + big * t1.sin() * t2.sin()).powi(2);
        let n = normalize_params(BeamSplitter::new(r_sq, t_sq).unwrap(), &[Setting::new(t1, t2)]).unwrap();
        prop_assert!(n.swapped);
        let mapped = quantum_prediction(n.settings[0], n.gamma, 1.0);
        // the swap rescales the prediction by a setting-independent factor
        prop_assert!((big * big * mapped - raw).abs() < 1e-10 * (1.0 + raw));
    }

    #[test]
    fn three_evaluators_bounded_and_consistent(t1 in angle(), t2 in angle(), p in params()) {
        let s = Setting::new(t1, t2);
        let cf = compute_p12_closed_form(s, &p).value;
        let qd = compute_p12_quadrature(s, &p, &QuadratureSpec::default()).value;
        prop_assert!((cf - qd).abs() < 1e-12);
        prop_assert!(cf >= 0.0 && cf <= p.c() * p.c());
    }

    #[test]
    fn sum_rule_leading_order_identity(t1 in angle(), t2 in angle(), t20 in angle(), p in params()) {
        let r = fair_sampling_residual(t1, t2, t20, &p, &QuadratureSpec::new(2, 5).unwrap());
        let both = p.leading_scale() * (t1.cos().powi(2) + p.gamma().powi(2) * t1.sin().powi(2));
        prop_assert!((r.leading_order.lhs() - both).abs() < 1e-14);
        prop_assert!((r.leading_order.rhs() - both).abs() < 1e-14);
        prop_assert!((r.residual() - r.quadrature_residual()).abs() < 1e-12);
    }
}

/// Cap area by integrating the response indicator over the sphere in
/// coordinates about the analyzer axis, with the polar range split at the
/// cap edge so each piece is smooth.
#[test]
fn cap_area_is_pi_epsilon() {
    let (x, w) = gauss_legendre(20);
    let n_az = 64;
    for &eps in &[1e-3, 0.01, 0.1, 0.2, 1.0, 2.0] {
        for &theta in &[0.0, 0.7, FRAC_PI_2, -2.4] {
            let axis = analyzer_vector(theta);
            let (e1, e2) = axis.orthonormal_basis();
            let edge = 1.0 - eps / 2.0;
            let mut area = 0.0;
            for (lo, hi) in [(-1.0, edge), (edge, 1.0)] {
                let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
                for (xi, wi) in x.iter().zip(&w) {
                    let c: f64 = mid + half * xi;
                    let s = (1.0 - c * c).sqrt();
                    for k in 0..n_az {
                        let psi = std::f64::consts::TAU * (k as f64 + 0.5) / n_az as f64;
                        let u = axis * c + (e1 * psi.cos() + e2 * psi.sin()) * s;
                        area += wi
                            * half
                            * (std::f64::consts::TAU / n_az as f64)
                            * response(u, theta, 1.0, eps);
                    }
                }
            }
            assert!(
                (area - PI * eps).abs() < 1e-8,
                "eps={eps} theta={theta}: {area}"
            );
        }
    }
}

#[test]
fn proportionality_on_dense_grid() {
    for &gamma in &[0.1, 0.25, 0.5, 0.8, 1.0] {
        let p = ModelParams::new(gamma, 0.9, 0.05).unwrap();
        for i in 0..=60 {
            for j in 0..=60 {
                let s = Setting::new(-PI + i as f64 * PI / 30.0, -PI + j as f64 * PI / 30.0);
                let lo = leading_order_p12(s, &p);
                let q = p.leading_scale() * quantum_prediction(s, gamma, 1.0);
                assert!((lo - q).abs() <= 1e-14 * p.leading_scale());
            }
        }
    }
}
