//! Product rules on spherical caps.

use std::f64::consts::TAU;

use super::gauss::gauss_legendre;
use crate::vector::Vec3;

/// Weighted nodes covering the cap `{u : u·axis >= cos_min}` of the unit
/// sphere: Gauss-Legendre in the polar cosine, uniform in azimuth.
///
/// Polynomials of degree `<= 2 n_radial - 1` in the polar cosine and trig
/// polynomials of degree `< n_azimuthal` in azimuth are integrated exactly.
#[derive(Debug, Clone)]
pub(crate) struct CapRule {
    pub(crate) nodes: Vec<(Vec3, f64)>,
}

impl CapRule {
    pub(crate) fn new(axis: Vec3, cos_min: f64, n_radial: usize, n_azimuthal: usize) -> Self {
        let (e1, e2) = axis.orthonormal_basis();
        let (x, w) = gauss_legendre(n_radial);
        let half = 0.5 * (1.0 - cos_min);
        let mid = 0.5 * (1.0 + cos_min);
        let dpsi = TAU / n_azimuthal as f64;
        let mut nodes = Vec::with_capacity(n_radial * n_azimuthal);
        for (xi, wi) in x.iter().zip(&w) {
            let c = mid + half * xi;
            let s = (1.0 - c * c).max(0.0).sqrt();
            for k in 0..n_azimuthal {
                let (sp, cp) = ((k as f64 + 0.5) * dpsi).sin_cos();
                let u = axis * c + (e1 * cp + e2 * sp) * s;
                nodes.push((u, wi * half * dpsi));
            }
        }
        CapRule { nodes }
    }

    pub(crate) fn sphere(n_radial: usize, n_azimuthal: usize) -> Self {
        CapRule::new(Vec3::Z, -1.0, n_radial, n_azimuthal)
    }

    pub(crate) fn integrate(&self, f: impl Fn(Vec3) -> f64) -> f64 {
        self.nodes.iter().map(|&(u, w)| w * f(u)).sum()
    }
}

/// `∫∫ f(u1, u2) du1 du2` over the product of two rules.
pub(crate) fn integrate_product(a: &CapRule, b: &CapRule, f: impl Fn(Vec3, Vec3) -> f64) -> f64 {
    a.nodes
        .iter()
        .map(|&(u1, w1)| w1 * b.integrate(|u2| f(u1, u2)))
        .sum()
}
