use std::f64::consts::TAU;

use rand::Rng;

use crate::model::{rotate_phi, HiddenPair};
use crate::vector::Vec3;

/// Draws `(u1, u2)` exactly from the hidden-variable density.
///
/// `u2` is uniform on the sphere. Given `v = R u2`, the polar cosine
/// `c = u1·v` has density `(3/2) c²` on `[-1, 1]`, whose inverse CDF is the
/// signed cube root of `2U - 1`; the azimuth about `v` is uniform.
pub fn sample_hidden_pair<R: Rng + ?Sized>(rng: &mut R, phi: f64) -> HiddenPair {
    let u2 = uniform_on_sphere(rng);
    let v = rotate_phi(u2, phi);
    let c = (2.0 * rng.random::<f64>() - 1.0).cbrt();
    let s = (1.0 - c * c).max(0.0).sqrt();
    let (sp, cp) = (TAU * rng.random::<f64>()).sin_cos();
    let (e1, e2) = v.orthonormal_basis();
    let u1 = v * c + (e1 * cp + e2 * sp) * s;
    debug_assert!((u1.norm() - 1.0).abs() < 1e-12);
    HiddenPair { u1, u2 }
}

pub(crate) fn uniform_on_sphere<R: Rng + ?Sized>(rng: &mut R) -> Vec3 {
    let z = 2.0 * rng.random::<f64>() - 1.0;
    let s = (1.0 - z * z).max(0.0).sqrt();
    let (sp, cp) = (TAU * rng.random::<f64>()).sin_cos();
    Vec3::new(s * cp, s * sp, z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn deterministic_for_fixed_seed() {
        let a = sample_hidden_pair(&mut ChaCha8Rng::seed_from_u64(42), 0.7);
        let b = sample_hidden_pair(&mut ChaCha8Rng::seed_from_u64(42), 0.7);
        assert_eq!(a, b);
    }

    #[test]
    fn draws_are_unit_vectors() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10_000 {
            let p = sample_hidden_pair(&mut rng, 1.2);
            assert!((p.u1().norm() - 1.0).abs() < 1e-12);
            assert!((p.u2().norm() - 1.0).abs() < 1e-12);
        }
    }
}
