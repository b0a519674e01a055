use std::f64::consts::TAU;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::MotionClass;
use crate::geometry::Vec2;

/// One fluctuation kick: a unit direction and its length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluctuationSample {
    pub direction: Vec2,
    pub magnitude: f64,
}

impl FluctuationSample {
    pub fn displacement(&self) -> Vec2 {
        self.direction * self.magnitude
    }
}

/// Uniform direction on the unit circle.
pub fn unit_fluctuation<R: Rng + ?Sized>(rng: &mut R) -> Vec2 {
    let angle = TAU * rng.random::<f64>();
    let (s, c) = angle.sin_cos();
    Vec2::new(c, s)
}

/// Isotropic Gaussian increment whose mean-square length is `magnitude²`.
pub fn gaussian_fluctuation<R: Rng + ?Sized>(rng: &mut R, magnitude: f64) -> Vec2 {
    let sd = magnitude * std::f64::consts::FRAC_1_SQRT_2;
    let gx: f64 = StandardNormal.sample(rng);
    let gy: f64 = StandardNormal.sample(rng);
    Vec2::new(gx * sd, gy * sd)
}

/// √(ħη/m) Δt^((n+1)/2).
pub fn fluctuation_magnitude(class: &MotionClass, hbar_over_mass: f64, dt: f64) -> f64 {
    if class.eta == 0.0 {
        return 0.0;
    }
    (hbar_over_mass * class.eta).sqrt() * dt.powf(0.5 * (class.n as f64 + 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::PhysicalConstants;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unit_directions_have_unit_length() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10_000 {
            let d = unit_fluctuation(&mut rng);
            assert!((d.norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn unit_directions_are_isotropic() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 1_000_000;
        let (mut sx, mut sy, mut sxx, mut syy) = (0.0, 0.0, 0.0, 0.0);
        for _ in 0..n {
            let d = unit_fluctuation(&mut rng);
            sx += d.x;
            sy += d.y;
            sxx += d.x * d.x;
            syy += d.y * d.y;
        }
        let nf = n as f64;
        let bound = 4.0 / nf.sqrt();
        assert!((sx / nf).abs() < bound && (sy / nf).abs() < bound);
        assert!((sxx / nf - 0.5).abs() < 0.01);
        assert!((syy / nf - 0.5).abs() < 0.01);
    }

    #[test]
    fn magnitude_examples() {
        let hm = PhysicalConstants::electron().hbar_over_mass();
        assert_eq!(
            fluctuation_magnitude(&MotionClass::new(0, 0.0).unwrap(), hm, 1e-9),
            0.0
        );
        // √(1.054571817e-34 / 9.1093837015e-31 · 1e-9) = √(1.15767636e-13) = 3.40246e-7
        let m = fluctuation_magnitude(&MotionClass::new(0, 1.0).unwrap(), hm, 1e-9);
        assert!((m / 3.402_46e-7 - 1.0).abs() < 1e-5, "{m}");
    }

    #[test]
    fn magnitude_exponent_law() {
        let hm = 1.3e-4;
        let c0 = MotionClass::new(0, 2.0).unwrap();
        let c1 = MotionClass::new(1, 2.0).unwrap();
        let r0 = fluctuation_magnitude(&c0, hm, 2e-9) / fluctuation_magnitude(&c0, hm, 1e-9);
        let r1 = fluctuation_magnitude(&c1, hm, 2e-9) / fluctuation_magnitude(&c1, hm, 1e-9);
        assert!((r0 - 2f64.sqrt()).abs() < 1e-12);
        assert!((r1 - 2.0).abs() < 1e-12);
    }
}
