//! Engineered guidance fields for calibrating the integrator and the noise.

use num_complex::Complex64;

use super::field::scalar_flow;
use super::{DynamicsError, GuidanceField, LocalFlow};
use crate::constants::PhysicalConstants;
use crate::geometry::Vec2;
use crate::models::{ComplexAmplitude, ComplexGradient, ScalarWavefunction};

/// e^{i k·x}: uniform density, drift ħk/m everywhere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneWave {
    pub k: Vec2,
    pub constants: PhysicalConstants,
}

impl PlaneWave {
    pub fn new(k: Vec2, constants: PhysicalConstants) -> Self {
        Self { k, constants }
    }
}

impl ScalarWavefunction for PlaneWave {
    fn constants(&self) -> &PhysicalConstants {
        &self.constants
    }

    fn value(&self, p: Vec2, _t: f64) -> ComplexAmplitude {
        Complex64::from_polar(1.0, self.k.x * p.x + self.k.y * p.y)
    }

    fn value_and_gradient(&self, p: Vec2, t: f64) -> (ComplexAmplitude, ComplexGradient) {
        let v = self.value(p, t);
        (
            v,
            [
                v * Complex64::new(0.0, self.k.x),
                v * Complex64::new(0.0, self.k.y),
            ],
        )
    }

    fn amplitude_scale(&self, _t: f64) -> f64 {
        1.0
    }
}

impl GuidanceField for PlaneWave {
    fn local_flow(
        &self,
        position: Vec2,
        t: f64,
        node_floor: f64,
    ) -> Result<LocalFlow, DynamicsError> {
        let (psi, grad) = self.value_and_gradient(position, t);
        scalar_flow(
            psi,
            grad,
            1.0,
            node_floor,
            self.constants.hbar_over_mass(),
            position,
            t,
        )
    }

    fn hbar_over_mass(&self) -> f64 {
        self.constants.hbar_over_mass()
    }

    fn velocity_scale(&self) -> f64 {
        self.constants.hbar_over_mass() * self.k.norm().max(1.0)
    }
}

/// A field with b = 0 everywhere; only the fluctuations move the particle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroDrift {
    pub constants: PhysicalConstants,
}

impl GuidanceField for ZeroDrift {
    fn local_flow(&self, _: Vec2, _: f64, _: f64) -> Result<LocalFlow, DynamicsError> {
        Ok(LocalFlow {
            drift: Vec2::ZERO,
            osmotic: Vec2::ZERO,
        })
    }

    fn hbar_over_mass(&self) -> f64 {
        self.constants.hbar_over_mass()
    }

    fn velocity_scale(&self) -> f64 {
        1.0
    }
}

/// Constant drift `velocity` with the given ħ/m for the noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantDrift {
    pub velocity: Vec2,
    pub constants: PhysicalConstants,
}

impl GuidanceField for ConstantDrift {
    fn local_flow(&self, _: Vec2, _: f64, _: f64) -> Result<LocalFlow, DynamicsError> {
        Ok(LocalFlow {
            drift: self.velocity,
            osmotic: Vec2::ZERO,
        })
    }

    fn hbar_over_mass(&self) -> f64 {
        self.constants.hbar_over_mass()
    }

    fn velocity_scale(&self) -> f64 {
        self.velocity.norm().max(1.0)
    }
}

/// Linear drift b(x) = λ x, the classic RK4 order test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearDrift {
    pub rate: f64,
    pub constants: PhysicalConstants,
}

impl GuidanceField for LinearDrift {
    fn local_flow(&self, position: Vec2, _: f64, _: f64) -> Result<LocalFlow, DynamicsError> {
        Ok(LocalFlow {
            drift: position * self.rate,
            osmotic: Vec2::ZERO,
        })
    }

    fn hbar_over_mass(&self) -> f64 {
        self.constants.hbar_over_mass()
    }

    fn velocity_scale(&self) -> f64 {
        f64::MAX
    }
}
