//! Closed-form wavefunctions with exact values and analytic gradients.
//!
//! Values are returned honestly even when they are vanishingly small; node
//! protection is handled by the guidance layer in [`crate::dynamics`].

mod double_slit;
mod gaussian;
mod stern_gerlach;

pub use double_slit::{double_slit_gradient, double_slit_value, DoubleSlitModel};
pub use gaussian::{complex_width, ComplexWidth, FreePacketModel, GaussianPacketModel};
pub use stern_gerlach::{sg_derived_params, sg_spinor_value, SgDerived, SternGerlachModel};

use num_complex::Complex64;
use thiserror::Error;

use crate::constants::{ConstantsError, PhysicalConstants};
use crate::geometry::Vec2;

/// A complex wavefunction value, in units of (probability density)^(1/2).
pub type ComplexAmplitude = Complex64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error(transparent)]
    Constants(#[from] ConstantsError),
    #[error("{name} must be finite, got {value}")]
    NonFinite { name: &'static str, value: f64 },
    #[error("theta0 must lie in [0, pi], got {0}")]
    PolarAngle(f64),
}

pub(crate) fn check_finite(name: &'static str, value: f64) -> Result<(), ModelError> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(ModelError::NonFinite { name, value })
    }
}

/// Two-component Pauli spinor value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinorAmplitude {
    pub up: ComplexAmplitude,
    pub down: ComplexAmplitude,
}

impl SpinorAmplitude {
    pub fn new(up: ComplexAmplitude, down: ComplexAmplitude) -> Self {
        Self { up, down }
    }

    /// ρ = |up|² + |down|².
    pub fn density(&self) -> f64 {
        self.up.norm_sqr() + self.down.norm_sqr()
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            up: self.up * factor,
            down: self.down * factor,
        }
    }
}

/// Spatial gradient of a scalar amplitude: (∂ψ/∂x, ∂ψ/∂transverse).
pub type ComplexGradient = [Complex64; 2];

/// A scalar wavefunction on the simulation plane.
pub trait ScalarWavefunction {
    fn constants(&self) -> &PhysicalConstants;

    fn value(&self, position: Vec2, t: f64) -> ComplexAmplitude;

    fn value_and_gradient(&self, position: Vec2, t: f64) -> (ComplexAmplitude, ComplexGradient);

    /// Modulus of a single unnormalised packet peak at time `t`; used as the
    /// reference for node detection.
    fn amplitude_scale(&self, t: f64) -> f64;
}

/// A two-component wavefunction on the simulation plane.
pub trait SpinorWavefunction {
    fn constants(&self) -> &PhysicalConstants;

    fn spinor(&self, position: Vec2, t: f64) -> SpinorAmplitude;

    /// Returns the value and the gradients of the up and down components.
    fn spinor_and_gradient(
        &self,
        position: Vec2,
        t: f64,
    ) -> (SpinorAmplitude, [ComplexGradient; 2]);

    fn amplitude_scale(&self, t: f64) -> f64;
}

/// Transverse probability density at a fixed longitudinal plane, used for the
/// theoretical screen distribution.
pub trait TransverseDensity {
    /// Time at which the ensemble reaches the plane `x`.
    fn arrival_time(&self, x: f64) -> f64;

    /// Unnormalised |ψ|² at transverse coordinate `s` and time `t`.
    fn transverse_density(&self, s: f64, t: f64) -> f64;

    /// Interval `[lo, hi]` covering the packet offsets plus `widths` times the
    /// packet spread at time `t`.
    fn spread_window(&self, t: f64, widths: f64) -> (f64, f64);
}
