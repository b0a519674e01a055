//! CODATA 2018 values and the per-particle constants bundle.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Electron mass, kg.
pub const ELECTRON_MASS: f64 = 9.109_383_701_5e-31;
/// Bohr magneton, J/T.
pub const BOHR_MAGNETON: f64 = 9.274_010_078_3e-24;
/// Approximate silver-atom mass used for the Stern-Gerlach runs, kg.
pub const SILVER_MASS: f64 = 1.8e-25;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConstantsError {
    #[error("{name} must be finite and strictly positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
}

/// The units anchor shared by every model: ħ, the particle mass and μ_B.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub mass: f64,
    pub mu_bohr: f64,
}

impl PhysicalConstants {
    pub fn new(hbar: f64, mass: f64, mu_bohr: f64) -> Result<Self, ConstantsError> {
        check_positive("hbar", hbar)?;
        check_positive("mass", mass)?;
        check_positive("mu_bohr", mu_bohr)?;
        Ok(Self {
            hbar,
            mass,
            mu_bohr,
        })
    }

    pub fn electron() -> Self {
        Self {
            hbar: HBAR,
            mass: ELECTRON_MASS,
            mu_bohr: BOHR_MAGNETON,
        }
    }

    pub fn silver() -> Self {
        Self {
            hbar: HBAR,
            mass: SILVER_MASS,
            mu_bohr: BOHR_MAGNETON,
        }
    }

    /// Same ħ and μ_B with a different particle mass.
    pub fn with_mass(self, mass: f64) -> Result<Self, ConstantsError> {
        Self::new(self.hbar, mass, self.mu_bohr)
    }

    #[inline]
    pub fn hbar_over_mass(&self) -> f64 {
        self.hbar / self.mass
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::electron()
    }
}

pub(crate) fn check_positive(name: &'static str, value: f64) -> Result<(), ConstantsError> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(ConstantsError::NonPositive { name, value })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_positive_mass() {
        assert!(PhysicalConstants::new(HBAR, -1.0, BOHR_MAGNETON).is_err());
        assert!(PhysicalConstants::new(HBAR, 0.0, BOHR_MAGNETON).is_err());
        assert!(PhysicalConstants::new(f64::NAN, 1.0, BOHR_MAGNETON).is_err());
    }

    #[test]
    fn defaults_are_electron() {
        let c = PhysicalConstants::default();
        assert_eq!(c.mass, ELECTRON_MASS);
        assert!((c.hbar_over_mass() - 1.157_676e-4).abs() < 1e-9);
    }
}
