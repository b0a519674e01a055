//! Drift, fluctuations and RK4 integration of the displacement law
//!
//! Δx = b Δt + √(ħη/m) Δt^((n+1)/2) Δw̃
//!
//! where `b` is the probability-current velocity of the guiding wavefunction
//! and Δw̃ is a unit kick (or a Gaussian increment, for comparison).

mod field;
pub mod fields;
mod integrate;
mod noise;

pub use field::{
    drift_velocity_scalar, drift_velocity_spinor, osmotic_velocity, scalar_flow, scalar_local_flow,
    spinor_flow, ClampedVelocity, GuidanceField, LocalFlow,
};
pub use integrate::{
    integrate_trajectory, osmotic_weight, rk4_drift_step, step, ScreenHit, Stepper, StopCondition,
    Trajectory,
};
pub use noise::{fluctuation_magnitude, gaussian_fluctuation, unit_fluctuation, FluctuationSample};

use std::ops::AddAssign;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::Vec2;

/// Default node floor, relative to the model's peak amplitude.
pub const DEFAULT_NODE_FLOOR: f64 = 1e-12;
/// Default cap on integration steps per trajectory.
pub const DEFAULT_MAX_STEPS: u64 = 10_000_000;
/// Default velocity clamp, in units of the field's velocity scale.
pub const DEFAULT_VMAX_FACTOR: f64 = 100.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("wavefunction node at ({}, {}) t={t}", position.x, position.y)]
    NodeEncountered { position: Vec2, t: f64 },
    #[error("trajectory stalled after {steps} steps at t={}", last.t)]
    MaxStepsExceeded { steps: u64, last: TrajectoryState },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

/// Sub-quantum motion class: exponent `n` and fluctuation strength `eta`.
///
/// `eta = 0` is the deterministic Bohmian limit for every `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MotionClass {
    pub n: u32,
    pub eta: f64,
}

impl MotionClass {
    pub fn new(n: u32, eta: f64) -> Result<Self, DynamicsError> {
        if !(eta.is_finite() && eta >= 0.0) {
            return Err(DynamicsError::InvalidConfig(format!(
                "eta must be finite and >= 0, got {eta}"
            )));
        }
        Ok(Self { n, eta })
    }

    pub const fn bohmian() -> Self {
        Self { n: 0, eta: 0.0 }
    }

    pub fn is_deterministic(&self) -> bool {
        self.eta == 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseMode {
    /// Fixed-magnitude kick along a uniformly random direction.
    #[default]
    UnitSphere,
    /// Isotropic Gaussian increment with the same mean-square length.
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepperConfig {
    /// Integration step, s.
    pub dt: f64,
    /// Clamp on the transverse drift component, m/s. `None` uses
    /// `DEFAULT_VMAX_FACTOR` times the field's velocity scale.
    pub v_max: Option<f64>,
    pub noise_mode: NoiseMode,
    /// Add the balancing osmotic drift (see `osmotic_weight`).
    pub osmotic: bool,
    pub node_floor: f64,
    pub max_steps: u64,
    /// Keep every `store_stride`-th state; `None` keeps only the endpoints.
    pub store_stride: Option<usize>,
}

impl StepperConfig {
    pub fn new(dt: f64) -> Self {
        Self {
            dt,
            v_max: None,
            noise_mode: NoiseMode::UnitSphere,
            osmotic: false,
            node_floor: DEFAULT_NODE_FLOOR,
            max_steps: DEFAULT_MAX_STEPS,
            store_stride: None,
        }
    }

    pub fn validate(&self) -> Result<(), DynamicsError> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(DynamicsError::InvalidConfig(format!(
                "dt must be > 0, got {}",
                self.dt
            )));
        }
        if let Some(v) = self.v_max {
            if !(v > 0.0) {
                return Err(DynamicsError::InvalidConfig(format!(
                    "v_max must be > 0, got {v}"
                )));
            }
        }
        if !(self.node_floor.is_finite() && self.node_floor >= 0.0) {
            return Err(DynamicsError::InvalidConfig(
                "node_floor must be >= 0".into(),
            ));
        }
        if self.store_stride == Some(0) {
            return Err(DynamicsError::InvalidConfig(
                "store_stride must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryState {
    pub position: Vec2,
    pub t: f64,
}

impl TrajectoryState {
    pub fn new(position: Vec2, t: f64) -> Self {
        Self { position, t }
    }
}

/// Counters for clamp and node events along a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct EventCounts {
    pub clamps: u64,
    /// RK4 stages evaluated at a node and replaced by a fallback velocity.
    pub node_stages: u64,
    /// Steps in which every stage hit a node (fluctuation-only steps).
    pub node_steps: u64,
}

impl AddAssign for EventCounts {
    fn add_assign(&mut self, rhs: Self) {
        self.clamps += rhs.clamps;
        self.node_stages += rhs.node_stages;
        self.node_steps += rhs.node_steps;
    }
}
