//! Particle trajectories under the entropic-dynamics displacement law.
//!
//! The displacement of a particle over a short step is split into a drift,
//! fixed by the probability current of a closed-form wavefunction, and a
//! fluctuation whose strength is set by a [`MotionClass`]. With `eta = 0`
//! the trajectories are the smooth Bohmian ones; with `n = 0, eta > 0` they
//! become Brownian.
//!
//! The crate is organised bottom-up:
//!
//! * [`models`]: free Gaussian packet, double slit, Stern-Gerlach spinor.
//! * [`dynamics`]: drift and osmotic velocities, fluctuations, RK4 stepping.
//! * [`ensemble`]: initial-condition sampling, reproducible parallel runs,
//!   screen statistics (KS, L1, histogram, polynomial fit).
//! * [`spin`]: spin-frame angles extracted from the spinor.

// `!(a > b)` guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constants;
pub mod dynamics;
pub mod ensemble;
pub mod geometry;
pub mod models;
pub mod spin;

pub use constants::PhysicalConstants;
pub use dynamics::{
    MotionClass, NoiseMode, StepperConfig, StopCondition, Trajectory, TrajectoryState,
};
pub use ensemble::{
    run_ensemble, DetectorRecord, EnsembleConfig, EnsembleOutput, EnsembleStats, Experiment,
};
pub use geometry::Vec2;
pub use models::{
    ComplexAmplitude, DoubleSlitModel, FreePacketModel, GaussianPacketModel, SpinorAmplitude,
    SternGerlachModel,
};
