//! Spin-frame direction extracted from the Pauli spinor.
//!
//! With ρ± = |ψ±|², the polar angle of the frame obeys
//! cos θ = (ρ₊ − ρ₋)/ρ, and the azimuth is the relative phase of the two
//! components. The frame is a property of the spinor field at a point, not
//! of the particle.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ensemble::DetectorRecord;
use crate::models::{sg_spinor_value, SpinorAmplitude, SternGerlachModel};

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum SpinError {
    #[error("spinor density {0} is below the floor")]
    ZeroDensity(f64),
}

/// Absolute density below which the frame is undefined.
pub const DENSITY_FLOOR: f64 = 1e-300;

/// Polar angle, azimuth and the tilt of the frame projected on the xz-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinAngles {
    /// θ ∈ [0, π].
    pub theta: f64,
    /// φ ∈ (−π, π]; 0 at the poles.
    pub phi: f64,
    /// atan2(sin θ cos φ, cos θ).
    pub tilt: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinFrameSample {
    pub z: f64,
    pub t: f64,
    /// Longitudinal position x = vx·t.
    pub x: f64,
    pub angles: SpinAngles,
}

fn wrap_angle(a: f64) -> f64 {
    let w = a.rem_euclid(2.0 * PI);
    if w > PI {
        w - 2.0 * PI
    } else {
        w
    }
}

pub fn spin_frame_from_spinor(s: &SpinorAmplitude) -> Result<SpinAngles, SpinError> {
    let rho = s.density();
    if !(rho > DENSITY_FLOOR) {
        return Err(SpinError::ZeroDensity(rho));
    }
    let (a_up, a_down) = (s.up.norm(), s.down.norm());
    let theta = 2.0 * a_down.atan2(a_up);
    let phi = if a_up == 0.0 || a_down == 0.0 {
        0.0
    } else {
        wrap_angle(s.up.arg() - s.down.arg())
    };
    let tilt = (theta.sin() * phi.cos()).atan2(theta.cos());
    Ok(SpinAngles { theta, phi, tilt })
}

/// One cell of a spin-field map; `frame` is `None` where the density vanishes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinFieldEntry {
    pub z: f64,
    pub t: f64,
    pub x: f64,
    pub frame: Option<SpinAngles>,
}

/// Spin frame on the product grid, `t` outer and `z` inner.
pub fn spin_field_map(
    model: &SternGerlachModel,
    z_grid: &[f64],
    t_grid: &[f64],
) -> Vec<SpinFieldEntry> {
    let mut out = Vec::with_capacity(z_grid.len() * t_grid.len());
    for &t in t_grid {
        for &z in z_grid {
            let frame = spin_frame_from_spinor(&sg_spinor_value(model, z, t)).ok();
            out.push(SpinFieldEntry {
                z,
                t,
                x: model.vx * t,
                frame,
            });
        }
    }
    out
}

/// Frame at a single point, with its longitudinal coordinate.
pub fn spin_frame_at(
    model: &SternGerlachModel,
    z: f64,
    t: f64,
) -> Result<SpinFrameSample, SpinError> {
    let angles = spin_frame_from_spinor(&sg_spinor_value(model, z, t))?;
    Ok(SpinFrameSample {
        z,
        t,
        x: model.vx * t,
        angles,
    })
}

/// Fraction of hits with positive transverse coordinate.
pub fn up_fraction(records: &[DetectorRecord]) -> f64 {
    assert!(!records.is_empty(), "up_fraction needs at least one record");
    records.iter().filter(|r| r.transverse_hit > 0.0).count() as f64 / records.len() as f64
}
