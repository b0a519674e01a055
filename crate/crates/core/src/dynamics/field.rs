use num_complex::Complex64;

use super::DynamicsError;
use crate::geometry::Vec2;
use crate::models::{
    ComplexAmplitude, ComplexGradient, DoubleSlitModel, FreePacketModel, ScalarWavefunction,
    SpinorAmplitude, SpinorWavefunction, SternGerlachModel,
};

/// Local velocities of the guiding field at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalFlow {
    /// Current velocity (ħ/m) Im(∇ψ/ψ), m/s.
    pub drift: Vec2,
    /// (ħ/m) ∇ln ρ^(1/2), m/s; multiplied by η when the osmotic term is enabled.
    pub osmotic: Vec2,
}

/// Anything that can guide a trajectory.
pub trait GuidanceField: Sync {
    /// Drift and osmotic velocities, or `NodeEncountered` when the amplitude
    /// falls below `node_floor` times the model's peak scale.
    fn local_flow(
        &self,
        position: Vec2,
        t: f64,
        node_floor: f64,
    ) -> Result<LocalFlow, DynamicsError>;

    fn hbar_over_mass(&self) -> f64;

    /// Characteristic transverse velocity; the default clamp is a multiple of it.
    fn velocity_scale(&self) -> f64;
}

/// Flow of a scalar amplitude from its value and gradient.
pub fn scalar_flow(
    psi: ComplexAmplitude,
    grad: ComplexGradient,
    peak: f64,
    node_floor: f64,
    hbar_over_mass: f64,
    position: Vec2,
    t: f64,
) -> Result<LocalFlow, DynamicsError> {
    if !(psi.norm() > node_floor * peak) {
        return Err(DynamicsError::NodeEncountered { position, t });
    }
    let lx = grad[0] / psi;
    let ly = grad[1] / psi;
    Ok(LocalFlow {
        drift: Vec2::new(lx.im, ly.im) * hbar_over_mass,
        osmotic: Vec2::new(lx.re, ly.re) * hbar_over_mass,
    })
}

/// Flow of a spinor, (ħ/m) Im(Ψ†∇Ψ)/(Ψ†Ψ) and its real-part counterpart.
pub fn spinor_flow(
    s: SpinorAmplitude,
    grads: [ComplexGradient; 2],
    peak: f64,
    node_floor: f64,
    hbar_over_mass: f64,
    position: Vec2,
    t: f64,
) -> Result<LocalFlow, DynamicsError> {
    let rho = s.density();
    if !(rho.sqrt() > node_floor * peak) {
        return Err(DynamicsError::NodeEncountered { position, t });
    }
    let current = |axis: usize| -> Complex64 {
        s.up.conj() * grads[0][axis] + s.down.conj() * grads[1][axis]
    };
    let (jx, jz) = (current(0) / rho, current(1) / rho);
    Ok(LocalFlow {
        drift: Vec2::new(jx.im, jz.im) * hbar_over_mass,
        osmotic: Vec2::new(jx.re, jz.re) * hbar_over_mass,
    })
}

/// A velocity after the transverse clamp.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClampedVelocity {
    pub velocity: Vec2,
    pub clamped: bool,
}

impl ClampedVelocity {
    /// Clamp the transverse component to ±`v_max`. The longitudinal component
    /// carries the beam velocity and is left alone.
    pub fn clamp(velocity: Vec2, v_max: f64) -> Self {
        if velocity.y.abs() > v_max {
            Self {
                velocity: Vec2::new(velocity.x, v_max.copysign(velocity.y)),
                clamped: true,
            }
        } else {
            Self {
                velocity,
                clamped: false,
            }
        }
    }
}

/// Bohmian drift (ħ/m) Im(∇ψ/ψ) of a scalar wavefunction.
pub fn drift_velocity_scalar<W: ScalarWavefunction>(
    model: &W,
    position: Vec2,
    t: f64,
    v_max: f64,
    node_floor: f64,
) -> Result<ClampedVelocity, DynamicsError> {
    let (psi, grad) = model.value_and_gradient(position, t);
    let flow = scalar_flow(
        psi,
        grad,
        model.amplitude_scale(t),
        node_floor,
        model.constants().hbar_over_mass(),
        position,
        t,
    )?;
    Ok(ClampedVelocity::clamp(flow.drift, v_max))
}

/// Probability-current velocity of a spinor.
pub fn drift_velocity_spinor<W: SpinorWavefunction>(
    model: &W,
    position: Vec2,
    t: f64,
    v_max: f64,
    node_floor: f64,
) -> Result<ClampedVelocity, DynamicsError> {
    let (s, grads) = model.spinor_and_gradient(position, t);
    let flow = spinor_flow(
        s,
        grads,
        model.amplitude_scale(t),
        node_floor,
        model.constants().hbar_over_mass(),
        position,
        t,
    )?;
    Ok(ClampedVelocity::clamp(flow.drift, v_max))
}

/// Osmotic velocity (ħη/m) ∇ln ρ^(1/2).
pub fn osmotic_velocity<F: GuidanceField + ?Sized>(
    field: &F,
    position: Vec2,
    t: f64,
    eta: f64,
    node_floor: f64,
) -> Result<Vec2, DynamicsError> {
    Ok(field.local_flow(position, t, node_floor)?.osmotic * eta)
}

/// Reference flow computed from the full value and gradient.
pub fn scalar_local_flow<W: ScalarWavefunction>(
    model: &W,
    position: Vec2,
    t: f64,
    node_floor: f64,
) -> Result<LocalFlow, DynamicsError> {
    let (psi, grad) = model.value_and_gradient(position, t);
    scalar_flow(
        psi,
        grad,
        model.amplitude_scale(t),
        node_floor,
        model.constants().hbar_over_mass(),
        position,
        t,
    )
}

/// Flow of a scalar field of the form e^{i k_x x} f(transverse, t).
fn beam_flow(
    kx: f64,
    (dlog, relative): (Complex64, f64),
    node_floor: f64,
    hbar_over_mass: f64,
    position: Vec2,
    t: f64,
) -> Result<LocalFlow, DynamicsError> {
    if !(relative > node_floor) {
        return Err(DynamicsError::NodeEncountered { position, t });
    }
    Ok(LocalFlow {
        drift: Vec2::new(kx, dlog.im) * hbar_over_mass,
        osmotic: Vec2::new(0.0, dlog.re) * hbar_over_mass,
    })
}

impl GuidanceField for FreePacketModel {
    fn local_flow(
        &self,
        position: Vec2,
        t: f64,
        node_floor: f64,
    ) -> Result<LocalFlow, DynamicsError> {
        let hm = self.transverse.constants.hbar_over_mass();
        beam_flow(
            self.kx,
            self.transverse.log_flow(position.y, t),
            node_floor,
            hm,
            position,
            t,
        )
    }

    fn hbar_over_mass(&self) -> f64 {
        self.transverse.constants.hbar_over_mass()
    }

    fn velocity_scale(&self) -> f64 {
        self.hbar_over_mass() * (1.0 / self.transverse.sigma0 + self.transverse.k.abs())
    }
}

impl GuidanceField for DoubleSlitModel {
    fn local_flow(
        &self,
        position: Vec2,
        t: f64,
        node_floor: f64,
    ) -> Result<LocalFlow, DynamicsError> {
        let hm = self.constants.hbar_over_mass();
        beam_flow(
            self.kx,
            self.log_flow(position.y, t),
            node_floor,
            hm,
            position,
            t,
        )
    }

    fn hbar_over_mass(&self) -> f64 {
        self.constants.hbar_over_mass()
    }

    fn velocity_scale(&self) -> f64 {
        self.hbar_over_mass() * (1.0 / self.sigma0 + self.ky.abs())
    }
}

impl GuidanceField for SternGerlachModel {
    fn local_flow(
        &self,
        position: Vec2,
        t: f64,
        node_floor: f64,
    ) -> Result<LocalFlow, DynamicsError> {
        let (phase, amp, relative) = self.log_flow(position.y, t);
        if !(relative > node_floor) {
            return Err(DynamicsError::NodeEncountered { position, t });
        }
        let hm = self.constants.hbar_over_mass();
        Ok(LocalFlow {
            drift: Vec2::new(self.vx, phase * hm),
            osmotic: Vec2::new(0.0, amp * hm),
        })
    }

    fn hbar_over_mass(&self) -> f64 {
        self.constants.hbar_over_mass()
    }

    fn velocity_scale(&self) -> f64 {
        self.hbar_over_mass() / self.sigma0 + self.derived().u.abs()
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::constants::PhysicalConstants;
    use crate::dynamics::fields::PlaneWave;
    use crate::models::GaussianPacketModel;

    const FLOOR: f64 = 1e-12;

    #[test]
    fn plane_wave_drift_is_hbar_k_over_m() {
        let c = PhysicalConstants::electron();
        let k = Vec2::new(1.7e10, -2.0e5);
        let w = PlaneWave::new(k, c);
        let v =
            drift_velocity_scalar(&w, Vec2::new(0.3, -1e-6), 2e-9, f64::INFINITY, FLOOR).unwrap();
        let expected = k * c.hbar_over_mass();
        assert!((v.velocity.x - expected.x).abs() <= 1e-12 * expected.x.abs());
        assert!((v.velocity.y - expected.y).abs() <= 1e-12 * expected.y.abs());
    }

    #[test]
    fn centred_packet_has_no_transverse_drift_at_centre() {
        let p = GaussianPacketModel::new(1e-6, 0.0, 0.0, PhysicalConstants::electron()).unwrap();
        let m = FreePacketModel::new(p, 1e10).unwrap();
        for &t in &[0.0, 1e-8, 1e-7] {
            let v =
                drift_velocity_scalar(&m, Vec2::new(0.0, 0.0), t, f64::INFINITY, FLOOR).unwrap();
            assert_eq!(v.velocity.y, 0.0);
        }
    }

    #[test]
    fn single_up_packet_moves_at_u() {
        let m = SternGerlachModel::reference_defaults(0.0).unwrap();
        let u = m.derived().u;
        for &(z, t) in &[(0.0, 0.0), (2e-4, 1e-4), (-1e-4, 3e-4)] {
            let v = drift_velocity_spinor(&m, Vec2::new(0.0, z), t, f64::INFINITY, FLOOR).unwrap();
            assert!(
                (v.velocity.y - u).abs() <= 1e-9 * u,
                "{} vs {u}",
                v.velocity.y
            );
            assert!((v.velocity.x - m.vx).abs() <= 1e-9 * m.vx);
        }
        let m = m.with_theta0(PI).unwrap();
        let v =
            drift_velocity_spinor(&m, Vec2::new(0.0, 5e-5), 2e-4, f64::INFINITY, FLOOR).unwrap();
        assert!((v.velocity.y + u).abs() <= 1e-9 * u);
    }

    #[test]
    fn balanced_spinor_has_zero_drift_at_origin() {
        let m = SternGerlachModel::reference_defaults(PI / 2.0).unwrap();
        let v = drift_velocity_spinor(&m, Vec2::ZERO, 0.0, f64::INFINITY, FLOOR).unwrap();
        assert!(v.velocity.y.abs() < 1e-9 * m.derived().u);
        // finite-difference current oracle: the phase gradients of the two
        // components are ±mu/ħ and their weights are equal at z = 0.
        let s = crate::models::sg_spinor_value(&m, 0.0, 0.0);
        let h = 1e-11;
        let sp = crate::models::sg_spinor_value(&m, h, 0.0);
        let sm = crate::models::sg_spinor_value(&m, -h, 0.0);
        let dup = (sp.up - sm.up) / (2.0 * h);
        let ddown = (sp.down - sm.down) / (2.0 * h);
        let j = (s.up.conj() * dup + s.down.conj() * ddown).im;
        let expected_scale = m.constants.mass * m.derived().u / m.constants.hbar * s.density();
        assert!(j.abs() < 1e-6 * expected_scale, "current {j}");
    }

    #[test]
    fn osmotic_of_gaussian_at_t0() {
        let c = PhysicalConstants::electron();
        let s0 = 1e-6;
        let p = GaussianPacketModel::new(s0, 0.0, 0.0, c).unwrap();
        let m = FreePacketModel::new(p, 1e10).unwrap();
        let eta = 0.7;
        for &y in &[-2e-6, 5e-7, 3e-6] {
            let o = osmotic_velocity(&m, Vec2::new(0.0, y), 0.0, eta, FLOOR).unwrap();
            let expected = -c.hbar_over_mass() * eta * y / (2.0 * s0 * s0);
            assert!((o.y - expected).abs() <= 1e-12 * expected.abs());
            assert_eq!(o.x, 0.0);
        }
    }

    #[test]
    fn osmotic_vanishes_for_uniform_density() {
        let w = PlaneWave::new(Vec2::new(1e9, 3e8), PhysicalConstants::electron());
        let o = osmotic_velocity(&w, Vec2::new(1e-3, 2e-3), 1e-9, 1.0, FLOOR).unwrap();
        // only rounding from the ~1e6 rad phase survives
        assert!(o.norm() <= 1e-12 * w.velocity_scale(), "{o:?}");
    }

    fn assert_close(a: Vec2, b: Vec2, scale: f64) {
        assert!((a - b).norm() <= 1e-10 * scale, "{a:?} vs {b:?}");
    }

    #[test]
    fn fast_flows_match_full_evaluation() {
        let ds = DoubleSlitModel::reference_defaults();
        let vs = ds.velocity_scale();
        for &(y, t) in &[
            (0.0, 0.0),
            (3e-6, 1e-8),
            (-1.1e-5, 6e-8),
            (2e-5, 1e-7),
            (5.5e-6, 0.0),
        ] {
            let p = Vec2::new(1e-5, y);
            let fast = ds.local_flow(p, t, FLOOR).unwrap();
            let full = scalar_local_flow(&ds, p, t, FLOOR).unwrap();
            assert_close(fast.drift, full.drift, ds.longitudinal_velocity());
            assert_close(fast.osmotic, full.osmotic, vs);
        }
        let fp = FreePacketModel::with_velocity(1e-6, 2e6, PhysicalConstants::electron()).unwrap();
        for &(y, t) in &[(0.0, 0.0), (3e-6, 1e-8), (-4e-6, 1e-7)] {
            let p = Vec2::new(0.0, y);
            let fast = fp.local_flow(p, t, FLOOR).unwrap();
            let full = scalar_local_flow(&fp, p, t, FLOOR).unwrap();
            assert_close(fast.drift, full.drift, 2e6);
            assert_close(fast.osmotic, full.osmotic, fp.velocity_scale());
        }
        for &theta0 in &[0.0, 1.0, PI / 2.0, PI] {
            let sg = SternGerlachModel::reference_defaults(theta0).unwrap();
            for &(z, t) in &[(0.0, 0.0), (1e-4, 2e-4), (-1e-4, 8e-4)] {
                let p = Vec2::new(0.0, z);
                let fast = sg.local_flow(p, t, FLOOR).unwrap();
                let (s, g) = sg.spinor_and_gradient(p, t);
                let full = spinor_flow(
                    s,
                    g,
                    sg.amplitude_scale(t),
                    FLOOR,
                    sg.constants.hbar_over_mass(),
                    p,
                    t,
                )
                .unwrap();
                assert_close(fast.drift, full.drift, sg.vx);
                assert_close(fast.osmotic, full.osmotic, sg.velocity_scale());
            }
        }
    }

    #[test]
    fn node_is_reported() {
        let p = GaussianPacketModel::new(1e-6, 0.0, 0.0, PhysicalConstants::electron()).unwrap();
        let m = FreePacketModel::new(p, 1e10).unwrap();
        // 60 σ out the amplitude is ~e^-900, far below the floor
        let r = m.local_flow(Vec2::new(0.0, 6e-5), 0.0, FLOOR);
        assert!(matches!(r, Err(DynamicsError::NodeEncountered { .. })));
    }

    #[test]
    fn clamp_only_touches_transverse_component() {
        let c = ClampedVelocity::clamp(Vec2::new(2e6, -5e4), 1e4);
        assert!(c.clamped);
        assert_eq!(c.velocity, Vec2::new(2e6, -1e4));
        let c = ClampedVelocity::clamp(Vec2::new(2e6, 5e3), 1e4);
        assert!(!c.clamped);
    }
}
