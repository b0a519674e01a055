use std::f64::consts::PI;

use num_complex::Complex64;

use super::{
    check_finite, ComplexGradient, ModelError, SpinorAmplitude, SpinorWavefunction,
    TransverseDensity,
};
use crate::constants::{check_positive, PhysicalConstants};
use crate::geometry::Vec2;

/// Quantities fixed by the magnet: packet offset, packet velocity and the
/// two spinor phases acquired inside the field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SgDerived {
    /// Δ_z = μ_B B0' Δt² / 2m.
    pub delta_z: f64,
    /// u = μ_B B0' Δt / m.
    pub u: f64,
    pub phase_plus: f64,
    pub phase_minus: f64,
}

/// Offset, velocity and phases after a field of strength `b0` and gradient
/// `b0_prime` acting for `dt_field`.
pub fn sg_derived_params(
    b0_prime: f64,
    dt_field: f64,
    b0: f64,
    phi0: f64,
    constants: &PhysicalConstants,
) -> SgDerived {
    let PhysicalConstants {
        hbar,
        mass,
        mu_bohr,
    } = *constants;
    let delta_z = mu_bohr * b0_prime * dt_field * dt_field / (2.0 * mass);
    let u = mu_bohr * b0_prime * dt_field / mass;
    let zeeman = mu_bohr * b0 * dt_field / hbar;
    let gradient_term = (mu_bohr * b0_prime).powi(2) * dt_field.powi(3) / (6.0 * mass * hbar);
    SgDerived {
        delta_z,
        u,
        phase_plus: 0.5 * phi0 - zeeman - gradient_term,
        phase_minus: -0.5 * phi0 + zeeman - gradient_term,
    }
}

/// Spinor after the Stern-Gerlach magnet: an up packet moving to +z and a
/// down packet moving to -z, both of fixed width σ0.
///
/// Time `t` is measured from the field exit; the longitudinal motion is
/// ballistic at `vx`, with `x = 0` at the exit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SternGerlachModel {
    pub sigma0: f64,
    pub theta0: f64,
    pub phi0: f64,
    pub b0: f64,
    pub b0_prime: f64,
    pub dt_field: f64,
    pub vx: f64,
    pub constants: PhysicalConstants,
    derived: SgDerived,
}

impl SternGerlachModel {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        sigma0: f64,
        theta0: f64,
        phi0: f64,
        b0: f64,
        b0_prime: f64,
        dt_field: f64,
        vx: f64,
        constants: PhysicalConstants,
    ) -> Result<Self, ModelError> {
        check_positive("sigma0", sigma0)?;
        check_positive("vx", vx)?;
        check_finite("phi0", phi0)?;
        check_finite("b0", b0)?;
        check_finite("b0_prime", b0_prime)?;
        if !(0.0..=PI).contains(&theta0) {
            return Err(ModelError::PolarAngle(theta0));
        }
        if !(dt_field.is_finite() && dt_field >= 0.0) {
            return Err(ModelError::NonFinite {
                name: "dt_field",
                value: dt_field,
            });
        }
        let derived = sg_derived_params(b0_prime, dt_field, b0, phi0, &constants);
        Ok(Self {
            sigma0,
            theta0,
            phi0,
            b0,
            b0_prime,
            dt_field,
            vx,
            constants,
            derived,
        })
    }

    /// Silver atoms at 500 m/s, σ0 = 0.1 mm, B0 = 5 T, B0' = 10³ T/m, 20 µs in the field.
    pub fn reference_defaults(theta0: f64) -> Result<Self, ModelError> {
        Self::new(
            1e-4,
            theta0,
            0.0,
            5.0,
            1e3,
            2e-5,
            500.0,
            PhysicalConstants::silver(),
        )
    }

    pub fn derived(&self) -> &SgDerived {
        &self.derived
    }

    pub fn with_theta0(&self, theta0: f64) -> Result<Self, ModelError> {
        Self::new(
            self.sigma0,
            theta0,
            self.phi0,
            self.b0,
            self.b0_prime,
            self.dt_field,
            self.vx,
            self.constants,
        )
    }

    /// Centre of the up packet; the down packet sits at the mirror image.
    pub fn up_center(&self, t: f64) -> f64 {
        self.derived.delta_z + self.derived.u * t
    }

    /// Born weight of the up component, cos²(θ0/2).
    pub fn up_weight(&self) -> f64 {
        (0.5 * self.theta0).cos().powi(2)
    }

    fn components(&self, z: f64, t: f64) -> (Complex64, Complex64, Complex64, Complex64) {
        let SgDerived {
            u,
            phase_plus,
            phase_minus,
            ..
        } = self.derived;
        let k = self.constants.mass * u / self.constants.hbar;
        let s2 = self.sigma0 * self.sigma0;
        let norm = (2.0 * PI * s2).powf(-0.25);
        let c = self.up_center(t);
        let (half_sin, half_cos) = (0.5 * self.theta0).sin_cos();

        let up_off = z - c;
        let up = Complex64::from_polar(
            norm * half_cos * (-up_off * up_off / (4.0 * s2)).exp(),
            k * z + phase_plus,
        );
        let up_dlog = Complex64::new(-up_off / (2.0 * s2), k);

        let down_off = z + c;
        let down = Complex64::from_polar(
            norm * half_sin * (-down_off * down_off / (4.0 * s2)).exp(),
            -k * z + phase_minus,
        );
        let down_dlog = Complex64::new(-down_off / (2.0 * s2), -k);
        (up, up_dlog, down, down_dlog)
    }

    /// Transverse (phase gradient, log-amplitude gradient) of the spinor
    /// current, Im and Re of Ψ†∂zΨ/ρ, and √ρ relative to the peak modulus.
    pub(crate) fn log_flow(&self, z: f64, t: f64) -> (f64, f64, f64) {
        let u = self.derived.u;
        let k = self.constants.mass * u / self.constants.hbar;
        let s2 = self.sigma0 * self.sigma0;
        let c = self.up_center(t);
        let (half_sin, half_cos) = (0.5 * self.theta0).sin_cos();
        // log weights of ρ+ and ρ- relative to the peak density
        let lp = 2.0 * half_cos.ln() - (z - c) * (z - c) / (2.0 * s2);
        let lm = 2.0 * half_sin.ln() - (z + c) * (z + c) / (2.0 * s2);
        let top = lp.max(lm);
        if top == f64::NEG_INFINITY {
            return (0.0, 0.0, 0.0);
        }
        let (wp, wm) = ((lp - top).exp(), (lm - top).exp());
        let w = wp + wm;
        let phase = k * (wp - wm) / w;
        let amp = (wp * (c - z) - wm * (z + c)) / (2.0 * s2 * w);
        (phase, amp, (0.5 * top).exp() * w.sqrt())
    }

    fn longitudinal_k(&self) -> f64 {
        self.constants.mass * self.vx / self.constants.hbar
    }
}

/// Spinor value at transverse position `z` and time `t` after the field.
pub fn sg_spinor_value(model: &SternGerlachModel, z: f64, t: f64) -> SpinorAmplitude {
    let (up, _, down, _) = model.components(z, t);
    SpinorAmplitude { up, down }
}

impl SpinorWavefunction for SternGerlachModel {
    fn constants(&self) -> &PhysicalConstants {
        &self.constants
    }

    fn spinor(&self, p: Vec2, t: f64) -> SpinorAmplitude {
        let wave = Complex64::from_polar(1.0, self.longitudinal_k() * p.x);
        sg_spinor_value(self, p.y, t).scale(wave)
    }

    fn spinor_and_gradient(&self, p: Vec2, t: f64) -> (SpinorAmplitude, [ComplexGradient; 2]) {
        let kx = self.longitudinal_k();
        let wave = Complex64::from_polar(1.0, kx * p.x);
        let (up, up_dlog, down, down_dlog) = self.components(p.y, t);
        let (up, down) = (up * wave, down * wave);
        let ikx = Complex64::new(0.0, kx);
        (
            SpinorAmplitude { up, down },
            [[up * ikx, up * up_dlog], [down * ikx, down * down_dlog]],
        )
    }

    fn amplitude_scale(&self, _t: f64) -> f64 {
        (2.0 * PI * self.sigma0 * self.sigma0).powf(-0.25)
    }
}

impl TransverseDensity for SternGerlachModel {
    fn arrival_time(&self, x: f64) -> f64 {
        x / self.vx
    }

    fn transverse_density(&self, s: f64, t: f64) -> f64 {
        sg_spinor_value(self, s, t).density()
    }

    fn spread_window(&self, t: f64, widths: f64) -> (f64, f64) {
        let half = self.up_center(t).abs() + widths * self.sigma0;
        (-half, half)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_parameters_give_expected_offset_and_velocity() {
        let d = sg_derived_params(1e3, 2e-5, 5.0, 0.0, &PhysicalConstants::silver());
        assert!(
            (d.delta_z / 1e-5 - 1.0).abs() < 0.05,
            "delta_z {}",
            d.delta_z
        );
        assert!((d.u - 1.0).abs() < 0.05, "u {}", d.u);
    }

    #[test]
    fn zero_gradient_means_no_splitting() {
        let d = sg_derived_params(0.0, 2e-5, 5.0, 0.3, &PhysicalConstants::silver());
        assert_eq!(d.delta_z, 0.0);
        assert_eq!(d.u, 0.0);
    }

    #[test]
    fn phase_sum_keeps_only_gradient_term() {
        let c = PhysicalConstants::silver();
        for &(phi0, b0) in &[(0.0, 5.0), (1.2, 0.7), (-2.0, 11.0)] {
            let d = sg_derived_params(1e3, 2e-5, b0, phi0, &c);
            let g = (c.mu_bohr * 1e3f64).powi(2) * (2e-5f64).powi(3) / (6.0 * c.mass * c.hbar);
            let sum = d.phase_plus + d.phase_minus;
            assert!(
                (sum + 2.0 * g).abs() <= 1e-9 * d.phase_plus.abs().max(1.0),
                "{sum} vs {}",
                -2.0 * g
            );
        }
    }

    #[test]
    fn theta_zero_has_no_down_component() {
        let m = SternGerlachModel::reference_defaults(0.0).unwrap();
        for &(z, t) in &[(0.0, 0.0), (1e-4, 1e-4), (-3e-4, 5e-4)] {
            assert_eq!(sg_spinor_value(&m, z, t).down.norm(), 0.0);
        }
    }

    #[test]
    fn equal_weights_at_origin() {
        let m = SternGerlachModel::reference_defaults(PI / 2.0).unwrap();
        let s = sg_spinor_value(&m, 0.0, 0.0);
        assert!((s.up.norm() - s.down.norm()).abs() < 1e-12 * s.up.norm());
    }

    #[test]
    fn total_norm_is_one() {
        let m = SternGerlachModel::reference_defaults(PI / 3.0).unwrap();
        let n = 20_000;
        let (lo, hi) = (-1e-3, 1e-3);
        let h = (hi - lo) / n as f64;
        let mut acc = 0.0;
        for i in 0..=n {
            let w = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            acc += w * sg_spinor_value(&m, lo + i as f64 * h, 0.0).density();
        }
        assert!((acc * h / 3.0 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn rejects_out_of_range_theta() {
        assert!(SternGerlachModel::reference_defaults(-0.1).is_err());
        assert!(SternGerlachModel::reference_defaults(3.2).is_err());
    }
}
