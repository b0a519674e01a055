use num_complex::Complex64;

use super::gaussian::{packet_exponent, packet_factor, plane_wave, width_unchecked};
use super::{
    check_finite, ComplexAmplitude, ComplexGradient, ModelError, ScalarWavefunction,
    TransverseDensity,
};
use crate::constants::{check_positive, PhysicalConstants};
use crate::geometry::Vec2;

/// Two Gaussian slit packets at y = ±d carried along x by a plane wave.
///
/// The packet from slit `a` is evaluated at `y_a = y`, the one from slit `b`
/// at `y_b = -y`. The overall superposition normalisation is not applied: it
/// cancels in ∇ψ/ψ, and screen densities are renormalised on their grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleSlitModel {
    /// Slit width, m.
    pub sigma0: f64,
    /// Half the slit separation, m.
    pub d: f64,
    pub kx: f64,
    pub ky: f64,
    pub x_screen: f64,
    pub constants: PhysicalConstants,
}

impl DoubleSlitModel {
    pub fn new(
        sigma0: f64,
        d: f64,
        kx: f64,
        ky: f64,
        x_screen: f64,
        constants: PhysicalConstants,
    ) -> Result<Self, ModelError> {
        check_positive("sigma0", sigma0)?;
        check_positive("d", d)?;
        check_positive("kx", kx)?;
        check_finite("ky", ky)?;
        check_positive("x_screen", x_screen)?;
        Ok(Self {
            sigma0,
            d,
            kx,
            ky,
            x_screen,
            constants,
        })
    }

    /// Build from longitudinal and transverse velocities (ħk = mv).
    pub fn with_velocities(
        sigma0: f64,
        d: f64,
        vx: f64,
        vy: f64,
        x_screen: f64,
        constants: PhysicalConstants,
    ) -> Result<Self, ModelError> {
        let hm = constants.hbar_over_mass();
        Self::new(sigma0, d, vx / hm, vy / hm, x_screen, constants)
    }

    /// Electron through slits of width 1 µm, 10 µm apart, at 2·10⁶ m/s, screen at 0.2 m.
    pub fn reference_defaults() -> Self {
        Self::with_velocities(1e-6, 5e-6, 2e6, 0.0, 0.2, PhysicalConstants::electron())
            .expect("valid defaults")
    }

    pub fn longitudinal_velocity(&self) -> f64 {
        self.constants.hbar_over_mass() * self.kx
    }

    pub fn screen_time(&self) -> f64 {
        self.x_screen / self.longitudinal_velocity()
    }

    /// Per-slit factors (ψ_a, dlnψ_a/dy_a, ψ_b, dlnψ_b/dy_b) without the plane wave.
    #[inline]
    fn slit_factors(&self, y: f64, t: f64) -> (Complex64, Complex64, Complex64, Complex64) {
        let (a, da) = packet_factor(y, self.d, self.ky, self.sigma0, t, &self.constants);
        let (b, db) = packet_factor(-y, self.d, self.ky, self.sigma0, t, &self.constants);
        (a, da, b, db)
    }

    /// d(ln Ψ)/dy and |Ψ| relative to a single packet's peak modulus.
    ///
    /// Works with the ratio of the two packets so that neither the common
    /// prefactor nor the plane wave is evaluated.
    pub(crate) fn log_flow(&self, y: f64, t: f64) -> (Complex64, f64) {
        let (ea, da) = packet_exponent(y, self.d, self.ky, self.sigma0, t, &self.constants);
        let (eb, db) = packet_exponent(-y, self.d, self.ky, self.sigma0, t, &self.constants);
        // ψ_b enters with d/dy = -d/dy_b
        let db = -db;
        let (e_ref, d_ref, e_other, d_other) = if ea.re >= eb.re {
            (ea, da, eb, db)
        } else {
            (eb, db, ea, da)
        };
        let r = (e_other - e_ref).exp();
        let sum = 1.0 + r;
        ((d_ref + r * d_other) / sum, e_ref.re.exp() * sum.norm())
    }

    /// Transverse part ψ_a(y) + ψ_b(y).
    pub fn transverse_value(&self, y: f64, t: f64) -> Complex64 {
        let (a, _, b, _) = self.slit_factors(y, t);
        a + b
    }

    pub fn spread(&self, t: f64) -> f64 {
        width_unchecked(self.sigma0, t, self.constants.mass, self.constants.hbar).norm()
    }
}

/// Ψ(x, y, t) = ψ_a + ψ_b (unnormalised).
pub fn double_slit_value(model: &DoubleSlitModel, x: f64, y: f64, t: f64) -> ComplexAmplitude {
    model.value(Vec2::new(x, y), t)
}

/// (∂Ψ/∂x, ∂Ψ/∂y) in closed form.
pub fn double_slit_gradient(model: &DoubleSlitModel, x: f64, y: f64, t: f64) -> ComplexGradient {
    model.value_and_gradient(Vec2::new(x, y), t).1
}

impl ScalarWavefunction for DoubleSlitModel {
    fn constants(&self) -> &PhysicalConstants {
        &self.constants
    }

    fn value(&self, p: Vec2, t: f64) -> ComplexAmplitude {
        plane_wave(self.kx, p.x, t, &self.constants) * self.transverse_value(p.y, t)
    }

    fn value_and_gradient(&self, p: Vec2, t: f64) -> (ComplexAmplitude, ComplexGradient) {
        let wave = plane_wave(self.kx, p.x, t, &self.constants);
        let (a, da, b, db) = self.slit_factors(p.y, t);
        let psi = wave * (a + b);
        // ψ_b depends on -y, hence the sign flip on its derivative.
        let dy = wave * (a * da - b * db);
        (psi, [psi * Complex64::new(0.0, self.kx), dy])
    }

    fn amplitude_scale(&self, t: f64) -> f64 {
        (2.0 * std::f64::consts::PI * self.spread(t).powi(2)).powf(-0.25)
    }
}

impl TransverseDensity for DoubleSlitModel {
    fn arrival_time(&self, x: f64) -> f64 {
        x / self.longitudinal_velocity()
    }

    fn transverse_density(&self, s: f64, t: f64) -> f64 {
        self.transverse_value(s, t).norm_sqr()
    }

    fn spread_window(&self, t: f64, widths: f64) -> (f64, f64) {
        let drift = (self.constants.hbar_over_mass() * self.ky * t).abs();
        let half = self.d + drift + widths * self.spread(t);
        (-half, half)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mirror_symmetry_with_zero_ky() {
        let m = DoubleSlitModel::reference_defaults();
        for &t in &[0.0, 3e-8, 1e-7] {
            for &y in &[0.0, 1.3e-6, 5e-6, 1.7e-5] {
                let a = double_slit_value(&m, 1e-5, y, t);
                let b = double_slit_value(&m, 1e-5, -y, t);
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn slit_centre_is_dominated_by_its_own_packet() {
        let m = DoubleSlitModel::reference_defaults();
        let v = m.transverse_value(m.d, 0.0);
        let peak = (2.0 * std::f64::consts::PI * m.sigma0 * m.sigma0).powf(-0.25);
        let tail = peak * (-(2.0 * m.d).powi(2) / (4.0 * m.sigma0 * m.sigma0)).exp();
        assert!((v.re - peak - tail).abs() <= 1e-12 * peak);
        assert!(v.im.abs() <= 1e-12 * peak);
    }

    #[test]
    fn x_log_derivative_is_pure_phase() {
        let m = DoubleSlitModel::reference_defaults();
        for &(x, y, t) in &[(0.0, 1e-6, 0.0), (1e-3, -4e-6, 5e-8), (0.1, 2e-5, 1e-7)] {
            let (psi, g) = m.value_and_gradient(Vec2::new(x, y), t);
            let r = g[0] / psi;
            assert!((r.im - m.kx).abs() <= 1e-12 * m.kx);
            assert!(r.re.abs() <= 1e-12 * m.kx);
        }
    }

    #[test]
    fn symmetry_axis_has_no_transverse_phase_gradient() {
        let m = DoubleSlitModel::reference_defaults();
        for &t in &[0.0, 2e-8, 1e-7] {
            let (psi, g) = m.value_and_gradient(Vec2::new(0.0, 0.0), t);
            assert!((g[1] / psi).im.abs() < 1e-6 / m.sigma0);
        }
    }

    #[test]
    fn screen_minima_follow_interference_phase() {
        // The relative phase between the packets at the screen is
        // Δφ(y) = -y d Im σ / (σ0 |σ|²); minima of |Ψ|² sit where Δφ = π (mod 2π).
        let m = DoubleSlitModel::reference_defaults();
        let t = m.screen_time();
        let s = width_unchecked(m.sigma0, t, m.constants.mass, m.constants.hbar);
        let slope = m.d * s.im / (m.sigma0 * s.norm_sqr());
        let n = 200_000;
        let half = 3.0 * s.norm();
        let dy = 2.0 * half / n as f64;
        let rho: Vec<f64> = (0..=n)
            .map(|i| m.transverse_density(-half + i as f64 * dy, t))
            .collect();
        let mut minima = Vec::new();
        for i in 1..n {
            if rho[i] < rho[i - 1] && rho[i] <= rho[i + 1] {
                minima.push(-half + i as f64 * dy);
            }
        }
        assert!(minima.len() >= 2, "found {minima:?}");
        let spacing = 2.0 * std::f64::consts::PI / slope;
        for y in minima {
            let phase = slope * y.abs();
            let frac = ((phase / std::f64::consts::PI - 1.0) / 2.0).rem_euclid(1.0);
            let dist = frac.min(1.0 - frac) * spacing;
            // unequal packet envelopes pull the minima slightly off the phase zeros
            assert!(
                dist < 0.05 * spacing,
                "minimum at {y} is {dist} from a phase zero"
            );
        }
        // at a phase zero the two packets cancel as far as their moduli allow
        for j in 0..3 {
            let y = (2 * j + 1) as f64 * std::f64::consts::PI / slope;
            let (a, _, b, _) = m.slit_factors(y, t);
            let rho = m.transverse_density(y, t);
            assert!(
                (rho - (a.norm() - b.norm()).powi(2)).abs() <= 1e-9 * (a.norm() + b.norm()).powi(2)
            );
        }
    }
}
