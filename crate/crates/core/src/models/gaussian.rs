use std::f64::consts::PI;

use num_complex::Complex64;

use super::{
    check_finite, ComplexAmplitude, ComplexGradient, ModelError, ScalarWavefunction,
    TransverseDensity,
};
use crate::constants::{check_positive, PhysicalConstants};
use crate::geometry::Vec2;

/// Complex Gaussian width σ(t) = σ0 (1 + iħt / 2mσ0²).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexWidth(pub Complex64);

impl ComplexWidth {
    pub fn value(self) -> Complex64 {
        self.0
    }

    /// |σ(t)|, the standard deviation of |ψ|² at time t.
    pub fn modulus(self) -> f64 {
        self.0.norm()
    }
}

pub fn complex_width(
    sigma0: f64,
    t: f64,
    mass: f64,
    hbar: f64,
) -> Result<ComplexWidth, ModelError> {
    check_positive("sigma0", sigma0)?;
    check_positive("mass", mass)?;
    check_finite("t", t)?;
    Ok(ComplexWidth(width_unchecked(sigma0, t, mass, hbar)))
}

#[inline]
pub(crate) fn width_unchecked(sigma0: f64, t: f64, mass: f64, hbar: f64) -> Complex64 {
    Complex64::new(sigma0, hbar * t / (2.0 * mass * sigma0))
}

/// Exponent of one freely spreading Gaussian factor at transverse
/// coordinate `s`, without the normalisation prefactor, and d(ln ψ)/ds.
#[inline]
pub(crate) fn packet_exponent(
    s: f64,
    center: f64,
    k: f64,
    sigma0: f64,
    t: f64,
    consts: &PhysicalConstants,
) -> (Complex64, Complex64) {
    let hbar_m = consts.hbar_over_mass();
    let sigma = width_unchecked(sigma0, t, consts.mass, consts.hbar);
    let offset = s - center - hbar_m * k * t;
    let inv = 1.0 / (2.0 * sigma0 * sigma);
    let exponent = Complex64::new(0.0, k * (s - center) - 0.5 * hbar_m * k * k * t)
        - 0.5 * offset * offset * inv;
    let dlog = Complex64::new(0.0, k) - offset * inv;
    (exponent, dlog)
}

/// One freely spreading Gaussian factor evaluated at transverse coordinate
/// `s`. Returns the value and d(ln ψ)/ds.
///
/// The prefactor is the principal branch of (2πσ²)^(-1/4), which equals
/// (2πσ0²)^(-1/4) (σ0/σ)^(1/2) because Re σ > 0.
#[inline]
pub(crate) fn packet_factor(
    s: f64,
    center: f64,
    k: f64,
    sigma0: f64,
    t: f64,
    consts: &PhysicalConstants,
) -> (Complex64, Complex64) {
    let sigma = width_unchecked(sigma0, t, consts.mass, consts.hbar);
    let (exponent, dlog) = packet_exponent(s, center, k, sigma0, t, consts);
    (
        (exponent - 0.25 * (2.0 * PI * sigma * sigma).ln()).exp(),
        dlog,
    )
}

/// One-dimensional freely spreading Gaussian packet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPacketModel {
    pub sigma0: f64,
    pub center: f64,
    /// Wave number, 1/m.
    pub k: f64,
    pub constants: PhysicalConstants,
}

impl GaussianPacketModel {
    pub fn new(
        sigma0: f64,
        center: f64,
        k: f64,
        constants: PhysicalConstants,
    ) -> Result<Self, ModelError> {
        check_positive("sigma0", sigma0)?;
        check_finite("center", center)?;
        check_finite("k", k)?;
        Ok(Self {
            sigma0,
            center,
            k,
            constants,
        })
    }

    pub fn value(&self, x: f64, t: f64) -> ComplexAmplitude {
        packet_factor(x, self.center, self.k, self.sigma0, t, &self.constants).0
    }

    /// Value and ∂ψ/∂x.
    pub fn value_and_derivative(&self, x: f64, t: f64) -> (ComplexAmplitude, Complex64) {
        let (v, dlog) = packet_factor(x, self.center, self.k, self.sigma0, t, &self.constants);
        (v, v * dlog)
    }

    pub fn width(&self, t: f64) -> ComplexWidth {
        ComplexWidth(width_unchecked(
            self.sigma0,
            t,
            self.constants.mass,
            self.constants.hbar,
        ))
    }

    /// d(ln ψ)/dx and |ψ| relative to the peak modulus at time t.
    pub(crate) fn log_flow(&self, x: f64, t: f64) -> (Complex64, f64) {
        let (e, dlog) = packet_exponent(x, self.center, self.k, self.sigma0, t, &self.constants);
        (dlog, e.re.exp())
    }

    /// Centre of |ψ|² at time t.
    pub fn mean_position(&self, t: f64) -> f64 {
        self.center + self.constants.hbar_over_mass() * self.k * t
    }

    /// Peak modulus (2π|σ|²)^(-1/4).
    pub fn peak_amplitude(&self, t: f64) -> f64 {
        (2.0 * PI * self.width(t).modulus().powi(2)).powf(-0.25)
    }
}

/// A transverse Gaussian packet carried along `x` by a plane wave e^{i k_x x}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreePacketModel {
    pub transverse: GaussianPacketModel,
    /// Longitudinal wave number, 1/m.
    pub kx: f64,
}

impl FreePacketModel {
    pub fn new(transverse: GaussianPacketModel, kx: f64) -> Result<Self, ModelError> {
        check_positive("kx", kx)?;
        Ok(Self { transverse, kx })
    }

    /// Build from a longitudinal velocity instead of a wave number.
    pub fn with_velocity(
        sigma0: f64,
        vx: f64,
        constants: PhysicalConstants,
    ) -> Result<Self, ModelError> {
        check_positive("vx", vx)?;
        let packet = GaussianPacketModel::new(sigma0, 0.0, 0.0, constants)?;
        Self::new(packet, vx / constants.hbar_over_mass())
    }

    pub fn longitudinal_velocity(&self) -> f64 {
        self.transverse.constants.hbar_over_mass() * self.kx
    }
}

#[inline]
pub(crate) fn plane_wave(kx: f64, x: f64, t: f64, consts: &PhysicalConstants) -> Complex64 {
    // Separate factors keep the rounding of a large ωt out of the spatial phase.
    Complex64::from_polar(1.0, kx * x)
        * Complex64::from_polar(1.0, -0.5 * consts.hbar_over_mass() * kx * kx * t)
}

impl ScalarWavefunction for FreePacketModel {
    fn constants(&self) -> &PhysicalConstants {
        &self.transverse.constants
    }

    fn value(&self, p: Vec2, t: f64) -> ComplexAmplitude {
        plane_wave(self.kx, p.x, t, self.constants()) * self.transverse.value(p.y, t)
    }

    fn value_and_gradient(&self, p: Vec2, t: f64) -> (ComplexAmplitude, ComplexGradient) {
        let wave = plane_wave(self.kx, p.x, t, self.constants());
        let (v, dv) = self.transverse.value_and_derivative(p.y, t);
        let psi = wave * v;
        (psi, [psi * Complex64::new(0.0, self.kx), wave * dv])
    }

    fn amplitude_scale(&self, t: f64) -> f64 {
        self.transverse.peak_amplitude(t)
    }
}

impl TransverseDensity for FreePacketModel {
    fn arrival_time(&self, x: f64) -> f64 {
        x / self.longitudinal_velocity()
    }

    fn transverse_density(&self, s: f64, t: f64) -> f64 {
        self.transverse.value(s, t).norm_sqr()
    }

    fn spread_window(&self, t: f64, widths: f64) -> (f64, f64) {
        let c = self.transverse.mean_position(t);
        let w = widths * self.transverse.width(t).modulus();
        (c - w, c + w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{ELECTRON_MASS, HBAR};

    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let n = n + n % 2;
        let h = (b - a) / n as f64;
        let mut acc = f(a) + f(b);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * f(a + i as f64 * h);
        }
        acc * h / 3.0
    }

    #[test]
    fn complex_width_identities() {
        let s0 = 1e-6;
        let w = complex_width(s0, 0.0, ELECTRON_MASS, HBAR).unwrap().value();
        assert_eq!(w, Complex64::new(s0, 0.0));

        let t = 2.0 * ELECTRON_MASS * s0 * s0 / HBAR;
        let w = complex_width(s0, t, ELECTRON_MASS, HBAR).unwrap().value();
        assert!((w.re - s0).abs() < 1e-18);
        assert!((w.im / s0 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn complex_width_at_screen_time() {
        // Hand calculation: 1.054571817e-34 * 1e-7 / (2 * 9.1093837015e-31 * 1e-12)
        // = 1.054571817e-41 / 1.8218767403e-42 = 5.78838...
        let w = complex_width(1e-6, 1e-7, ELECTRON_MASS, HBAR)
            .unwrap()
            .value();
        let ratio = w.im / w.re;
        assert!((ratio - 5.788_38).abs() < 1e-4, "ratio {ratio}");
    }

    #[test]
    fn complex_width_rejects_bad_sigma() {
        assert!(complex_width(0.0, 1.0, ELECTRON_MASS, HBAR).is_err());
        assert!(complex_width(-1e-6, 1.0, ELECTRON_MASS, HBAR).is_err());
    }

    #[test]
    fn peak_value_at_t0() {
        let m = GaussianPacketModel::new(1e-6, 0.0, 0.0, PhysicalConstants::electron()).unwrap();
        let v = m.value(0.0, 0.0);
        let expected = (2.0 * PI * 1e-12f64).powf(-0.25);
        assert!((v.re - expected).abs() / expected < 1e-14);
        assert!(v.im.abs() < 1e-10 * expected);
    }

    #[test]
    fn modulus_symmetric_for_centred_packet() {
        let m = GaussianPacketModel::new(1e-6, 0.0, 3.0e6, PhysicalConstants::electron()).unwrap();
        for &t in &[0.0, 1e-9, 5e-8] {
            let shift = m.mean_position(t);
            for &x in &[1e-7, 2.5e-6, 7e-6] {
                let a = m.value(shift + x, t).norm();
                let b = m.value(shift - x, t).norm();
                assert!((a - b).abs() <= 1e-12 * a.max(b), "{a} {b}");
            }
        }
        // with k = 0 the packet stays centred at the origin
        let m0 = GaussianPacketModel::new(1e-6, 0.0, 0.0, PhysicalConstants::electron()).unwrap();
        for &x in &[1e-7, 3e-6] {
            assert!((m0.value(x, 4e-8).norm() - m0.value(-x, 4e-8).norm()).abs() < 1e-9);
        }
    }

    #[test]
    fn norm_is_one_by_quadrature() {
        let m = GaussianPacketModel::new(1e-6, 2e-7, 1.0e6, PhysicalConstants::electron()).unwrap();
        for &t in &[0.0, 2e-8, 1e-7] {
            let c = m.mean_position(t);
            let s = m.width(t).modulus();
            let norm = simpson(
                |x| m.value(x, t).norm_sqr(),
                c - 10.0 * s,
                c + 10.0 * s,
                4000,
            );
            assert!((norm - 1.0).abs() < 1e-6, "t={t} norm={norm}");
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let m = GaussianPacketModel::new(1e-6, 0.0, 2.0e6, PhysicalConstants::electron()).unwrap();
        let t = 3e-8;
        let h = 1e-9;
        for &x in &[-3e-6, 1e-7, 4e-6] {
            let (_, d) = m.value_and_derivative(x, t);
            let fd = (m.value(x + h, t) * 8.0 - m.value(x - h, t) * 8.0 - m.value(x + 2.0 * h, t)
                + m.value(x - 2.0 * h, t))
                / (12.0 * h);
            assert!((fd - d).norm() <= 1e-7 * d.norm(), "{fd} vs {d}");
        }
    }
}
