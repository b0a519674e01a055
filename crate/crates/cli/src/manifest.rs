//! The run manifest: every parameter that determines a run's outputs.

use std::f64::consts::PI;

use entraj_core::constants::{ELECTRON_MASS, SILVER_MASS};
use entraj_core::dynamics::{MotionClass, NoiseMode, StepperConfig};
use entraj_core::ensemble::{EnsembleConfig, Experiment};
use entraj_core::{
    DoubleSlitModel, FreePacketModel, GaussianPacketModel, PhysicalConstants, SternGerlachModel,
};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;
use crate::format::to_json;

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    FreePacket,
    DoubleSlit,
    SternGerlach,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::FreePacket => "free-packet",
            ExperimentKind::DoubleSlit => "double-slit",
            ExperimentKind::SternGerlach => "stern-gerlach",
        }
    }
}

/// Physical parameters of the guiding wavefunction, SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "experiment", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModelParams {
    FreePacket {
        sigma0: f64,
        mass: f64,
        vx: f64,
        center: f64,
    },
    DoubleSlit {
        sigma0: f64,
        half_separation: f64,
        mass: f64,
        vx: f64,
        vy: f64,
    },
    SternGerlach {
        sigma0: f64,
        mass: f64,
        vx: f64,
        theta0: f64,
        phi0: f64,
        b0: f64,
        b0_prime: f64,
        field_time: f64,
    },
}

impl ModelParams {
    pub fn free_packet_defaults() -> Self {
        ModelParams::FreePacket {
            sigma0: 1e-6,
            mass: ELECTRON_MASS,
            vx: 2e6,
            center: 0.0,
        }
    }

    pub fn double_slit_defaults() -> Self {
        ModelParams::DoubleSlit {
            sigma0: 1e-6,
            half_separation: 5e-6,
            mass: ELECTRON_MASS,
            vx: 2e6,
            vy: 0.0,
        }
    }

    pub fn stern_gerlach_defaults() -> Self {
        ModelParams::SternGerlach {
            sigma0: 1e-4,
            mass: SILVER_MASS,
            vx: 500.0,
            theta0: 0.5 * PI,
            phi0: 0.0,
            b0: 5.0,
            b0_prime: 1e3,
            field_time: 2e-5,
        }
    }

    pub fn kind(&self) -> ExperimentKind {
        match self {
            ModelParams::FreePacket { .. } => ExperimentKind::FreePacket,
            ModelParams::DoubleSlit { .. } => ExperimentKind::DoubleSlit,
            ModelParams::SternGerlach { .. } => ExperimentKind::SternGerlach,
        }
    }

    /// Default integration step, chosen for about 10⁴ steps to the default screen.
    pub fn default_dt(self) -> f64 {
        match self.kind() {
            ExperimentKind::FreePacket | ExperimentKind::DoubleSlit => 1e-11,
            ExperimentKind::SternGerlach => 1e-7,
        }
    }

    pub fn default_screen_x(self) -> f64 {
        match self.kind() {
            ExperimentKind::FreePacket | ExperimentKind::DoubleSlit => 0.2,
            ExperimentKind::SternGerlach => 0.5,
        }
    }

    pub fn default_particles(self) -> usize {
        match self.kind() {
            ExperimentKind::FreePacket => 20,
            ExperimentKind::DoubleSlit => 2000,
            ExperimentKind::SternGerlach => 1000,
        }
    }

    /// Build the core model; physical validation happens here.
    pub fn experiment(&self, screen_x: f64) -> Result<Experiment, CliError> {
        let usage = |e: &dyn std::fmt::Display| CliError::Usage(e.to_string());
        Ok(match *self {
            ModelParams::FreePacket {
                sigma0,
                mass,
                vx,
                center,
            } => {
                let c = constants(mass)?;
                let packet =
                    GaussianPacketModel::new(sigma0, center, 0.0, c).map_err(|e| usage(&e))?;
                let kx = vx / c.hbar_over_mass();
                Experiment::FreePacket(FreePacketModel::new(packet, kx).map_err(|e| usage(&e))?)
            }
            ModelParams::DoubleSlit {
                sigma0,
                half_separation,
                mass,
                vx,
                vy,
            } => {
                let c = constants(mass)?;
                Experiment::DoubleSlit(
                    DoubleSlitModel::with_velocities(sigma0, half_separation, vx, vy, screen_x, c)
                        .map_err(|e| usage(&e))?,
                )
            }
            ModelParams::SternGerlach {
                sigma0,
                mass,
                vx,
                theta0,
                phi0,
                b0,
                b0_prime,
                field_time,
            } => {
                let c = constants(mass)?;
                Experiment::SternGerlach(
                    SternGerlachModel::new(sigma0, theta0, phi0, b0, b0_prime, field_time, vx, c)
                        .map_err(|e| usage(&e))?,
                )
            }
        })
    }
}

/// CODATA ħ and μ_B with the given particle mass.
fn constants(mass: f64) -> Result<PhysicalConstants, CliError> {
    PhysicalConstants::electron()
        .with_mass(mass)
        .map_err(|e| CliError::Usage(format!("mass: {e}")))
}

/// Everything that determines the output files of a run.
///
/// The worker count is deliberately absent: it never changes outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub artifact_version: String,
    pub model: ModelParams,
    pub particles: usize,
    pub seed: u64,
    pub eta: f64,
    pub n_exp: u32,
    pub dt: f64,
    pub screen_x: f64,
    pub noise_mode: NoiseMode,
    pub osmotic: bool,
    /// Transverse velocity clamp, m/s; `None` uses the model's default.
    pub vmax: Option<f64>,
    pub bins: usize,
    /// Order of the display fit; `None` skips it.
    pub fit_order: Option<usize>,
    pub max_stored_steps: usize,
    /// Number of particles (lowest ids first) written to trajectories.csv.
    pub stored_trajectories: usize,
    /// Unix seconds; excluded from the hash and from summary.json.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
}

impl RunManifest {
    /// Manifest with the default numerics for `model`.
    pub fn with_defaults(model: ModelParams) -> Self {
        Self {
            artifact_version: ARTIFACT_VERSION.to_string(),
            model,
            particles: model.default_particles(),
            seed: 0,
            eta: 0.0,
            n_exp: 0,
            dt: model.default_dt(),
            screen_x: model.default_screen_x(),
            noise_mode: NoiseMode::UnitSphere,
            osmotic: false,
            vmax: None,
            bins: 64,
            fit_order: Some(15),
            max_stored_steps: 2000,
            stored_trajectories: 200,
            timestamp: None,
        }
    }

    pub fn kind(&self) -> ExperimentKind {
        self.model.kind()
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Usage(msg));
        if self.particles == 0 {
            return bad("--particles must be >= 1".into());
        }
        if !(self.eta.is_finite() && self.eta >= 0.0) {
            return bad(format!("--eta must be finite and >= 0, got {}", self.eta));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return bad(format!("--dt must be > 0, got {}", self.dt));
        }
        if !(self.screen_x.is_finite() && self.screen_x > 0.0) {
            return bad(format!("--screen-x must be > 0, got {}", self.screen_x));
        }
        if let Some(v) = self.vmax {
            if !(v.is_finite() && v > 0.0) {
                return bad(format!("--vmax must be finite and > 0, got {v}"));
            }
        }
        if self.bins == 0 {
            return bad("--bins must be >= 1".into());
        }
        if let Some(order) = self.fit_order {
            if order >= self.bins {
                return bad(format!("--fit-order {order} needs more than {order} bins"));
            }
        }
        if self.max_stored_steps == 0 {
            return bad("--max-stored-steps must be >= 1".into());
        }
        self.experiment().map(|_| ())
    }

    pub fn experiment(&self) -> Result<Experiment, CliError> {
        self.model.experiment(self.screen_x)
    }

    /// `eta = 0` is the Bohmian limit whatever `n_exp` says.
    pub fn motion(&self) -> Result<MotionClass, CliError> {
        MotionClass::new(self.n_exp, self.eta).map_err(|e| CliError::Usage(e.to_string()))
    }

    /// Store every `stride`-th step so at most `max_stored_steps` are kept.
    pub fn store_stride(&self) -> Result<usize, CliError> {
        let t = self.experiment()?.screen_time(self.screen_x);
        // Tolerate rounding in t/dt so an exact multiple is not bumped up a step.
        let steps = (t / self.dt * (1.0 - 1e-12)).ceil().max(1.0);
        Ok(((steps / self.max_stored_steps as f64).ceil() as usize).max(1))
    }

    pub fn stepper(&self) -> Result<StepperConfig, CliError> {
        let mut s = StepperConfig::new(self.dt);
        s.v_max = self.vmax;
        s.noise_mode = self.noise_mode;
        s.osmotic = self.osmotic;
        s.store_stride = (self.stored_trajectories > 0)
            .then(|| self.store_stride())
            .transpose()?;
        Ok(s)
    }

    pub fn ensemble_config(&self, workers: Option<usize>) -> Result<EnsembleConfig, CliError> {
        self.validate()?;
        let mut cfg = EnsembleConfig::new(
            self.particles,
            self.seed,
            self.experiment()?,
            self.motion()?,
            self.stepper()?,
            self.screen_x,
        );
        cfg.workers = workers;
        cfg.stored_particles = Some(self.stored_trajectories);
        Ok(cfg)
    }

    /// The manifest with the timestamp removed.
    pub fn canonical(&self) -> Self {
        Self {
            timestamp: None,
            ..self.clone()
        }
    }

    /// SHA-256 of the canonical JSON, hex encoded.
    pub fn hash(&self) -> String {
        let bytes = to_json(&self.canonical()).expect("manifest serializes");
        hex::encode(Sha256::digest(&bytes))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_ignores_timestamp() {
        let mut a = RunManifest::with_defaults(ModelParams::double_slit_defaults());
        let mut b = a.clone();
        a.timestamp = Some(1);
        b.timestamp = Some(2);
        assert_eq!(a.hash(), b.hash());
        b.seed = 1;
        assert_ne!(a.hash(), b.hash());
    }

    #[test]
    fn json_round_trip() {
        let mut m = RunManifest::with_defaults(ModelParams::stern_gerlach_defaults());
        m.timestamp = Some(1_700_000_000);
        m.vmax = Some(0.1 + 0.2);
        let text = to_json(&m).unwrap();
        let back: RunManifest = serde_json::from_slice(&text).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn stride_bounds_stored_steps() {
        let m = RunManifest::with_defaults(ModelParams::double_slit_defaults());
        // 10⁴ steps to the screen, at most 2000 kept.
        assert_eq!(m.store_stride().unwrap(), 5);
    }

    #[test]
    fn rejects_non_physical_values() {
        let mut m = RunManifest::with_defaults(ModelParams::double_slit_defaults());
        m.model = ModelParams::DoubleSlit {
            sigma0: -1e-6,
            half_separation: 5e-6,
            mass: ELECTRON_MASS,
            vx: 2e6,
            vy: 0.0,
        };
        assert!(matches!(m.validate(), Err(CliError::Usage(_))));
        let mut m = RunManifest::with_defaults(ModelParams::free_packet_defaults());
        m.model = ModelParams::FreePacket {
            sigma0: 1e-6,
            mass: -1.0,
            vx: 2e6,
            center: 0.0,
        };
        assert!(matches!(m.validate(), Err(CliError::Usage(_))));
    }
}
