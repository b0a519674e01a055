//! Ensembles of trajectories and their screen statistics.
//!
//! Each trajectory owns a private RNG stream derived from
//! `(base_seed, particle_id)` (see [`seeding`]); the initial condition is
//! drawn from that stream before the noise. Results are collected in
//! particle order, so worker count and scheduling never change any output.

pub mod fit;
pub mod sampling;
pub mod seeding;
pub mod stats;

pub use fit::{fit_histogram, polynomial_fit, FitError, PolynomialFit, DEFAULT_FIT_ORDER};
pub use sampling::{
    sample_initial_double_slit, sample_initial_gaussian, sample_initial_stern_gerlach,
};
pub use seeding::{particle_rng, particle_seed, splitmix64};
pub use stats::{
    ks_statistic, l1_distance, theoretical_screen_density, DensityGrid, Histogram, DEFAULT_BINS,
    DEFAULT_GRID_POINTS, HISTOGRAM_SPREADS,
};

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{
    integrate_trajectory, DynamicsError, EventCounts, GuidanceField, MotionClass, StepperConfig,
    StopCondition, Trajectory, TrajectoryState,
};
use crate::geometry::Vec2;
use crate::models::{DoubleSlitModel, FreePacketModel, SternGerlachModel, TransverseDensity};
use crate::spin::up_fraction;

#[derive(Debug, Error)]
pub enum EnsembleError {
    #[error("n_particles must be >= 1")]
    NoParticles,
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error("could not build a pool of {workers} workers: {message}")]
    Pool { workers: usize, message: String },
}

/// The guiding model of an ensemble.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Experiment {
    FreePacket(FreePacketModel),
    DoubleSlit(DoubleSlitModel),
    SternGerlach(SternGerlachModel),
}

impl Experiment {
    /// Initial state at `x = 0, t = 0` with the transverse coordinate drawn
    /// from the model's initial density.
    pub fn sample_initial<R: Rng + ?Sized>(&self, rng: &mut R) -> TrajectoryState {
        let transverse = match self {
            Experiment::FreePacket(m) => {
                m.transverse.center + sample_initial_gaussian(rng, m.transverse.sigma0)
            }
            Experiment::DoubleSlit(m) => sample_initial_double_slit(rng, m),
            Experiment::SternGerlach(m) => sample_initial_stern_gerlach(rng, m),
        };
        TrajectoryState::new(Vec2::new(0.0, transverse), 0.0)
    }

    pub fn field(&self) -> &dyn GuidanceField {
        match self {
            Experiment::FreePacket(m) => m,
            Experiment::DoubleSlit(m) => m,
            Experiment::SternGerlach(m) => m,
        }
    }

    pub fn density(&self) -> &dyn TransverseDensity {
        match self {
            Experiment::FreePacket(m) => m,
            Experiment::DoubleSlit(m) => m,
            Experiment::SternGerlach(m) => m,
        }
    }

    pub fn screen_time(&self, screen_x: f64) -> f64 {
        self.density().arrival_time(screen_x)
    }

    pub fn is_spinor(&self) -> bool {
        matches!(self, Experiment::SternGerlach(_))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleConfig {
    pub n_particles: usize,
    pub base_seed: u64,
    pub experiment: Experiment,
    pub motion: MotionClass,
    pub stepper: StepperConfig,
    pub screen_x: f64,
    /// Worker threads; `None` uses the global pool. Never affects results.
    pub workers: Option<usize>,
    /// Apply `stepper.store_stride` only to particles with a smaller id;
    /// the rest keep their endpoints. `None` applies it to all.
    pub stored_particles: Option<usize>,
}

impl EnsembleConfig {
    pub fn new(
        n_particles: usize,
        base_seed: u64,
        experiment: Experiment,
        motion: MotionClass,
        stepper: StepperConfig,
        screen_x: f64,
    ) -> Self {
        Self {
            n_particles,
            base_seed,
            experiment,
            motion,
            stepper,
            screen_x,
            workers: None,
            stored_particles: None,
        }
    }
}

/// One screen hit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorRecord {
    pub particle_id: usize,
    pub t_hit: f64,
    pub transverse_hit: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParticleTrajectory {
    pub particle_id: usize,
    pub trajectory: Trajectory,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryFailure {
    pub particle_id: usize,
    pub error: DynamicsError,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleOutput {
    /// Successful trajectories, sorted by particle id.
    pub trajectories: Vec<ParticleTrajectory>,
    pub records: Vec<DetectorRecord>,
    pub failures: Vec<TrajectoryFailure>,
    pub events: EventCounts,
}

impl EnsembleOutput {
    pub fn hits(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.transverse_hit).collect()
    }
}

/// Run particle `index` of the ensemble: seed, sample, integrate.
pub fn run_particle(config: &EnsembleConfig, index: usize) -> Result<Trajectory, DynamicsError> {
    let mut rng = particle_rng(config.base_seed, index as u64);
    let initial = config.experiment.sample_initial(&mut rng);
    let mut stepper = config.stepper;
    if config.stored_particles.is_some_and(|limit| index >= limit) {
        stepper.store_stride = None;
    }
    integrate_trajectory(
        initial,
        config.experiment.field(),
        config.motion,
        &stepper,
        StopCondition::Screen { x: config.screen_x },
        &mut rng,
    )
}

#[cfg(feature = "parallel")]
fn map_particles<T, F>(n: usize, workers: Option<usize>, f: F) -> Result<Vec<T>, EnsembleError>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    let run = || (0..n).into_par_iter().map(&f).collect::<Vec<T>>();
    match workers {
        None => Ok(run()),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| EnsembleError::Pool {
                    workers: w,
                    message: e.to_string(),
                })?;
            Ok(pool.install(run))
        }
    }
}

#[cfg(not(feature = "parallel"))]
fn map_particles<T, F>(n: usize, _workers: Option<usize>, f: F) -> Result<Vec<T>, EnsembleError>
where
    F: Fn(usize) -> T,
{
    Ok((0..n).map(f).collect())
}

/// Integrate `n_particles` independent trajectories to the screen.
///
/// Per-trajectory failures (stalls) are collected rather than aborting.
pub fn run_ensemble(config: &EnsembleConfig) -> Result<EnsembleOutput, EnsembleError> {
    if config.n_particles == 0 {
        return Err(EnsembleError::NoParticles);
    }
    config.stepper.validate()?;
    let results = map_particles(config.n_particles, config.workers, |i| {
        run_particle(config, i)
    })?;

    let mut out = EnsembleOutput {
        trajectories: Vec::new(),
        records: Vec::new(),
        failures: Vec::new(),
        events: EventCounts::default(),
    };
    for (particle_id, r) in results.into_iter().enumerate() {
        match r {
            Ok(trajectory) => {
                out.events += trajectory.events;
                if let Some(hit) = trajectory.hit {
                    out.records.push(DetectorRecord {
                        particle_id,
                        t_hit: hit.t,
                        transverse_hit: hit.transverse,
                    });
                }
                out.trajectories.push(ParticleTrajectory {
                    particle_id,
                    trajectory,
                });
            }
            Err(error) => out.failures.push(TrajectoryFailure { particle_id, error }),
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatsOptions {
    pub bins: usize,
    pub grid_points: usize,
    /// Polynomial order for the figure-parity fit; `None` skips it.
    pub fit_order: Option<usize>,
}

impl Default for StatsOptions {
    fn default() -> Self {
        Self {
            bins: DEFAULT_BINS,
            grid_points: DEFAULT_GRID_POINTS,
            fit_order: Some(DEFAULT_FIT_ORDER),
        }
    }
}

/// Screen statistics of an ensemble against the theoretical density.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleStats {
    pub n_hits: usize,
    pub histogram: Histogram,
    /// Sorted hit coordinates; the empirical CDF steps by 1/n at each.
    pub ecdf: Vec<f64>,
    pub ks_statistic: Option<f64>,
    pub l1_distance: Option<f64>,
    pub up_fraction: Option<f64>,
    pub fit: Option<PolynomialFit>,
    pub theory: DensityGrid,
}

impl EnsembleStats {
    pub fn compute(
        records: &[DetectorRecord],
        experiment: &Experiment,
        screen_x: f64,
        options: &StatsOptions,
    ) -> Self {
        let density = experiment.density();
        let theory = theoretical_screen_density(density, screen_x, options.grid_points);
        let t = density.arrival_time(screen_x);
        let (lo, hi) = density.spread_window(t, HISTOGRAM_SPREADS);
        let mut hits: Vec<f64> = records.iter().map(|r| r.transverse_hit).collect();
        let histogram = Histogram::from_hits(&hits, lo, hi, options.bins);
        hits.sort_by(f64::total_cmp);
        let nonempty = !hits.is_empty();
        let fit = match (options.fit_order, nonempty) {
            (Some(order), true) => fit_histogram(&histogram, order).ok(),
            _ => None,
        };
        Self {
            n_hits: hits.len(),
            ks_statistic: nonempty.then(|| ks_statistic(&hits, &theory)),
            l1_distance: nonempty.then(|| l1_distance(&histogram, &theory)),
            up_fraction: (experiment.is_spinor() && nonempty).then(|| up_fraction(records)),
            histogram,
            ecdf: hits,
            fit,
            theory,
        }
    }
}
