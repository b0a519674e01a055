//! Browser bindings: three operations returning JSON strings for a canvas page.
//!
//! The plain Rust functions are what the bindings call; they are also the
//! native test surface.

use entraj_core::dynamics::{MotionClass, StepperConfig};
use entraj_core::ensemble::{
    run_ensemble, EnsembleConfig, EnsembleStats, Experiment, StatsOptions,
};
use entraj_core::spin::spin_field_map;
use entraj_core::{DoubleSlitModel, SternGerlachModel};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Upper bounds that keep a browser tab responsive.
pub const MAX_PARTICLES: usize = 5000;
pub const MAX_GRID: usize = 400;
/// Trajectories returned for drawing, and points kept per trajectory.
const DRAWN_TRAJECTORIES: usize = 60;
const DRAWN_POINTS: usize = 200;

#[derive(Debug, Serialize, PartialEq)]
pub struct Path2 {
    pub x: Vec<f64>,
    pub transverse: Vec<f64>,
}

#[derive(Debug, Serialize, PartialEq)]
pub struct EnsembleView {
    pub hits: Vec<f64>,
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    /// Theoretical screen density sampled at `theory_y`.
    pub theory_y: Vec<f64>,
    pub theory_density: Vec<f64>,
    pub ks: Option<f64>,
    pub l1: Option<f64>,
    pub up_fraction: Option<f64>,
    pub expected_up_fraction: Option<f64>,
    pub failures: usize,
    pub screen_x: f64,
    pub paths: Vec<Path2>,
}

#[derive(Debug, Serialize, PartialEq)]
pub struct SpinFieldView {
    pub z: Vec<f64>,
    pub t: Vec<f64>,
    pub x: Vec<f64>,
    /// Row-major `[t][z]`; `None` where the density vanishes.
    pub tilt: Vec<Option<f64>>,
    pub theta: Vec<Option<f64>>,
}

fn check(particles: usize, eta: f64) -> Result<(), String> {
    if particles == 0 || particles > MAX_PARTICLES {
        return Err(format!("particles must be in 1..={MAX_PARTICLES}"));
    }
    if !(eta.is_finite() && eta >= 0.0) {
        return Err("eta must be finite and >= 0".into());
    }
    Ok(())
}

fn ensemble_view(mut cfg: EnsembleConfig) -> Result<EnsembleView, String> {
    let t = cfg.experiment.screen_time(cfg.screen_x);
    let steps = (t / cfg.stepper.dt).ceil() as usize;
    cfg.stepper.store_stride = Some((steps / DRAWN_POINTS).max(1));
    cfg.stored_particles = Some(DRAWN_TRAJECTORIES);
    let out = run_ensemble(&cfg).map_err(|e| e.to_string())?;
    let options = StatsOptions {
        fit_order: None,
        ..StatsOptions::default()
    };
    let stats = EnsembleStats::compute(&out.records, &cfg.experiment, cfg.screen_x, &options);
    let stride = (stats.theory.len() / 512).max(1);
    let theory_y: Vec<f64> = stats.theory.points().step_by(stride).collect();
    let theory_density: Vec<f64> = stats
        .theory
        .density
        .iter()
        .step_by(stride)
        .copied()
        .collect();
    let paths = out
        .trajectories
        .iter()
        .filter(|p| p.particle_id < DRAWN_TRAJECTORIES)
        .map(|p| Path2 {
            x: p.trajectory.states.iter().map(|s| s.position.x).collect(),
            transverse: p.trajectory.states.iter().map(|s| s.position.y).collect(),
        })
        .collect();
    let expected_up_fraction = match &cfg.experiment {
        Experiment::SternGerlach(m) => Some(m.up_weight()),
        _ => None,
    };
    Ok(EnsembleView {
        hits: out.hits(),
        edges: stats.histogram.edges,
        counts: stats.histogram.counts,
        theory_y,
        theory_density,
        ks: stats.ks_statistic,
        l1: stats.l1_distance,
        up_fraction: stats.up_fraction,
        expected_up_fraction,
        failures: out.failures.len(),
        screen_x: cfg.screen_x,
        paths,
    })
}

/// Electron double slit with the default geometry, screen at 0.2 m.
pub fn double_slit(
    particles: usize,
    eta: f64,
    osmotic: bool,
    seed: u64,
) -> Result<EnsembleView, String> {
    check(particles, eta)?;
    let mut stepper = StepperConfig::new(1e-11);
    stepper.osmotic = osmotic;
    let motion = MotionClass::new(0, eta).map_err(|e| e.to_string())?;
    let experiment = Experiment::DoubleSlit(DoubleSlitModel::reference_defaults());
    ensemble_view(EnsembleConfig::new(
        particles, seed, experiment, motion, stepper, 0.2,
    ))
}

/// Silver atoms after the default magnet, screen at 0.5 m.
pub fn stern_gerlach(
    particles: usize,
    theta0: f64,
    eta: f64,
    seed: u64,
) -> Result<EnsembleView, String> {
    check(particles, eta)?;
    let model = SternGerlachModel::reference_defaults(theta0).map_err(|e| e.to_string())?;
    let mut stepper = StepperConfig::new(1e-7);
    stepper.osmotic = eta > 0.0;
    let motion = MotionClass::new(0, eta).map_err(|e| e.to_string())?;
    ensemble_view(EnsembleConfig::new(
        particles,
        seed,
        Experiment::SternGerlach(model),
        motion,
        stepper,
        0.5,
    ))
}

/// Spin frame from field exit to the 0.5 m screen on an `nz × nt` grid.
pub fn spin_field(theta0: f64, nz: usize, nt: usize) -> Result<SpinFieldView, String> {
    if !(2..=MAX_GRID).contains(&nz) || !(2..=MAX_GRID).contains(&nt) {
        return Err(format!("grid sizes must be in 2..={MAX_GRID}"));
    }
    let model = SternGerlachModel::reference_defaults(theta0).map_err(|e| e.to_string())?;
    let t_screen = 0.5 / model.vx;
    let half = model.up_center(t_screen) + 4.0 * model.sigma0;
    let lin = |lo: f64, hi: f64, n: usize| -> Vec<f64> {
        (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect()
    };
    let z = lin(-half, half, nz);
    let t = lin(0.0, t_screen, nt);
    let map = spin_field_map(&model, &z, &t);
    Ok(SpinFieldView {
        x: t.iter().map(|t| model.vx * t).collect(),
        tilt: map.iter().map(|e| e.frame.map(|f| f.tilt)).collect(),
        theta: map.iter().map(|e| e.frame.map(|f| f.theta)).collect(),
        z,
        t,
    })
}

fn to_js<T: Serialize>(r: Result<T, String>) -> Result<String, JsValue> {
    r.and_then(|v| serde_json::to_string(&v).map_err(|e| e.to_string()))
        .map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = doubleSlit)]
pub fn double_slit_js(
    particles: u32,
    eta: f64,
    osmotic: bool,
    seed: u32,
) -> Result<String, JsValue> {
    to_js(double_slit(
        particles as usize,
        eta,
        osmotic,
        u64::from(seed),
    ))
}

#[wasm_bindgen(js_name = sternGerlach)]
pub fn stern_gerlach_js(
    particles: u32,
    theta0: f64,
    eta: f64,
    seed: u32,
) -> Result<String, JsValue> {
    to_js(stern_gerlach(
        particles as usize,
        theta0,
        eta,
        u64::from(seed),
    ))
}

#[wasm_bindgen(js_name = spinField)]
pub fn spin_field_js(theta0: f64, nz: u32, nt: u32) -> Result<String, JsValue> {
    to_js(spin_field(theta0, nz as usize, nt as usize))
}
