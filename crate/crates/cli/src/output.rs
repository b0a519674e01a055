//! Running a manifest and writing its output files.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use entraj_core::dynamics::{EventCounts, DEFAULT_VMAX_FACTOR};
use entraj_core::ensemble::PolynomialFit;
use entraj_core::ensemble::{
    run_ensemble, EnsembleOutput, EnsembleStats, Experiment, StatsOptions, DEFAULT_GRID_POINTS,
};
use entraj_core::spin::{spin_field_map, spin_frame_at, SpinFieldEntry};
use entraj_core::SternGerlachModel;
use serde::Serialize;

use crate::error::CliError;
use crate::format::{fmt_f64, to_json};
use crate::manifest::RunManifest;

/// Grid of the emitted spin-field map: transverse points and time slices.
pub const SPIN_MAP_Z: usize = 201;
pub const SPIN_MAP_T: usize = 51;
/// Half-width of the spin map beyond the packet centres, in σ0.
const SPIN_MAP_MARGIN: f64 = 5.0;

/// Everything a run produces before it is written out.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub manifest: RunManifest,
    pub experiment: Experiment,
    pub output: EnsembleOutput,
    pub stats: EnsembleStats,
    pub spin_map: Option<Vec<SpinFieldEntry>>,
    /// Effective transverse clamp, m/s.
    pub v_max: f64,
    pub store_stride: Option<usize>,
}

/// Integrate the ensemble described by `manifest` and compute its statistics.
pub fn simulate(manifest: &RunManifest, workers: Option<usize>) -> Result<RunResult, CliError> {
    let config = manifest.ensemble_config(workers)?;
    let output = run_ensemble(&config).map_err(|e| CliError::Runtime(e.to_string()))?;
    let options = StatsOptions {
        bins: manifest.bins,
        grid_points: DEFAULT_GRID_POINTS,
        fit_order: manifest.fit_order,
    };
    let stats = EnsembleStats::compute(
        &output.records,
        &config.experiment,
        manifest.screen_x,
        &options,
    );
    let spin_map = match &config.experiment {
        Experiment::SternGerlach(m) => Some(default_spin_map(
            m,
            config.experiment.screen_time(manifest.screen_x),
        )),
        _ => None,
    };
    let v_max = manifest
        .vmax
        .unwrap_or(DEFAULT_VMAX_FACTOR * config.experiment.field().velocity_scale());
    Ok(RunResult {
        manifest: manifest.clone(),
        experiment: config.experiment,
        output,
        stats,
        spin_map,
        v_max,
        store_stride: config.stepper.store_stride,
    })
}

/// Spin frame from field exit to the screen, over both packets.
pub fn default_spin_map(model: &SternGerlachModel, t_screen: f64) -> Vec<SpinFieldEntry> {
    let half = model.up_center(t_screen).abs() + SPIN_MAP_MARGIN * model.sigma0;
    spin_field_map(
        model,
        &linspace(-half, half, SPIN_MAP_Z),
        &linspace(0.0, t_screen, SPIN_MAP_T),
    )
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let step = (hi - lo) / (n - 1) as f64;
    (0..n).map(|i| lo + i as f64 * step).collect()
}

#[derive(Serialize)]
struct FitSummary {
    order: usize,
    condition: f64,
    ill_conditioned: bool,
}

#[derive(Serialize)]
struct FailureSummary {
    particle_id: usize,
    error: String,
}

#[derive(Serialize)]
struct Summary<'a> {
    manifest: RunManifest,
    manifest_sha256: String,
    experiment: &'static str,
    particles: usize,
    n_hits: usize,
    n_failures: usize,
    ks: Option<f64>,
    l1: Option<f64>,
    up_fraction: Option<f64>,
    expected_up_fraction: Option<f64>,
    events: EventCounts,
    dt: f64,
    screen_time: f64,
    v_max: f64,
    store_stride: Option<usize>,
    fit: Option<FitSummary>,
    failures: &'a [FailureSummary],
}

#[derive(Serialize)]
struct TheorySection<'a> {
    lo: f64,
    dy: f64,
    density: &'a [f64],
}

#[derive(Serialize)]
struct HistogramFile<'a> {
    edges: &'a [f64],
    counts: &'a [u64],
    /// Counts normalised to unit area.
    density: Vec<f64>,
    theory: TheorySection<'a>,
    fit: Option<&'a PolynomialFit>,
}

struct Out {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl Out {
    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let path = self.path(name);
        fs::write(&path, bytes).map_err(CliError::io(&path))?;
        self.written.push(path);
        Ok(())
    }

    fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let path = self.path(name);
        let bytes = to_json(value).map_err(|source| CliError::Json { path, source })?;
        self.write_bytes(name, &bytes)
    }

    fn write_csv(
        &mut self,
        name: &str,
        body: impl FnOnce(&mut BufWriter<fs::File>) -> std::io::Result<()>,
    ) -> Result<(), CliError> {
        let path = self.path(name);
        let file = fs::File::create(&path).map_err(CliError::io(&path))?;
        let mut w = BufWriter::new(file);
        body(&mut w)
            .and_then(|_| w.flush())
            .map_err(CliError::io(&path))?;
        self.written.push(path);
        Ok(())
    }
}

/// Write manifest.json, summary.json, histogram.json, screen.csv,
/// trajectories.csv and, for Stern-Gerlach runs, spinfield.csv.
pub fn write_outputs(dir: &Path, run: &RunResult) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir).map_err(CliError::io(dir))?;
    let mut out = Out {
        dir: dir.to_path_buf(),
        written: Vec::new(),
    };
    let m = &run.manifest;
    let sg = match &run.experiment {
        Experiment::SternGerlach(model) => Some(model),
        _ => None,
    };

    out.write_json("manifest.json", m)?;

    let failures: Vec<FailureSummary> = run
        .output
        .failures
        .iter()
        .map(|f| FailureSummary {
            particle_id: f.particle_id,
            error: f.error.to_string(),
        })
        .collect();
    let summary = Summary {
        manifest: m.canonical(),
        manifest_sha256: m.hash(),
        experiment: m.kind().name(),
        particles: m.particles,
        n_hits: run.stats.n_hits,
        n_failures: failures.len(),
        ks: run.stats.ks_statistic,
        l1: run.stats.l1_distance,
        up_fraction: run.stats.up_fraction,
        expected_up_fraction: sg.map(|s| s.up_weight()),
        events: run.output.events,
        dt: m.dt,
        screen_time: run.experiment.density().arrival_time(m.screen_x),
        v_max: run.v_max,
        store_stride: run.store_stride,
        fit: run.stats.fit.as_ref().map(|f| FitSummary {
            order: f.coefficients.len() - 1,
            condition: f.condition,
            ill_conditioned: f.ill_conditioned,
        }),
        failures: &failures,
    };
    out.write_json("summary.json", &summary)?;

    let h = &run.stats.histogram;
    let theory = &run.stats.theory;
    out.write_json(
        "histogram.json",
        &HistogramFile {
            edges: &h.edges,
            counts: &h.counts,
            density: h.density(),
            theory: TheorySection {
                lo: theory.lo,
                dy: theory.dy,
                density: &theory.density,
            },
            fit: run.stats.fit.as_ref(),
        },
    )?;

    out.write_csv("screen.csv", |w| {
        writeln!(w, "particle_id,t_hit,hit")?;
        for r in &run.output.records {
            writeln!(
                w,
                "{},{},{}",
                r.particle_id,
                fmt_f64(r.t_hit),
                fmt_f64(r.transverse_hit)
            )?;
        }
        Ok(())
    })?;

    out.write_csv("trajectories.csv", |w| {
        writeln!(
            w,
            "particle_id,step,t,x,transverse{}",
            if sg.is_some() { ",theta,tilt" } else { "" }
        )?;
        let stride = run.store_stride.unwrap_or(0) as u64;
        for p in run
            .output
            .trajectories
            .iter()
            .filter(|p| p.particle_id < m.stored_trajectories)
        {
            let states = &p.trajectory.states;
            for (k, s) in states.iter().enumerate() {
                let step = if k + 1 == states.len() {
                    p.trajectory.steps
                } else {
                    k as u64 * stride
                };
                write!(
                    w,
                    "{},{},{},{},{}",
                    p.particle_id,
                    step,
                    fmt_f64(s.t),
                    fmt_f64(s.position.x),
                    fmt_f64(s.position.y)
                )?;
                if let Some(model) = sg {
                    match spin_frame_at(model, s.position.y, s.t) {
                        Ok(f) => {
                            write!(w, ",{},{}", fmt_f64(f.angles.theta), fmt_f64(f.angles.tilt))?
                        }
                        Err(_) => write!(w, ",,")?,
                    }
                }
                writeln!(w)?;
            }
        }
        Ok(())
    })?;

    if let Some(map) = &run.spin_map {
        out.write_csv("spinfield.csv", |w| {
            writeln!(w, "z,t,x,theta,phi,tilt")?;
            for e in map {
                write!(w, "{},{},{}", fmt_f64(e.z), fmt_f64(e.t), fmt_f64(e.x))?;
                match e.frame {
                    Some(a) => writeln!(
                        w,
                        ",{},{},{}",
                        fmt_f64(a.theta),
                        fmt_f64(a.phi),
                        fmt_f64(a.tilt)
                    )?,
                    None => writeln!(w, ",,,")?,
                }
            }
            Ok(())
        })?;
    }
    Ok(out.written)
}
