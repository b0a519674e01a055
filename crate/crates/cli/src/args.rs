//! Command-line parsing into a [`RunManifest`].

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use entraj_core::dynamics::NoiseMode;

use crate::error::CliError;
use crate::manifest::{ModelParams, RunManifest};

#[derive(Debug, Parser)]
#[command(
    name = "entraj",
    version,
    about = "Entropic-dynamics trajectory ensembles"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Single transverse Gaussian packet.
    FreePacket(FreePacketArgs),
    /// Two Gaussian slits; defaults are electrons at 2·10⁶ m/s.
    DoubleSlit(DoubleSlitArgs),
    /// Spin-1/2 silver atoms after a Stern-Gerlach magnet.
    SternGerlach(SternGerlachArgs),
    /// Re-run a manifest.json written by an earlier run.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NoiseArg {
    UnitSphere,
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Switch {
    Off,
    On,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Number of trajectories [default: per experiment].
    #[arg(long)]
    pub particles: Option<usize>,
    /// Fluctuation strength; 0 is the Bohmian limit.
    #[arg(long, default_value_t = 0.0)]
    pub eta: f64,
    /// Motion-class exponent n.
    #[arg(long, default_value_t = 0)]
    pub n_exp: u32,
    /// Integration step, s [default: per experiment].
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Screen position along the beam, m [default: per experiment].
    #[arg(long)]
    pub screen_x: Option<f64>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long, default_value_t = 64)]
    pub bins: usize,
    #[arg(long, value_enum, default_value_t = NoiseArg::UnitSphere)]
    pub noise_mode: NoiseArg,
    /// Add the osmotic drift that balances the fluctuations.
    #[arg(long, value_enum, default_value_t = Switch::Off)]
    pub osmotic: Switch,
    /// Order of the display polynomial fit; 0 skips it.
    #[arg(long, default_value_t = 15)]
    pub fit_order: usize,
    /// Transverse velocity clamp, m/s [default: 100 × the model's velocity scale].
    #[arg(long)]
    pub vmax: Option<f64>,
    /// Worker threads [default: all cores]. Never changes outputs.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Upper bound on stored steps per trajectory.
    #[arg(long, default_value_t = 2000)]
    pub max_stored_steps: usize,
    /// Number of trajectories written to trajectories.csv.
    #[arg(long, default_value_t = 200)]
    pub stored_trajectories: usize,
    /// Particle mass, kg [default: per experiment].
    #[arg(long)]
    pub mass: Option<f64>,
    /// Initial packet width, m [default: per experiment].
    #[arg(long)]
    pub sigma0: Option<f64>,
    /// Longitudinal velocity, m/s [default: per experiment].
    #[arg(long)]
    pub vx: Option<f64>,
}

#[derive(Debug, Args)]
pub struct FreePacketArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Initial transverse centre, m.
    #[arg(long, default_value_t = 0.0)]
    pub center: f64,
}

#[derive(Debug, Args)]
pub struct DoubleSlitArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Distance of each slit from the axis, m.
    #[arg(long, default_value_t = 5e-6)]
    pub half_separation: f64,
    /// Transverse velocity of the slit packets, m/s.
    #[arg(long, default_value_t = 0.0)]
    pub vy: f64,
}

#[derive(Debug, Args)]
pub struct SternGerlachArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Initial polar angle of the spin, rad.
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2)]
    pub theta0: f64,
    /// Initial azimuth of the spin, rad.
    #[arg(long, default_value_t = 0.0)]
    pub phi0: f64,
    /// Field strength, T.
    #[arg(long, default_value_t = 5.0)]
    pub b0: f64,
    /// Field gradient, T/m.
    #[arg(long, default_value_t = 1e3)]
    pub b0_prime: f64,
    /// Time spent in the field, s.
    #[arg(long, default_value_t = 2e-5)]
    pub field_time: f64,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    /// Path to manifest.json.
    pub manifest: PathBuf,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long)]
    pub workers: Option<usize>,
}

/// A parsed invocation: what to run and where to put it.
#[derive(Debug, Clone, PartialEq)]
pub struct Invocation {
    pub manifest: RunManifest,
    pub out: PathBuf,
    pub workers: Option<usize>,
}

fn apply_common(c: &CommonArgs, model: ModelParams) -> (RunManifest, PathBuf, Option<usize>) {
    let mut m = RunManifest::with_defaults(model);
    if let Some(p) = c.particles {
        m.particles = p;
    }
    m.eta = c.eta;
    m.n_exp = c.n_exp;
    if let Some(dt) = c.dt {
        m.dt = dt;
    }
    m.seed = c.seed;
    if let Some(x) = c.screen_x {
        m.screen_x = x;
    }
    m.bins = c.bins;
    m.noise_mode = match c.noise_mode {
        NoiseArg::UnitSphere => NoiseMode::UnitSphere,
        NoiseArg::Gaussian => NoiseMode::Gaussian,
    };
    m.osmotic = c.osmotic == Switch::On;
    m.fit_order = (c.fit_order > 0).then_some(c.fit_order);
    m.vmax = c.vmax;
    m.max_stored_steps = c.max_stored_steps;
    m.stored_trajectories = c.stored_trajectories;
    (m, c.out.clone(), c.workers)
}

/// Apply the `--sigma0`, `--mass` and `--vx` overrides shared by all models.
fn override_physical(mut model: ModelParams, c: &CommonArgs) -> ModelParams {
    let (sigma0, mass, vx) = match &mut model {
        ModelParams::FreePacket {
            sigma0, mass, vx, ..
        }
        | ModelParams::DoubleSlit {
            sigma0, mass, vx, ..
        }
        | ModelParams::SternGerlach {
            sigma0, mass, vx, ..
        } => (sigma0, mass, vx),
    };
    *sigma0 = c.sigma0.unwrap_or(*sigma0);
    *mass = c.mass.unwrap_or(*mass);
    *vx = c.vx.unwrap_or(*vx);
    model
}

/// Turn parsed arguments into a validated invocation. Replays read their
/// manifest from disk.
pub fn invocation(cli: Cli) -> Result<Invocation, CliError> {
    let (mut manifest, out, workers) = match cli.command {
        Command::FreePacket(a) => {
            let mut model = ModelParams::free_packet_defaults();
            if let ModelParams::FreePacket { center, .. } = &mut model {
                *center = a.center;
            }
            apply_common(&a.common, override_physical(model, &a.common))
        }
        Command::DoubleSlit(a) => {
            let mut model = ModelParams::double_slit_defaults();
            if let ModelParams::DoubleSlit {
                half_separation,
                vy,
                ..
            } = &mut model
            {
                (*half_separation, *vy) = (a.half_separation, a.vy);
            }
            apply_common(&a.common, override_physical(model, &a.common))
        }
        Command::SternGerlach(a) => {
            let mut model = ModelParams::stern_gerlach_defaults();
            if let ModelParams::SternGerlach {
                theta0,
                phi0,
                b0,
                b0_prime,
                field_time,
                ..
            } = &mut model
            {
                (*theta0, *phi0, *b0, *b0_prime, *field_time) =
                    (a.theta0, a.phi0, a.b0, a.b0_prime, a.field_time);
            }
            apply_common(&a.common, override_physical(model, &a.common))
        }
        Command::Replay(a) => {
            let text = std::fs::read(&a.manifest).map_err(CliError::io(&a.manifest))?;
            let m: RunManifest = serde_json::from_slice(&text)
                .map_err(|e| CliError::Usage(format!("{}: {e}", a.manifest.display())))?;
            (m, a.out, a.workers)
        }
    };
    if workers == Some(0) {
        return Err(CliError::Usage("--workers must be >= 1".into()));
    }
    manifest.validate()?;
    manifest.timestamp = Some(run_timestamp());
    Ok(Invocation {
        manifest,
        out,
        workers,
    })
}

/// `SOURCE_DATE_EPOCH` if set, else the current Unix time.
pub fn run_timestamp() -> u64 {
    std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or_else(|| {
            std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0)
        })
}

/// Parse a full argument list (program name first). Help and version
/// requests come back as usage errors carrying the rendered text.
pub fn parse_cli<I, T>(args: I) -> Result<Invocation, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| CliError::Usage(e.render().to_string()))?;
    invocation(cli)
}

#[cfg(test)]
mod tests {
    use super::*;
    use entraj_core::constants::{ELECTRON_MASS, SILVER_MASS};

    fn parse(args: &[&str]) -> Result<Invocation, CliError> {
        parse_cli(std::iter::once("entraj").chain(args.iter().copied()))
    }

    #[test]
    fn double_slit_defaults() {
        let inv = parse(&["double-slit"]).unwrap();
        let m = inv.manifest;
        assert_eq!(
            m.model,
            ModelParams::DoubleSlit {
                sigma0: 1e-6,
                half_separation: 5e-6,
                mass: ELECTRON_MASS,
                vx: 2e6,
                vy: 0.0
            }
        );
        assert_eq!(
            (m.screen_x, m.dt, m.particles, m.bins),
            (0.2, 1e-11, 2000, 64)
        );
        assert!(!m.osmotic);
    }

    #[test]
    fn stern_gerlach_defaults() {
        let m = parse(&["stern-gerlach"]).unwrap().manifest;
        let ModelParams::SternGerlach {
            sigma0,
            mass,
            vx,
            b0,
            b0_prime,
            field_time,
            ..
        } = m.model
        else {
            panic!("wrong model")
        };
        assert_eq!(
            (sigma0, mass, vx, b0, b0_prime, field_time),
            (1e-4, SILVER_MASS, 500.0, 5.0, 1e3, 2e-5)
        );
    }

    #[test]
    fn eta_zero_is_bohmian_for_any_n() {
        let m = parse(&["double-slit", "--eta", "0", "--n-exp", "3"])
            .unwrap()
            .manifest;
        let motion = m.motion().unwrap();
        assert_eq!(motion.eta, 0.0);
        assert!(motion.is_deterministic());
    }

    #[test]
    fn flags_reach_the_manifest() {
        let args = [
            "double-slit",
            "--particles",
            "7",
            "--eta",
            "1.5",
            "--n-exp",
            "1",
            "--dt",
            "2e-11",
            "--seed",
            "9",
            "--screen-x",
            "0.1",
            "--bins",
            "32",
            "--noise-mode",
            "gaussian",
            "--osmotic",
            "on",
            "--fit-order",
            "0",
            "--vmax",
            "3.5",
        ];
        let m = parse(&args).unwrap().manifest;
        assert_eq!(
            (m.particles, m.eta, m.n_exp, m.dt, m.seed),
            (7, 1.5, 1, 2e-11, 9)
        );
        assert_eq!(
            (m.screen_x, m.bins, m.noise_mode, m.osmotic),
            (0.1, 32, NoiseMode::Gaussian, true)
        );
        assert_eq!((m.fit_order, m.vmax), (None, Some(3.5)));
    }

    #[test]
    fn usage_errors() {
        for args in [
            &["double-slit", "--bogus"][..],
            &["double-slit", "--sigma0", "-1e-6"],
            &["free-packet", "--mass", "-2"],
            &["stern-gerlach", "--theta0", "4"],
            &["double-slit", "--dt", "0"],
            &["double-slit", "--particles", "0"],
            &["double-slit", "--eta", "-1"],
            &["double-slit", "--workers", "0"],
        ] {
            let e = parse(args).unwrap_err();
            assert_eq!(e.exit_code(), 1, "{args:?}");
        }
    }
}
