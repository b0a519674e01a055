use rand::Rng;
use serde::{Deserialize, Serialize};

use super::field::ClampedVelocity;
use super::noise::{fluctuation_magnitude, gaussian_fluctuation, unit_fluctuation};
use super::{
    DynamicsError, EventCounts, GuidanceField, MotionClass, NoiseMode, StepperConfig,
    TrajectoryState, DEFAULT_VMAX_FACTOR,
};
use crate::geometry::Vec2;

/// Where a trajectory ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum StopCondition {
    /// First crossing of the plane at this longitudinal coordinate.
    Screen { x: f64 },
    /// Integrate up to exactly this time.
    Time { t_final: f64 },
}

/// Point where a trajectory crossed the screen, linearly interpolated
/// within the crossing step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScreenHit {
    pub t: f64,
    pub transverse: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    /// Stored (possibly decimated) states; always holds the first and last.
    pub states: Vec<TrajectoryState>,
    pub hit: Option<ScreenHit>,
    pub steps: u64,
    pub events: EventCounts,
}

impl Trajectory {
    pub fn initial(&self) -> &TrajectoryState {
        &self.states[0]
    }

    pub fn last(&self) -> &TrajectoryState {
        self.states
            .last()
            .expect("trajectory holds at least one state")
    }
}

/// Weight applied to `(ħ/m)∇ln ρ^(1/2)` when it is folded into the drift.
///
/// The kick has total variance (ħη/m)dt^(n+1) shared by two components, so the
/// diffusion constant is (ħη/4m)dt^n and the drift that keeps ρ = |ψ|²
/// stationary is D∇ln ρ, i.e. half the osmotic velocity times dt^n.
pub fn osmotic_weight(class: MotionClass, dt: f64) -> f64 {
    0.5 * class.eta * dt.powi(class.n as i32)
}

/// Stateful single-trajectory stepper.
///
/// Remembers the last valid drift so that stages landing on a node can fall
/// back to it, and accumulates clamp and node events.
pub struct Stepper<'a, F: GuidanceField + ?Sized> {
    field: &'a F,
    class: MotionClass,
    config: StepperConfig,
    v_max: f64,
    last_velocity: Option<Vec2>,
    events: EventCounts,
}

impl<'a, F: GuidanceField + ?Sized> Stepper<'a, F> {
    pub fn new(
        field: &'a F,
        class: MotionClass,
        config: StepperConfig,
    ) -> Result<Self, DynamicsError> {
        config.validate()?;
        let v_max = config
            .v_max
            .unwrap_or(DEFAULT_VMAX_FACTOR * field.velocity_scale());
        Ok(Self {
            field,
            class,
            config,
            v_max,
            last_velocity: None,
            events: EventCounts::default(),
        })
    }

    pub fn events(&self) -> EventCounts {
        self.events
    }

    pub fn v_max(&self) -> f64 {
        self.v_max
    }

    fn drift(&mut self, position: Vec2, t: f64) -> Option<Vec2> {
        let flow = self
            .field
            .local_flow(position, t, self.config.node_floor)
            .ok()?;
        let mut b = flow.drift;
        if self.config.osmotic && self.class.eta > 0.0 {
            b += flow.osmotic * osmotic_weight(self.class, self.config.dt);
        }
        let c = ClampedVelocity::clamp(b, self.v_max);
        if c.clamped {
            self.events.clamps += 1;
        }
        Some(c.velocity)
    }

    /// Classical RK4 displacement for dx/dt = b(x, t) over `h`.
    ///
    /// A stage that lands on a node reuses the most recent valid velocity
    /// (from this step or the previous one); only if all four stages fail is
    /// `NodeEncountered` returned.
    pub fn rk4_displacement(
        &mut self,
        state: &TrajectoryState,
        h: f64,
    ) -> Result<Vec2, DynamicsError> {
        let x = state.position;
        let t = state.t;
        let offsets = [0.0, 0.5 * h, 0.5 * h, h];
        let mut raw: [Option<Vec2>; 4] = [None; 4];
        let mut carry = self.last_velocity;
        for i in 0..4 {
            let probe = match (i, carry) {
                (0, _) => x,
                (_, Some(k)) => x + k * offsets[i],
                (_, None) => x,
            };
            raw[i] = self.drift(probe, t + offsets[i]);
            match raw[i] {
                Some(k) => carry = Some(k),
                None => self.events.node_stages += 1,
            }
        }
        if raw.iter().all(Option::is_none) {
            return Err(DynamicsError::NodeEncountered { position: x, t });
        }
        let first_valid = raw.iter().flatten().next().copied().unwrap_or_default();
        let mut k = [Vec2::ZERO; 4];
        let mut prev = self.last_velocity.unwrap_or(first_valid);
        for i in 0..4 {
            k[i] = raw[i].unwrap_or(prev);
            prev = k[i];
        }
        self.last_velocity = Some(k[3]);
        Ok((k[0] + k[1] * 2.0 + k[2] * 2.0 + k[3]) * (h / 6.0))
    }

    fn kick<R: Rng + ?Sized>(&self, rng: &mut R, h: f64) -> Vec2 {
        let magnitude = fluctuation_magnitude(&self.class, self.field.hbar_over_mass(), h);
        if magnitude == 0.0 {
            return Vec2::ZERO;
        }
        match self.config.noise_mode {
            NoiseMode::UnitSphere => unit_fluctuation(rng) * magnitude,
            NoiseMode::Gaussian => gaussian_fluctuation(rng, magnitude),
        }
    }

    /// Advance over `h` and stamp the new state with `t_next`.
    fn advance<R: Rng + ?Sized>(
        &mut self,
        state: &TrajectoryState,
        h: f64,
        t_next: f64,
        rng: &mut R,
    ) -> TrajectoryState {
        let drift = match self.rk4_displacement(state, h) {
            Ok(d) => d,
            Err(_) => {
                self.events.node_steps += 1;
                Vec2::ZERO
            }
        };
        let position = state.position + drift + self.kick(rng, h);
        TrajectoryState {
            position,
            t: t_next,
        }
    }

    /// One step of Δx = RK4 drift + fluctuation kick.
    pub fn step<R: Rng + ?Sized>(
        &mut self,
        state: &TrajectoryState,
        rng: &mut R,
    ) -> TrajectoryState {
        let h = self.config.dt;
        self.advance(state, h, state.t + h, rng)
    }
}

/// Drift-only RK4 displacement from `state` over `dt`.
pub fn rk4_drift_step<F: GuidanceField + ?Sized>(
    state: &TrajectoryState,
    field: &F,
    dt: f64,
) -> Result<Vec2, DynamicsError> {
    let mut config = StepperConfig::new(dt);
    config.v_max = Some(f64::INFINITY);
    let mut s = Stepper {
        field,
        class: MotionClass::bohmian(),
        config,
        v_max: f64::INFINITY,
        last_velocity: None,
        events: EventCounts::default(),
    };
    s.rk4_displacement(state, dt)
}

/// One full step of the displacement law.
pub fn step<F: GuidanceField + ?Sized, R: Rng + ?Sized>(
    state: &TrajectoryState,
    field: &F,
    class: MotionClass,
    config: &StepperConfig,
    rng: &mut R,
) -> Result<TrajectoryState, DynamicsError> {
    let mut s = Stepper::new(field, class, *config)?;
    Ok(s.step(state, rng))
}

/// Iterate the displacement law from `initial` until `stop`.
///
/// Times are computed as `t0 + k·dt` rather than accumulated, so a given
/// step index always carries the same time stamp.
pub fn integrate_trajectory<F: GuidanceField + ?Sized, R: Rng + ?Sized>(
    initial: TrajectoryState,
    field: &F,
    class: MotionClass,
    config: &StepperConfig,
    stop: StopCondition,
    rng: &mut R,
) -> Result<Trajectory, DynamicsError> {
    let mut stepper = Stepper::new(field, class, *config)?;
    match stop {
        StopCondition::Screen { x } if !(x > initial.position.x) => {
            return Err(DynamicsError::InvalidConfig(format!(
                "screen at x={x} is not ahead of the start x={}",
                initial.position.x
            )));
        }
        StopCondition::Time { t_final } if !(t_final.is_finite() && t_final >= initial.t) => {
            return Err(DynamicsError::InvalidConfig(format!(
                "t_final={t_final} precedes t0={}",
                initial.t
            )));
        }
        _ => {}
    }

    let dt = config.dt;
    let t0 = initial.t;
    let mut states = vec![initial];
    let mut state = initial;
    let mut steps: u64 = 0;
    let mut hit = None;

    loop {
        if let StopCondition::Time { t_final } = stop {
            if state.t >= t_final {
                break;
            }
        }
        if steps >= config.max_steps {
            return Err(DynamicsError::MaxStepsExceeded { steps, last: state });
        }
        let mut t_next = t0 + (steps + 1) as f64 * dt;
        if let StopCondition::Time { t_final } = stop {
            t_next = t_next.min(t_final);
        }
        let next = stepper.advance(&state, t_next - state.t, t_next, rng);
        steps += 1;

        if let StopCondition::Screen { x } = stop {
            if next.position.x >= x {
                let f = (x - state.position.x) / (next.position.x - state.position.x);
                let transverse = state.position.y + f * (next.position.y - state.position.y);
                let t_hit = state.t + f * (next.t - state.t);
                let end = TrajectoryState::new(Vec2::new(x, transverse), t_hit);
                states.push(end);
                hit = Some(ScreenHit {
                    t: t_hit,
                    transverse,
                });
                break;
            }
        }
        state = next;
        if let Some(stride) = config.store_stride {
            if steps.is_multiple_of(stride as u64) {
                states.push(state);
            }
        }
    }

    if hit.is_none() && states.last() != Some(&state) {
        states.push(state);
    }
    Ok(Trajectory {
        states,
        hit,
        steps,
        events: stepper.events(),
    })
}
