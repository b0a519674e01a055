use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::models::{DoubleSlitModel, SternGerlachModel};

/// y0 from the two-slit mixture: slit a or b with probability 1/2, then
/// Normal(±d, σ0²).
pub fn sample_initial_double_slit<R: Rng + ?Sized>(rng: &mut R, model: &DoubleSlitModel) -> f64 {
    let center = if rng.random::<bool>() {
        model.d
    } else {
        -model.d
    };
    let g: f64 = StandardNormal.sample(rng);
    center + model.sigma0 * g
}

/// z0 ~ Normal(0, σ0²). A zero width returns 0.
pub fn sample_initial_gaussian<R: Rng + ?Sized>(rng: &mut R, sigma0: f64) -> f64 {
    let g: f64 = StandardNormal.sample(rng);
    sigma0 * g
}

/// z0 from |Ψ(z, 0)|² at the field exit: the up packet at +Δ_z with weight
/// cos²(θ0/2), the down packet at -Δ_z otherwise.
pub fn sample_initial_stern_gerlach<R: Rng + ?Sized>(
    rng: &mut R,
    model: &SternGerlachModel,
) -> f64 {
    let up = rng.random::<f64>() < model.up_weight();
    let offset = model.derived().delta_z;
    let center = if up { offset } else { -offset };
    center + sample_initial_gaussian(rng, model.sigma0)
}
