//! Screen statistics against the theoretical |Ψ|² density.

use serde::{Deserialize, Serialize};

use crate::models::TransverseDensity;

/// Default number of points in the theoretical density grid.
pub const DEFAULT_GRID_POINTS: usize = 2048;
/// Grid half-width in packet spreads beyond the packet offsets.
pub const GRID_SPREADS: f64 = 12.0;
/// Histogram half-width in packet spreads beyond the packet offsets.
pub const HISTOGRAM_SPREADS: f64 = 10.0;
pub const DEFAULT_BINS: usize = 64;

/// A density sampled on a uniform grid, normalised so that Σρ·Δy = 1.
///
/// Between grid points the density is taken piecewise linear; the CDF is the
/// trapezoid integral, rescaled to end at exactly 1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityGrid {
    pub lo: f64,
    pub dy: f64,
    pub density: Vec<f64>,
    #[serde(skip)]
    cdf: Vec<f64>,
}

impl DensityGrid {
    /// Build from raw non-negative samples at `lo + i·dy`.
    pub fn from_samples(lo: f64, dy: f64, raw: Vec<f64>) -> Self {
        assert!(raw.len() >= 2, "density grid needs at least two points");
        let sum: f64 = raw.iter().sum::<f64>() * dy;
        let density: Vec<f64> = raw.iter().map(|r| r / sum).collect();
        let mut cdf = Vec::with_capacity(density.len());
        let mut acc = 0.0;
        cdf.push(0.0);
        for w in density.windows(2) {
            acc += 0.5 * (w[0] + w[1]) * dy;
            cdf.push(acc);
        }
        let total = acc;
        for c in &mut cdf {
            *c /= total;
        }
        Self {
            lo,
            dy,
            density,
            cdf,
        }
    }

    pub fn len(&self) -> usize {
        self.density.len()
    }

    pub fn is_empty(&self) -> bool {
        self.density.is_empty()
    }

    pub fn hi(&self) -> f64 {
        self.lo + (self.len() - 1) as f64 * self.dy
    }

    pub fn point(&self, i: usize) -> f64 {
        self.lo + i as f64 * self.dy
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|i| self.point(i))
    }

    /// Theoretical CDF at `y`, exact for the piecewise-linear density.
    pub fn cdf_at(&self, y: f64) -> f64 {
        let cdf = &self.cdf;
        if y <= self.lo {
            return 0.0;
        }
        if y >= self.hi() {
            return 1.0;
        }
        let u = (y - self.lo) / self.dy;
        let i = (u.floor() as usize).min(self.len() - 2);
        let f = u - i as f64;
        // exact integral of the linear segment from its left end
        let (a, b) = (self.density[i], self.density[i + 1]);
        let partial = (a * f + 0.5 * (b - a) * f * f) * self.dy;
        let seg = 0.5 * (a + b) * self.dy;
        let total_scale = if seg > 0.0 {
            (cdf[i + 1] - cdf[i]) / seg
        } else {
            0.0
        };
        (cdf[i] + partial * total_scale).clamp(0.0, 1.0)
    }

    /// Inverse of [`cdf_at`](Self::cdf_at) for `u` in [0, 1].
    pub fn inverse_cdf(&self, u: f64) -> f64 {
        let cdf = &self.cdf;
        let u = u.clamp(0.0, 1.0);
        let i = match cdf.binary_search_by(|c| c.partial_cmp(&u).expect("finite cdf")) {
            Ok(i) => return self.point(i),
            Err(i) => i.clamp(1, self.len() - 1) - 1,
        };
        let (a, b) = (self.density[i], self.density[i + 1]);
        let seg = cdf[i + 1] - cdf[i];
        if seg <= 0.0 {
            return self.point(i);
        }
        // target fraction of this segment's mass; solve a f + (b-a) f²/2 = r(a+b)/2
        let r = (u - cdf[i]) / seg;
        let target = r * 0.5 * (a + b);
        let f = if (b - a).abs() < 1e-14 * (a + b) {
            r
        } else {
            let disc = (a * a + 2.0 * (b - a) * target).max(0.0);
            (disc.sqrt() - a) / (b - a)
        };
        self.point(i) + f.clamp(0.0, 1.0) * self.dy
    }

    /// Probability mass in `[a, b]`.
    pub fn mass_between(&self, a: f64, b: f64) -> f64 {
        self.cdf_at(b) - self.cdf_at(a)
    }
}

/// |Ψ(screen_x, y, T)|² on a uniform grid of `points` nodes, with
/// T = the arrival time at `screen_x`.
pub fn theoretical_screen_density<M: TransverseDensity + ?Sized>(
    model: &M,
    screen_x: f64,
    points: usize,
) -> DensityGrid {
    let t = model.arrival_time(screen_x);
    let (lo, hi) = model.spread_window(t, GRID_SPREADS);
    let dy = (hi - lo) / (points - 1) as f64;
    let raw = (0..points)
        .map(|i| model.transverse_density(lo + i as f64 * dy, t))
        .collect();
    DensityGrid::from_samples(lo, dy, raw)
}

/// Uniform-bin histogram. Hits outside `[lo, hi]` are counted in the edge
/// bins, so the counts always sum to the number of hits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

impl Histogram {
    pub fn from_hits(hits: &[f64], lo: f64, hi: f64, bins: usize) -> Self {
        assert!(bins >= 1 && hi > lo);
        let width = (hi - lo) / bins as f64;
        let edges = (0..=bins).map(|i| lo + i as f64 * width).collect();
        let mut counts = vec![0u64; bins];
        for &h in hits {
            let idx = ((h - lo) / width).floor();
            let idx = if idx.is_nan() {
                0
            } else {
                (idx.max(0.0) as usize).min(bins - 1)
            };
            counts[idx] += 1;
        }
        Self { edges, counts }
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn bin_width(&self) -> f64 {
        self.edges[1] - self.edges[0]
    }

    pub fn centers(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }

    /// Counts turned into a probability density (unit mass).
    pub fn density(&self) -> Vec<f64> {
        let norm = self.total() as f64 * self.bin_width();
        self.counts
            .iter()
            .map(|&c| if norm > 0.0 { c as f64 / norm } else { 0.0 })
            .collect()
    }

    /// Theoretical probability per bin, with the tails folded into the edge
    /// bins the same way out-of-range hits are.
    pub fn theoretical_masses(&self, grid: &DensityGrid) -> Vec<f64> {
        let n = self.bins();
        (0..n)
            .map(|i| {
                let a = if i == 0 {
                    f64::NEG_INFINITY
                } else {
                    self.edges[i]
                };
                let b = if i == n - 1 {
                    f64::INFINITY
                } else {
                    self.edges[i + 1]
                };
                grid.mass_between(a, b)
            })
            .collect()
    }
}

/// Kolmogorov-Smirnov distance between the hits' empirical CDF and the grid CDF.
pub fn ks_statistic(hits: &[f64], grid: &DensityGrid) -> f64 {
    assert!(!hits.is_empty(), "ks_statistic needs at least one hit");
    let mut sorted = hits.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &y)| {
            let f = grid.cdf_at(y);
            ((i + 1) as f64 / n - f).max(f - i as f64 / n)
        })
        .fold(0.0, f64::max)
}

/// Σ|p_emp − p_theory| over the histogram bins, both normalised to unit mass.
pub fn l1_distance(histogram: &Histogram, grid: &DensityGrid) -> f64 {
    let total = histogram.total() as f64;
    histogram
        .counts
        .iter()
        .zip(histogram.theoretical_masses(grid))
        .map(|(&c, p)| (c as f64 / total - p).abs())
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::seeding::particle_rng;
    use rand::Rng;

    fn gaussian_grid(sigma: f64, points: usize) -> DensityGrid {
        let lo = -12.0 * sigma;
        let dy = 24.0 * sigma / (points - 1) as f64;
        let raw = (0..points)
            .map(|i| (-(lo + i as f64 * dy).powi(2) / (2.0 * sigma * sigma)).exp())
            .collect();
        DensityGrid::from_samples(lo, dy, raw)
    }

    #[test]
    fn grid_is_normalised_and_cdf_monotone() {
        let g = gaussian_grid(1.0, 2048);
        let mass: f64 = g.density.iter().sum::<f64>() * g.dy;
        assert!((mass - 1.0).abs() < 1e-12);
        assert!((g.cdf_at(0.0) - 0.5).abs() < 1e-9);
        assert!((g.cdf_at(1.0) - 0.841_344_746).abs() < 1e-5);
        let mut prev = 0.0;
        for i in 0..1000 {
            let c = g.cdf_at(-13.0 + i as f64 * 0.026);
            assert!(c >= prev);
            prev = c;
        }
    }

    #[test]
    fn inverse_cdf_round_trips() {
        let g = gaussian_grid(2.0, 513);
        for i in 1..100 {
            let u = i as f64 / 100.0;
            let y = g.inverse_cdf(u);
            assert!((g.cdf_at(y) - u).abs() < 1e-10, "u={u} y={y}");
        }
    }

    #[test]
    fn single_hit_at_median() {
        let g = gaussian_grid(1.0, 2048);
        assert!((ks_statistic(&[g.inverse_cdf(0.5)], &g) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn ks_of_inverse_transform_sample_is_within_null_bound() {
        let g = gaussian_grid(1.0, 2048);
        let mut rng = particle_rng(5, 0);
        let n = 10_000;
        let hits: Vec<f64> = (0..n).map(|_| g.inverse_cdf(rng.random())).collect();
        let ks = ks_statistic(&hits, &g);
        assert!(ks <= 1.63 / (n as f64).sqrt(), "ks {ks}");
    }

    #[test]
    fn ks_shrinks_when_hits_are_grid_quantiles() {
        let g = gaussian_grid(1.0, 2048);
        for &n in &[100usize, 10_000] {
            let hits: Vec<f64> = (0..n)
                .map(|i| g.inverse_cdf((i as f64 + 0.5) / n as f64))
                .collect();
            let ks = ks_statistic(&hits, &g);
            assert!(ks <= 0.5 / n as f64 + 1e-9, "n={n} ks={ks}");
        }
    }

    #[test]
    fn l1_identical_and_disjoint() {
        // uniform density on [0, 1] against a uniform histogram
        let g = DensityGrid::from_samples(0.0, 1.0 / 64.0, vec![1.0; 65]);
        let hits: Vec<f64> = (0..6400).map(|i| (i as f64 + 0.5) / 6400.0).collect();
        let h = Histogram::from_hits(&hits, 0.0, 1.0, 64);
        assert!(l1_distance(&h, &g) < 1e-12);

        let far = Histogram::from_hits(&[5.5; 10], 5.0, 6.0, 4);
        let g2 = DensityGrid::from_samples(-1.0, 0.01, vec![1.0; 101]);
        assert!((l1_distance(&far, &g2) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn l1_with_exact_samples_is_noise_limited() {
        let g = gaussian_grid(1.0, 2048);
        let mut rng = particle_rng(6, 0);
        let hits: Vec<f64> = (0..2000).map(|_| g.inverse_cdf(rng.random())).collect();
        let h = Histogram::from_hits(&hits, -10.0, 10.0, 64);
        let l1 = l1_distance(&h, &g);
        assert!(l1 <= 0.15, "l1 {l1}");
    }

    #[test]
    fn histogram_conserves_mass() {
        let hits = [-100.0, -1.0, 0.0, 0.999, 1.0, 1e9, f64::NAN];
        let h = Histogram::from_hits(&hits, -1.0, 1.0, 8);
        assert_eq!(h.total(), hits.len() as u64);
        assert_eq!(h.counts[0], 3);
        assert_eq!(h.counts[7], 3);
    }
}
