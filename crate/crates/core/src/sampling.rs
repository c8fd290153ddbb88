//! Seeded sampling plumbing: the reproducibility contract, radius ladders,
//! uniform sampling of anisotropic balls via their product structure, and
//! deterministic tensor quadrature grids.
//!
//! All randomness flows from a single `u64` seed. Sub-streams are derived by
//! mixing the seed with fixed tags so that per-ball results do not depend on
//! evaluation order or on how many other candidates exist.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::holder_pow;
use crate::metric::{AnisoBall, MetricParams};

/// Geometric radius ladder `r_j = r_max * factor^j`, `j = 0..count`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct RadiusLadder {
    pub r_max: f64,
    pub factor: f64,
    pub count: usize,
}

impl RadiusLadder {
    pub fn validate(&self) -> Result<()> {
        if !(self.r_max > 0.0 && self.r_max.is_finite()) {
            return Err(Error::invalid(
                "radius ladder r_max must be positive and finite",
            ));
        }
        if !(self.factor > 0.0 && self.factor < 1.0) {
            return Err(Error::invalid("radius ladder factor must lie in (0, 1)"));
        }
        if self.count == 0 {
            return Err(Error::invalid("radius ladder count must be positive"));
        }
        Ok(())
    }

    /// The ladder radii, largest first. `extra` appends finer rungs; an
    /// infinite or larger-than-`r_max` domain diameter leaves the configured
    /// cap in charge.
    pub fn radii_capped(&self, domain_diameter: f64, extra: usize) -> Vec<f64> {
        let top = if domain_diameter.is_finite() {
            self.r_max.min(domain_diameter)
        } else {
            self.r_max
        };
        (0..self.count + extra)
            .map(|j| top * self.factor.powi(j as i32))
            .collect()
    }

    pub fn radii(&self) -> Vec<f64> {
        self.radii_capped(f64::INFINITY, 0)
    }
}

impl Default for RadiusLadder {
    fn default() -> Self {
        RadiusLadder {
            r_max: 1.0,
            factor: 0.5,
            count: 12,
        }
    }
}

/// Seeds, center counts, radius ladder and quadrature budgets: the
/// reproducibility contract of every estimator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields, default)]
pub struct SamplerConfig {
    pub seed: u64,
    pub center_count: usize,
    pub radius_ladder: RadiusLadder,
    pub quadrature_nodes_per_ball: usize,
    pub pair_sample_count: usize,
    pub refinement_rounds: usize,
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.center_count == 0 {
            return Err(Error::invalid("centerCount must be positive"));
        }
        if self.quadrature_nodes_per_ball == 0 {
            return Err(Error::invalid("quadratureNodesPerBall must be positive"));
        }
        if self.pair_sample_count == 0 {
            return Err(Error::invalid("pairSampleCount must be positive"));
        }
        self.radius_ladder.validate()
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            seed: 42,
            center_count: 48,
            radius_ladder: RadiusLadder::default(),
            quadrature_nodes_per_ball: 1024,
            pair_sample_count: 2048,
            refinement_rounds: 1,
        }
    }
}

/// splitmix64 finaliser, used to mix seeds with stream tags.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Deterministic sub-stream derivation: the same `(seed, tags)` always yields
/// the same generator, independent of any other stream.
pub fn derive_rng(seed: u64, tags: &[u64]) -> ChaCha8Rng {
    let mut state = mix(seed ^ 0xa076_1d64_78bd_642f);
    for &t in tags {
        state = mix(state ^ t.wrapping_mul(0xe703_7ed1_a0b4_28db));
    }
    ChaCha8Rng::seed_from_u64(state)
}

/// Uniform point of the Euclidean unit ball in `R^k` (Gaussian direction plus
/// radial inverse CDF); `k = 0` produces nothing.
pub fn sample_unit_ball(k: usize, rng: &mut ChaCha8Rng, out: &mut Vec<f64>) {
    if k == 0 {
        return;
    }
    // Box-Muller pairs for the direction.
    let mut norm2 = 0.0;
    let start = out.len();
    let mut i = 0;
    while i < k {
        let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
        let u2: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let r = (-2.0 * u1.ln()).sqrt();
        let g1 = r * u2.cos();
        out.push(g1);
        norm2 += g1 * g1;
        i += 1;
        if i < k {
            let g2 = r * u2.sin();
            out.push(g2);
            norm2 += g2 * g2;
            i += 1;
        }
    }
    let norm = norm2.sqrt().max(f64::MIN_POSITIVE);
    let radial: f64 = rng.gen_range(0.0f64..1.0);
    let scale = radial.powf(1.0 / k as f64) / norm;
    for v in &mut out[start..] {
        *v *= scale;
    }
}

/// Uniform sample of `B_gamma(center, r)` using the exact product
/// parametrisation: Euclidean `(N-1)`-ball of radius `r^(1/gamma)` times the
/// interval `(c_N - r, c_N + r)`. Points are appended flat to `out`.
pub fn sample_aniso_ball(
    ball: &AnisoBall,
    m: &MetricParams,
    rng: &mut ChaCha8Rng,
    out: &mut Vec<f64>,
) {
    let n = m.dim();
    let c = ball.center.coords();
    let hr = holder_pow(ball.radius, 1.0 / m.gamma());
    let start = out.len();
    sample_unit_ball(n - 1, rng, out);
    for (i, v) in out[start..].iter_mut().enumerate() {
        *v = c[i] + *v * hr;
    }
    let last = c[n - 1] + rng.gen_range(-1.0f64..1.0) * ball.radius;
    out.push(last);
}

/// Midpoint tensor grid over a box, returned as a flat point buffer.
/// `per_axis` nodes per axis; the full grid has `per_axis^dim` points.
pub fn tensor_grid(bounds: &[(f64, f64)], per_axis: usize) -> Vec<f64> {
    let dim = bounds.len();
    let total = per_axis.pow(dim as u32);
    let mut out = Vec::with_capacity(total * dim);
    let mut idx = vec![0usize; dim];
    for _ in 0..total {
        for (d, &(lo, hi)) in bounds.iter().enumerate() {
            let t = (idx[d] as f64 + 0.5) / per_axis as f64;
            out.push(lo + t * (hi - lo));
        }
        for d in (0..dim).rev() {
            idx[d] += 1;
            if idx[d] < per_axis {
                break;
            }
            idx[d] = 0;
        }
    }
    out
}

/// Deterministic midpoint nodes of the product box of an anisotropic ball.
pub fn ball_tensor_grid(ball: &AnisoBall, m: &MetricParams, per_axis: usize) -> Vec<f64> {
    let n = m.dim();
    let c = ball.center.coords();
    let hr = ball.horizontal_radius(m);
    let mut bounds = Vec::with_capacity(n);
    for i in 0..n - 1 {
        bounds.push((c[i] - hr, c[i] + hr));
    }
    bounds.push((c[n - 1] - ball.radius, c[n - 1] + ball.radius));
    let raw = tensor_grid(&bounds, per_axis);
    if n <= 2 {
        // In dimension <= 2 the product box is the ball itself.
        return raw;
    }
    // Keep only nodes inside the first-block Euclidean ball.
    let mut out = Vec::with_capacity(raw.len());
    for p in raw.chunks(n) {
        let mut s = 0.0;
        for i in 0..n - 1 {
            let d = p[i] - c[i];
            s += d * d;
        }
        if s.sqrt() < hr {
            out.extend_from_slice(p);
        }
    }
    out
}
