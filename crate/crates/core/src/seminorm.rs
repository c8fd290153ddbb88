//! Estimators for the oscillation functionals: Campanato (single and
//! symmetric double-average forms), Morrey, inside-ball BMO in cubes and in
//! anisotropic balls, rotated-chart variants and sum-space norms for
//! explicit decompositions.
//!
//! Every sup estimate is a certified lower bound: it is the max over a
//! seeded family of candidate balls, each evaluated by quadrature on its
//! exact product parametrisation. Candidates are keyed by (center index,
//! radius index) so adding candidates never changes existing per-ball
//! values, which makes the estimates monotone under refinement.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::domain::DomainDescriptor;
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::math::{holder_pow, line_fit, p_root};
use crate::metric::{AnisoBall, Isometry, MetricParams, Point};
use crate::sampling::{ball_tensor_grid, derive_rng, sample_aniso_ball, SamplerConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeminormKind {
    Campanato,
    CampanatoSymmetric,
    Morrey,
    /// Classical BMO: axis-parallel cubes contained in Ω.
    BmoClassicInside,
    /// Anisotropic balls contained in Ω.
    BmoGammaInside,
    RotatedCampanato,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// `r_power` on property-(A) domains, `measure_of_intersection` otherwise.
    Auto,
    /// Divide by `|B ∩ Ω|^lambda`.
    MeasureOfIntersection,
    /// Divide by `r^(lambda N_gamma)`.
    RPower,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct SeminormSpec {
    pub kind: SeminormKind,
    pub lambda: f64,
    pub p: f64,
    pub gamma: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotation: Option<Isometry>,
    #[serde(default = "default_normalization")]
    pub normalization: Normalization,
}

fn default_normalization() -> Normalization {
    Normalization::Auto
}

impl SeminormSpec {
    pub fn new(kind: SeminormKind, lambda: f64, p: f64, gamma: f64) -> Self {
        SeminormSpec {
            kind,
            lambda,
            p,
            gamma,
            rotation: None,
            normalization: Normalization::Auto,
        }
    }

    pub fn with_rotation(mut self, iso: Isometry) -> Self {
        self.rotation = Some(iso);
        self
    }

    pub fn with_normalization(mut self, n: Normalization) -> Self {
        self.normalization = n;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0) {
            return Err(Error::invalid("lambda must be positive"));
        }
        if !(self.p >= 1.0) {
            return Err(Error::invalid("p must be at least 1"));
        }
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(Error::invalid("gamma must lie in (0, 1]"));
        }
        if matches!(self.kind, SeminormKind::RotatedCampanato) && self.rotation.is_none() {
            return Err(Error::invalid(
                "rotated Campanato seminorm requires a rotation",
            ));
        }
        Ok(())
    }
}

/// Values of a field on a quadrature sample of `B ∩ Ω`, with the estimated
/// (or exact, for inside balls) measure of the region.
#[derive(Debug, Clone)]
pub struct BallRegion {
    pub values: Vec<f64>,
    pub measure: f64,
    pub total_nodes: usize,
}

/// Monte Carlo sample of `B ∩ Ω` via the exact product parametrisation;
/// `None` when no node lands in Ω.
pub fn sample_region_mc(
    f: &ScalarField,
    d: &DomainDescriptor,
    m: &MetricParams,
    ball: &AnisoBall,
    nodes: usize,
    seed: u64,
) -> Result<Option<BallRegion>> {
    let mut rng = derive_rng(seed, &[0xBA11]);
    let mut buf = Vec::with_capacity(m.dim());
    let mut values = Vec::new();
    for _ in 0..nodes {
        buf.clear();
        sample_aniso_ball(ball, m, &mut rng, &mut buf);
        if d.contains(&buf)? {
            values.push(f.eval(&buf)?);
        }
    }
    if values.is_empty() {
        return Ok(None);
    }
    let frac = values.len() as f64 / nodes as f64;
    Ok(Some(BallRegion {
        measure: ball.volume(m)? * frac,
        total_nodes: nodes,
        values,
    }))
}

/// Deterministic midpoint tensor-grid sample of `B ∩ Ω`.
pub fn sample_region_grid(
    f: &ScalarField,
    d: &DomainDescriptor,
    m: &MetricParams,
    ball: &AnisoBall,
    per_axis: usize,
) -> Result<Option<BallRegion>> {
    let grid = ball_tensor_grid(ball, m, per_axis);
    let n = m.dim();
    let total = grid.len() / n;
    let mut values = Vec::new();
    for p in grid.chunks(n) {
        if d.contains(p)? {
            values.push(f.eval(p)?);
        }
    }
    if values.is_empty() {
        return Ok(None);
    }
    let frac = values.len() as f64 / total as f64;
    Ok(Some(BallRegion {
        measure: ball.volume(m)? * frac,
        total_nodes: total,
        values,
    }))
}

/// p-mean oscillation of a region sample: the p-th root of the average of
/// `|f - mean f|^p`. `None` on an empty sample (skip sentinel).
pub fn mean_oscillation(values: &[f64], p: f64) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let mp = values.iter().map(|v| (v - mean).abs().powf(p)).sum::<f64>() / n;
    Some(p_root(mp, p))
}

fn normalization_factor(
    spec: &SeminormSpec,
    m: &MetricParams,
    r: f64,
    measure: f64,
    norm: Normalization,
) -> f64 {
    match norm {
        Normalization::MeasureOfIntersection => holder_pow(measure, 1.0 - spec.lambda),
        Normalization::RPower => measure / holder_pow(r, spec.lambda * m.critical_exponent()),
        Normalization::Auto => unreachable!("normalization resolved before evaluation"),
    }
}

/// Single-form per-ball value `(factor * mean |f - f_B|^p)^(1/p)` and its
/// Monte Carlo standard error (delta method).
pub fn region_campanato_value(
    region: &BallRegion,
    spec: &SeminormSpec,
    m: &MetricParams,
    r: f64,
    norm: Normalization,
) -> Option<(f64, f64)> {
    let n = region.values.len();
    if n == 0 {
        return None;
    }
    let nf = n as f64;
    let mean = region.values.iter().sum::<f64>() / nf;
    let powers: Vec<f64> = region
        .values
        .iter()
        .map(|v| (v - mean).abs().powf(spec.p))
        .collect();
    let mp = powers.iter().sum::<f64>() / nf;
    let factor = normalization_factor(spec, m, r, region.measure, norm);
    let value = p_root(factor * mp, spec.p);
    let se = if n > 1 && mp > 0.0 {
        let var = powers.iter().map(|v| (v - mp) * (v - mp)).sum::<f64>() / (nf - 1.0);
        let se_mp = (var / nf).sqrt();
        value * se_mp / (spec.p * mp)
    } else {
        0.0
    };
    Some((value, se))
}

/// Morrey per-ball value: the p-mass of `f` itself in place of oscillation.
pub fn region_morrey_value(
    region: &BallRegion,
    spec: &SeminormSpec,
    m: &MetricParams,
    r: f64,
    norm: Normalization,
) -> Option<(f64, f64)> {
    let n = region.values.len();
    if n == 0 {
        return None;
    }
    let nf = n as f64;
    let powers: Vec<f64> = region.values.iter().map(|v| v.abs().powf(spec.p)).collect();
    let mp = powers.iter().sum::<f64>() / nf;
    let factor = normalization_factor(spec, m, r, region.measure, norm);
    let value = p_root(factor * mp, spec.p);
    let se = if n > 1 && mp > 0.0 {
        let var = powers.iter().map(|v| (v - mp) * (v - mp)).sum::<f64>() / (nf - 1.0);
        value * (var / nf).sqrt() / (spec.p * mp)
    } else {
        0.0
    };
    Some((value, se))
}

/// Symmetric (double-average) per-ball value
/// `(factor * mean_{y,z} |f(y) - f(z)|^p)^(1/p)` on the same sample nodes.
/// All ordered pairs when the sample holds at most `full_pair_cap` nodes,
/// otherwise `pair_count` seeded random pairs.
#[allow(clippy::too_many_arguments)]
pub fn region_symmetric_value(
    region: &BallRegion,
    spec: &SeminormSpec,
    m: &MetricParams,
    r: f64,
    norm: Normalization,
    full_pair_cap: usize,
    pair_count: usize,
    seed: u64,
) -> Option<f64> {
    let n = region.values.len();
    if n == 0 {
        return None;
    }
    let v = &region.values;
    let pair_mean = if n <= full_pair_cap {
        let mut s = 0.0;
        for &a in v {
            for &b in v {
                s += (a - b).abs().powf(spec.p);
            }
        }
        s / (n as f64 * n as f64)
    } else {
        let mut rng = derive_rng(seed, &[0x9a12]);
        let mut s = 0.0;
        for _ in 0..pair_count {
            let a = v[rng.gen_range(0..n)];
            let b = v[rng.gen_range(0..n)];
            s += (a - b).abs().powf(spec.p);
        }
        s / pair_count as f64
    };
    let factor = normalization_factor(spec, m, r, region.measure, norm);
    Some(p_root(factor * pair_mean, spec.p))
}

/// A sup estimate with its witness and per-radius trace.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SeminormReport {
    /// Certified lower bound of the supremum.
    pub estimate: f64,
    pub witness_ball: Option<AnisoBall>,
    /// `(r, best ratio at r)` from the final refinement round.
    pub per_radius_trace: Vec<(f64, f64)>,
    pub standard_error_at_witness: f64,
    pub normalization_used: Normalization,
    /// Cumulative estimate after each refinement round.
    pub round_estimates: Vec<f64>,
    pub candidates_evaluated: usize,
}

fn resolve_normalization(
    spec: &SeminormSpec,
    d: &DomainDescriptor,
    m: &MetricParams,
) -> Normalization {
    match spec.normalization {
        Normalization::Auto => {
            if d.satisfies_property_a(m) {
                Normalization::RPower
            } else {
                Normalization::MeasureOfIntersection
            }
        }
        other => other,
    }
}

/// Is the cube `center ± half` (every axis) contained in the domain? The
/// test is the conservative one: all quadrature nodes plus the corners.
fn cube_inside(
    d: &DomainDescriptor,
    center: &[f64],
    half: f64,
    nodes: &[f64],
    dim: usize,
) -> Result<bool> {
    for p in nodes.chunks(dim) {
        if !d.contains(p)? {
            return Ok(false);
        }
    }
    let corners = 1usize << dim;
    let mut corner = vec![0.0; dim];
    for mask in 0..corners {
        for i in 0..dim {
            corner[i] = center[i] + if mask >> i & 1 == 0 { -half } else { half };
        }
        if !d.contains(&corner)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Is the anisotropic ball contained in the domain? All quadrature nodes
/// plus the 2N axis-extreme points of the product set must be members.
fn ball_inside(
    d: &DomainDescriptor,
    ball: &AnisoBall,
    m: &MetricParams,
    node_values: &[f64],
    dim: usize,
) -> Result<bool> {
    for p in node_values.chunks(dim) {
        if !d.contains(p)? {
            return Ok(false);
        }
    }
    for p in ball.axis_extremes(m) {
        if !d.contains(&p)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Sup-estimation engine shared by all kinds.
pub fn estimate_seminorm(
    f: &ScalarField,
    d: &DomainDescriptor,
    spec: &SeminormSpec,
    cfg: &SamplerConfig,
) -> Result<SeminormReport> {
    spec.validate()?;
    cfg.validate()?;

    // Rotated variant: estimate the plain Campanato seminorm of f ∘ R^-1 on
    // R(Ω), which is the chart form of the definition.
    if matches!(spec.kind, SeminormKind::RotatedCampanato) {
        let rot = spec.rotation.as_ref().expect("validated");
        let g = f.compose_isometry(rot);
        let d2 = DomainDescriptor::image(rot.clone(), d.clone());
        let inner_spec = SeminormSpec {
            kind: SeminormKind::Campanato,
            rotation: None,
            ..spec.clone()
        };
        return estimate_seminorm(&g, &d2, &inner_spec, cfg);
    }

    let m = MetricParams::new(d.dim(), spec.gamma)?;
    // Inside-ball kinds always normalise by the exact region measure.
    let norm = if matches!(
        spec.kind,
        SeminormKind::BmoClassicInside | SeminormKind::BmoGammaInside
    ) {
        Normalization::MeasureOfIntersection
    } else {
        resolve_normalization(spec, d, &m)
    };
    let diam = d.diameter(&m)?;
    let cap = cfg.radius_ladder.r_max;
    let dim = m.dim();

    let mut best = f64::NEG_INFINITY;
    let mut witness: Option<AnisoBall> = None;
    let mut witness_se = 0.0;
    let mut trace: Vec<(f64, f64)> = Vec::new();
    let mut round_estimates = Vec::new();
    let mut evaluated = 0usize;

    for round in 0..=cfg.refinement_rounds {
        let centers_total = cfg.center_count << round;
        let radii = cfg.radius_ladder.radii_capped(diam, round);
        trace = radii.iter().map(|&r| (r, f64::NEG_INFINITY)).collect();

        let mut stream_rng = derive_rng(cfg.seed, &[0x5EED]);
        let mut centers = Vec::with_capacity(centers_total);
        for i in 0..centers_total {
            if let Some(c) = d.sample_closure_point(&m, &mut stream_rng, cap, i) {
                centers.push((i, c));
            }
        }
        if centers.is_empty() {
            return Err(Error::EmptyCandidates(
                "no candidate centers sampled".into(),
            ));
        }

        for (ci, c) in &centers {
            for (rj, &r) in radii.iter().enumerate() {
                let seed = cfg.seed ^ pair_tag(*ci as u64, rj as u64);
                let ball = AnisoBall::new(c.clone(), r)?;
                evaluated += 1;

                let computed: Option<(f64, f64)> = match spec.kind {
                    SeminormKind::BmoClassicInside => {
                        // Axis-parallel cube of half-side r, uniform nodes.
                        let mut rng = derive_rng(seed, &[0xCBE]);
                        let nodes = cfg.quadrature_nodes_per_ball;
                        let mut flat = Vec::with_capacity(nodes * dim);
                        for _ in 0..nodes {
                            for i in 0..dim {
                                flat.push(c[i] + rng.gen_range(-1.0f64..1.0) * r);
                            }
                        }
                        if !cube_inside(d, c, r, &flat, dim)? {
                            None
                        } else {
                            let mut values = Vec::with_capacity(nodes);
                            for p in flat.chunks(dim) {
                                values.push(f.eval(p)?);
                            }
                            let measure = (2.0 * r).powi(dim as i32);
                            let region = BallRegion {
                                values,
                                measure,
                                total_nodes: nodes,
                            };
                            // Exact cube volume in the denominator.
                            region_campanato_value(&region, spec, &m, r, norm)
                        }
                    }
                    SeminormKind::BmoGammaInside => {
                        let mut rng = derive_rng(seed, &[0xBB1]);
                        let nodes = cfg.quadrature_nodes_per_ball;
                        let mut flat = Vec::with_capacity(nodes * dim);
                        let mut buf = Vec::with_capacity(dim);
                        for _ in 0..nodes {
                            buf.clear();
                            sample_aniso_ball(&ball, &m, &mut rng, &mut buf);
                            flat.extend_from_slice(&buf);
                        }
                        if !ball_inside(d, &ball, &m, &flat, dim)? {
                            None
                        } else {
                            let mut values = Vec::with_capacity(nodes);
                            for p in flat.chunks(dim) {
                                values.push(f.eval(p)?);
                            }
                            let region = BallRegion {
                                values,
                                measure: ball.volume(&m)?,
                                total_nodes: nodes,
                            };
                            region_campanato_value(&region, spec, &m, r, norm)
                        }
                    }
                    SeminormKind::Morrey => {
                        sample_region_mc(f, d, &m, &ball, cfg.quadrature_nodes_per_ball, seed)?
                            .and_then(|reg| region_morrey_value(&reg, spec, &m, r, norm))
                    }
                    SeminormKind::Campanato => {
                        sample_region_mc(f, d, &m, &ball, cfg.quadrature_nodes_per_ball, seed)?
                            .and_then(|reg| region_campanato_value(&reg, spec, &m, r, norm))
                    }
                    SeminormKind::CampanatoSymmetric => {
                        sample_region_mc(f, d, &m, &ball, cfg.quadrature_nodes_per_ball, seed)?
                            .and_then(|reg| {
                                region_symmetric_value(
                                    &reg,
                                    spec,
                                    &m,
                                    r,
                                    norm,
                                    512,
                                    cfg.pair_sample_count,
                                    seed,
                                )
                                .map(|v| (v, 0.0))
                            })
                    }
                    SeminormKind::RotatedCampanato => unreachable!("handled above"),
                };

                if let Some((value, se)) = computed {
                    if value > trace[rj].1 {
                        trace[rj].1 = value;
                    }
                    if value > best {
                        best = value;
                        witness = Some(ball);
                        witness_se = se;
                    }
                }
            }
        }
        if best.is_finite() {
            round_estimates.push(best);
        }
    }

    if witness.is_none() {
        return Err(Error::EmptyCandidates(format!(
            "no admissible balls for kind {:?} after {evaluated} candidates",
            spec.kind
        )));
    }
    trace.retain(|&(_, v)| v.is_finite());
    Ok(SeminormReport {
        estimate: best,
        witness_ball: witness,
        per_radius_trace: trace,
        standard_error_at_witness: witness_se,
        normalization_used: norm,
        round_estimates,
        candidates_evaluated: evaluated,
    })
}

/// The symmetric double-average form, sharing candidate balls and node
/// samples with [`estimate_seminorm`] for the same configuration.
pub fn estimate_symmetric_seminorm(
    f: &ScalarField,
    d: &DomainDescriptor,
    spec: &SeminormSpec,
    cfg: &SamplerConfig,
) -> Result<SeminormReport> {
    let sym_spec = SeminormSpec {
        kind: SeminormKind::CampanatoSymmetric,
        ..spec.clone()
    };
    estimate_seminorm(f, d, &sym_spec, cfg)
}

fn pair_tag(a: u64, b: u64) -> u64 {
    let mut z = a
        .wrapping_mul(0xd6e8_feb8_6659_fd93)
        .wrapping_add(b.wrapping_mul(0xca5a_8263_9512_1157));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z ^ (z >> 31)
}

/// `L^p(Ω)` norm estimate by Monte Carlo over the bounding box of a bounded
/// domain.
pub fn lp_norm(f: &ScalarField, d: &DomainDescriptor, p: f64, cfg: &SamplerConfig) -> Result<f64> {
    let bbox = d
        .bounding_box()
        .ok_or_else(|| Error::invalid("L^p norm estimation requires a bounded domain"))?;
    let vol: f64 = bbox.iter().map(|&(lo, hi)| hi - lo).product();
    let nodes = (cfg.quadrature_nodes_per_ball * 16).clamp(4096, 200_000);
    let mut rng = derive_rng(cfg.seed, &[0x1b]);
    let mut sum = 0.0;
    let mut point = vec![0.0; bbox.len()];
    for _ in 0..nodes {
        for (v, &(lo, hi)) in point.iter_mut().zip(&bbox) {
            *v = rng.gen_range(lo..hi);
        }
        if d.contains(&point)? {
            sum += f.eval(&point)?.abs().powf(p);
        }
    }
    Ok(p_root(vol * sum / nodes as f64, p))
}

/// Sum-space norm of an explicit decomposition: the sum over terms of
/// `L^p` norm plus rotated seminorm. An upper bound for the true infimum
/// over all decompositions, which is never searched.
pub fn sum_space_norm(
    decomposition: &[(ScalarField, Isometry)],
    d: &DomainDescriptor,
    spec: &SeminormSpec,
    cfg: &SamplerConfig,
) -> Result<f64> {
    if decomposition.is_empty() {
        return Err(Error::invalid(
            "sum-space norm needs a nonempty decomposition",
        ));
    }
    let mut total = 0.0;
    for (f_k, r_k) in decomposition {
        let lp = lp_norm(f_k, d, spec.p, cfg)?;
        let rotated_spec = SeminormSpec {
            kind: SeminormKind::RotatedCampanato,
            rotation: Some(r_k.clone()),
            ..spec.clone()
        };
        let semi = estimate_seminorm(f_k, d, &rotated_spec, cfg)?;
        total += lp + semi.estimate;
    }
    Ok(total)
}

/// Least-squares slope of `log ratio` against `log r` for a per-radius
/// trace, with the fit quality.
pub fn fit_divergence_rate(trace: &[(f64, f64)]) -> Result<(f64, f64)> {
    let pts: Vec<(f64, f64)> = trace
        .iter()
        .filter(|&&(r, v)| r > 0.0 && v > 0.0)
        .map(|&(r, v)| (r.ln(), v.ln()))
        .collect();
    if pts.len() < 5 {
        return Err(Error::invalid(format!(
            "divergence-rate fit needs at least 5 positive trace points, got {}",
            pts.len()
        )));
    }
    let (slope, _, r2) = line_fit(&pts)?;
    Ok((slope, r2))
}

/// Convenience: per-ball single-form value on a deterministic grid sample.
pub fn per_ball_grid_value(
    f: &ScalarField,
    d: &DomainDescriptor,
    spec: &SeminormSpec,
    ball: &AnisoBall,
    per_axis: usize,
) -> Result<Option<(f64, BallRegion)>> {
    let m = MetricParams::new(d.dim(), spec.gamma)?;
    let norm = resolve_normalization(spec, d, &m);
    Ok(sample_region_grid(f, d, &m, ball, per_axis)?.map(|reg| {
        let v = region_campanato_value(&reg, spec, &m, ball.radius, norm)
            .map(|(v, _)| v)
            .unwrap_or(0.0);
        (v, reg)
    }))
}

pub fn witness_center(report: &SeminormReport) -> Option<&Point> {
    report.witness_ball.as_ref().map(|b| &b.center)
}
