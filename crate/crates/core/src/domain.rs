//! Domain descriptions: analytic fixtures, elementary Hölder subgraphs,
//! atlas domains, membership and intersection measures, and the uniform
//! lower bound `|B_gamma(x,r) ∩ Ω| >= c r^(N_gamma)` (property (A)).

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::holder_pow;
use crate::metric::{dist, AnisoBall, Isometry, MetricParams, Point};
use crate::sampling::{derive_rng, sample_aniso_ball, sample_unit_ball, SamplerConfig};

/// Catalog of boundary functions `R^(N-1) -> R`. Named entries keep domains
/// serialisable from configuration files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum BoundaryFn {
    /// `phi = value` (the only choice in dimension N = 1, where xbar is empty).
    Constant { value: f64 },
    /// `phi(xbar) = coeff * |xbar|^exponent`.
    PowerCusp { coeff: f64, exponent: f64 },
    /// `phi(xbar) = slope . xbar + intercept`.
    Linear { slope: Vec<f64>, intercept: f64 },
    /// Upper circular arc `phi(xbar) = sqrt(radius^2 - |xbar|^2)`.
    CircleArc { radius: f64 },
}

impl BoundaryFn {
    pub fn eval(&self, xbar: &[f64]) -> f64 {
        match self {
            BoundaryFn::Constant { value } => *value,
            BoundaryFn::PowerCusp { coeff, exponent } => {
                let norm = xbar.iter().map(|v| v * v).sum::<f64>().sqrt();
                coeff * holder_pow(norm, *exponent)
            }
            BoundaryFn::Linear { slope, intercept } => {
                intercept + slope.iter().zip(xbar).map(|(s, x)| s * x).sum::<f64>()
            }
            BoundaryFn::CircleArc { radius } => {
                let norm2 = xbar.iter().map(|v| v * v).sum::<f64>();
                (radius * radius - norm2).max(0.0).sqrt()
            }
        }
    }
}

/// Subgraph `{ x_N < phi(xbar) }` of a `gamma`-Hölder function, optionally
/// restricted to a window `W` in the first block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ElementaryDomain {
    pub dimension: usize,
    pub gamma: f64,
    pub phi: BoundaryFn,
    /// Declared Hölder constant `Lip_gamma phi`.
    pub holder_m: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<Vec<(f64, f64)>>,
}

impl ElementaryDomain {
    pub fn new(dimension: usize, gamma: f64, phi: BoundaryFn, holder_m: f64) -> Result<Self> {
        if dimension < 1 {
            return Err(Error::invalid("elementary domain dimension must be >= 1"));
        }
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::invalid("elementary domain gamma must lie in (0, 1]"));
        }
        if holder_m < 0.0 {
            return Err(Error::invalid("Hölder constant must be nonnegative"));
        }
        Ok(ElementaryDomain {
            dimension,
            gamma,
            phi,
            holder_m,
            window: None,
        })
    }

    pub fn with_window(mut self, window: Vec<(f64, f64)>) -> Self {
        self.window = Some(window);
        self
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        let n = self.dimension;
        let xbar = &x[..n - 1];
        if let Some(w) = &self.window {
            for (v, &(lo, hi)) in xbar.iter().zip(w) {
                if !(*v > lo && *v < hi) {
                    return false;
                }
            }
        }
        x[n - 1] < self.phi.eval(xbar)
    }
}

/// The cusp `C_gamma(x, M) = { y : y_N < x_N - M |ybar - xbar|^gamma }`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Cusp {
    pub vertex: Point,
    pub opening: f64,
    pub gamma: f64,
}

impl Cusp {
    pub fn contains(&self, y: &[f64]) -> bool {
        let n = self.vertex.dim();
        let mut s = 0.0;
        for i in 0..n - 1 {
            let d = y[i] - self.vertex.coords()[i];
            s += d * d;
        }
        y[n - 1] < self.vertex.last() - self.opening * holder_pow(s.sqrt(), self.gamma)
    }
}

/// Shape of a single atlas patch in its chart coordinates.
// NB: `flatten` below is incompatible with `deny_unknown_fields`, so the
// patch structs are lenient; the top-level config stays strict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    tag = "kind",
    rename_all = "snake_case",
    rename_all_fields = "camelCase"
)]
pub enum PatchKind {
    /// The whole cuboid lies inside the domain.
    Full,
    /// `R_k(Ω ∩ V_k) = { xbar in W_k, a_N < x_N < phi(xbar) }`.
    Boundary { phi: BoundaryFn, holder_m: f64 },
}

/// One cuboid of an atlas: `R(V) = Π ]a_i, b_i[` in chart coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AtlasPatch {
    pub isometry: Isometry,
    /// Chart-coordinate intervals of `R(V)`.
    pub intervals: Vec<(f64, f64)>,
    #[serde(flatten)]
    pub kind: PatchKind,
}

impl AtlasPatch {
    pub fn dim(&self) -> usize {
        self.intervals.len()
    }

    /// Chart point of a world point.
    pub fn to_chart(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.isometry.apply(x)
    }

    /// World point of a chart point.
    pub fn to_world(&self, y: &[f64]) -> Result<Vec<f64>> {
        self.isometry.apply_inverse(y)
    }

    /// Is the chart point inside the (open) chart box shrunk by `margin`?
    pub fn chart_box_contains(&self, y: &[f64], margin: f64) -> bool {
        self.intervals
            .iter()
            .zip(y)
            .all(|(&(lo, hi), &v)| v > lo + margin && v < hi - margin)
    }

    /// Membership of a chart point in the patch region.
    pub fn region_contains_chart(&self, y: &[f64]) -> bool {
        if !self.chart_box_contains(y, 0.0) {
            return false;
        }
        match &self.kind {
            PatchKind::Full => true,
            PatchKind::Boundary { phi, .. } => {
                let n = self.dim();
                y[n - 1] < phi.eval(&y[..n - 1])
            }
        }
    }

    /// Chart-coordinate window `W_k` (first `N-1` intervals).
    pub fn window(&self) -> &[(f64, f64)] {
        &self.intervals[..self.intervals.len() - 1]
    }

    pub fn floor(&self) -> f64 {
        self.intervals[self.dim() - 1].0
    }

    pub fn ceiling(&self) -> f64 {
        self.intervals[self.dim() - 1].1
    }
}

/// Finite family of cuboids with isometries describing a domain patchwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Atlas {
    pub gamma: f64,
    pub delta: f64,
    pub patches: Vec<AtlasPatch>,
}

impl Atlas {
    pub fn validate_structure(&self) -> Result<()> {
        if self.patches.is_empty() {
            return Err(Error::invalid("atlas needs at least one patch"));
        }
        if !(self.delta > 0.0) {
            return Err(Error::invalid("atlas delta must be positive"));
        }
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(Error::invalid("atlas gamma must lie in (0, 1]"));
        }
        let dim = self.patches[0].dim();
        for (k, p) in self.patches.iter().enumerate() {
            if p.dim() != dim {
                return Err(Error::invalid(format!(
                    "patch {k} has mismatched dimension"
                )));
            }
            if p.isometry.dim() != dim {
                return Err(Error::invalid(format!(
                    "patch {k} isometry has wrong dimension"
                )));
            }
            for &(lo, hi) in &p.intervals {
                if !(hi > lo) {
                    return Err(Error::invalid(format!("patch {k} has an empty interval")));
                }
            }
            let (a_n, b_n) = p.intervals[dim - 1];
            if !(a_n + self.delta < b_n - self.delta) {
                return Err(Error::invalid(format!(
                    "patch {k} violates a_N + delta < b_N - delta"
                )));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.patches[0].dim()
    }

    /// World membership of the described domain: some patch contains the
    /// point in both its cuboid and its region.
    pub fn domain_contains(&self, x: &[f64]) -> Result<bool> {
        for p in &self.patches {
            let y = p.to_chart(x)?;
            if p.region_contains_chart(&y) {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Axis-aligned world bounding box of all patch cuboids.
    pub fn bounding_box(&self) -> Result<Vec<(f64, f64)>> {
        let dim = self.dim();
        let mut lo = vec![f64::INFINITY; dim];
        let mut hi = vec![f64::NEG_INFINITY; dim];
        for p in &self.patches {
            // Corners of the chart box, mapped back to world coordinates.
            let corners = 1usize << dim;
            for mask in 0..corners {
                let y: Vec<f64> = p
                    .intervals
                    .iter()
                    .enumerate()
                    .map(|(i, &(a, b))| if mask >> i & 1 == 0 { a } else { b })
                    .collect();
                let w = p.to_world(&y)?;
                for i in 0..dim {
                    lo[i] = lo[i].min(w[i]);
                    hi[i] = hi[i].max(w[i]);
                }
            }
        }
        Ok(lo.into_iter().zip(hi).collect())
    }
}

/// Tagged union of the domain classes the toolkit understands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainDescriptor {
    /// All of `R^dim`.
    FullSpace {
        dim: usize,
    },
    /// `{ x > 0 }` in `R^1`.
    HalfLine,
    /// `R x (-1, 1)` in `R^2`.
    Strip,
    /// `{ 0 < x2 < 1 - |x1|^gamma }` in `R^2`.
    CuspFixture {
        gamma: f64,
    },
    /// Open axis-aligned box.
    Cuboid {
        intervals: Vec<(f64, f64)>,
    },
    Elementary(ElementaryDomain),
    AtlasDomain(Atlas),
    /// Image of another domain under an isometry (`contains` pulls back).
    Image {
        iso: Isometry,
        inner: Box<DomainDescriptor>,
    },
}

impl DomainDescriptor {
    pub fn dim(&self) -> usize {
        match self {
            DomainDescriptor::FullSpace { dim } => *dim,
            DomainDescriptor::HalfLine => 1,
            DomainDescriptor::Strip | DomainDescriptor::CuspFixture { .. } => 2,
            DomainDescriptor::Cuboid { intervals } => intervals.len(),
            DomainDescriptor::Elementary(e) => e.dimension,
            DomainDescriptor::AtlasDomain(a) => a.dim(),
            DomainDescriptor::Image { inner, .. } => inner.dim(),
        }
    }

    pub fn image(iso: Isometry, inner: DomainDescriptor) -> DomainDescriptor {
        DomainDescriptor::Image {
            iso,
            inner: Box::new(inner),
        }
    }

    /// Exact membership, strict inequalities throughout.
    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(match self {
            DomainDescriptor::FullSpace { .. } => true,
            DomainDescriptor::HalfLine => x[0] > 0.0,
            DomainDescriptor::Strip => x[1] > -1.0 && x[1] < 1.0,
            DomainDescriptor::CuspFixture { gamma } => {
                x[1] > 0.0 && x[1] < 1.0 - holder_pow(x[0].abs(), *gamma)
            }
            DomainDescriptor::Cuboid { intervals } => intervals
                .iter()
                .zip(x)
                .all(|(&(lo, hi), &v)| v > lo && v < hi),
            DomainDescriptor::Elementary(e) => e.contains(x),
            DomainDescriptor::AtlasDomain(a) => a.domain_contains(x)?,
            DomainDescriptor::Image { iso, inner } => inner.contains(&iso.apply_inverse(x)?)?,
        })
    }

    pub fn is_bounded(&self) -> bool {
        match self {
            DomainDescriptor::FullSpace { .. }
            | DomainDescriptor::HalfLine
            | DomainDescriptor::Strip
            | DomainDescriptor::Elementary(_) => false,
            DomainDescriptor::CuspFixture { .. }
            | DomainDescriptor::Cuboid { .. }
            | DomainDescriptor::AtlasDomain(_) => true,
            DomainDescriptor::Image { inner, .. } => inner.is_bounded(),
        }
    }

    /// Axis-aligned bounding box for bounded variants.
    pub fn bounding_box(&self) -> Option<Vec<(f64, f64)>> {
        match self {
            DomainDescriptor::CuspFixture { .. } => Some(vec![(-1.0, 1.0), (0.0, 1.0)]),
            DomainDescriptor::Cuboid { intervals } => Some(intervals.clone()),
            DomainDescriptor::AtlasDomain(a) => a.bounding_box().ok(),
            DomainDescriptor::Image { iso, inner } => {
                let inner_box = inner.bounding_box()?;
                let dim = inner_box.len();
                let corners = 1usize << dim;
                let mut lo = vec![f64::INFINITY; dim];
                let mut hi = vec![f64::NEG_INFINITY; dim];
                for mask in 0..corners {
                    let y: Vec<f64> = inner_box
                        .iter()
                        .enumerate()
                        .map(|(i, &(a, b))| if mask >> i & 1 == 0 { a } else { b })
                        .collect();
                    let w = iso.apply(&y).ok()?;
                    for i in 0..dim {
                        lo[i] = lo[i].min(w[i]);
                        hi[i] = hi[i].max(w[i]);
                    }
                }
                Some(lo.into_iter().zip(hi).collect())
            }
            _ => None,
        }
    }

    /// Anisotropic diameter: closed form for analytic fixtures, `+inf` for
    /// unbounded variants, sampled lower bound otherwise.
    pub fn diameter(&self, m: &MetricParams) -> Result<f64> {
        Ok(match self {
            DomainDescriptor::FullSpace { .. }
            | DomainDescriptor::HalfLine
            | DomainDescriptor::Strip
            | DomainDescriptor::Elementary(_) => f64::INFINITY,
            DomainDescriptor::CuspFixture { .. } => holder_pow(2.0, m.gamma()).max(1.0),
            DomainDescriptor::Cuboid { intervals } => {
                let n = intervals.len();
                let mut s = 0.0;
                for &(lo, hi) in &intervals[..n - 1] {
                    let span = hi - lo;
                    s += span * span;
                }
                holder_pow(s.sqrt(), m.gamma()).max(intervals[n - 1].1 - intervals[n - 1].0)
            }
            DomainDescriptor::AtlasDomain(_) | DomainDescriptor::Image { .. } => {
                // Lower bound from boundary/corner samples.
                let mut rng = derive_rng(0xD1A0, &[self.dim() as u64]);
                let mut pts = Vec::new();
                for i in 0..192 {
                    if let Some(p) = self.sample_closure_point(m, &mut rng, 4.0, i) {
                        pts.push(p);
                    }
                }
                if pts.is_empty() {
                    return Err(Error::invalid("no samples available for diameter estimate"));
                }
                let mut best = 0.0f64;
                for i in 0..pts.len() {
                    for j in i + 1..pts.len() {
                        best = best.max(dist(&pts[i], &pts[j], m)?);
                    }
                }
                best
            }
        })
    }

    /// One interior sample; unbounded fixtures are probed inside a box of
    /// half-width `cap` (vertical scale; the first block uses `cap^(1/gamma)`).
    pub fn sample_interior_point(
        &self,
        m: &MetricParams,
        rng: &mut ChaCha8Rng,
        cap: f64,
    ) -> Option<Vec<f64>> {
        match self {
            DomainDescriptor::FullSpace { dim } => {
                Some((0..*dim).map(|_| rng.gen_range(-cap..cap)).collect())
            }
            DomainDescriptor::HalfLine => {
                Some(vec![rng.gen_range(0.0..cap).max(f64::MIN_POSITIVE)])
            }
            DomainDescriptor::Strip => {
                Some(vec![rng.gen_range(-cap..cap), rng.gen_range(-1.0..1.0)])
            }
            DomainDescriptor::Elementary(e) => {
                let n = e.dimension;
                let hcap = holder_pow(cap, 1.0 / e.gamma).max(1.0);
                let mut p = Vec::with_capacity(n);
                if let Some(w) = &e.window {
                    for &(lo, hi) in w {
                        p.push(rng.gen_range(lo..hi));
                    }
                } else {
                    for _ in 0..n - 1 {
                        p.push(rng.gen_range(-hcap..hcap));
                    }
                }
                let top = e.phi.eval(&p);
                p.push(top - rng.gen_range(f64::MIN_POSITIVE..cap));
                Some(p)
            }
            DomainDescriptor::Image { iso, inner } => {
                let p = inner.sample_interior_point(m, rng, cap)?;
                iso.apply(&p).ok()
            }
            _ => {
                let bbox = self.bounding_box()?;
                for _ in 0..4000 {
                    let p: Vec<f64> = bbox.iter().map(|&(lo, hi)| rng.gen_range(lo..hi)).collect();
                    if self.contains(&p).ok()? {
                        return Some(p);
                    }
                }
                None
            }
        }
    }

    /// One boundary sample (a point of `∂Ω`), if the variant has a boundary.
    pub fn sample_boundary_point(
        &self,
        m: &MetricParams,
        rng: &mut ChaCha8Rng,
        cap: f64,
    ) -> Option<Vec<f64>> {
        match self {
            DomainDescriptor::FullSpace { .. } => None,
            DomainDescriptor::HalfLine => Some(vec![0.0]),
            DomainDescriptor::Strip => {
                let side = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                Some(vec![rng.gen_range(-cap..cap), side])
            }
            DomainDescriptor::CuspFixture { gamma } => {
                let t = rng.gen_range(-1.0..1.0);
                if rng.gen::<bool>() {
                    Some(vec![t, 0.0])
                } else {
                    Some(vec![t, 1.0 - holder_pow(t.abs(), *gamma)])
                }
            }
            DomainDescriptor::Cuboid { intervals } => {
                let n = intervals.len();
                let axis = rng.gen_range(0..n);
                let side = rng.gen::<bool>();
                let p: Vec<f64> = intervals
                    .iter()
                    .enumerate()
                    .map(|(i, &(lo, hi))| {
                        if i == axis {
                            if side {
                                hi
                            } else {
                                lo
                            }
                        } else {
                            rng.gen_range(lo..hi)
                        }
                    })
                    .collect();
                Some(p)
            }
            DomainDescriptor::Elementary(e) => {
                let n = e.dimension;
                let hcap = holder_pow(cap, 1.0 / e.gamma).max(1.0);
                let mut p = Vec::with_capacity(n);
                if let Some(w) = &e.window {
                    for &(lo, hi) in w {
                        p.push(rng.gen_range(lo..hi));
                    }
                } else {
                    for _ in 0..n - 1 {
                        p.push(rng.gen_range(-hcap..hcap));
                    }
                }
                let top = e.phi.eval(&p);
                p.push(top);
                Some(p)
            }
            DomainDescriptor::AtlasDomain(a) => {
                let boundary: Vec<&AtlasPatch> = a
                    .patches
                    .iter()
                    .filter(|p| matches!(p.kind, PatchKind::Boundary { .. }))
                    .collect();
                if boundary.is_empty() {
                    return None;
                }
                let p = boundary[rng.gen_range(0..boundary.len())];
                let mut chart: Vec<f64> = p
                    .window()
                    .iter()
                    .map(|&(lo, hi)| rng.gen_range(lo..hi))
                    .collect();
                if let PatchKind::Boundary { phi, .. } = &p.kind {
                    chart.push(phi.eval(&chart));
                }
                p.to_world(&chart).ok()
            }
            DomainDescriptor::Image { iso, inner } => {
                let p = inner.sample_boundary_point(m, rng, cap)?;
                iso.apply(&p).ok()
            }
        }
    }

    /// Boundary-biased closure sampling: even indices draw from the boundary,
    /// odd indices from the interior, so that refinement extends the stream.
    pub fn sample_closure_point(
        &self,
        m: &MetricParams,
        rng: &mut ChaCha8Rng,
        cap: f64,
        index: usize,
    ) -> Option<Vec<f64>> {
        if index % 2 == 0 {
            self.sample_boundary_point(m, rng, cap)
                .or_else(|| self.sample_interior_point(m, rng, cap))
        } else {
            self.sample_interior_point(m, rng, cap)
        }
    }

    /// Does the uniform lower bound `|B ∩ Ω| >= c r^(N_gamma)` hold over the
    /// whole radius range for this fixture and this metric?
    pub fn satisfies_property_a(&self, m: &MetricParams) -> bool {
        match self {
            DomainDescriptor::FullSpace { .. } | DomainDescriptor::HalfLine => true,
            DomainDescriptor::Strip => false,
            DomainDescriptor::CuspFixture { gamma } => (m.gamma() - gamma).abs() < 1e-12,
            DomainDescriptor::Cuboid { .. } => true,
            DomainDescriptor::Elementary(e) => (m.gamma() - e.gamma).abs() < 1e-12,
            DomainDescriptor::AtlasDomain(a) => m.gamma() == 1.0 && (a.gamma - 1.0).abs() < 1e-12,
            DomainDescriptor::Image { inner, .. } => {
                m.gamma() == 1.0 && inner.satisfies_property_a(m)
            }
        }
    }
}

/// Monte Carlo estimate of `|B ∩ Ω|` over the exact product parametrisation
/// of the ball, with its standard error. Deterministic for a fixed seed.
pub fn intersection_measure(
    d: &DomainDescriptor,
    ball: &AnisoBall,
    m: &MetricParams,
    nodes: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if nodes == 0 {
        return Err(Error::invalid(
            "intersection measure needs a positive sample count",
        ));
    }
    let mut rng = derive_rng(seed, &[0x173]);
    let vol = ball.volume(m)?;
    let mut buf = Vec::with_capacity(m.dim());
    let mut inside = 0usize;
    for _ in 0..nodes {
        buf.clear();
        sample_aniso_ball(ball, m, &mut rng, &mut buf);
        if d.contains(&buf)? {
            inside += 1;
        }
    }
    let frac = inside as f64 / nodes as f64;
    let se = vol * (frac * (1.0 - frac) / nodes as f64).sqrt();
    Ok((vol * frac, se))
}

/// Result of a property (A) sweep.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PropertyAReport {
    /// `min over sampled (x, r) of |B(x,r) ∩ Ω| / r^(N_gamma)`.
    pub c_estimate: f64,
    pub worst_center: Point,
    pub worst_radius: f64,
    /// Per-radius minimum ratios from the final round.
    pub trace: Vec<(f64, f64)>,
    /// Cumulative estimate after each refinement round.
    pub round_estimates: Vec<f64>,
}

/// Sweep centers over the closure of the domain and radii over the capped
/// ladder, returning the smallest normalised intersection measure.
pub fn check_property_a(
    d: &DomainDescriptor,
    m: &MetricParams,
    cfg: &SamplerConfig,
) -> Result<PropertyAReport> {
    cfg.validate()?;
    let n_gamma = m.critical_exponent();
    let diam = d.diameter(m)?;
    let cap = cfg.radius_ladder.r_max;

    let mut best = f64::INFINITY;
    let mut worst_center = Point(vec![0.0; m.dim()]);
    let mut worst_radius = 0.0;
    let mut per_radius: Vec<(f64, f64)> = Vec::new();
    let mut round_estimates = Vec::new();
    let mut evaluated = 0usize;

    for round in 0..=cfg.refinement_rounds {
        let centers_total = cfg.center_count << round;
        let radii = cfg.radius_ladder.radii_capped(diam, round);
        per_radius = radii.iter().map(|&r| (r, f64::INFINITY)).collect();
        let mut centers = Vec::with_capacity(centers_total);
        let mut stream_rng = derive_rng(cfg.seed, &[0xA12]);
        for i in 0..centers_total {
            if let Some(c) = d.sample_closure_point(m, &mut stream_rng, cap, i) {
                centers.push((i, c));
            }
        }
        if centers.is_empty() {
            return Err(Error::invalid("property (A): no valid center samples"));
        }
        for (ci, c) in &centers {
            for (rj, &r) in radii.iter().enumerate() {
                let ball = AnisoBall::new(c.clone(), r)?;
                let seed = cfg.seed ^ mix_pair(*ci as u64, rj as u64);
                let (measure, _se) =
                    intersection_measure(d, &ball, m, cfg.quadrature_nodes_per_ball, seed)?;
                let ratio = measure / holder_pow(r, n_gamma);
                evaluated += 1;
                if ratio < per_radius[rj].1 {
                    per_radius[rj].1 = ratio;
                }
                if ratio < best {
                    best = ratio;
                    worst_center = Point(c.clone());
                    worst_radius = r;
                }
            }
        }
        round_estimates.push(best);
    }
    if evaluated == 0 {
        return Err(Error::invalid("property (A): no candidate balls evaluated"));
    }
    Ok(PropertyAReport {
        c_estimate: best,
        worst_center,
        worst_radius,
        trace: per_radius,
        round_estimates,
    })
}

fn mix_pair(a: u64, b: u64) -> u64 {
    let mut z = a
        .wrapping_mul(0x9e37_79b9_7f4a_7c15)
        .wrapping_add(b.wrapping_mul(0xc2b2_ae3d_27d4_eb4f));
    z = (z ^ (z >> 29)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z ^ (z >> 32)
}

/// Outcome of the cusp-inclusion check `C_gamma(x, M) ⊂ Ω` for closure points.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CuspInclusionReport {
    pub checked: usize,
    pub violations: Vec<(Point, Point)>,
}

impl CuspInclusionReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Sample vertices on and below the graph and probe cusp points for
/// membership; violations are collected, not raised.
pub fn cusp_inclusion(e: &ElementaryDomain, cfg: &SamplerConfig) -> Result<CuspInclusionReport> {
    cfg.validate()?;
    let m = MetricParams::new(e.dimension, e.gamma)?;
    let d = DomainDescriptor::Elementary(e.clone());
    let cap = cfg.radius_ladder.r_max;
    let mut rng = derive_rng(cfg.seed, &[0xC5]);
    let mut violations = Vec::new();
    let mut checked = 0usize;
    let probes_per_vertex = 16usize;
    for i in 0..cfg.center_count {
        let Some(vertex) = d.sample_closure_point(&m, &mut rng, cap, i) else {
            continue;
        };
        for _ in 0..probes_per_vertex {
            // A point of C_gamma(vertex, M): offset the first block, then
            // drop strictly below the cusp profile.
            let n = e.dimension;
            let mut y = Vec::with_capacity(n);
            let start = y.len();
            sample_unit_ball(n - 1, &mut rng, &mut y);
            let rho = rng.gen_range(0.0..cap);
            for (k, v) in y[start..].iter_mut().enumerate() {
                *v = vertex[k] + *v * rho;
            }
            let mut gap2 = 0.0;
            for k in 0..n - 1 {
                let dk = y[k] - vertex[k];
                gap2 += dk * dk;
            }
            let drop = e.holder_m * holder_pow(gap2.sqrt(), e.gamma);
            y.push(vertex[n - 1] - drop - rng.gen_range(f64::MIN_POSITIVE..cap));
            checked += 1;
            if !d.contains(&y)? {
                violations.push((Point(vertex.clone()), Point(y)));
                if violations.len() >= 16 {
                    return Ok(CuspInclusionReport {
                        checked,
                        violations,
                    });
                }
            }
        }
    }
    Ok(CuspInclusionReport {
        checked,
        violations,
    })
}

/// Lower-bound estimate of `Lip_gamma phi` on a bounded window: max ratio
/// over nested dyadic grid pairs plus a seeded random-pair stream, so the
/// estimate is monotone nondecreasing in the sample count.
pub fn holder_seminorm(
    phi: &BoundaryFn,
    window: &[(f64, f64)],
    gamma: f64,
    cfg: &SamplerConfig,
) -> Result<f64> {
    if window.is_empty() {
        // Dimension N = 1: phi is a single value, the seminorm is zero.
        return Ok(0.0);
    }
    for &(lo, hi) in window {
        if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::invalid(
                "holder seminorm requires a bounded nondegenerate window",
            ));
        }
    }
    let dim = window.len();
    let mut best = 0.0f64;
    let mut ratio = |x: &[f64], y: &[f64]| {
        let gap2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
        let gap = gap2.sqrt();
        if gap == 0.0 {
            return;
        }
        let r = (phi.eval(x) - phi.eval(y)).abs() / holder_pow(gap, gamma);
        if r > best {
            best = r;
        }
    };

    // Nested dyadic levels: adjacent pairs along each axis.
    let max_level: u32 = if dim == 1 { 12 } else { 5 };
    for level in 1..=max_level {
        let nodes = (1usize << level) + 1;
        if dim == 1 {
            let (lo, hi) = window[0];
            let h = (hi - lo) / (nodes - 1) as f64;
            for i in 0..nodes - 1 {
                let a = lo + i as f64 * h;
                ratio(&[a], &[a + h]);
            }
        } else {
            let grids: Vec<Vec<f64>> = window
                .iter()
                .map(|&(lo, hi)| {
                    (0..nodes)
                        .map(|i| lo + (hi - lo) * i as f64 / (nodes - 1) as f64)
                        .collect()
                })
                .collect();
            // Axis-adjacent pairs through every grid point.
            let mut idx = vec![0usize; dim];
            let total = nodes.pow(dim as u32);
            let mut x = vec![0.0; dim];
            let mut y = vec![0.0; dim];
            for _ in 0..total {
                for d2 in 0..dim {
                    x[d2] = grids[d2][idx[d2]];
                }
                for axis in 0..dim {
                    if idx[axis] + 1 < nodes {
                        y.copy_from_slice(&x);
                        y[axis] = grids[axis][idx[axis] + 1];
                        ratio(&x, &y);
                    }
                }
                for d2 in (0..dim).rev() {
                    idx[d2] += 1;
                    if idx[d2] < nodes {
                        break;
                    }
                    idx[d2] = 0;
                }
            }
        }
    }

    // Seeded random pairs.
    let mut rng = derive_rng(cfg.seed, &[0x407d]);
    let mut x = vec![0.0; dim];
    let mut y = vec![0.0; dim];
    for _ in 0..cfg.pair_sample_count {
        for (v, &(lo, hi)) in x.iter_mut().zip(window) {
            *v = rng.gen_range(lo..hi);
        }
        for (v, &(lo, hi)) in y.iter_mut().zip(window) {
            *v = rng.gen_range(lo..hi);
        }
        ratio(&x, &y);
    }
    Ok(best)
}

/// Per-condition outcome of the atlas validation.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct AtlasValidationReport {
    /// (i) `Ω ∩ (V_k)_delta != ∅` per patch.
    pub nonempty: Vec<ConditionCheck>,
    /// (ii) sampled points of Ω lie in some `(V_k)_delta`.
    pub cover: ConditionCheck,
    /// (iii) patch shape matches Ω inside each cuboid, with graph margins.
    pub shape: Vec<ConditionCheck>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ConditionCheck {
    pub ok: bool,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Point>,
}

impl ConditionCheck {
    fn pass(detail: impl Into<String>) -> Self {
        ConditionCheck {
            ok: true,
            detail: detail.into(),
            witness: None,
        }
    }
    fn fail(detail: impl Into<String>, witness: Option<Vec<f64>>) -> Self {
        ConditionCheck {
            ok: false,
            detail: detail.into(),
            witness: witness.map(Point),
        }
    }
}

impl AtlasValidationReport {
    pub fn passed(&self) -> bool {
        self.nonempty.iter().all(|c| c.ok) && self.cover.ok && self.shape.iter().all(|c| c.ok)
    }
}

/// Sampled verification of the atlas conditions against a concrete domain.
pub fn validate_atlas(
    atlas: &Atlas,
    omega: &DomainDescriptor,
    cfg: &SamplerConfig,
) -> Result<AtlasValidationReport> {
    atlas.validate_structure()?;
    cfg.validate()?;
    let dim = atlas.dim();
    if omega.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: omega.dim(),
        });
    }
    let m = MetricParams::new(dim, atlas.gamma)?;
    let delta = atlas.delta;
    let budget = cfg.quadrature_nodes_per_ball.max(256);

    // (i) Ω ∩ (V_k)_delta nonempty, by sampling the shrunk chart box.
    let mut nonempty = Vec::new();
    for (k, p) in atlas.patches.iter().enumerate() {
        let mut rng = derive_rng(cfg.seed, &[0xA71, k as u64]);
        let mut found = false;
        for _ in 0..budget {
            let chart: Vec<f64> = p
                .intervals
                .iter()
                .map(|&(lo, hi)| rng.gen_range(lo + delta..hi - delta))
                .collect();
            let world = p.to_world(&chart)?;
            if omega.contains(&world)? {
                found = true;
                break;
            }
        }
        nonempty.push(if found {
            ConditionCheck::pass(format!("patch {k}: found a point of Ω in (V_k)_delta"))
        } else {
            ConditionCheck::fail(
                format!("patch {k}: no sampled point of (V_k)_delta lies in Ω"),
                None,
            )
        });
    }

    // (ii) sampled Ω points covered by the union of shrunk cuboids.
    let mut rng = derive_rng(cfg.seed, &[0xA72]);
    let mut cover = ConditionCheck::pass("all sampled Ω points covered by ∪ (V_k)_delta");
    'outer: for _ in 0..budget {
        let Some(x) = omega.sample_interior_point(&m, &mut rng, cfg.radius_ladder.r_max) else {
            continue;
        };
        let mut covered = false;
        for p in &atlas.patches {
            let chart = p.to_chart(&x)?;
            if p.chart_box_contains(&chart, delta) {
                covered = true;
                break;
            }
        }
        if !covered {
            cover = ConditionCheck::fail("sampled Ω point not covered by ∪ (V_k)_delta", Some(x));
            break 'outer;
        }
    }

    // (iii) patch shape: sampled agreement of Ω ∩ V_k with the declared
    // region, plus graph margin and sampled Hölder bound for boundary
    // patches.
    let mut shape = Vec::new();
    for (k, p) in atlas.patches.iter().enumerate() {
        let mut rng = derive_rng(cfg.seed, &[0xA73, k as u64]);
        let mut check = ConditionCheck::pass(format!("patch {k}: shape consistent"));
        if let PatchKind::Boundary { phi, holder_m } = &p.kind {
            let (a_n, b_n) = p.intervals[dim - 1];
            let mut prev: Option<(Vec<f64>, f64)> = None;
            for _ in 0..budget {
                let xbar: Vec<f64> = p
                    .window()
                    .iter()
                    .map(|&(lo, hi)| rng.gen_range(lo..hi))
                    .collect();
                let v = phi.eval(&xbar);
                if !(v > a_n + delta && v < b_n - delta) {
                    let mut w = xbar.clone();
                    w.push(v);
                    check = ConditionCheck::fail(
                        format!("patch {k}: phi leaves (a_N + delta, b_N - delta), phi = {v}"),
                        Some(p.to_world(&w).ok().unwrap_or(w)),
                    );
                    break;
                }
                if let Some((pbar, pv)) = &prev {
                    let gap2: f64 = xbar.iter().zip(pbar).map(|(a, b)| (a - b) * (a - b)).sum();
                    if (v - pv).abs() > holder_m * holder_pow(gap2.sqrt(), atlas.gamma) + 1e-9 {
                        let mut w = xbar.clone();
                        w.push(v);
                        check = ConditionCheck::fail(
                            format!(
                                "patch {k}: sampled Hölder ratio exceeds declared M = {holder_m}"
                            ),
                            Some(w),
                        );
                        break;
                    }
                }
                prev = Some((xbar, v));
            }
        }
        if check.ok {
            // Region agreement: Ω ∩ V_k == declared patch region (sampled).
            for _ in 0..budget {
                let chart: Vec<f64> = p
                    .intervals
                    .iter()
                    .map(|&(lo, hi)| rng.gen_range(lo..hi))
                    .collect();
                let world = p.to_world(&chart)?;
                let in_region = p.region_contains_chart(&chart);
                let in_omega = omega.contains(&world)?;
                if in_region != in_omega {
                    check = ConditionCheck::fail(
                        format!(
                            "patch {k}: Ω ∩ V_k disagrees with declared region (region: {in_region}, Ω: {in_omega})"
                        ),
                        Some(world),
                    );
                    break;
                }
            }
        }
        shape.push(check);
    }

    Ok(AtlasValidationReport {
        nonempty,
        cover,
        shape,
    })
}

/// Sampled anisotropic distance between two point clouds (an estimate of the
/// separation `inf dist(a, b)`).
pub fn sampled_set_distance(a: &[Vec<f64>], b: &[Vec<f64>], m: &MetricParams) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::invalid("set distance of an empty sample"));
    }
    let mut best = f64::INFINITY;
    for x in a {
        for y in b {
            best = best.min(dist(x, y, m)?);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::ball_volume;

    fn cfg() -> SamplerConfig {
        SamplerConfig::default()
    }

    #[test]
    fn strip_membership() {
        let d = DomainDescriptor::Strip;
        assert!(d.contains(&[1e6, 0.0]).unwrap());
        assert!(!d.contains(&[0.0, 1.0]).unwrap());
    }

    #[test]
    fn cusp_fixture_membership() {
        let d = DomainDescriptor::CuspFixture { gamma: 0.5 };
        assert!(d.contains(&[0.0, 0.5]).unwrap());
        // 1 - |1|^(1/2) = 0, so (1, 0.5) is outside.
        assert!(!d.contains(&[1.0, 0.5]).unwrap());
    }

    #[test]
    fn elementary_membership_flat_graph() {
        let e = ElementaryDomain::new(2, 1.0, BoundaryFn::Constant { value: 0.0 }, 0.0).unwrap();
        let d = DomainDescriptor::Elementary(e);
        assert!(d.contains(&[3.7, -1.0]).unwrap());
        assert!(!d.contains(&[3.7, 1.0]).unwrap());
    }

    #[test]
    fn contains_rejects_dimension_mismatch() {
        let d = DomainDescriptor::Strip;
        assert!(d.contains(&[0.0]).is_err());
    }

    #[test]
    fn diameters() {
        let m = MetricParams::new(2, 0.5).unwrap();
        assert!(DomainDescriptor::Strip.diameter(&m).unwrap().is_infinite());
        let d = DomainDescriptor::CuspFixture { gamma: 0.5 };
        let expect = holder_pow(2.0, 0.5);
        assert!((d.diameter(&m).unwrap() - expect).abs() < 1e-12);
        let m1 = MetricParams::new(2, 1.0).unwrap();
        assert!((d.diameter(&m1).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn intersection_measure_inside_outside() {
        let m = MetricParams::new(2, 1.0).unwrap();
        let big = DomainDescriptor::Cuboid {
            intervals: vec![(-10.0, 10.0), (-10.0, 10.0)],
        };
        let ball = AnisoBall::new(vec![0.0, 0.0], 1.0).unwrap();
        let (est, se) = intersection_measure(&big, &ball, &m, 4096, 1).unwrap();
        assert_eq!(se, 0.0);
        assert_eq!(est, ball_volume(1.0, &m).unwrap());

        let far = DomainDescriptor::Cuboid {
            intervals: vec![(100.0, 101.0), (100.0, 101.0)],
        };
        let (est0, _) = intersection_measure(&far, &ball, &m, 4096, 1).unwrap();
        assert_eq!(est0, 0.0);
    }

    #[test]
    fn intersection_measure_strip_quadrature_oracle() {
        // |B((0,0),2) ∩ strip| = area of (-2,2) x (-1,1) = 8, gamma = 1.
        let m = MetricParams::new(2, 1.0).unwrap();
        let d = DomainDescriptor::Strip;
        let ball = AnisoBall::new(vec![0.0, 0.0], 2.0).unwrap();
        let (est, se) = intersection_measure(&d, &ball, &m, 200_000, 42).unwrap();
        assert!(
            (est - 8.0).abs() < 0.08 + 3.0 * se,
            "estimate {est}, se {se}"
        );
        // Independent tensor-quadrature oracle over the ball's product box.
        let nodes = 512;
        let mut inside = 0usize;
        for i in 0..nodes {
            let x = -2.0 + (i as f64 + 0.5) / nodes as f64 * 4.0;
            for j in 0..nodes {
                let y = -2.0 + (j as f64 + 0.5) / nodes as f64 * 4.0;
                if d.contains(&[x, y]).unwrap() {
                    inside += 1;
                }
            }
        }
        let quad = inside as f64 / (nodes * nodes) as f64 * 16.0;
        assert!((quad - 8.0).abs() / 8.0 < 0.01);
    }

    #[test]
    fn property_a_full_space_and_cuboid() {
        let m = MetricParams::new(2, 1.0).unwrap();
        let mut c = cfg();
        c.center_count = 12;
        c.quadrature_nodes_per_ball = 2048;
        c.refinement_rounds = 0;
        c.radius_ladder.count = 6;

        let full = DomainDescriptor::FullSpace { dim: 2 };
        let rep = check_property_a(&full, &m, &c).unwrap();
        // |B ∩ R^N| = |B|, so the ratio is 2 * omega_1 = 4 exactly.
        assert!((rep.c_estimate - 4.0).abs() < 0.2);

        // Axis-aligned cuboid: the worst corner still covers a 2^-N
        // fraction of the ball, i.e. ratio >= 2^-2 * 4 = 1.
        let cub = DomainDescriptor::Cuboid {
            intervals: vec![(0.0, 1.0), (0.0, 1.0)],
        };
        let rep = check_property_a(&cub, &m, &c).unwrap();
        assert!(rep.c_estimate >= 1.0 - 0.1, "c = {}", rep.c_estimate);
        // Quadrature oracle at the corner itself, small radius: the square
        // ball of radius r has exactly a quarter inside.
        let ball = AnisoBall::new(vec![0.0, 0.0], 0.125).unwrap();
        let (est, se) = intersection_measure(&cub, &ball, &m, 50_000, 3).unwrap();
        let expect = 0.125 * 0.125;
        assert!((est - expect).abs() < 3.0 * se + 1e-4);
    }

    #[test]
    fn intersection_measure_never_exceeds_known_volumes() {
        // Estimate <= min(ball volume, domain volume) + 3 standard errors.
        let gamma = 0.5;
        let m = MetricParams::new(2, gamma).unwrap();
        let d = DomainDescriptor::CuspFixture { gamma };
        // |Ω| = ∫ (1 - |x|^(1/2)) dx over (-1,1) = 2 - 2/(γ+1)·... = 2/3.
        let domain_area = 2.0 - 2.0 / 1.5f64;
        for (i, &r) in [0.1, 0.5, 2.0, 8.0].iter().enumerate() {
            let ball = AnisoBall::new(vec![0.0, 0.3], r).unwrap();
            let (est, se) = intersection_measure(&d, &ball, &m, 20_000, 60 + i as u64).unwrap();
            let cap = ball.volume(&m).unwrap().min(domain_area);
            assert!(
                est <= cap + 3.0 * se + 1e-12,
                "r = {r}: {est} > {cap} + 3se"
            );
        }
    }

    #[test]
    fn property_a_stable_under_refinement_on_elementary_domain() {
        // Declared-M subgraph fixture: the estimate stays bounded below by a
        // positive constant across two successive refinements.
        let e = ElementaryDomain::new(
            2,
            0.5,
            BoundaryFn::PowerCusp {
                coeff: 1.0,
                exponent: 0.5,
            },
            1.0,
        )
        .unwrap();
        let d = DomainDescriptor::Elementary(e);
        let m = MetricParams::new(2, 0.5).unwrap();
        let mut c = cfg();
        c.center_count = 16;
        c.quadrature_nodes_per_ball = 2048;
        c.radius_ladder.count = 6;
        c.refinement_rounds = 1;
        let rep = check_property_a(&d, &m, &c).unwrap();
        assert!(rep.c_estimate > 0.05, "c = {}", rep.c_estimate);
        assert_eq!(rep.round_estimates.len(), 2);
        let ratio = rep.round_estimates[1] / rep.round_estimates[0];
        assert!((0.5..=1.0 + 1e-12).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn cusp_inclusion_flat_and_power_graphs() {
        let mut c = cfg();
        c.center_count = 40;
        // phi == 0: the cusp below the graph is always inside.
        let e = ElementaryDomain::new(2, 0.5, BoundaryFn::Constant { value: 0.0 }, 1.0).unwrap();
        assert!(cusp_inclusion(&e, &c).unwrap().passed());
        // phi = M |x|^gamma: inclusion follows from the triangle-type
        // inequality for Hölder powers; checked on seeded samples.
        let e2 = ElementaryDomain::new(
            2,
            0.5,
            BoundaryFn::PowerCusp {
                coeff: 1.0,
                exponent: 0.5,
            },
            1.0,
        )
        .unwrap();
        let rep = cusp_inclusion(&e2, &c).unwrap();
        assert!(rep.passed(), "violations: {:?}", rep.violations.len());
        assert!(rep.checked >= 10_000 / 16);
    }

    #[test]
    fn cusp_inclusion_adversarial_reports_witness() {
        // Declared M = 0.2 but the graph actually has Lip_gamma = 1:
        // the too-narrow cusp pokes outside, and the report says so.
        let e = ElementaryDomain::new(
            2,
            0.5,
            BoundaryFn::PowerCusp {
                coeff: -1.0,
                exponent: 0.5,
            },
            0.2,
        )
        .unwrap();
        let mut c = cfg();
        c.center_count = 60;
        let rep = cusp_inclusion(&e, &c).unwrap();
        assert!(!rep.passed());
    }

    #[test]
    fn holder_seminorm_examples() {
        let c = cfg();
        // Constant: 0.
        let v = holder_seminorm(
            &BoundaryFn::Constant { value: 3.0 },
            &[(-1.0, 1.0)],
            0.5,
            &c,
        )
        .unwrap();
        assert_eq!(v, 0.0);
        // phi(t) = |t|^(1/2), gamma = 1/2 on [-1, 1]: the supremum is 1
        // (dense-grid oracle), attained against the node at 0.
        let v = holder_seminorm(
            &BoundaryFn::PowerCusp {
                coeff: 1.0,
                exponent: 0.5,
            },
            &[(-1.0, 1.0)],
            0.5,
            &c,
        )
        .unwrap();
        assert!(v >= 1.0 - 1e-3 && v <= 1.0 + 1e-9, "estimate {v}");
        // phi(t) = t, gamma = 1 on [0, 1]: estimate -> 1.
        let v = holder_seminorm(
            &BoundaryFn::Linear {
                slope: vec![1.0],
                intercept: 0.0,
            },
            &[(0.0, 1.0)],
            1.0,
            &c,
        )
        .unwrap();
        assert!((v - 1.0).abs() < 1e-9);
        // Degenerate window is invalid input.
        assert!(
            holder_seminorm(&BoundaryFn::Constant { value: 0.0 }, &[(0.0, 0.0)], 1.0, &c).is_err()
        );
    }

    #[test]
    fn holder_seminorm_monotone_in_sample_count() {
        // Grid levels nest and the random pair stream extends, so more
        // samples can only raise the max.
        let phi = BoundaryFn::PowerCusp {
            coeff: 2.0,
            exponent: 0.7,
        };
        let mut small = cfg();
        small.pair_sample_count = 64;
        let mut big = small;
        big.pair_sample_count = 2048;
        let lo = holder_seminorm(&phi, &[(-1.0, 2.0)], 0.7, &small).unwrap();
        let hi = holder_seminorm(&phi, &[(-1.0, 2.0)], 0.7, &big).unwrap();
        assert!(hi >= lo);
    }

    #[test]
    fn cusp_region_membership() {
        let cusp = Cusp {
            vertex: Point(vec![0.0, 0.0]),
            opening: 1.0,
            gamma: 0.5,
        };
        assert!(cusp.contains(&[0.0, -0.5]));
        assert!(!cusp.contains(&[1.0, -0.5]));
    }

    #[test]
    fn image_domain_pulls_back() {
        let rot = Isometry::rotation_2d(std::f64::consts::FRAC_PI_2);
        let d = DomainDescriptor::image(
            rot.clone(),
            DomainDescriptor::Cuboid {
                intervals: vec![(0.0, 1.0), (0.0, 2.0)],
            },
        );
        // World point = rot(chart point).
        let world = rot.apply(&[0.5, 1.0]).unwrap();
        assert!(d.contains(&world).unwrap());
        assert!(!d.contains(&[10.0, 0.0]).unwrap());
    }
}
