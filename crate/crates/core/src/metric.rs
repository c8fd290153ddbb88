//! The anisotropic metric `delta_gamma(x, y) = max(|xbar - ybar|^gamma, |x_N - y_N|)`,
//! its balls, volumes, diameters and isometry pullbacks.
//!
//! Points of `R^N` are split as `x = (xbar, x_N)` with `xbar` the first
//! `N - 1` coordinates. Balls have the product structure
//! `{ |ybar - xbar| < r^(1/gamma) } x { |y_N - x_N| < r }` and Lebesgue
//! measure `2 * omega_{N-1} * r^(N_gamma)` with `N_gamma = (N-1)/gamma + 1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{holder_pow, unit_ball_volume};

/// Dimension and snowflake exponent; the geometry of every computation.
///
/// `N = 1` is allowed as a degenerate case (empty first block, so the metric
/// collapses to `|x - y|` and balls are intervals of length `2r`): the
/// half-line fixture and the classical log example live there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricParams {
    dimension: usize,
    gamma: f64,
}

impl MetricParams {
    pub fn new(dimension: usize, gamma: f64) -> Result<Self> {
        if dimension < 1 {
            return Err(Error::invalid("dimension must be at least 1"));
        }
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::invalid(format!(
                "gamma must lie in (0, 1], got {gamma}"
            )));
        }
        Ok(MetricParams { dimension, gamma })
    }

    pub fn dim(&self) -> usize {
        self.dimension
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// The volume-growth exponent `N_gamma = (N - 1)/gamma + 1`.
    pub fn critical_exponent(&self) -> f64 {
        (self.dimension as f64 - 1.0) / self.gamma + 1.0
    }

    /// Measure of the Euclidean unit ball in the first block `R^(N-1)`.
    pub fn omega(&self) -> f64 {
        unit_ball_volume(self.dimension - 1)
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                got: x.len(),
            });
        }
        Ok(())
    }
}

/// A point of `R^N`, semantically split as `(xbar, x_N)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(pub Vec<f64>);

impl Point {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn first_block(&self) -> &[f64] {
        &self.0[..self.0.len() - 1]
    }

    pub fn last(&self) -> f64 {
        self.0[self.0.len() - 1]
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Point(v)
    }
}

/// Euclidean norm of the first-block difference of two points.
fn first_block_gap(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    let mut s = 0.0;
    for i in 0..n - 1 {
        let d = x[i] - y[i];
        s += d * d;
    }
    s.sqrt()
}

/// The anisotropic distance `max(|xbar - ybar|^gamma, |x_N - y_N|)`.
pub fn dist(x: &[f64], y: &[f64], m: &MetricParams) -> Result<f64> {
    m.check_dim(x)?;
    m.check_dim(y)?;
    let gap = first_block_gap(x, y);
    let vert = (x[x.len() - 1] - y[y.len() - 1]).abs();
    Ok(holder_pow(gap, m.gamma()).max(vert))
}

/// Distance seen in the chart of an isometry: `dist(R(x), R(y))`.
pub fn pullback_dist(x: &[f64], y: &[f64], iso: &Isometry, m: &MetricParams) -> Result<f64> {
    dist(&iso.apply(x)?, &iso.apply(y)?, m)
}

/// Lebesgue measure of an anisotropic ball of radius `r`:
/// `2 * omega_{N-1} * r^(N_gamma)`.
pub fn ball_volume(r: f64, m: &MetricParams) -> Result<f64> {
    if r <= 0.0 {
        return Err(Error::invalid(format!(
            "ball radius must be positive, got {r}"
        )));
    }
    Ok(2.0 * m.omega() * holder_pow(r, m.critical_exponent()))
}

/// An open anisotropic ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AnisoBall {
    pub center: Point,
    pub radius: f64,
}

impl AnisoBall {
    pub fn new(center: impl Into<Point>, radius: f64) -> Result<Self> {
        if radius <= 0.0 {
            return Err(Error::invalid(format!(
                "ball radius must be positive, got {radius}"
            )));
        }
        Ok(AnisoBall {
            center: center.into(),
            radius,
        })
    }

    /// Membership via the product structure: `|ybar - xbar| < r^(1/gamma)`
    /// and `|y_N - x_N| < r`.
    pub fn contains(&self, y: &[f64], m: &MetricParams) -> Result<bool> {
        m.check_dim(self.center.coords())?;
        m.check_dim(y)?;
        let c = self.center.coords();
        let gap = first_block_gap(c, y);
        let vert = (c[c.len() - 1] - y[y.len() - 1]).abs();
        Ok(gap < self.horizontal_radius(m) && vert < self.radius)
    }

    /// Radius of the first-block Euclidean factor, `r^(1/gamma)`.
    pub fn horizontal_radius(&self, m: &MetricParams) -> f64 {
        holder_pow(self.radius, 1.0 / m.gamma())
    }

    pub fn volume(&self, m: &MetricParams) -> Result<f64> {
        ball_volume(self.radius, m)
    }

    /// The `2N` axis-extreme points of the product set, used by the
    /// conservative inside-domain test for BMO-style ball admission.
    pub fn axis_extremes(&self, m: &MetricParams) -> Vec<Vec<f64>> {
        let c = self.center.coords();
        let n = c.len();
        let hr = self.horizontal_radius(m);
        let mut out = Vec::with_capacity(2 * n);
        for i in 0..n {
            let step = if i + 1 == n { self.radius } else { hr };
            for sign in [-1.0, 1.0] {
                let mut p = c.to_vec();
                p[i] += sign * step;
                out.push(p);
            }
        }
        out
    }
}

/// Diameter of a finite point set: exact max over pairs.
pub fn finite_set_diameter(points: &[Vec<f64>], m: &MetricParams) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::invalid("diameter of an empty set"));
    }
    let mut best = 0.0f64;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            best = best.max(dist(&points[i], &points[j], m)?);
        }
    }
    Ok(best)
}

/// A rigid motion `x -> Qx + t` with `Q` orthogonal, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Isometry {
    /// Row-major `n x n` orthogonal matrix.
    pub matrix: Vec<f64>,
    pub translation: Vec<f64>,
}

impl Isometry {
    pub fn new(matrix: Vec<f64>, translation: Vec<f64>) -> Result<Self> {
        let n = translation.len();
        if matrix.len() != n * n {
            return Err(Error::invalid(format!(
                "isometry matrix must be {n}x{n}, got {} entries",
                matrix.len()
            )));
        }
        let iso = Isometry {
            matrix,
            translation,
        };
        // Q Q^T = I within 1e-12.
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for k in 0..n {
                    s += iso.matrix[i * n + k] * iso.matrix[j * n + k];
                }
                let expect = if i == j { 1.0 } else { 0.0 };
                if (s - expect).abs() > 1e-12 {
                    return Err(Error::invalid(format!(
                        "isometry linear part is not orthogonal: (QQ^T)[{i}][{j}] = {s}"
                    )));
                }
            }
        }
        Ok(iso)
    }

    pub fn identity(n: usize) -> Self {
        let mut matrix = vec![0.0; n * n];
        for i in 0..n {
            matrix[i * n + i] = 1.0;
        }
        Isometry {
            matrix,
            translation: vec![0.0; n],
        }
    }

    /// Planar rotation by `theta` (N = 2).
    pub fn rotation_2d(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Isometry {
            matrix: vec![c, -s, s, c],
            translation: vec![0.0, 0.0],
        }
    }

    /// Rotation by `theta` about `pivot` (N = 2).
    pub fn rotation_2d_about(theta: f64, pivot: &[f64]) -> Self {
        let (s, c) = theta.sin_cos();
        let tx = pivot[0] - c * pivot[0] + s * pivot[1];
        let ty = pivot[1] - s * pivot[0] - c * pivot[1];
        Isometry {
            matrix: vec![c, -s, s, c],
            translation: vec![tx, ty],
        }
    }

    pub fn translation_of(t: Vec<f64>) -> Self {
        let mut iso = Isometry::identity(t.len());
        iso.translation = t;
        iso
    }

    pub fn dim(&self) -> usize {
        self.translation.len()
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        let n = self.dim();
        if x.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: x.len(),
            });
        }
        let mut out = self.translation.clone();
        for i in 0..n {
            let row = &self.matrix[i * n..(i + 1) * n];
            let mut s = 0.0;
            for k in 0..n {
                s += row[k] * x[k];
            }
            out[i] += s;
        }
        Ok(out)
    }

    /// Apply the inverse motion `x -> Q^T (x - t)` without materialising it.
    pub fn apply_inverse(&self, x: &[f64]) -> Result<Vec<f64>> {
        let n = self.dim();
        if x.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: x.len(),
            });
        }
        let mut out = vec![0.0; n];
        for i in 0..n {
            let mut s = 0.0;
            for k in 0..n {
                s += self.matrix[k * n + i] * (x[k] - self.translation[k]);
            }
            out[i] = s;
        }
        Ok(out)
    }

    /// Inverse motion `x -> Q^T (x - t)`.
    pub fn inverse(&self) -> Isometry {
        let n = self.dim();
        let mut matrix = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                matrix[i * n + j] = self.matrix[j * n + i];
            }
        }
        let mut translation = vec![0.0; n];
        for i in 0..n {
            let mut s = 0.0;
            for k in 0..n {
                s += matrix[i * n + k] * self.translation[k];
            }
            translation[i] = -s;
        }
        Isometry {
            matrix,
            translation,
        }
    }

    /// Composition `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &Isometry) -> Isometry {
        let n = self.dim();
        let mut matrix = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for k in 0..n {
                    s += self.matrix[i * n + k] * other.matrix[k * n + j];
                }
                matrix[i * n + j] = s;
            }
        }
        let mut translation = self.translation.clone();
        for i in 0..n {
            let mut s = 0.0;
            for k in 0..n {
                s += self.matrix[i * n + k] * other.translation[k];
            }
            translation[i] += s;
        }
        Isometry {
            matrix,
            translation,
        }
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                let expect = if i == j { 1.0 } else { 0.0 };
                if (self.matrix[i * n + j] - expect).abs() > tol {
                    return false;
                }
            }
        }
        self.translation.iter().all(|t| t.abs() <= tol)
    }
}
