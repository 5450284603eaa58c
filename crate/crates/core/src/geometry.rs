//! Flat tori on the unit sphere of `R^{2L}`.
//!
//! A unit radius vector `c` with nonnegative entries picks out the torus
//! `T_c = { (c_1 e^{i u_1/c_1}, ..., c_L e^{i u_L/c_L}) }`, parametrized by
//! arc-length coordinates `u` in the hyperbox `0 <= u_i < 2 pi c_i`. The
//! tori for all such `c` partition the sphere; entries equal to zero give
//! degenerate (lower dimensional) tori whose coordinate pair is `(0, 0)`.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default absolute tolerance for geometric identities.
pub const GEOMETRY_TOL: f64 = 1e-12;

/// Unit vector with nonnegative entries selecting one torus of the foliation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct RadiusVector(Vec<f64>);

impl RadiusVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(entries, GEOMETRY_TOL)
    }

    pub fn with_tolerance(entries: Vec<f64>, tol: f64) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidRadius("empty radius vector".into()));
        }
        if let Some(i) = entries.iter().position(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidRadius(format!(
                "entry {i} = {} is negative or not finite",
                entries[i]
            )));
        }
        let norm = norm(&entries);
        if (norm - 1.0).abs() > tol {
            return Err(Error::InvalidRadius(format!("norm {norm} is not 1")));
        }
        Ok(Self(entries))
    }

    /// Scales a nonzero, nonnegative vector onto the unit sphere.
    pub fn normalized(entries: Vec<f64>) -> Result<Self> {
        let n = norm(&entries);
        if n == 0.0 || !n.is_finite() {
            return Err(Error::InvalidRadius("cannot normalize a zero vector".into()));
        }
        Self::new(entries.into_iter().map(|v| v / n).collect())
    }

    /// The radius `(cos a, sin a)` of a 4-dimensional torus layer.
    pub fn from_angle(alpha: f64) -> Self {
        let (s, c) = alpha.sin_cos();
        Self(vec![c.max(0.0), s.max(0.0)])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[f64] {
        &self.0
    }

    pub fn get(&self, i: usize) -> f64 {
        self.0[i]
    }

    /// Number of strictly positive entries.
    pub fn effective_dim(&self) -> usize {
        self.0.iter().filter(|v| **v > 0.0).count()
    }

    pub fn is_degenerate(&self) -> bool {
        self.effective_dim() < self.dim()
    }

    /// Side lengths `2 pi c_i` of the fundamental hyperbox.
    pub fn box_lengths(&self) -> Vec<f64> {
        self.0.iter().map(|c| TAU * c).collect()
    }

    /// Index of the smallest entry (first one on ties).
    pub fn min_index(&self) -> usize {
        let mut best = 0;
        for (i, v) in self.0.iter().enumerate() {
            if *v < self.0[best] {
                best = i;
            }
        }
        best
    }
}

impl TryFrom<Vec<f64>> for RadiusVector {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        // Serialized radii carry ~17 significant digits; allow a little slack.
        Self::with_tolerance(v, 1e-9)
    }
}

impl From<RadiusVector> for Vec<f64> {
    fn from(r: RadiusVector) -> Self {
        r.0
    }
}

/// Arc-length coordinates reduced into the hyperbox of a radius vector.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxPoint(Vec<f64>);

impl BoxPoint {
    /// Reduces `coords` modulo the box `[0, 2 pi c_i)`; degenerate axes map to 0.
    pub fn reduced(c: &RadiusVector, coords: &[f64]) -> Result<Self> {
        check_dim(c.dim(), coords.len())?;
        let out = coords
            .iter()
            .zip(c.entries())
            .map(|(&u, &ci)| reduce_mod(u, TAU * ci))
            .collect();
        Ok(Self(out))
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

/// Reduces `x` into `[0, period)`; a zero period maps everything to 0.
pub fn reduce_mod(x: f64, period: f64) -> f64 {
    if period <= 0.0 {
        return 0.0;
    }
    let r = x.rem_euclid(period);
    if r >= period {
        0.0
    } else {
        r
    }
}

/// Maps an angle into `[0, 2 pi)`.
pub fn wrap_angle(a: f64) -> f64 {
    reduce_mod(a, TAU)
}

/// Result of [`distortion_bounds`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistortionBounds {
    pub lower: f64,
    pub upper: f64,
    pub delta: f64,
    pub min_coord_index: usize,
}

/// Polar decomposition of a point of `R^{2L}` into per-pair radii and arc lengths.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusCoords {
    /// `gamma_i = |(x_{2i-1}, x_{2i})|`.
    pub gamma: Vec<f64>,
    /// Arc length `gamma_i * angle_i`, angle in `[0, 2 pi)`.
    pub theta: Vec<f64>,
}

impl TorusCoords {
    /// Angle of pair `i` in `[0, 2 pi)`; zero for a vanishing pair.
    pub fn angle(&self, i: usize) -> f64 {
        if self.gamma[i] > 0.0 {
            self.theta[i] / self.gamma[i]
        } else {
            0.0
        }
    }
}

fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        Err(Error::DimensionMismatch { expected, got })
    } else {
        Ok(())
    }
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// The embedding `u -> (c_i cos(u_i/c_i), c_i sin(u_i/c_i))_i`.
pub fn embed(c: &RadiusVector, u: &[f64]) -> Result<Vec<f64>> {
    check_dim(c.dim(), u.len())?;
    Ok(embed_unchecked(c.entries(), u))
}

pub(crate) fn embed_unchecked(c: &[f64], u: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * c.len());
    for (&ci, &ui) in c.iter().zip(u) {
        if ci > 0.0 {
            let (s, co) = (ui / ci).sin_cos();
            out.push(ci * co);
            out.push(ci * s);
        } else {
            out.push(0.0);
            out.push(0.0);
        }
    }
    out
}

/// Embeds a point given by per-pair angles instead of arc lengths.
pub(crate) fn embed_angles(c: &[f64], angles: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * c.len());
    for (&ci, &a) in c.iter().zip(angles) {
        let (s, co) = a.sin_cos();
        out.push(ci * co);
        out.push(ci * s);
    }
    out
}

/// Inverse of [`embed`]: the torus `x` lies on and its box coordinates.
///
/// Angles come from `atan2`, so the sign of the sine component is honoured
/// and `embed(gamma, theta) == x`. A vanishing pair gets angle 0.
pub fn unembed(x: &[f64]) -> Result<TorusCoords> {
    if !x.len().is_multiple_of(2) || x.is_empty() {
        return Err(Error::InvalidParameter(format!(
            "point dimension {} is not a positive even number",
            x.len()
        )));
    }
    let l = x.len() / 2;
    let mut gamma = Vec::with_capacity(l);
    let mut theta = Vec::with_capacity(l);
    for i in 0..l {
        let (a, b) = (x[2 * i], x[2 * i + 1]);
        let g = a.hypot(b);
        gamma.push(g);
        if g > 0.0 {
            theta.push(wrap_angle(b.atan2(a)) * g);
        } else {
            theta.push(0.0);
        }
    }
    Ok(TorusCoords { gamma, theta })
}

/// Minimum distance between the tori `T_c` and `T_b`, i.e. `|c - b|`.
pub fn inter_torus_distance(c: &RadiusVector, b: &RadiusVector) -> Result<f64> {
    check_dim(c.dim(), b.dim())?;
    Ok(distance(c.entries(), b.entries()))
}

/// Chordal distance between two points of the same torus, from box coordinates.
pub fn on_torus_distance(c: &RadiusVector, u: &[f64], v: &[f64]) -> Result<f64> {
    check_dim(c.dim(), u.len())?;
    check_dim(c.dim(), v.len())?;
    let s: f64 = c
        .entries()
        .iter()
        .zip(u.iter().zip(v))
        .filter(|(ci, _)| **ci > 0.0)
        .map(|(&ci, (&ui, &vi))| {
            let t = ((ui - vi) / (2.0 * ci)).sin();
            ci * ci * t * t
        })
        .sum();
    Ok(2.0 * s.sqrt())
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Extreme chordal lengths of a box displacement of length `delta`.
///
/// The minimum is reached along the axis of the smallest radius entry and the
/// maximum along `c` itself. The lower value stays above `2 delta / pi` while
/// `delta <= pi c_min`.
pub fn distortion_bounds(c: &RadiusVector, delta: f64) -> Result<DistortionBounds> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::InvalidParameter(format!("delta must be positive, got {delta}")));
    }
    if let Some(index) = c.entries().iter().position(|v| *v <= 0.0) {
        return Err(Error::DegenerateTorus { index });
    }
    let xi = c.min_index();
    let cx = c.get(xi);
    Ok(DistortionBounds {
        lower: sinc(delta / (2.0 * cx)) * delta,
        upper: sinc(delta / 2.0) * delta,
        delta,
        min_coord_index: xi,
    })
}

/// Displacement `u - v` with each axis wrapped into `(-pi c_i, pi c_i]`.
pub fn wrapped_difference(c: &RadiusVector, u: &[f64], v: &[f64]) -> Vec<f64> {
    c.entries()
        .iter()
        .zip(u.iter().zip(v))
        .map(|(&ci, (&a, &b))| {
            let p = TAU * ci;
            if p == 0.0 {
                return 0.0;
            }
            let mut d = (a - b).rem_euclid(p);
            if d > PI * ci {
                d -= p;
            }
            d
        })
        .collect()
}
