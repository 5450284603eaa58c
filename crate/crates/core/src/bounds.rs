//! Counting bounds for torus layer codes, cap areas and code density.

use std::f64::consts::PI;
use std::io::Write;

use num_bigint::BigUint;
use num_traits::{FromPrimitive, ToPrimitive, Zero};
use serde::Serialize;

use crate::cyclic::{circle_capacity, search_family};
use crate::error::{Error, Result};
use crate::layering::{polygon2d_layers, LayerFamily};

/// Slack subtracted before flooring a bound expression.
pub const FLOOR_GUARD: f64 = 1e-12;

/// Best known lattice center densities in dimensions 1 to 24.
#[derive(Debug, Clone, PartialEq)]
pub struct CenterDensityTable {
    values: Vec<f64>,
}

impl CenterDensityTable {
    pub fn standard() -> Self {
        let r2 = 2f64.sqrt();
        let r3 = 3f64.sqrt();
        let values = vec![
            1.0 / 2.0,
            1.0 / (2.0 * r3),
            1.0 / (4.0 * r2),
            1.0 / 8.0,
            1.0 / (8.0 * r2),
            1.0 / (8.0 * r3),
            1.0 / 16.0,
            1.0 / 16.0,
            1.0 / (16.0 * r2),
            1.0 / (16.0 * r3),
            1.0 / (18.0 * r3),
            1.0 / 27.0,
            1.0 / (18.0 * r3),
            1.0 / (16.0 * r3),
            1.0 / (16.0 * r2),
            1.0 / 16.0,
            1.0 / (16.0 * r2),
            1.0 / (8.0 * r3),
            1.0 / (8.0 * r2),
            1.0 / 8.0,
            1.0 / (4.0 * r2),
            1.0 / (2.0 * r3),
            1.0 / 2.0,
            1.0,
        ];
        Self { values }
    }

    /// A custom table; entry `p - 1` holds dimension `p`.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() || values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::InvalidParameter("center densities must be positive".into()));
        }
        Ok(Self { values })
    }

    pub fn max_dim(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, p: usize) -> Result<f64> {
        if p == 0 || p > self.values.len() {
            return Err(Error::InvalidParameter(format!(
                "no center density for dimension {p} (table covers 1..={})",
                self.values.len()
            )));
        }
        Ok(self.values[p - 1])
    }
}

impl Default for CenterDensityTable {
    fn default() -> Self {
        Self::standard()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    Lower,
    Upper,
}

/// Which faces of the hyperbox the upper bound consults.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FaceRule {
    /// Lower faces only when the full-dimensional count floors to zero.
    #[default]
    ProjectOnZero,
    /// Maximum over all faces.
    MaxOverFaces,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayerBound {
    pub layer: usize,
    pub count: BigUint,
    pub face_dim: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub kind: BoundKind,
    pub d: f64,
    pub per_layer: Vec<LayerBound>,
    pub total: BigUint,
    /// Face rule of an upper bound; `None` for the grid bound.
    pub rule: Option<FaceRule>,
}

#[derive(Serialize)]
struct CsvRow<'a> {
    d: f64,
    layer_index: usize,
    face_dim: usize,
    count: &'a str,
    total: &'a str,
    kind: BoundKind,
    rule: &'a str,
}

impl FaceRule {
    pub fn name(&self) -> &'static str {
        match self {
            FaceRule::ProjectOnZero => "project-on-zero",
            FaceRule::MaxOverFaces => "max-over-faces",
        }
    }
}

impl BoundReport {
    fn new(kind: BoundKind, d: f64, per_layer: Vec<LayerBound>, rule: Option<FaceRule>) -> Self {
        let total = per_layer.iter().fold(BigUint::zero(), |a, l| a + &l.count);
        Self { kind, d, per_layer, total, rule }
    }

    /// Writes one CSV row per layer: `d,layer_index,face_dim,count,total,kind,rule`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_reports_csv(std::slice::from_ref(self), out)
    }
}

/// Several reports under one header.
pub fn write_reports_csv<W: Write>(reports: &[BoundReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in reports {
        let total = r.total.to_string();
        let rule = r.rule.map_or("grid", |f| f.name());
        for l in &r.per_layer {
            let count = l.count.to_string();
            w.serialize(CsvRow {
                d: r.d,
                layer_index: l.layer,
                face_dim: l.face_dim,
                count: &count,
                total: &total,
                kind: r.kind,
                rule,
            })
            .map_err(|e| Error::Format(e.to_string()))?;
        }
    }
    w.flush()?;
    Ok(())
}

fn check_distance(d: f64) -> Result<()> {
    if !(d > 0.0 && d <= 2f64.sqrt() * (1.0 + 1e-12)) {
        return Err(Error::InvalidParameter(format!("d = {d} outside (0, sqrt 2]")));
    }
    Ok(())
}

fn floor_big(x: f64) -> BigUint {
    let v = if x < 2f64.powi(52) { (x - FLOOR_GUARD).floor() } else { x.floor() };
    BigUint::from_f64(v.max(0.0)).unwrap_or_default()
}

/// Points of a square grid in each circle: `Π_j ⌊π / asin(d / (2 c_j))⌋`.
pub fn grid_lower_bound(layers: &LayerFamily, d: f64) -> Result<BoundReport> {
    check_distance(d)?;
    let per_layer = layers
        .radii
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let count = c
                .entries()
                .iter()
                .fold(BigUint::from(1u32), |a, &cj| a * BigUint::from(circle_capacity(cj, d)));
            LayerBound { layer: i, count, face_dim: c.dim() }
        })
        .collect();
    Ok(BoundReport::new(BoundKind::Lower, d, per_layer, None))
}

/// Packing count on the `p`-face spanned by the `p` largest radii.
fn face_count(sorted: &[f64], p: usize, d: f64, table: &CenterDensityTable) -> Result<BigUint> {
    if p == 1 {
        return Ok(BigUint::from(circle_capacity(sorted[0], d).max(1)));
    }
    let a = (d / 4.0).asin();
    let mut x = table.get(p)?;
    for &c in &sorted[..p] {
        x *= PI * c / a;
    }
    Ok(floor_big(x))
}

/// Lattice packing bound per layer, with projection onto lower faces.
pub fn upper_bound(
    layers: &LayerFamily,
    d: f64,
    table: &CenterDensityTable,
    rule: FaceRule,
) -> Result<BoundReport> {
    check_distance(d)?;
    let mut per_layer = Vec::with_capacity(layers.len());
    for (i, c) in layers.radii.iter().enumerate() {
        let mut sorted = c.entries().to_vec();
        sorted.sort_by(|a, b| b.total_cmp(a));
        let l = sorted.len();
        let bound = match rule {
            FaceRule::ProjectOnZero => {
                let mut p = l;
                loop {
                    let m = face_count(&sorted, p, d, table)?;
                    if !m.is_zero() || p == 1 {
                        break LayerBound { layer: i, count: m, face_dim: p };
                    }
                    p -= 1;
                }
            }
            FaceRule::MaxOverFaces => {
                let mut best = LayerBound { layer: i, count: BigUint::zero(), face_dim: 1 };
                for p in 1..=l {
                    let m = face_count(&sorted, p, d, table)?;
                    if m > best.count {
                        best = LayerBound { layer: i, count: m, face_dim: p };
                    }
                }
                best
            }
        };
        per_layer.push(bound);
    }
    Ok(BoundReport::new(BoundKind::Upper, d, per_layer, Some(rule)))
}

/// Surface measure of the unit sphere in `R^l`: `l π^{l/2} / Γ(l/2 + 1)`.
pub fn sphere_surface(l: usize) -> f64 {
    let lf = l as f64;
    lf * PI.powf(lf / 2.0) / libm::tgamma(lf / 2.0 + 1.0)
}

/// Volume of the unit ball in `R^l`.
pub fn ball_volume(l: usize) -> f64 {
    let lf = l as f64;
    PI.powf(lf / 2.0) / libm::tgamma(lf / 2.0 + 1.0)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    adaptive(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + adaptive(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

/// Adaptive Simpson quadrature to relative tolerance `rel`.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, rel: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = simpson(a, b, fa, fm, fb);
    // the scale estimate keeps the tolerance relative even for tiny integrals
    let scale = whole.abs().max(f64::MIN_POSITIVE);
    adaptive(f, a, b, fa, fm, fb, whole, rel * scale, 48)
}

/// Measure of a cap of half-angle `theta_half` on the unit sphere in `R^l`:
/// `S_{l-1} ∫_0^{θ/2} sin^{l-2} x dx`.
pub fn cap_area(theta_half: f64, l: usize) -> Result<f64> {
    if l < 2 {
        return Err(Error::InvalidParameter(format!("ambient dimension {l} below 2")));
    }
    if !(0.0..=PI).contains(&theta_half) {
        return Err(Error::InvalidParameter(format!("half angle {theta_half} outside [0, pi]")));
    }
    let k = (l - 2) as i32;
    let integral = if k == 0 {
        theta_half
    } else {
        integrate(&|x: f64| x.sin().powi(k), 0.0, theta_half, 1e-12)
    };
    Ok(sphere_surface(l - 1) * integral)
}

/// Fraction of the sphere in `R^l_amb` covered by `m` caps of chordal
/// diameter `d`.
pub fn code_density(m: f64, d: f64, l_amb: usize) -> Result<f64> {
    if !(m >= 1.0) {
        return Err(Error::InvalidParameter(format!("code size {m} below 1")));
    }
    if !(d > 0.0 && d <= 2.0) {
        return Err(Error::InvalidParameter(format!("d = {d} outside (0, 2]")));
    }
    let cap = cap_area((d / 2.0).asin(), l_amb)?;
    let density = cap * m / sphere_surface(l_amb);
    if density > 1.0 + 1e-9 {
        return Err(Error::DensityOverflow(density));
    }
    Ok(density)
}

pub fn code_density_big(m: &BigUint, d: f64, l_amb: usize) -> Result<f64> {
    code_density(m.to_f64().unwrap_or(f64::INFINITY), d, l_amb)
}

/// Packing density of `Λ_L × Λ_{L-1}`: `V_{2L-1} δ_L δ_{L-1}`.
pub fn product_lattice_density(l: usize, table: &CenterDensityTable) -> Result<f64> {
    if l < 2 {
        return Err(Error::InvalidParameter(format!("L = {l} below 2")));
    }
    Ok(ball_volume(2 * l - 1) * table.get(l)? * table.get(l - 1)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityConstruction {
    /// Square grids on every circle (any `L`).
    Grid,
    /// Cyclic group codes on the 2-D polygon layers (`L = 2` only).
    Cyclic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityRatio {
    pub d: f64,
    pub count: BigUint,
    pub density: f64,
    pub product_density: f64,
    pub ratio: f64,
}

/// Code density relative to `Λ_L × Λ_{L-1}` for decreasing `d`.
pub fn asymptotic_density_ratio(
    d_values: &[f64],
    l: usize,
    table: &CenterDensityTable,
    construction: DensityConstruction,
) -> Result<Vec<DensityRatio>> {
    if d_values.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidParameter("d values must be decreasing".into()));
    }
    let product_density = product_lattice_density(l, table)?;
    d_values
        .iter()
        .map(|&d| {
            let count = match (construction, l) {
                (DensityConstruction::Cyclic, 2) => {
                    let fam = polygon2d_layers(d)?;
                    let alphas = fam.angles.clone().unwrap_or_default();
                    let codes = search_family(&alphas, d)?;
                    codes.iter().fold(BigUint::zero(), |a, c| a + BigUint::from(c.order_m))
                }
                (DensityConstruction::Cyclic, _) => {
                    return Err(Error::InvalidParameter(
                        "cyclic construction needs L = 2".into(),
                    ))
                }
                (DensityConstruction::Grid, 2) => grid_lower_bound(&polygon2d_layers(d)?, d)?.total,
                (DensityConstruction::Grid, _) => {
                    let fam = crate::layering::permutation_layers(l, d)?;
                    grid_lower_bound(&fam, d)?.total
                }
            };
            let density = code_density_big(&count, d, 2 * l)?;
            Ok(DensityRatio { d, count, density, product_density, ratio: density / product_density })
        })
        .collect()
}
