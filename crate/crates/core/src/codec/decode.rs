//! Decoding: normalize, nearest torus, in-layer search, and refinement over
//! the tori that could still hold a closer codeword.

use std::cmp::Ordering;
use std::f64::consts::TAU;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::cyclic::flat::generator_basis;
use crate::cyclic::CyclicLayerCode;
use crate::error::{Error, Result};
use crate::geometry::{dot, norm, unembed};
use crate::lattice::NearestMode;

use super::{Label, LayerCodebook, LayerContent, QuotientLayer, TorusCode};

/// Largest code [`brute_force_ml`] will materialize.
pub const BRUTE_FORCE_CAP: u64 = 1_000_000;

/// Cyclic layers up to this order are always scanned point by point.
const CYCLIC_SCAN_LIMIT: u64 = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecodeMode {
    Fast,
    Ml,
}

impl std::str::FromStr for DecodeMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fast" => Ok(DecodeMode::Fast),
            "ml" => Ok(DecodeMode::Ml),
            _ => Err(Error::InvalidParameter(format!("unknown decode mode {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult {
    pub codeword: Vec<f64>,
    pub label: Label,
    /// Euclidean distance from the normalized input.
    pub distance: f64,
    pub ml_certified: bool,
    pub tori_examined: usize,
    /// Some coordinate pair of the input vanished while the chosen layer's did not.
    pub degenerate: bool,
}

/// `x / |x|`.
pub fn normalize(x: &[f64]) -> Result<Vec<f64>> {
    let n = norm(x);
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::ZeroVector);
    }
    Ok(x.iter().map(|v| v / n).collect())
}

/// Best codeword of one layer found so far.
struct Candidate {
    index: BigUint,
    coords: Vec<BigUint>,
    point: Vec<f64>,
    dot: f64,
}

/// Larger inner product wins; ties go to the smaller `(layer, index)`.
fn better(a_layer: usize, a: &Candidate, b_layer: usize, b: &Candidate) -> bool {
    match a.dot.partial_cmp(&b.dot) {
        Some(Ordering::Greater) => true,
        Some(Ordering::Less) => false,
        _ => (a_layer, &a.index) < (b_layer, &b.index),
    }
}

fn chord(dot: f64) -> f64 {
    (2.0 - 2.0 * dot).max(0.0).sqrt()
}

fn candidate(layer: &LayerCodebook, x: &[f64], coords: Vec<BigUint>) -> Result<Candidate> {
    let point = layer.encode(&coords)?;
    let index = layer.index_of_coords(&coords)?;
    Ok(Candidate { index, dot: dot(x, &point), coords, point })
}

fn keep_best(best: &mut Option<Candidate>, c: Candidate, layer: usize) {
    if best.as_ref().is_none_or(|b| better(layer, &c, layer, b)) {
        *best = Some(c);
    }
}

/// In-layer decode. Returns the candidate and whether it is certified best
/// within the layer.
fn decode_layer(
    layer: &LayerCodebook,
    x: &[f64],
    gamma: &[f64],
    angles: &[f64],
) -> Result<(Candidate, bool)> {
    match &layer.content {
        LayerContent::Cyclic(code) => Ok((decode_cyclic(layer, code, x, gamma, angles)?, true)),
        LayerContent::Grid(g) => {
            let coords = g
                .counts
                .iter()
                .zip(angles)
                .map(|(&w, &a)| {
                    let k = (a * w as f64 / TAU).round() as i128;
                    BigUint::from(k.rem_euclid(i128::from(w)) as u64)
                })
                .collect();
            Ok((candidate(layer, x, coords)?, true))
        }
        LayerContent::Quotient(q) => Ok((decode_quotient(layer, q, x, angles)?, false)),
    }
}

fn scan_cyclic(layer: &LayerCodebook, code: &CyclicLayerCode, x: &[f64]) -> Result<Candidate> {
    let mut best: Option<Candidate> = None;
    for i in 0..code.order_m {
        let point = code.point(i).to_vec();
        let d = dot(x, &point);
        if best.as_ref().is_none_or(|b| d > b.dot) {
            best = Some(Candidate { index: i.into(), coords: vec![i.into()], point, dot: d });
        }
    }
    best.ok_or_else(|| Error::InvalidParameter(format!("empty layer at {:?}", layer.radius)))
}

/// `i` with `(-g1 i, -g2 i) = (a, b) mod m`, if the pair lies on the orbit.
fn orbit_index(code: &CyclicLayerCode, a: u64, b: u64) -> Option<u64> {
    let m = i128::from(code.order_m);
    // i g = r (mod m)  ->  i = i0 (mod n)
    let solve = |g: u64, r: u64| -> Option<(i128, i128)> {
        let g = i128::from(g) % m;
        let r = (m - i128::from(r) % m) % m;
        let h = g.gcd(&m);
        if r % h != 0 {
            return None;
        }
        let n = m / h;
        if n == 1 {
            return Some((0, 1));
        }
        let inv = (g / h).extended_gcd(&n).x.rem_euclid(n);
        Some(((r / h) * inv % n, n))
    };
    let (i1, n1) = solve(code.generators.0, a)?;
    let (i2, n2) = solve(code.generators.1, b)?;
    // combine i = i1 (mod n1), i = i2 (mod n2)
    let eg = n1.extended_gcd(&n2);
    if (i2 - i1) % eg.gcd != 0 {
        return None;
    }
    let l = n1 / eg.gcd * n2;
    let step = ((i2 - i1) / eg.gcd * eg.x).rem_euclid(n2 / eg.gcd);
    let i = (i1 + n1 * step).rem_euclid(l);
    let i = u64::try_from(i).ok()?;
    (i < code.order_m && code.residues(i) == (a, b)).then_some(i)
}

/// Cyclic layer: enumerate the orbit lattice inside the ellipse
/// `Σ 8 w_j δ_j^2 / M^2 ≤ F`, which contains every residue pair whose cost
/// `Σ w_j (1 - cos(2π δ_j / M))` is at most `F` (using `sin y ≥ 2y/π`).
fn decode_cyclic(
    layer: &LayerCodebook,
    code: &CyclicLayerCode,
    x: &[f64],
    gamma: &[f64],
    angles: &[f64],
) -> Result<Candidate> {
    let m = code.order_m;
    let (c1, c2) = code.radius();
    let w = [gamma[0] * c1, gamma[1] * c2];
    let wsum = w[0] + w[1];
    if m <= CYCLIC_SCAN_LIMIT || w[0].min(w[1]) <= 1e-9 * wsum.max(f64::MIN_POSITIVE) {
        return scan_cyclic(layer, code, x);
    }
    let mf = m as f64;
    let t = [angles[0] * mf / TAU, angles[1] * mf / TAU];
    let q = [8.0 * w[0] / (mf * mf), 8.0 * w[1] / (mf * mf)];
    let [[h, sec], [_, e]] = generator_basis(code.generators.0, code.generators.1, m);
    let (h, sec, e) = (h as f64, sec as f64, e as f64);

    let eval = |s1: f64, s2: f64| -> Option<Candidate> {
        let a = (s1 as i128).rem_euclid(i128::from(m)) as u64;
        let b = (s2 as i128).rem_euclid(i128::from(m)) as u64;
        let i = orbit_index(code, a, b)?;
        let point = code.point(i).to_vec();
        Some(Candidate { index: i.into(), coords: vec![i.into()], dot: dot(x, &point), point })
    };
    // a nearby orbit point to set the radius
    let x0 = (t[0] / h).round();
    let y0 = ((t[1] - x0 * sec) / e).round();
    let Some(start) = eval(x0 * h, x0 * sec + y0 * e) else {
        return scan_cyclic(layer, code, x);
    };
    let slack = |dot: f64| (wsum - dot) * (1.0 + 1e-9) + 1e-12 * wsum + 1e-15;
    let mut budget = slack(start.dot);
    let mut best = start;
    let xr = (budget / q[0]).sqrt();
    let (xlo, xhi) = (((t[0] - xr) / h).ceil(), ((t[0] + xr) / h).floor());
    if xhi - xlo + 1.0 > mf {
        return scan_cyclic(layer, code, x);
    }
    let mut visited = 0u64;
    let mut xi = xlo;
    while xi <= xhi {
        let d1 = xi * h - t[0];
        let rest = budget - q[0] * d1 * d1;
        if rest >= 0.0 {
            let yr = (rest / q[1]).sqrt();
            let base = xi * sec;
            let (ylo, yhi) = (((t[1] - yr - base) / e).ceil(), ((t[1] + yr - base) / e).floor());
            let mut yi = ylo;
            while yi <= yhi {
                visited += 1;
                if visited > m {
                    return scan_cyclic(layer, code, x);
                }
                if let Some(c) = eval(xi * h, base + yi * e) {
                    if c.dot > best.dot || (c.dot == best.dot && c.index < best.index) {
                        best = c;
                        budget = slack(best.dot);
                    }
                }
                yi += 1.0;
            }
        }
        xi += 1.0;
    }
    Ok(best)
}

/// Quotient layer: closest lattice point to the box target, plus its
/// translates across the seam on each axis near it. Not certified.
fn decode_quotient(
    layer: &LayerCodebook,
    q: &QuotientLayer,
    x: &[f64],
    angles: &[f64],
) -> Result<Candidate> {
    let c = layer.radius.entries();
    let z: Vec<f64> = angles.iter().zip(c).map(|(a, ci)| a * ci).collect();
    let lengths: Vec<f64> = c.iter().map(|ci| TAU * ci).collect();
    let box_len = q.fit.box_lengths();
    let reach = 2.0 * q.fit.alpha_scale.max(q.guard);
    let mode = if q.basis.dim() <= crate::lattice::nearest::EXACT_DIM_CAP {
        NearestMode::Exact
    } else {
        NearestMode::Babai
    };
    let mut targets = vec![z.clone()];
    for j in 0..z.len() {
        if z[j] < reach {
            let mut t = z.clone();
            t[j] += lengths[j];
            targets.push(t);
        }
        if z[j] > box_len[j] - reach {
            let mut t = z.clone();
            t[j] -= lengths[j];
            targets.push(t);
        }
    }
    let mut best: Option<Candidate> = None;
    for t in &targets {
        let p = q.solver().nearest(t, mode)?;
        let y: Vec<BigInt> = p.coefficients.iter().map(|&v| BigInt::from(v)).collect();
        let k = q.group.label_of(&y)?;
        let coords = k.iter().map(|v| v.to_biguint().expect("reduced label")).collect();
        keep_best(&mut best, candidate(layer, x, coords)?, 0);
    }
    Ok(best.expect("at least one target"))
}

fn result(code: &TorusCode, x: &[f64], layer: usize, c: Candidate, certified: bool, examined: usize, gamma: &[f64]) -> DecodeResult {
    let radius = code.layers[layer].radius.entries();
    let degenerate = gamma.iter().zip(radius).any(|(&g, &r)| g == 0.0 && r > 0.0);
    DecodeResult {
        distance: crate::geometry::distance(x, &c.point),
        codeword: c.point,
        label: Label { layer, coords: c.coords },
        ml_certified: certified,
        tori_examined: examined,
        degenerate,
    }
}

pub(super) fn decode(code: &TorusCode, x: &[f64], mode: DecodeMode) -> Result<DecodeResult> {
    if x.len() != code.ambient_dim() {
        return Err(Error::DimensionMismatch { expected: code.ambient_dim(), got: x.len() });
    }
    let x = normalize(x)?;
    let tc = unembed(&x)?;
    let angles: Vec<f64> = (0..code.dim_l).map(|i| tc.angle(i)).collect();
    // distance from x to its projection on each torus
    let delta: Vec<f64> = code
        .layers
        .iter()
        .map(|l| {
            l.radius
                .entries()
                .iter()
                .zip(&tc.gamma)
                .map(|(c, g)| (c - g) * (c - g))
                .sum::<f64>()
                .sqrt()
        })
        .collect();
    let mut order: Vec<usize> = (0..delta.len()).collect();
    order.sort_by(|&a, &b| delta[a].total_cmp(&delta[b]).then(a.cmp(&b)));

    let xi = order[0];
    let (first, exact) = decode_layer(&code.layers[xi], &x, &tc.gamma, &angles)?;
    let first_dist = chord(first.dot);
    if mode == DecodeMode::Fast || first_dist < code.dmin_design / 2.0 {
        let certified = first_dist < code.dmin_design / 2.0;
        return Ok(result(code, &x, xi, first, certified, 1, &tc.gamma));
    }

    let mut best = (xi, first);
    let mut all_exact = exact;
    let mut examined = 1;
    for &i in &order[1..] {
        if delta[i] > chord(best.1.dot) + 1e-12 {
            break;
        }
        let (c, exact) = decode_layer(&code.layers[i], &x, &tc.gamma, &angles)?;
        examined += 1;
        all_exact &= exact;
        if better(i, &c, best.0, &best.1) {
            best = (i, c);
        }
    }
    Ok(result(code, &x, best.0, best.1, all_exact, examined, &tc.gamma))
}

/// Exact maximum inner product over the materialized codebook.
pub fn brute_force_ml(code: &TorusCode, x: &[f64], cap: u64) -> Result<DecodeResult> {
    if x.len() != code.ambient_dim() {
        return Err(Error::DimensionMismatch { expected: code.ambient_dim(), got: x.len() });
    }
    code.materializable(cap)?;
    let x = normalize(x)?;
    let gamma = unembed(&x)?.gamma;
    let mut best: Option<(usize, Candidate)> = None;
    for (li, layer) in code.layers.iter().enumerate() {
        let size = layer.cardinality.to_u64().expect("bounded by the cap");
        for j in 0..size {
            // same arithmetic as encode, without the label round trip
            let point = match &layer.content {
                LayerContent::Cyclic(c) => c.point(j).to_vec(),
                _ => layer.encode(&layer.coords_from_index(&BigUint::from(j))?)?,
            };
            let d = dot(&x, &point);
            if best.as_ref().is_none_or(|(_, b)| d > b.dot) {
                let coords = layer.coords_from_index(&BigUint::from(j))?;
                best = Some((li, Candidate { index: j.into(), coords, point, dot: d }));
            }
        }
    }
    let (li, c) = best.ok_or_else(|| Error::InvalidParameter("empty code".into()))?;
    Ok(result(code, &x, li, c, true, code.layers.len(), &gamma))
}
