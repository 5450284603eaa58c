//! Largest cyclic group codes on a 4-D torus layer.
//!
//! The layer with angle `alpha` is the torus of radius `(cos alpha, sin alpha)`.
//! A code of order `M` with generators `(g1, g2)` is the orbit of
//! `x0 = (cos alpha, 0, sin alpha, 0)` under the block rotation
//! `G = diag(R(2 pi g1 / M), R(2 pi g2 / M))`, with
//! `R(t) = [[cos t, sin t], [-sin t, cos t]]`.

mod dual;
pub mod flat;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use flat::{coset_distance, pair_feasible};

/// Below this starting order the generator grid is scanned directly.
pub const DIRECT_SCAN_LIMIT: u64 = 600;

/// A cyclic code on one torus layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CyclicLayerCode {
    pub alpha: f64,
    pub order_m: u64,
    pub generators: (u64, u64),
    pub dmin_achieved: f64,
}

/// How [`search_layer_with`] explores the candidates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SearchStrategy {
    /// Dual enumeration for large orders on non-thin tori, direct scan otherwise.
    #[default]
    Auto,
    /// Generator pairs in lexicographic order for each order, largest first.
    Scan,
    /// Dual-lattice enumeration (falls back to scanning on thin tori).
    Dual,
}

fn radii(alpha: f64) -> (f64, f64) {
    let (s, c) = alpha.sin_cos();
    (c, s)
}

/// `|G^i x0 - x0|`, evaluated in closed form.
pub fn orbit_distance(alpha: f64, m: u64, g1: u64, g2: u64, i: u64) -> f64 {
    let (c1, c2) = radii(alpha);
    let a = ((g1 as u128 * i as u128) % m as u128) as u64;
    let b = ((g2 as u128 * i as u128) % m as u128) as u64;
    coset_distance(c1, c2, m, a, b)
}

/// Minimum of `|G^i x0 - x0|` over `1 <= i <= M/2`; infinite for `M < 2`.
pub fn orbit_min_distance(alpha: f64, m: u64, g1: u64, g2: u64) -> f64 {
    (1..=m / 2)
        .map(|i| orbit_distance(alpha, m, g1, g2, i))
        .fold(f64::INFINITY, f64::min)
}

/// Starting order `floor(pi^2 cos a sin a / (2 sqrt 3 asin(d/4)^2))`.
pub fn initial_m(alpha: f64, d: f64) -> u64 {
    let (c1, c2) = radii(alpha);
    let v = PI * PI * c1 * c2 / (2.0 * 3f64.sqrt() * (d / 4.0).asin().powi(2));
    if v.is_finite() && v > 0.0 {
        v.floor() as u64
    } else {
        0
    }
}

/// Points fitting on a circle of radius `r` at chord distance `d`; 1 if none.
pub fn circle_capacity(r: f64, d: f64) -> u64 {
    if r <= 0.0 {
        return 1;
    }
    let x = d / (2.0 * r);
    if x > 1.0 {
        return 1;
    }
    ((PI / x.asin() * (1.0 + 1e-12)).floor() as u64).max(1)
}

/// Order at which the search starts: the planar estimate or the capacity of
/// a great circle, whichever is bigger.
///
/// The generators `(1, 1)` trace a great circle through `x0`, so on thin tori
/// the planar estimate can fall below what is attainable.
pub fn start_m(alpha: f64, d: f64) -> u64 {
    initial_m(alpha, d).max(circle_capacity(1.0, d))
}

fn check_inputs(alpha: f64, d: f64) -> Result<()> {
    if !(d > 0.0 && d <= 2f64.sqrt() + 1e-15) {
        return Err(Error::InvalidParameter(format!("d = {d} outside (0, sqrt 2]")));
    }
    if !(0.0..=FRAC_PI_2).contains(&alpha) {
        return Err(Error::InvalidParameter(format!("alpha = {alpha} outside [0, pi/2]")));
    }
    Ok(())
}

/// Largest cyclic code of the layer with minimum distance at least `d`.
///
/// Among generator pairs in `[1, M/2]^2` with `gcd = 1` the lexicographically
/// smallest feasible one is returned. Boundary angles give circle codes.
pub fn search_layer(alpha: f64, d: f64) -> Result<CyclicLayerCode> {
    search_layer_with(alpha, d, SearchStrategy::Auto)
}

pub fn search_layer_with(alpha: f64, d: f64, strategy: SearchStrategy) -> Result<CyclicLayerCode> {
    check_inputs(alpha, d)?;
    let (c1, c2) = radii(alpha);
    if alpha <= 0.0 || alpha >= FRAC_PI_2 {
        let m = circle_capacity(1.0, d);
        let generators = if alpha <= 0.0 { (1, 0) } else { (0, 1) };
        return Ok(finish(alpha, m, generators));
    }
    let m_start = start_m(alpha, d);
    let thin = TAU * c1.min(c2) < d;
    let use_dual = match strategy {
        SearchStrategy::Scan => false,
        SearchStrategy::Dual => !thin,
        SearchStrategy::Auto => !thin && m_start > DIRECT_SCAN_LIMIT,
    };
    let found = if use_dual {
        dual::dual_search(c1, c2, d, m_start).or_else(|| scan(c1, c2, d, m_start))
    } else {
        scan(c1, c2, d, m_start)
    };
    Ok(match found {
        Some((m, g)) => finish(alpha, m, g),
        None => finish(alpha, 1, (0, 0)),
    })
}

fn finish(alpha: f64, m: u64, generators: (u64, u64)) -> CyclicLayerCode {
    let dmin_achieved = if m < 2 {
        f64::INFINITY
    } else {
        orbit_min_distance(alpha, m, generators.0, generators.1)
    };
    CyclicLayerCode {
        alpha,
        order_m: m,
        generators,
        dmin_achieved,
    }
}

fn scan(c1: f64, c2: f64, d: f64, m_start: u64) -> Option<(u64, (u64, u64))> {
    for m in (2..=m_start).rev() {
        let h = m / 2;
        for g1 in 1..=h {
            for g2 in 1..=h {
                if g1.gcd(&g2) == 1 && pair_feasible(c1, c2, m, g1, g2, d) {
                    return Some((m, (g1, g2)));
                }
            }
        }
    }
    None
}

/// The same code on the layer reflected about the diagonal.
pub fn mirror_layer(code: &CyclicLayerCode) -> CyclicLayerCode {
    CyclicLayerCode {
        alpha: FRAC_PI_2 - code.alpha,
        order_m: code.order_m,
        generators: (code.generators.1, code.generators.0),
        dmin_achieved: code.dmin_achieved,
    }
}

/// Codes for a family of layer angles.
///
/// Angles below `pi/4` whose reflection is also in the family reuse the
/// reflected search; layers are searched in parallel.
pub fn search_family(alphas: &[f64], d: f64) -> Result<Vec<CyclicLayerCode>> {
    let tol = 1e-9;
    let has_mirror = |a: f64| alphas.iter().any(|&b| (a + b - FRAC_PI_2).abs() < tol);
    let primary: Vec<f64> = alphas
        .iter()
        .copied()
        .filter(|&a| a >= FRAC_PI_4 || !has_mirror(a))
        .collect();
    let found: Vec<CyclicLayerCode> = primary
        .par_iter()
        .map(|&a| search_layer(a, d))
        .collect::<Result<_>>()?;
    alphas
        .iter()
        .map(|&a| {
            if let Some(c) = found.iter().find(|c| c.alpha == a) {
                return Ok(c.clone());
            }
            let partner = found
                .iter()
                .find(|c| (a + c.alpha - FRAC_PI_2).abs() < tol)
                .ok_or_else(|| Error::InvalidParameter(format!("no layer for angle {a}")))?;
            let mut m = mirror_layer(partner);
            m.alpha = a;
            Ok(m)
        })
        .collect()
}

impl CyclicLayerCode {
    pub fn radius(&self) -> (f64, f64) {
        radii(self.alpha)
    }

    /// Residues `(-g1 i mod M, -g2 i mod M)` locating orbit point `i` on the box.
    pub fn residues(&self, i: u64) -> (u64, u64) {
        let m = self.order_m.max(1);
        let neg = |g: u64| {
            let r = ((g as u128 * (i % m) as u128) % m as u128) as u64;
            (m - r) % m
        };
        (neg(self.generators.0), neg(self.generators.1))
    }

    /// Angles of orbit point `i` in `[0, 2 pi)`.
    pub fn angles(&self, i: u64) -> (f64, f64) {
        let m = self.order_m.max(1) as f64;
        let (a, b) = self.residues(i);
        (TAU * a as f64 / m, TAU * b as f64 / m)
    }

    /// The orbit point `G^i x0`.
    pub fn point(&self, i: u64) -> [f64; 4] {
        let (c1, c2) = self.radius();
        let (t1, t2) = self.angles(i);
        let (s1, k1) = t1.sin_cos();
        let (s2, k2) = t2.sin_cos();
        [c1 * k1, c1 * s1, c2 * k2, c2 * s2]
    }

    /// Orbit index of the residue pair `(a, b)`, if it lies on the orbit.
    pub fn index_of(&self, a: u64, b: u64) -> Option<u64> {
        let m = self.order_m;
        if m <= 1 {
            return (a == 0 && b == 0).then_some(0);
        }
        let (g1, g2) = (self.generators.0 as i64, self.generators.1 as i64);
        let eg = g1.extended_gcd(&g2);
        if eg.gcd != 1 {
            return None;
        }
        let mi = m as i128;
        let lin = (eg.x as i128 * a as i128 + eg.y as i128 * b as i128).rem_euclid(mi);
        let i = ((mi - lin) % mi) as u64;
        (self.residues(i) == (a % m, b % m)).then_some(i)
    }

    /// Whether the order and generators describe a full orbit of size `M`.
    pub fn is_consistent(&self) -> bool {
        let (g1, g2) = self.generators;
        self.order_m == 1 || g1.gcd(&g2).gcd(&self.order_m) == 1
    }
}
