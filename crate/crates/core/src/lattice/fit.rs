//! Largest orthogonal sublattice `α Z^L` that fits in a layer's hyperbox.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::geometry::RadiusVector;

use super::basis::{rat_lcm, LatticeBasis, Rat};

/// `α`, the counts `v_i = ⌊(2π c_i − guard)/α⌋` and the guard.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxFit {
    /// Step in ambient units (`alpha_exact * scale`).
    pub alpha_scale: f64,
    /// Step in the unscaled coordinates of the basis.
    pub alpha_exact: Rat,
    pub counts: Vec<u64>,
    pub guard: f64,
}

impl BoxFit {
    /// Unscaled periods `α v_i`.
    pub fn periods(&self) -> Vec<Rat> {
        self.counts
            .iter()
            .map(|&v| &self.alpha_exact * Rat::from_integer(BigInt::from(v)))
            .collect()
    }

    /// The sublattice `α diag(v)` with the scale of `b`.
    pub fn sublattice(&self, b: &LatticeBasis) -> Result<LatticeBasis> {
        LatticeBasis::diagonal(&self.periods(), b.scale())
    }

    /// Box side lengths `α v_i` in ambient units.
    pub fn box_lengths(&self) -> Vec<f64> {
        self.counts.iter().map(|&v| self.alpha_scale * v as f64).collect()
    }
}

/// The generator `s` of `{s : s w ∈ Z^n}` for a rational vector `w ≠ 0`.
fn integral_multiplier(w: &[Rat]) -> Rat {
    let mut den = BigInt::one();
    let mut num = BigInt::zero();
    for x in w.iter().filter(|x| !x.is_zero()) {
        den = den.lcm(x.denom());
        num = num.gcd(x.numer());
    }
    Rat::new(den, num.abs())
}

/// Smallest unscaled `s > 0` with `s e_i ∈ Λ(B)` for every axis.
pub fn orthogonal_step(b: &LatticeBasis) -> Rat {
    let inv = b.inverse();
    let n = b.dim();
    (0..n)
        .map(|i| {
            let col: Vec<Rat> = inv.iter().map(|r| r[i].clone()).collect();
            integral_multiplier(&col)
        })
        .reduce(|a, s| rat_lcm(&a, &s))
        .expect("dimension is positive")
}

/// Fits `α Z^L` inside the box `[0, 2π c_i − guard]`.
pub fn orthogonal_fit(b: &LatticeBasis, c: &RadiusVector, guard: f64) -> Result<BoxFit> {
    if c.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: b.dim(), got: c.dim() });
    }
    if !(guard.is_finite() && guard >= 0.0) {
        return Err(Error::InvalidParameter(format!("guard {guard} must be nonnegative")));
    }
    let alpha_exact = orthogonal_step(b);
    let alpha_scale = alpha_exact.to_f64().unwrap_or(f64::NAN) * b.scale();
    let mut counts = Vec::with_capacity(c.dim());
    for (i, &ci) in c.entries().iter().enumerate() {
        if ci <= 0.0 {
            return Err(Error::DegenerateTorus { index: i });
        }
        let v = ((2.0 * PI * ci - guard) / alpha_scale).floor();
        if v < 1.0 {
            return Err(Error::BoxTooSmall { axis: i });
        }
        counts.push(v as u64);
    }
    Ok(BoxFit { alpha_scale, alpha_exact, counts, guard })
}

fn prime_factors(n: &BigInt) -> Vec<BigInt> {
    let mut out = Vec::new();
    let mut m = n.abs();
    let mut p = BigInt::from(2);
    while &p * &p <= m {
        if m.is_multiple_of(&p) {
            out.push(p.clone());
            while m.is_multiple_of(&p) {
                m /= &p;
            }
        }
        p += 1;
    }
    if m > BigInt::one() {
        out.push(m);
    }
    out
}

/// Checks `α e_i ∈ Λ` for every axis and that `(α/p) e_j ∉ Λ` for some axis
/// for every prime `p` dividing the numerator of `α`.
pub fn certify_minimal_step(b: &LatticeBasis, alpha: &Rat) -> Result<bool> {
    let n = b.dim();
    let axis = |s: &Rat, i: usize| {
        let mut e = vec![Rat::zero(); n];
        e[i] = s.clone();
        b.contains(&e)
    };
    for i in 0..n {
        if !axis(alpha, i)? {
            return Ok(false);
        }
    }
    for p in prime_factors(alpha.numer()) {
        let smaller = alpha / Rat::from_integer(p);
        let mut all = true;
        for i in 0..n {
            if !axis(&smaller, i)? {
                all = false;
                break;
            }
        }
        if all {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Flat distance that keeps Euclidean distance `d` on the thinnest circle
/// of radius `c_min`: `2 c_min asin(d / (2 c_min))`.
pub fn per_axis_distance(d: f64, c_min: f64) -> Result<f64> {
    if !(c_min > 0.0) || d <= 0.0 || d > 2.0 * c_min {
        return Err(Error::InvalidParameter(format!(
            "distance {d} not attainable on a circle of radius {c_min}"
        )));
    }
    Ok(2.0 * c_min * (d / (2.0 * c_min)).asin())
}
