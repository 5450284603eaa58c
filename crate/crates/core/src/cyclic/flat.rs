//! Cyclic codes on a 4-D torus viewed as planar lattices.
//!
//! The pre-image of the orbit generated by `(g1, g2)` is the integer lattice
//! `J = span{(g1, g2), (M, 0), (0, M)}` scaled by `(2 pi c_1 / M, 2 pi c_2 / M)`.
//! Points of `J` that agree modulo `M` are the same codeword.

use std::f64::consts::PI;

use num_integer::Integer;

/// Chordal distance between codewords whose residues differ by `(a, b)` mod `m`.
///
/// Every distance in this module goes through here so that all search paths
/// produce bit-identical values; residues are folded to `min(r, m - r)` first.
#[inline]
pub fn coset_distance(c1: f64, c2: f64, m: u64, a: u64, b: u64) -> f64 {
    let a = a.min(m - a);
    let b = b.min(m - b);
    let mf = m as f64;
    let s1 = (PI * a as f64 / mf).sin();
    let s2 = (PI * b as f64 / mf).sin();
    2.0 * (c1 * c1 * s1 * s1 + c2 * c2 * s2 * s2).sqrt()
}

pub type IVec = [i64; 2];

/// Basis of `span{(g1, g2), (m, 0), (0, m)}` in echelon form.
pub fn generator_basis(g1: u64, g2: u64, m: u64) -> [IVec; 2] {
    let (g1, g2, m) = (g1 as i64 % m as i64, g2 as i64 % m as i64, m as i64);
    let eg = g1.extended_gcd(&m);
    let h = eg.gcd;
    let x = eg.x;
    let e = ((m / h) as i128 * g2 as i128 % m as i128) as i64;
    let e = e.gcd(&m);
    let second = ((x as i128 * g2 as i128).rem_euclid(e as i128)) as i64;
    [[h, second], [0, e]]
}

#[inline]
fn q(v: IVec, c: [f64; 2]) -> f64 {
    let a = c[0] * v[0] as f64;
    let b = c[1] * v[1] as f64;
    a * a + b * b
}

#[inline]
fn bil(u: IVec, v: IVec, c: [f64; 2]) -> f64 {
    c[0] * c[0] * u[0] as f64 * v[0] as f64 + c[1] * c[1] * u[1] as f64 * v[1] as f64
}

/// Lagrange-Gauss reduction under the diagonal metric `diag(c1^2, c2^2)`.
pub fn gauss_reduce(basis: [IVec; 2], c: [f64; 2]) -> [IVec; 2] {
    let [mut b1, mut b2] = basis;
    for _ in 0..200 {
        if q(b1, c) > q(b2, c) {
            std::mem::swap(&mut b1, &mut b2);
        }
        let mu = (bil(b1, b2, c) / q(b1, c)).round();
        if mu == 0.0 {
            break;
        }
        let mu = mu as i64;
        b2 = [b2[0] - mu * b1[0], b2[1] - mu * b1[1]];
    }
    if q(b1, c) > q(b2, c) {
        std::mem::swap(&mut b1, &mut b2);
    }
    [b1, b2]
}

#[inline]
fn residues(v: IVec, m: u64) -> Option<(u64, u64)> {
    let mi = m as i64;
    let a = v[0].rem_euclid(mi) as u64;
    let b = v[1].rem_euclid(mi) as u64;
    if a == 0 && b == 0 {
        None
    } else {
        Some((a, b))
    }
}

/// Smallest codeword distance of the lattice code with integer basis `basis`.
///
/// Returns as soon as a value below `stop_below` is seen (pass 0 for the
/// exact minimum). Infinite when the code has a single point.
///
/// A coset with torus distance `t` has a representative of flat length at
/// most `pi t / 2`, so enumerating the ball of that radius is exhaustive.
pub fn min_coset_distance(basis: [IVec; 2], m: u64, c1: f64, c2: f64, stop_below: f64) -> f64 {
    let c = [c1, c2];
    let [b1, b2] = gauss_reduce(basis, c);
    let dist = |v: IVec| residues(v, m).map(|(a, b)| coset_distance(c1, c2, m, a, b));
    let mut best = f64::INFINITY;
    for v in [b1, b2, [b1[0] + b2[0], b1[1] + b2[1]], [b1[0] - b2[0], b1[1] - b2[1]]] {
        if let Some(t) = dist(v) {
            best = best.min(t);
            if best < stop_below {
                return best;
            }
        }
    }
    if !best.is_finite() {
        return best;
    }
    // Flat length is (2 pi / m) * sqrt(q); the ball is sqrt(q) <= m * best / 4.
    let r = m as f64 * best / 4.0 * (1.0 + 1e-9) + 1e-9;
    let r2 = r * r;
    let q11 = q(b1, c);
    let q12 = bil(b1, b2, c);
    let q22 = q(b2, c);
    let h2 = q22 - q12 * q12 / q11;
    let jmax = (r2 / h2).sqrt().floor() as i64 + 1;
    let b1_trivial = residues(b1, m).is_none();
    for j in -jmax..=jmax {
        let rest = r2 - (j * j) as f64 * h2;
        if rest < -1e-9 * r2 {
            continue;
        }
        let center = -(j as f64) * q12 / q11;
        let (ilo, ihi) = if b1_trivial {
            let i = center.round() as i64;
            (i, i)
        } else {
            let rad = (rest.max(0.0) / q11).sqrt();
            ((center - rad).floor() as i64, (center + rad).ceil() as i64)
        };
        for i in ilo..=ihi {
            if i == 0 && j == 0 {
                continue;
            }
            let v = [i * b1[0] + j * b2[0], i * b1[1] + j * b2[1]];
            if let Some(t) = dist(v) {
                if t < best {
                    best = t;
                    if best < stop_below {
                        return best;
                    }
                }
            }
        }
    }
    best
}

/// Whether the orbit of `(g1, g2)` mod `m` keeps every pair at least `d` apart.
pub fn pair_feasible(c1: f64, c2: f64, m: u64, g1: u64, g2: u64, d: f64) -> bool {
    if let Some((a, b)) = residues([g1 as i64, g2 as i64], m) {
        if coset_distance(c1, c2, m, a, b) < d {
            return false;
        }
    }
    min_coset_distance(generator_basis(g1, g2, m), m, c1, c2, d) >= d
}
