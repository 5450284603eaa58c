//! Exhaustive search over cyclic lattice codes through the dual lattice.
//!
//! A cyclic code of order `M` on the torus with sides `w_j = 2 pi c_j` is a
//! planar lattice `L` containing `B = w_1 Z x w_2 Z` with `L / B` cyclic. Its
//! dual sits inside `B* = (1/w_1) Z x (1/w_2) Z` with index `M`. When every
//! chordal distance is at least `d`, so is every flat distance, which pins the
//! shortest dual vector to a thin annulus. Enumerating that annulus lists every
//! candidate code, and each candidate is then checked exactly.

use std::collections::{BTreeMap, HashSet};
use std::f64::consts::TAU;

use num_integer::Integer;

use super::flat::{min_coset_distance, pair_feasible, IVec};

const SLACK: f64 = 1e-9;

pub(crate) struct DualSearch {
    c1: f64,
    c2: f64,
    w1sq: f64,
    w2sq: f64,
    area: f64,
    d: f64,
}

/// Largest feasible order in `[2, m_start]` with its lexicographically least
/// generator pair, or `None` when no order in that range admits a witness.
pub(crate) fn dual_search(c1: f64, c2: f64, d: f64, m_start: u64) -> Option<(u64, (u64, u64))> {
    let s = DualSearch {
        c1,
        c2,
        w1sq: (TAU * c1).powi(2),
        w2sq: (TAU * c2).powi(2),
        area: TAU * c1 * TAU * c2,
        d,
    };
    let mut hi = m_start;
    let mut width = (m_start / 2000).max(16);
    while hi >= 2 {
        let lo = hi.saturating_sub(width - 1).max(2);
        if let Some(found) = s.window(lo, hi) {
            return Some(found);
        }
        if lo == 2 {
            break;
        }
        hi = lo - 1;
        width = width.saturating_mul(2);
    }
    None
}

impl DualSearch {
    fn norm2(&self, m: i64, n: i64) -> f64 {
        (m * m) as f64 / self.w1sq + (n * n) as f64 / self.w2sq
    }

    fn dot(&self, a: IVec, b: IVec) -> f64 {
        (a[0] as f64 * b[0] as f64) / self.w1sq + (a[1] as f64 * b[1] as f64) / self.w2sq
    }

    fn window(&self, lo: u64, hi: u64) -> Option<(u64, (u64, u64))> {
        let rho_lo = self.d * lo as f64 / self.area * (1.0 - SLACK);
        let rho_hi2 = 2.0 * hi as f64 / (3f64.sqrt() * self.area) * (1.0 + SLACK);
        let rho_lo2 = rho_lo * rho_lo;
        if rho_lo2 > rho_hi2 {
            return None;
        }
        let mut state = WindowState {
            lo,
            hi,
            best: BTreeMap::new(),
            seen: HashSet::new(),
        };
        let w1 = self.w1sq.sqrt();
        let w2 = self.w2sq.sqrt();
        let m_max = (rho_hi2.sqrt() * w1).floor() as i64 + 1;
        for m1 in 0..=m_max {
            let x2 = (m1 * m1) as f64 / self.w1sq;
            if x2 > rho_hi2 {
                break;
            }
            let n_hi = ((rho_hi2 - x2).sqrt() * w2).floor() as i64 + 1;
            let n_lo = ((rho_lo2 - x2).max(0.0).sqrt() * w2).floor() as i64 - 1;
            let n_lo = n_lo.max(0);
            for na in n_lo..=n_hi {
                if m1 == 0 && na == 0 {
                    continue;
                }
                self.process(&mut state, m1, na);
                if m1 > 0 && na > 0 {
                    self.process(&mut state, m1, -na);
                }
            }
        }
        let (&m, &w) = state.best.iter().next_back()?;
        Some((m, w))
    }

    fn process(&self, st: &mut WindowState, m1: i64, n1: i64) {
        let rho2 = self.norm2(m1, n1);
        let rho = rho2.sqrt();
        let floor_m = st.best.keys().next_back().copied().unwrap_or(st.lo).max(st.lo);
        let m_lo = ((3f64.sqrt() * self.area * rho2 / 2.0) * (1.0 - SLACK)).ceil();
        let m_hi = (rho * self.area / self.d * (1.0 + SLACK)).floor();
        if m_hi < 2.0 {
            return;
        }
        let m_lo = (m_lo.max(0.0) as u64).max(floor_m);
        let m_hi = (m_hi as u64).min(st.hi);
        if m_lo > m_hi {
            return;
        }
        let eg = m1.extended_gcd(&n1);
        let g = eg.gcd.unsigned_abs();
        let (x, y) = if eg.gcd < 0 { (-eg.x, -eg.y) } else { (eg.x, eg.y) };
        let first = m_lo.div_ceil(g) * g;
        let step = rho2 / g as f64;
        let (gm, gn) = (m1 / g as i64, n1 / g as i64);
        let mut mm = first;
        while mm <= m_hi {
            let k = (mm / g) as i64;
            // m1 * n2 - n1 * m2 = mm
            let (m2p, n2p) = (-y * k, x * k);
            let p0 = self.dot([m1, n1], [m2p, n2p]);
            let klo = ((-rho2 / 2.0 - p0) / step).floor() as i64 - 1;
            let khi = ((rho2 / 2.0 - p0) / step).ceil() as i64 + 1;
            for kk in klo..=khi {
                let m2 = m2p + kk * gm;
                let n2 = n2p + kk * gn;
                let proj = self.dot([m1, n1], [m2, n2]);
                if proj.abs() > rho2 / 2.0 * (1.0 + SLACK) {
                    continue;
                }
                if self.norm2(m2, n2) < rho2 * (1.0 - SLACK) {
                    continue;
                }
                if (g as i64).gcd(&m2.gcd(&n2)) != 1 {
                    continue;
                }
                let key = (mm, hnf_key([m1, n1], [m2, n2]));
                if !st.seen.insert(key) {
                    continue;
                }
                let basis = [[n2, -m2], [-n1, m1]];
                let thr = self.d * (1.0 - 1e-12);
                if min_coset_distance(basis, mm, self.c1, self.c2, thr) < thr {
                    continue;
                }
                let Some(w) = class_witness(basis, mm) else {
                    continue;
                };
                if !pair_feasible(self.c1, self.c2, mm, w.0, w.1, self.d) {
                    continue;
                }
                let e = st.best.entry(mm).or_insert(w);
                if w < *e {
                    *e = w;
                }
            }
            mm += g;
        }
    }
}

struct WindowState {
    lo: u64,
    hi: u64,
    best: BTreeMap<u64, (u64, u64)>,
    seen: HashSet<(u64, (i64, i64, i64))>,
}

/// Hermite normal form `[[a, b], [0, c]]` of the row lattice spanned by `r1, r2`.
fn hnf_key(r1: IVec, r2: IVec) -> (i64, i64, i64) {
    let eg = r1[0].extended_gcd(&r2[0]);
    let a = eg.gcd.abs();
    let s = eg.gcd.signum().max(1);
    let b = s * (eg.x * r1[1] + eg.y * r2[1]);
    let c = if a == 0 {
        (r1[1].gcd(&r2[1])).abs()
    } else {
        ((r2[0] / a) * r1[1] - (r1[0] / a) * r2[1]).abs()
    };
    let b = if c == 0 { b } else { b.rem_euclid(c) };
    (a, b, c)
}

fn fold(t: u64, m: u64) -> u64 {
    t.min(m - t)
}

fn modinv(a: i64, m: i64) -> Option<i64> {
    let eg = a.rem_euclid(m).extended_gcd(&m);
    (eg.gcd == 1).then(|| eg.x.rem_euclid(m))
}

/// A generator of `J / M Z^2` for the integer lattice `J` with basis `basis`.
fn class_generator(basis: [IVec; 2], m: u64) -> Option<(u64, u64)> {
    let mi = m as i64;
    let [j1, j2] = basis;
    let limit = mi.min(4096);
    for s in 0..limit {
        for t in [-1i64, 1] {
            let k1 = (s as i128 * j1[0] as i128 + t as i128 * j2[0] as i128).rem_euclid(mi as i128) as i64;
            let k2 = (s as i128 * j1[1] as i128 + t as i128 * j2[1] as i128).rem_euclid(mi as i128) as i64;
            if k1.gcd(&k2).gcd(&mi) == 1 {
                return Some((k1 as u64, k2 as u64));
            }
        }
    }
    None
}

/// Lexicographically least `(g1, g2)` in `[1, M/2]^2` with `gcd(g1, g2) = 1`
/// whose orbit is the class of `J` up to reflection of the axes.
pub(crate) fn class_witness(basis: [IVec; 2], m: u64) -> Option<(u64, u64)> {
    let (k1, k2) = class_generator(basis, m)?;
    let e = k1.gcd(&m);
    if e == m {
        return None;
    }
    let mp = m / e;
    let inv = modinv((k1 / e) as i64, mp as i64)? as u64;
    let mut t = e;
    while t <= m / 2 {
        let s = t / e;
        if s.gcd(&mp) == 1 {
            let mut best: Option<u64> = None;
            for sign in [1i64, -1] {
                let u0 = ((sign * s as i64) as i128 * inv as i128).rem_euclid(mp as i128) as u64;
                for j in 0..e {
                    let u = u0 + j * mp;
                    if u.gcd(&m) != 1 {
                        continue;
                    }
                    let g2 = fold(((u as u128 * k2 as u128) % m as u128) as u64, m);
                    if g2 >= 1 && t.gcd(&g2) == 1 && best.is_none_or(|b| g2 < b) {
                        best = Some(g2);
                    }
                }
            }
            if let Some(g2) = best {
                return Some((t, g2));
            }
        }
        t += e;
    }
    None
}
