//! Closest lattice points: LLL + Babai nearest plane, and exact
//! enumeration (nearest-first order) for small dimensions.

use crate::error::{Error, Result};

use super::basis::LatticeBasis;

/// Exact search is refused above this dimension unless the basis is orthogonal.
pub const EXACT_DIM_CAP: usize = 8;

const LLL_DELTA: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NearestMode {
    Exact,
    Babai,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NearestPoint {
    /// Integer coordinates relative to the original basis.
    pub coefficients: Vec<i64>,
    pub point: Vec<f64>,
    pub distance: f64,
    /// True when the result is certified closest.
    pub exact: bool,
}

/// Precomputed reduction of one basis, reusable across targets.
#[derive(Debug, Clone)]
pub struct NearestPointSolver {
    dim: usize,
    /// Original generators (scaled).
    columns: Vec<Vec<f64>>,
    /// LLL-reduced generators.
    reduced: Vec<Vec<f64>>,
    /// `reduced_j = Σ_k transform[j][k] columns_k`.
    transform: Vec<Vec<i64>>,
    gs: Vec<Vec<f64>>,
    gs_norm2: Vec<f64>,
    mu: Vec<Vec<f64>>,
    orthogonal: bool,
    dim_cap: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn gram_schmidt(b: &[Vec<f64>]) -> (Vec<Vec<f64>>, Vec<f64>, Vec<Vec<f64>>) {
    let n = b.len();
    let mut gs: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut norm2 = Vec::with_capacity(n);
    let mut mu = vec![vec![0.0; n]; n];
    for i in 0..n {
        let mut v = b[i].clone();
        for j in 0..i {
            mu[i][j] = dot(&b[i], &gs[j]) / norm2[j];
            for (vk, gk) in v.iter_mut().zip(&gs[j]) {
                *vk -= mu[i][j] * gk;
            }
        }
        mu[i][i] = 1.0;
        norm2.push(dot(&v, &v));
        gs.push(v);
    }
    (gs, norm2, mu)
}

/// Textbook LLL on the rows of `b`, returning the unimodular transform.
fn lll(b: &mut [Vec<f64>]) -> Vec<Vec<i64>> {
    let n = b.len();
    let mut t: Vec<Vec<i64>> =
        (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    let (mut _gs, mut norm2, mut mu) = gram_schmidt(b);
    let mut k = 1;
    let mut guard = 0usize;
    while k < n {
        guard += 1;
        if guard > 100_000 {
            break;
        }
        for j in (0..k).rev() {
            let q = mu[k][j].round();
            if q != 0.0 {
                let qi = q as i64;
                let (head, tail) = b.split_at_mut(k);
                for (x, y) in tail[0].iter_mut().zip(&head[j]) {
                    *x -= q * y;
                }
                let (th, tt) = t.split_at_mut(k);
                for (x, y) in tt[0].iter_mut().zip(&th[j]) {
                    *x -= qi * y;
                }
                for l in 0..=j {
                    mu[k][l] -= q * mu[j][l];
                }
            }
        }
        if norm2[k] >= (LLL_DELTA - mu[k][k - 1] * mu[k][k - 1]) * norm2[k - 1] {
            k += 1;
        } else {
            b.swap(k, k - 1);
            t.swap(k, k - 1);
            (_gs, norm2, mu) = gram_schmidt(b);
            k = (k - 1).max(1);
        }
    }
    t
}

impl NearestPointSolver {
    pub fn new(basis: &LatticeBasis) -> Self {
        let columns = basis.columns_f64();
        let dim = columns.len();
        let orthogonal = basis.is_orthogonal();
        let mut reduced = columns.clone();
        let transform = if orthogonal {
            (0..dim).map(|i| (0..dim).map(|j| i64::from(i == j)).collect()).collect()
        } else {
            lll(&mut reduced)
        };
        let (gs, gs_norm2, mu) = gram_schmidt(&reduced);
        Self {
            dim,
            columns,
            reduced,
            transform,
            gs,
            gs_norm2,
            mu,
            orthogonal,
            dim_cap: EXACT_DIM_CAP,
        }
    }

    pub fn with_dim_cap(mut self, cap: usize) -> Self {
        self.dim_cap = cap;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// LLL-reduced generators.
    pub fn reduced_basis(&self) -> &[Vec<f64>] {
        &self.reduced
    }

    fn finish(&self, reduced_coeffs: &[i64], target: &[f64], exact: bool) -> NearestPoint {
        let mut coefficients = vec![0i64; self.dim];
        for (j, &c) in reduced_coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (k, t) in self.transform[j].iter().enumerate() {
                coefficients[k] += c * t;
            }
        }
        let mut point = vec![0.0; self.dim];
        for (col, &c) in self.columns.iter().zip(&coefficients) {
            if c == 0 {
                continue;
            }
            for (p, x) in point.iter_mut().zip(col) {
                *p += c as f64 * x;
            }
        }
        let distance = point
            .iter()
            .zip(target)
            .map(|(p, t)| (p - t) * (p - t))
            .sum::<f64>()
            .sqrt();
        NearestPoint { coefficients, point, distance, exact }
    }

    /// Projections of the target onto the Gram-Schmidt directions.
    fn projections(&self, target: &[f64]) -> Vec<f64> {
        self.gs.iter().zip(&self.gs_norm2).map(|(g, n2)| dot(target, g) / n2).collect()
    }

    fn babai(&self, y: &[f64]) -> Vec<i64> {
        let n = self.dim;
        let mut x = vec![0i64; n];
        for k in (0..n).rev() {
            let c = y[k] - (k + 1..n).map(|j| self.mu[j][k] * x[j] as f64).sum::<f64>();
            x[k] = c.round() as i64;
        }
        x
    }

    fn partial_cost(&self, y: &[f64], x: &[i64]) -> f64 {
        let n = self.dim;
        (0..n)
            .map(|k| {
                let c = y[k] - (k + 1..n).map(|j| self.mu[j][k] * x[j] as f64).sum::<f64>();
                (x[k] as f64 - c).powi(2) * self.gs_norm2[k]
            })
            .sum()
    }

    fn enumerate(&self, y: &[f64], best: &mut Vec<i64>, best_cost: &mut f64) {
        let n = self.dim;
        let mut x = vec![0i64; n];
        self.descend(n, 0.0, y, &mut x, best, best_cost);
    }

    fn descend(
        &self,
        level: usize,
        cost: f64,
        y: &[f64],
        x: &mut [i64],
        best: &mut Vec<i64>,
        best_cost: &mut f64,
    ) {
        if level == 0 {
            if cost < *best_cost {
                *best_cost = cost;
                best.copy_from_slice(x);
            }
            return;
        }
        let k = level - 1;
        let n = self.dim;
        let c = y[k] - (k + 1..n).map(|j| self.mu[j][k] * x[j] as f64).sum::<f64>();
        let w = self.gs_norm2[k];
        let rad = ((*best_cost - cost) / w).max(0.0).sqrt();
        let lo = (c - rad).ceil() as i64;
        let hi = (c + rad).floor() as i64;
        let mut cands: Vec<i64> = (lo..=hi).collect();
        cands.sort_by(|a, b| (*a as f64 - c).abs().total_cmp(&(*b as f64 - c).abs()));
        for cand in cands {
            let cc = cost + (cand as f64 - c).powi(2) * w;
            if cc >= *best_cost {
                break;
            }
            x[k] = cand;
            self.descend(k, cc, y, x, best, best_cost);
        }
    }

    pub fn nearest(&self, target: &[f64], mode: NearestMode) -> Result<NearestPoint> {
        if target.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: target.len() });
        }
        let y = self.projections(target);
        let babai = self.babai(&y);
        if self.orthogonal {
            return Ok(self.finish(&babai, target, true));
        }
        match mode {
            NearestMode::Babai => Ok(self.finish(&babai, target, false)),
            NearestMode::Exact => {
                if self.dim > self.dim_cap {
                    return Err(Error::DimensionCap { dim: self.dim, cap: self.dim_cap });
                }
                let mut best = babai.clone();
                let mut best_cost = self.partial_cost(&y, &babai) * (1.0 + 1e-12) + 1e-300;
                self.enumerate(&y, &mut best, &mut best_cost);
                Ok(self.finish(&best, target, true))
            }
        }
    }
}

/// One-shot closest point.
pub fn nearest_point(b: &LatticeBasis, target: &[f64], mode: NearestMode) -> Result<NearestPoint> {
    NearestPointSolver::new(b).nearest(target, mode)
}
