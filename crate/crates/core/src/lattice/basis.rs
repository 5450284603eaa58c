use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rat = BigRational;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Square generator matrix with exact rational entries; columns are generators.
///
/// The lattice is `scale * B * Z^n`. The scale carries irrational factors such
/// as `1/sqrt(8)` so that `B` itself stays rational.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeBasis {
    matrix: Vec<Vec<Rat>>,
    scale: f64,
    det: Rat,
    inv: Vec<Vec<Rat>>,
}

impl LatticeBasis {
    /// Row-major matrix whose columns generate the lattice.
    pub fn new(matrix: Vec<Vec<Rat>>, scale: f64) -> Result<Self> {
        let n = matrix.len();
        if n == 0 {
            return Err(Error::InvalidParameter("empty basis".into()));
        }
        if let Some(r) = matrix.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, got: r.len() });
        }
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidParameter(format!("scale {scale} must be positive")));
        }
        let det = determinant(&matrix);
        if det.is_zero() {
            return Err(Error::Singular);
        }
        let inv = inverse(&matrix).ok_or(Error::Singular)?;
        Ok(Self { matrix, scale, det, inv })
    }

    pub fn from_integers(rows: &[Vec<i64>], scale: f64) -> Result<Self> {
        Self::new(
            rows.iter().map(|r| r.iter().map(|&v| rat(v)).collect()).collect(),
            scale,
        )
    }

    /// The basis whose columns are `cols`.
    pub fn from_columns(cols: Vec<Vec<Rat>>, scale: f64) -> Result<Self> {
        let n = cols.len();
        let mut m = vec![vec![Rat::zero(); n]; n];
        for (j, c) in cols.into_iter().enumerate() {
            if c.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: c.len() });
            }
            for (i, v) in c.into_iter().enumerate() {
                m[i][j] = v;
            }
        }
        Self::new(m, scale)
    }

    /// `scale * I_n`.
    pub fn cubic(n: usize, scale: f64) -> Result<Self> {
        let rows = (0..n)
            .map(|i| (0..n).map(|j| if i == j { rat(1) } else { rat(0) }).collect())
            .collect();
        Self::new(rows, scale)
    }

    /// `scale * diag(entries)`.
    pub fn diagonal(entries: &[Rat], scale: f64) -> Result<Self> {
        let n = entries.len();
        let mut m = vec![vec![Rat::zero(); n]; n];
        for (i, e) in entries.iter().enumerate() {
            m[i][i] = e.clone();
        }
        Self::new(m, scale)
    }

    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn with_scale(&self, scale: f64) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidParameter(format!("scale {scale} must be positive")));
        }
        Ok(Self { scale, ..self.clone() })
    }

    pub fn matrix(&self) -> &[Vec<Rat>] {
        &self.matrix
    }

    /// Determinant of the rational part (the scale is not included).
    pub fn determinant(&self) -> &Rat {
        &self.det
    }

    pub fn recompute_determinant(&self) -> Rat {
        determinant(&self.matrix)
    }

    /// `|det|` of the scaled lattice as a float.
    pub fn volume(&self) -> f64 {
        self.det.abs().to_f64().unwrap_or(f64::INFINITY) * self.scale.powi(self.dim() as i32)
    }

    pub fn column(&self, j: usize) -> Vec<Rat> {
        self.matrix.iter().map(|r| r[j].clone()).collect()
    }

    /// Float matrix of the scaled basis (row-major, columns are generators).
    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        self.matrix
            .iter()
            .map(|r| r.iter().map(|v| v.to_f64().unwrap_or(f64::NAN) * self.scale).collect())
            .collect()
    }

    /// Generators as float vectors (scaled).
    pub fn columns_f64(&self) -> Vec<Vec<f64>> {
        let m = self.to_f64();
        (0..self.dim()).map(|j| m.iter().map(|r| r[j]).collect()).collect()
    }

    pub fn inverse(&self) -> &[Vec<Rat>] {
        &self.inv
    }

    /// Solves `B x = rhs` in the unscaled coordinates.
    pub fn solve(&self, rhs: &[Rat]) -> Result<Vec<Rat>> {
        if rhs.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: rhs.len() });
        }
        Ok(mat_vec(&self.inv, rhs))
    }

    /// Whether `rhs` (unscaled coordinates) is a lattice vector.
    pub fn contains(&self, rhs: &[Rat]) -> Result<bool> {
        Ok(self.solve(rhs)?.iter().all(|v| v.is_integer()))
    }

    /// Whether the columns are pairwise orthogonal.
    pub fn is_orthogonal(&self) -> bool {
        let n = self.dim();
        for a in 0..n {
            for b in a + 1..n {
                let mut s = Rat::zero();
                for r in &self.matrix {
                    s += &r[a] * &r[b];
                }
                if !s.is_zero() {
                    return false;
                }
            }
        }
        true
    }

    /// Whether the matrix is diagonal.
    pub fn is_diagonal(&self) -> bool {
        self.matrix
            .iter()
            .enumerate()
            .all(|(i, r)| r.iter().enumerate().all(|(j, v)| i == j || v.is_zero()))
    }

    /// Integer matrix `Q = B^{-1} B1`, checking that `B1` spans a sublattice.
    pub fn sublattice_coordinates(&self, sub: &LatticeBasis) -> Result<Vec<Vec<BigInt>>> {
        if sub.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: sub.dim() });
        }
        if (sub.scale - self.scale).abs() > 1e-15 * self.scale.abs() {
            return Err(Error::InvalidParameter(
                "sublattice must share the scale of the lattice".into(),
            ));
        }
        let q = mat_mul(&self.inv, &sub.matrix);
        let mut out = Vec::with_capacity(q.len());
        for (i, row) in q.into_iter().enumerate() {
            let mut r = Vec::with_capacity(row.len());
            for (j, v) in row.into_iter().enumerate() {
                if !v.is_integer() {
                    return Err(Error::NotSublattice { row: i, col: j });
                }
                r.push(v.to_integer());
            }
            out.push(r);
        }
        Ok(out)
    }

    /// Lattice vector `B y` (unscaled) for integer coordinates `y`.
    pub fn point(&self, y: &[BigInt]) -> Vec<Rat> {
        let yr: Vec<Rat> = y.iter().map(|v| Rat::from_integer(v.clone())).collect();
        mat_vec(&self.matrix, &yr)
    }
}

pub fn mat_vec(m: &[Vec<Rat>], v: &[Rat]) -> Vec<Rat> {
    m.iter()
        .map(|r| r.iter().zip(v).fold(Rat::zero(), |acc, (a, b)| acc + a * b))
        .collect()
}

pub fn mat_mul(a: &[Vec<Rat>], b: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
    let n = a.len();
    let p = b.first().map_or(0, |r| r.len());
    let mut out = vec![vec![Rat::zero(); p]; n];
    for i in 0..n {
        for (k, bk) in b.iter().enumerate() {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..p {
                out[i][j] += &a[i][k] * &bk[j];
            }
        }
    }
    out
}

/// Exact determinant by Gaussian elimination over the rationals.
pub fn determinant(m: &[Vec<Rat>]) -> Rat {
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = Rat::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return Rat::zero();
        };
        if p != col {
            a.swap(p, col);
            det = -det;
        }
        let pivot = a[col][col].clone();
        det *= &pivot;
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] / &pivot;
            for c in col..n {
                let t = &f * &a[col][c];
                a[r][c] -= t;
            }
        }
    }
    det
}

/// Exact inverse by Gauss-Jordan elimination; `None` when singular.
pub fn inverse(m: &[Vec<Rat>]) -> Option<Vec<Vec<Rat>>> {
    let n = m.len();
    let mut a: Vec<Vec<Rat>> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }));
            row
        })
        .collect();
    for col in 0..n {
        let p = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(p, col);
        let pivot = a[col][col].clone();
        for v in a[col].iter_mut() {
            *v /= &pivot;
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for c in 0..2 * n {
                let t = &f * &a[col][c];
                a[r][c] -= t;
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Integer determinant (exact) of an integer matrix.
pub fn int_determinant(m: &[Vec<BigInt>]) -> BigInt {
    let r: Vec<Vec<Rat>> = m
        .iter()
        .map(|row| row.iter().map(|v| Rat::from_integer(v.clone())).collect())
        .collect();
    determinant(&r).to_integer()
}

/// Least common multiple of two positive rationals: the generator of
/// `aZ ∩ bZ`.
pub fn rat_lcm(a: &Rat, b: &Rat) -> Rat {
    let num = a.numer().lcm(b.numer());
    let den = a.denom().gcd(b.denom());
    Rat::new(num, den)
}
