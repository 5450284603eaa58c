//! Smith and Hermite normal forms over the integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

use super::basis::int_determinant;

pub type IntMatrix = Vec<Vec<BigInt>>;

/// `U Q V = D` with `U`, `V` unimodular and `D` diagonal, `d_i | d_{i+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SmithForm {
    pub u: IntMatrix,
    pub u_inv: IntMatrix,
    pub v: IntMatrix,
    pub diagonal: Vec<BigInt>,
}

impl SmithForm {
    pub fn d_matrix(&self) -> IntMatrix {
        let n = self.diagonal.len();
        let mut d = vec![vec![BigInt::zero(); n]; n];
        for (i, x) in self.diagonal.iter().enumerate() {
            d[i][i] = x.clone();
        }
        d
    }
}

pub fn identity(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

pub fn int_mat_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> IntMatrix {
    let p = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..p)
                .map(|j| {
                    row.iter()
                        .zip(b)
                        .filter(|(x, _)| !x.is_zero())
                        .fold(BigInt::zero(), |acc, (x, bk)| acc + x * &bk[j])
                })
                .collect()
        })
        .collect()
}

struct Work {
    a: IntMatrix,
    u: IntMatrix,
    u_inv: IntMatrix,
    v: IntMatrix,
    n: usize,
}

impl Work {
    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        self.a.swap(i, j);
        self.u.swap(i, j);
        for r in self.u_inv.iter_mut() {
            r.swap(i, j);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for r in self.a.iter_mut() {
            r.swap(i, j);
        }
        for r in self.v.iter_mut() {
            r.swap(i, j);
        }
    }

    /// row_i += c * row_j
    fn add_row(&mut self, i: usize, j: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        for k in 0..self.n {
            let t = c * &self.a[j][k];
            self.a[i][k] += t;
            let t = c * &self.u[j][k];
            self.u[i][k] += t;
        }
        // inverse update: col_j -= c * col_i
        for r in self.u_inv.iter_mut() {
            let t = c * &r[i];
            r[j] -= t;
        }
    }

    /// col_i += c * col_j
    fn add_col(&mut self, i: usize, j: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        for r in self.a.iter_mut() {
            let t = c * &r[j];
            r[i] += t;
        }
        for r in self.v.iter_mut() {
            let t = c * &r[j];
            r[i] += t;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for k in 0..self.n {
            self.a[i][k] = -&self.a[i][k];
            self.u[i][k] = -&self.u[i][k];
        }
        for r in self.u_inv.iter_mut() {
            r[i] = -&r[i];
        }
    }
}

/// Smith normal form of a square nonsingular integer matrix.
pub fn smith_normal_form(q: &[Vec<BigInt>]) -> Result<SmithForm> {
    let n = q.len();
    if q.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidParameter("matrix must be square".into()));
    }
    if int_determinant(q).is_zero() {
        return Err(Error::Singular);
    }
    let mut w = Work {
        a: q.to_vec(),
        u: identity(n),
        u_inv: identity(n),
        v: identity(n),
        n,
    };
    for k in 0..n {
        loop {
            // smallest nonzero entry of the trailing block becomes the pivot
            let mut best: Option<(usize, usize)> = None;
            for i in k..n {
                for j in k..n {
                    if w.a[i][j].is_zero() {
                        continue;
                    }
                    if best.is_none_or(|(bi, bj)| w.a[i][j].abs() < w.a[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let (pi, pj) = best.ok_or(Error::Singular)?;
            w.swap_rows(k, pi);
            w.swap_cols(k, pj);
            let mut clean = true;
            for i in k + 1..n {
                if w.a[i][k].is_zero() {
                    continue;
                }
                let qt = w.a[i][k].div_floor(&w.a[k][k]);
                w.add_row(i, k, &-qt);
                if !w.a[i][k].is_zero() {
                    clean = false;
                }
            }
            for j in k + 1..n {
                if w.a[k][j].is_zero() {
                    continue;
                }
                let qt = w.a[k][j].div_floor(&w.a[k][k]);
                w.add_col(j, k, &-qt);
                if !w.a[k][j].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // pivot must divide the rest of the block
            let mut fixed = true;
            'scan: for i in k + 1..n {
                for j in k + 1..n {
                    if !w.a[i][j].is_multiple_of(&w.a[k][k]) {
                        w.add_row(k, i, &BigInt::one());
                        fixed = false;
                        break 'scan;
                    }
                }
            }
            if fixed {
                break;
            }
        }
        if w.a[k][k].is_negative() {
            w.negate_row(k);
        }
    }
    let diagonal = (0..n).map(|i| w.a[i][i].clone()).collect();
    let form = SmithForm {
        u: w.u,
        u_inv: w.u_inv,
        v: w.v,
        diagonal,
    };
    #[cfg(debug_assertions)]
    check_smith(q, &form);
    Ok(form)
}

/// Asserts every defining property of a Smith form.
pub fn check_smith(q: &[Vec<BigInt>], f: &SmithForm) {
    let uqv = int_mat_mul(&int_mat_mul(&f.u, q), &f.v);
    assert_eq!(uqv, f.d_matrix(), "U Q V != D");
    assert_eq!(int_mat_mul(&f.u, &f.u_inv), identity(q.len()), "U U^-1 != I");
    assert!(int_determinant(&f.u).abs().is_one(), "U not unimodular");
    assert!(int_determinant(&f.v).abs().is_one(), "V not unimodular");
    for w in f.diagonal.windows(2) {
        assert!(w[1].is_multiple_of(&w[0]), "divisibility chain broken");
    }
    assert!(f.diagonal.iter().all(|x| x.is_positive()));
}

/// Row-style Hermite normal form of the lattice generated by `rows`.
///
/// Returns the nonzero rows: upper echelon, positive pivots, entries above
/// each pivot reduced into `[0, pivot)`.
pub fn hermite_normal_form(rows: &[Vec<BigInt>]) -> IntMatrix {
    let mut a: IntMatrix = rows.to_vec();
    let ncols = a.first().map_or(0, |r| r.len());
    let mut r0 = 0;
    for col in 0..ncols {
        if r0 >= a.len() {
            break;
        }
        loop {
            let mut best: Option<usize> = None;
            for i in r0..a.len() {
                if !a[i][col].is_zero() && best.is_none_or(|b| a[i][col].abs() < a[b][col].abs()) {
                    best = Some(i);
                }
            }
            let Some(p) = best else { break };
            a.swap(r0, p);
            let mut done = true;
            for i in r0 + 1..a.len() {
                if a[i][col].is_zero() {
                    continue;
                }
                let qt = a[i][col].div_floor(&a[r0][col]);
                for c in col..ncols {
                    let t = &qt * &a[r0][c];
                    a[i][c] -= t;
                }
                if !a[i][col].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if a[r0][col].is_zero() {
            continue;
        }
        if a[r0][col].is_negative() {
            for c in col..ncols {
                a[r0][c] = -&a[r0][c];
            }
        }
        for i in 0..r0 {
            let qt = a[i][col].div_floor(&a[r0][col]);
            if qt.is_zero() {
                continue;
            }
            for c in col..ncols {
                let t = &qt * &a[r0][c];
                a[i][c] -= t;
            }
        }
        r0 += 1;
    }
    a.truncate(r0);
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        rows.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect()
    }

    #[test]
    fn small_examples() {
        let f = smith_normal_form(&m(&[&[2, 0], &[0, 4]])).unwrap();
        assert_eq!(f.diagonal, vec![BigInt::from(2), BigInt::from(4)]);
        let f = smith_normal_form(&m(&[&[2, 1], &[0, 3]])).unwrap();
        assert_eq!(f.diagonal, vec![BigInt::from(1), BigInt::from(6)]);
        let f = smith_normal_form(&m(&[&[4, 0], &[0, 6]])).unwrap();
        assert_eq!(f.diagonal, vec![BigInt::from(2), BigInt::from(12)]);
        assert!(matches!(smith_normal_form(&m(&[&[1, 2], &[2, 4]])), Err(Error::Singular)));
    }

    #[test]
    fn hnf_of_redundant_generators() {
        let h = hermite_normal_form(&m(&[&[4, 6], &[6, 4], &[2, 2]]));
        assert_eq!(h, m(&[&[2, 0], &[0, 2]]));
    }
}
