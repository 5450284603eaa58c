//! The finite group `Λ/Λ1` and its labeling.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

use super::basis::{mat_vec, LatticeBasis, Rat};
use super::snf::{smith_normal_form, IntMatrix};

/// `Λ/Λ1 ≅ Z_{d_1} × … × Z_{d_L}`.
///
/// A label `k` (with `0 ≤ k_i < d_i`) names the coset of `Σ k_i g_i`, where
/// `g_i` is column `i` of `U^{-1}`, in integer coordinates relative to `B`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupStructure {
    invariant_factors: Vec<BigInt>,
    coset_generators: Vec<Vec<BigInt>>,
    order: BigInt,
    u: IntMatrix,
}

/// Group structure of `Λ(B)/Λ(B1)` from the Smith form of `Q = B^{-1} B1`.
pub fn quotient_structure(b: &LatticeBasis, b1: &LatticeBasis) -> Result<GroupStructure> {
    let q = b.sublattice_coordinates(b1)?;
    let snf = smith_normal_form(&q)?;
    let n = q.len();
    let coset_generators = (0..n)
        .map(|j| snf.u_inv.iter().map(|r| r[j].clone()).collect())
        .collect();
    let order = snf.diagonal.iter().fold(BigInt::one(), |a, d| a * d);
    Ok(GroupStructure {
        invariant_factors: snf.diagonal,
        coset_generators,
        order,
        u: snf.u,
    })
}

impl GroupStructure {
    pub fn rank(&self) -> usize {
        self.invariant_factors.len()
    }

    pub fn invariant_factors(&self) -> &[BigInt] {
        &self.invariant_factors
    }

    /// Factors larger than one.
    pub fn nontrivial_factors(&self) -> Vec<BigInt> {
        self.invariant_factors.iter().filter(|d| !d.is_one()).cloned().collect()
    }

    pub fn order(&self) -> &BigInt {
        &self.order
    }

    /// Integer coordinates (relative to `B`) of the coset generators.
    pub fn coset_generators(&self) -> &[Vec<BigInt>] {
        &self.coset_generators
    }

    /// Coset generators as unscaled ambient vectors `B g_i`.
    pub fn ambient_generators(&self, b: &LatticeBasis) -> Vec<Vec<Rat>> {
        self.coset_generators.iter().map(|g| b.point(g)).collect()
    }

    /// Label of the lattice vector with integer coordinates `y`.
    pub fn label_of(&self, y: &[BigInt]) -> Result<Vec<BigInt>> {
        if y.len() != self.rank() {
            return Err(Error::DimensionMismatch { expected: self.rank(), got: y.len() });
        }
        Ok(self
            .u
            .iter()
            .zip(&self.invariant_factors)
            .map(|(row, d)| {
                let s = row.iter().zip(y).fold(BigInt::zero(), |a, (u, v)| a + u * v);
                s.mod_floor(d)
            })
            .collect())
    }

    fn check_label(&self, k: &[BigInt]) -> Result<()> {
        if k.len() != self.rank() {
            return Err(Error::DimensionMismatch { expected: self.rank(), got: k.len() });
        }
        for (i, (ki, d)) in k.iter().zip(&self.invariant_factors).enumerate() {
            if ki.is_negative() || ki >= d {
                return Err(Error::InvalidLabel(format!(
                    "component {i} = {ki} outside [0, {d})"
                )));
            }
        }
        Ok(())
    }

    /// Integer coordinates of `Σ k_i g_i`.
    pub fn representative(&self, k: &[BigInt]) -> Result<Vec<BigInt>> {
        self.check_label(k)?;
        let n = self.rank();
        Ok((0..n)
            .map(|r| {
                (0..n).fold(BigInt::zero(), |a, j| a + &self.coset_generators[j][r] * &k[j])
            })
            .collect())
    }

    /// Mixed-radix label of `index`; component 0 varies fastest.
    pub fn label_from_index(&self, index: &BigInt) -> Result<Vec<BigInt>> {
        if index.is_negative() || index >= &self.order {
            return Err(Error::InvalidLabel(format!("index {index} outside [0, {})", self.order)));
        }
        let mut rest = index.clone();
        Ok(self
            .invariant_factors
            .iter()
            .map(|d| {
                let (q, r) = rest.div_mod_floor(d);
                rest = q;
                r
            })
            .collect())
    }

    pub fn index_of_label(&self, k: &[BigInt]) -> Result<BigInt> {
        self.check_label(k)?;
        let mut idx = BigInt::zero();
        for (ki, d) in k.iter().zip(&self.invariant_factors).rev() {
            idx = idx * d + ki;
        }
        Ok(idx)
    }

    /// Sum of two labels in the group.
    pub fn add_labels(&self, a: &[BigInt], b: &[BigInt]) -> Result<Vec<BigInt>> {
        self.check_label(a)?;
        self.check_label(b)?;
        Ok(a.iter()
            .zip(b)
            .zip(&self.invariant_factors)
            .map(|((x, y), d)| (x + y).mod_floor(d))
            .collect())
    }
}

/// Reduces an unscaled point modulo the diagonal sublattice `diag(period)`,
/// componentwise into `[0, period_i)`.
pub fn reduce_diagonal(point: &[Rat], period: &[Rat]) -> Vec<Rat> {
    point
        .iter()
        .zip(period)
        .map(|(x, p)| {
            let q = (x / p).floor();
            x - q * p
        })
        .collect()
}

/// Ambient unscaled point of a label, reduced into the box of a diagonal `B1`.
pub fn box_representative(
    g: &GroupStructure,
    b: &LatticeBasis,
    period: &[Rat],
    k: &[BigInt],
) -> Result<Vec<Rat>> {
    let y = g.representative(k)?;
    let yr: Vec<Rat> = y.into_iter().map(Rat::from_integer).collect();
    Ok(reduce_diagonal(&mat_vec(b.matrix(), &yr), period))
}
