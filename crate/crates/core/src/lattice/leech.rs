//! The Leech lattice from the extended binary Golay code, and the bundled
//! generator matrices.
//!
//! Integer coordinates are the usual `√8`-scaled ones: minimal vectors have
//! squared norm 32 and shapes `(±2^8 0^16)`, `(∓3 ±1^23)`, `(±4 ±4 0^22)`.

use num_bigint::BigInt;

use crate::error::{Error, Result};

use super::basis::LatticeBasis;
use super::io::parse_basis;
use super::snf::hermite_normal_form;

/// Squared norm of the minimal vectors in integer coordinates.
pub const LEECH_MIN_NORM2: i64 = 32;

/// Generator polynomial of the cyclic [23,12,7] Golay code, low degree first.
const GOLAY_POLY: [u8; 12] = [1, 0, 1, 0, 1, 1, 1, 0, 0, 0, 1, 1];

const LEECH_DATA: &str = include_str!("../../data/leech.txt");
const D4_DATA: &str = include_str!("../../data/d4.txt");
const E8_DATA: &str = include_str!("../../data/e8.txt");

/// Twelve generators of the extended Golay code (shifts of the generator
/// polynomial plus a parity bit).
pub fn golay_basis() -> Vec<[u8; 24]> {
    (0..12)
        .map(|shift| {
            let mut w = [0u8; 24];
            for (i, &g) in GOLAY_POLY.iter().enumerate() {
                w[i + shift] = g;
            }
            w[23] = w[..23].iter().sum::<u8>() % 2;
            w
        })
        .collect()
}

/// All 4096 codewords.
pub fn golay_codewords() -> Vec<[u8; 24]> {
    let basis = golay_basis();
    (0u32..4096)
        .map(|mask| {
            let mut w = [0u8; 24];
            for (b, g) in basis.iter().enumerate() {
                if mask >> b & 1 == 1 {
                    for (x, y) in w.iter_mut().zip(g) {
                        *x ^= y;
                    }
                }
            }
            w
        })
        .collect()
}

/// Spanning set: `2c` for Golay generators, `4 D24`, and `(-3, 1^23)`.
pub fn leech_generators() -> Vec<Vec<i64>> {
    let mut gens: Vec<Vec<i64>> = golay_basis()
        .iter()
        .map(|w| w.iter().map(|&b| 2 * i64::from(b)).collect())
        .collect();
    for i in 0..23 {
        let mut v = vec![0i64; 24];
        v[i] = 4;
        v[i + 1] = -4;
        gens.push(v);
    }
    let mut v = vec![0i64; 24];
    v[22] = 4;
    v[23] = 4;
    gens.push(v);
    let mut odd = vec![1i64; 24];
    odd[0] = -3;
    gens.push(odd);
    gens
}

/// Hermite basis (rows) of the lattice spanned by [`leech_generators`].
pub fn leech_hermite_rows() -> Vec<Vec<BigInt>> {
    let rows: Vec<Vec<BigInt>> = leech_generators()
        .into_iter()
        .map(|r| r.into_iter().map(BigInt::from).collect())
        .collect();
    hermite_normal_form(&rows)
}

/// A fixed list of minimal vectors, one or more of each shape.
pub fn minimal_vector_witnesses() -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut v = vec![0i64; 24];
    v[0] = 4;
    v[1] = 4;
    out.push(v.clone());
    v[1] = -4;
    out.push(v);
    let mut odd = vec![1i64; 24];
    odd[0] = -3;
    out.push(odd.clone());
    let mut moved = odd.clone();
    moved[0] = 1;
    moved[5] = -3;
    out.push(moved);
    let octads: Vec<[u8; 24]> = golay_codewords()
        .into_iter()
        .filter(|w| w.iter().filter(|&&b| b == 1).count() == 8)
        .collect();
    if let Some(w) = octads.iter().find(|w| w[0] == 0) {
        // odd vector minus twice an octad avoiding the -3
        out.push(odd.iter().zip(w).map(|(x, &b)| x - 2 * i64::from(b)).collect());
    }
    // 2 * octad, with an even number of sign flips
    for w in octads.into_iter().take(4) {
        let mut x: Vec<i64> = w.iter().map(|&b| 2 * i64::from(b)).collect();
        let support: Vec<usize> = (0..24).filter(|&i| w[i] == 1).collect();
        x[support[0]] = -2;
        x[support[1]] = -2;
        out.push(x);
    }
    out
}

/// Leech lattice normalized to minimum distance 2: integer matrix over the
/// global scale `1/√8`.
pub fn leech_basis() -> LatticeBasis {
    parse_basis(LEECH_DATA, 1.0 / 8f64.sqrt()).expect("bundled Leech data is valid")
}

/// Scale factor giving minimum distance `beta` for the integer Leech matrix.
pub fn leech_scale(beta: f64) -> f64 {
    beta / (LEECH_MIN_NORM2 as f64).sqrt()
}

/// Bundled generator matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bundled {
    /// `Z^n`, built in code.
    Cubic(usize),
    D4,
    E8,
    Leech,
}

impl Bundled {
    pub fn parse(name: &str) -> Result<Self> {
        let lower = name.to_ascii_lowercase();
        match lower.as_str() {
            "d4" => Ok(Bundled::D4),
            "e8" => Ok(Bundled::E8),
            "leech" | "l24" => Ok(Bundled::Leech),
            _ => lower
                .strip_prefix('z')
                .and_then(|n| n.parse::<usize>().ok())
                .filter(|&n| n > 0)
                .map(Bundled::Cubic)
                .ok_or_else(|| Error::InvalidParameter(format!("unknown lattice {name:?}"))),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Bundled::Cubic(n) => format!("z{n}"),
            Bundled::D4 => "d4".into(),
            Bundled::E8 => "e8".into(),
            Bundled::Leech => "leech".into(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Bundled::Cubic(n) => *n,
            Bundled::D4 => 4,
            Bundled::E8 => 8,
            Bundled::Leech => 24,
        }
    }

    /// Minimum distance of [`Bundled::basis`] as stored.
    pub fn min_distance(&self) -> f64 {
        match self {
            Bundled::Cubic(_) => 1.0,
            Bundled::D4 | Bundled::E8 => 2f64.sqrt(),
            Bundled::Leech => 2.0,
        }
    }

    pub fn basis(&self) -> Result<LatticeBasis> {
        match self {
            Bundled::Cubic(n) => LatticeBasis::cubic(*n, 1.0),
            Bundled::D4 => parse_basis(D4_DATA, 1.0),
            Bundled::E8 => parse_basis(E8_DATA, 1.0),
            Bundled::Leech => Ok(leech_basis()),
        }
    }

    /// The basis rescaled to minimum distance `beta`.
    pub fn scaled(&self, beta: f64) -> Result<LatticeBasis> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::InvalidParameter(format!("beta {beta} must be positive")));
        }
        let b = self.basis()?;
        b.with_scale(b.scale() * beta / self.min_distance())
    }
}
