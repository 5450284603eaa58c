//! Ready-made codes: cyclic 4-D codes, per-axis grids, and lattice quotients.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::cyclic::{circle_capacity, search_family};
use crate::error::{Error, Result};
use crate::geometry::RadiusVector;
use crate::lattice::{per_axis_distance, Bundled};
use crate::layering::{permutation_layers, polygon2d_layers, slice_odd_sphere, LayerFamily, Ring, RingContent};

use super::{assemble, GridLayer, LayerContent, QuotientLayer, TorusCode};

/// Published scale of the Leech lattice for `d = 0.1`.
pub const PUBLISHED_LEECH_BETA: f64 = 0.10187;

/// How the Leech lattice is scaled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LeechBeta {
    /// `2 c_min asin(d / (2 c_min))`, the per-axis requirement.
    Derived,
    Published,
    Fixed(f64),
}

/// The 4-D code with one cyclic code per layer of the quarter-circle family.
pub fn cyclic_code(d: f64) -> Result<TorusCode> {
    Ok(cyclic_code_on(&polygon2d_layers(d)?)?.with_metadata("layering", "polygon2d"))
}

/// Cyclic codes on any 2-D layer family.
pub fn cyclic_code_on(family: &LayerFamily) -> Result<TorusCode> {
    let alphas: Vec<f64> = (0..family.len())
        .map(|i| family.angle(i).ok_or_else(|| Error::InvalidParameter("cyclic layers need L = 2".into())))
        .collect::<Result<_>>()?;
    let codes = search_family(&alphas, family.dmin)?;
    let contents = codes.into_iter().map(LayerContent::Cyclic).collect();
    Ok(assemble(family, contents)?.with_metadata("construction", "cyclic"))
}

/// Every layer filled with the product of the largest circle codes.
pub fn grid_code(family: &LayerFamily) -> Result<TorusCode> {
    let d = family.dmin;
    let contents = family
        .radii
        .iter()
        .map(|c| {
            let counts = c.entries().iter().map(|&r| circle_capacity(r, d)).collect();
            LayerContent::Grid(GridLayer { counts })
        })
        .collect();
    Ok(assemble(family, contents)?.with_metadata("construction", "grid"))
}

/// One lattice quotient layer with guard band `guard`.
pub fn quotient_layer(lattice: Bundled, beta: f64, guard: f64, c: &RadiusVector) -> Result<LayerContent> {
    Ok(LayerContent::Quotient(Box::new(QuotientLayer::new(lattice, beta, guard, c)?)))
}

/// Per-axis scale for a lattice of minimum distance `beta` on `family`:
/// `2 c_min asin(d / (2 c_min))` over the smallest positive radius entry.
pub fn derived_beta(family: &LayerFamily) -> Result<f64> {
    let c_min = family
        .radii
        .iter()
        .flat_map(|c| c.entries().iter().copied())
        .filter(|&v| v > 0.0)
        .fold(f64::INFINITY, f64::min);
    per_axis_distance(family.dmin, c_min)
}

/// Every layer carries the quotient of `lattice` scaled to minimum distance
/// `beta`, with guard band `beta`.
pub fn quotient_code(family: &LayerFamily, lattice: Bundled, beta: f64) -> Result<TorusCode> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::InvalidParameter(format!("beta {beta} must be positive")));
    }
    let contents = family
        .radii
        .iter()
        .map(|c| quotient_layer(lattice, beta, beta, c))
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble(family, contents)?
        .with_metadata("construction", "quotient")
        .with_metadata("lattice", lattice.name())
        .with_metadata("beta", beta.to_string()))
}

/// The 48-D code: permutation layers, each carrying the scaled Leech quotient.
pub fn leech_code(d: f64, beta: LeechBeta) -> Result<TorusCode> {
    let family = permutation_layers(24, d)?;
    let beta = match beta {
        LeechBeta::Derived => derived_beta(&family)?,
        LeechBeta::Published => PUBLISHED_LEECH_BETA,
        LeechBeta::Fixed(b) => b,
    };
    quotient_code(&family, Bundled::Leech, beta)
}

/// A code on the odd-dimensional sphere made of parallel rings.
#[derive(Debug, Clone)]
pub struct SlicedCode {
    pub d: f64,
    pub rings: Vec<Ring<TorusCode>>,
    pub total: BigUint,
}

/// Slices `S^4` into rings carrying cyclic 4-D codes.
pub fn sliced_code(d: f64) -> Result<SlicedCode> {
    let rings = slice_odd_sphere(d, cyclic_code)?;
    let total = rings.iter().fold(BigUint::zero(), |a, r| {
        a + match &r.content {
            RingContent::Code(c) => c.total_m.clone(),
            RingContent::Antipodal => BigUint::from(2u32),
            RingContent::Single => BigUint::from(1u32),
        }
    });
    Ok(SlicedCode { d, rings, total })
}

impl SlicedCode {
    /// All points, lifted to `R^5`.
    pub fn points(&self, cap: u64) -> Result<Vec<Vec<f64>>> {
        match self.total.to_u64() {
            Some(n) if n <= cap => {}
            _ => return Err(Error::CodeTooLarge { size: self.total.to_string(), cap }),
        }
        let mut out = Vec::new();
        for ring in &self.rings {
            let (r, h) = (ring.ring_radius, ring.height);
            let lift = |y: &[f64]| -> Vec<f64> { y.iter().map(|v| v * r).chain([h]).collect() };
            match &ring.content {
                RingContent::Code(c) => {
                    for y in c.codewords(cap)? {
                        out.push(lift(&y));
                    }
                }
                RingContent::Antipodal => {
                    out.push(lift(&[1.0, 0.0, 0.0, 0.0]));
                    out.push(lift(&[-1.0, 0.0, 0.0, 0.0]));
                }
                RingContent::Single => out.push(lift(&[1.0, 0.0, 0.0, 0.0])),
            }
        }
        Ok(out)
    }
}
