//! Whole codebooks: assembly, labels, encoding, decoding and simulation.

mod awgn;
mod build;
mod decode;
mod schema;

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cyclic::CyclicLayerCode;
use crate::error::{Error, Result};
use crate::geometry::{distance, embed, embed_angles, RadiusVector};
use crate::lattice::quotient::box_representative;
use crate::lattice::{BoxFit, Bundled, GroupStructure, LatticeBasis, NearestPointSolver, Rat};
use crate::layering::LayerFamily;

pub use awgn::{awgn_trial, wilson_interval, AwgnConfig, AwgnReport, ModeStats};
pub use build::{
    cyclic_code, cyclic_code_on, derived_beta, grid_code, leech_code, quotient_code, quotient_layer,
    sliced_code, LeechBeta, SlicedCode, PUBLISHED_LEECH_BETA,
};
pub use decode::{brute_force_ml, normalize, DecodeMode, DecodeResult, BRUTE_FORCE_CAP};
pub use schema::{load_codebook, save_codebook, CodebookFile, LayerEntry, LayerSpec};

/// A layer carrying a lattice quotient `Λ/Λ1` placed in its hyperbox.
#[derive(Debug, Clone)]
pub struct QuotientLayer {
    pub lattice: Bundled,
    pub beta: f64,
    pub guard: f64,
    pub basis: LatticeBasis,
    pub fit: BoxFit,
    pub group: GroupStructure,
    periods: Vec<Rat>,
    solver: NearestPointSolver,
}

impl QuotientLayer {
    pub fn new(lattice: Bundled, beta: f64, guard: f64, c: &RadiusVector) -> Result<Self> {
        let basis = lattice.scaled(beta)?;
        if basis.dim() != c.dim() {
            return Err(Error::DimensionMismatch { expected: c.dim(), got: basis.dim() });
        }
        let fit = crate::lattice::orthogonal_fit(&basis, c, guard)?;
        let group = crate::lattice::quotient_structure(&basis, &fit.sublattice(&basis)?)?;
        let periods = fit.periods();
        let solver = NearestPointSolver::new(&basis);
        Ok(Self { lattice, beta, guard, basis, fit, group, periods, solver })
    }

    /// Box coordinates of label `k` in `[0, α v_i)`.
    pub fn box_point(&self, k: &[BigInt]) -> Result<Vec<f64>> {
        let p = box_representative(&self.group, &self.basis, &self.periods, k)?;
        Ok(p.iter().map(|v| v.to_f64().unwrap_or(f64::NAN) * self.basis.scale()).collect())
    }

    pub(crate) fn solver(&self) -> &NearestPointSolver {
        &self.solver
    }
}

/// Square grid: `W_j` equally spaced angles on circle `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridLayer {
    pub counts: Vec<u64>,
}

#[derive(Debug, Clone)]
pub enum LayerContent {
    Cyclic(CyclicLayerCode),
    Quotient(Box<QuotientLayer>),
    Grid(GridLayer),
}

impl LayerContent {
    pub fn kind(&self) -> &'static str {
        match self {
            LayerContent::Cyclic(_) => "cyclic",
            LayerContent::Quotient(_) => "quotient",
            LayerContent::Grid(_) => "grid",
        }
    }
}

#[derive(Debug, Clone)]
pub struct LayerCodebook {
    pub radius: RadiusVector,
    pub content: LayerContent,
    pub cardinality: BigUint,
}

impl LayerCodebook {
    pub fn new(radius: RadiusVector, content: LayerContent) -> Result<Self> {
        let cardinality = match &content {
            LayerContent::Cyclic(c) => {
                if radius.dim() != 2 {
                    return Err(Error::DimensionMismatch { expected: 2, got: radius.dim() });
                }
                BigUint::from(c.order_m)
            }
            LayerContent::Grid(g) => {
                if g.counts.len() != radius.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: radius.dim(),
                        got: g.counts.len(),
                    });
                }
                if g.counts.contains(&0) {
                    return Err(Error::InvalidParameter("grid count 0".into()));
                }
                g.counts.iter().fold(BigUint::from(1u32), |a, &w| a * w)
            }
            LayerContent::Quotient(q) => {
                if q.basis.dim() != radius.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: radius.dim(),
                        got: q.basis.dim(),
                    });
                }
                q.group.order().to_biguint().expect("group order is positive")
            }
        };
        Ok(Self { radius, content, cardinality })
    }

    /// Moduli of the label coordinates.
    pub fn moduli(&self) -> Vec<BigUint> {
        match &self.content {
            LayerContent::Cyclic(c) => vec![BigUint::from(c.order_m)],
            LayerContent::Grid(g) => g.counts.iter().map(|&w| BigUint::from(w)).collect(),
            LayerContent::Quotient(q) => q
                .group
                .invariant_factors()
                .iter()
                .map(|d| d.to_biguint().expect("positive"))
                .collect(),
        }
    }

    /// Label coordinates of the index-th codeword (component 0 fastest).
    pub fn coords_from_index(&self, index: &BigUint) -> Result<Vec<BigUint>> {
        if index >= &self.cardinality {
            return Err(Error::InvalidLabel(format!(
                "index {index} outside layer of size {}",
                self.cardinality
            )));
        }
        let mut rest = index.clone();
        Ok(self
            .moduli()
            .iter()
            .map(|m| {
                let (q, r) = rest.div_rem(m);
                rest = q;
                r
            })
            .collect())
    }

    pub fn index_of_coords(&self, coords: &[BigUint]) -> Result<BigUint> {
        self.check_coords(coords)?;
        let mut idx = BigUint::zero();
        for (k, m) in coords.iter().zip(self.moduli()).rev() {
            idx = idx * m + k;
        }
        Ok(idx)
    }

    fn check_coords(&self, coords: &[BigUint]) -> Result<()> {
        let moduli = self.moduli();
        if coords.len() != moduli.len() {
            return Err(Error::InvalidLabel(format!(
                "expected {} label coordinates, got {}",
                moduli.len(),
                coords.len()
            )));
        }
        for (i, (k, m)) in coords.iter().zip(&moduli).enumerate() {
            if k >= m {
                return Err(Error::InvalidLabel(format!("coordinate {i} = {k} not below {m}")));
            }
        }
        Ok(())
    }

    /// The codeword with label coordinates `coords`.
    pub fn encode(&self, coords: &[BigUint]) -> Result<Vec<f64>> {
        self.check_coords(coords)?;
        match &self.content {
            LayerContent::Cyclic(c) => {
                let i = coords[0].to_u64().expect("checked against the order");
                Ok(c.point(i).to_vec())
            }
            LayerContent::Grid(g) => {
                let angles: Vec<f64> = coords
                    .iter()
                    .zip(&g.counts)
                    .map(|(k, &w)| TAU * k.to_f64().unwrap_or(0.0) / w as f64)
                    .collect();
                Ok(embed_angles(self.radius.entries(), &angles))
            }
            LayerContent::Quotient(q) => {
                let k: Vec<BigInt> = coords.iter().map(|v| BigInt::from(v.clone())).collect();
                embed(&self.radius, &q.box_point(&k)?)
            }
        }
    }
}

/// A codeword name: layer index plus coordinates in the layer's label group.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label {
    pub layer: usize,
    pub coords: Vec<BigUint>,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "{}:{}", self.layer, parts.join(","))
    }
}

impl FromStr for Label {
    type Err = Error;

    /// `layer:k1,k2,...`
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidLabel(format!("cannot parse {s:?}; expected layer:k1,k2,..."));
        let (layer, rest) = s.trim().split_once(':').ok_or_else(bad)?;
        let layer = layer.trim().parse().map_err(|_| bad())?;
        let coords = rest
            .split(',')
            .map(|t| t.trim().parse::<BigUint>().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        Ok(Label { layer, coords })
    }
}

/// A torus layer spherical code.
#[derive(Debug, Clone)]
pub struct TorusCode {
    pub dim_l: usize,
    pub dmin_design: f64,
    pub layers: Vec<LayerCodebook>,
    pub total_m: BigUint,
    pub metadata: BTreeMap<String, String>,
}

/// Joins a layer family with one content per layer.
pub fn assemble(family: &LayerFamily, contents: Vec<LayerContent>) -> Result<TorusCode> {
    if contents.is_empty() || family.is_empty() {
        return Err(Error::InvalidParameter("a code needs at least one layer".into()));
    }
    if contents.len() != family.len() {
        return Err(Error::InvalidParameter(format!(
            "{} layers but {} contents",
            family.len(),
            contents.len()
        )));
    }
    let layers = family
        .radii
        .iter()
        .cloned()
        .zip(contents)
        .map(|(r, c)| LayerCodebook::new(r, c))
        .collect::<Result<Vec<_>>>()?;
    TorusCode::from_layers(family.dim_l, family.dmin, layers)
}

impl TorusCode {
    pub fn from_layers(dim_l: usize, dmin_design: f64, layers: Vec<LayerCodebook>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::InvalidParameter("a code needs at least one layer".into()));
        }
        if let Some(l) = layers.iter().find(|l| l.radius.dim() != dim_l) {
            return Err(Error::DimensionMismatch { expected: dim_l, got: l.radius.dim() });
        }
        let total_m = layers.iter().fold(BigUint::zero(), |a, l| a + &l.cardinality);
        Ok(Self { dim_l, dmin_design, layers, total_m, metadata: BTreeMap::new() })
    }

    pub fn with_metadata(mut self, key: &str, value: impl Into<String>) -> Self {
        self.metadata.insert(key.to_string(), value.into());
        self
    }

    /// Ambient dimension `2L`.
    pub fn ambient_dim(&self) -> usize {
        2 * self.dim_l
    }

    pub fn layer(&self, i: usize) -> Result<&LayerCodebook> {
        self.layers
            .get(i)
            .ok_or_else(|| Error::InvalidLabel(format!("no layer {i} (code has {})", self.layers.len())))
    }

    pub fn encode(&self, label: &Label) -> Result<Vec<f64>> {
        self.layer(label.layer)?.encode(&label.coords)
    }

    /// Global index of a label: layers in order, then the in-layer index.
    pub fn index_of(&self, label: &Label) -> Result<BigUint> {
        let layer = self.layer(label.layer)?;
        let offset = self.layers[..label.layer].iter().fold(BigUint::zero(), |a, l| a + &l.cardinality);
        Ok(offset + layer.index_of_coords(&label.coords)?)
    }

    /// Label of the global index.
    pub fn label_at(&self, index: &BigUint) -> Result<Label> {
        let mut rest = index.clone();
        for (i, l) in self.layers.iter().enumerate() {
            if rest < l.cardinality {
                return Ok(Label { layer: i, coords: l.coords_from_index(&rest)? });
            }
            rest -= &l.cardinality;
        }
        Err(Error::InvalidLabel(format!("index {index} outside code of size {}", self.total_m)))
    }

    /// Uniformly random label.
    pub fn random_label<R: Rng>(&self, rng: &mut R) -> Result<Label> {
        let total = self.total_m.to_u128().ok_or_else(|| Error::CodeTooLarge {
            size: self.total_m.to_string(),
            cap: u64::MAX,
        })?;
        let idx = rng.random_range(0..total);
        self.label_at(&BigUint::from(idx))
    }

    /// Every label in index order; refuses codes above `cap`.
    pub fn all_labels(&self, cap: u64) -> Result<Vec<Label>> {
        let n = self.materializable(cap)?;
        let mut out = Vec::with_capacity(n as usize);
        for (i, l) in self.layers.iter().enumerate() {
            let size = l.cardinality.to_u64().expect("bounded by the cap");
            for j in 0..size {
                out.push(Label { layer: i, coords: l.coords_from_index(&BigUint::from(j))? });
            }
        }
        Ok(out)
    }

    pub(crate) fn materializable(&self, cap: u64) -> Result<u64> {
        match self.total_m.to_u64() {
            Some(n) if n <= cap => Ok(n),
            _ => Err(Error::CodeTooLarge { size: self.total_m.to_string(), cap }),
        }
    }

    /// Every codeword in index order.
    pub fn codewords(&self, cap: u64) -> Result<Vec<Vec<f64>>> {
        self.all_labels(cap)?.iter().map(|l| self.encode(l)).collect()
    }

    /// Exact minimum distance by a full pairwise scan.
    pub fn min_distance(&self, cap: u64) -> Result<f64> {
        let pts = self.codewords(cap)?;
        let mut best = f64::INFINITY;
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                best = best.min(distance(&pts[i], &pts[j]));
            }
        }
        Ok(best)
    }

    /// Minimum over `pairs` random codeword pairs (both within and across layers).
    pub fn spot_check(&self, pairs: usize, seed: u64) -> Result<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut best = f64::INFINITY;
        for t in 0..pairs {
            let a = self.random_label(&mut rng)?;
            let b = if t % 2 == 0 {
                // same layer, often a near neighbour in index order
                let l = &self.layers[a.layer];
                let ia = l.index_of_coords(&a.coords)?;
                let step = BigUint::from(rng.random_range(1u64..=8));
                let ib = (ia + step) % &l.cardinality;
                Label { layer: a.layer, coords: l.coords_from_index(&ib)? }
            } else {
                self.random_label(&mut rng)?
            };
            if a == b {
                continue;
            }
            best = best.min(distance(&self.encode(&a)?, &self.encode(&b)?));
        }
        Ok(best)
    }

    pub fn decode(&self, x: &[f64], mode: DecodeMode) -> Result<DecodeResult> {
        decode::decode(self, x, mode)
    }
}
