//! Structural JSON form of a code: radii and per-layer parameters, never
//! point lists. Big integers are decimal strings.

use std::collections::BTreeMap;
use std::path::Path;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::cyclic::CyclicLayerCode;
use crate::error::{Error, Result};
use crate::geometry::RadiusVector;
use crate::lattice::Bundled;

use super::{GridLayer, LayerCodebook, LayerContent, QuotientLayer, TorusCode};

/// Radius vectors read back from JSON may be off unit length by rounding.
const RADIUS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum LayerSpec {
    Cyclic {
        alpha: f64,
        order_m: u64,
        generators: [u64; 2],
        dmin_achieved: f64,
    },
    Quotient {
        lattice: String,
        beta: f64,
        guard: f64,
        /// Invariant factors, for information only.
        invariant_factors: Vec<String>,
    },
    Grid {
        counts: Vec<u64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerEntry {
    pub radius: Vec<f64>,
    pub cardinality: String,
    #[serde(flatten)]
    pub spec: LayerSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodebookFile {
    #[serde(rename = "L")]
    pub dim_l: usize,
    pub d: f64,
    #[serde(rename = "total_M")]
    pub total_m: String,
    #[serde(default)]
    pub metadata: BTreeMap<String, String>,
    pub layers: Vec<LayerEntry>,
}

impl From<&TorusCode> for CodebookFile {
    fn from(code: &TorusCode) -> Self {
        let layers = code
            .layers
            .iter()
            .map(|l| LayerEntry {
                radius: l.radius.entries().to_vec(),
                cardinality: l.cardinality.to_string(),
                spec: match &l.content {
                    LayerContent::Cyclic(c) => LayerSpec::Cyclic {
                        alpha: c.alpha,
                        order_m: c.order_m,
                        generators: [c.generators.0, c.generators.1],
                        dmin_achieved: c.dmin_achieved,
                    },
                    LayerContent::Quotient(q) => LayerSpec::Quotient {
                        lattice: q.lattice.name(),
                        beta: q.beta,
                        guard: q.guard,
                        invariant_factors: q.group.nontrivial_factors().iter().map(|f| f.to_string()).collect(),
                    },
                    LayerContent::Grid(g) => LayerSpec::Grid { counts: g.counts.clone() },
                },
            })
            .collect();
        CodebookFile {
            dim_l: code.dim_l,
            d: code.dmin_design,
            total_m: code.total_m.to_string(),
            metadata: code.metadata.clone(),
            layers,
        }
    }
}

impl CodebookFile {
    /// Rebuilds the code; lattice layers are refitted from their parameters.
    pub fn to_code(&self) -> Result<TorusCode> {
        let layers = self
            .layers
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let radius = RadiusVector::with_tolerance(e.radius.clone(), RADIUS_TOL)?;
                let content = match &e.spec {
                    LayerSpec::Cyclic { alpha, order_m, generators, dmin_achieved } => {
                        LayerContent::Cyclic(CyclicLayerCode {
                            alpha: *alpha,
                            order_m: *order_m,
                            generators: (generators[0], generators[1]),
                            dmin_achieved: *dmin_achieved,
                        })
                    }
                    LayerSpec::Quotient { lattice, beta, guard, .. } => LayerContent::Quotient(Box::new(
                        QuotientLayer::new(Bundled::parse(lattice)?, *beta, *guard, &radius)?,
                    )),
                    LayerSpec::Grid { counts } => LayerContent::Grid(GridLayer { counts: counts.clone() }),
                };
                let layer = LayerCodebook::new(radius, content)?;
                if layer.cardinality.to_string() != e.cardinality {
                    return Err(Error::Format(format!(
                        "layer {i}: stored cardinality {} but parameters give {}",
                        e.cardinality, layer.cardinality
                    )));
                }
                Ok(layer)
            })
            .collect::<Result<Vec<_>>>()?;
        let mut code = TorusCode::from_layers(self.dim_l, self.d, layers)?;
        let stored: BigUint = self
            .total_m
            .parse()
            .map_err(|_| Error::Format(format!("total_M {:?} is not a decimal integer", self.total_m)))?;
        if stored != code.total_m {
            return Err(Error::Format(format!("total_M {stored} but layers sum to {}", code.total_m)));
        }
        code.metadata = self.metadata.clone();
        Ok(code)
    }
}

pub fn save_codebook(code: &TorusCode, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(&CodebookFile::from(code))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

pub fn load_codebook(path: &Path) -> Result<TorusCode> {
    let text = std::fs::read_to_string(path)?;
    let file: CodebookFile = serde_json::from_str(&text)?;
    file.to_code()
}
