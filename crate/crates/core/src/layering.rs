//! Choice of the torus layers: sets of nonnegative unit radius vectors with
//! pairwise distance at least `d`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{distance, norm, RadiusVector};

/// Slack allowed on pairwise layer distances.
pub const LAYER_DISTANCE_TOL: f64 = 1e-12;

/// How a layer family was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Polygon2d,
    Permutation,
    External,
    Sliced,
}

/// The radius vectors of a torus layer code, in a fixed order.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerFamily {
    pub dim_l: usize,
    pub dmin: f64,
    pub radii: Vec<RadiusVector>,
    pub provenance: Provenance,
    /// Layer angles for 2-D families, aligned with `radii`.
    pub angles: Option<Vec<f64>>,
}

impl LayerFamily {
    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    /// Smallest pairwise distance between layer radii (infinite for one layer).
    pub fn min_pairwise_distance(&self) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..self.radii.len() {
            for j in i + 1..self.radii.len() {
                best = best.min(distance(self.radii[i].entries(), self.radii[j].entries()));
            }
        }
        best
    }

    /// Angle `atan2(c_2, c_1)` of layer `i` of a 2-D family.
    pub fn angle(&self, i: usize) -> Option<f64> {
        if self.dim_l != 2 {
            return None;
        }
        match &self.angles {
            Some(a) => Some(a[i]),
            None => {
                let c = self.radii[i].entries();
                Some(c[1].atan2(c[0]))
            }
        }
    }
}

fn check_dmin(d: f64) -> Result<()> {
    if !(d > 0.0 && d <= SQRT_2 + 1e-15) {
        return Err(Error::InvalidParameter(format!(
            "minimum distance {d} outside (0, sqrt 2]"
        )));
    }
    Ok(())
}

fn verify_pairs(radii: &[RadiusVector], d: f64) -> Result<()> {
    for i in 0..radii.len() {
        for j in i + 1..radii.len() {
            let dist = distance(radii[i].entries(), radii[j].entries());
            if dist < d - LAYER_DISTANCE_TOL {
                return Err(Error::DistanceViolation {
                    first: i,
                    second: j,
                    distance: dist,
                    required: d,
                });
            }
        }
    }
    Ok(())
}

/// Layers on the quarter circle placed symmetrically about the diagonal.
///
/// Angles are `pi/4 +- (2j - 1) asin(d/2)` for every `j` keeping the angle in
/// `[0, pi/2]`, sorted ascending.
pub fn polygon2d_layers(d: f64) -> Result<LayerFamily> {
    check_dmin(d)?;
    let half = (d / 2.0).asin();
    let tol = 1e-12;
    let mut angles = Vec::new();
    let mut j = 1u32;
    loop {
        let off = f64::from(2 * j - 1) * half;
        if off > FRAC_PI_4 + tol {
            break;
        }
        let up = (FRAC_PI_4 + off).min(FRAC_PI_2);
        let down = (FRAC_PI_4 - off).max(0.0);
        angles.push(up);
        angles.push(down);
        j += 1;
    }
    angles.sort_by(f64::total_cmp);
    let radii = angles.iter().map(|&a| radius_at_angle(a)).collect();
    Ok(LayerFamily {
        dim_l: 2,
        dmin: d,
        radii,
        provenance: Provenance::Polygon2d,
        angles: Some(angles),
    })
}

/// `(cos a, sin a)` with the quarter-circle end points made exactly degenerate.
pub fn radius_at_angle(a: f64) -> RadiusVector {
    if a <= 0.0 {
        RadiusVector::new(vec![1.0, 0.0]).expect("unit")
    } else if a >= FRAC_PI_2 {
        RadiusVector::new(vec![0.0, 1.0]).expect("unit")
    } else {
        RadiusVector::from_angle(a)
    }
}

/// Parameters of the permutation family `(t, 1, ..., 1) / sqrt(L - 1 + t^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PermutationLayerParams {
    pub t: f64,
    pub dim_l: usize,
}

impl PermutationLayerParams {
    /// Root `t > 1` of `2 (t - 1)^2 / (L - 1 + t^2) = d^2`.
    pub fn solve(dim_l: usize, d: f64) -> Result<Self> {
        if dim_l < 2 {
            return Err(Error::InvalidParameter(format!("L = {dim_l} must be at least 2")));
        }
        if !(d > 0.0 && d < SQRT_2) {
            return Err(Error::InvalidParameter(format!("d = {d} outside (0, sqrt 2)")));
        }
        let d2 = d * d;
        let a = 2.0 - d2;
        let disc = 4.0 - a * (2.0 - d2 * (dim_l as f64 - 1.0));
        if disc < 0.0 {
            return Err(Error::InvalidParameter(format!("no real root for d = {d}")));
        }
        let t = (2.0 + disc.sqrt()) / a;
        if !(t > 1.0) || !t.is_finite() {
            return Err(Error::InvalidParameter(format!("no root t > 1 for d = {d}")));
        }
        Ok(Self { t, dim_l })
    }

    /// Distance between two distinct permutations of the layer vector.
    pub fn pair_distance(&self) -> f64 {
        SQRT_2 * (self.t - 1.0) / (self.dim_l as f64 - 1.0 + self.t * self.t).sqrt()
    }

    /// The radius vector with the large entry at position `pos`.
    pub fn radius(&self, pos: usize) -> RadiusVector {
        let n = (self.dim_l as f64 - 1.0 + self.t * self.t).sqrt();
        let mut v = vec![1.0 / n; self.dim_l];
        v[pos] = self.t / n;
        RadiusVector::with_tolerance(v, 1e-12).expect("unit by construction")
    }
}

/// All `L` distinct permutations of the vector `(t, 1, ..., 1)`, normalized.
pub fn permutation_layers(dim_l: usize, d: f64) -> Result<LayerFamily> {
    let p = PermutationLayerParams::solve(dim_l, d)?;
    Ok(LayerFamily {
        dim_l,
        dmin: d,
        radii: (0..dim_l).map(|i| p.radius(i)).collect(),
        provenance: Provenance::Permutation,
        angles: None,
    })
}

/// Layers taken from a caller supplied spherical code.
///
/// Points with a negative coordinate are dropped; the rest must be unit
/// vectors at pairwise distance at least `d`.
pub fn external_layers(dim_l: usize, d: f64, points: &[Vec<f64>]) -> Result<LayerFamily> {
    let mut radii = Vec::new();
    for p in points {
        if p.len() != dim_l {
            return Err(Error::DimensionMismatch { expected: dim_l, got: p.len() });
        }
        if p.iter().any(|v| *v < -LAYER_DISTANCE_TOL) {
            continue;
        }
        let clean: Vec<f64> = p.iter().map(|v| v.max(0.0)).collect();
        radii.push(RadiusVector::with_tolerance(clean, 1e-9)?);
    }
    verify_pairs(&radii, d)?;
    Ok(LayerFamily {
        dim_l,
        dmin: d,
        radii,
        provenance: Provenance::External,
        angles: None,
    })
}

/// Parses one point per line; coordinates separated by whitespace or commas.
/// Blank lines and lines starting with `#` are skipped.
pub fn parse_points(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<f64>().map_err(|e| Error::Parse {
                    line: idx + 1,
                    message: format!("{s:?}: {e}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = out.first().map(|r: &Vec<f64>| r.len()) {
            if first != row.len() {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: format!("expected {first} coordinates, found {}", row.len()),
                });
            }
        }
        out.push(row);
    }
    Ok(out)
}

/// Contents of one slice of an odd-dimensional sphere.
#[derive(Debug, Clone)]
pub enum RingContent<T> {
    /// A scaled copy of an even-dimensional code built for distance `d / r`.
    Code(T),
    /// Two antipodal points of the ring.
    Antipodal,
    /// One point of the ring, or the pole itself when `r = 0`.
    Single,
}

/// One slice `x_{2L+1} = height` of the sphere.
#[derive(Debug, Clone)]
pub struct Ring<T> {
    pub height: f64,
    pub ring_radius: f64,
    pub polar_angle: f64,
    pub content: RingContent<T>,
}

impl<T> Ring<T> {
    pub fn count(&self, code_size: impl Fn(&T) -> u128) -> u128 {
        match &self.content {
            RingContent::Code(c) => code_size(c),
            RingContent::Antipodal => 2,
            RingContent::Single => 1,
        }
    }
}

/// Description of the ring placement, reported with sliced codes.
pub const SLICE_RULE: &str = "polar angles (m + 1/2) * 2 asin(d/2) - pi/2 for m = 0, 1, ...; \
ring of radius r carries an even-dimensional code for distance d/r when d/r <= sqrt 2, an \
antipodal pair when d/r <= 2, one point otherwise; north pole added when its angular gap to \
the last ring is at least 2 asin(d/2)";

/// Slices the unit sphere of odd dimension into parallel rings.
///
/// Adjacent polar angles differ by `2 asin(d/2)`, so points on different rings
/// are at least `d` apart; each ring holds a code for distance `d / r`.
pub fn slice_odd_sphere<T, F>(d: f64, inner_builder: F) -> Result<Vec<Ring<T>>>
where
    F: Fn(f64) -> Result<T>,
{
    check_dmin(d)?;
    let theta = 2.0 * (d / 2.0).asin();
    let mut rings = Vec::new();
    let mut m = 0u32;
    loop {
        let phi = (f64::from(m) + 0.5) * theta - FRAC_PI_2;
        if phi >= FRAC_PI_2 {
            break;
        }
        let r = phi.cos();
        let ratio = d / r;
        let content = if ratio <= SQRT_2 * (1.0 + 1e-12) {
            RingContent::Code(inner_builder(ratio.min(SQRT_2))?)
        } else if ratio <= 2.0 * (1.0 + 1e-12) {
            RingContent::Antipodal
        } else {
            RingContent::Single
        };
        rings.push(Ring {
            height: phi.sin(),
            ring_radius: r,
            polar_angle: phi,
            content,
        });
        m += 1;
    }
    let last = rings.last().map_or(-FRAC_PI_2, |r| r.polar_angle);
    if FRAC_PI_2 - last >= theta - 1e-12 {
        rings.push(Ring {
            height: 1.0,
            ring_radius: 0.0,
            polar_angle: FRAC_PI_2,
            content: RingContent::Single,
        });
    }
    debug_assert!(rings.iter().all(|r| r.polar_angle <= PI));
    Ok(rings)
}

/// Norm check used by callers that lift points into the odd-dimensional sphere.
pub fn is_unit(v: &[f64], tol: f64) -> bool {
    (norm(v) - 1.0).abs() <= tol
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polygon_at_point_three() {
        let fam = polygon2d_layers(0.3).unwrap();
        let a = fam.angles.clone().unwrap();
        let expected = [0.032559, 0.333694, 0.634829, 0.935966, 1.237103, 1.538240];
        assert_eq!(a.len(), 6);
        for (x, y) in a.iter().zip(expected) {
            assert!((x - y).abs() < 1e-5, "{x} vs {y}");
        }
        let c = fam.radii[3].entries();
        assert!((c[0] - 0.593041).abs() < 1e-6 && (c[1] - 0.805173).abs() < 1e-6);
        // symmetry and spacing
        let step = 2.0 * 0.15f64.asin();
        for i in 0..6 {
            assert!((a[i] + a[5 - i] - FRAC_PI_2).abs() < 1e-12);
            if i > 0 {
                assert!((a[i] - a[i - 1] - step).abs() < 1e-12);
            }
        }
        assert!(fam.min_pairwise_distance() >= 0.3 - 1e-12);
    }

    #[test]
    fn polygon_boundary() {
        let fam = polygon2d_layers(SQRT_2).unwrap();
        assert_eq!(fam.len(), 2);
        assert_eq!(fam.radii[0].entries(), &[1.0, 0.0]);
        assert_eq!(fam.radii[1].entries(), &[0.0, 1.0]);
        assert!(polygon2d_layers(1.5).is_err());
        assert!(polygon2d_layers(0.0).is_err());
    }

    #[test]
    fn permutation_root() {
        let p = PermutationLayerParams::solve(24, 0.1).unwrap();
        assert!((p.t - 1.35234).abs() < 1e-5);
        let c = p.radius(0);
        assert!((c.get(0) - 0.271399).abs() < 1e-6);
        assert!((c.get(1) - 0.200688).abs() < 1e-6);
        let fam = permutation_layers(24, 0.1).unwrap();
        for i in 0..24 {
            for j in i + 1..24 {
                let dd = distance(fam.radii[i].entries(), fam.radii[j].entries());
                assert!((dd - 0.1).abs() < 1e-9);
            }
        }
        assert!(permutation_layers(1, 0.1).is_err());
        assert!(permutation_layers(4, 1.5).is_err());
    }

    #[test]
    fn external_filters_and_verifies() {
        let fam = polygon2d_layers(0.3).unwrap();
        let pts: Vec<Vec<f64>> = fam.radii.iter().map(|r| r.entries().to_vec()).collect();
        let ext = external_layers(2, 0.3, &pts).unwrap();
        assert_eq!(ext.radii, fam.radii);

        let s = (1.0f64 - 0.01).sqrt();
        let ext = external_layers(2, 0.3, &[vec![-0.1, s], vec![1.0, 0.0]]).unwrap();
        assert_eq!(ext.len(), 1);

        let b = 2.0 * (0.29f64 / 2.0).asin();
        let err = external_layers(2, 0.3, &[vec![1.0, 0.0], vec![b.cos(), b.sin()]]).unwrap_err();
        match err {
            Error::DistanceViolation { first, second, distance, .. } => {
                assert_eq!((first, second), (0, 1));
                assert!((distance - 0.29).abs() < 1e-12);
            }
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn parse_points_reports_line() {
        let pts = parse_points("1, 0\n# c\n\n0 1\n").unwrap();
        assert_eq!(pts, vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        match parse_points("1 0\n0 x\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            r => panic!("{r:?}"),
        }
    }

    #[test]
    fn slicing_largest_distance() {
        let rings = slice_odd_sphere(SQRT_2, |_| Ok(0u128)).unwrap();
        let total: u128 = rings.iter().map(|r| r.count(|c| *c)).sum();
        assert!(total >= 4);
    }
}
