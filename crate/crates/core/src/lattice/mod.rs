//! Exact lattice machinery for lattice-based layers.

pub mod basis;
pub mod fit;
pub mod io;
pub mod leech;
pub mod nearest;
pub mod quotient;
pub mod snf;

pub use basis::{LatticeBasis, Rat};
pub use fit::{certify_minimal_step, orthogonal_fit, orthogonal_step, per_axis_distance, BoxFit};
pub use leech::{leech_basis, Bundled};
pub use nearest::{nearest_point, NearestMode, NearestPoint, NearestPointSolver};
pub use quotient::{quotient_structure, GroupStructure};
pub use snf::{hermite_normal_form, smith_normal_form, SmithForm};
