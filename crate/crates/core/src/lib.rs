//! Torus layer spherical codes: construction, bounds, labeling and decoding.

pub mod bounds;
pub mod cli;
pub mod codec;
pub mod cyclic;
pub mod error;
pub mod geometry;
pub mod layering;
pub mod lattice;

pub use error::{Error, Result};
