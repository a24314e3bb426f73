//! First-passage percolation on finite boxes of `Z^d` with two-valued edge
//! weights: exact passage times and geodesic unions, Monte Carlo estimates of
//! the time constant and shape, slab geometry of geodesics, and a seeded,
//! resumable experiment harness.

pub mod error;
pub mod geodesic;
pub mod harness;
pub mod lattice;
pub mod regime;
pub mod replica;
pub mod shape;
pub mod slab;
pub mod stats;

pub use error::{Error, Result};
