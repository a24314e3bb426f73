//! Finite boxes of `Z^d`, their vertex and edge indexing, and reproducible
//! two-valued edge-weight configurations.

mod config;
mod grid;

pub use config::{edge_uniform, edge_weight, sample_config, Config, WeightLaw};
pub use grid::{BoxSpec, EdgeRef, Grid, MAX_DIM, MAX_VERTICES};
