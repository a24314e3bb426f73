//! Exact passage-time fields, point and plane passage times, optimal paths and
//! the union of all optimal paths.

mod field;
pub mod oracle;
mod path;
mod union;

pub use field::{
    bounded_field, certify_target, distance_field, plane_time, point_time, stopped_field,
    truncation_check, DistField,
};
pub use path::{extract_path, Path, TieRule};
pub use union::{
    brute_force_union, geodesic_union, Criterion, GeodesicSet, BRUTE_FORCE_MAX_VERTICES,
};
