//! Geometry of geodesic unions: heights above the chord, slab restrictions
//! and per-hyperplane exit counts.

mod scan;

pub use scan::{
    height_scan, ExponentFit, HeightRow, HeightSample, HeightScan, HeightTask, TrendCheck,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geodesic::{geodesic_union, GeodesicSet};
use crate::lattice::Config;

/// Closed interval `[lo, hi]` of hyperplanes `x_1 = i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlabSpec {
    pub lo: i64,
    pub hi: i64,
}

impl SlabSpec {
    pub fn new(lo: i64, hi: i64) -> Result<Self> {
        if lo > hi {
            return Err(Error::domain(format!("empty slab [{lo}, {hi}]")));
        }
        Ok(SlabSpec { lo, hi })
    }

    /// `[n/2 - kappa n, n/2]`, shrunk to the lattice planes it contains.
    pub fn midpoint(n: i64, kappa: f64) -> Result<Self> {
        check_kappa(kappa)?;
        let half = n as f64 / 2.0;
        SlabSpec::new(inward_ceil(half - kappa * n as f64), half.floor() as i64)
    }

    /// `[n - kappa n, n]`, shrunk to the lattice planes it contains.
    pub fn tail(n: i64, kappa: f64) -> Result<Self> {
        check_kappa(kappa)?;
        SlabSpec::new(inward_ceil(n as f64 - kappa * n as f64), n)
    }

    pub fn shifted(&self, by: i64) -> SlabSpec {
        SlabSpec {
            lo: self.lo + by,
            hi: self.hi + by,
        }
    }

    pub fn planes(&self) -> std::ops::RangeInclusive<i64> {
        self.lo..=self.hi
    }
}

/// `ceil` that ignores rounding noise just above an integer.
fn inward_ceil(x: f64) -> i64 {
    (x - 1e-9).ceil() as i64
}

pub fn check_kappa(kappa: f64) -> Result<()> {
    if kappa > 0.0 && kappa < 0.5 {
        Ok(())
    } else {
        Err(Error::domain(format!("κ must be in (0, 1/2), got {kappa}")))
    }
}

/// Squared Euclidean distance `num / den` from a vertex to the line through
/// the endpoints of a geodesic set, kept as an exact fraction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SquaredDistance {
    pub num: i128,
    pub den: i128,
}

impl SquaredDistance {
    pub fn value(&self) -> f64 {
        (self.num as f64 / self.den as f64).sqrt()
    }
}

/// Squared distance from `u` to the line through `s` and `t`; the distance
/// to `s` if the endpoints coincide.
pub fn squared_distance_to_line(u: &[i64], s: &[i64], t: &[i64]) -> SquaredDistance {
    let a: Vec<i128> = u.iter().zip(s).map(|(u, s)| (u - s) as i128).collect();
    let b: Vec<i128> = t.iter().zip(s).map(|(t, s)| (t - s) as i128).collect();
    let aa: i128 = a.iter().map(|x| x * x).sum();
    let bb: i128 = b.iter().map(|x| x * x).sum();
    if bb == 0 {
        return SquaredDistance { num: aa, den: 1 };
    }
    let ab: i128 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
    // Lagrange: |a|^2 |b|^2 - (a.b)^2 = |a x b|^2
    SquaredDistance {
        num: aa * bb - ab * ab,
        den: bb,
    }
}

/// Largest squared distance of a member vertex from the chord line.
pub fn height_of(set: &GeodesicSet) -> SquaredDistance {
    let (s, t) = (set.source(), set.target());
    let mut best = squared_distance_to_line(s, s, t);
    let mut p = vec![0i64; s.len()];
    for v in set.member_indices() {
        set.grid().write_point(v, &mut p);
        let d = squared_distance_to_line(&p, s, t);
        if d.num > best.num {
            best = d;
        }
    }
    best
}

/// Height of the geodesic union between `src` and `dst`: the largest
/// Euclidean distance of a member vertex from the line through them.
pub fn height(cfg: &Config, src: &[i64], dst: &[i64]) -> Result<f64> {
    Ok(height_of(&geodesic_union(cfg, src, dst)?).value())
}

/// The union restricted to the slab `[n/2 - kappa n, n/2]`, measured from the
/// source's first coordinate, where `n` is the `x_1`-extent of the pair.
pub fn slab_union(cfg: &Config, src: &[i64], dst: &[i64], kappa: f64) -> Result<GeodesicSet> {
    check_kappa(kappa)?;
    let n = dst[0] - src[0];
    if n <= 0 {
        return Err(Error::domain(
            "the target must lie beyond the source along x_1",
        ));
    }
    let slab = SlabSpec::midpoint(n, kappa)?.shifted(src[0]);
    Ok(geodesic_union(cfg, src, dst)?.restrict_to_slab(slab.lo, slab.hi))
}

/// Member counts on each hyperplane of a slab and the exits on the least
/// crowded one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExitReport {
    /// `(i, |L[i] ∩ union|)` for each plane of the slab.
    pub counts: Vec<(i64, usize)>,
    /// Plane with the fewest members; the lowest index wins ties.
    pub plane: i64,
    pub k: usize,
    /// Members of the selected plane, in index order.
    pub exits: Vec<Vec<i64>>,
}

impl ExitReport {
    pub fn from_set(set: &GeodesicSet, slab: SlabSpec) -> Result<Self> {
        let (a, b) = (set.source()[0], set.target()[0]);
        let (first, last) = (a.min(b), a.max(b));
        if slab.lo < first || slab.hi > last {
            return Err(Error::domain(format!(
                "slab [{}, {}] is not between the planes x_1 = {first} and x_1 = {last}",
                slab.lo, slab.hi
            )));
        }
        let counts: Vec<(i64, usize)> = slab.planes().map(|i| (i, set.plane_count(i))).collect();
        let &(plane, k) = counts
            .iter()
            .min_by_key(|&&(i, c)| (c, i))
            .expect("slab is nonempty");
        let exits = set
            .plane_members(plane)
            .into_iter()
            .map(|v| set.grid().point(v))
            .collect();
        Ok(ExitReport {
            counts,
            plane,
            k,
            exits,
        })
    }
}

/// Exit counts of the geodesic union between `src` and `dst` over `slab`.
pub fn exits(cfg: &Config, src: &[i64], dst: &[i64], slab: SlabSpec) -> Result<ExitReport> {
    ExitReport::from_set(&geodesic_union(cfg, src, dst)?, slab)
}
