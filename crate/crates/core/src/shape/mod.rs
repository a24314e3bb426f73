//! Monte Carlo estimation of the time constant, the flat-edge defect along
//! chords, random shapes and the concentration of point-to-plane times.

mod ball;
mod defect;
mod mu;
mod plane;

pub use ball::{shape_ball, shape_theorem_check, ShapeBall, ShapeCheck, ShapeCheckTask, ShapeNorm};
pub use defect::{flat_defect, Chord, DefectEstimate, DefectTask};
pub use mu::{
    bounds_check, estimate_mu, subadditivity_check, BoundsReport, BoundsRow, MuEstimate, MuTask,
    Subadditivity,
};
pub use plane::{concentration_stats, ConcentrationRow, PlaneTask, TAIL_LEVELS};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geodesic::{certify_target, distance_field};
use crate::lattice::{sample_config, BoxSpec, WeightLaw};

/// A lattice direction in lowest terms with positive first coordinate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct Direction {
    coords: Vec<i64>,
    norm: f64,
}

impl Direction {
    pub fn new(coords: Vec<i64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::domain("a direction needs at least two coordinates"));
        }
        if coords[0] <= 0 {
            return Err(Error::domain(format!(
                "direction {coords:?} must have a positive first coordinate"
            )));
        }
        let g = coords.iter().fold(0, |g, &c| gcd(g, c.unsigned_abs()));
        if g != 1 {
            return Err(Error::domain(format!(
                "direction {coords:?} is not in lowest terms"
            )));
        }
        let norm = coords.iter().map(|&c| (c * c) as f64).sum::<f64>().sqrt();
        Ok(Direction { coords, norm })
    }

    /// The axis direction `(1, 0, ..., 0)`.
    pub fn axis(d: usize) -> Self {
        let mut coords = vec![0; d];
        coords[0] = 1;
        Direction { coords, norm: 1.0 }
    }

    pub fn coords(&self) -> &[i64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn l1(&self) -> i64 {
        self.coords.iter().map(|c| c.abs()).sum()
    }

    pub fn linf(&self) -> i64 {
        self.coords.iter().map(|c| c.abs()).max().unwrap_or(0)
    }

    pub fn scaled(&self, n: i64) -> Vec<i64> {
        self.coords.iter().map(|c| c * n).collect()
    }
}

impl TryFrom<Vec<i64>> for Direction {
    type Error = Error;

    fn try_from(v: Vec<i64>) -> Result<Self> {
        Direction::new(v)
    }
}

impl From<Direction> for Vec<i64> {
    fn from(d: Direction) -> Vec<i64> {
        d.coords
    }
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", format_point(&self.coords))
    }
}

/// `(a,b,c)` without spaces; used in labels and CSV cells.
pub fn format_point(p: &[i64]) -> String {
    let parts: Vec<String> = p.iter().map(|c| c.to_string()).collect();
    format!("({})", parts.join(","))
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// How far the sampled box extends beyond the points of interest.
///
/// The margin is `ceil(factor * r) + extra`, where `r` is the largest
/// Euclidean norm among the targets. Laws with an atom at zero need wide
/// margins before the halo certificate succeeds; laws bounded below by one
/// need little.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarginPolicy {
    pub factor: f64,
    pub extra: i64,
}

impl MarginPolicy {
    pub fn for_law(law: &WeightLaw) -> Self {
        if law.min_weight() == 0 {
            MarginPolicy {
                factor: 0.6,
                extra: 8,
            }
        } else {
            MarginPolicy {
                factor: 0.25,
                extra: 8,
            }
        }
    }

    pub fn margin(&self, targets: &[Vec<i64>]) -> i64 {
        let r = targets
            .iter()
            .map(|t| t.iter().map(|&c| (c * c) as f64).sum::<f64>().sqrt())
            .fold(0.0, f64::max);
        (self.factor * r).ceil() as i64 + self.extra
    }
}

/// Passage times from the origin to each target on one replica, or `None` if
/// some target could not be certified.
///
/// The halo field is a lower bound for the infinite-lattice time and the plain
/// box field an upper bound. A target is certified when the halo certificate
/// holds or, failing that, when the two bounds agree (this rescues laws whose
/// minimum weight is attained everywhere, such as all-zero configurations).
pub(crate) fn certified_times(
    law: WeightLaw,
    targets: &[Vec<i64>],
    margin: i64,
    seed: u64,
    replica: u64,
) -> Result<Option<Vec<u32>>> {
    let d = targets
        .first()
        .ok_or_else(|| Error::domain("no targets"))?
        .len();
    let origin = vec![0i64; d];
    let mut points = vec![origin.clone()];
    points.extend(targets.iter().cloned());
    let bx = BoxSpec::covering(&points, margin)?;
    let plain = sample_config(&bx, law, seed, replica)?;
    let cfg = plain.with_halo()?;
    let field = distance_field(&cfg, std::slice::from_ref(&origin))?;
    let mut upper = None;
    let mut times = Vec::with_capacity(targets.len());
    for t in targets {
        let lower = field.at(t).expect("target lies in the covering box");
        if !certify_target(&cfg, &field, t)? {
            if upper.is_none() {
                upper = Some(distance_field(&plain, std::slice::from_ref(&origin))?);
            }
            let inner = upper.as_ref().and_then(|f| f.at(t));
            if inner != Some(lower) {
                return Ok(None);
            }
        }
        times.push(lower);
    }
    Ok(Some(times))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn directions_are_primitive() {
        assert!(Direction::new(vec![2, 0]).is_err());
        assert!(Direction::new(vec![0, 1]).is_err());
        assert!(Direction::new(vec![-1, 1]).is_err());
        assert!(Direction::new(vec![1]).is_err());
        let x = Direction::new(vec![3, -1]).unwrap();
        assert_eq!(x.l1(), 4);
        assert_eq!(x.linf(), 3);
        assert!((x.norm() - 10f64.sqrt()).abs() < 1e-12);
        assert_eq!(x.scaled(4), vec![12, -4]);
        assert_eq!(x.to_string(), "(3,-1)");
        assert_eq!(Direction::axis(3).coords(), &[1, 0, 0]);
    }

    #[test]
    fn direction_serde_validates() {
        let x: Direction = serde_json::from_str("[2,1]").unwrap();
        assert_eq!(x.coords(), &[2, 1]);
        assert!(serde_json::from_str::<Direction>("[2,2]").is_err());
        assert_eq!(serde_json::to_string(&x).unwrap(), "[2,1]");
    }

    #[test]
    fn margin_policy() {
        let bern = MarginPolicy::for_law(&WeightLaw::bernoulli(0.25).unwrap());
        assert_eq!(bern.margin(&[vec![3, 4]]), 3 + 8);
        let dl = MarginPolicy::for_law(&WeightLaw::new(1, 2, 0.8).unwrap());
        assert_eq!(dl.margin(&[vec![0, 8], vec![3, 4]]), 2 + 8);
        // p = 0 puts no mass at zero
        let ones = MarginPolicy::for_law(&WeightLaw::bernoulli(0.0).unwrap());
        assert_eq!(ones.factor, 0.25);
    }

    #[test]
    fn constant_law_times_are_l1() {
        let t = certified_times(WeightLaw::constant(1), &[vec![5, -2], vec![0, 3]], 2, 1, 0)
            .unwrap()
            .unwrap();
        assert_eq!(t, vec![7, 3]);
    }
}
