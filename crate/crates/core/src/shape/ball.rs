use bitvec::prelude::*;
use serde::{Deserialize, Serialize};

use super::MuEstimate;
use crate::error::{Error, Result};
use crate::geodesic::distance_field;
use crate::lattice::{sample_config, BoxSpec, Config, WeightLaw};
use crate::replica::{run_replicas, ReplicaTask};

/// The random shape `B(t) = {v : T(o, v) <= t}` within a box, where `o` is
/// the box origin.
#[derive(Clone, Debug)]
pub struct ShapeBall {
    bx: BoxSpec,
    t: u64,
    members: BitVec,
}

impl ShapeBall {
    pub fn threshold(&self) -> u64 {
        self.t
    }

    pub fn box_spec(&self) -> &BoxSpec {
        &self.bx
    }

    pub fn len(&self) -> usize {
        self.members.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        self.members.not_any()
    }

    pub fn contains(&self, p: &[i64]) -> bool {
        crate::lattice::Grid::new(&self.bx)
            .index(p)
            .is_some_and(|v| self.members[v])
    }

    pub fn contains_index(&self, v: usize) -> bool {
        self.members[v]
    }

    pub fn is_subset_of(&self, other: &ShapeBall) -> bool {
        self.bx == other.bx && (self.members.clone() & !other.members.clone()).not_any()
    }
}

/// `B(t)` on `cfg` from one distance field rooted at the box origin.
pub fn shape_ball(cfg: &Config, t: u64) -> Result<ShapeBall> {
    let origin = cfg.box_spec().origin().to_vec();
    let field = distance_field(cfg, &[origin])?;
    let members = field.values().iter().map(|&d| d as u64 <= t).collect();
    Ok(ShapeBall {
        bx: cfg.box_spec().clone(),
        t,
        members,
    })
}

/// Gauge of a star-shaped polygon in the plane, built from time-constant
/// estimates along a fan of directions and symmetrized under the eight
/// lattice symmetries. The polygon's vertices are `x / mu(x)`; between two
/// neighbouring vertices the gauge is linear.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShapeNorm {
    /// Vertices sorted by angle in `(-pi, pi]`.
    vertices: Vec<[f64; 2]>,
}

impl ShapeNorm {
    /// `profile` pairs lattice vectors `x` with `mu(x)`.
    pub fn from_profile(profile: &[(Vec<i64>, f64)]) -> Result<Self> {
        let mut pts: Vec<(f64, [f64; 2])> = Vec::new();
        for (x, mu) in profile {
            if x.len() != 2 {
                return Err(Error::domain(
                    "shape norms are implemented in two dimensions",
                ));
            }
            if !(*mu > 0.0) || !mu.is_finite() {
                return Err(Error::domain(format!(
                    "mu = {mu} along {x:?}: the shape is unbounded"
                )));
            }
            let (a, b) = (x[0] as f64 / mu, x[1] as f64 / mu);
            for (u, v) in [(a, b), (b, a)] {
                for (su, sv) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                    // `+ 0.0` turns -0.0 into 0.0 so atan2 stays in (-pi, pi]
                    let p = [su * u + 0.0, sv * v + 0.0];
                    pts.push((p[1].atan2(p[0]), p));
                }
            }
        }
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        // merge repeated angles by averaging radii
        let mut vertices: Vec<[f64; 2]> = Vec::new();
        let mut i = 0;
        while i < pts.len() {
            let mut j = i;
            let mut r = 0.0;
            while j < pts.len() && (pts[j].0 - pts[i].0).abs() < 1e-12 {
                r += pts[j].1[0].hypot(pts[j].1[1]);
                j += 1;
            }
            let r = r / (j - i) as f64;
            let ang = pts[i].0;
            vertices.push([r * ang.cos(), r * ang.sin()]);
            i = j;
        }
        if vertices.len() < 3 {
            return Err(Error::domain("profile spans too few directions"));
        }
        Ok(ShapeNorm { vertices })
    }

    /// Profile from time-constant estimates, using each mean as `mu(x)`.
    pub fn from_estimates(profile: &[MuEstimate]) -> Result<Self> {
        let pairs: Vec<(Vec<i64>, f64)> = profile
            .iter()
            .map(|m| (m.direction.coords().to_vec(), m.mean()))
            .collect();
        ShapeNorm::from_profile(&pairs)
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    /// Largest coordinate of the unit ball.
    pub fn radius(&self) -> f64 {
        self.vertices
            .iter()
            .map(|p| p[0].abs().max(p[1].abs()))
            .fold(0.0, f64::max)
    }

    pub fn gauge(&self, y: [f64; 2]) -> f64 {
        if y == [0.0, 0.0] {
            return 0.0;
        }
        let ang = y[1].atan2(y[0]);
        let k = self.vertices.len();
        // first vertex at or beyond the angle; wrap around at the ends
        let hi = self
            .vertices
            .iter()
            .position(|p| p[1].atan2(p[0]) >= ang)
            .unwrap_or(0);
        let lo = (hi + k - 1) % k;
        let (p, q) = (self.vertices[lo], self.vertices[hi]);
        // c . p = c . q = 1
        let det = p[0] * q[1] - p[1] * q[0];
        let c = [(q[1] - p[1]) / det, (p[0] - q[0]) / det];
        c[0] * y[0] + c[1] * y[1]
    }
}

/// Replicas of the containment `t(1 - eps) B <= B(t) <= t(1 + eps) B` in two
/// dimensions, with `B` the unit ball of a [`ShapeNorm`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShapeCheckTask {
    pub law: WeightLaw,
    pub norm: ShapeNorm,
    pub t: u64,
    pub epsilon: f64,
    pub seed: u64,
}

impl ReplicaTask for ShapeCheckTask {
    /// `None` when `B(t)` may reach beyond the box.
    type Outcome = Option<bool>;

    fn label(&self) -> String {
        format!("shape-check/t={}/eps={}", self.t, self.epsilon)
    }

    fn run(&self, replica: u64) -> Result<Option<bool>> {
        if !(self.epsilon >= 0.0) {
            return Err(Error::domain(format!(
                "epsilon = {} is negative",
                self.epsilon
            )));
        }
        let t = self.t as f64;
        let r = (self.norm.radius() * t * (1.0 + self.epsilon)).ceil() as i64 + 8;
        let bx = BoxSpec::new(vec![-r, -r], vec![r, r], vec![0, 0])?;
        let cfg = sample_config(&bx, self.law, self.seed, replica)?.with_halo()?;
        let field = distance_field(&cfg, &[vec![0, 0]])?;
        // every path leaving the box crosses the halo
        if field.boundary_min() as u64 <= self.t {
            return Ok(None);
        }
        let grid = cfg.grid();
        // absorb rounding in the gauge so that lattice points on the scaled
        // boundary count as inside
        let tol = 1e-9 * t.max(1.0);
        let inner = t * (1.0 - self.epsilon) + tol;
        let outer = t * (1.0 + self.epsilon) + tol;
        let mut p = [0i64; 2];
        for v in 0..grid.vertex_count() {
            grid.write_point(v, &mut p);
            let g = self.norm.gauge([p[0] as f64, p[1] as f64]);
            let reached = field.value(v) as u64 <= self.t;
            if (g <= inner && !reached) || (reached && g > outer) {
                return Ok(Some(false));
            }
        }
        Ok(Some(true))
    }
}

/// Frequency of the shape-theorem containment over replicas.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShapeCheck {
    pub t: u64,
    pub epsilon: f64,
    pub replicas: u64,
    pub contained: u64,
    pub truncation_failures: u64,
}

impl ShapeCheck {
    pub fn from_outcomes(task: &ShapeCheckTask, outcomes: &[Option<bool>]) -> Result<Self> {
        let kept: Vec<bool> = outcomes.iter().flatten().copied().collect();
        if kept.is_empty() {
            return Err(Error::Estimation(format!(
                "every replica of {} reached the box boundary",
                task.label()
            )));
        }
        Ok(ShapeCheck {
            t: task.t,
            epsilon: task.epsilon,
            replicas: outcomes.len() as u64,
            contained: kept.iter().filter(|&&c| c).count() as u64,
            truncation_failures: (outcomes.len() - kept.len()) as u64,
        })
    }

    /// Fraction of certified replicas satisfying the containment.
    pub fn frequency(&self) -> f64 {
        self.contained as f64 / (self.replicas - self.truncation_failures) as f64
    }
}

/// Containment frequency of `B(t)` between `t(1 -+ eps)` times the unit ball
/// of `norm`, over `replicas` replicas.
pub fn shape_theorem_check(
    law: WeightLaw,
    t: u64,
    epsilon: f64,
    norm: &ShapeNorm,
    replicas: u64,
    seed: u64,
) -> Result<ShapeCheck> {
    let task = ShapeCheckTask {
        law,
        norm: norm.clone(),
        t,
        epsilon,
        seed,
    };
    let outcomes = run_replicas(&task, 0..replicas, 0)?;
    ShapeCheck::from_outcomes(&task, &outcomes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diamond() -> ShapeNorm {
        ShapeNorm::from_profile(&[(vec![1, 0], 1.0), (vec![1, 1], 2.0)]).unwrap()
    }

    #[test]
    fn diamond_gauge_is_l1() {
        let n = diamond();
        assert_eq!(n.vertices().len(), 8);
        for y in [
            [3.0, 1.0],
            [-2.0, 5.0],
            [0.0, -4.0],
            [-1.5, -1.5],
            [7.0, 0.0],
        ] {
            assert!(
                (n.gauge(y) - (y[0].abs() + y[1].abs())).abs() < 1e-9,
                "{y:?}"
            );
        }
        assert_eq!(n.radius(), 1.0);
    }

    #[test]
    fn square_gauge_is_linf() {
        let n = ShapeNorm::from_profile(&[(vec![1, 0], 1.0), (vec![1, 1], 1.0)]).unwrap();
        assert!((n.gauge([3.0, -2.0]) - 3.0).abs() < 1e-9);
        assert!((n.gauge([-1.0, 4.0]) - 4.0).abs() < 1e-9);
    }

    #[test]
    fn degenerate_profiles_are_rejected() {
        assert!(ShapeNorm::from_profile(&[(vec![1, 0], 0.0)]).is_err());
        assert!(ShapeNorm::from_profile(&[(vec![1, 0, 0], 1.0)]).is_err());
    }

    #[test]
    fn balls_of_constant_configs() {
        let bx = BoxSpec::new(vec![-4, -4], vec![4, 4], vec![0, 0]).unwrap();
        let ones = Config::from_fn(&bx, WeightLaw::constant(1), |_, _| 1).unwrap();
        let b0 = shape_ball(&ones, 0).unwrap();
        assert_eq!(b0.len(), 1);
        assert!(b0.contains(&[0, 0]));
        let b2 = shape_ball(&ones, 2).unwrap();
        assert_eq!(b2.len(), 13);
        assert!(b0.is_subset_of(&b2) && !b2.is_subset_of(&b0));
        let zeros = Config::from_fn(&bx, WeightLaw::constant(0), |_, _| 0).unwrap();
        assert_eq!(shape_ball(&zeros, 0).unwrap().len(), 81);
    }

    #[test]
    fn constant_law_always_contained() {
        let c = shape_theorem_check(WeightLaw::constant(1), 12, 0.0, &diamond(), 2, 0).unwrap();
        assert_eq!(c.frequency(), 1.0);
        assert_eq!(c.truncation_failures, 0);
    }
}
