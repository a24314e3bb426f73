use serde::{Deserialize, Serialize};

use super::MarginPolicy;
use crate::error::{Error, Result};
use crate::geodesic::stopped_field;
use crate::lattice::{sample_config, BoxSpec, WeightLaw};
use crate::replica::{derive_seed, run_replicas, ReplicaTask};
use crate::stats::Summary;

/// Levels `z` of the tail frequencies `P(|b - mean| >= z n)`.
pub const TAIL_LEVELS: [f64; 3] = [0.05, 0.1, 0.2];

/// Replicas of the point-to-plane time from the origin to `x_1 = n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlaneTask {
    pub law: WeightLaw,
    pub dim: usize,
    pub n: i64,
    pub seed: u64,
    pub margin: MarginPolicy,
}

impl PlaneTask {
    pub fn new(law: WeightLaw, dim: usize, n: i64, seed: u64) -> Self {
        PlaneTask {
            margin: MarginPolicy::for_law(&law),
            law,
            dim,
            n,
            seed,
        }
    }

    /// Backward and lateral extent of the box. Plane geodesics may end far
    /// off axis, so the margin is twice the point-to-point one.
    fn extent(&self) -> i64 {
        (2.0 * self.margin.factor * self.n as f64).ceil() as i64 + self.margin.extra
    }
}

impl ReplicaTask for PlaneTask {
    /// `None` when the replica failed the truncation certificate.
    type Outcome = Option<u32>;

    fn label(&self) -> String {
        format!("plane/d={}/n={}", self.dim, self.n)
    }

    fn run(&self, replica: u64) -> Result<Option<u32>> {
        if self.n < 1 {
            return Err(Error::domain(format!(
                "scale n = {} must be positive",
                self.n
            )));
        }
        let w = self.extent();
        let lo = vec![-w; self.dim];
        let mut hi = vec![w; self.dim];
        hi[0] = self.n;
        let origin = vec![0; self.dim];
        let bx = BoxSpec::new(lo, hi.clone(), origin.clone())?;
        let cfg = sample_config(&bx, self.law, self.seed, replica)?.with_halo()?;
        let field = stopped_field(&cfg, &[origin], self.n)?;
        let grid = cfg.grid();
        // the plane restricted to the inner box
        let mut corner = cfg.box_spec().lo().to_vec();
        corner[0] = self.n;
        let mut best = u32::MAX;
        let mut p = vec![0i64; self.dim];
        let stride = grid.stride(0);
        let start = grid.index(&corner).expect("plane corner in box");
        for v in start..start + stride {
            grid.write_point(v, &mut p);
            if p[1..].iter().zip(&hi[1..]).all(|(c, h)| c.abs() <= *h) {
                best = best.min(field.value(v));
            }
        }
        // A path leaving the inner box before reaching the plane crosses a
        // halo vertex with x_1 < n. Paths are stopped at the plane, so the
        // halo cannot be entered from it at no cost.
        let mut escape = u32::MAX;
        grid.for_each_boundary(|v| {
            grid.write_point(v, &mut p);
            if p[0] < self.n {
                escape = escape.min(field.value(v));
            }
        });
        Ok((escape > best).then_some(best))
    }
}

/// Spread of the point-to-plane time at one scale.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationRow {
    pub n: i64,
    pub replicas: u64,
    /// Statistics of `b_{0,n}` itself (not divided by `n`).
    pub summary: Summary,
    /// `(z, P(|b - mean| >= z n))` for each level in [`TAIL_LEVELS`].
    pub tails: Vec<(f64, f64)>,
    pub truncation_failures: u64,
}

impl ConcentrationRow {
    pub fn from_outcomes(task: &PlaneTask, outcomes: &[Option<u32>]) -> Result<Self> {
        let values: Vec<f64> = outcomes.iter().flatten().map(|&b| b as f64).collect();
        let summary = Summary::of(&values).ok_or_else(|| {
            Error::Estimation(format!(
                "all {} replicas of {} failed the truncation certificate",
                outcomes.len(),
                task.label()
            ))
        })?;
        let n = task.n as f64;
        let tails = TAIL_LEVELS
            .iter()
            .map(|&z| {
                let hits = values
                    .iter()
                    .filter(|&&b| (b - summary.mean).abs() >= z * n)
                    .count();
                (z, hits as f64 / values.len() as f64)
            })
            .collect();
        Ok(ConcentrationRow {
            n: task.n,
            replicas: outcomes.len() as u64,
            truncation_failures: (outcomes.len() - values.len()) as u64,
            summary,
            tails,
        })
    }

    /// `sd(b_{0,n}) / n`.
    pub fn sd_over_n(&self) -> f64 {
        self.summary.sd / self.n as f64
    }
}

/// Standard deviation and tail frequencies of `b_{0,n}` for each `n`.
/// Each scale derives its own seed from `seed`, so rows are independent.
pub fn concentration_stats(
    law: WeightLaw,
    dim: usize,
    n_list: &[i64],
    replicas: u64,
    seed: u64,
) -> Result<Vec<ConcentrationRow>> {
    n_list
        .iter()
        .map(|&n| {
            let mut task = PlaneTask::new(law, dim, n, 0);
            task.seed = derive_seed(seed, &task.label());
            let outcomes = run_replicas(&task, 0..replicas, 0)?;
            ConcentrationRow::from_outcomes(&task, &outcomes)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_law_has_no_spread() {
        let rows = concentration_stats(WeightLaw::constant(1), 2, &[4, 9], 3, 0).unwrap();
        assert_eq!(rows[0].summary.mean, 4.0);
        assert_eq!(rows[1].summary.mean, 9.0);
        assert!(rows
            .iter()
            .all(|r| r.summary.sd == 0.0 && r.truncation_failures == 0));
        assert!(rows[0].tails.iter().all(|&(_, f)| f == 0.0));
    }
}
