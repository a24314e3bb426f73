use serde::{Deserialize, Serialize};

use super::{height_of, ExitReport, SlabSpec};
use crate::error::{Error, Result};
use crate::geodesic::{distance_field, truncation_check, GeodesicSet};
use crate::lattice::{sample_config, BoxSpec, WeightLaw};
use crate::replica::{derive_seed, run_replicas, ReplicaTask};
use crate::shape::{Direction, MarginPolicy};
use crate::stats::{ordinary_line, weighted_line, Summary};

/// Replicas of the geodesic union from the origin to `n x`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeightTask {
    pub law: WeightLaw,
    pub direction: Direction,
    pub n: i64,
    pub kappa: f64,
    pub seed: u64,
    pub margin: MarginPolicy,
}

impl HeightTask {
    pub fn new(law: WeightLaw, direction: Direction, n: i64, kappa: f64, seed: u64) -> Self {
        HeightTask {
            margin: MarginPolicy::for_law(&law),
            law,
            direction,
            n,
            kappa,
            seed,
        }
    }

    /// Certified geodesic union for one replica.
    pub fn union(&self, replica: u64) -> Result<Option<GeodesicSet>> {
        if self.n < 1 {
            return Err(Error::domain(format!(
                "scale n = {} must be positive",
                self.n
            )));
        }
        let origin = vec![0i64; self.direction.dim()];
        let target = self.direction.scaled(self.n);
        let margin = self.margin.margin(std::slice::from_ref(&target));
        let bx = BoxSpec::covering(&[origin.clone(), target.clone()], margin)?;
        let cfg = sample_config(&bx, self.law, self.seed, replica)?.with_halo()?;
        let f = distance_field(&cfg, &[origin])?;
        let b = distance_field(&cfg, &[target])?;
        if !truncation_check(&f, &b) {
            return Ok(None);
        }
        Ok(Some(GeodesicSet::from_fields(&cfg, &f, &b)?))
    }
}

/// Geometry of one certified geodesic union.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeightSample {
    pub height: f64,
    /// `|R_n|`, vertices of the union.
    pub union_size: u64,
    /// Union vertices in the slab `[n/2 - kappa n, n/2]`.
    pub slab_size: u64,
    /// Fewest members on a plane of that slab.
    pub slab_exits: u64,
    /// Fewest members on a plane strictly between the endpoints.
    pub min_crossing: u64,
}

impl ReplicaTask for HeightTask {
    /// `None` when the replica failed the truncation certificate.
    type Outcome = Option<HeightSample>;

    fn label(&self) -> String {
        format!(
            "height/{}/n={}/kappa={}",
            self.direction, self.n, self.kappa
        )
    }

    fn run(&self, replica: u64) -> Result<Option<HeightSample>> {
        let Some(set) = self.union(replica)? else {
            return Ok(None);
        };
        let extent = self.n * self.direction.coords()[0];
        let slab = SlabSpec::midpoint(extent, self.kappa)?;
        let restricted = set.restrict_to_slab(slab.lo, slab.hi);
        let report = ExitReport::from_set(&set, slab)?;
        let min_crossing = (1..extent)
            .map(|i| set.plane_count(i) as u64)
            .min()
            .unwrap_or(u64::MAX);
        Ok(Some(HeightSample {
            height: height_of(&set).value(),
            union_size: set.vertex_count() as u64,
            slab_size: restricted.vertex_count() as u64,
            slab_exits: report.k as u64,
            min_crossing,
        }))
    }
}

/// Statistics of the union geometry at one scale.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeightRow {
    pub n: i64,
    pub replicas: u64,
    pub truncation_failures: u64,
    pub height: Summary,
    /// `h_n / n`.
    pub ratio: Summary,
    /// `|R_n| / n`.
    pub union_ratio: Summary,
    /// `|R_n(x, kappa)| / (kappa n)`.
    pub slab_ratio: Summary,
    pub slab_exits: Summary,
    /// Smallest crossing count over all planes and replicas.
    pub min_crossing: u64,
}

impl HeightRow {
    pub fn from_outcomes(task: &HeightTask, outcomes: &[Option<HeightSample>]) -> Result<Self> {
        let kept: Vec<&HeightSample> = outcomes.iter().flatten().collect();
        if kept.is_empty() {
            return Err(Error::Estimation(format!(
                "all {} replicas of {} failed the truncation certificate",
                outcomes.len(),
                task.label()
            )));
        }
        let n = task.n as f64;
        let summary = |f: &dyn Fn(&HeightSample) -> f64| {
            Summary::of(&kept.iter().map(|s| f(s)).collect::<Vec<_>>()).expect("nonempty")
        };
        Ok(HeightRow {
            n: task.n,
            replicas: outcomes.len() as u64,
            truncation_failures: (outcomes.len() - kept.len()) as u64,
            height: summary(&|s| s.height),
            ratio: summary(&|s| s.height / n),
            union_ratio: summary(&|s| s.union_size as f64 / n),
            slab_ratio: summary(&|s| s.slab_size as f64 / (task.kappa * n)),
            slab_exits: summary(&|s| s.slab_exits as f64),
            min_crossing: kept.iter().map(|s| s.min_crossing).min().expect("nonempty"),
        })
    }
}

/// Log-log fit of the median height against `n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub xi: f64,
    pub se: f64,
    pub r_squared: f64,
}

/// Weighted slope of a per-scale mean against `log2 n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrendCheck {
    pub slope: f64,
    pub slope_se: f64,
}

impl TrendCheck {
    /// No significant upward trend: `slope - 3 SE <= 0`.
    pub fn not_increasing(&self) -> bool {
        self.slope - 3.0 * self.slope_se <= 0.0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeightScan {
    pub law: WeightLaw,
    pub direction: Direction,
    pub kappa: f64,
    pub rows: Vec<HeightRow>,
    pub fit: Option<ExponentFit>,
}

impl HeightScan {
    pub fn from_rows(
        law: WeightLaw,
        direction: Direction,
        kappa: f64,
        rows: Vec<HeightRow>,
    ) -> Self {
        let fit = if rows.iter().all(|r| r.height.median > 0.0) {
            let xs: Vec<f64> = rows.iter().map(|r| (r.n as f64).ln()).collect();
            let ys: Vec<f64> = rows.iter().map(|r| r.height.median.ln()).collect();
            ordinary_line(&xs, &ys).map(|l| ExponentFit {
                xi: l.slope,
                se: l.slope_se,
                r_squared: l.r_squared,
            })
        } else {
            None
        };
        HeightScan {
            law,
            direction,
            kappa,
            rows,
            fit,
        }
    }

    /// Median of `h_n / n` strictly decreasing along the scan.
    pub fn ratio_strictly_decreasing(&self) -> bool {
        self.rows
            .windows(2)
            .all(|w| w[1].ratio.median < w[0].ratio.median)
    }

    fn trend(&self, pick: impl Fn(&HeightRow) -> &Summary) -> Option<TrendCheck> {
        let xs: Vec<f64> = self.rows.iter().map(|r| (r.n as f64).log2()).collect();
        let ys: Vec<f64> = self.rows.iter().map(|r| pick(r).mean).collect();
        let ses: Vec<f64> = self.rows.iter().map(|r| pick(r).se).collect();
        weighted_line(&xs, &ys, &ses).map(|l| TrendCheck {
            slope: l.slope,
            slope_se: l.slope_se,
        })
    }

    /// Trend of `|R_n| / n`.
    pub fn union_trend(&self) -> Option<TrendCheck> {
        self.trend(|r| &r.union_ratio)
    }

    /// Trend of `|R_n(x, kappa)| / (kappa n)`.
    pub fn slab_trend(&self) -> Option<TrendCheck> {
        self.trend(|r| &r.slab_ratio)
    }

    pub fn min_crossing(&self) -> u64 {
        self.rows.iter().map(|r| r.min_crossing).min().unwrap_or(0)
    }
}

/// Height, union and slab statistics for each `n`. Each scale derives its
/// own seed from `seed`.
pub fn height_scan(
    law: WeightLaw,
    x: &Direction,
    n_list: &[i64],
    replicas: u64,
    kappa: f64,
    seed: u64,
) -> Result<HeightScan> {
    super::check_kappa(kappa)?;
    if n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::domain("scan scales must be increasing"));
    }
    let rows = n_list
        .iter()
        .map(|&n| {
            let mut task = HeightTask::new(law, x.clone(), n, kappa, 0);
            task.seed = derive_seed(seed, &task.label());
            let outcomes = run_replicas(&task, 0..replicas, 0)?;
            HeightRow::from_outcomes(&task, &outcomes)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(HeightScan::from_rows(law, x.clone(), kappa, rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_law_scan() {
        let scan = height_scan(
            WeightLaw::constant(1),
            &Direction::axis(2),
            &[8, 16],
            2,
            0.25,
            3,
        )
        .unwrap();
        for r in &scan.rows {
            assert_eq!(r.height.max, 0.0);
            assert_eq!(r.union_ratio.mean, (r.n + 1) as f64 / r.n as f64);
            assert_eq!(r.slab_ratio.mean, (r.n / 4 + 1) as f64 / (r.n as f64 / 4.0));
            assert_eq!(r.min_crossing, 1);
            assert_eq!(r.slab_exits.mean, 1.0);
        }
        assert!(scan.fit.is_none());
        assert!(!scan.ratio_strictly_decreasing());
        assert!(scan.union_trend().unwrap().not_increasing());
    }

    #[test]
    fn scales_must_increase() {
        let law = WeightLaw::constant(1);
        assert!(height_scan(law, &Direction::axis(2), &[16, 8], 2, 0.25, 3).is_err());
        assert!(height_scan(law, &Direction::axis(2), &[8], 2, 0.6, 3).is_err());
    }
}
