use serde::{Deserialize, Serialize};

use super::{certified_times, Direction, MarginPolicy};
use crate::error::{Error, Result};
use crate::lattice::WeightLaw;
use crate::replica::{derive_seed, run_replicas, ReplicaTask};
use crate::stats::Summary;

/// Replicas of `T(0, n x)` on certified halo boxes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MuTask {
    pub law: WeightLaw,
    pub direction: Direction,
    pub n: i64,
    pub seed: u64,
    pub margin: MarginPolicy,
}

impl MuTask {
    pub fn new(law: WeightLaw, direction: Direction, n: i64, seed: u64) -> Self {
        MuTask {
            margin: MarginPolicy::for_law(&law),
            law,
            direction,
            n,
            seed,
        }
    }

    pub fn estimate(&self, replicas: u64, threads: usize) -> Result<MuEstimate> {
        if replicas < 2 {
            return Err(Error::domain("an estimate needs at least 2 replicas"));
        }
        let outcomes = run_replicas(self, 0..replicas, threads)?;
        MuEstimate::from_outcomes(self, &outcomes)
    }
}

impl ReplicaTask for MuTask {
    /// `None` when the replica failed the truncation certificate.
    type Outcome = Option<u32>;

    fn label(&self) -> String {
        format!("mu/{}/n={}", self.direction, self.n)
    }

    fn run(&self, replica: u64) -> Result<Option<u32>> {
        if self.n < 1 {
            return Err(Error::domain(format!(
                "scale n = {} must be positive",
                self.n
            )));
        }
        let target = vec![self.direction.scaled(self.n)];
        let margin = self.margin.margin(&target);
        Ok(certified_times(self.law, &target, margin, self.seed, replica)?.map(|t| t[0]))
    }
}

/// Estimate of `mu(x)` from replicas of `T(0, n x) / n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MuEstimate {
    pub law: WeightLaw,
    pub direction: Direction,
    pub n: i64,
    pub replicas: u64,
    /// Statistics of `T(0, n x) / n` over certified replicas.
    pub summary: Summary,
    pub truncation_failures: u64,
}

impl MuEstimate {
    pub fn from_outcomes(task: &MuTask, outcomes: &[Option<u32>]) -> Result<Self> {
        let values: Vec<f64> = outcomes
            .iter()
            .flatten()
            .map(|&t| t as f64 / task.n as f64)
            .collect();
        let failures = outcomes.len() - values.len();
        let summary = Summary::of(&values).ok_or_else(|| {
            Error::Estimation(format!(
                "all {} replicas of {} failed the truncation certificate; enlarge the margin",
                outcomes.len(),
                task.label()
            ))
        })?;
        Ok(MuEstimate {
            law: task.law,
            direction: task.direction.clone(),
            n: task.n,
            replicas: outcomes.len() as u64,
            summary,
            truncation_failures: failures as u64,
        })
    }

    pub fn mean(&self) -> f64 {
        self.summary.mean
    }

    pub fn se(&self) -> f64 {
        self.summary.se
    }

    /// Time constant per unit Euclidean length along the direction.
    pub fn per_unit(&self) -> f64 {
        self.summary.mean / self.direction.norm()
    }
}

/// `mu(x)` from `replicas` independent replicas of `T(0, n x) / n`.
pub fn estimate_mu(
    law: WeightLaw,
    x: &Direction,
    n: i64,
    replicas: u64,
    seed: u64,
) -> Result<MuEstimate> {
    MuTask::new(law, x.clone(), n, seed).estimate(replicas, 0)
}

/// Comparison of the estimates at scales `n` and `2n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Subadditivity {
    pub at_n: MuEstimate,
    pub at_2n: MuEstimate,
    /// `mean(2n) - mean(n)`.
    pub difference: f64,
    pub combined_se: f64,
    /// `mean(2n) <= mean(n) + 3 * combined_se`.
    pub holds: bool,
}

impl Subadditivity {
    pub fn from_estimates(at_n: MuEstimate, at_2n: MuEstimate) -> Self {
        let difference = at_2n.mean() - at_n.mean();
        let combined_se = at_n.se().hypot(at_2n.se());
        Subadditivity {
            holds: difference <= 3.0 * combined_se,
            at_n,
            at_2n,
            difference,
            combined_se,
        }
    }
}

/// Checks `E T(0, 2n x) / 2n <= E T(0, n x) / n` up to three combined SEs.
/// Each scale derives its own seed from `seed`.
pub fn subadditivity_check(
    law: WeightLaw,
    x: &Direction,
    n: i64,
    replicas: u64,
    seed: u64,
) -> Result<Subadditivity> {
    let run = |n: i64| {
        let mut task = MuTask::new(law, x.clone(), n, 0);
        task.seed = derive_seed(seed, &task.label());
        task.estimate(replicas, 0)
    };
    let at_n = run(n)?;
    let at_2n = run(2 * n)?;
    Ok(Subadditivity::from_estimates(at_n, at_2n))
}

/// One direction of [`bounds_check`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsRow {
    pub direction: Direction,
    pub mu: f64,
    pub lower: f64,
    pub upper: f64,
    /// Three SEs of `mu(x) - mu_F |x|_inf`, combining both estimates.
    pub lower_slack: f64,
    /// Three SEs of `mu(x) - mu_F |x|_1`.
    pub upper_slack: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub mu_axis: f64,
    pub rows: Vec<BoundsRow>,
}

impl BoundsReport {
    pub fn holds(&self) -> bool {
        self.rows.iter().all(|r| r.holds)
    }
}

/// Checks `mu_F |x|_inf - 3 SE <= mu(x) <= mu_F |x|_1 + 3 SE` for every
/// direction of a profile, where `mu_F` is the axis estimate.
pub fn bounds_check(profile: &[MuEstimate]) -> Result<BoundsReport> {
    let d = profile
        .first()
        .ok_or_else(|| Error::domain("empty profile"))?
        .direction
        .dim();
    let axis = Direction::axis(d);
    let base = profile
        .iter()
        .find(|m| m.direction == axis)
        .ok_or_else(|| Error::domain("profile lacks the axis direction"))?;
    let rows = profile
        .iter()
        .map(|m| {
            let lower = base.mean() * m.direction.linf() as f64;
            let upper = base.mean() * m.direction.l1() as f64;
            let lower_slack = 3.0 * m.se().hypot(m.direction.linf() as f64 * base.se());
            let upper_slack = 3.0 * m.se().hypot(m.direction.l1() as f64 * base.se());
            BoundsRow {
                direction: m.direction.clone(),
                mu: m.mean(),
                lower,
                upper,
                lower_slack,
                upper_slack,
                holds: lower - lower_slack <= m.mean() && m.mean() <= upper + upper_slack,
            }
        })
        .collect();
    Ok(BoundsReport {
        mu_axis: base.mean(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_laws_are_exact() {
        let x = Direction::new(vec![2, 1]).unwrap();
        let ones = estimate_mu(WeightLaw::constant(1), &x, 8, 3, 1).unwrap();
        assert_eq!(ones.mean(), 3.0);
        assert_eq!(ones.se(), 0.0);
        assert_eq!(ones.truncation_failures, 0);
        let zeros = estimate_mu(WeightLaw::bernoulli(1.0).unwrap(), &x, 8, 3, 1).unwrap();
        assert_eq!(zeros.mean(), 0.0);
    }

    #[test]
    fn too_few_replicas() {
        let x = Direction::axis(2);
        assert!(estimate_mu(WeightLaw::constant(1), &x, 8, 1, 1).is_err());
    }

    #[test]
    fn all_failures_is_an_estimation_error() {
        let mut task = MuTask::new(
            WeightLaw::bernoulli(0.45).unwrap(),
            Direction::axis(2),
            64,
            3,
        );
        task.margin = MarginPolicy {
            factor: 0.0,
            extra: 0,
        };
        let err = task.estimate(4, 1).unwrap_err();
        assert!(matches!(err, Error::Estimation(_)), "{err}");
    }

    #[test]
    fn bounds_on_constant_law() {
        let law = WeightLaw::constant(1);
        let profile: Vec<_> = [vec![1, 0], vec![1, 1], vec![3, 1]]
            .into_iter()
            .map(|c| estimate_mu(law, &Direction::new(c).unwrap(), 4, 2, 0).unwrap())
            .collect();
        let report = bounds_check(&profile).unwrap();
        assert!(report.holds());
        // the upper bound is attained exactly
        assert!(report.rows.iter().all(|r| r.mu == r.upper));
        assert!(bounds_check(&profile[1..]).is_err());
    }

    #[test]
    fn subadditivity_on_constant_law() {
        let s = subadditivity_check(WeightLaw::constant(1), &Direction::axis(2), 8, 2, 0).unwrap();
        assert_eq!(s.difference, 0.0);
        assert!(s.holds);
    }
}
