use serde::{Deserialize, Serialize};

use super::{certified_times, format_point, MarginPolicy};
use crate::error::{Error, Result};
use crate::lattice::WeightLaw;
use crate::replica::{run_replicas, ReplicaTask};
use crate::stats::{Summary, Verdict};

/// A chord between two lattice vectors of the same dimension.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chord {
    pub x1: Vec<i64>,
    pub x2: Vec<i64>,
}

impl Chord {
    pub fn new(x1: Vec<i64>, x2: Vec<i64>) -> Self {
        Chord { x1, x2 }
    }

    /// Checks that both ends are nonzero vectors of one dimension and that
    /// `n (x1 + x2) / 2` is a lattice point.
    pub fn validate(&self, n: i64) -> Result<()> {
        if self.x1.len() != self.x2.len() || self.x1.len() < 2 {
            return Err(Error::domain(format!("chord {self} mixes dimensions")));
        }
        if self.x1.iter().all(|&c| c == 0) || self.x2.iter().all(|&c| c == 0) {
            return Err(Error::domain(format!("chord {self} has a zero end")));
        }
        if !self.midpoint_is_lattice(n) {
            return Err(Error::domain(format!(
                "chord {self} at n = {n}: n (x1 + x2) must have even coordinates"
            )));
        }
        Ok(())
    }

    pub fn midpoint_is_lattice(&self, n: i64) -> bool {
        self.x1
            .iter()
            .zip(&self.x2)
            .all(|(a, b)| (n * (a + b)) % 2 == 0)
    }

    /// Both ends doubled, which makes the midpoint a lattice point at every n.
    pub fn doubled(&self) -> Chord {
        Chord {
            x1: self.x1.iter().map(|c| 2 * c).collect(),
            x2: self.x2.iter().map(|c| 2 * c).collect(),
        }
    }

    /// `[n x1, n x2, n (x1 + x2) / 2]`.
    pub fn targets(&self, n: i64) -> Vec<Vec<i64>> {
        let mid = self
            .x1
            .iter()
            .zip(&self.x2)
            .map(|(a, b)| n * (a + b) / 2)
            .collect();
        vec![
            self.x1.iter().map(|c| n * c).collect(),
            self.x2.iter().map(|c| n * c).collect(),
            mid,
        ]
    }
}

impl std::fmt::Display for Chord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}-{}", format_point(&self.x1), format_point(&self.x2))
    }
}

/// Replicas of the three chord passage times on one shared configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DefectTask {
    pub law: WeightLaw,
    pub chord: Chord,
    pub n: i64,
    pub seed: u64,
    pub margin: MarginPolicy,
}

impl DefectTask {
    pub fn new(law: WeightLaw, chord: Chord, n: i64, seed: u64) -> Self {
        DefectTask {
            margin: MarginPolicy::for_law(&law),
            law,
            chord,
            n,
            seed,
        }
    }

    pub fn estimate(&self, replicas: u64, threads: usize) -> Result<DefectEstimate> {
        self.chord.validate(self.n)?;
        if replicas < 2 {
            return Err(Error::domain("an estimate needs at least 2 replicas"));
        }
        let outcomes = run_replicas(self, 0..replicas, threads)?;
        DefectEstimate::from_outcomes(self, &outcomes)
    }
}

impl ReplicaTask for DefectTask {
    /// `[T(0, n x1), T(0, n x2), T(0, n (x1 + x2) / 2)]`, or `None` when the
    /// replica failed the truncation certificate.
    type Outcome = Option<[u32; 3]>;

    fn label(&self) -> String {
        format!("defect/{}/n={}", self.chord, self.n)
    }

    fn run(&self, replica: u64) -> Result<Option<[u32; 3]>> {
        self.chord.validate(self.n)?;
        if self.n < 1 {
            return Err(Error::domain(format!(
                "scale n = {} must be positive",
                self.n
            )));
        }
        let targets = self.chord.targets(self.n);
        let margin = self.margin.margin(&targets);
        let times = certified_times(self.law, &targets, margin, self.seed, replica)?;
        Ok(times.map(|t| [t[0], t[1], t[2]]))
    }
}

/// Midpoint-convexity defect
/// `[T(0, n x1) + T(0, n x2)] / 2n - T(0, n (x1 + x2) / 2) / n`
/// with all three times taken on the same replica.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DefectEstimate {
    pub law: WeightLaw,
    pub chord: Chord,
    pub n: i64,
    pub replicas: u64,
    /// Per-replica defects; `se` is the SE of the paired difference.
    pub defect: Summary,
    /// Mean of `T / n` for the two ends and the midpoint.
    pub end1: f64,
    pub end2: f64,
    pub mid: f64,
    pub truncation_failures: u64,
}

impl DefectEstimate {
    pub fn from_outcomes(task: &DefectTask, outcomes: &[Option<[u32; 3]>]) -> Result<Self> {
        let kept: Vec<[u32; 3]> = outcomes.iter().flatten().copied().collect();
        let n = task.n as f64;
        let values: Vec<f64> = kept
            .iter()
            .map(|t| (t[0] as i64 + t[1] as i64 - 2 * t[2] as i64) as f64 / (2.0 * n))
            .collect();
        let defect = Summary::of(&values).ok_or_else(|| {
            Error::Estimation(format!(
                "all {} replicas of {} failed the truncation certificate; enlarge the margin",
                outcomes.len(),
                task.label()
            ))
        })?;
        let mean_of =
            |i: usize| kept.iter().map(|t| t[i] as f64).sum::<f64>() / (kept.len() as f64 * n);
        Ok(DefectEstimate {
            law: task.law,
            chord: task.chord.clone(),
            n: task.n,
            replicas: outcomes.len() as u64,
            end1: mean_of(0),
            end2: mean_of(1),
            mid: mean_of(2),
            defect,
            truncation_failures: (outcomes.len() - kept.len()) as u64,
        })
    }

    pub fn mean(&self) -> f64 {
        self.defect.mean
    }

    pub fn se(&self) -> f64 {
        self.defect.se
    }

    pub fn verdict(&self) -> Verdict {
        Verdict::classify(self.defect.mean, self.defect.se)
    }
}

/// Flat-edge defect along the chord `x1`-`x2` at scale `n`.
pub fn flat_defect(
    law: WeightLaw,
    x1: &[i64],
    x2: &[i64],
    n: i64,
    replicas: u64,
    seed: u64,
) -> Result<DefectEstimate> {
    DefectTask::new(law, Chord::new(x1.to_vec(), x2.to_vec()), n, seed).estimate(replicas, 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chord_midpoint_rule() {
        let c = Chord::new(vec![3, 2], vec![2, 3]);
        assert!(c.validate(256).is_ok());
        assert!(c.validate(255).is_err());
        assert!(c.doubled().validate(255).is_ok());
        assert_eq!(c.targets(4), vec![vec![12, 8], vec![8, 12], vec![10, 10]]);
        assert!(Chord::new(vec![0, 0], vec![1, 1]).validate(2).is_err());
        assert!(Chord::new(vec![1, 0, 0], vec![1, 1]).validate(2).is_err());
    }

    #[test]
    fn diamond_chord_has_zero_defect() {
        let e = flat_defect(WeightLaw::constant(1), &[2, 0], &[0, 2], 6, 3, 0).unwrap();
        assert_eq!(e.mean(), 0.0);
        assert_eq!(e.se(), 0.0);
        assert_eq!((e.end1, e.end2, e.mid), (2.0, 2.0, 2.0));
        assert_eq!(e.verdict(), Verdict::Zero);
    }

    #[test]
    fn equal_ends_have_zero_defect() {
        let law = WeightLaw::bernoulli(0.3).unwrap();
        let e = flat_defect(law, &[2, 1], &[2, 1], 8, 4, 5).unwrap();
        assert!(e.defect.min == 0.0 && e.defect.max == 0.0);
    }
}
