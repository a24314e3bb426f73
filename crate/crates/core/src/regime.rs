//! Side-by-side comparison of the subcritical Bernoulli regime, where the
//! limit shape has no flat edge, with the two-point regime `{1, 2}` above the
//! oriented percolation threshold, where it has one around the diagonal.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{sample_config, BoxSpec, Config, EdgeRef, WeightLaw};
use crate::replica::{derive_seed, run_replicas, ReplicaTask};
use crate::shape::{Chord, DefectEstimate, DefectTask, Direction, MuEstimate, MuTask};
use crate::stats::Verdict;

/// Bond percolation threshold on `Z^2`.
pub const BOND_PC: f64 = 0.5;

/// Oriented bond percolation threshold on `Z^2` (literature value).
pub const ORIENTED_PC: f64 = 0.6447;

/// One side of a regime comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimeSpec {
    pub label: String,
    pub law: WeightLaw,
    /// Directions for the time-constant profile.
    #[serde(default)]
    pub fan: Vec<Direction>,
    pub chords: Vec<Chord>,
    pub n: i64,
    pub replicas: u64,
    pub seed: u64,
}

impl RegimeSpec {
    fn check_common(&self) -> Result<()> {
        for c in &self.chords {
            c.validate(self.n)?;
            if c.x1.len() != 2 {
                return Err(Error::domain(format!(
                    "{}: chords must lie in Z^2",
                    self.label
                )));
            }
        }
        if self.fan.iter().any(|x| x.dim() != 2) {
            return Err(Error::domain(format!(
                "{}: fan must lie in Z^2",
                self.label
            )));
        }
        if self.replicas < 2 {
            return Err(Error::domain(format!(
                "{}: needs at least 2 replicas",
                self.label
            )));
        }
        Ok(())
    }

    /// Bernoulli law with `F(0) < 1/2`.
    pub fn check_subcritical(&self) -> Result<()> {
        self.check_common()?;
        if !(self.law.is_bernoulli() && self.law.p < BOND_PC) {
            return Err(Error::domain(format!(
                "{}: the subcritical side needs law (0, 1, p) with p < {BOND_PC}",
                self.label
            )));
        }
        Ok(())
    }

    /// Law `(1, 2, p)` with `p` above the oriented threshold.
    pub fn check_supercritical(&self) -> Result<()> {
        self.check_common()?;
        if !(self.law.a == 1 && self.law.b == 2 && self.law.p > ORIENTED_PC) {
            return Err(Error::domain(format!(
                "{}: the supercritical side needs law (1, 2, p) with p > {ORIENTED_PC}",
                self.label
            )));
        }
        Ok(())
    }

    pub fn defect_task(&self, chord: &Chord) -> DefectTask {
        let mut task = DefectTask::new(self.law, chord.clone(), self.n, 0);
        task.seed = derive_seed(self.seed, &format!("{}/{}", self.label, task.label()));
        task
    }

    pub fn mu_task(&self, x: &Direction) -> MuTask {
        let mut task = MuTask::new(self.law, x.clone(), self.n, 0);
        task.seed = derive_seed(self.seed, &format!("{}/{}", self.label, task.label()));
        task
    }
}

/// A chord estimate with its three-SE verdict.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChordVerdict {
    pub estimate: DefectEstimate,
    pub verdict: Verdict,
}

impl ChordVerdict {
    pub fn new(estimate: DefectEstimate) -> Self {
        ChordVerdict {
            verdict: estimate.verdict(),
            estimate,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimeSide {
    pub label: String,
    pub law: WeightLaw,
    pub chords: Vec<ChordVerdict>,
    pub profile: Vec<MuEstimate>,
}

impl RegimeSide {
    pub fn run(spec: &RegimeSpec, threads: usize) -> Result<Self> {
        let chords = spec
            .chords
            .iter()
            .map(|c| {
                let task = spec.defect_task(c);
                let outcomes = run_replicas(&task, 0..spec.replicas, threads)?;
                Ok(ChordVerdict::new(DefectEstimate::from_outcomes(
                    &task, &outcomes,
                )?))
            })
            .collect::<Result<Vec<_>>>()?;
        let profile = spec
            .fan
            .iter()
            .map(|x| spec.mu_task(x).estimate(spec.replicas, threads))
            .collect::<Result<Vec<_>>>()?;
        Ok(RegimeSide {
            label: spec.label.clone(),
            law: spec.law,
            chords,
            profile,
        })
    }
}

/// Flat-edge diagnostics on the diagonal of the supercritical side.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagonalCheck {
    /// Estimate of `mu((1, 1))`.
    pub mu: MuEstimate,
    /// `a |(1, 1)|_1 = 2a`.
    pub expected: f64,
    /// `|mu - expected| <= 3 SE`.
    pub within: bool,
    pub scan_n: i64,
    pub scan_replicas: u64,
    pub scan_frequency: f64,
}

impl DiagonalCheck {
    pub fn from_parts(mu: MuEstimate, scan_n: i64, scan: &[bool]) -> Self {
        let expected = 2.0 * mu.law.a as f64;
        let hits = scan.iter().filter(|&&b| b).count();
        DiagonalCheck {
            within: (mu.mean() - expected).abs() <= 3.0 * mu.se(),
            expected,
            scan_n,
            scan_replicas: scan.len() as u64,
            scan_frequency: hits as f64 / scan.len().max(1) as f64,
            mu,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    pub sub: RegimeSide,
    pub sup: RegimeSide,
    pub diagonal: DiagonalCheck,
}

/// Runs both sides, then the diagonal checks of the supercritical side: the
/// time constant along `(1, 1)` at the side's scale and the oriented-path
/// scan at `scan_n` over `scan_replicas` replicas.
pub fn run_regime_comparison(
    sub: &RegimeSpec,
    sup: &RegimeSpec,
    scan_n: i64,
    scan_replicas: u64,
    threads: usize,
) -> Result<RegimeReport> {
    sub.check_subcritical()?;
    sup.check_supercritical()?;
    let sub_side = RegimeSide::run(sub, threads)?;
    let sup_side = RegimeSide::run(sup, threads)?;
    let diag = Direction::new(vec![1, 1])?;
    let mu = sup.mu_task(&diag).estimate(sup.replicas, threads)?;
    let scan = OrientedScanTask::new(sup.law, scan_n, derive_seed(sup.seed, "oriented-scan"));
    let hits = run_replicas(&scan, 0..scan_replicas, threads)?;
    Ok(RegimeReport {
        sub: sub_side,
        sup: sup_side,
        diagonal: DiagonalCheck::from_parts(mu, scan_n, &hits),
    })
}

/// Whether an up-right path of low-value edges joins some vertex `v` with
/// `|v|_1 <= 4` to the line `x_1 + x_2 = n`, within the box of `cfg`.
///
/// One pass in index order suffices: the left and lower neighbours of a
/// vertex precede it.
pub fn oriented_path_scan(cfg: &Config, n: i64) -> Result<bool> {
    let bx = cfg.box_spec();
    if bx.dim() != 2 {
        return Err(Error::domain(
            "the oriented scan is implemented in two dimensions",
        ));
    }
    let (lo, hi) = (bx.lo(), bx.hi());
    if lo[0] + lo[1] > n || hi[0] + hi[1] < n {
        return Err(Error::domain(format!(
            "the line x_1 + x_2 = {n} misses the box"
        )));
    }
    let grid = cfg.grid();
    let low = cfg.law().a;
    let (s0, s1) = (grid.stride(0), grid.stride(1));
    let mut reach = vec![false; grid.vertex_count()];
    for v in 0..grid.vertex_count() {
        let x = lo[0] + grid.offset(v, 0) as i64;
        let y = lo[1] + grid.offset(v, 1) as i64;
        if x + y > n {
            continue;
        }
        let low_from = |u: usize, axis: usize| {
            reach[u]
                && cfg
                    .weight(EdgeRef { base: u, axis })
                    .is_ok_and(|w| w == low)
        };
        let r = x.abs() + y.abs() <= 4
            || (x > lo[0] && low_from(v - s0, 0))
            || (y > lo[1] && low_from(v - s1, 1));
        if r && x + y == n {
            return Ok(true);
        }
        reach[v] = r;
    }
    Ok(false)
}

/// Replicas of [`oriented_path_scan`] on the box `[-4, n]^2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrientedScanTask {
    pub law: WeightLaw,
    pub n: i64,
    pub seed: u64,
}

impl OrientedScanTask {
    pub fn new(law: WeightLaw, n: i64, seed: u64) -> Self {
        OrientedScanTask { law, n, seed }
    }
}

impl ReplicaTask for OrientedScanTask {
    type Outcome = bool;

    fn label(&self) -> String {
        format!("oriented-scan/n={}", self.n)
    }

    fn run(&self, replica: u64) -> Result<bool> {
        let hi = self.n.max(4);
        let bx = BoxSpec::new(vec![-4, -4], vec![hi, hi], vec![0, 0])?;
        let cfg = sample_config(&bx, self.law, self.seed, replica)?;
        oriented_path_scan(&cfg, self.n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scan(p: f64, n: i64) -> bool {
        let law = WeightLaw::new(1, 2, p).unwrap();
        OrientedScanTask::new(law, n, 1).run(0).unwrap()
    }

    #[test]
    fn degenerate_scans() {
        assert!(scan(1.0, 40));
        assert!(!scan(0.0, 9));
        // the vicinity itself touches the line when n <= 4
        assert!(scan(0.0, 4));
    }

    #[test]
    fn scan_follows_a_fixture_path() {
        let bx = BoxSpec::new(vec![0, 0], vec![8, 8], vec![0, 0]).unwrap();
        let law = WeightLaw::new(1, 2, 0.5).unwrap();
        // a staircase of low edges from (4, 0): right, up, right, up, ...
        let on_path = |p: &[i64], axis: usize| {
            let (x, y) = (p[0] - 4, p[1]);
            x >= 0 && ((axis == 0 && x == y) || (axis == 1 && x == y + 1))
        };
        let cfg =
            Config::from_fn(&bx, law, |p, axis| if on_path(p, axis) { 1 } else { 2 }).unwrap();
        assert!(oriented_path_scan(&cfg, 12).unwrap());
        // the staircase leaves through the right face at (8, 4)
        assert!(!oriented_path_scan(&cfg, 16).unwrap());
        assert!(oriented_path_scan(&cfg, 17).is_err());
    }

    #[test]
    fn regime_preconditions() {
        let chord = Chord::new(vec![4, 1], vec![4, -1]);
        let sub = RegimeSpec {
            label: "sub".into(),
            law: WeightLaw::bernoulli(0.6).unwrap(),
            fan: vec![],
            chords: vec![chord.clone()],
            n: 8,
            replicas: 2,
            seed: 0,
        };
        assert!(sub.check_subcritical().is_err());
        let sup = RegimeSpec {
            label: "sup".into(),
            law: WeightLaw::new(1, 2, 0.6).unwrap(),
            ..sub.clone()
        };
        assert!(sup.check_supercritical().is_err());
        let odd = RegimeSpec {
            law: WeightLaw::bernoulli(0.25).unwrap(),
            chords: vec![Chord::new(vec![1, 0], vec![0, 1])],
            n: 7,
            ..sub
        };
        assert!(odd.check_subcritical().is_err());
    }

    #[test]
    fn small_comparison_runs() {
        let sub = RegimeSpec {
            label: "sub".into(),
            law: WeightLaw::bernoulli(0.25).unwrap(),
            fan: vec![Direction::axis(2)],
            chords: vec![Chord::new(vec![4, 1], vec![4, -1])],
            n: 4,
            replicas: 3,
            seed: 1,
        };
        let sup = RegimeSpec {
            label: "sup".into(),
            law: WeightLaw::new(1, 2, 0.8).unwrap(),
            fan: vec![],
            chords: vec![Chord::new(vec![3, 2], vec![2, 3])],
            ..sub.clone()
        };
        let r = run_regime_comparison(&sub, &sup, 16, 4, 1).unwrap();
        assert_eq!(r.sub.profile.len(), 1);
        assert_eq!(r.sup.chords.len(), 1);
        assert_eq!(r.diagonal.expected, 2.0);
        assert_eq!(r.diagonal.scan_replicas, 4);
        assert!(r.diagonal.mu.mean() >= 2.0);
    }
}
