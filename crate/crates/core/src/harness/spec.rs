use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::ValidationIssue;
use crate::error::{Error, Result};
use crate::lattice::{BoxSpec, WeightLaw, MAX_DIM};
use crate::regime::{BOND_PC, ORIENTED_PC};
use crate::shape::{Chord, Direction, MarginPolicy};
use crate::slab::check_kappa;

/// Largest box, in vertices, that a single replica may sample.
pub const MAX_BOX_VERTICES: usize = 1 << 26;

/// Path of the validation issues raised by the capacity estimate.
pub const CAPACITY_PATH: &str = "capacity";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Mu,
    Defect,
    ShapeCheck,
    HeightScan,
    Exits,
    UnionSize,
    RegimeCompare,
    OracleSuite,
    Concentration,
}

impl Kind {
    pub const ALL: [Kind; 9] = [
        Kind::Mu,
        Kind::Defect,
        Kind::ShapeCheck,
        Kind::HeightScan,
        Kind::Exits,
        Kind::UnionSize,
        Kind::RegimeCompare,
        Kind::OracleSuite,
        Kind::Concentration,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Kind::Mu => "mu",
            Kind::Defect => "defect",
            Kind::ShapeCheck => "shape-check",
            Kind::HeightScan => "height-scan",
            Kind::Exits => "exits",
            Kind::UnionSize => "union-size",
            Kind::RegimeCompare => "regime-compare",
            Kind::OracleSuite => "oracle-suite",
            Kind::Concentration => "concentration",
        }
    }

    fn uses_slab(&self) -> bool {
        matches!(self, Kind::HeightScan | Kind::Exits | Kind::UnionSize)
    }
}

impl std::fmt::Display for Kind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Kind> {
        Kind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::domain(format!("unknown experiment kind {s:?}")))
    }
}

/// Second side of a `regime-compare` experiment. The first side takes the
/// top-level law, chords, fan, `n` and replica count.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegimeParams {
    pub sup_law: WeightLaw,
    pub sup_chords: Vec<Chord>,
    /// Scale of the oriented-path scan.
    pub scan_n: i64,
    pub scan_replicas: u64,
}

/// One experiment, read from a single JSON document.
///
/// Directions are kept as raw coordinate lists so that validation can point
/// at the offending entry instead of failing the whole parse.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub kind: Kind,
    #[serde(default)]
    pub law: Option<WeightLaw>,
    #[serde(default = "default_dim")]
    pub dim: usize,
    #[serde(default)]
    pub directions: Vec<Vec<i64>>,
    #[serde(default)]
    pub chords: Vec<Chord>,
    #[serde(default)]
    pub n: Option<i64>,
    #[serde(default)]
    pub n_list: Vec<i64>,
    #[serde(default)]
    pub kappa: Option<f64>,
    #[serde(default)]
    pub t: Option<u64>,
    #[serde(default)]
    pub epsilon: Option<f64>,
    pub replicas: u64,
    /// Master seed. Required; there is no clock seeding.
    #[serde(default)]
    pub seed: Option<u64>,
    /// Worker threads; `0` uses every core. Never affects results.
    #[serde(default)]
    pub threads: usize,
    /// CSV output path; defaults to a file under the output directory.
    #[serde(default)]
    pub out: Option<PathBuf>,
    /// Double chords whose midpoint is not a lattice point.
    #[serde(default)]
    pub auto_fix: bool,
    #[serde(default)]
    pub regime: Option<RegimeParams>,
}

fn default_dim() -> usize {
    2
}

impl ExperimentSpec {
    /// A spec of the given kind with every optional field empty.
    pub fn new(kind: Kind, replicas: u64, seed: u64) -> Self {
        ExperimentSpec {
            kind,
            law: None,
            dim: 2,
            directions: Vec::new(),
            chords: Vec::new(),
            n: None,
            n_list: Vec::new(),
            kappa: None,
            t: None,
            epsilon: None,
            replicas,
            seed: Some(seed),
            threads: 0,
            out: None,
            auto_fix: false,
            regime: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    /// The spec with chords doubled where `auto_fix` allows it.
    pub fn fixed(&self) -> ExperimentSpec {
        let mut spec = self.clone();
        if !spec.auto_fix {
            return spec;
        }
        let fix = |chords: &mut Vec<Chord>, n: Option<i64>| {
            for c in chords.iter_mut() {
                if let Some(n) = n {
                    if !c.midpoint_is_lattice(n) {
                        *c = c.doubled();
                    }
                }
            }
        };
        fix(&mut spec.chords, spec.n);
        if let Some(r) = spec.regime.as_mut() {
            fix(&mut r.sup_chords, spec.n);
        }
        spec.auto_fix = false;
        spec
    }

    /// Canonical JSON of the fixed spec without the fields that cannot change
    /// results (thread budget and output path), keys sorted.
    pub fn canonical_json(&self) -> String {
        let mut spec = self.fixed();
        spec.threads = 0;
        spec.out = None;
        let value = serde_json::to_value(&spec).expect("spec serializes");
        serde_json::to_string(&value).expect("value serializes")
    }

    /// Hex SHA-256 of [`ExperimentSpec::canonical_json`].
    pub fn experiment_id(&self) -> String {
        let digest = Sha256::digest(self.canonical_json().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn parsed_directions(&self) -> Result<Vec<Direction>> {
        self.directions
            .iter()
            .map(|c| Direction::new(c.clone()))
            .collect()
    }

    /// Every statically checkable precondition, located by field path.
    pub fn validate(&self) -> Vec<ValidationIssue> {
        let mut v = Issues::default();
        let spec = self.fixed();
        let kind = spec.kind;

        if spec.seed.is_none() {
            v.push("seed", "a master seed is required");
        }
        let min_replicas = if kind == Kind::OracleSuite { 1 } else { 2 };
        if spec.replicas < min_replicas {
            v.push(
                "replicas",
                format!("at least {min_replicas} replicas are required"),
            );
        }
        let two_d = matches!(
            kind,
            Kind::ShapeCheck | Kind::RegimeCompare | Kind::OracleSuite
        );
        if !(2..=MAX_DIM).contains(&spec.dim) {
            v.push("dim", format!("dimension must be in 2..={MAX_DIM}"));
        } else if two_d && spec.dim != 2 {
            v.push("dim", format!("{kind} is implemented in two dimensions"));
        }

        if kind == Kind::OracleSuite {
            if let Some(n) = spec.n {
                if !(2..=64).contains(&n) {
                    v.push("n", "the oracle box side must be in 2..=64");
                }
            }
            return v.0;
        }

        match spec.law {
            None => v.push("law", "a weight law is required"),
            Some(law) => {
                if let Err(e) = law.validate() {
                    v.push("law", e.to_string());
                }
            }
        }

        for (i, c) in spec.directions.iter().enumerate() {
            let path = format!("directions[{i}]");
            match Direction::new(c.clone()) {
                Err(e) => v.push(&path, e.to_string()),
                Ok(d) if d.dim() != spec.dim => {
                    v.push(&path, format!("expected {} coordinates", spec.dim))
                }
                Ok(_) => {}
            }
        }
        let needs_directions = matches!(
            kind,
            Kind::Mu | Kind::ShapeCheck | Kind::HeightScan | Kind::Exits | Kind::UnionSize
        );
        if needs_directions && spec.directions.is_empty() {
            v.push("directions", format!("{kind} needs at least one direction"));
        }

        let needs_n = matches!(
            kind,
            Kind::Mu | Kind::Defect | Kind::ShapeCheck | Kind::RegimeCompare
        );
        match spec.n {
            None if needs_n => v.push("n", format!("{kind} needs a scale n")),
            Some(n) if n < 1 => v.push("n", "n must be positive"),
            _ => {}
        }
        let needs_list = kind.uses_slab() || kind == Kind::Concentration;
        if needs_list {
            if spec.n_list.is_empty() {
                v.push("n_list", format!("{kind} needs a list of scales"));
            }
            if spec.n_list.iter().any(|&n| n < 1) {
                v.push("n_list", "scales must be positive");
            }
            if spec.n_list.windows(2).any(|w| w[1] <= w[0]) {
                v.push("n_list", "scales must be strictly increasing");
            }
        }

        if kind.uses_slab() {
            match spec.kappa {
                None => v.push("kappa", format!("{kind} needs κ")),
                Some(k) => {
                    if let Err(Error::Domain(msg)) = check_kappa(k) {
                        v.push("kappa", msg);
                    }
                }
            }
        }

        if matches!(kind, Kind::Defect | Kind::RegimeCompare) && spec.chords.is_empty() {
            v.push("chords", format!("{kind} needs at least one chord"));
        }
        if let Some(n) = spec.n {
            check_chords(&mut v, "chords", &spec.chords, n, spec.dim);
        }

        if kind == Kind::ShapeCheck {
            match spec.t {
                None => v.push("t", "shape-check needs a time t"),
                Some(0) => v.push("t", "t must be positive"),
                _ => {}
            }
            match spec.epsilon {
                None => v.push("epsilon", "shape-check needs ε"),
                Some(e) if !(0.0..1.0).contains(&e) => v.push("epsilon", "ε must be in [0, 1)"),
                _ => {}
            }
        }

        if kind == Kind::RegimeCompare {
            check_regime(&mut v, &spec);
        }

        if v.0.is_empty() {
            if let Err(msg) = capacity_estimate(&spec) {
                v.push(CAPACITY_PATH, msg);
            }
        }
        v.0
    }
}

#[derive(Default)]
struct Issues(Vec<ValidationIssue>);

impl Issues {
    fn push(&mut self, path: &str, message: impl Into<String>) {
        self.0.push(ValidationIssue {
            path: path.to_string(),
            message: message.into(),
        });
    }
}

fn check_chords(v: &mut Issues, field: &str, chords: &[Chord], n: i64, dim: usize) {
    for (i, c) in chords.iter().enumerate() {
        let path = format!("{field}[{i}]");
        if let Err(Error::Domain(msg)) = c.validate(n) {
            let hint = if c.midpoint_is_lattice(n) {
                ""
            } else {
                " (set auto_fix to double the chord)"
            };
            v.push(&path, format!("{msg}{hint}"));
        } else if c.x1.len() != dim {
            v.push(&path, format!("expected {dim} coordinates"));
        }
    }
}

fn check_regime(v: &mut Issues, spec: &ExperimentSpec) {
    if let Some(law) = spec.law {
        if !(law.is_bernoulli() && law.p < BOND_PC) {
            v.push(
                "law",
                format!("the subcritical side needs law (0, 1, p) with p < {BOND_PC}"),
            );
        }
    }
    let Some(r) = &spec.regime else {
        v.push("regime", "regime-compare needs the supercritical side");
        return;
    };
    if !(r.sup_law.a == 1 && r.sup_law.b == 2 && r.sup_law.p > ORIENTED_PC) {
        v.push(
            "regime.sup_law",
            format!("the supercritical side needs law (1, 2, p) with p > {ORIENTED_PC}"),
        );
    }
    if r.sup_chords.is_empty() {
        v.push("regime.sup_chords", "at least one chord is required");
    }
    if let Some(n) = spec.n {
        check_chords(v, "regime.sup_chords", &r.sup_chords, n, 2);
    }
    if r.scan_n < 1 {
        v.push("regime.scan_n", "the scan scale must be positive");
    }
    if r.scan_replicas < 1 {
        v.push(
            "regime.scan_replicas",
            "at least one scan replica is required",
        );
    }
}

/// Largest box any replica of the spec will sample, checked against
/// [`MAX_BOX_VERTICES`]. Assumes every other field is valid.
fn capacity_estimate(spec: &ExperimentSpec) -> std::result::Result<(), String> {
    let dim = spec.dim;
    let mut boxes: Vec<BoxSpec> = Vec::new();
    let mut covering = |law: &WeightLaw, targets: Vec<Vec<i64>>| {
        let margin = MarginPolicy::for_law(law).margin(&targets);
        let mut points = vec![vec![0; dim]];
        points.extend(targets);
        // one extra layer for the halo
        BoxSpec::covering(&points, margin + 1).map(|b| boxes.push(b))
    };
    let law = spec.law.unwrap_or(WeightLaw::constant(1));
    let dirs = spec.parsed_directions().map_err(|e| e.to_string())?;
    let n = spec.n.unwrap_or(1);
    let result = match spec.kind {
        Kind::Mu | Kind::ShapeCheck => dirs
            .iter()
            .try_for_each(|d| covering(&law, vec![d.scaled(n)])),
        Kind::Defect => spec
            .chords
            .iter()
            .try_for_each(|c| covering(&law, c.targets(n))),
        Kind::RegimeCompare => {
            let r = spec.regime.as_ref().expect("validated");
            let sub = spec.chords.iter().map(|c| (law, c.targets(n)));
            let sup = r.sup_chords.iter().map(|c| (r.sup_law, c.targets(n)));
            sub.chain(sup)
                .try_for_each(|(l, t)| covering(&l, t))
                .and_then(|_| covering(&r.sup_law, vec![vec![n, n]]))
        }
        Kind::HeightScan | Kind::Exits | Kind::UnionSize => {
            let n_max = *spec.n_list.last().expect("validated");
            dirs.iter()
                .try_for_each(|d| covering(&law, vec![d.scaled(n_max)]))
        }
        Kind::Concentration => {
            let n_max = *spec.n_list.last().expect("validated");
            let m = MarginPolicy::for_law(&law);
            let w = (2.0 * m.factor * n_max as f64).ceil() as i64 + m.extra + 1;
            let mut hi = vec![w; dim];
            hi[0] = n_max + 1;
            BoxSpec::new(vec![-w; dim], hi, vec![0; dim]).map(|b| boxes.push(b))
        }
        Kind::OracleSuite => Ok(()),
    };
    result.map_err(|e| e.to_string())?;
    match boxes.iter().map(|b| b.vertex_count()).max() {
        Some(v) if v > MAX_BOX_VERTICES => Err(format!(
            "a replica box would have {v} vertices, above the budget of {MAX_BOX_VERTICES}"
        )),
        _ => Ok(()),
    }
}
