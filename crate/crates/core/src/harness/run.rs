use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

use super::checkpoint::{CheckpointStore, BLOCK_SIZE};
use super::results::{append_rows, recorded_ids, ResultRow, CSV_SCHEMA};
use super::spec::{ExperimentSpec, Kind, CAPACITY_PATH};
use crate::error::{Error, Result};
use crate::geodesic::oracle::{oracle_battery, superset_battery};
use crate::lattice::WeightLaw;
use crate::regime::{ChordVerdict, DiagonalCheck, OrientedScanTask, RegimeReport, RegimeSide};
use crate::replica::{derive_seed, run_replicas, ReplicaTask};
use crate::shape::{
    bounds_check, Chord, ConcentrationRow, DefectEstimate, DefectTask, Direction, MuEstimate,
    MuTask, PlaneTask, ShapeCheck, ShapeCheckTask, ShapeNorm,
};
use crate::slab::{HeightRow, HeightScan, HeightTask};
use crate::stats::Summary;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "FPP_OUT_DIR";

/// Version of the JSON sidecar layout.
pub const SIDECAR_SCHEMA: u32 = 1;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Process exit status for each outcome of a run.
pub mod exit_code {
    pub const OK: i32 = 0;
    pub const IO: i32 = 1;
    pub const VALIDATION: i32 = 2;
    pub const CAPACITY: i32 = 3;
    pub const ESTIMATION: i32 = 4;
    pub const ORACLE_FAILURE: i32 = 5;
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } | Error::Csv(_) => exit_code::IO,
            Error::Domain(_) | Error::Validation(_) | Error::Json(_) => exit_code::VALIDATION,
            Error::Capacity(_) => exit_code::CAPACITY,
            Error::Estimation(_) => exit_code::ESTIMATION,
        }
    }
}

/// What a finished run produced.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub experiment_id: String,
    pub rows: Vec<ResultRow>,
    pub csv_path: PathBuf,
    pub sidecar_path: PathBuf,
    /// Structured results, also stored in the sidecar.
    pub report: Value,
    /// `false` when resuming found the rows already recorded.
    pub appended: bool,
    /// Set by `oracle-suite` when a battery found a discrepancy.
    pub oracle_failed: bool,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        if self.oracle_failed {
            exit_code::ORACLE_FAILURE
        } else {
            exit_code::OK
        }
    }
}

/// Default results file for a spec: `<dir>/<kind>-<id prefix>.csv`, with
/// `dir` taken from [`OUT_DIR_ENV`] or `fpp-results`.
pub fn default_out_path(spec: &ExperimentSpec) -> PathBuf {
    let dir = std::env::var_os(OUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("fpp-results"));
    dir.join(format!("{}-{}.csv", spec.kind, &spec.experiment_id()[..12]))
}

/// Validates and runs an experiment, appending its rows to the results file
/// and writing the sidecar. With `resume`, finished replica blocks are read
/// back from their checkpoints and a run whose rows are already recorded is
/// not appended again.
pub fn run(spec: &ExperimentSpec, resume: bool) -> Result<RunOutcome> {
    let issues = spec.validate();
    if !issues.is_empty() {
        if issues.iter().all(|i| i.path == CAPACITY_PATH) {
            let msgs: Vec<String> = issues.into_iter().map(|i| i.message).collect();
            return Err(Error::capacity(msgs.join("; ")));
        }
        return Err(Error::Validation(issues));
    }
    let started = Instant::now();
    let fixed = spec.fixed();
    let id = spec.experiment_id();
    let csv_path = spec.out.clone().unwrap_or_else(|| default_out_path(spec));
    let ckpt_root = suffixed(&csv_path, ".ckpt");
    let mut ctx = Context {
        spec: &fixed,
        id: id.clone(),
        threads: spec.threads,
        store: CheckpointStore::new(&ckpt_root, &id),
        resume,
        tasks: Vec::new(),
        resumed_blocks: 0,
        computed_blocks: 0,
    };
    log::info!(
        "experiment {} ({}) -> {}",
        &id[..12],
        spec.kind,
        csv_path.display()
    );

    let (rows, report, oracle_failed) = match fixed.kind {
        Kind::Mu => ctx.mu()?,
        Kind::Defect => ctx.defect()?,
        Kind::ShapeCheck => ctx.shape_check()?,
        Kind::HeightScan | Kind::Exits | Kind::UnionSize => ctx.heights()?,
        Kind::Concentration => ctx.concentration()?,
        Kind::RegimeCompare => ctx.regime()?,
        Kind::OracleSuite => ctx.oracle_suite()?,
    };

    let already = resume && recorded_ids(&csv_path)?.contains(&id);
    if already {
        log::info!("rows of {} are already recorded; not appending", &id[..12]);
    } else {
        append_rows(&csv_path, &rows)?;
    }

    let sidecar_path = suffixed(&csv_path, &format!(".{}.json", &id[..12]));
    let sidecar = json!({
        "schema_version": SIDECAR_SCHEMA,
        "experiment_id": id,
        "version": VERSION,
        "kind": fixed.kind,
        "spec": serde_json::from_str::<Value>(&spec.canonical_json())?,
        "master_seed": fixed.seed,
        "tasks": ctx.tasks,
        "threads": spec.threads,
        "resumed_blocks": ctx.resumed_blocks,
        "computed_blocks": ctx.computed_blocks,
        "elapsed_seconds": started.elapsed().as_secs_f64(),
        "rows": rows.len(),
        "csv": csv_path,
        "report": report,
    });
    let text = serde_json::to_string_pretty(&sidecar)?;
    std::fs::write(&sidecar_path, text).map_err(|e| Error::io(&sidecar_path, e))?;

    Ok(RunOutcome {
        experiment_id: id,
        rows,
        csv_path,
        sidecar_path,
        report,
        appended: !already,
        oracle_failed,
    })
}

fn suffixed(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_os_string();
    s.push(suffix);
    PathBuf::from(s)
}

#[derive(Serialize)]
struct TaskRecord {
    label: String,
    seed: u64,
    replicas: u64,
}

type Produced = (Vec<ResultRow>, Value, bool);

struct Context<'a> {
    spec: &'a ExperimentSpec,
    id: String,
    threads: usize,
    store: CheckpointStore,
    resume: bool,
    tasks: Vec<TaskRecord>,
    resumed_blocks: u64,
    computed_blocks: u64,
}

impl Context<'_> {
    fn seed_for(&self, label: &str) -> u64 {
        derive_seed(
            self.spec.seed.expect("validated"),
            &format!("{}/{label}", self.id),
        )
    }

    fn law(&self) -> WeightLaw {
        self.spec.law.expect("validated")
    }

    fn n(&self) -> i64 {
        self.spec.n.expect("validated")
    }

    fn directions(&self) -> Vec<Direction> {
        self.spec.parsed_directions().expect("validated")
    }

    /// Replicas `0..count` of `task` in checkpointed blocks.
    fn replicas<T: ReplicaTask>(
        &mut self,
        task: &T,
        seed: u64,
        count: u64,
    ) -> Result<Vec<T::Outcome>> {
        let label = task.label();
        self.tasks.push(TaskRecord {
            label: label.clone(),
            seed,
            replicas: count,
        });
        let mut out = Vec::with_capacity(count as usize);
        let mut start = 0;
        while start < count {
            let end = (start + BLOCK_SIZE).min(count);
            let loaded = if self.resume {
                self.store.load::<T::Outcome>(&label, seed, start, end)
            } else {
                None
            };
            match loaded {
                Some(block) => {
                    self.resumed_blocks += 1;
                    out.extend(block);
                }
                None => {
                    let block = run_replicas(task, start..end, self.threads)?;
                    self.store.save(&label, seed, start, &block)?;
                    self.computed_blocks += 1;
                    out.extend(block);
                }
            }
            log::debug!("{label}: {end}/{count} replicas");
            start = end;
        }
        Ok(out)
    }

    fn row(&self, label: String, statistic: &str) -> ResultRow {
        let law = self.spec.law;
        ResultRow {
            experiment_id: self.id.clone(),
            kind: self.spec.kind.to_string(),
            label,
            statistic: statistic.to_string(),
            law_a: law.map(|l| l.a),
            law_b: law.map(|l| l.b),
            law_p: law.map(|l| l.p),
            dim: self.spec.dim,
            kappa: self.spec.kappa,
            t: self.spec.t,
            epsilon: self.spec.epsilon,
            replicas: self.spec.replicas,
            seed: self.spec.seed.expect("validated"),
            version: VERSION.to_string(),
            schema: CSV_SCHEMA,
            ..ResultRow::default()
        }
    }

    fn mu_estimate(&mut self, law: WeightLaw, x: &Direction, prefix: &str) -> Result<MuEstimate> {
        let mut task = MuTask::new(law, x.clone(), self.n(), 0);
        task.seed = self.seed_for(&format!("{prefix}{}", task.label()));
        let outcomes = self.replicas(&task, task.seed, self.spec.replicas)?;
        MuEstimate::from_outcomes(&task, &outcomes)
    }

    fn mu_row(&self, m: &MuEstimate, prefix: &str) -> ResultRow {
        let mut r = self.row(format!("{prefix}mu/{}/n={}", m.direction, m.n), "T/n");
        r.law_a = Some(m.law.a);
        r.law_b = Some(m.law.b);
        r.law_p = Some(m.law.p);
        r.direction = Some(m.direction.to_string());
        r.n = Some(m.n);
        r.truncation_failures = Some(m.truncation_failures);
        r.with_summary(&m.summary)
    }

    fn mu(&mut self) -> Result<Produced> {
        let law = self.law();
        let profile = self
            .directions()
            .iter()
            .map(|x| self.mu_estimate(law, x, ""))
            .collect::<Result<Vec<_>>>()?;
        let mut rows: Vec<ResultRow> = profile.iter().map(|m| self.mu_row(m, "")).collect();
        let axis = Direction::axis(self.spec.dim);
        let bounds = if profile.len() > 1 && profile.iter().any(|m| m.direction == axis) {
            let report = bounds_check(&profile)?;
            for b in &report.rows {
                let verdict = if b.holds { "holds" } else { "violated" };
                for (stat, value, slack) in [
                    ("mu_F*linf", b.lower, b.lower_slack),
                    ("mu_F*l1", b.upper, b.upper_slack),
                ] {
                    let mut r = self.row(format!("bounds/{}", b.direction), stat);
                    r.direction = Some(b.direction.to_string());
                    r.n = self.spec.n;
                    r.verdict = Some(verdict.to_string());
                    rows.push(r.with_value(value, Some(slack / 3.0)));
                }
            }
            Some(report)
        } else {
            None
        };
        Ok((rows, json!({ "profile": profile, "bounds": bounds }), false))
    }

    fn defect_estimate(
        &mut self,
        law: WeightLaw,
        chord: &Chord,
        prefix: &str,
    ) -> Result<DefectEstimate> {
        let mut task = DefectTask::new(law, chord.clone(), self.n(), 0);
        task.seed = self.seed_for(&format!("{prefix}{}", task.label()));
        let outcomes = self.replicas(&task, task.seed, self.spec.replicas)?;
        DefectEstimate::from_outcomes(&task, &outcomes)
    }

    fn defect_row(&self, e: &DefectEstimate, prefix: &str) -> ResultRow {
        let mut r = self.row(format!("{prefix}defect/{}/n={}", e.chord, e.n), "defect");
        r.law_a = Some(e.law.a);
        r.law_b = Some(e.law.b);
        r.law_p = Some(e.law.p);
        r.chord = Some(e.chord.to_string());
        r.n = Some(e.n);
        r.verdict = Some(e.verdict().as_str().to_string());
        r.truncation_failures = Some(e.truncation_failures);
        r.with_summary(&e.defect)
    }

    fn defect(&mut self) -> Result<Produced> {
        let law = self.law();
        let chords = self.spec.chords.clone();
        let estimates = chords
            .iter()
            .map(|c| self.defect_estimate(law, c, ""))
            .collect::<Result<Vec<_>>>()?;
        let rows = estimates.iter().map(|e| self.defect_row(e, "")).collect();
        let report: Vec<ChordVerdict> = estimates.into_iter().map(ChordVerdict::new).collect();
        Ok((rows, json!({ "chords": report }), false))
    }

    fn shape_check(&mut self) -> Result<Produced> {
        let law = self.law();
        let profile = self
            .directions()
            .iter()
            .map(|x| self.mu_estimate(law, x, ""))
            .collect::<Result<Vec<_>>>()?;
        let norm = ShapeNorm::from_estimates(&profile)?;
        let mut task = ShapeCheckTask {
            law,
            norm,
            t: self.spec.t.expect("validated"),
            epsilon: self.spec.epsilon.expect("validated"),
            seed: 0,
        };
        task.seed = self.seed_for(&task.label());
        let outcomes = self.replicas(&task, task.seed, self.spec.replicas)?;
        let check = ShapeCheck::from_outcomes(&task, &outcomes)?;
        let mut rows: Vec<ResultRow> = profile.iter().map(|m| self.mu_row(m, "")).collect();
        let mut r = self.row(task.label(), "contained");
        r.count = Some(check.replicas - check.truncation_failures);
        r.truncation_failures = Some(check.truncation_failures);
        rows.push(r.with_value(check.frequency(), None));
        Ok((
            rows,
            json!({ "profile": profile, "norm": task.norm, "check": check }),
            false,
        ))
    }

    fn heights(&mut self) -> Result<Produced> {
        let law = self.law();
        let kappa = self.spec.kappa.expect("validated");
        let kind = self.spec.kind;
        let mut rows = Vec::new();
        let mut scans = Vec::new();
        for x in self.directions() {
            let mut per_n = Vec::new();
            for &n in &self.spec.n_list {
                let mut task = HeightTask::new(law, x.clone(), n, kappa, 0);
                task.seed = self.seed_for(&task.label());
                let outcomes = self.replicas(&task, task.seed, self.spec.replicas)?;
                let h = HeightRow::from_outcomes(&task, &outcomes)?;
                let label = task.label();
                let base = |stat: &str| {
                    let mut r = self.row(label.clone(), stat);
                    r.direction = Some(x.to_string());
                    r.n = Some(n);
                    r.truncation_failures = Some(h.truncation_failures);
                    r
                };
                match kind {
                    Kind::HeightScan => rows.push(base("h/n").with_summary(&h.ratio)),
                    Kind::Exits => {
                        rows.push(base("slab-exits").with_summary(&h.slab_exits));
                        let mut r = base("min-crossing");
                        r.min = Some(h.min_crossing as f64);
                        r.verdict = Some(
                            if h.min_crossing >= 1 {
                                "ok"
                            } else {
                                "empty-plane"
                            }
                            .into(),
                        );
                        rows.push(r);
                    }
                    _ => {
                        rows.push(base("|R|/n").with_summary(&h.union_ratio));
                        rows.push(base("|R_slab|/(kappa n)").with_summary(&h.slab_ratio));
                    }
                }
                per_n.push(h);
            }
            let scan = HeightScan::from_rows(law, x.clone(), kappa, per_n);
            let label = format!("{}/{}", kind, x);
            let base = |stat: &str| {
                let mut r = self.row(label.clone(), stat);
                r.direction = Some(x.to_string());
                r
            };
            match kind {
                Kind::HeightScan => {
                    let mut r = base("median h/n");
                    r.verdict = Some(
                        if scan.ratio_strictly_decreasing() {
                            "strictly-decreasing"
                        } else {
                            "not-decreasing"
                        }
                        .into(),
                    );
                    rows.push(r);
                    if let Some(fit) = &scan.fit {
                        rows.push(base("xi").with_value(fit.xi, Some(fit.se)));
                    }
                }
                Kind::UnionSize => {
                    for (stat, trend) in [
                        ("trend |R|/n", scan.union_trend()),
                        ("trend |R_slab|/(kappa n)", scan.slab_trend()),
                    ] {
                        if let Some(t) = trend {
                            let mut r = base(stat).with_value(t.slope, Some(t.slope_se));
                            r.verdict = Some(
                                if t.not_increasing() {
                                    "not-increasing"
                                } else {
                                    "increasing"
                                }
                                .into(),
                            );
                            rows.push(r);
                        }
                    }
                }
                _ => {}
            }
            scans.push(scan);
        }
        Ok((rows, json!({ "scans": scans }), false))
    }

    fn concentration(&mut self) -> Result<Produced> {
        let law = self.law();
        let mut rows = Vec::new();
        let mut report = Vec::new();
        for &n in &self.spec.n_list {
            let mut task = PlaneTask::new(law, self.spec.dim, n, 0);
            task.seed = self.seed_for(&task.label());
            let outcomes = self.replicas(&task, task.seed, self.spec.replicas)?;
            let c = ConcentrationRow::from_outcomes(&task, &outcomes)?;
            let nf = n as f64;
            let s = &c.summary;
            let scaled = Summary {
                count: s.count,
                mean: s.mean / nf,
                sd: s.sd / nf,
                se: s.se / nf,
                median: s.median / nf,
                min: s.min / nf,
                max: s.max / nf,
            };
            let mut r = self.row(task.label(), "b/n");
            r.n = Some(n);
            r.truncation_failures = Some(c.truncation_failures);
            rows.push(r.with_summary(&scaled));
            report.push(c);
        }
        Ok((rows, json!({ "rows": report }), false))
    }

    fn regime(&mut self) -> Result<Produced> {
        let params = self.spec.regime.clone().expect("validated");
        let fan = self.directions();
        let side =
            |ctx: &mut Self, label: &str, law: WeightLaw, chords: &[Chord]| -> Result<RegimeSide> {
                let prefix = format!("{label}/");
                let chords = chords
                    .iter()
                    .map(|c| Ok(ChordVerdict::new(ctx.defect_estimate(law, c, &prefix)?)))
                    .collect::<Result<Vec<_>>>()?;
                let profile = fan
                    .iter()
                    .map(|x| ctx.mu_estimate(law, x, &prefix))
                    .collect::<Result<Vec<_>>>()?;
                Ok(RegimeSide {
                    label: label.to_string(),
                    law,
                    chords,
                    profile,
                })
            };
        let sub_chords = self.spec.chords.clone();
        let sub = side(self, "sub", self.law(), &sub_chords)?;
        let sup = side(self, "sup", params.sup_law, &params.sup_chords)?;

        let diag = Direction::new(vec![1, 1])?;
        let mu = self.mu_estimate(params.sup_law, &diag, "sup/diagonal/")?;
        let mut scan = OrientedScanTask::new(params.sup_law, params.scan_n, 0);
        scan.seed = self.seed_for(&format!("sup/{}", scan.label()));
        let hits = self.replicas(&scan, scan.seed, params.scan_replicas)?;
        let diagonal = DiagonalCheck::from_parts(mu, params.scan_n, &hits);

        let mut rows = Vec::new();
        for s in [&sub, &sup] {
            let prefix = format!("{}/", s.label);
            for c in &s.chords {
                rows.push(self.defect_row(&c.estimate, &prefix));
            }
            for m in &s.profile {
                rows.push(self.mu_row(m, &prefix));
            }
        }
        let mut r = self.mu_row(&diagonal.mu, "sup/diagonal/");
        r.verdict = Some(
            if diagonal.within {
                "within-3se-of-2a"
            } else {
                "outside-3se-of-2a"
            }
            .into(),
        );
        rows.push(r);
        let mut r = self.row(format!("sup/{}", scan.label()), "oriented-path-frequency");
        r.law_a = Some(params.sup_law.a);
        r.law_b = Some(params.sup_law.b);
        r.law_p = Some(params.sup_law.p);
        r.n = Some(params.scan_n);
        r.replicas = params.scan_replicas;
        r.count = Some(diagonal.scan_replicas);
        rows.push(r.with_value(diagonal.scan_frequency, None));

        let report = RegimeReport { sub, sup, diagonal };
        Ok((rows, serde_json::to_value(&report)?, false))
    }

    fn oracle_suite(&mut self) -> Result<Produced> {
        let side = self.spec.n.unwrap_or(12);
        let seed = self.seed_for("oracle-suite");
        self.tasks.push(TaskRecord {
            label: "oracle-suite".into(),
            seed,
            replicas: self.spec.replicas,
        });
        let oracle = oracle_battery(seed, self.spec.replicas, side)?;
        let superset = superset_battery(seed, self.spec.replicas)?;
        let failed = oracle.mismatches > 0 || superset.violations > 0 || !superset.fixture_strict;
        let verdict = |ok: bool| Some(if ok { "pass" } else { "fail" }.to_string());
        let mut a = self.row(format!("oracle/side={side}"), "mismatched-configs");
        a.n = Some(side);
        a.count = Some(oracle.configs);
        a.verdict = verdict(oracle.mismatches == 0);
        let mut b = self.row("superset/side=4".into(), "violations");
        b.n = Some(4);
        b.count = Some(superset.configs + 1);
        b.verdict = verdict(superset.violations == 0);
        let mut c = self.row("superset/pendant".into(), "strict-containment");
        c.verdict = verdict(superset.fixture_strict);
        let rows = vec![
            a.with_value(oracle.mismatches as f64, None),
            b.with_value(superset.violations as f64, None),
            c,
        ];
        Ok((
            rows,
            json!({ "oracle": oracle, "superset": superset }),
            failed,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec_in(dir: &Path, json: &str) -> ExperimentSpec {
        let mut s = ExperimentSpec::from_json(json).unwrap();
        s.out = Some(dir.join("out.csv"));
        s
    }

    #[test]
    fn trivial_mu_run() {
        let dir = tempfile::tempdir().unwrap();
        let spec = spec_in(
            dir.path(),
            r#"{"kind": "mu", "law": {"a": 1, "b": 1, "p": 1.0},
                "directions": [[1, 0]], "n": 16, "replicas": 4, "seed": 1}"#,
        );
        let out = run(&spec, false).unwrap();
        assert_eq!(out.rows.len(), 1);
        assert_eq!(out.rows[0].mean, Some(1.0));
        assert_eq!(out.rows[0].se, Some(0.0));
        assert_eq!(out.exit_code(), exit_code::OK);
        let sidecar: Value =
            serde_json::from_slice(&std::fs::read(&out.sidecar_path).unwrap()).unwrap();
        assert_eq!(sidecar["schema_version"], 1);
        assert_eq!(sidecar["tasks"][0]["replicas"], 4);
    }

    #[test]
    fn resume_reuses_blocks_and_rows() {
        let dir = tempfile::tempdir().unwrap();
        let spec = spec_in(
            dir.path(),
            r#"{"kind": "defect", "law": {"a": 0, "b": 1, "p": 0.3},
                "chords": [{"x1": [2, 1], "x2": [2, -1]}], "n": 4, "replicas": 60, "seed": 9}"#,
        );
        let first = run(&spec, false).unwrap();
        let bytes = std::fs::read(&first.csv_path).unwrap();
        let again = run(&spec, true).unwrap();
        assert!(!again.appended);
        assert_eq!(again.rows, first.rows);
        assert_eq!(std::fs::read(&first.csv_path).unwrap(), bytes);
        let sidecar: Value =
            serde_json::from_slice(&std::fs::read(&again.sidecar_path).unwrap()).unwrap();
        assert_eq!(sidecar["resumed_blocks"], 2);
        assert_eq!(sidecar["computed_blocks"], 0);
    }

    #[test]
    fn invalid_and_oversized_specs() {
        let dir = tempfile::tempdir().unwrap();
        let mut spec = spec_in(
            dir.path(),
            r#"{"kind": "mu", "law": {"a": 1, "b": 1, "p": 1.0},
                "directions": [[1, 0]], "n": 16, "replicas": 4}"#,
        );
        let err = run(&spec, false).unwrap_err();
        assert_eq!(err.exit_code(), exit_code::VALIDATION);
        spec.seed = Some(1);
        spec.n = Some(100_000);
        let err = run(&spec, false).unwrap_err();
        assert_eq!(err.exit_code(), exit_code::CAPACITY);
    }

    #[test]
    fn oracle_suite_passes() {
        let dir = tempfile::tempdir().unwrap();
        let spec = spec_in(
            dir.path(),
            r#"{"kind": "oracle-suite", "replicas": 10, "seed": 2}"#,
        );
        let out = run(&spec, false).unwrap();
        assert!(!out.oracle_failed);
        assert_eq!(out.rows.len(), 3);
        assert!(out
            .rows
            .iter()
            .all(|r| r.verdict.as_deref() == Some("pass")));
    }
}
