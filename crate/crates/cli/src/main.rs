//! `fpp`: runs first-passage percolation experiments described by JSON specs.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fpp_core::harness::{self, exit_code, ExperimentSpec, Kind, ValidationIssue};
use fpp_core::Error;

#[derive(Parser, Debug)]
#[command(name = "fpp", version, about = "First-passage percolation experiments")]
struct Cli {
    /// Experiment spec (a single JSON document).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Master seed; overrides the spec.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads, 0 for all cores; overrides the spec.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Results CSV; overrides the spec. Defaults to a file under $FPP_OUT_DIR.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Reuse finished replica blocks and skip rows already recorded.
    #[arg(long, global = true)]
    resume: bool,

    /// Double chords whose midpoint is not a lattice point.
    #[arg(long, global = true)]
    auto_fix: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Time constant along each direction.
    Mu,
    /// Midpoint-convexity defect along each chord.
    Defect,
    /// Containment frequency of the random shape.
    ShapeCheck,
    /// Height of the geodesic union across scales.
    HeightScan,
    /// Exit counts on the planes of the midpoint slab.
    Exits,
    /// Size of the geodesic union and of its slab restriction.
    UnionSize,
    /// Subcritical versus supercritical flat-edge comparison.
    RegimeCompare,
    /// Fast searches against reference implementations.
    OracleSuite,
    /// Spread of point-to-plane passage times.
    Concentration,
    /// Check a spec without running it.
    Validate,
}

impl Command {
    fn kind(self) -> Option<Kind> {
        Some(match self {
            Command::Mu => Kind::Mu,
            Command::Defect => Kind::Defect,
            Command::ShapeCheck => Kind::ShapeCheck,
            Command::HeightScan => Kind::HeightScan,
            Command::Exits => Kind::Exits,
            Command::UnionSize => Kind::UnionSize,
            Command::RegimeCompare => Kind::RegimeCompare,
            Command::OracleSuite => Kind::OracleSuite,
            Command::Concentration => Kind::Concentration,
            Command::Validate => return None,
        })
    }
}

/// Default battery size of `oracle-suite` when no spec is given.
const ORACLE_CONFIGS: u64 = 500;

fn issue(path: &str, message: impl Into<String>) -> Error {
    Error::Validation(vec![ValidationIssue {
        path: path.into(),
        message: message.into(),
    }])
}

fn load_spec(cli: &Cli) -> Result<ExperimentSpec, Error> {
    let kind = cli.command.kind();
    let mut spec = match (&cli.config, kind) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
                path: path.clone(),
                source: e,
            })?;
            let mut value: serde_json::Value = serde_json::from_str(&text)?;
            let obj = value
                .as_object_mut()
                .ok_or_else(|| issue("", "the spec must be a JSON object"))?;
            if let Some(kind) = kind {
                match obj.get("kind").and_then(|k| k.as_str()) {
                    None => {
                        obj.insert("kind".into(), kind.as_str().into());
                    }
                    Some(k) if k != kind.as_str() => {
                        return Err(issue(
                            "kind",
                            format!("spec is a {k} experiment, not {kind}"),
                        ));
                    }
                    Some(_) => {}
                }
            }
            serde_json::from_value(value)?
        }
        (None, Some(Kind::OracleSuite)) => {
            let mut spec = ExperimentSpec::new(Kind::OracleSuite, ORACLE_CONFIGS, 0);
            spec.seed = None;
            spec
        }
        (None, _) => return Err(issue("config", "this command needs --config <path>")),
    };
    if let Some(seed) = cli.seed {
        spec.seed = Some(seed);
    }
    if let Some(threads) = cli.threads {
        spec.threads = threads;
    }
    if let Some(out) = &cli.out {
        spec.out = Some(out.clone());
    }
    spec.auto_fix |= cli.auto_fix;
    Ok(spec)
}

fn fmt_cell(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |x| format!("{x:.6}"))
}

fn execute(cli: &Cli) -> Result<i32, Error> {
    let spec = load_spec(cli)?;
    if cli.command.kind().is_none() {
        let issues = spec.validate();
        if issues.is_empty() {
            println!("ok {}", spec.experiment_id());
            return Ok(exit_code::OK);
        }
        return Err(Error::Validation(issues));
    }
    let outcome = harness::run(&spec, cli.resume)?;
    for r in &outcome.rows {
        println!(
            "{:<40} {:<26} mean {:>12} se {:>12} {}",
            r.label,
            r.statistic,
            fmt_cell(r.mean),
            fmt_cell(r.se),
            r.verdict.as_deref().unwrap_or("")
        );
    }
    log::info!(
        "{} rows {} {}; sidecar {}",
        outcome.rows.len(),
        if outcome.appended {
            "appended to"
        } else {
            "already in"
        },
        outcome.csv_path.display(),
        outcome.sidecar_path.display()
    );
    if outcome.oracle_failed {
        eprintln!("fpp: oracle suite found discrepancies");
    }
    Ok(outcome.exit_code())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let code = match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("fpp: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
