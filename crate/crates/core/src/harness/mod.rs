//! Experiment specs, checkpointed replica orchestration and append-only
//! results: a CSV table plus one JSON provenance sidecar per run.

mod checkpoint;
mod results;
mod run;
mod spec;

pub use checkpoint::{Checkpoint, BLOCK_SIZE, CHECKPOINT_SCHEMA};
pub use results::{
    append_rows, encode_rows, read_rows, recorded_ids, ResultRow, COLUMNS, CSV_SCHEMA,
};
pub use run::{default_out_path, exit_code, run, RunOutcome, OUT_DIR_ENV, SIDECAR_SCHEMA, VERSION};
pub use spec::{ExperimentSpec, Kind, RegimeParams, CAPACITY_PATH, MAX_BOX_VERTICES};

use serde::{Deserialize, Serialize};

/// One failed precondition of an experiment spec, located by field path.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationIssue {
    pub path: String,
    pub message: String,
}

impl std::fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}
