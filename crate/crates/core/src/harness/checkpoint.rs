use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Replicas per checkpoint block.
pub const BLOCK_SIZE: u64 = 50;

pub const CHECKPOINT_SCHEMA: u32 = 1;

/// Outcomes of replicas `start..end` of one task.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Checkpoint<O> {
    pub schema_version: u32,
    pub experiment_id: String,
    pub label: String,
    pub seed: u64,
    pub start: u64,
    pub end: u64,
    pub outcomes: Vec<O>,
}

impl<O: DeserializeOwned> Checkpoint<O> {
    /// Parses a checkpoint and checks that it is internally consistent.
    pub fn decode(bytes: &[u8]) -> Result<Self> {
        let c: Checkpoint<O> = serde_json::from_slice(bytes)?;
        if c.schema_version != CHECKPOINT_SCHEMA {
            return Err(Error::domain(format!(
                "checkpoint schema {} is not {CHECKPOINT_SCHEMA}",
                c.schema_version
            )));
        }
        if c.end < c.start || c.end - c.start != c.outcomes.len() as u64 {
            return Err(Error::domain(format!(
                "checkpoint covers {}..{} but holds {} outcomes",
                c.start,
                c.end,
                c.outcomes.len()
            )));
        }
        Ok(c)
    }

    fn matches(&self, id: &str, label: &str, seed: u64, start: u64, end: u64) -> bool {
        self.experiment_id == id
            && self.label == label
            && self.seed == seed
            && self.start == start
            && self.end == end
    }
}

/// Block files of one experiment, one directory per experiment id.
pub(crate) struct CheckpointStore {
    dir: PathBuf,
    experiment_id: String,
}

impl CheckpointStore {
    pub(crate) fn new(root: &Path, experiment_id: &str) -> Self {
        CheckpointStore {
            dir: root.join(&experiment_id[..16]),
            experiment_id: experiment_id.to_string(),
        }
    }

    fn path(&self, label: &str, seed: u64, start: u64) -> PathBuf {
        let mut h = Sha256::new();
        h.update(seed.to_le_bytes());
        h.update(label.as_bytes());
        let digest = h.finalize();
        let tag: String = digest[..8].iter().map(|b| format!("{b:02x}")).collect();
        self.dir.join(format!("{tag}-{start:08}.json"))
    }

    /// A previously written block, if present and consistent with the request.
    pub(crate) fn load<O: DeserializeOwned>(
        &self,
        label: &str,
        seed: u64,
        start: u64,
        end: u64,
    ) -> Option<Vec<O>> {
        let path = self.path(label, seed, start);
        let bytes = std::fs::read(&path).ok()?;
        match Checkpoint::<O>::decode(&bytes) {
            Ok(c) if c.matches(&self.experiment_id, label, seed, start, end) => Some(c.outcomes),
            Ok(_) => {
                log::warn!("ignoring checkpoint {} from another run", path.display());
                None
            }
            Err(e) => {
                log::warn!("ignoring unreadable checkpoint {}: {e}", path.display());
                None
            }
        }
    }

    /// Writes a block through a temporary file so that a crash never leaves a
    /// truncated checkpoint behind.
    pub(crate) fn save<O: Serialize>(
        &self,
        label: &str,
        seed: u64,
        start: u64,
        outcomes: &[O],
    ) -> Result<()> {
        std::fs::create_dir_all(&self.dir).map_err(|e| Error::io(&self.dir, e))?;
        let c = Checkpoint {
            schema_version: CHECKPOINT_SCHEMA,
            experiment_id: self.experiment_id.clone(),
            label: label.to_string(),
            seed,
            start,
            end: start + outcomes.len() as u64,
            outcomes: outcomes.iter().collect::<Vec<_>>(),
        };
        let path = self.path(label, seed, start);
        let tmp = path.with_extension("json.tmp");
        std::fs::write(&tmp, serde_json::to_vec(&c)?).map_err(|e| Error::io(&tmp, e))?;
        std::fs::rename(&tmp, &path).map_err(|e| Error::io(&path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        let id = "ab".repeat(32);
        let store = CheckpointStore::new(dir.path(), &id);
        store
            .save("mu/(1,0)/n=8", 5, 50, &[Some(3u32), None])
            .unwrap();
        let back: Option<Vec<Option<u32>>> = store.load("mu/(1,0)/n=8", 5, 50, 52);
        assert_eq!(back, Some(vec![Some(3), None]));
        assert!(store
            .load::<Option<u32>>("mu/(1,0)/n=8", 6, 50, 52)
            .is_none());
        assert!(store
            .load::<Option<u32>>("mu/(1,1)/n=8", 5, 50, 52)
            .is_none());
    }

    #[test]
    fn inconsistent_block_is_rejected() {
        let text = r#"{"schema_version":1,"experiment_id":"x","label":"l","seed":0,
                       "start":0,"end":3,"outcomes":[1,2]}"#;
        assert!(Checkpoint::<u32>::decode(text.as_bytes()).is_err());
        let text = text.replace("\"end\":3", "\"end\":2");
        assert_eq!(
            Checkpoint::<u32>::decode(text.as_bytes()).unwrap().outcomes,
            vec![1, 2]
        );
    }
}
