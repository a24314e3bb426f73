//! Seeded replica execution.
//!
//! A replica is identified by `(seed, index)`; its configuration stream comes
//! from the counter-based generator, so results never depend on which thread
//! ran it or in what order. Outcomes are always returned in index order.

use std::ops::Range;

use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// A per-replica computation with a serializable outcome, so that finished
/// blocks of replicas can be checkpointed and reloaded.
pub trait ReplicaTask: Sync {
    type Outcome: Serialize + DeserializeOwned + Send + Clone;

    /// Stable name of the task; used to derive seeds and checkpoint names.
    fn label(&self) -> String;

    fn run(&self, replica: u64) -> Result<Self::Outcome>;
}

/// Runs `replicas` of `task` on `threads` workers (`0` means all cores).
///
/// The first error in replica order is returned, independent of scheduling.
pub fn run_replicas<T: ReplicaTask>(
    task: &T,
    replicas: Range<u64>,
    threads: usize,
) -> Result<Vec<T::Outcome>> {
    let work = || {
        replicas
            .clone()
            .into_par_iter()
            .map(|r| task.run(r))
            .collect::<Vec<_>>()
    };
    let results = if threads == 1 {
        replicas.clone().map(|r| task.run(r)).collect()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::capacity(format!("cannot start thread pool: {e}")))?
            .install(work)
    };
    results.into_iter().collect()
}

/// Derives an independent 64-bit seed from a master seed and a label.
pub fn derive_seed(master: u64, label: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(master.to_le_bytes());
    h.update(label.as_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}
