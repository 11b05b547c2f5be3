//! Experience datasets, their on-disk format, and per-core partitioning.
//!
//! Datasets are immutable after construction; chunks are read-only views,
//! so both can be shared freely across simulation threads.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use thiserror::Error;

use crate::envs::{EnvKind, EnvSpec};

/// One logged experience tuple.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub state: u32,
    pub action: u32,
    pub reward: f32,
    pub next_state: u32,
}

/// File magic for the binary dataset format.
pub const DATASET_MAGIC: [u8; 4] = *b"SWRL";
/// Current format version.
pub const DATASET_VERSION: u16 = 1;
/// Fixed header length in bytes.
pub const HEADER_LEN: usize = 32;
/// Fixed record length in bytes.
pub const RECORD_LEN: usize = 16;

/// The offline experience log, tagged with the environment it came from and
/// the seed that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    spec: EnvSpec,
    transitions: Vec<Transition>,
    seed: u64,
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("dataset must contain at least one transition")]
    Empty,
    #[error("transition {index} violates the environment invariants: state={state} action={action} next_state={next_state}")]
    InvalidTransition {
        index: usize,
        state: u32,
        action: u32,
        next_state: u32,
    },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: bad magic at byte 0 (expected \"SWRL\")")]
    BadMagic { path: String },
    #[error("{path}: unsupported format version {version} at byte 4")]
    BadVersion { path: String, version: u16 },
    #[error("{path}: unknown environment tag {tag} at byte 6")]
    BadEnvTag { path: String, tag: u8 },
    #[error("{path}: header shape {n_states}x{n_actions} does not match {env} at byte 8")]
    ShapeMismatch {
        path: String,
        env: &'static str,
        n_states: u32,
        n_actions: u32,
    },
    #[error("{path}: truncated at byte {offset} (expected {expected} bytes)")]
    Truncated {
        path: String,
        offset: usize,
        expected: usize,
    },
    #[error("{path}: {extra} trailing bytes after the last record at byte {offset}")]
    TrailingBytes {
        path: String,
        offset: usize,
        extra: usize,
    },
    #[error("{path}: record {index} at byte {offset} violates invariants: state={state} action={action} next_state={next_state}")]
    BadRecord {
        path: String,
        index: usize,
        offset: usize,
        state: u32,
        action: u32,
        next_state: u32,
    },
}

/// Balanced-partition failure.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PartitionError {
    #[error("n_cores must be >= 1")]
    ZeroCores,
    #[error("n_cores ({n_cores}) exceeds dataset length ({len})")]
    MoreCoresThanData { n_cores: usize, len: usize },
}

impl Dataset {
    /// Build a dataset, checking that every transition is in range for the
    /// environment.
    pub fn new(
        spec: EnvSpec,
        transitions: Vec<Transition>,
        seed: u64,
    ) -> Result<Self, DatasetError> {
        if transitions.is_empty() {
            return Err(DatasetError::Empty);
        }
        for (index, t) in transitions.iter().enumerate() {
            if t.state >= spec.n_states()
                || t.next_state >= spec.n_states()
                || t.action >= spec.n_actions()
            {
                return Err(DatasetError::InvalidTransition {
                    index,
                    state: t.state,
                    action: t.action,
                    next_state: t.next_state,
                });
            }
        }
        Ok(Dataset {
            spec,
            transitions,
            seed,
        })
    }

    pub fn spec(&self) -> EnvSpec {
        self.spec
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn len(&self) -> usize {
        self.transitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transitions.is_empty()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// A core's contiguous slice of the parent dataset.
#[derive(Debug, Clone, Copy)]
pub struct Chunk<'a> {
    pub core_id: usize,
    /// Index of the first transition within the parent dataset.
    pub offset: usize,
    pub transitions: &'a [Transition],
}

impl Chunk<'_> {
    pub fn len(&self) -> usize {
        self.transitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transitions.is_empty()
    }
}

/// Split a dataset into `n_cores` contiguous, order-preserving chunks whose
/// sizes differ by at most one; the first `len % n_cores` chunks carry the
/// extra element.
pub fn partition(dataset: &Dataset, n_cores: usize) -> Result<Vec<Chunk<'_>>, PartitionError> {
    if n_cores == 0 {
        return Err(PartitionError::ZeroCores);
    }
    let len = dataset.len();
    if n_cores > len {
        return Err(PartitionError::MoreCoresThanData { n_cores, len });
    }
    let base = len / n_cores;
    let remainder = len % n_cores;
    let mut chunks = Vec::with_capacity(n_cores);
    let mut offset = 0;
    for core_id in 0..n_cores {
        let size = base + usize::from(core_id < remainder);
        chunks.push(Chunk {
            core_id,
            offset,
            transitions: &dataset.transitions[offset..offset + size],
        });
        offset += size;
    }
    debug_assert_eq!(offset, len);
    Ok(chunks)
}

fn env_tag(kind: EnvKind) -> u8 {
    match kind {
        EnvKind::FrozenLake => 0,
        EnvKind::Taxi => 1,
    }
}

/// Write the little-endian binary format:
/// magic "SWRL" | version u16 | env u8 | reserved u8 | n_states u32 |
/// n_actions u32 | count u64 | seed u64 | count * (state u32, action u32,
/// reward f32 bits, next_state u32).
pub fn write_dataset(dataset: &Dataset, path: &Path) -> Result<(), DatasetError> {
    let io_err = |source| DatasetError::Io {
        path: path.display().to_string(),
        source,
    };
    let file = File::create(path).map_err(io_err)?;
    let mut w = BufWriter::new(file);

    let mut header = Vec::with_capacity(HEADER_LEN);
    header.extend_from_slice(&DATASET_MAGIC);
    header.extend_from_slice(&DATASET_VERSION.to_le_bytes());
    header.push(env_tag(dataset.spec.kind()));
    header.push(0); // reserved
    header.extend_from_slice(&dataset.spec.n_states().to_le_bytes());
    header.extend_from_slice(&dataset.spec.n_actions().to_le_bytes());
    header.extend_from_slice(&(dataset.len() as u64).to_le_bytes());
    header.extend_from_slice(&dataset.seed.to_le_bytes());
    debug_assert_eq!(header.len(), HEADER_LEN);
    w.write_all(&header).map_err(io_err)?;

    let mut record = [0u8; RECORD_LEN];
    for t in &dataset.transitions {
        record[0..4].copy_from_slice(&t.state.to_le_bytes());
        record[4..8].copy_from_slice(&t.action.to_le_bytes());
        record[8..12].copy_from_slice(&t.reward.to_bits().to_le_bytes());
        record[12..16].copy_from_slice(&t.next_state.to_le_bytes());
        w.write_all(&record).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

fn read_u32(bytes: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(bytes[at..at + 4].try_into().unwrap())
}

/// Read and validate a dataset file written by [`write_dataset`].
pub fn read_dataset(path: &Path) -> Result<Dataset, DatasetError> {
    let path_str = path.display().to_string();
    let io_err = |source| DatasetError::Io {
        path: path_str.clone(),
        source,
    };

    let mut bytes = Vec::new();
    File::open(path)
        .map_err(io_err)?
        .read_to_end(&mut bytes)
        .map_err(io_err)?;

    if bytes.len() < HEADER_LEN {
        return Err(DatasetError::Truncated {
            path: path_str,
            offset: bytes.len(),
            expected: HEADER_LEN,
        });
    }
    if bytes[0..4] != DATASET_MAGIC {
        return Err(DatasetError::BadMagic { path: path_str });
    }
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != DATASET_VERSION {
        return Err(DatasetError::BadVersion {
            path: path_str,
            version,
        });
    }
    let spec = match bytes[6] {
        0 => EnvSpec::frozen_lake(),
        1 => EnvSpec::taxi(),
        tag => {
            return Err(DatasetError::BadEnvTag {
                path: path_str,
                tag,
            })
        }
    };
    let n_states = read_u32(&bytes, 8);
    let n_actions = read_u32(&bytes, 12);
    if n_states != spec.n_states() || n_actions != spec.n_actions() {
        return Err(DatasetError::ShapeMismatch {
            path: path_str,
            env: spec.kind().as_str(),
            n_states,
            n_actions,
        });
    }
    let count = u64::from_le_bytes(bytes[16..24].try_into().unwrap()) as usize;
    let seed = u64::from_le_bytes(bytes[24..32].try_into().unwrap());

    let expected = HEADER_LEN + count * RECORD_LEN;
    if bytes.len() < expected {
        return Err(DatasetError::Truncated {
            path: path_str,
            offset: bytes.len(),
            expected,
        });
    }
    if bytes.len() > expected {
        return Err(DatasetError::TrailingBytes {
            path: path_str,
            offset: expected,
            extra: bytes.len() - expected,
        });
    }
    if count == 0 {
        return Err(DatasetError::Empty);
    }

    let mut transitions = Vec::with_capacity(count);
    for index in 0..count {
        let offset = HEADER_LEN + index * RECORD_LEN;
        let t = Transition {
            state: read_u32(&bytes, offset),
            action: read_u32(&bytes, offset + 4),
            reward: f32::from_bits(read_u32(&bytes, offset + 8)),
            next_state: read_u32(&bytes, offset + 12),
        };
        if t.state >= n_states || t.next_state >= n_states || t.action >= n_actions {
            return Err(DatasetError::BadRecord {
                path: path_str,
                index,
                offset,
                state: t.state,
                action: t.action,
                next_state: t.next_state,
            });
        }
        transitions.push(t);
    }
    Ok(Dataset {
        spec,
        transitions,
        seed,
    })
}
