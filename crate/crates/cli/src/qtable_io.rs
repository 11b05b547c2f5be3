//! Q-table file format: 16-byte header (magic "SWQT", n_states u32,
//! n_actions u32, reserved u32) followed by little-endian f32 values in
//! row-major order.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use pimrl_core::{DType, QTable};

pub const QTABLE_MAGIC: [u8; 4] = *b"SWQT";
pub const QTABLE_HEADER_LEN: usize = 16;

pub fn write_qtable(table: &QTable, path: &Path) -> Result<()> {
    assert_eq!(
        table.dtype(),
        DType::Fp32,
        "only descaled FP32 tables are persisted"
    );
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .with_context(|| format!("creating {}", parent.display()))?;
        }
    }
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    w.write_all(&QTABLE_MAGIC)?;
    w.write_all(&(table.n_states() as u32).to_le_bytes())?;
    w.write_all(&(table.n_actions() as u32).to_le_bytes())?;
    w.write_all(&0u32.to_le_bytes())?;
    for &v in table.values() {
        w.write_all(&v.to_bits().to_le_bytes())?;
    }
    w.flush()
        .with_context(|| format!("writing {}", path.display()))
}

pub fn read_qtable(path: &Path) -> Result<QTable> {
    let mut bytes = Vec::new();
    File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .with_context(|| format!("reading {}", path.display()))?;

    if bytes.len() < QTABLE_HEADER_LEN {
        bail!(
            "{}: truncated at byte {} (needs a 16-byte header)",
            path.display(),
            bytes.len()
        );
    }
    if bytes[0..4] != QTABLE_MAGIC {
        bail!(
            "{}: bad magic at byte 0 (expected \"SWQT\")",
            path.display()
        );
    }
    let n_states = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    let n_actions = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    let expected = QTABLE_HEADER_LEN + 4 * n_states * n_actions;
    if bytes.len() != expected {
        bail!(
            "{}: expected {} bytes for a {}x{} table, found {}",
            path.display(),
            expected,
            n_states,
            n_actions,
            bytes.len()
        );
    }
    let values = bytes[QTABLE_HEADER_LEN..]
        .chunks_exact(4)
        .map(|c| f32::from_bits(u32::from_le_bytes(c.try_into().unwrap())))
        .collect();
    Ok(QTable::from_values(n_states, n_actions, values))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.swqt");
        let values: Vec<f32> = (0..64)
            .map(|i| f32::from_bits(0x3f00_0000 + i * 977))
            .collect();
        let table = QTable::from_values(16, 4, values);
        write_qtable(&table, &path).unwrap();
        let back = read_qtable(&path).unwrap();
        assert_eq!(back, table);
    }

    #[test]
    fn bad_magic_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.swqt");
        write_qtable(&QTable::zeros_fp32(2, 2), &path).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes[0] = b'X';
        std::fs::write(&path, &bytes).unwrap();
        assert!(read_qtable(&path).is_err());
    }

    #[test]
    fn truncation_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.swqt");
        write_qtable(&QTable::zeros_fp32(2, 2), &path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        std::fs::write(&path, &bytes[..bytes.len() - 3]).unwrap();
        assert!(read_qtable(&path).is_err());
    }
}
