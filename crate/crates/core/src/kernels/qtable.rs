//! Dense state-action quality tables in real or scaled integer form.

use thiserror::Error;

use super::fixed::{from_fixed, to_fixed, RangeError};

/// Storage precision of a Q-table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DType {
    Fp32,
    Int32,
}

impl DType {
    pub fn as_str(&self) -> &'static str {
        match self {
            DType::Fp32 => "fp32",
            DType::Int32 => "int32",
        }
    }
}

/// Training hyperparameters shared by both update rules.
#[derive(Debug, Clone, Copy)]
pub struct Hyperparams {
    /// Learning rate, in (0, 1].
    pub alpha: f32,
    /// Discount factor, in [0, 1).
    pub gamma: f32,
    /// Number of training episodes (full passes over a chunk).
    pub episodes: usize,
    /// Fixed-point scale factor for the integer kernels.
    pub scale_factor: u32,
    /// Epsilon for SARSA next-action selection.
    pub epsilon: f32,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams {
            alpha: 0.1,
            gamma: 0.95,
            episodes: 2000,
            scale_factor: 10_000,
            epsilon: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HyperparamsError {
    #[error("alpha must be in (0, 1], got {0}")]
    Alpha(f32),
    #[error("gamma must be in [0, 1), got {0}")]
    Gamma(f32),
    #[error("scale_factor must be >= 1")]
    ScaleFactor,
    #[error("epsilon must be in [0, 1], got {0}")]
    Epsilon(f32),
    #[error("episodes must be >= 1")]
    Episodes,
}

impl Hyperparams {
    pub fn validate(&self) -> Result<(), HyperparamsError> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(HyperparamsError::Alpha(self.alpha));
        }
        if !(self.gamma >= 0.0 && self.gamma < 1.0) {
            return Err(HyperparamsError::Gamma(self.gamma));
        }
        if self.scale_factor < 1 {
            return Err(HyperparamsError::ScaleFactor);
        }
        if !(self.epsilon >= 0.0 && self.epsilon <= 1.0) {
            return Err(HyperparamsError::Epsilon(self.epsilon));
        }
        if self.episodes == 0 {
            return Err(HyperparamsError::Episodes);
        }
        Ok(())
    }
}

/// Dense `n_states x n_actions` table, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct QTable {
    n_states: usize,
    n_actions: usize,
    data: TableData,
}

#[derive(Debug, Clone, PartialEq)]
enum TableData {
    Fp32(Vec<f32>),
    Int32(Vec<i32>),
}

impl QTable {
    pub fn zeros_fp32(n_states: usize, n_actions: usize) -> Self {
        QTable {
            n_states,
            n_actions,
            data: TableData::Fp32(vec![0.0; n_states * n_actions]),
        }
    }

    pub fn zeros_int32(n_states: usize, n_actions: usize) -> Self {
        QTable {
            n_states,
            n_actions,
            data: TableData::Int32(vec![0; n_states * n_actions]),
        }
    }

    pub fn from_values(n_states: usize, n_actions: usize, values: Vec<f32>) -> Self {
        assert_eq!(values.len(), n_states * n_actions, "value count mismatch");
        QTable {
            n_states,
            n_actions,
            data: TableData::Fp32(values),
        }
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn dtype(&self) -> DType {
        match self.data {
            TableData::Fp32(_) => DType::Fp32,
            TableData::Int32(_) => DType::Int32,
        }
    }

    /// Flat FP32 values; panics on an INT32 table (descale first).
    pub fn values(&self) -> &[f32] {
        match &self.data {
            TableData::Fp32(v) => v,
            TableData::Int32(_) => panic!("values() called on an INT32 table"),
        }
    }

    pub fn values_mut(&mut self) -> &mut [f32] {
        match &mut self.data {
            TableData::Fp32(v) => v,
            TableData::Int32(_) => panic!("values_mut() called on an INT32 table"),
        }
    }

    /// Flat scaled integer values; panics on an FP32 table.
    pub fn scaled_values(&self) -> &[i32] {
        match &self.data {
            TableData::Int32(v) => v,
            TableData::Fp32(_) => panic!("scaled_values() called on an FP32 table"),
        }
    }

    pub fn scaled_values_mut(&mut self) -> &mut [i32] {
        match &mut self.data {
            TableData::Int32(v) => v,
            TableData::Fp32(_) => panic!("scaled_values_mut() called on an FP32 table"),
        }
    }

    pub fn get(&self, state: usize, action: usize) -> f32 {
        let idx = self.index(state, action);
        match &self.data {
            TableData::Fp32(v) => v[idx],
            TableData::Int32(_) => panic!("get() called on an INT32 table"),
        }
    }

    pub fn set(&mut self, state: usize, action: usize, value: f32) {
        let idx = self.index(state, action);
        match &mut self.data {
            TableData::Fp32(v) => v[idx] = value,
            TableData::Int32(_) => panic!("set() called on an INT32 table"),
        }
    }

    fn index(&self, state: usize, action: usize) -> usize {
        assert!(
            state < self.n_states && action < self.n_actions,
            "index out of range"
        );
        state * self.n_actions + action
    }

    /// Descale an INT32 table to FP32; the FP32 identity otherwise.
    pub fn descaled(&self, scale_factor: u32) -> QTable {
        match &self.data {
            TableData::Fp32(v) => QTable {
                n_states: self.n_states,
                n_actions: self.n_actions,
                data: TableData::Fp32(v.clone()),
            },
            TableData::Int32(v) => QTable {
                n_states: self.n_states,
                n_actions: self.n_actions,
                data: TableData::Fp32(v.iter().map(|&i| from_fixed(i, scale_factor)).collect()),
            },
        }
    }

    /// Rescale FP32 values into an INT32 table (used when a synchronized
    /// average is pushed back to the cores).
    pub fn rescaled(&self, scale_factor: u32) -> Result<QTable, RangeError> {
        let values = self.values();
        let mut scaled = Vec::with_capacity(values.len());
        for &v in values {
            scaled.push(to_fixed(v, scale_factor)?);
        }
        Ok(QTable {
            n_states: self.n_states,
            n_actions: self.n_actions,
            data: TableData::Int32(scaled),
        })
    }
}

/// Row argmax with ties broken toward the lowest action index.
pub fn argmax_row_f32(row: &[f32]) -> usize {
    let mut best = 0;
    for (a, &v) in row.iter().enumerate().skip(1) {
        if v > row[best] {
            best = a;
        }
    }
    best
}

/// As [`argmax_row_f32`] for scaled integer rows.
pub fn argmax_row_i32(row: &[i32]) -> usize {
    let mut best = 0;
    for (a, &v) in row.iter().enumerate().skip(1) {
        if v > row[best] {
            best = a;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_tables_have_requested_shape() {
        let q = QTable::zeros_fp32(16, 4);
        assert_eq!(q.n_states(), 16);
        assert_eq!(q.n_actions(), 4);
        assert_eq!(q.dtype(), DType::Fp32);
        assert!(q.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn descale_maps_scaled_entries() {
        let mut q = QTable::zeros_int32(2, 2);
        q.scaled_values_mut()[3] = 2_375;
        let d = q.descaled(10_000);
        assert_eq!(d.dtype(), DType::Fp32);
        assert_eq!(d.get(1, 1), 0.2375);
    }

    #[test]
    fn rescale_round_trips_representable_values() {
        let q = QTable::from_values(1, 3, vec![0.1, -0.5, 0.2375]);
        let scaled = q.rescaled(10_000).unwrap();
        assert_eq!(scaled.scaled_values(), &[1_000, -5_000, 2_375]);
        assert_eq!(scaled.descaled(10_000).values(), q.values());
    }

    #[test]
    fn argmax_breaks_ties_low() {
        assert_eq!(argmax_row_f32(&[0.1, 0.5, 0.2, 0.0]), 1);
        assert_eq!(argmax_row_f32(&[0.0, 0.0, 0.0, 0.0]), 0);
        assert_eq!(argmax_row_f32(&[1.0, 1.0, 2.0, 2.0]), 2);
        assert_eq!(argmax_row_i32(&[5, 5, 5]), 0);
    }

    #[test]
    fn hyperparams_validation() {
        assert!(Hyperparams::default().validate().is_ok());
        assert!(Hyperparams {
            alpha: 0.0,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(Hyperparams {
            gamma: 1.0,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(Hyperparams {
            epsilon: 1.5,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(Hyperparams {
            scale_factor: 0,
            ..Default::default()
        }
        .validate()
        .is_err());
    }
}
