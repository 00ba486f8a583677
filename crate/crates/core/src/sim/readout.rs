//! Per-bit readout noise and its calibration-matrix correction.

use nalgebra::{DMatrix, DVector};

use super::{CountsHistogram, Distribution};
use crate::error::{Error, Result};

/// Independent bit-flip probabilities applied at measurement.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ReadoutNoiseModel {
    /// P(read 1 | true 0)
    pub p01: f64,
    /// P(read 0 | true 1)
    pub p10: f64,
}

impl ReadoutNoiseModel {
    pub fn new(p01: f64, p10: f64) -> Result<Self> {
        for p in [p01, p10] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::config(format!(
                    "readout flip probability {p} outside [0, 1]"
                )));
            }
        }
        Ok(Self { p01, p10 })
    }

    pub fn symmetric(p: f64) -> Result<Self> {
        Self::new(p, p)
    }

    /// Column-stochastic confusion matrix for one bit.
    fn confusion(&self) -> [[f64; 2]; 2] {
        [[1.0 - self.p01, self.p10], [self.p01, 1.0 - self.p10]]
    }
}

/// Entry `(i, j)` is P(read outcome i | true outcome j).
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationMatrix {
    num_bits: usize,
    matrix: DMatrix<f64>,
}

impl CalibrationMatrix {
    pub fn num_bits(&self) -> usize {
        self.num_bits
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }
}

pub fn build_calibration_matrix(
    noise: &ReadoutNoiseModel,
    num_bits: usize,
) -> Result<CalibrationMatrix> {
    if num_bits == 0 {
        return Err(Error::config("calibration needs at least one bit"));
    }
    if noise.p01 + noise.p10 >= 1.0 {
        return Err(Error::Singular(format!(
            "p01 + p10 = {} >= 1",
            noise.p01 + noise.p10
        )));
    }
    let bit = noise.confusion();
    let dim = 1usize << num_bits;
    let matrix = DMatrix::from_fn(dim, dim, |read, truth| {
        (0..num_bits)
            .map(|b| bit[read >> b & 1][truth >> b & 1])
            .product()
    });
    Ok(CalibrationMatrix { num_bits, matrix })
}

/// Push an ideal outcome distribution through the readout channel.
pub fn apply_readout_noise(
    probs: &Distribution,
    noise: &ReadoutNoiseModel,
) -> Result<Distribution> {
    let bit = noise.confusion();
    let n = probs.num_bits();
    let dim = probs.probs().len();
    let out = (0..dim)
        .map(|read| {
            (0..dim)
                .map(|truth| {
                    let weight: f64 = (0..n).map(|b| bit[read >> b & 1][truth >> b & 1]).product();
                    weight * probs.get(truth)
                })
                .sum()
        })
        .collect();
    Distribution::new(n, out)
}

/// Solve `calibration · x = frequencies`, clip negative entries and
/// renormalise.
pub fn mitigate_counts(
    counts: &CountsHistogram,
    calibration: &CalibrationMatrix,
) -> Result<Distribution> {
    mitigate_distribution(&counts.frequencies(), calibration)
}

pub(crate) fn mitigate_distribution(
    measured: &Distribution,
    calibration: &CalibrationMatrix,
) -> Result<Distribution> {
    if measured.num_bits() != calibration.num_bits {
        return Err(Error::dimension(format!(
            "{}-bit data with a {}-bit calibration",
            measured.num_bits(),
            calibration.num_bits
        )));
    }
    let rhs = DVector::from_column_slice(measured.probs());
    let quasi = calibration
        .matrix
        .clone()
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Singular("calibration matrix is not invertible".into()))?;
    let clipped: Vec<f64> = quasi.iter().map(|&x| x.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    if total <= 0.0 {
        return Err(Error::Numeric("mitigated distribution has no mass".into()));
    }
    Distribution::new(
        measured.num_bits(),
        clipped.into_iter().map(|x| x / total).collect(),
    )
}
