//! Squared Euclidean distances from the SWAP test.
//!
//! With the registers of [`crate::encoding::encode_pair`], swapping the φ
//! qubit with the ψ ancilla gives an ancilla probability
//!
//! ```text
//! P(0) = 1/2 + ‖u − v‖² / (4Z)
//! ```
//!
//! so `‖u − v‖² = 2Z(2P(0) − 1)`.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::encoding::{encode_pair, EncodedPair};
use crate::error::{Error, Result};
use crate::sim::{
    apply_readout_noise, build_calibration_matrix, mitigate_counts, sample_counts, Circuit, Gate,
    ReadoutNoiseModel,
};
use crate::util::derive_seed;

pub const DEFAULT_SHOTS: u64 = 8192;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SwapMode {
    /// Read P(0) from the final statevector.
    Exact,
    /// Estimate P(0) from shot counts.
    Sampled,
}

impl std::str::FromStr for SwapMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(SwapMode::Exact),
            "sampled" => Ok(SwapMode::Sampled),
            other => Err(Error::config(format!(
                "unknown swap mode '{other}' (expected exact or sampled)"
            ))),
        }
    }
}

impl fmt::Display for SwapMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SwapMode::Exact => "exact",
            SwapMode::Sampled => "sampled",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwapTestConfig {
    pub shots: u64,
    pub seed: u64,
    pub noise: Option<ReadoutNoiseModel>,
    /// Correct sampled counts with the calibration matrix of `noise`
    /// (identity when there is no noise model).
    pub mitigate: bool,
    pub mode: SwapMode,
}

impl Default for SwapTestConfig {
    fn default() -> Self {
        Self {
            shots: DEFAULT_SHOTS,
            seed: 0,
            noise: None,
            mitigate: false,
            mode: SwapMode::Sampled,
        }
    }
}

impl SwapTestConfig {
    pub fn exact() -> Self {
        Self {
            mode: SwapMode::Exact,
            ..Self::default()
        }
    }

    pub fn sampled(shots: u64, seed: u64) -> Self {
        Self {
            shots,
            seed,
            ..Self::default()
        }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self {
            seed,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Classical,
    Quantum,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Classical => "classical",
            Provenance::Quantum => "quantum",
        })
    }
}

impl std::str::FromStr for Provenance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "classical" => Ok(Provenance::Classical),
            "quantum" => Ok(Provenance::Quantum),
            other => Err(Error::config(format!(
                "unknown variant '{other}' (expected classical or quantum)"
            ))),
        }
    }
}

/// Squared distances between the atoms of two segments.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    pub entries: DMatrix<f64>,
    pub provenance: Provenance,
}

/// Qubit layout: 0 = ancilla, 1 = φ, 2.. = ψ (coordinates first, ψ
/// ancilla last).
pub fn build_swap_test_circuit(pair: &EncodedPair) -> Result<Circuit> {
    let psi_width = pair.psi_qubits();
    let psi_qubits: Vec<usize> = (2..2 + psi_width).collect();
    let psi_ancilla = 1 + psi_width;
    let mut c = Circuit::new(2 + psi_width, 1)?;
    c.push(Gate::initialize_real(vec![1], &pair.phi))?;
    c.push(Gate::initialize_real(psi_qubits, &pair.psi))?;
    c.push(Gate::H(0))?;
    c.push(Gate::Cswap {
        control: 0,
        a: 1,
        b: psi_ancilla,
    })?;
    c.push(Gate::H(0))?;
    c.measure(0, 0)?;
    Ok(c)
}

/// Full swap test between two equal-width registers: one CSWAP per qubit
/// pair, so P(0) = 1/2 + |⟨a|b⟩|²/2.
pub fn build_complete_swap_test(a: &[Complex64], b: &[Complex64]) -> Result<Circuit> {
    if a.len() != b.len() || a.len() < 2 || !a.len().is_power_of_two() {
        return Err(Error::dimension(format!(
            "registers of {} and {} amplitudes",
            a.len(),
            b.len()
        )));
    }
    let width = a.len().trailing_zeros() as usize;
    let mut c = Circuit::new(1 + 2 * width, 1)?;
    c.push(Gate::Initialize {
        targets: (1..1 + width).collect(),
        amplitudes: a.to_vec(),
    })?;
    c.push(Gate::Initialize {
        targets: (1 + width..1 + 2 * width).collect(),
        amplitudes: b.to_vec(),
    })?;
    c.push(Gate::H(0))?;
    for k in 0..width {
        c.push(Gate::Cswap {
            control: 0,
            a: 1 + k,
            b: 1 + width + k,
        })?;
    }
    c.push(Gate::H(0))?;
    c.measure(0, 0)?;
    Ok(c)
}

/// Probability that the single classical bit of `circuit` reads 0.
pub fn estimate_p0(circuit: &Circuit, cfg: &SwapTestConfig) -> Result<f64> {
    if circuit.num_clbits() != 1 || circuit.measurements().len() != 1 {
        return Err(Error::InvalidOperation(
            "swap-test estimation needs exactly one measured bit".into(),
        ));
    }
    let ideal = circuit.exact_distribution()?;
    if cfg.mode == SwapMode::Exact {
        return Ok(ideal.get(0));
    }
    if cfg.shots == 0 {
        return Err(Error::config("sampled mode needs shots > 0"));
    }
    let noise = cfg
        .noise
        .unwrap_or(ReadoutNoiseModel { p01: 0.0, p10: 0.0 });
    let observed = apply_readout_noise(&ideal, &noise)?;
    let counts = sample_counts(&observed, cfg.shots, cfg.seed)?;
    if cfg.mitigate {
        let calibration = build_calibration_matrix(&noise, 1)?;
        Ok(mitigate_counts(&counts, &calibration)?.get(0))
    } else {
        Ok(counts.frequencies().get(0))
    }
}

/// `2Z(2P(0) − 1)` clipped at zero.
pub fn distance_from_p0(p0: f64, norm: f64) -> f64 {
    (2.0 * norm * (2.0 * p0 - 1.0)).max(0.0)
}

pub fn squared_distance(u: &[f64], v: &[f64], cfg: &SwapTestConfig) -> Result<f64> {
    let pair = encode_pair(u, v)?;
    let circuit = build_swap_test_circuit(&pair)?;
    let p0 = estimate_p0(&circuit, cfg)?;
    Ok(distance_from_p0(p0, pair.norm))
}

pub fn classical_squared_distance(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum()
}

fn check_segments<A: AsRef<[f64]>>(seg_a: &[A], seg_b: &[A]) -> Result<()> {
    if seg_a.is_empty() || seg_b.is_empty() {
        return Err(Error::config("distance matrix needs non-empty segments"));
    }
    let dim = seg_a[0].as_ref().len();
    if let Some(bad) = seg_a.iter().chain(seg_b).find(|x| x.as_ref().len() != dim) {
        return Err(Error::dimension(format!(
            "atoms with {} and {} coordinates",
            dim,
            bad.as_ref().len()
        )));
    }
    Ok(())
}

/// Entry `(i, j)` uses its own sampling stream derived from `cfg.seed`.
pub fn quantum_distance_matrix<A: AsRef<[f64]>>(
    seg_a: &[A],
    seg_b: &[A],
    cfg: &SwapTestConfig,
) -> Result<DistanceMatrix> {
    check_segments(seg_a, seg_b)?;
    let cols = seg_b.len();
    let mut entries = DMatrix::zeros(seg_a.len(), cols);
    for (i, a) in seg_a.iter().enumerate() {
        for (j, b) in seg_b.iter().enumerate() {
            let entry_cfg = cfg.with_seed(derive_seed(cfg.seed, (i * cols + j) as u64));
            entries[(i, j)] = squared_distance(a.as_ref(), b.as_ref(), &entry_cfg)?;
        }
    }
    Ok(DistanceMatrix {
        entries,
        provenance: Provenance::Quantum,
    })
}

pub fn classical_distance_matrix<A: AsRef<[f64]>>(
    seg_a: &[A],
    seg_b: &[A],
) -> Result<DistanceMatrix> {
    check_segments(seg_a, seg_b)?;
    let entries = DMatrix::from_fn(seg_a.len(), seg_b.len(), |i, j| {
        classical_squared_distance(seg_a[i].as_ref(), seg_b[j].as_ref())
    });
    Ok(DistanceMatrix {
        entries,
        provenance: Provenance::Classical,
    })
}
