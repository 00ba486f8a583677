//! Small deterministic statevector simulator.
//!
//! Covers exactly what the pipeline needs: the gates of the swap-test and
//! ansatz circuits, exact Born-rule marginals, seeded shot sampling, per-bit
//! readout noise and calibration-matrix mitigation.

mod circuit;
mod readout;
mod state;

pub use circuit::{Circuit, Gate};
pub use readout::{
    apply_readout_noise, build_calibration_matrix, mitigate_counts, CalibrationMatrix,
    ReadoutNoiseModel,
};
pub use state::{StateVector, MAX_QUBITS};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution as _};

use crate::error::{Error, Result};

/// Probability (or quasi-probability) map over the outcomes of `num_bits`
/// classical bits, stored densely by outcome index. Bit `k` of an index is
/// classical bit `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    num_bits: usize,
    probs: Vec<f64>,
}

impl Distribution {
    pub fn new(num_bits: usize, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != 1 << num_bits {
            return Err(Error::dimension(format!(
                "{} probabilities for {num_bits} bits",
                probs.len()
            )));
        }
        if let Some(p) = probs.iter().find(|p| !p.is_finite()) {
            return Err(Error::Numeric(format!("non-finite probability {p}")));
        }
        Ok(Self { num_bits, probs })
    }

    pub fn num_bits(&self) -> usize {
        self.num_bits
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn get(&self, outcome: usize) -> f64 {
        self.probs.get(outcome).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Outcome label with classical bit 0 rightmost.
    pub fn bitstring(&self, outcome: usize) -> String {
        bitstring(outcome, self.num_bits)
    }

    fn check_normalized(&self, tol: f64) -> Result<()> {
        if let Some(p) = self.probs.iter().find(|&&p| p < -tol) {
            return Err(Error::Numeric(format!("negative probability {p}")));
        }
        let total = self.total();
        if (total - 1.0).abs() > tol {
            return Err(Error::Numeric(format!(
                "probabilities sum to {total}, expected 1"
            )));
        }
        Ok(())
    }
}

pub(crate) fn bitstring(outcome: usize, num_bits: usize) -> String {
    (0..num_bits)
        .rev()
        .map(|b| if outcome >> b & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Shot counts indexed by outcome.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountsHistogram {
    num_bits: usize,
    counts: Vec<u64>,
    total_shots: u64,
}

impl CountsHistogram {
    pub fn new(num_bits: usize, counts: Vec<u64>) -> Result<Self> {
        if counts.len() != 1 << num_bits {
            return Err(Error::dimension(format!(
                "{} counts for {num_bits} bits",
                counts.len()
            )));
        }
        let total_shots: u64 = counts.iter().sum();
        if total_shots == 0 {
            return Err(Error::Numeric("histogram holds no shots".into()));
        }
        Ok(Self {
            num_bits,
            counts,
            total_shots,
        })
    }

    pub fn num_bits(&self) -> usize {
        self.num_bits
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn get(&self, outcome: usize) -> u64 {
        self.counts.get(outcome).copied().unwrap_or(0)
    }

    pub fn total_shots(&self) -> u64 {
        self.total_shots
    }

    pub fn frequencies(&self) -> Distribution {
        let n = self.total_shots as f64;
        Distribution {
            num_bits: self.num_bits,
            probs: self.counts.iter().map(|&c| c as f64 / n).collect(),
        }
    }

    /// Non-zero entries keyed by bitstring.
    pub fn to_map(&self) -> std::collections::BTreeMap<String, u64> {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, &c)| (bitstring(i, self.num_bits), c))
            .collect()
    }
}

/// Multinomial sample of `shots` outcomes, reproducible for a fixed seed.
pub fn sample_counts(probs: &Distribution, shots: u64, seed: u64) -> Result<CountsHistogram> {
    if shots == 0 {
        return Err(Error::config("shots must be positive"));
    }
    probs.check_normalized(1e-8)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; probs.probs.len()];
    let mut remaining = shots;
    let mut mass_left = 1.0f64;
    let last = counts.len() - 1;
    // conditional binomials: outcome k gets Bin(remaining, p_k / mass_left)
    for (k, &p) in probs.probs.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        if k == last {
            counts[k] = remaining;
            break;
        }
        let p = p.max(0.0);
        let q = if mass_left > 0.0 {
            (p / mass_left).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let drawn = Binomial::new(remaining, q)
            .map_err(|e| Error::Numeric(e.to_string()))?
            .sample(&mut rng);
        counts[k] = drawn;
        remaining -= drawn;
        mass_left -= p;
    }
    CountsHistogram::new(probs.num_bits, counts)
}
