use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::{Circuit, Gate, StateVector};

pub const DEFAULT_DEPTH: usize = 2;

/// Hardware-efficient RY + linear-CZ ansatz.
///
/// Layout: one RY layer, then `depth` repetitions of (CZ chain, RY layer).
/// Depth 0 is a single rotation layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ansatz {
    pub num_qubits: usize,
    pub depth: usize,
}

impl Ansatz {
    pub fn new(num_qubits: usize, depth: usize) -> Result<Self> {
        if num_qubits == 0 {
            return Err(Error::config("ansatz needs at least one qubit"));
        }
        Ok(Self { num_qubits, depth })
    }

    pub fn num_parameters(&self) -> usize {
        self.num_qubits * (self.depth + 1)
    }

    pub fn circuit(&self, theta: &[f64]) -> Result<Circuit> {
        if theta.len() != self.num_parameters() {
            return Err(Error::config(format!(
                "ansatz expects {} parameters, got {}",
                self.num_parameters(),
                theta.len()
            )));
        }
        let n = self.num_qubits;
        let mut c = Circuit::new(n, 0)?;
        for (layer, angles) in theta.chunks(n).enumerate() {
            if layer > 0 {
                for q in 0..n.saturating_sub(1) {
                    c.push(Gate::Cz(q, q + 1))?;
                }
            }
            for (q, &angle) in angles.iter().enumerate() {
                c.push(Gate::Ry(q, angle))?;
            }
        }
        Ok(c)
    }

    /// C(θ)|0…0⟩
    pub fn state(&self, theta: &[f64]) -> Result<StateVector> {
        self.circuit(theta)?.final_state()
    }
}
