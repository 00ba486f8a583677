use num_complex::Complex64;

use super::state::{check_operands, check_qubit_count, StateVector};
use super::Distribution;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    H(usize),
    X(usize),
    /// Rotation about Y by the given angle in radians.
    Ry(usize, f64),
    /// Rotation about Z by the given angle in radians.
    Rz(usize, f64),
    Cx {
        control: usize,
        target: usize,
    },
    Cz(usize, usize),
    Cswap {
        control: usize,
        a: usize,
        b: usize,
    },
    /// Prepare `targets` (bit `k` of the amplitude index is qubit
    /// `targets[k]`) in the given state. Targets must be in |0…0⟩.
    Initialize {
        targets: Vec<usize>,
        amplitudes: Vec<Complex64>,
    },
    Barrier,
}

impl Gate {
    pub fn operands(&self) -> Vec<usize> {
        match self {
            Gate::H(q) | Gate::X(q) | Gate::Ry(q, _) | Gate::Rz(q, _) => vec![*q],
            Gate::Cx { control, target } => vec![*control, *target],
            Gate::Cz(a, b) => vec![*a, *b],
            Gate::Cswap { control, a, b } => vec![*control, *a, *b],
            Gate::Initialize { targets, .. } => targets.clone(),
            Gate::Barrier => Vec::new(),
        }
    }

    pub fn validate(&self, num_qubits: usize) -> Result<()> {
        check_operands(&self.operands(), num_qubits)?;
        match self {
            Gate::Ry(_, angle) | Gate::Rz(_, angle) if !angle.is_finite() => Err(Error::Numeric(
                format!("rotation angle {angle} is not finite"),
            )),
            Gate::Initialize {
                targets,
                amplitudes,
            } => {
                if targets.is_empty() || amplitudes.len() != 1 << targets.len() {
                    return Err(Error::InvalidOperation(format!(
                        "initialize on {} qubits needs {} amplitudes, got {}",
                        targets.len(),
                        1usize << targets.len(),
                        amplitudes.len()
                    )));
                }
                let norm_sqr: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
                if (norm_sqr - 1.0).abs() > 1e-10 {
                    return Err(Error::InvalidOperation(format!(
                        "initialize amplitudes have squared norm {norm_sqr}"
                    )));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub(crate) fn initialize_real(targets: Vec<usize>, values: &[f64]) -> Self {
        Gate::Initialize {
            targets,
            amplitudes: values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        }
    }
}

/// Ordered gate program over a quantum and a classical register.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    num_qubits: usize,
    num_clbits: usize,
    gates: Vec<Gate>,
    measurements: Vec<(usize, usize)>,
}

impl Circuit {
    pub fn new(num_qubits: usize, num_clbits: usize) -> Result<Self> {
        check_qubit_count(num_qubits)?;
        Ok(Self {
            num_qubits,
            num_clbits,
            gates: Vec::new(),
            measurements: Vec::new(),
        })
    }

    pub fn push(&mut self, gate: Gate) -> Result<&mut Self> {
        gate.validate(self.num_qubits)?;
        self.gates.push(gate);
        Ok(self)
    }

    /// Record a measurement of `qubit` into `clbit`. Measurements are
    /// terminal: they act on the state left after all gates.
    pub fn measure(&mut self, qubit: usize, clbit: usize) -> Result<&mut Self> {
        if qubit >= self.num_qubits || clbit >= self.num_clbits {
            return Err(Error::InvalidOperation(format!(
                "measure({qubit} -> {clbit}) outside {} qubits / {} clbits",
                self.num_qubits, self.num_clbits
            )));
        }
        if self.measurements.iter().any(|&(_, c)| c == clbit) {
            return Err(Error::InvalidOperation(format!(
                "clbit {clbit} written twice"
            )));
        }
        self.measurements.push((qubit, clbit));
        Ok(self)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn num_clbits(&self) -> usize {
        self.num_clbits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn measurements(&self) -> &[(usize, usize)] {
        &self.measurements
    }

    /// Evolve |0…0⟩ through every gate.
    pub fn final_state(&self) -> Result<StateVector> {
        let mut state = StateVector::zero(self.num_qubits)?;
        for gate in &self.gates {
            state.apply(gate)?;
        }
        Ok(state)
    }

    /// Exact distribution over the classical register. Clbits that are never
    /// written read as 0.
    pub fn exact_distribution(&self) -> Result<Distribution> {
        let state = self.final_state()?;
        let qubits: Vec<usize> = self.measurements.iter().map(|&(q, _)| q).collect();
        let marginal = state.exact_probabilities(&qubits)?;
        let mut probs = vec![0.0; 1 << self.num_clbits];
        for (outcome, p) in marginal.probs().iter().enumerate() {
            let clbits = self
                .measurements
                .iter()
                .enumerate()
                .fold(0usize, |acc, (k, &(_, c))| acc | ((outcome >> k & 1) << c));
            probs[clbits] += p;
        }
        Distribution::new(self.num_clbits, probs)
    }
}
