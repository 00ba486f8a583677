//! Dense statevector storage and gate application.
//!
//! Qubit `q` corresponds to bit `q` of the basis-state index (qubit 0 is the
//! least significant bit).

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::circuit::Gate;
use super::Distribution;
use crate::error::{Error, Result};

/// Largest register the simulator will allocate.
pub const MAX_QUBITS: usize = 20;

const NORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// |0…0⟩ on `num_qubits` qubits.
    pub fn zero(num_qubits: usize) -> Result<Self> {
        check_qubit_count(num_qubits)?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    /// Wrap an explicit amplitude vector. The vector must have power-of-two
    /// length and unit norm.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::dimension(format!(
                "amplitude vector length {len} is not a power of two >= 2"
            )));
        }
        let num_qubits = len.trailing_zeros() as usize;
        check_qubit_count(num_qubits)?;
        let norm_sqr: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > NORM_TOL {
            return Err(Error::Numeric(format!(
                "amplitudes have squared norm {norm_sqr}, expected 1"
            )));
        }
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::from_amplitudes(amplitudes.iter().map(|&a| Complex64::new(a, 0.0)).collect())
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Consume the state and return it with `gate` applied.
    pub fn with_gate(mut self, gate: &Gate) -> Result<Self> {
        self.apply(gate)?;
        Ok(self)
    }

    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.num_qubits)?;
        match gate {
            Gate::H(q) => {
                let s = std::f64::consts::FRAC_1_SQRT_2;
                self.apply_single(*q, [[s, s], [s, -s]].map(|r| r.map(real)));
            }
            Gate::X(q) => {
                self.apply_single(*q, [[0.0, 1.0], [1.0, 0.0]].map(|r| r.map(real)));
            }
            Gate::Ry(q, theta) => {
                let (s, c) = (theta / 2.0).sin_cos();
                self.apply_single(*q, [[c, -s], [s, c]].map(|r| r.map(real)));
            }
            Gate::Rz(q, theta) => {
                let half = theta / 2.0;
                let zero = real(0.0);
                self.apply_single(
                    *q,
                    [
                        [Complex64::from_polar(1.0, -half), zero],
                        [zero, Complex64::from_polar(1.0, half)],
                    ],
                );
            }
            Gate::Cx { control, target } => {
                let (cm, tm) = (1usize << control, 1usize << target);
                for i in 0..self.amplitudes.len() {
                    if i & cm != 0 && i & tm == 0 {
                        self.amplitudes.swap(i, i | tm);
                    }
                }
            }
            Gate::Cz(a, b) => {
                let mask = (1usize << a) | (1usize << b);
                for (i, amp) in self.amplitudes.iter_mut().enumerate() {
                    if i & mask == mask {
                        *amp = -*amp;
                    }
                }
            }
            Gate::Cswap { control, a, b } => {
                let (cm, am, bm) = (1usize << control, 1usize << a, 1usize << b);
                for i in 0..self.amplitudes.len() {
                    // visit each swapped pair once, from the side where a=1, b=0
                    if i & cm != 0 && i & am != 0 && i & bm == 0 {
                        self.amplitudes.swap(i, (i & !am) | bm);
                    }
                }
            }
            Gate::Initialize {
                targets,
                amplitudes,
            } => self.initialize(targets, amplitudes)?,
            Gate::Barrier => {}
        }
        Ok(())
    }

    fn apply_single(&mut self, q: usize, m: [[Complex64; 2]; 2]) {
        let mask = 1usize << q;
        for i in 0..self.amplitudes.len() {
            if i & mask == 0 {
                let a0 = self.amplitudes[i];
                let a1 = self.amplitudes[i | mask];
                self.amplitudes[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amplitudes[i | mask] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    /// Load `values` into the target register, which must currently be in
    /// |0…0⟩ and therefore disentangled from the remaining qubits.
    fn initialize(&mut self, targets: &[usize], values: &[Complex64]) -> Result<()> {
        let target_mask = targets.iter().fold(0usize, |m, &q| m | (1 << q));
        let occupied: f64 = self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| i & target_mask != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum();
        if occupied > NORM_TOL {
            return Err(Error::InvalidOperation(format!(
                "initialize requires target qubits {targets:?} in |0>, found weight {occupied:e} elsewhere"
            )));
        }
        let spread: Vec<usize> = (0..values.len())
            .map(|j| {
                targets
                    .iter()
                    .enumerate()
                    .filter(|(bit, _)| j >> bit & 1 == 1)
                    .fold(0usize, |m, (_, &q)| m | (1 << q))
            })
            .collect();
        let mut next = vec![Complex64::new(0.0, 0.0); self.amplitudes.len()];
        for (i, &amp) in self.amplitudes.iter().enumerate() {
            if i & target_mask != 0 || amp == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (v, &offset) in values.iter().zip(&spread) {
                next[i | offset] = amp * v;
            }
        }
        self.amplitudes = next;
        Ok(())
    }

    /// Born-rule marginal over `measured`; outcome bit `k` is the value of
    /// qubit `measured[k]`.
    pub fn exact_probabilities(&self, measured: &[usize]) -> Result<Distribution> {
        check_operands(measured, self.num_qubits)?;
        let mut probs = vec![0.0; 1 << measured.len()];
        for (i, amp) in self.amplitudes.iter().enumerate() {
            let outcome = measured
                .iter()
                .enumerate()
                .fold(0usize, |o, (k, &q)| o | ((i >> q & 1) << k));
            probs[outcome] += amp.norm_sqr();
        }
        Distribution::new(measured.len(), probs)
    }

    /// ⟨ψ|H|ψ⟩ for a Hermitian matrix matching the state dimension.
    pub fn expectation(&self, hermitian: &DMatrix<Complex64>) -> Result<f64> {
        let dim = self.amplitudes.len();
        if hermitian.nrows() != dim || hermitian.ncols() != dim {
            return Err(Error::dimension(format!(
                "operator is {}x{}, state dimension is {dim}",
                hermitian.nrows(),
                hermitian.ncols()
            )));
        }
        check_hermitian(hermitian)?;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..dim {
            let mut row = Complex64::new(0.0, 0.0);
            for j in 0..dim {
                row += hermitian[(i, j)] * self.amplitudes[j];
            }
            acc += self.amplitudes[i].conj() * row;
        }
        Ok(acc.re)
    }
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

pub(crate) fn check_qubit_count(num_qubits: usize) -> Result<()> {
    if num_qubits == 0 || num_qubits > MAX_QUBITS {
        return Err(Error::config(format!(
            "qubit count {num_qubits} outside 1..={MAX_QUBITS}"
        )));
    }
    Ok(())
}

pub(crate) fn check_operands(qubits: &[usize], num_qubits: usize) -> Result<()> {
    for (k, &q) in qubits.iter().enumerate() {
        if q >= num_qubits {
            return Err(Error::InvalidOperation(format!(
                "qubit {q} out of range for {num_qubits} qubits"
            )));
        }
        if qubits[..k].contains(&q) {
            return Err(Error::InvalidOperation(format!("qubit {q} repeated")));
        }
    }
    Ok(())
}

pub(crate) fn check_hermitian(m: &DMatrix<Complex64>) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::dimension("operator is not square"));
    }
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            if (m[(i, j)] - m[(j, i)].conj()).norm() > 1e-10 {
                return Err(Error::Numeric(format!(
                    "operator is not Hermitian at ({i}, {j})"
                )));
            }
        }
    }
    Ok(())
}
