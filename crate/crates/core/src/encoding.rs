//! Classical-to-quantum data preparation.
//!
//! Atom coordinates are amplitude-encoded into the two registers of the
//! distance swap test:
//!
//! ```text
//! |φ⟩ = (‖u‖|0⟩ − ‖v‖|1⟩) / √Z            Z = ‖u‖² + ‖v‖²
//! |ψ⟩ = (|0⟩⊗|û⟩ + |1⟩⊗|v̂⟩) / √2
//! ```
//!
//! In the ψ amplitude vector the leading qubit is the most significant bit,
//! so the first half holds û and the second half v̂ (both zero-padded to a
//! power-of-two length).
//!
//! The block distance matrix for VQE is turned into the operator −BPM,
//! zero-padded to a power-of-two dimension.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Amplitudes of the two swap-test registers for one atom pair.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedPair {
    /// One-qubit norm register.
    pub phi: [f64; 2],
    /// `1 + pad_exponent` qubits: ancilla (most significant) then coordinates.
    pub psi: Vec<f64>,
    /// ‖u‖² + ‖v‖²
    pub norm: f64,
    /// Coordinates are padded to `2^pad_exponent` entries.
    pub pad_exponent: usize,
}

impl EncodedPair {
    pub fn psi_qubits(&self) -> usize {
        1 + self.pad_exponent
    }
}

/// Zero-pad to the next power of two, returning the padded vector and its
/// log2 length.
pub fn pad_to_power_of_two(v: &[f64]) -> Result<(Vec<f64>, usize)> {
    if v.is_empty() {
        return Err(Error::Encoding("cannot pad an empty vector".into()));
    }
    let len = v.len().next_power_of_two();
    let mut padded = v.to_vec();
    padded.resize(len, 0.0);
    Ok((padded, len.trailing_zeros() as usize))
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn encode_pair(u: &[f64], v: &[f64]) -> Result<EncodedPair> {
    if u.len() != v.len() {
        return Err(Error::dimension(format!(
            "atoms have {} and {} coordinates",
            u.len(),
            v.len()
        )));
    }
    if let Some(x) = u.iter().chain(v).find(|x| !x.is_finite()) {
        return Err(Error::Encoding(format!("non-finite coordinate {x}")));
    }
    let (nu, nv) = (norm(u), norm(v));
    if nu == 0.0 || nv == 0.0 {
        return Err(Error::Encoding(
            "zero-norm coordinate vector cannot be amplitude encoded".into(),
        ));
    }
    let z = nu * nu + nv * nv;
    let phi = [nu / z.sqrt(), -nv / z.sqrt()];

    let (pu, k) = pad_to_power_of_two(u)?;
    let (pv, _) = pad_to_power_of_two(v)?;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let psi = pu
        .iter()
        .map(|x| x / nu * s)
        .chain(pv.iter().map(|x| x / nv * s))
        .collect();

    Ok(EncodedPair {
        phi,
        psi,
        norm: z,
        pad_exponent: k,
    })
}

/// Build the VQE operator `−padded(bpm)` and its qubit count.
///
/// Zero-padding adds zero eigenvalues only, so the largest eigenvalue is
/// unchanged whenever it is non-negative (always the case for a trace-zero
/// block distance matrix).
pub fn matrix_operator(bpm: &DMatrix<f64>) -> Result<(DMatrix<Complex64>, usize)> {
    check_symmetric(bpm)?;
    let dim = bpm.nrows().next_power_of_two().max(2);
    let qubits = dim.trailing_zeros() as usize;
    let op = DMatrix::from_fn(dim, dim, |i, j| {
        if i < bpm.nrows() && j < bpm.ncols() {
            Complex64::new(-bpm[(i, j)], 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    Ok((op, qubits))
}

pub(crate) fn check_symmetric(m: &DMatrix<f64>) -> Result<()> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::dimension(format!(
            "expected a non-empty square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::Numeric("matrix has non-finite entries".into()));
    }
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            if (m[(i, j)] - m[(j, i)]).abs() > 1e-10 {
                return Err(Error::Numeric(format!(
                    "matrix is not symmetric at ({i}, {j})"
                )));
            }
        }
    }
    Ok(())
}
