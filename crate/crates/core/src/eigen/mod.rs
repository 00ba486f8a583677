//! Largest eigenvalue of a block distance matrix, classically (cyclic
//! Jacobi) or with VQE on the operator −BPM.

mod ansatz;
mod jacobi;
mod optimize;

pub use ansatz::{Ansatz, DEFAULT_DEPTH};
pub use jacobi::{classical_largest_eigenvalue, symmetric_eigenvalues, MAX_JACOBI_DIM};
pub use optimize::{nelder_mead, spsa, Minimum};

use std::fmt;
use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::encoding::matrix_operator;
use crate::error::{Error, Result};
use crate::util::derive_seed;

/// Largest BPM dimension sent to VQE (four qubits).
pub const MAX_VQE_DIM: usize = 16;

/// Initial simplex edge length, in radians.
const SIMPLEX_STEP: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimizerKind {
    NelderMead,
    Spsa,
}

impl fmt::Display for OptimizerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OptimizerKind::NelderMead => "nelder_mead",
            OptimizerKind::Spsa => "spsa",
        })
    }
}

impl std::str::FromStr for OptimizerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nelder_mead" | "nelder-mead" => Ok(OptimizerKind::NelderMead),
            "spsa" => Ok(OptimizerKind::Spsa),
            other => Err(Error::config(format!(
                "unknown optimizer '{other}' (expected nelder_mead or spsa)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub kind: OptimizerKind,
    pub max_iterations: usize,
    /// Convergence tolerance on the cost.
    pub tolerance: f64,
    pub seed: u64,
    pub restarts: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            kind: OptimizerKind::NelderMead,
            max_iterations: 500,
            tolerance: 1e-6,
            seed: 0,
            restarts: 5,
        }
    }
}

impl OptimizerConfig {
    fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::config("optimizer needs a positive iteration budget"));
        }
        if self.restarts == 0 {
            return Err(Error::config("optimizer needs at least one restart"));
        }
        if self.tolerance.is_nan() || self.tolerance < 0.0 {
            return Err(Error::config("optimizer tolerance must be non-negative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VqeResult {
    /// Minimised cost, an upper bound on λmin(H).
    pub eigenvalue_estimate: f64,
    pub optimal_theta: Vec<f64>,
    /// Best cost per iteration of the winning restart.
    pub trace: Vec<f64>,
    /// Best cost of each restart, in restart order.
    pub restart_costs: Vec<f64>,
    pub elapsed: f64,
}

/// ⟨ψ(θ)|H|ψ(θ)⟩ with exact expectation.
pub fn vqe_cost(ansatz: &Ansatz, theta: &[f64], hamiltonian: &DMatrix<Complex64>) -> Result<f64> {
    ansatz.state(theta)?.expectation(hamiltonian)
}

/// Minimise the ansatz energy, keeping the best of `optimizer.restarts`
/// independent runs. Restart `r` draws its starting point from a stream
/// derived from `(optimizer.seed, r)`, so adding restarts never changes the
/// earlier ones. `initial_theta`, when given, replaces the first restart's
/// random start.
pub fn run_vqe(
    hamiltonian: &DMatrix<Complex64>,
    ansatz: &Ansatz,
    optimizer: &OptimizerConfig,
    initial_theta: Option<&[f64]>,
) -> Result<VqeResult> {
    optimizer.validate()?;
    let dim = 1usize << ansatz.num_qubits;
    if hamiltonian.nrows() != dim || hamiltonian.ncols() != dim {
        return Err(Error::dimension(format!(
            "{}-qubit ansatz for a {}x{} operator",
            ansatz.num_qubits,
            hamiltonian.nrows(),
            hamiltonian.ncols()
        )));
    }
    crate::sim::StateVector::zero(ansatz.num_qubits)?.expectation(hamiltonian)?;
    let params = ansatz.num_parameters();
    if let Some(theta) = initial_theta {
        if theta.len() != params {
            return Err(Error::config(format!(
                "initial point has {} parameters, ansatz needs {params}",
                theta.len()
            )));
        }
    }

    let start = Instant::now();
    // hermiticity and dimensions were checked above, so the cost cannot fail
    let cost = |theta: &[f64]| {
        vqe_cost(ansatz, theta, hamiltonian).expect("validated ansatz and operator")
    };

    let mut best: Option<Minimum> = None;
    let mut restart_costs = Vec::with_capacity(optimizer.restarts);
    for r in 0..optimizer.restarts {
        let stream = derive_seed(optimizer.seed, r as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(stream);
        let x0: Vec<f64> = match initial_theta {
            Some(theta) if r == 0 => theta.to_vec(),
            _ => (0..params).map(|_| rng.random::<f64>()).collect(),
        };
        let found = match optimizer.kind {
            OptimizerKind::NelderMead => nelder_mead(
                cost,
                &x0,
                SIMPLEX_STEP,
                optimizer.max_iterations,
                optimizer.tolerance,
            ),
            OptimizerKind::Spsa => spsa(
                cost,
                &x0,
                optimizer.max_iterations,
                optimizer.tolerance,
                derive_seed(stream, 1),
            ),
        };
        restart_costs.push(found.value);
        if best.as_ref().is_none_or(|b| found.value < b.value) {
            best = Some(found);
        }
    }
    let best = best.expect("at least one restart");
    Ok(VqeResult {
        eigenvalue_estimate: best.value,
        optimal_theta: best.x,
        trace: best.trace,
        restart_costs,
        elapsed: start.elapsed().as_secs_f64(),
    })
}

/// Largest eigenvalue of `bpm` as `−min ⟨ψ(θ)| −BPM |ψ(θ)⟩`. Returns the
/// eigenvalue and the optimisation wall time in seconds.
pub fn quantum_largest_eigenvalue(
    bpm: &DMatrix<f64>,
    depth: usize,
    optimizer: &OptimizerConfig,
) -> Result<(f64, f64)> {
    let result = vqe_for_bpm(bpm, depth, optimizer)?;
    Ok((-result.eigenvalue_estimate, result.elapsed))
}

/// VQE run on `−padded(bpm)`.
pub fn vqe_for_bpm(
    bpm: &DMatrix<f64>,
    depth: usize,
    optimizer: &OptimizerConfig,
) -> Result<VqeResult> {
    if bpm.nrows() > MAX_VQE_DIM {
        return Err(Error::config(format!(
            "matrix dimension {} exceeds the VQE limit of {MAX_VQE_DIM}; use the classical eigensolver",
            bpm.nrows()
        )));
    }
    let (hamiltonian, qubits) = matrix_operator(bpm)?;
    let ansatz = Ansatz::new(qubits, depth)?;
    run_vqe(&hamiltonian, &ansatz, optimizer, None)
}
