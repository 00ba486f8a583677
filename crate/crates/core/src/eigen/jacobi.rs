//! Cyclic Jacobi eigenvalue iteration for real symmetric matrices.

use nalgebra::DMatrix;

use crate::encoding::check_symmetric;
use crate::error::{Error, Result};

/// Largest matrix the classical eigensolver accepts.
pub const MAX_JACOBI_DIM: usize = 64;

const OFF_DIAGONAL_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;

fn off_diagonal_norm(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += a[(i, j)] * a[(i, j)];
            }
        }
    }
    sum.sqrt()
}

/// All eigenvalues in ascending order.
pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    check_symmetric(m)?;
    let n = m.nrows();
    if n > MAX_JACOBI_DIM {
        return Err(Error::config(format!(
            "matrix dimension {n} exceeds the Jacobi limit of {MAX_JACOBI_DIM}"
        )));
    }
    let mut a = m.clone();
    // symmetrise away the tolerated asymmetry
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (a[(i, j)] + a[(j, i)]);
            a[(i, j)] = avg;
            a[(j, i)] = avg;
        }
    }
    let tol = OFF_DIAGONAL_TOL * a.norm().max(1.0);

    let mut sweeps = 0;
    while off_diagonal_norm(&a) >= tol {
        if sweeps == MAX_SWEEPS {
            return Err(Error::Numeric(format!(
                "Jacobi did not converge in {MAX_SWEEPS} sweeps"
            )));
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, p, q);
            }
        }
        sweeps += 1;
    }

    let mut eigenvalues: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
    eigenvalues.sort_by(f64::total_cmp);
    Ok(eigenvalues)
}

/// Zero `a[(p, q)]` with a Givens rotation applied on both sides.
fn rotate(a: &mut DMatrix<f64>, p: usize, q: usize) {
    let apq = a[(p, q)];
    if apq == 0.0 {
        return;
    }
    let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    let n = a.nrows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = c * akp - s * akq;
        a[(k, q)] = s * akp + c * akq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = c * apk - s * aqk;
        a[(q, k)] = s * apk + c * aqk;
    }
    a[(p, q)] = 0.0;
    a[(q, p)] = 0.0;
}

pub fn classical_largest_eigenvalue(bpm: &DMatrix<f64>) -> Result<f64> {
    let eigenvalues = symmetric_eigenvalues(bpm)?;
    Ok(*eigenvalues.last().expect("non-empty matrix"))
}
