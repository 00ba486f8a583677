//! Independent oracles shared by the integration tests. None of these call
//! into the library's numerical kernels.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

/// Uniform symmetric matrix with entries in [-1, 1).
pub fn random_symmetric<R: Rng>(rng: &mut R, dim: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in i..dim {
            let x = rng.random_range(-1.0..1.0);
            m[(i, j)] = x;
            m[(j, i)] = x;
        }
    }
    m
}

/// Hermitian matrix with real and imaginary parts uniform in [-1, 1).
pub fn random_hermitian<R: Rng>(rng: &mut R, dim: usize) -> DMatrix<Complex64> {
    let mut m = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        m[(i, i)] = Complex64::new(rng.random_range(-1.0..1.0), 0.0);
        for j in i + 1..dim {
            let z = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

/// Normalised complex vector of length `dim`.
pub fn random_state<R: Rng>(rng: &mut R, dim: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

/// All eigenvalues of a symmetric matrix, ascending, by shifted power
/// iteration with projection deflation. Each eigenpair is accepted once the
/// residual `‖Bx − λx‖` drops below `1e-11 · scale`.
pub fn power_deflation_eigenvalues(a: &DMatrix<f64>) -> Vec<f64> {
    let n = a.nrows();
    let scale = a.norm().max(1.0);
    let shifted = a + DMatrix::identity(n, n) * scale;
    let mut found: Vec<DVector<f64>> = Vec::new();
    let mut values = Vec::new();
    for k in 0..n {
        let mut x = DVector::from_fn(n, |i, _| 1.0 + ((i * 7 + k * 13) % 11) as f64 / 10.0);
        project_out(&mut x, &found);
        if x.norm() < 1e-12 {
            x = DVector::from_fn(n, |i, _| if i == k { 1.0 } else { 0.0 });
            project_out(&mut x, &found);
        }
        x /= x.norm();
        let mut lambda = 0.0;
        for _ in 0..2_000_000 {
            let mut y = &shifted * &x;
            project_out(&mut y, &found);
            lambda = x.dot(&y);
            let residual = (&y - &x * lambda).norm();
            let ny = y.norm();
            if ny == 0.0 {
                break;
            }
            x = y / ny;
            if residual < 1e-11 * scale {
                break;
            }
        }
        values.push(lambda - scale);
        found.push(x);
    }
    values.sort_by(f64::total_cmp);
    values
}

fn project_out(x: &mut DVector<f64>, basis: &[DVector<f64>]) {
    for _ in 0..2 {
        for b in basis {
            let c = b.dot(x);
            *x -= b * c;
        }
    }
}

/// `⟨ψ|H|ψ⟩` summed term by term.
pub fn quadratic_form(psi: &[Complex64], h: &DMatrix<Complex64>) -> f64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..psi.len() {
        for j in 0..psi.len() {
            acc += psi[i].conj() * h[(i, j)] * psi[j];
        }
    }
    acc.re
}

/// Smallest eigenvalue of a Hermitian matrix through its real symmetric
/// embedding `[[Re, −Im], [Im, Re]]`, using nalgebra's solver.
pub fn hermitian_min_eigenvalue(h: &DMatrix<Complex64>) -> f64 {
    let n = h.nrows();
    let mut r = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = h[(i, j)];
            r[(i, j)] = z.re;
            r[(i + n, j + n)] = z.re;
            r[(i, j + n)] = -z.im;
            r[(i + n, j)] = z.im;
        }
    }
    r.symmetric_eigen().eigenvalues.min()
}

pub fn sq_dist(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum()
}
