//! Derivative-free minimisers used by VQE.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Outcome of a single minimisation.
#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    /// Best value seen after each iteration (non-increasing).
    pub trace: Vec<f64>,
}

/// Nelder-Mead simplex search with the usual coefficients
/// (reflection 1, expansion 2, contraction 0.5, shrink 0.5).
pub fn nelder_mead<F>(f: F, x0: &[f64], step: f64, max_iterations: usize, tolerance: f64) -> Minimum
where
    F: Fn(&[f64]) -> f64,
{
    let n = x0.len();
    let mut simplex: Vec<(f64, Vec<f64>)> = Vec::with_capacity(n + 1);
    simplex.push((f(x0), x0.to_vec()));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += step;
        simplex.push((f(&x), x));
    }
    let order = |s: &mut Vec<(f64, Vec<f64>)>| s.sort_by(|a, b| a.0.total_cmp(&b.0));
    order(&mut simplex);

    let mut trace = Vec::new();
    for _ in 0..max_iterations {
        if simplex[n].0 - simplex[0].0 < tolerance {
            break;
        }
        let centroid: Vec<f64> = (0..n)
            .map(|k| simplex[..n].iter().map(|(_, x)| x[k]).sum::<f64>() / n as f64)
            .collect();
        let along = |coef: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[n].1)
                .map(|(c, w)| c + coef * (c - w))
                .collect()
        };

        let reflected = along(1.0);
        let fr = f(&reflected);
        if fr < simplex[0].0 {
            let expanded = along(2.0);
            let fe = f(&expanded);
            simplex[n] = if fe < fr {
                (fe, expanded)
            } else {
                (fr, reflected)
            };
        } else if fr < simplex[n - 1].0 {
            simplex[n] = (fr, reflected);
        } else {
            let (contracted, fc) = if fr < simplex[n].0 {
                let x = along(0.5);
                let fx = f(&x);
                (x, fx)
            } else {
                let x = along(-0.5);
                let fx = f(&x);
                (x, fx)
            };
            if fc < fr.min(simplex[n].0) {
                simplex[n] = (fc, contracted);
            } else {
                let best = simplex[0].1.clone();
                for vertex in simplex.iter_mut().skip(1) {
                    for (x, b) in vertex.1.iter_mut().zip(&best) {
                        *x = b + 0.5 * (*x - b);
                    }
                    vertex.0 = f(&vertex.1);
                }
            }
        }
        order(&mut simplex);
        trace.push(simplex[0].0);
    }

    let (value, x) = simplex.swap_remove(0);
    if trace.is_empty() {
        trace.push(value);
    }
    Minimum { x, value, trace }
}

/// Simultaneous-perturbation stochastic approximation with the standard
/// gain decay exponents (0.602, 0.101).
pub fn spsa<F>(f: F, x0: &[f64], max_iterations: usize, tolerance: f64, seed: u64) -> Minimum
where
    F: Fn(&[f64]) -> f64,
{
    const A_GAIN: f64 = 0.2;
    const C_GAIN: f64 = 0.1;
    let stability = 0.1 * max_iterations as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut x = x0.to_vec();
    let mut best = (f(&x), x.clone());
    let mut trace = Vec::with_capacity(max_iterations);
    let mut stalled = 0;
    for k in 0..max_iterations {
        let ak = A_GAIN / (k as f64 + 1.0 + stability).powf(0.602);
        let ck = C_GAIN / (k as f64 + 1.0).powf(0.101);
        let delta: Vec<f64> = (0..x.len())
            .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
            .collect();
        let plus: Vec<f64> = x.iter().zip(&delta).map(|(xi, d)| xi + ck * d).collect();
        let minus: Vec<f64> = x.iter().zip(&delta).map(|(xi, d)| xi - ck * d).collect();
        let slope = (f(&plus) - f(&minus)) / (2.0 * ck);
        for (xi, d) in x.iter_mut().zip(&delta) {
            *xi -= ak * slope * d;
        }
        let value = f(&x);
        if value < best.0 - tolerance {
            stalled = 0;
        } else {
            stalled += 1;
        }
        if value < best.0 {
            best = (value, x.clone());
        }
        trace.push(best.0);
        // no improvement beyond tolerance for a long stretch
        if stalled >= 50 {
            break;
        }
    }
    if trace.is_empty() {
        trace.push(best.0);
    }
    Minimum {
        x: best.1,
        value: best.0,
        trace,
    }
}
