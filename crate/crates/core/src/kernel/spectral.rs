//! Leading eigenvalue and spectral gap of the reflection kernel on its
//! recurrent class.

use crate::error::{Error, Result};
use crate::kernel::{PowerConfig, StationaryMeasure, TruncatedKernel};
use crate::numeric::NeumaierSum;

/// A deflated radius below `1 - SIMPLE_MARGIN` counts as a spectral gap.
pub const SIMPLE_MARGIN: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralReport {
    pub lambda1: f64,
    /// Spectral radius of `R - 1 nu^T`.
    pub lambda2_modulus: f64,
    pub simple: bool,
    pub iterations: usize,
}

type Dense = Vec<Vec<f64>>;

fn mat_mul(a: &Dense, b: &Dense) -> Dense {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|k| a[i][k] * b[k][j]).collect::<NeumaierSum>().value())
                .collect()
        })
        .collect()
}

fn inf_norm(a: &Dense) -> f64 {
    a.iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Spectral radius by Gelfand's formula along `A^(2^k)`, rescaling each
/// square to avoid overflow.
fn spectral_radius(mut a: Dense, max_squarings: usize) -> (f64, usize) {
    let mut log_scale = 0.0; // log ||A^(2^k)|| so far, before the current norm
    let mut estimate = f64::INFINITY;
    for k in 0..max_squarings {
        let norm = inf_norm(&a);
        if norm == 0.0 || !norm.is_finite() {
            return (0.0, k);
        }
        let power = 2f64.powi(k as i32);
        let next = ((log_scale + norm.ln()) / power).exp();
        let settled = (next - estimate).abs() <= 1e-13 * next.max(1e-300);
        estimate = next;
        if settled {
            return (estimate, k);
        }
        a.iter_mut().flatten().for_each(|v| *v /= norm);
        log_scale = 2.0 * (log_scale + norm.ln());
        a = mat_mul(&a, &a);
    }
    (estimate, max_squarings)
}

/// `lambda1` by right power iteration from the constant vector and the radius
/// of the kernel minus its rank-one stationary part `1 nu^T`, both on the
/// recurrent class of `nu`.
pub fn spectral_report(k: &TruncatedKernel, nu: &StationaryMeasure, cfg: PowerConfig) -> Result<SpectralReport> {
    let s = &nu.support;
    let n = s.len();
    let block: Dense = s.iter().map(|&x| s.iter().map(|&y| k.get(x, y)).collect()).collect();

    let mut v = vec![1.0; n];
    let mut lambda1 = 0.0;
    let mut iterations = 0;
    loop {
        iterations += 1;
        let w: Vec<f64> = block
            .iter()
            .map(|r| r.iter().zip(&v).map(|(a, b)| a * b).collect::<NeumaierSum>().value())
            .collect();
        let norm = w.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if norm == 0.0 {
            return Err(Error::Domain("kernel is nilpotent on its recurrent class".into()));
        }
        let next: Vec<f64> = w.iter().map(|x| x / norm).collect();
        let change = next.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        v = next;
        let settled = (norm - lambda1).abs() <= cfg.step_tol && change <= cfg.step_tol;
        lambda1 = norm;
        if settled {
            break;
        }
        if iterations >= cfg.max_iterations {
            return Err(Error::NoConvergence {
                iterations,
                residual: change,
            });
        }
    }

    let deflated: Dense = (0..n)
        .map(|i| (0..n).map(|j| block[i][j] - nu.get(s[j])).collect())
        .collect();
    let (lambda2_modulus, squarings) = spectral_radius(deflated, 80);
    Ok(SpectralReport {
        lambda1,
        lambda2_modulus,
        simple: lambda2_modulus < 1.0 - SIMPLE_MARGIN,
        iterations: iterations + squarings,
    })
}
