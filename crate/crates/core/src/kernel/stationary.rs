//! Stationary measure of the reflection kernel, by power iteration and by
//! the closed-form expression in terms of `mu*`.

use crate::error::{Error, Result};
use crate::kernel::TruncatedKernel;
use crate::lattice::LatticePmf;
use crate::numeric::{compensated_sum, NeumaierSum};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerConfig {
    /// Stop once successive iterates differ by at most this in l1.
    pub step_tol: f64,
    pub max_iterations: usize,
}

impl Default for PowerConfig {
    fn default() -> Self {
        Self {
            step_tol: 1e-15,
            max_iterations: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StationaryMeasure {
    /// `weights[y] = nu(y)` for `y` in the kernel's column range.
    pub weights: Vec<f64>,
    /// States the chain keeps visiting; `nu` vanishes elsewhere.
    pub support: Vec<usize>,
    /// `|| nu R - nu ||_1`.
    pub residual: f64,
    pub iterations: usize,
}

impl StationaryMeasure {
    pub fn get(&self, y: usize) -> f64 {
        self.weights.get(y).copied().unwrap_or(0.0)
    }

    /// `nu(f) = sum_y nu(y) f(y)`.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        self.weights
            .iter()
            .zip(f)
            .map(|(&w, &v)| w * v)
            .collect::<NeumaierSum>()
            .value()
    }
}

/// States reachable in one or more steps from states that are themselves
/// reached, i.e. the closure of the column support under the kernel.
pub fn recurrent_class(k: &TruncatedKernel) -> Vec<usize> {
    let cols = k.cols().min(k.rows());
    let hit = |from: &mut dyn Iterator<Item = usize>| {
        let mut seen = vec![false; cols];
        for x in from {
            for (y, s) in seen.iter_mut().enumerate() {
                if k.get(x, y) > 0.0 {
                    *s = true;
                }
            }
        }
        seen
    };
    let mut current = hit(&mut (0..k.rows()));
    loop {
        let next = hit(&mut (0..cols).filter(|&y| current[y]));
        if next == current {
            break;
        }
        current = next;
    }
    (0..cols).filter(|&y| current[y]).collect()
}

/// `nu K` restricted to `support`.
fn left_apply(k: &TruncatedKernel, support: &[usize], nu: &[f64]) -> Vec<f64> {
    support
        .iter()
        .map(|&y| {
            support
                .iter()
                .zip(nu)
                .map(|(&x, &w)| w * k.get(x, y))
                .collect::<NeumaierSum>()
                .value()
        })
        .collect()
}

/// Dominant left eigenvector of the kernel on its recurrent class,
/// normalized to a probability.
pub fn stationary_nu_eig(k: &TruncatedKernel, cfg: PowerConfig) -> Result<StationaryMeasure> {
    let support = recurrent_class(k);
    if support.is_empty() {
        return Err(Error::Domain("kernel has no recurrent state".into()));
    }
    if let Some(&x) = support.iter().find(|&&x| k.row_deficit[x].abs() > 1e-8) {
        return Err(Error::TruncationTooSevere {
            row: x,
            deficit: k.row_deficit[x],
        });
    }
    let mut nu = vec![1.0 / support.len() as f64; support.len()];
    let mut iterations = 0;
    loop {
        iterations += 1;
        let mut next = left_apply(k, &support, &nu);
        let mass = compensated_sum(next.iter().copied());
        next.iter_mut().for_each(|v| *v /= mass);
        let change = compensated_sum(next.iter().zip(&nu).map(|(a, b)| (a - b).abs()));
        nu = next;
        if change <= cfg.step_tol {
            break;
        }
        if iterations >= cfg.max_iterations {
            return Err(Error::NoConvergence {
                iterations,
                residual: change,
            });
        }
    }
    let image = left_apply(k, &support, &nu);
    let residual = compensated_sum(image.iter().zip(&nu).map(|(a, b)| (a - b).abs()));
    let mut weights = vec![0.0; k.cols()];
    for (&y, &w) in support.iter().zip(&nu) {
        weights[y] = w;
    }
    Ok(StationaryMeasure {
        weights,
        support,
        residual,
        iterations,
    })
}

/// Closed-form candidate for `nu`, evaluated with the open-interval reading
/// of `mu*((-x-y, -x))`.
#[derive(Debug, Clone, PartialEq)]
pub struct FormulaMeasure {
    /// `raw[x]` for `x = 0..=C`, unnormalized.
    pub raw: Vec<f64>,
    pub normalized: Vec<f64>,
}

/// `nu(x) = sum_{y >= 1} (mu*(-x)/2 + mu*((-x-y, -x)) + mu*(-x-y)/2) mu*(-y)`.
pub fn stationary_nu_formula(mu_star: &LatticePmf) -> FormulaMeasure {
    let c = (-mu_star.offset).max(0) as usize;
    let mu = |v: usize| mu_star.get(-(v as i64));
    let raw: Vec<f64> = (0..=c)
        .map(|x| {
            let mut acc = NeumaierSum::new();
            for y in 1..=c {
                let inner: f64 = (x + 1..x + y).map(mu).sum();
                acc.add((0.5 * mu(x) + inner + 0.5 * mu(x + y)) * mu(y));
            }
            acc.value()
        })
        .collect();
    let total = compensated_sum(raw.iter().copied());
    let normalized = raw.iter().map(|v| v / total).collect();
    FormulaMeasure { raw, normalized }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureComparison {
    /// l1 distance between the normalized formula and the eigenvector.
    pub l1_literal: f64,
    /// Formula mass outside the recurrent class.
    pub mass_off_support: f64,
    /// l1 distance after restricting the formula to the recurrent class and
    /// renormalizing.
    pub l1_on_support: f64,
    /// `|| nu_f R - nu_f ||_1` for the normalized formula measure.
    pub formula_residual: f64,
}

pub fn compare_measures(k: &TruncatedKernel, eig: &StationaryMeasure, formula: &FormulaMeasure) -> MeasureComparison {
    let len = eig.weights.len().max(formula.normalized.len());
    let f = |y: usize| formula.normalized.get(y).copied().unwrap_or(0.0);
    let l1_literal = compensated_sum((0..len).map(|y| (f(y) - eig.get(y)).abs()));

    let on: f64 = compensated_sum(eig.support.iter().map(|&y| f(y)));
    let mass_off_support = 1.0 - on;
    let l1_on_support = if on > 0.0 {
        compensated_sum(eig.support.iter().map(|&y| (f(y) / on - eig.get(y)).abs()))
    } else {
        f64::INFINITY
    };

    let states: Vec<usize> = (0..len.min(k.rows())).collect();
    let nu_f: Vec<f64> = states.iter().map(|&y| f(y)).collect();
    let image = left_apply(k, &states, &nu_f);
    let formula_residual = compensated_sum((0..len).map(|y| (image.get(y).copied().unwrap_or(0.0) - f(y)).abs()));
    MeasureComparison {
        l1_literal,
        mass_off_support,
        l1_on_support,
        formula_residual,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn skew_kernel() -> TruncatedKernel {
        let mut rows = vec![vec![0.0, 0.5, 0.5], vec![0.0, 0.75, 0.25], vec![0.0, 0.625, 0.375]];
        rows.push(vec![0.0, 0.6, 0.4]);
        TruncatedKernel::from_rows(rows)
    }

    #[test]
    fn two_state_stationary_measure() {
        let nu = stationary_nu_eig(&skew_kernel(), PowerConfig::default()).unwrap();
        assert_eq!(nu.support, vec![1, 2]);
        assert!((nu.get(1) - 5.0 / 7.0).abs() < 1e-13);
        assert!((nu.get(2) - 2.0 / 7.0).abs() < 1e-13);
        assert_eq!(nu.get(0), 0.0);
        assert!(nu.residual <= 1e-14);
    }

    #[test]
    fn single_absorbing_column_converges_at_once() {
        let k = TruncatedKernel::from_rows(vec![vec![0.0, 1.0]; 5]);
        let nu = stationary_nu_eig(&k, PowerConfig::default()).unwrap();
        assert_eq!(nu.iterations, 1);
        assert_eq!(nu.weights, vec![0.0, 1.0]);
    }

    #[test]
    fn lazy_formula_literal_reading() {
        let mu = LatticePmf::new(-1, vec![1.0], 0.0);
        let f = stationary_nu_formula(&mu);
        assert_eq!(f.raw, vec![0.5, 0.5]);
        let k = TruncatedKernel::from_rows(vec![vec![0.0, 1.0]; 3]);
        let eig = stationary_nu_eig(&k, PowerConfig::default()).unwrap();
        let cmp = compare_measures(&k, &eig, &f);
        assert!((cmp.l1_literal - 1.0).abs() < 1e-15);
        assert!((cmp.mass_off_support - 0.5).abs() < 1e-15);
        assert!(cmp.l1_on_support < 1e-15);
    }

    #[test]
    fn skew_formula_matches_on_recurrent_class() {
        let mu = LatticePmf::new(-2, vec![0.5, 0.5], 0.0);
        let f = stationary_nu_formula(&mu);
        for (got, want) in f.raw.iter().zip([0.5, 0.625, 0.25]) {
            assert!((got - want).abs() < 1e-15);
        }
        let k = skew_kernel();
        let eig = stationary_nu_eig(&k, PowerConfig::default()).unwrap();
        let cmp = compare_measures(&k, &eig, &f);
        assert!(cmp.l1_on_support < 1e-12);
        assert!(cmp.mass_off_support > 0.3);
    }
}
