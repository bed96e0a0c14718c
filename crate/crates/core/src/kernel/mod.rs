//! The embedded chain of reflection positions `(X(r_k))`: its transition
//! kernel, stationary measure and spectrum, and the renewal operators
//! `R_n`, `T_n` that count reflection epochs.

mod renewal;
mod spectral;
mod stationary;

pub use renewal::{
    reflection_time_kernels, renewal_operators_t, sigma_hat, sigma_limit_check, sigma_tilde, OperatorSequence,
    SigmaCheck,
};
pub use spectral::{spectral_report, SpectralReport, SIMPLE_MARGIN};
pub use stationary::{
    compare_measures, recurrent_class, stationary_nu_eig, stationary_nu_formula, FormulaMeasure, MeasureComparison,
    PowerConfig, StationaryMeasure,
};

use crate::error::{Error, Result};
use crate::lattice::FluctuationTables;
use crate::numeric::NeumaierSum;

/// Row deficit above which a truncated reflection kernel is rejected.
pub const MAX_ROW_DEFICIT: f64 = 1e-6;

/// Dense `rows x cols` slice of an operator on the non-negative integers.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedKernel {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
    /// `1 - row sum` for stochastic kernels, 0 otherwise.
    pub row_deficit: Vec<f64>,
}

impl TruncatedKernel {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![0.0; rows * cols],
            row_deficit: vec![0.0; rows],
        }
    }

    /// Identity restricted to the window.
    pub fn identity(rows: usize, cols: usize) -> Self {
        let mut k = Self::zeros(rows, cols);
        for i in 0..rows.min(cols) {
            k.set(i, i, 1.0);
        }
        k
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged kernel rows");
        let n = rows.len();
        let entries = rows.into_iter().flatten().collect();
        let mut k = Self {
            rows: n,
            cols,
            entries,
            row_deficit: vec![0.0; n],
        };
        k.update_deficits();
        k
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        if x < self.rows && y < self.cols {
            self.entries[x * self.cols + y]
        } else {
            0.0
        }
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: f64) {
        self.entries[x * self.cols + y] = v;
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.entries[x * self.cols..(x + 1) * self.cols]
    }

    pub fn row_mut(&mut self, x: usize) -> &mut [f64] {
        &mut self.entries[x * self.cols..(x + 1) * self.cols]
    }

    pub fn row_sum(&self, x: usize) -> f64 {
        self.row(x).iter().copied().collect::<NeumaierSum>().value()
    }

    /// Recomputes `row_deficit` as `1 - row sum`.
    pub fn update_deficits(&mut self) {
        self.row_deficit = (0..self.rows).map(|x| 1.0 - self.row_sum(x)).collect();
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }
}

/// `R(x, y) = sum_{w=0}^{x} U*(-w) mu*(w - x - y)` for `y >= 1`, `R(x, 0) = 0`.
///
/// Rows cover `0..=x_max`, columns `0..=y_max`. Mass landing beyond `y_max`
/// shows up as row deficit.
pub fn build_reflection_kernel(tables: &FluctuationTables, x_max: usize, y_max: usize) -> Result<TruncatedKernel> {
    if tables.u_star.len() <= x_max {
        return Err(Error::Domain(format!(
            "potential known up to {} but the kernel needs rows up to {x_max}",
            tables.u_star.len() - 1
        )));
    }
    let mu = &tables.mu_star;
    let mut k = TruncatedKernel::zeros(x_max + 1, y_max + 1);
    for x in 0..=x_max {
        for y in 1..=y_max {
            let mut acc = NeumaierSum::new();
            for w in 0..=x {
                let p = mu.get(w as i64 - x as i64 - y as i64);
                if p > 0.0 {
                    acc.add(tables.u_star[w] * p);
                }
            }
            k.set(x, y, acc.value());
        }
    }
    k.update_deficits();
    if let Some((row, &deficit)) = k
        .row_deficit
        .iter()
        .enumerate()
        .find(|(_, d)| d.abs() > MAX_ROW_DEFICIT)
    {
        return Err(Error::TruncationTooSevere { row, deficit });
    }
    Ok(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{DpBudget, LadderConfig};
    use crate::step_dist::{lazy_walk, skew_walk};

    fn tables(d: &crate::StepDistribution) -> FluctuationTables {
        FluctuationTables::compute(d, 64, 10, LadderConfig::default(), DpBudget::default()).unwrap()
    }

    #[test]
    fn lazy_kernel_jumps_to_one() {
        let k = build_reflection_kernel(&tables(&lazy_walk()), 20, 1).unwrap();
        for x in 0..=20 {
            assert_eq!(k.get(x, 0), 0.0);
            assert!((k.get(x, 1) - 1.0).abs() < 1e-13);
            assert!(k.row_deficit[x].abs() < 1e-12);
        }
    }

    #[test]
    fn skew_kernel_rows() {
        let k = build_reflection_kernel(&tables(&skew_walk()), 64, 2).unwrap();
        assert!((k.get(1, 1) - 0.75).abs() < 1e-12);
        assert!((k.get(1, 2) - 0.25).abs() < 1e-12);
        assert!((k.get(2, 1) - 0.625).abs() < 1e-12);
        assert!((k.get(2, 2) - 0.375).abs() < 1e-12);
        for x in 0..=64 {
            assert_eq!(k.get(x, 0), 0.0);
            assert!(k.get(x, 1) > 0.0 && k.get(x, 2) > 0.0);
            assert!((k.row_sum(x) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn narrow_window_is_rejected() {
        assert!(matches!(
            build_reflection_kernel(&tables(&skew_walk()), 4, 1),
            Err(Error::TruncationTooSevere { .. })
        ));
    }
}
