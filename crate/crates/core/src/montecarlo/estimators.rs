use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::montecarlo::{fill_trace, path_rng, with_workers, PathFunctionalSample, PathTrace, SimPlan, StepSampler};
use crate::numeric::pairwise_sum;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FddEstimate {
    pub mean: f64,
    /// Sample standard deviation over `sqrt(M)`.
    pub se: f64,
}

/// Mean of `prod_i phi_i(X_n(t_i))` over the samples, with its plug-in
/// standard error. `phis[i]` applies to the `i`-th planned time.
pub fn estimate_fdd(samples: &[PathFunctionalSample], phis: &[&(dyn Fn(f64) -> f64 + Sync)]) -> Result<FddEstimate> {
    if samples.is_empty() {
        return Err(Error::InvalidPlan("no samples".into()));
    }
    if let Some(s) = samples.iter().find(|s| s.values.len() != phis.len()) {
        return Err(Error::InvalidPlan(format!(
            "{} test functions for {} recorded times",
            phis.len(),
            s.values.len()
        )));
    }
    let values: Vec<f64> = samples
        .iter()
        .map(|s| s.values.iter().zip(phis).map(|(&v, phi)| phi(v)).product())
        .collect();
    let m = values.len() as f64;
    let mean = pairwise_sum(&values) / m;
    let se = if values.len() > 1 {
        let sq: Vec<f64> = values.iter().map(|v| (v - mean).powi(2)).collect();
        (pairwise_sum(&sq) / (m - 1.0) / m).sqrt()
    } else {
        0.0
    };
    Ok(FddEstimate { mean, se })
}

/// `sup_u |F_M(u) - F(u)|` for the empirical law of `values`.
pub fn ks_statistic<F: Fn(f64) -> f64>(values: &[f64], cdf: F) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let m = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            ((i + 1) as f64 / m - f).max(f - i as f64 / m)
        })
        .fold(0.0, f64::max)
}

/// KS distance between `X_n(t) / sqrt(t)` and the law of `|N(0, 1)|`, for the
/// planned time with index `time_index`.
pub fn ks_against_half_normal(samples: &[PathFunctionalSample], time_index: usize, t: f64) -> f64 {
    let root = t.sqrt();
    let values: Vec<f64> = samples.iter().map(|s| s.values[time_index] / root).collect();
    ks_statistic(&values, |u| libm::erf(u.max(0.0) / std::f64::consts::SQRT_2))
}

/// Tail suprema `max_{n_{k-1} < m <= n_k} X(m) / m` at the dyadic checkpoints
/// `n_k = 2^k <= n`, one row per path.
#[derive(Debug, Clone, PartialEq)]
pub struct SllnTrace {
    pub checkpoints: Vec<usize>,
    pub sup: Vec<Vec<f64>>,
}

impl SllnTrace {
    /// Empirical `level`-quantile across paths at each checkpoint.
    pub fn quantiles(&self, level: f64) -> Vec<f64> {
        (0..self.checkpoints.len())
            .map(|k| {
                let mut col: Vec<f64> = self.sup.iter().map(|row| row[k]).collect();
                col.sort_by(f64::total_cmp);
                let idx = ((level * col.len() as f64).ceil() as usize).clamp(1, col.len()) - 1;
                col[idx]
            })
            .collect()
    }
}

pub fn slln_trace(plan: &SimPlan) -> Result<SllnTrace> {
    plan.validate()?;
    let mut checkpoints = vec![1usize];
    while checkpoints.last().unwrap() * 2 <= plan.n {
        checkpoints.push(checkpoints.last().unwrap() * 2);
    }
    let sampler = StepSampler::new(&plan.dist);
    let sup = with_workers(plan.workers, || {
        (0..plan.paths)
            .into_par_iter()
            .map(|i| {
                let mut trace = PathTrace {
                    steps: Vec::new(),
                    free: Vec::new(),
                    reflected: Vec::new(),
                };
                let mut rng = path_rng(plan.seed, i as u64);
                fill_trace(&sampler, &mut rng, plan.x0 as i64, plan.n, &mut trace);
                let mut lo = 1;
                checkpoints
                    .iter()
                    .map(|&hi| {
                        let block = (lo..=hi)
                            .map(|m| trace.reflected[m] as f64 / m as f64)
                            .fold(0.0, f64::max);
                        lo = hi + 1;
                        block
                    })
                    .collect()
            })
            .collect()
    })?;
    Ok(SllnTrace { checkpoints, sup })
}
