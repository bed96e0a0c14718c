//! Monte Carlo simulation of the reflected walk and estimators for its
//! rescaled finite-dimensional laws.
//!
//! Path `i` draws its steps from a ChaCha8 stream selected by `(seed, i)`,
//! so every path, and every aggregate reduced in path order, is independent
//! of the number of worker threads.

mod estimators;
mod modulus;

pub use estimators::{estimate_fdd, ks_against_half_normal, ks_statistic, slln_trace, FddEstimate, SllnTrace};
pub use modulus::{modulus_check, modulus_scan, path_modulus, ModulusReport, Violation};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::step_dist::StepDistribution;

#[derive(Debug, Clone, PartialEq)]
pub struct SimPlan {
    pub dist: StepDistribution,
    pub x0: u64,
    pub n: usize,
    /// Strictly increasing fractions in `(0, 1]`.
    pub times: Vec<f64>,
    pub paths: usize,
    pub seed: u64,
    pub workers: usize,
    /// Window widths in `(0, 1)` at which moduli of continuity are recorded.
    pub deltas: Vec<f64>,
}

impl SimPlan {
    pub fn new(dist: StepDistribution, n: usize, paths: usize, seed: u64) -> Self {
        Self {
            dist,
            x0: 0,
            n,
            times: vec![1.0],
            paths,
            seed,
            workers: 1,
            deltas: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let report = self.dist.validate();
        if !report.passed() {
            return Err(Error::InvalidPlan(format!("step law rejected: {report}")));
        }
        if self.n == 0 || self.paths == 0 || self.workers == 0 {
            return Err(Error::InvalidPlan("n, paths and workers must be at least 1".into()));
        }
        if self.times.is_empty()
            || !self.times.iter().all(|&t| t > 0.0 && t <= 1.0)
            || !self.times.windows(2).all(|w| w[0] < w[1])
        {
            return Err(Error::InvalidPlan(format!(
                "times must be strictly increasing in (0, 1], got {:?}",
                self.times
            )));
        }
        if !self.deltas.iter().all(|&d| d > 0.0 && d < 1.0) {
            return Err(Error::InvalidPlan(format!(
                "deltas must lie in (0, 1), got {:?}",
                self.deltas
            )));
        }
        Ok(())
    }

    fn scale(&self) -> f64 {
        self.dist.moments().sigma2.sqrt() * (self.n as f64).sqrt()
    }
}

/// One simulated path, reduced to what the estimators need.
#[derive(Debug, Clone, PartialEq)]
pub struct PathFunctionalSample {
    /// `X_n(t_i) = X(n t_i) / (sigma sqrt n)`, linearly interpolated.
    pub values: Vec<f64>,
    /// Number of reflection times `r_k <= n`.
    pub reflections: usize,
    pub max_step: u64,
    /// `(w_X(delta), w_S(delta))` for each planned `delta`, rescaled like `values`.
    pub modulus: Vec<(f64, f64)>,
}

/// Inverse-CDF lookup table for the step law.
#[derive(Debug, Clone)]
pub struct StepSampler {
    min: i64,
    cdf: Vec<f64>,
}

impl StepSampler {
    pub fn new(d: &StepDistribution) -> Self {
        let mut acc = 0.0;
        let cdf = d
            .probs()
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        Self {
            min: d.support_min(),
            cdf,
        }
    }

    /// Step for a uniform `u` in `[0, 1)`.
    #[inline]
    pub fn step(&self, u: f64) -> i64 {
        let idx = self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1);
        self.min + idx as i64
    }
}

/// Generator for path `index`.
pub fn path_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Full trajectory of one path: the steps `xi_k`, the free walk `x0 + S(k)`
/// and the reflected walk `X(k)`, each of length `n + 1` (steps has a
/// leading 0).
#[derive(Debug, Clone, PartialEq)]
pub struct PathTrace {
    pub steps: Vec<i64>,
    pub free: Vec<i64>,
    pub reflected: Vec<i64>,
}

impl PathTrace {
    /// Indices `k` with `X(k - 1) + xi_k < 0`.
    pub fn reflection_times(&self) -> Vec<usize> {
        (1..self.steps.len())
            .filter(|&k| self.reflected[k - 1] + self.steps[k] < 0)
            .collect()
    }
}

fn fill_trace(sampler: &StepSampler, rng: &mut ChaCha8Rng, x0: i64, n: usize, trace: &mut PathTrace) {
    trace.steps.clear();
    trace.free.clear();
    trace.reflected.clear();
    trace.steps.push(0);
    trace.free.push(x0);
    trace.reflected.push(x0);
    let (mut s, mut x) = (x0, x0);
    for _ in 0..n {
        let xi = sampler.step(rng.random::<f64>());
        s += xi;
        x = (x + xi).abs();
        trace.steps.push(xi);
        trace.free.push(s);
        trace.reflected.push(x);
    }
}

/// Replays path `index` of `plan`.
pub fn trace_path(plan: &SimPlan, index: usize) -> PathTrace {
    let sampler = StepSampler::new(&plan.dist);
    let mut rng = path_rng(plan.seed, index as u64);
    let mut trace = PathTrace {
        steps: Vec::new(),
        free: Vec::new(),
        reflected: Vec::new(),
    };
    fill_trace(&sampler, &mut rng, plan.x0 as i64, plan.n, &mut trace);
    trace
}

/// Linear interpolation of an integer path at real index `p`.
fn interpolate(path: &[i64], p: f64) -> f64 {
    let k = (p.floor() as usize).min(path.len() - 1);
    let frac = p - k as f64;
    if frac == 0.0 || k + 1 >= path.len() {
        path[k] as f64
    } else {
        path[k] as f64 + frac * (path[k + 1] - path[k]) as f64
    }
}

fn summarize(plan: &SimPlan, trace: &PathTrace, scale: f64) -> PathFunctionalSample {
    let n = plan.n as f64;
    let values = plan
        .times
        .iter()
        .map(|&t| interpolate(&trace.reflected, n * t) / scale)
        .collect();
    let reflections = (1..trace.steps.len())
        .filter(|&k| trace.reflected[k - 1] + trace.steps[k] < 0)
        .count();
    let max_step = trace.steps.iter().map(|s| s.unsigned_abs()).max().unwrap_or(0);
    let modulus = plan
        .deltas
        .iter()
        .map(|&d| {
            (
                path_modulus(&trace.reflected, d) / scale,
                path_modulus(&trace.free, d) / scale,
            )
        })
        .collect();
    PathFunctionalSample {
        values,
        reflections,
        max_step,
        modulus,
    }
}

pub(crate) fn with_workers<T: Send>(workers: usize, job: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidPlan(format!("cannot start {workers} workers: {e}")))?;
    Ok(pool.install(job))
}

/// Simulates every path of `plan`; the result is in path order.
pub fn simulate(plan: &SimPlan) -> Result<Vec<PathFunctionalSample>> {
    plan.validate()?;
    let sampler = StepSampler::new(&plan.dist);
    let scale = plan.scale();
    let x0 = plan.x0 as i64;
    with_workers(plan.workers, || {
        (0..plan.paths)
            .into_par_iter()
            .map_init(
                || PathTrace {
                    steps: Vec::with_capacity(plan.n + 1),
                    free: Vec::with_capacity(plan.n + 1),
                    reflected: Vec::with_capacity(plan.n + 1),
                },
                |trace, i| {
                    let mut rng = path_rng(plan.seed, i as u64);
                    fill_trace(&sampler, &mut rng, x0, plan.n, trace);
                    summarize(plan, trace, scale)
                },
            )
            .collect()
    })
}
