//! Reflection-time kernels `R_n(x, y) = P_x[r_1 = n, X(n) = y]` and the
//! renewal operators `T_0 = I`, `T_n = sum_j R_j T_{n-j}`, whose entries are
//! `Sigma_n(x, y) = sum_k P_x[r_k = n, X(n) = y]`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernel::{StationaryMeasure, TruncatedKernel};
use crate::lattice::{ConfinedWalk, DpBudget};
use crate::numeric::NeumaierSum;
use crate::report::{gaps_non_increasing, ConvergenceReport};
use crate::step_dist::StepDistribution;

/// `R_n` and `T_n` on a common window: rows `0..=x_max`, columns `0..=C`.
///
/// Positions right after a reflection lie in `1..=C`, so for `n >= 1` no
/// mass of `R_n` or `T_n` is lost by cutting the columns at `C`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSequence {
    /// `r[n]` is `R_n`; `r[0]` is zero.
    pub r: Vec<TruncatedKernel>,
    /// `t[n]` is `T_n`; empty until [`renewal_operators_t`] runs.
    pub t: Vec<TruncatedKernel>,
    /// `tail[x][n] = P_x[r_1 > n]`.
    pub tail: Vec<Vec<f64>>,
}

impl OperatorSequence {
    pub fn horizon(&self) -> usize {
        self.r.len() - 1
    }

    pub fn rows(&self) -> usize {
        self.r[0].rows()
    }

    pub fn cols(&self) -> usize {
        self.r[0].cols()
    }

    /// `P_x[r_1 = n]`.
    pub fn point(&self, x: usize, n: usize) -> f64 {
        if n == 0 {
            0.0
        } else {
            self.r[n].row_sum(x)
        }
    }

    /// `sum_{n=1}^{horizon} R_n`, which tends to the reflection kernel.
    pub fn partial_kernel(&self) -> TruncatedKernel {
        let mut k = TruncatedKernel::zeros(self.rows(), self.cols());
        for x in 0..self.rows() {
            for y in 0..self.cols() {
                let v = self.r[1..].iter().map(|r| r.get(x, y)).collect::<NeumaierSum>().value();
                k.set(x, y, v);
            }
        }
        k.update_deficits();
        k
    }
}

/// Runs the killed walk from every `x <= x_max` for `horizon` steps; the mass
/// killed at `-y` in step `n` is `R_n(x, y)`, since the reflected chain then
/// jumps to `y`.
pub fn reflection_time_kernels(
    d: &StepDistribution,
    x_max: usize,
    horizon: usize,
    budget: DpBudget,
) -> Result<OperatorSequence> {
    let c = d.max_down_jump();
    budget.check_front(d, x_max, horizon)?;
    let per_row: Vec<(Vec<Vec<f64>>, Vec<f64>)> = (0..=x_max)
        .into_par_iter()
        .map(|x| {
            let mut walk = ConfinedWalk::new(d, x);
            let mut landed = Vec::with_capacity(horizon);
            let mut tail = Vec::with_capacity(horizon + 1);
            tail.push(1.0);
            for _ in 0..horizon {
                walk.step();
                landed.push(walk.killed().to_vec());
                tail.push(walk.survival());
            }
            (landed, tail)
        })
        .collect();

    let mut r = vec![TruncatedKernel::zeros(x_max + 1, c + 1); horizon + 1];
    for (x, (landed, _)) in per_row.iter().enumerate() {
        for (n, killed) in landed.iter().enumerate() {
            for (i, &m) in killed.iter().enumerate() {
                r[n + 1].set(x, i + 1, m);
            }
        }
    }
    for k in &mut r {
        k.row_deficit = vec![0.0; x_max + 1];
    }
    let tail = per_row.into_iter().map(|(_, t)| t).collect();
    Ok(OperatorSequence { r, t: Vec::new(), tail })
}

/// Fills `ops.t` with `T_0..=T_horizon`.
pub fn renewal_operators_t(ops: &mut OperatorSequence) -> Result<()> {
    let rows = ops.rows();
    let cols = ops.cols();
    if ops.r.iter().any(|k| k.rows() != rows || k.cols() != cols) {
        return Err(Error::WindowMismatch("all R_n must share one truncation window".into()));
    }
    if cols > rows {
        return Err(Error::WindowMismatch(format!(
            "{cols} columns but only {rows} rows: T_n(y, .) is needed for every column y"
        )));
    }
    let horizon = ops.horizon();
    // nonzero[j][x] lists the (y, R_j(x, y)) with R_j(x, y) != 0
    let nonzero: Vec<Vec<Vec<(usize, f64)>>> = ops
        .r
        .iter()
        .map(|k| {
            (0..rows)
                .map(|x| {
                    (0..cols)
                        .filter_map(|y| {
                            let v = k.get(x, y);
                            (v != 0.0).then_some((y, v))
                        })
                        .collect()
                })
                .collect()
        })
        .collect();

    let mut t = Vec::with_capacity(horizon + 1);
    let mut t0 = TruncatedKernel::identity(rows, cols);
    t0.row_deficit = vec![0.0; rows];
    t.push(t0);
    for n in 1..=horizon {
        let entries: Vec<Vec<f64>> = (0..rows)
            .into_par_iter()
            .map(|x| {
                let mut acc = vec![NeumaierSum::new(); cols];
                for j in 1..=n {
                    let prev = &t[n - j];
                    for &(y, v) in &nonzero[j][x] {
                        for (a, &p) in acc.iter_mut().zip(prev.row(y)) {
                            if p != 0.0 {
                                a.add(v * p);
                            }
                        }
                    }
                }
                acc.iter().map(NeumaierSum::value).collect()
            })
            .collect();
        let mut k = TruncatedKernel::from_rows(entries);
        k.row_deficit = vec![0.0; rows];
        t.push(k);
    }
    ops.t = t;
    Ok(())
}

fn split_times(s: f64, t: f64, n: usize) -> Result<(usize, usize)> {
    if !(0.0 < s && s < t && t < 1.0) {
        return Err(Error::Domain(format!("need 0 < s < t < 1, got s = {s}, t = {t}")));
    }
    let ns = (n as f64 * s).floor() as usize;
    let nt = (n as f64 * t).floor() as usize;
    if ns == 0 {
        return Err(Error::Domain(format!("[ns] = 0 for n = {n}, s = {s}")));
    }
    Ok((ns, nt))
}

fn check_ready(ops: &OperatorSequence, x: usize, nt: usize) -> Result<()> {
    if ops.t.is_empty() {
        return Err(Error::Domain("renewal operators T_n have not been computed".into()));
    }
    if nt > ops.horizon() || x >= ops.rows() {
        return Err(Error::WindowMismatch(format!(
            "need n up to {nt} and row {x}; have horizon {} and {} rows",
            ops.horizon(),
            ops.rows()
        )));
    }
    Ok(())
}

/// `n sum_y T_[ns](x, y) P_y[r_1 > [nt] - [ns]]`.
pub fn sigma_hat(ops: &OperatorSequence, x: usize, s: f64, t: f64, n: usize) -> Result<f64> {
    let (ns, nt) = split_times(s, t, n)?;
    check_ready(ops, x, nt)?;
    let gap = nt - ns;
    let sum: NeumaierSum = (0..ops.cols())
        .map(|y| ops.t[ns].get(x, y) * ops.tail[y][gap])
        .collect();
    Ok(n as f64 * sum.value())
}

/// `n^2 sum_y T_[ns](x, y) P_y[r_1 = [nt] - [ns]]`.
pub fn sigma_tilde(ops: &OperatorSequence, x: usize, s: f64, t: f64, n: usize) -> Result<f64> {
    let (ns, nt) = split_times(s, t, n)?;
    check_ready(ops, x, nt)?;
    let gap = nt - ns;
    let sum: NeumaierSum = (0..ops.cols())
        .map(|y| ops.t[ns].get(x, y) * ops.point(y, gap))
        .collect();
    let n = n as f64;
    Ok(n * n * sum.value())
}

/// Tolerances for [`sigma_limit_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaCheck {
    /// Relative gap allowed at the largest `n`.
    pub rel_tol: f64,
    /// Relative spread allowed between starting points at the largest `n`.
    pub x_agreement: f64,
    /// Each gap may exceed the previous one by at most this factor.
    pub noise_factor: f64,
}

impl Default for SigmaCheck {
    fn default() -> Self {
        Self {
            rel_tol: 0.05,
            x_agreement: 0.01,
            noise_factor: 1.5,
        }
    }
}

/// Compares `sqrt(n) T_n(x, y)` with `nu(y) / (pi c1 nu(h))`.
#[allow(clippy::too_many_arguments)]
pub fn sigma_limit_check(
    ops: &OperatorSequence,
    nu: &StationaryMeasure,
    h: &[f64],
    c1: f64,
    xs: &[usize],
    ys: &[usize],
    ns: &[usize],
    tol: SigmaCheck,
) -> Result<ConvergenceReport> {
    let n_max = ns.iter().copied().max().unwrap_or(0);
    if ops.t.len() <= n_max {
        return Err(Error::WindowMismatch(format!(
            "T_n known up to {} but n = {n_max} requested",
            ops.t.len().saturating_sub(1)
        )));
    }
    let nu_h = nu.integrate(h);
    let mut report = ConvergenceReport::new("sigma_n");
    for &y in ys {
        let reference = nu.get(y) / (std::f64::consts::PI * c1 * nu_h);
        let mut last = Vec::new();
        for &x in xs {
            let label = format!("x={x};y={y}");
            let mut gaps = Vec::new();
            for &n in ns {
                let value = (n as f64).sqrt() * ops.t[n].get(x, y);
                gaps.push(report.push(label.clone(), n, value, reference).rel_gap);
            }
            let final_gap = *gaps.last().unwrap_or(&f64::INFINITY);
            report.verdict(
                format!("{label} limit"),
                final_gap <= tol.rel_tol,
                format!("relative gap {final_gap:.3e} at n = {n_max}, tolerance {}", tol.rel_tol),
            );
            report.verdict(
                format!("{label} monotone"),
                gaps_non_increasing(&gaps, tol.noise_factor),
                format!("gaps {:?}", gaps),
            );
            last.push((n_max as f64).sqrt() * ops.t[n_max].get(x, y));
        }
        if last.len() > 1 {
            let lo = last.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = last.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let spread = (hi - lo) / hi.abs();
            report.verdict(
                format!("y={y} x-independence"),
                spread <= tol.x_agreement,
                format!("relative spread {spread:.3e} at n = {n_max}"),
            );
        }
    }
    Ok(report)
}
