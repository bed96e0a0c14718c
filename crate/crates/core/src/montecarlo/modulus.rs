use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::montecarlo::{simulate, SimPlan};

/// Modulus of continuity `sup_{|t - s| < delta} |f(t) - f(s)|` of the
/// piecewise-linear interpolation `f(k / n) = path[k]`, in units of `path`.
///
/// On every grid cell `f(t) - f(s)` is affine in `(s, t)`, so the supremum
/// over the band `0 <= t - s <= delta` is attained at a vertex of some
/// cell-band intersection: a pair of grid points at most `delta n` apart, or
/// a grid point paired with the point exactly `delta` away from it.
pub fn path_modulus(path: &[i64], delta: f64) -> f64 {
    let n = path.len() - 1;
    let reach = delta * n as f64;
    let lag = (reach.floor() as usize).min(n);
    let frac = reach - reach.floor();

    let mut best = window_range(path, lag) as f64;
    if frac > 0.0 && lag < n {
        for i in 0..n - lag {
            let j = i + lag;
            let ahead = (path[j] - path[i]) as f64 + frac * (path[j + 1] - path[j]) as f64;
            // s = (j + 1) / n - delta lies between i / n and (i + 1) / n
            let behind = (path[j + 1] - path[i + 1]) as f64 + frac * (path[i + 1] - path[i]) as f64;
            best = best.max(ahead.abs()).max(behind.abs());
        }
    }
    best
}

/// `max_{0 <= j - i <= lag} |path[j] - path[i]|` with monotone deques.
fn window_range(path: &[i64], lag: usize) -> i64 {
    let n = path.len();
    let mut maxq: VecDeque<usize> = VecDeque::new();
    let mut minq: VecDeque<usize> = VecDeque::new();
    let mut best = 0;
    // slide a window [j - lag, j]; the range over it bounds every pair inside
    for j in 0..n {
        while maxq.back().is_some_and(|&k| path[k] <= path[j]) {
            maxq.pop_back();
        }
        maxq.push_back(j);
        while minq.back().is_some_and(|&k| path[k] >= path[j]) {
            minq.pop_back();
        }
        minq.push_back(j);
        let start = j.saturating_sub(lag);
        while maxq.front().is_some_and(|&k| k < start) {
            maxq.pop_front();
        }
        while minq.front().is_some_and(|&k| k < start) {
            minq.pop_front();
        }
        best = best.max(path[maxq[0]] - path[minq[0]]);
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    pub path: usize,
    pub delta: f64,
    pub w_x: f64,
    pub w_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModulusReport {
    pub deltas: Vec<f64>,
    pub paths: usize,
    /// Every `(path, delta)` with `w_X(delta) > w_S(delta)`, in path order.
    pub violations: Vec<Violation>,
    /// `max (w_X - w_S)` over paths, per delta.
    pub max_excess: Vec<f64>,
}

impl ModulusReport {
    pub fn violations_at(&self, delta: f64) -> usize {
        self.violations.iter().filter(|v| v.delta == delta).count()
    }
}

/// Records `w_X(delta)` against `w_S(delta)` on every path of `plan` for
/// each `delta` in `plan.deltas`.
pub fn modulus_scan(plan: &SimPlan) -> Result<ModulusReport> {
    if plan.deltas.is_empty() {
        return Err(Error::InvalidPlan("modulus scan needs at least one delta".into()));
    }
    let samples = simulate(plan)?;
    let mut violations = Vec::new();
    let mut max_excess = vec![f64::NEG_INFINITY; plan.deltas.len()];
    for (path, s) in samples.iter().enumerate() {
        for (k, (&delta, &(w_x, w_s))) in plan.deltas.iter().zip(&s.modulus).enumerate() {
            max_excess[k] = max_excess[k].max(w_x - w_s);
            if w_x > w_s {
                violations.push(Violation { path, delta, w_x, w_s });
            }
        }
    }
    Ok(ModulusReport {
        deltas: plan.deltas.clone(),
        paths: plan.paths,
        violations,
        max_excess,
    })
}

/// As [`modulus_scan`], but any path with `w_X(delta) > w_S(delta)` is an
/// error naming the first such path.
pub fn modulus_check(plan: &SimPlan) -> Result<ModulusReport> {
    let report = modulus_scan(plan)?;
    if let Some(v) = report.violations.first() {
        return Err(Error::InvariantViolation {
            path: v.path,
            delta: v.delta,
            w_x: v.w_x,
            w_s: v.w_s,
        });
    }
    Ok(report)
}
