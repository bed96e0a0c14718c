//! Exact conditional expectations for the walk conditioned to stay
//! non-negative (meander) and additionally pinned at its endpoint (bridge).

use crate::error::{Error, Result};
use crate::lattice::ConfinedWalk;
use crate::numeric::NeumaierSum;
use crate::step_dist::StepDistribution;

/// `E[phi((x + S(n)) / (sigma sqrt n)) | tau(x) > n]`.
pub fn meander_expectation<F>(d: &StepDistribution, x: usize, n: usize, phi: F) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if n == 0 {
        return Err(Error::Domain("meander horizon must be at least 1".into()));
    }
    let scale = d.moments().sigma2.sqrt() * (n as f64).sqrt();
    let mut walk = ConfinedWalk::new(d, x);
    for _ in 0..n {
        walk.step();
    }
    let mut num = NeumaierSum::new();
    let mut den = NeumaierSum::new();
    let lo = walk.front_offset();
    for (i, &w) in walk.front().iter().enumerate() {
        if w > 0.0 {
            let z = (lo + i as i64) as f64;
            num.add(w * phi(z / scale));
            den.add(w);
        }
    }
    Ok(num.value() / den.value())
}

/// `E[phi((x + S([ns])) / (sigma sqrt n)) | tau(x) > [nt], x + S([nt]) = y]`.
///
/// The forward killed walk from `x` is run to `[ns]`; the backward part is
/// the killed walk of the reversed step law from `y` run for `[nt] - [ns]`
/// steps, since reversing a non-negative path from `z` to `y` gives a
/// non-negative path of `-S` from `y` to `z`.
pub fn bridge_expectation<F>(d: &StepDistribution, x: usize, y: usize, s: f64, t: f64, n: usize, phi: F) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(0.0 < s && s < t && t <= 1.0) {
        return Err(Error::Domain(format!("need 0 < s < t <= 1, got s = {s}, t = {t}")));
    }
    let ns = (n as f64 * s).floor() as usize;
    let nt = (n as f64 * t).floor() as usize;
    let scale = d.moments().sigma2.sqrt() * (n as f64).sqrt();

    let mut forward = ConfinedWalk::new(d, x);
    for _ in 0..ns {
        forward.step();
    }
    let reversed = d.mirrored();
    let mut backward = ConfinedWalk::new(&reversed, y);
    for _ in 0..nt - ns {
        backward.step();
    }

    let mut num = NeumaierSum::new();
    let mut den = NeumaierSum::new();
    let lo = forward.front_offset();
    for (i, &p) in forward.front().iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let z = lo + i as i64;
        let q = backward.front_at(z);
        if q > 0.0 {
            let w = p * q;
            num.add(w * phi(z as f64 / scale));
            den.add(w);
        }
    }
    let den = den.value();
    if den <= 0.0 {
        return Err(Error::ImpossibleBridge);
    }
    Ok(num.value() / den)
}
