//! Strict descending ladder heights, their potential, and the renewal
//! functions built from it.
//!
//! The ladder-height law is the first-passage distribution of the walk from
//! level 0 into the negative integers. Grouping the integers into blocks of
//! width `m = max(C, D)` (largest down/up jump) turns the walk into a
//! level-skip-free chain, so the landing distribution is row 0 of the minimal
//! solution `G` of `G = A_down + A_local G + A_up G^2`. `G` is computed by
//! logarithmic reduction, whose `k`-th iterate accounts for every path that
//! stays below block `2^k`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::lattice::{ConfinedWalk, LatticePmf};
use crate::numeric::{compensated_sum, NeumaierSum};
use crate::step_dist::StepDistribution;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderConfig {
    /// Accept the ladder-height law once its missing mass is below this.
    pub mass_tol: f64,
    /// Each reduction step doubles the block range covered.
    pub max_doublings: usize,
}

impl Default for LadderConfig {
    fn default() -> Self {
        Self {
            mass_tol: 1e-8,
            max_doublings: 200,
        }
    }
}

/// Law of `S(l_1)` on `{-C, ..., -1}`.
pub fn ladder_height_law(d: &StepDistribution, cfg: LadderConfig) -> Result<LatticePmf> {
    let c = d.max_down_jump();
    if c == 0 {
        return Err(Error::Domain("step law has no negative atom".into()));
    }
    let m = c.max(d.max_up_jump()).max(1);
    let mi = m as i64;
    let block = |shift: i64| DMatrix::from_fn(m, m, |i, k| d.prob(k as i64 - i as i64 + shift));
    let down = block(-mi);
    let local = block(0);
    let up = block(mi);

    // A centered walk is recurrent, so G 1 = 1. Subtracting the rank-one
    // part 1 u^T moves that eigenvalue to 0 and removes the double root at 1
    // that otherwise limits the reduction to about half the working digits.
    let centered = d.moments().mean.abs() <= crate::step_dist::MEAN_ZERO_TOL;
    let id = DMatrix::<f64>::identity(m, m);
    let shift = if centered {
        DMatrix::from_element(m, m, 1.0 / m as f64)
    } else {
        DMatrix::zeros(m, m)
    };
    let down_s = &down * (&id - &shift);
    let local_s = &local + &up * &shift;

    let g = logarithmic_reduction(&down_s, &local_s, &up, cfg.max_doublings)? + &shift;

    let residual = (&down + &local * &g + &up * &g * &g - &g).abs().max();
    let deficit = (1.0 - compensated_sum(g.row(0).iter().copied())).abs().max(residual);
    if deficit > cfg.mass_tol {
        return Err(Error::SlowConvergence {
            deficit,
            tol: cfg.mass_tol,
        });
    }

    // landing at -y is phase m - y of the block below
    let weights: Vec<f64> = (1..=c).rev().map(|y| g[(0, m - y)].max(0.0)).collect();
    let mut pmf = LatticePmf::new(-(c as i64), weights, 0.0);
    pmf.deficit = (1.0 - pmf.mass()).max(0.0);
    Ok(pmf)
}

/// Minimal solution of `G = down + local G + up G^2`.
fn logarithmic_reduction(
    down: &DMatrix<f64>,
    local: &DMatrix<f64>,
    up: &DMatrix<f64>,
    max_doublings: usize,
) -> Result<DMatrix<f64>> {
    let m = down.nrows();
    let id = DMatrix::<f64>::identity(m, m);
    let solve = |lhs: &DMatrix<f64>, rhs: &DMatrix<f64>, iterations: usize| {
        lhs.clone().lu().solve(rhs).ok_or(Error::NoConvergence {
            iterations,
            residual: f64::INFINITY,
        })
    };
    let base = &id - local;
    let mut b_down = solve(&base, down, 0)?;
    let mut b_up = solve(&base, up, 0)?;
    let mut g = b_down.clone();
    let mut t = b_up.clone();
    for it in 1..=max_doublings {
        let lhs = &id - (&b_down * &b_up + &b_up * &b_down);
        b_down = solve(&lhs, &(&b_down * &b_down), it)?;
        b_up = solve(&lhs, &(&b_up * &b_up), it)?;
        let step = &t * &b_down;
        g += &step;
        t = &t * &b_up;
        if step.abs().max() <= f64::EPSILON * g.abs().max() {
            break;
        }
    }
    Ok(g)
}

/// Ladder-height mass collected by paths of length at most `horizon`:
/// `sum_{n <= horizon} sum_z p_{n-1}(0, z) mu(-y - z)`.
///
/// Converges to [`ladder_height_law`] from below, with a deficit of order
/// `horizon^{-1/2}`.
pub fn ladder_height_partial(d: &StepDistribution, horizon: usize) -> LatticePmf {
    let c = d.max_down_jump();
    let mut acc = vec![NeumaierSum::new(); c];
    let mut walk = ConfinedWalk::new(d, 0);
    for _ in 0..horizon {
        walk.step();
        for (a, &k) in acc.iter_mut().zip(walk.killed()) {
            a.add(k);
        }
    }
    let weights: Vec<f64> = acc.iter().rev().map(NeumaierSum::value).collect();
    let deficit = walk.survival();
    LatticePmf::new(-(c as i64), weights, deficit)
}

/// `U*(-w)` for `w = 0..=w_max` from `U*(0) = 1` and the renewal recursion.
pub fn potential(mu_star: &LatticePmf, w_max: usize) -> Vec<f64> {
    let mut u = vec![0.0; w_max + 1];
    u[0] = 1.0;
    for w in 1..=w_max {
        let mut acc = NeumaierSum::new();
        for v in 1..=w {
            let p = mu_star.get(-(v as i64));
            if p > 0.0 {
                acc.add(p * u[w - v]);
            }
        }
        u[w] = acc.value();
    }
    u
}

/// `h(x) = sum_{w <= x} U*(-w)`.
pub fn renewal_function(u_star: &[f64]) -> Vec<f64> {
    let mut acc = NeumaierSum::new();
    u_star
        .iter()
        .map(|&u| {
            acc.add(u);
            acc.value()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenewalTables {
    pub u_star: Vec<f64>,
    pub h: Vec<f64>,
    /// Descending renewal function of the mirrored walk.
    pub h_tilde: Vec<f64>,
    /// Ladder-height law of the mirrored walk.
    pub mu_star_mirror: LatticePmf,
}

pub fn potential_and_renewal(
    d: &StepDistribution,
    mu_star: &LatticePmf,
    x_max: usize,
    cfg: LadderConfig,
) -> Result<RenewalTables> {
    let u_star = potential(mu_star, x_max);
    let h = renewal_function(&u_star);
    let mu_star_mirror = ladder_height_law(&d.mirrored(), cfg)?;
    let h_tilde = renewal_function(&potential(&mu_star_mirror, x_max));
    Ok(RenewalTables {
        u_star,
        h,
        h_tilde,
        mu_star_mirror,
    })
}

/// `c_1 = E[-S(l_1)] / (sigma sqrt(2 pi))`.
pub fn c1(d: &StepDistribution, mu_star: &LatticePmf) -> f64 {
    let sigma = d.moments().sigma2.sqrt();
    -mu_star.mean() / (sigma * (2.0 * std::f64::consts::PI).sqrt())
}

/// Renewal sequence `u_0 = 1`, `u_n = sum_{k=1}^n f_k u_{n-k}` where
/// `f[k - 1]` is the inter-arrival law at `k`.
pub fn renewal_sequence(f: &[f64]) -> Vec<f64> {
    let n = f.len();
    let mut u = vec![0.0; n + 1];
    u[0] = 1.0;
    for m in 1..=n {
        let mut acc = NeumaierSum::new();
        for k in 1..=m {
            acc.add(f[k - 1] * u[m - k]);
        }
        u[m] = acc.value();
    }
    u
}

/// `u_n = sum_l P[l_l = n]` for `n = 0..=horizon`.
pub fn ladder_epoch_renewal(
    d: &StepDistribution,
    horizon: usize,
    budget: crate::lattice::DpBudget,
) -> Result<Vec<f64>> {
    let f = crate::lattice::tau_law(d, 0, horizon, budget)?;
    Ok(renewal_sequence(&f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::DpBudget;
    use crate::step_dist::{lazy_walk, skew_walk};

    #[test]
    fn lazy_ladder_height_is_unit() {
        let mu = ladder_height_law(&lazy_walk(), LadderConfig::default()).unwrap();
        assert_eq!(mu.offset, -1);
        assert!((mu.weights[0] - 1.0).abs() < 1e-14);
        assert!(mu.deficit < 1e-14);
    }

    #[test]
    fn skew_ladder_height_matches_characteristic_roots() {
        // harmonic functions of the skew walk are spanned by 1, z, (-1/2)^z;
        // boundary values at -1 and -2 give mu*(-1) = mu*(-2) = 1/2
        let mu = ladder_height_law(&skew_walk(), LadderConfig::default()).unwrap();
        assert!((mu.get(-1) - 0.5).abs() < 1e-12, "{mu:?}");
        assert!((mu.get(-2) - 0.5).abs() < 1e-12, "{mu:?}");
    }

    #[test]
    fn partial_sums_increase_towards_law() {
        let d = skew_walk();
        let exact = ladder_height_law(&d, LadderConfig::default()).unwrap();
        let mut last_gap = f64::INFINITY;
        for horizon in [10, 100, 1000] {
            let part = ladder_height_partial(&d, horizon);
            for y in 1..=2 {
                assert!(part.get(-y) <= exact.get(-y) + 1e-14);
            }
            assert!((part.mass() + part.deficit - 1.0).abs() < 1e-12);
            let gap = exact.mass() - part.mass();
            assert!(gap < last_gap);
            last_gap = gap;
        }
        assert!(last_gap < 0.05);
    }

    #[test]
    fn unreachable_tolerance_is_reported() {
        let cfg = LadderConfig {
            mass_tol: 1e-8,
            max_doublings: 0,
        };
        let wide = StepDistribution::from_table(&[(-4, 0.2), (-1, 0.3), (1, 0.2), (3, 0.3)]).unwrap();
        assert!(matches!(
            ladder_height_law(&wide, cfg),
            Err(Error::SlowConvergence { .. })
        ));
    }

    #[test]
    fn lazy_potential_and_renewal() {
        let d = lazy_walk();
        let mu = ladder_height_law(&d, LadderConfig::default()).unwrap();
        let t = potential_and_renewal(&d, &mu, 10, LadderConfig::default()).unwrap();
        for (x, (&u, &h)) in t.u_star.iter().zip(&t.h).enumerate() {
            assert!((u - 1.0).abs() < 1e-13);
            assert!((h - (x as f64 + 1.0)).abs() < 1e-12);
        }
        for (a, b) in t.h.iter().zip(&t.h_tilde) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!((c1(&d, &mu) - 1.0 / std::f64::consts::PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn skew_potential_values() {
        let d = skew_walk();
        let mu = ladder_height_law(&d, LadderConfig::default()).unwrap();
        let u = potential(&mu, 40);
        assert!((u[1] - 0.5).abs() < 1e-12);
        assert!((u[2] - 0.75).abs() < 1e-12);
        // renewal theorem: U*(-w) -> 1 / E[-S(l_1)]
        assert!((u[40] - 2.0 / 3.0).abs() < 1e-9);
        assert!(u.iter().all(|&v| v > 0.0 && v <= 1.0 + 1e-15));
        let h = renewal_function(&u);
        assert_eq!(h[0], 1.0);
        assert!(h.windows(2).all(|w| w[1] >= w[0]));
        let expected_c1 = 1.5 / (1.2f64.sqrt() * (2.0 * std::f64::consts::PI).sqrt());
        assert!((c1(&d, &mu) - expected_c1).abs() < 1e-12);
    }

    #[test]
    fn renewal_sequence_by_hand() {
        let u = ladder_epoch_renewal(&lazy_walk(), 2, DpBudget::default()).unwrap();
        assert_eq!(u, vec![1.0, 0.25, 3.0 / 16.0]);
    }

    #[test]
    fn renewal_matches_convolution_powers() {
        let d = skew_walk();
        let n = 50;
        let f = crate::lattice::tau_law(&d, 0, n, DpBudget::default()).unwrap();
        let u = renewal_sequence(&f);
        // u = sum_l f^{*l}, with f^{*l} supported on [l, inf)
        let mut power = vec![0.0; n + 1];
        power[0] = 1.0;
        let mut direct = power.clone();
        for _ in 1..=n {
            let mut next = vec![0.0; n + 1];
            for (i, &a) in power.iter().enumerate() {
                for k in 1..=n - i {
                    next[i + k] += a * f[k - 1];
                }
            }
            for (dst, src) in direct.iter_mut().zip(&next) {
                *dst += src;
            }
            power = next;
        }
        for (a, b) in u.iter().zip(&direct) {
            assert!((a - b).abs() < 1e-12);
        }
        // last-renewal decomposition: sum_k u_k P[tau > n - k] = 1
        let fp = crate::lattice::first_passage(&d, 0, n, DpBudget::default()).unwrap();
        let total: f64 = (0..=n).map(|k| u[k] * fp.tail[n - k]).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }
}
