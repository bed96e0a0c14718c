//! Every exact DP quantity against exhaustive path enumeration, n <= 12.

#[path = "support/brute.rs"]
mod brute;

use rwalk_core::kernel::{reflection_time_kernels, renewal_operators_t};
use rwalk_core::lattice::{bridge_expectation, meander_expectation, survival_law, tau_law, DpBudget};
use rwalk_core::step_dist::{lazy_walk, skew_walk};
use rwalk_core::StepDistribution;

const TOL: f64 = 1e-12;
const N: usize = 12;

fn walks() -> [(&'static str, StepDistribution); 2] {
    [("lazy", lazy_walk()), ("skew", skew_walk())]
}

fn atoms(d: &StepDistribution) -> Vec<(i64, f64)> {
    d.atoms().filter(|&(_, p)| p > 0.0).collect()
}

#[test]
fn survival_law_matches_enumeration() {
    for (name, d) in walks() {
        for x in [0usize, 1, 3] {
            let dp = survival_law(&d, x, N, DpBudget::default()).unwrap();
            let bf = brute::survival(&atoms(&d), x as i64, N);
            for k in 0..=N {
                let hi = dp[k].end().max(bf[k].keys().last().copied().unwrap_or(0));
                for z in -3..=hi + 1 {
                    let gap = (dp[k].get(z) - brute::get(&bf[k], z)).abs();
                    assert!(gap <= TOL, "{name} x={x} k={k} z={z}: gap {gap:e}");
                }
            }
        }
    }
}

#[test]
fn tau_law_matches_enumeration() {
    for (name, d) in walks() {
        for x in [0usize, 1, 3] {
            let dp = tau_law(&d, x, N, DpBudget::default()).unwrap();
            let bf = brute::tau(&atoms(&d), x as i64, N);
            for n in 1..=N {
                let gap = (dp[n - 1] - bf[n]).abs();
                assert!(gap <= TOL, "{name} x={x} n={n}: gap {gap:e}");
            }
        }
    }
}

#[test]
fn reflection_operators_match_enumeration() {
    for (name, d) in walks() {
        let c = d.max_down_jump();
        let x_max = 3.max(c);
        let mut ops = reflection_time_kernels(&d, x_max, N, DpBudget::default()).unwrap();
        renewal_operators_t(&mut ops).unwrap();
        for x in [0usize, 1, 3] {
            let (first, all) = brute::reflections(&atoms(&d), x as i64, N);
            for n in 1..=N {
                for y in 0..=c + 1 {
                    let r = if y < ops.cols() { ops.r[n].get(x, y) } else { 0.0 };
                    let t = if y < ops.cols() { ops.t[n].get(x, y) } else { 0.0 };
                    let gr = (r - brute::get(&first[n], y as i64)).abs();
                    let gt = (t - brute::get(&all[n], y as i64)).abs();
                    assert!(gr <= TOL, "{name} R_{n}({x},{y}): gap {gr:e}");
                    assert!(gt <= TOL, "{name} T_{n}({x},{y}): gap {gt:e}");
                }
            }
        }
    }
}

#[test]
fn meander_matches_enumeration() {
    type Phi = (&'static str, fn(f64) -> f64);
    let phis: [Phi; 3] = [("identity", |u| u), ("capped", |u| u.min(1.0)), ("square", |u| u * u)];
    for (name, d) in walks() {
        let sigma = d.moments().sigma2.sqrt();
        for x in [0usize, 1, 3] {
            for n in [1usize, 3, 7, N] {
                let scale = sigma * (n as f64).sqrt();
                for (pname, phi) in phis {
                    let dp = meander_expectation(&d, x, n, phi).unwrap();
                    let bf = brute::meander(&atoms(&d), x as i64, n, scale, phi);
                    assert!((dp - bf).abs() <= TOL, "{name} {pname} x={x} n={n}: {dp} vs {bf}");
                }
            }
        }
    }
}

#[test]
fn bridge_matches_enumeration() {
    let cases = [(0.5, 1.0), (0.25, 0.75), (0.3, 1.0)];
    for (name, d) in walks() {
        let sigma = d.moments().sigma2.sqrt();
        for x in [0usize, 1, 3] {
            for y in [0usize, 1, 2] {
                for n in [4usize, 8, N] {
                    let scale = sigma * (n as f64).sqrt();
                    for &(s, t) in &cases {
                        let mid = (n as f64 * s).floor() as usize;
                        let end = (n as f64 * t).floor() as usize;
                        let bf = brute::bridge(&atoms(&d), x as i64, y as i64, mid, end, scale, |u| u);
                        let dp = bridge_expectation(&d, x, y, s, t, n, |u| u);
                        match bf {
                            Some(bf) => {
                                let dp = dp.unwrap();
                                assert!((dp - bf).abs() <= TOL, "{name} x={x} y={y} n={n} s={s}: {dp} vs {bf}");
                            }
                            None => assert!(dp.is_err(), "{name} x={x} y={y} n={n}: expected impossible bridge"),
                        }
                    }
                }
            }
        }
    }
}
