//! The verification suite. Each check turns one limit statement into a
//! [`ConvergenceReport`] whose verdicts compare against the configured
//! tolerances; the references are the stated limits, evaluated as written.

use std::f64::consts::PI;

use rwalk_core::kernel::{
    build_reflection_kernel, reflection_time_kernels, renewal_operators_t, sigma_hat, sigma_limit_check, sigma_tilde,
    spectral_report, stationary_nu_eig, PowerConfig, SigmaCheck,
};
use rwalk_core::lattice::{
    bridge_expectation, first_passage, ladder_epoch_renewal, meander_expectation, tau_law, DpBudget, LadderConfig,
};
use rwalk_core::limit_laws::{
    bridge_expectation_limit, half_normal_expectation, rayleigh_expectation, reflected_bm_expectation, self_checks,
    QuadratureSpec,
};
use rwalk_core::montecarlo::{estimate_fdd, ks_against_half_normal, modulus_scan, simulate, SimPlan};
use rwalk_core::report::gaps_non_increasing;
use rwalk_core::{ConvergenceReport, FluctuationTables, Result, StepDistribution};

use crate::config::RunConfig;

/// Check names in the order `verify-all` runs them.
pub const ALL: [&str; 11] = [
    "laws",
    "tau_tail",
    "tau_local",
    "ladder_renewal",
    "meander",
    "bridge",
    "spectral",
    "sigma",
    "sigma_split",
    "fdd",
    "modulus",
];

pub fn run(name: &str, d: &StepDistribution, cfg: &RunConfig) -> Result<ConvergenceReport> {
    match name {
        "laws" => laws(cfg),
        "tau_tail" => tau_tail(d, cfg),
        "tau_local" => tau_local(d, cfg),
        "ladder_renewal" => ladder_renewal(d, cfg),
        "meander" => meander(d, cfg),
        "bridge" => bridge(d, cfg),
        "spectral" => spectral(d, cfg),
        "sigma" => sigma(d, cfg),
        "sigma_split" => sigma_split(d, cfg),
        "fdd" => fdd(d, cfg),
        "modulus" => modulus(d, cfg),
        other => Err(rwalk_core::Error::Domain(format!("unknown check `{other}`"))),
    }
}

fn tables(d: &StepDistribution, x_max: usize) -> Result<FluctuationTables> {
    let x_max = x_max.max(d.max_down_jump()).max(64);
    FluctuationTables::compute(d, x_max, 1, LadderConfig::default(), DpBudget::default())
}

fn last(v: &[f64]) -> f64 {
    v.last().copied().unwrap_or(f64::INFINITY)
}

fn limit_verdict(r: &mut ConvergenceReport, label: &str, gaps: &[f64], n: usize, tol: f64) {
    let gap = last(gaps);
    r.verdict(
        format!("{label} limit"),
        gap <= tol,
        format!("relative gap {gap:.4e} at n = {n}, tolerance {tol}"),
    );
}

pub fn laws(cfg: &RunConfig) -> Result<ConvergenceReport> {
    self_checks(QuadratureSpec::with_tol(cfg.tol.quadrature))
}

/// `sqrt(n) P[tau(x) > n]` against `c1 h(x)`.
pub fn tau_tail(d: &StepDistribution, cfg: &RunConfig) -> Result<ConvergenceReport> {
    let t = tables(d, cfg.passage_x.iter().copied().max().unwrap_or(0))?;
    let n_max = *cfg.passage_scales.last().unwrap();
    let mut r = ConvergenceReport::new("tau_tail");
    for &x in &cfg.passage_x {
        let fp = first_passage(d, x, n_max, DpBudget::default())?;
        let label = format!("x={x}");
        let reference = t.c1 * t.h[x];
        let gaps: Vec<f64> = cfg
            .passage_scales
            .iter()
            .map(|&n| r.push(&label, n, (n as f64).sqrt() * fp.tail[n], reference).rel_gap)
            .collect();
        limit_verdict(&mut r, &label, &gaps, n_max, cfg.tol.tau_tail);
        if gaps.len() > 1 {
            let (prev, now) = (gaps[gaps.len() - 2], last(&gaps));
            r.verdict(
                format!("{label} improving"),
                now < prev,
                format!("relative gap {now:.4e} against {prev:.4e} at the previous scale"),
            );
        }
    }
    Ok(r)
}

/// `n^{3/2} P[tau(x) = n]` against `c1 h(x) / 2`.
pub fn tau_local(d: &StepDistribution, cfg: &RunConfig) -> Result<ConvergenceReport> {
    let t = tables(d, cfg.passage_x.iter().copied().max().unwrap_or(0))?;
    let n_max = *cfg.passage_scales.last().unwrap();
    let mut r = ConvergenceReport::new("tau_local");
    for &x in &cfg.passage_x {
        let tau = tau_law(d, x, n_max, DpBudget::default())?;
        let label = format!("x={x}");
        let reference = t.c1 * t.h[x] / 2.0;
        let gaps: Vec<f64> = cfg
            .passage_scales
            .iter()
            .map(|&n| r.push(&label, n, (n as f64).powf(1.5) * tau[n - 1], reference).rel_gap)
            .collect();
        limit_verdict(&mut r, &label, &gaps, n_max, cfg.tol.tau_local);
    }
    Ok(r)
}

/// `sqrt(n) u_n` against `1 / (c1 pi)`.
pub fn ladder_renewal(d: &StepDistribution, cfg: &RunConfig) -> Result<ConvergenceReport> {
    let t = tables(d, 0)?;
    let n_max = *cfg.renewal_scales.last().unwrap();
    let u = ladder_epoch_renewal(d, n_max, DpBudget::default())?;
    let reference = 1.0 / (t.c1 * PI);
    let mut r = ConvergenceReport::new("ladder_renewal");
    let gaps: Vec<f64> = cfg
        .renewal_scales
        .iter()
        .map(|&n| r.push("u", n, (n as f64).sqrt() * u[n], reference).rel_gap)
        .collect();
    limit_verdict(&mut r, "u", &gaps, n_max, cfg.tol.renewal);
    Ok(r)
}

/// Exact conditioned mean of `min(u, 10)` from 0 against the Rayleigh law.
pub fn meander(d: &StepDistribution, cfg: &RunConfig) -> Result<ConvergenceReport> {
    let cap = |u: f64| u.min(10.0);
    let reference = rayleigh_expectation(cap, QuadratureSpec::with_tol(cfg.tol.quadrature))?;
    let n = cfg.conditioned_n;
    let mut r = ConvergenceReport::new("meander");
    let gaps: Vec<f64> = [n / 4, n / 2, n]
        .into_iter()
        .filter(|&m| m > 0)
        .map(|m| Ok(r.push("x=0", m, meander_expectation(d, 0, m, cap)?, reference).rel_gap))
        .collect::<Result<_>>()?;
    limit_verdict(&mut r, "x=0", &gaps, n, cfg.tol.meander);
    Ok(r)
}

/// Exact bridge mean of `min(u, 2)` from 0 to 0 against the excursion law.
pub fn bridge(d: &StepDistribution, cfg: &RunConfig) -> Result<ConvergenceReport> {
    let cap = |u: f64| u.min(2.0);
    let (s, t) = cfg.bridge_times;
    let reference = bridge_expectation_limit(cap, s, t, QuadratureSpec::with_tol(cfg.tol.quadrature))?;
    let n = cfg.conditioned_n;
    let mut r = ConvergenceReport::new("bridge");
    let label = format!("x=0;y=0;s={s};t={t}");
    let gaps: Vec<f64> = [n / 4, n / 2, n]
        .into_iter()
        .filter(|&m| m > 0)
        .map(|m| {
            Ok(r.push(&label, m, bridge_expectation(d, 0, 0, s, t, m, cap)?, reference)
                .rel_gap)
        })
        .collect::<Result<_>>()?;
    limit_verdict(&mut r, &label, &gaps, n, cfg.tol.bridge);
    Ok(r)
}

/// Leading eigenvalue, deflated radius and stationarity of the reflection
/// kernel.
pub fn spectral(d: &StepDistribution, cfg: &RunConfig) -> Result<ConvergenceReport> {
    let t = tables(d, 0)?;
    let k = build_reflection_kernel(&t, t.x_max(), d.max_down_jump())?;
    let nu = stationary_nu_eig(&k, PowerConfig::default())?;
    let s = spectral_report(&k, &nu, PowerConfig::default())?;
    let tol = &cfg.tol;
    let mut r = ConvergenceReport::new("spectral");
    let gap1 = r.push("lambda1", 0, s.lambda1, 1.0).abs_gap;
    r.push("lambda2_modulus", 0, s.lambda2_modulus, 0.0);
    r.push("nu_residual", 0, nu.residual, 0.0);
    r.verdict(
        "lambda1",
        gap1 <= tol.lambda1,
        format!("|lambda1 - 1| = {gap1:.3e}, tolerance {}", tol.lambda1),
    );
    r.verdict(
        "simple",
        s.lambda2_modulus <= 1.0 - tol.gap,
        format!("deflated radius {:.6e}, bound 1 - {}", s.lambda2_modulus, tol.gap),
    );
    r.verdict(
        "nu residual",
        nu.residual <= tol.nu_residual,
        format!("||nu R - nu||_1 = {:.3e}, tolerance {}", nu.residual, tol.nu_residual),
    );
    Ok(r)
}

/// `sqrt(n) Sigma_n(x, y)` against `nu(y) / (pi c1 nu(h))`.
pub fn sigma(d: &StepDistribution, cfg: &RunConfig) -> Result<ConvergenceReport> {
    let x_top = cfg.sigma_x.iter().copied().max().unwrap_or(0);
    let t = tables(d, x_top)?;
    let k = build_reflection_kernel(&t, t.x_max(), d.max_down_jump())?;
    let nu = stationary_nu_eig(&k, PowerConfig::default())?;
    let n_max = *cfg.sigma_scales.last().unwrap();
    let mut ops = reflection_time_kernels(d, x_top.max(d.max_down_jump()), n_max, DpBudget::default())?;
    renewal_operators_t(&mut ops)?;
    let tol = SigmaCheck {
        rel_tol: cfg.tol.sigma,
        x_agreement: cfg.tol.sigma_x,
        noise_factor: cfg.tol.noise_factor,
    };
    sigma_limit_check(
        &ops,
        &nu,
        &t.h,
        t.c1,
        &cfg.sigma_x,
        &cfg.sigma_y,
        &cfg.sigma_scales,
        tol,
    )
}

/// The split-time sums against `1 / (pi sqrt(s (t - s)))` and
/// `1 / (2 pi sqrt(s (t - s)^3))`, with gaps decreasing in `n`.
pub fn sigma_split(d: &StepDistribution, cfg: &RunConfig) -> Result<ConvergenceReport> {
    let (s, t) = cfg.split_times;
    let n_max = *cfg.split_scales.last().unwrap();
    let x_top = cfg.sigma_x.iter().copied().max().unwrap_or(0);
    let horizon = (n_max as f64 * t).floor() as usize;
    let mut ops = reflection_time_kernels(d, x_top.max(d.max_down_jump()), horizon, DpBudget::default())?;
    renewal_operators_t(&mut ops)?;
    let hat_ref = 1.0 / (PI * (s * (t - s)).sqrt());
    let tilde_ref = 1.0 / (2.0 * PI * (s * (t - s).powi(3)).sqrt());
    let mut r = ConvergenceReport::new("sigma_split");
    for &x in &cfg.sigma_x {
        for (kind, reference, tol) in [
            ("hat", hat_ref, cfg.tol.sigma_hat),
            ("tilde", tilde_ref, cfg.tol.sigma_tilde),
        ] {
            let label = format!("{kind};x={x}");
            let mut gaps = Vec::new();
            for &n in &cfg.split_scales {
                let value = if kind == "hat" {
                    sigma_hat(&ops, x, s, t, n)?
                } else {
                    sigma_tilde(&ops, x, s, t, n)?
                };
                gaps.push(r.push(&label, n, value, reference).rel_gap);
            }
            limit_verdict(&mut r, &label, &gaps, n_max, tol);
            r.verdict(
                format!("{label} monotone"),
                gaps_non_increasing(&gaps, 1.0),
                format!("relative gaps {gaps:?}"),
            );
        }
    }
    Ok(r)
}

/// Monte Carlo laws of the rescaled reflected walk at one and two times.
pub fn fdd(d: &StepDistribution, cfg: &RunConfig) -> Result<ConvergenceReport> {
    let (s, t) = cfg.pair_times;
    let mut times = vec![s, t, 1.0];
    times.dedup();
    let mut plan = SimPlan::new(d.clone(), cfg.mc_n, cfg.mc_paths, cfg.seed);
    plan.times = times;
    plan.workers = cfg.workers;
    let samples = simulate(&plan)?;
    let at = |u: f64| plan.times.iter().position(|&v| v == u).unwrap();
    let (i_s, i_t, i_1) = (at(s), at(t), at(1.0));
    let spec = QuadratureSpec::with_tol(cfg.tol.quadrature);
    let k = cfg.tol.se_multiple;
    let n = cfg.mc_n;
    let mut r = ConvergenceReport::new("fdd");

    let ks = ks_against_half_normal(&samples, i_1, 1.0);
    r.push("ks;t=1", n, ks, 0.0);
    r.verdict(
        "ks t=1",
        ks <= cfg.tol.ks,
        format!("KS distance {ks:.4e}, tolerance {}", cfg.tol.ks),
    );

    let one = |phi: &(dyn Fn(f64) -> f64 + Sync)| {
        let phis: Vec<&(dyn Fn(f64) -> f64 + Sync)> = (0..plan.times.len())
            .map(|i| if i == i_1 { phi } else { &|_: f64| 1.0 })
            .collect();
        estimate_fdd(&samples, &phis)
    };
    let within = |r: &mut ConvergenceReport, label: &str, est: rwalk_core::montecarlo::FddEstimate, exact: f64| {
        r.push(format!("{label};mean"), n, est.mean, exact);
        r.push(format!("{label};se"), n, est.se, 0.0);
        let dev = (est.mean - exact).abs();
        r.verdict(
            label.to_string(),
            dev <= k * est.se,
            format!("|mean - exact| = {dev:.4e}, {k} se = {:.4e}", k * est.se),
        );
    };

    within(&mut r, "mean t=1", one(&|u| u)?, (2.0 / PI).sqrt());
    let cap5 = |u: f64| u.min(5.0);
    within(
        &mut r,
        "min(u;5) t=1",
        one(&cap5)?,
        half_normal_expectation(cap5, 1.0, spec)?,
    );

    let cap3 = |u: f64| u.min(3.0);
    let phis: Vec<&(dyn Fn(f64) -> f64 + Sync)> = (0..plan.times.len())
        .map(|i| {
            if i == i_s || i == i_t {
                &cap3 as &(dyn Fn(f64) -> f64 + Sync)
            } else {
                &|_: f64| 1.0
            }
        })
        .collect();
    let exact = reflected_bm_expectation(cap3, cap3, s, t, spec)?;
    within(
        &mut r,
        &format!("min(u;3) pair s={s} t={t}"),
        estimate_fdd(&samples, &phis)?,
        exact,
    );
    Ok(r)
}

/// Paths on which the reflected modulus exceeds the walk's.
pub fn modulus(d: &StepDistribution, cfg: &RunConfig) -> Result<ConvergenceReport> {
    let mut plan = SimPlan::new(d.clone(), cfg.mc_n, cfg.modulus_paths, cfg.seed);
    plan.deltas = cfg.deltas.clone();
    plan.workers = cfg.workers;
    let scan = modulus_scan(&plan)?;
    let mut r = ConvergenceReport::new("modulus");
    for (i, &delta) in scan.deltas.iter().enumerate() {
        let count = scan.violations_at(delta);
        r.push(format!("violations;delta={delta}"), cfg.mc_n, count as f64, 0.0);
        r.push(format!("max_excess;delta={delta}"), cfg.mc_n, scan.max_excess[i], 0.0);
        r.verdict(
            format!("delta={delta}"),
            count == 0,
            format!(
                "{count} of {} paths with w_X > w_S; largest excess {:.4e}",
                scan.paths, scan.max_excess[i]
            ),
        );
    }
    Ok(r)
}
