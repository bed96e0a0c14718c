use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use rwalk_core::kernel::{
    build_reflection_kernel, compare_measures, stationary_nu_eig, stationary_nu_formula, PowerConfig,
};
use rwalk_core::lattice::{DpBudget, LadderConfig};
use rwalk_core::limit_laws::{imk_identity, self_checks, QuadratureSpec};
use rwalk_core::montecarlo::{estimate_fdd, ks_against_half_normal, simulate, SimPlan};
use rwalk_core::{ConvergenceReport, Error as CoreError, FluctuationTables, StepDistribution};
use serde_json::json;

use crate::checks;
use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::{Cli, Command, LawCheck};

pub fn dispatch(cli: &Cli) -> Result<()> {
    let tol_scale = cli.tol_scale.unwrap_or(1.0);
    if !(tol_scale > 0.0 && tol_scale.is_finite()) {
        return Err(CliError::Config(format!(
            "--tol-scale must be positive, got {tol_scale}"
        )));
    }
    let out = || cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
    match &cli.command {
        Command::Validate => {
            let d = read_dist(cli.dist.as_deref())?;
            let report = d.validate();
            if !report.passed() {
                return Err(CliError::Validation(report.to_string()));
            }
            print!("{report}");
            Ok(())
        }
        Command::Fluctuations { x_max, horizon } => {
            let d = load_dist(cli.dist.as_deref())?;
            fluctuations(&d, *x_max, *horizon, &out())
        }
        Command::Kernel {
            x,
            scales,
            split_scales,
        } => {
            let d = load_dist(cli.dist.as_deref())?;
            let cfg = RunConfig {
                sigma_x: x.clone(),
                sigma_scales: scales.clone(),
                split_scales: split_scales.clone(),
                tol: RunConfig::default().tol.scaled(tol_scale),
                ..RunConfig::default()
            };
            cfg.validate()?;
            kernel(&d, &cfg, &out())
        }
        Command::Simulate {
            n,
            paths,
            times,
            x0,
            workers,
        } => {
            let d = load_dist(cli.dist.as_deref())?;
            let mut plan = SimPlan::new(d, *n, *paths, cli.seed.unwrap_or(42));
            plan.times = times.clone();
            plan.x0 = *x0;
            plan.workers = *workers;
            plan.validate().map_err(|e| CliError::Config(e.to_string()))?;
            simulate_cmd(&plan, &out())
        }
        Command::Laws { check } => laws(*check, QuadratureSpec::with_tol(1e-10 * tol_scale)),
        Command::VerifyAll { config } => {
            let mut cfg = match config {
                Some(path) => RunConfig::from_file(path)?,
                None => RunConfig::default(),
            };
            if let Some(d) = &cli.dist {
                cfg.dist = d.clone();
            }
            if let Some(o) = &cli.out {
                cfg.out = o.clone();
            }
            if let Some(s) = cli.seed {
                cfg.seed = s;
            }
            cfg.tol = cfg.tol.scaled(tol_scale);
            if cfg.dist.as_os_str().is_empty() {
                return Err(CliError::Config(
                    "no step law: pass --dist or set `dist` under [run]".into(),
                ));
            }
            let bundle = verify_all(&cfg)?;
            for r in &bundle.reports {
                print_verdicts(r);
            }
            let (failed, total) = bundle.counts();
            println!("{} of {total} verdicts passed", total - failed);
            if failed > 0 {
                return Err(CliError::Failed(format!("{failed} of {total} verdicts failed")));
            }
            Ok(())
        }
    }
}

/// Reads a step law without checking its assumptions.
pub fn read_dist(path: Option<&Path>) -> Result<StepDistribution> {
    let path = path.ok_or_else(|| CliError::Config("--dist is required".into()))?;
    StepDistribution::from_file(path).map_err(|e| match e {
        CoreError::Io(io) => CliError::Config(format!("cannot read {}: {io}", path.display())),
        CoreError::Parse { .. } => CliError::Config(e.to_string()),
        other => CliError::Validation(format!("{}: {other}", path.display())),
    })
}

/// Reads a step law and rejects it unless every assumption holds.
pub fn load_dist(path: Option<&Path>) -> Result<StepDistribution> {
    let d = read_dist(path)?;
    let report = d.validate();
    if !report.passed() {
        return Err(CliError::Validation(report.to_string()));
    }
    Ok(d)
}

pub fn write(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    let path = dir.join(name);
    let wrap = |source| CliError::Output {
        path: path.display().to_string(),
        source,
    };
    std::fs::create_dir_all(dir).map_err(wrap)?;
    std::fs::write(&path, contents).map_err(wrap)?;
    Ok(path)
}

fn core(check: &str) -> impl FnOnce(CoreError) -> CliError + '_ {
    move |source| CliError::Check {
        check: check.to_string(),
        source,
    }
}

fn unix_time() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

fn print_verdicts(report: &ConvergenceReport) {
    for v in &report.verdicts {
        let mark = if v.passed { "PASS" } else { "FAIL" };
        println!("{mark} {}: {}: {}", report.title, v.name, v.detail);
    }
}

fn fluctuations(d: &StepDistribution, x_max: usize, horizon: usize, out: &Path) -> Result<()> {
    let t = FluctuationTables::compute(d, x_max, horizon, LadderConfig::default(), DpBudget::default())
        .map_err(core("fluctuations"))?;
    let mut tables = String::from("x,mu_star,u_star,h,h_tilde\n");
    for x in 0..=x_max {
        let mu = if x == 0 { 0.0 } else { t.mu_star.get(-(x as i64)) };
        let _ = writeln!(tables, "{x},{mu:e},{:e},{:e},{:e}", t.u_star[x], t.h[x], t.h_tilde[x]);
    }
    let mut passage = String::from("n,tau_point,tau_tail,u\n");
    for n in 0..=horizon {
        let _ = writeln!(passage, "{n},{:e},{:e},{:e}", t.tau0_law[n], t.tau0_tail[n], t.u[n]);
    }
    write(out, "tables.csv", &tables)?;
    write(out, "passage.csv", &passage)?;
    println!("E[-S(l_1)] = {}", -t.mu_star.mean());
    println!("c1 = {}", t.c1);
    println!("ladder-height deficit = {:e}", t.mu_star.deficit);
    Ok(())
}

fn kernel(d: &StepDistribution, cfg: &RunConfig, out: &Path) -> Result<()> {
    let c = d.max_down_jump();
    let t = FluctuationTables::compute(d, 64.max(c), 1, LadderConfig::default(), DpBudget::default())
        .map_err(core("kernel"))?;
    let k = build_reflection_kernel(&t, t.x_max(), c).map_err(core("kernel"))?;
    let nu = stationary_nu_eig(&k, PowerConfig::default()).map_err(core("kernel"))?;
    let formula = stationary_nu_formula(&t.mu_star);
    let cmp = compare_measures(&k, &nu, &formula);

    let mut kcsv = String::from("x,y,value,row_deficit\n");
    for x in 0..k.rows() {
        for y in 0..k.cols() {
            let _ = writeln!(kcsv, "{x},{y},{:e},{:e}", k.get(x, y), k.row_deficit[x]);
        }
    }
    let mut ncsv = String::from("y,eigenvector,formula_raw,formula_normalized\n");
    for y in 0..=c {
        let _ = writeln!(
            ncsv,
            "{y},{:e},{:e},{:e}",
            nu.get(y),
            formula.raw.get(y).copied().unwrap_or(0.0),
            formula.normalized.get(y).copied().unwrap_or(0.0)
        );
    }
    let ccsv = format!(
        "quantity,value\nl1_literal,{:e}\nmass_off_support,{:e}\nl1_on_support,{:e}\nformula_residual,{:e}\n",
        cmp.l1_literal, cmp.mass_off_support, cmp.l1_on_support, cmp.formula_residual
    );
    write(out, "kernel.csv", &kcsv)?;
    write(out, "nu.csv", &ncsv)?;
    write(out, "nu_comparison.csv", &ccsv)?;
    println!(
        "nu: eigenvector vs formula l1 = {:.3e} (formula mass off the recurrent class {:.3e}, l1 on it {:.3e})",
        cmp.l1_literal, cmp.mass_off_support, cmp.l1_on_support
    );

    let mut failed = 0;
    for name in ["spectral", "sigma", "sigma_split"] {
        let report = checks::run(name, d, cfg).map_err(core(name))?;
        write(out, &format!("{name}.csv"), &report.to_csv())?;
        write(out, &format!("{name}_verdicts.csv"), &report.verdicts_csv())?;
        print_verdicts(&report);
        failed += report.verdicts.iter().filter(|v| !v.passed).count();
    }
    if failed > 0 {
        return Err(CliError::Failed(format!("{failed} kernel verdicts failed")));
    }
    Ok(())
}

fn simulate_cmd(plan: &SimPlan, out: &Path) -> Result<()> {
    let samples = simulate(plan).map_err(core("simulate"))?;
    let mut csv = String::from("t,mean,se,ks\n");
    for (i, &t) in plan.times.iter().enumerate() {
        let phis: Vec<Box<dyn Fn(f64) -> f64 + Sync>> = (0..plan.times.len())
            .map(|j| -> Box<dyn Fn(f64) -> f64 + Sync> {
                if j == i {
                    Box::new(|u| u)
                } else {
                    Box::new(|_| 1.0)
                }
            })
            .collect();
        let phis: Vec<&(dyn Fn(f64) -> f64 + Sync)> = phis.iter().map(|b| b.as_ref()).collect();
        let est = estimate_fdd(&samples, &phis).map_err(core("simulate"))?;
        let ks = ks_against_half_normal(&samples, i, t);
        let _ = writeln!(csv, "{t},{:e},{:e},{:e}", est.mean, est.se, ks);
    }
    let path = write(out, "simulate.csv", &csv)?;
    let manifest = json!({
        "command": "simulate",
        "version": env!("CARGO_PKG_VERSION"),
        "created_unix": unix_time(),
        "plan": {
            "dist": plan.dist.atoms().map(|(k, p)| json!([k, p])).collect::<Vec<_>>(),
            "x0": plan.x0,
            "n": plan.n,
            "times": plan.times,
            "paths": plan.paths,
            "seed": plan.seed,
            "workers": plan.workers,
        },
    });
    write(out, "manifest.json", &format!("{manifest:#}\n"))?;
    print!("{csv}");
    println!("wrote {}", path.display());
    Ok(())
}

fn laws(check: LawCheck, spec: QuadratureSpec) -> Result<()> {
    let report = match check {
        LawCheck::All => self_checks(spec).map_err(core("laws"))?,
        LawCheck::Imk => {
            let mut r = ConvergenceReport::new("imk");
            for (alpha, beta) in [(1.0, 1.0), (0.5, 2.0), (3.0, 0.25)] {
                let id = imk_identity(alpha, beta, spec).map_err(core("laws"))?;
                let label = format!("imk({alpha};{beta})");
                r.push(&label, 0, id.lhs, id.rhs);
                r.verdict(label, id.gap <= spec.abs_tol, format!("gap {:.3e}", id.gap));
            }
            r
        }
    };
    for row in &report.rows {
        println!(
            "{:<28} value {:<24e} reference {:<24e} gap {:.3e}",
            row.label, row.value, row.reference, row.abs_gap
        );
    }
    print_verdicts(&report);
    if !report.passed() {
        return Err(CliError::Failed("identity gaps above tolerance".into()));
    }
    Ok(())
}

/// Outcome of [`verify_all`].
#[derive(Debug, Clone)]
pub struct Bundle {
    pub reports: Vec<ConvergenceReport>,
    pub summary: String,
}

impl Bundle {
    pub fn passed(&self) -> bool {
        self.reports.iter().all(ConvergenceReport::passed)
    }

    /// `(failed, total)` verdict counts.
    pub fn counts(&self) -> (usize, usize) {
        let verdicts = self.reports.iter().flat_map(|r| &r.verdicts);
        let total = verdicts.clone().count();
        (verdicts.filter(|v| !v.passed).count(), total)
    }
}

/// Runs every check on the configured step law, writing `<check>.csv`,
/// `summary.csv` and `manifest.json` to the output directory. Failed
/// verdicts are reported in the bundle, not as errors.
pub fn verify_all(cfg: &RunConfig) -> Result<Bundle> {
    let d = load_dist(Some(&cfg.dist))?;
    let mut reports = Vec::new();
    let mut summary = String::from("check,verdict,passed,detail\n");
    for name in checks::ALL {
        let report = checks::run(name, &d, cfg).map_err(core(name))?;
        write(&cfg.out, &format!("{name}.csv"), &report.to_csv())?;
        for v in &report.verdicts {
            let _ = writeln!(
                summary,
                "{name},{},{},\"{}\"",
                v.name,
                v.passed,
                v.detail.replace('"', "'")
            );
        }
        reports.push(report);
    }
    write(&cfg.out, "summary.csv", &summary)?;
    let manifest = json!({
        "command": "verify-all",
        "version": env!("CARGO_PKG_VERSION"),
        "created_unix": unix_time(),
        "dist_file": cfg.dist.display().to_string(),
        "dist": d.atoms().map(|(k, p)| json!([k, p])).collect::<Vec<_>>(),
        "seed": cfg.seed,
        "workers": cfg.workers,
        "checks": checks::ALL,
        "config": format!("{cfg:?}"),
    });
    write(&cfg.out, "manifest.json", &format!("{manifest:#}\n"))?;

    Ok(Bundle { reports, summary })
}
