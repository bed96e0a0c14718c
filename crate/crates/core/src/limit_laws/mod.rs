//! Reference limit laws: reflected Brownian motion marginals, the meander
//! endpoint, the positive-bridge midpoint, and an integral identity used in
//! the one-dimensional limit. All integrals go through [`integrate`].

mod quadrature;

pub use quadrature::{gaussian_cutoff, integrate, Quadrature, QuadratureSpec};

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::report::ConvergenceReport;

fn require(ok: bool, what: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Domain(what()))
    }
}

fn gauss(x: f64, var: f64) -> f64 {
    (-x * x / (2.0 * var)).exp() / (2.0 * PI * var).sqrt()
}

/// Density of `|B_t|`: `2 exp(-u^2 / 2t) / sqrt(2 pi t)`.
pub fn half_normal_density(u: f64, t: f64) -> Result<f64> {
    require(t > 0.0 && u >= 0.0, || {
        format!("need t > 0, u >= 0; got u = {u}, t = {t}")
    })?;
    Ok(2.0 * gauss(u, t))
}

/// `P[|B_t| <= u] = erf(u / sqrt(2t))`.
pub fn half_normal_cdf(u: f64, t: f64) -> Result<f64> {
    require(t > 0.0 && u >= 0.0, || {
        format!("need t > 0, u >= 0; got u = {u}, t = {t}")
    })?;
    Ok(libm::erf(u / (2.0 * t).sqrt()))
}

/// Endpoint density `z exp(-z^2 / 2)` of the Brownian meander.
pub fn rayleigh_meander_density(z: f64) -> Result<f64> {
    require(z >= 0.0, || format!("need z >= 0, got {z}"))?;
    Ok(z * (-z * z / 2.0).exp())
}

/// Joint density of `(|B_s|, |B_t|)`:
/// `exp(-y^2/2s) (exp(-(z-y)^2/2(t-s)) + exp(-(z+y)^2/2(t-s))) / (pi sqrt(s(t-s)))`.
pub fn reflected_bm_joint_density(y: f64, z: f64, s: f64, t: f64) -> Result<f64> {
    require(0.0 < s && s < t && y >= 0.0 && z >= 0.0, || {
        format!("need 0 < s < t and y, z >= 0; got y = {y}, z = {z}, s = {s}, t = {t}")
    })?;
    Ok(joint_unchecked(y, z, s, t))
}

fn joint_unchecked(y: f64, z: f64, s: f64, t: f64) -> f64 {
    let d = t - s;
    let image = (-(z - y).powi(2) / (2.0 * d)).exp() + (-(z + y).powi(2) / (2.0 * d)).exp();
    (-y * y / (2.0 * s)).exp() * image / (PI * (s * d).sqrt())
}

/// Density at `v` of the value at time `s` of a Brownian excursion of length
/// `t`: `2 v^2 exp(-v^2 / 2a) / sqrt(2 pi a^3)` with `a = s(t-s)/t`.
///
/// This is the limit of the rescaled position at time `[ns]` of a walk
/// conditioned to stay non-negative up to `[nt]` and to end at a fixed level.
pub fn bridge_marginal_density(v: f64, s: f64, t: f64) -> Result<f64> {
    require(0.0 < s && s < t && v >= 0.0, || {
        format!("need 0 < s < t and v >= 0; got v = {v}, s = {s}, t = {t}")
    })?;
    Ok(bridge_unchecked(v, bridge_scale(s, t)))
}

fn bridge_scale(s: f64, t: f64) -> f64 {
    s * (t - s) / t
}

fn bridge_unchecked(v: f64, a: f64) -> f64 {
    2.0 * v * v * (-v * v / (2.0 * a)).exp() / (2.0 * PI * a.powi(3)).sqrt()
}

/// `E[phi(|B_t|)]`.
pub fn half_normal_expectation<F: Fn(f64) -> f64>(phi: F, t: f64, spec: QuadratureSpec) -> Result<f64> {
    require(t > 0.0, || format!("need t > 0, got {t}"))?;
    Ok(integrate(|u| phi(u) * 2.0 * gauss(u, t), 0.0, gaussian_cutoff(t), spec)?.value)
}

/// `E[phi(L)]` for the meander endpoint `L`.
pub fn rayleigh_expectation<F: Fn(f64) -> f64>(phi: F, spec: QuadratureSpec) -> Result<f64> {
    let upper = gaussian_cutoff(1.0);
    Ok(integrate(|z| phi(z) * z * (-z * z / 2.0).exp(), 0.0, upper, spec)?.value)
}

/// Expectation of `phi` under [`bridge_marginal_density`].
pub fn bridge_expectation_limit<F: Fn(f64) -> f64>(phi: F, s: f64, t: f64, spec: QuadratureSpec) -> Result<f64> {
    require(0.0 < s && s < t, || format!("need 0 < s < t, got s = {s}, t = {t}"))?;
    let a = bridge_scale(s, t);
    Ok(integrate(|v| phi(v) * bridge_unchecked(v, a), 0.0, gaussian_cutoff(a), spec)?.value)
}

/// `E[phi1(|B_s|) phi2(|B_t|)]` by nested quadrature of the joint density.
pub fn reflected_bm_expectation<F, G>(phi1: F, phi2: G, s: f64, t: f64, spec: QuadratureSpec) -> Result<f64>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    require(0.0 < s && s < t, || format!("need 0 < s < t, got s = {s}, t = {t}"))?;
    let y_max = gaussian_cutoff(s);
    let z_width = gaussian_cutoff(t - s);
    let inner_spec = QuadratureSpec {
        abs_tol: spec.abs_tol / (4.0 * y_max),
        ..spec
    };
    let failure = std::cell::Cell::new(None);
    let outer = integrate(
        |y| {
            let inner = integrate(|z| phi2(z) * joint_unchecked(y, z, s, t), 0.0, y + z_width, inner_spec);
            match inner {
                Ok(q) => phi1(y) * q.value,
                Err(e) => {
                    failure.set(Some(e.to_string()));
                    0.0
                }
            }
        },
        0.0,
        y_max,
        QuadratureSpec {
            abs_tol: spec.abs_tol / 2.0,
            ..spec
        },
    )?;
    if let Some(msg) = failure.into_inner() {
        return Err(Error::Domain(format!("inner quadrature failed: {msg}")));
    }
    Ok(outer.value)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
}

/// `int_0^inf t^{-1/2} exp(-alpha t - beta / t) dt = sqrt(pi / alpha) exp(-2 sqrt(alpha beta))`.
///
/// The left side is integrated after substituting `t = u^2`, which turns it
/// into the smooth `int_0^inf 2 exp(-alpha u^2 - beta / u^2) du`.
pub fn imk_identity(alpha: f64, beta: f64, spec: QuadratureSpec) -> Result<IdentityCheck> {
    require(alpha > 0.0 && beta > 0.0, || {
        format!("need alpha, beta > 0; got alpha = {alpha}, beta = {beta}")
    })?;
    let upper = gaussian_cutoff(0.5 / alpha);
    let lhs = integrate(
        |u| {
            if u == 0.0 {
                0.0
            } else {
                2.0 * (-alpha * u * u - beta / (u * u)).exp()
            }
        },
        0.0,
        upper,
        spec,
    )?
    .value;
    let rhs = (PI / alpha).sqrt() * (-2.0 * (alpha * beta).sqrt()).exp();
    Ok(IdentityCheck {
        lhs,
        rhs,
        gap: (lhs - rhs).abs(),
    })
}

/// Normalizations, moments, the integral identity at three points, and the
/// consistency of the joint density with its marginal and with the image
/// construction of the `|B|` transition kernel.
pub fn self_checks(spec: QuadratureSpec) -> Result<ConvergenceReport> {
    let mut report = ConvergenceReport::new("limit_laws");
    let tol = spec.abs_tol;
    let check = |report: &mut ConvergenceReport, label: &str, value: f64, reference: f64, tol: f64| {
        let gap = report.push(label, 0, value, reference).abs_gap;
        report.verdict(label, gap <= tol, format!("gap {gap:.3e}, tolerance {tol:.1e}"));
    };

    check(
        &mut report,
        "half_normal mass",
        half_normal_expectation(|_| 1.0, 1.0, spec)?,
        1.0,
        1e-12f64.max(tol),
    );
    check(
        &mut report,
        "half_normal mean",
        half_normal_expectation(|u| u, 1.0, spec)?,
        (2.0 / PI).sqrt(),
        tol,
    );
    check(
        &mut report,
        "rayleigh mass",
        rayleigh_expectation(|_| 1.0, spec)?,
        1.0,
        tol,
    );
    check(
        &mut report,
        "rayleigh mean",
        rayleigh_expectation(|z| z, spec)?,
        (PI / 2.0).sqrt(),
        tol,
    );
    check(
        &mut report,
        "bridge mass",
        bridge_expectation_limit(|_| 1.0, 0.5, 1.0, spec)?,
        1.0,
        1e-9,
    );
    check(
        &mut report,
        "joint mass",
        reflected_bm_expectation(|_| 1.0, |_| 1.0, 0.25, 0.75, spec)?,
        1.0,
        1e-9,
    );

    for (alpha, beta) in [(1.0, 1.0), (0.5, 2.0), (3.0, 0.25)] {
        let id = imk_identity(alpha, beta, spec)?;
        check(&mut report, &format!("imk({alpha},{beta})"), id.lhs, id.rhs, 1e-10);
    }

    // marginal of the joint law in y is the half-normal law at time s
    let (s, t) = (0.3, 0.8);
    let mut worst_marginal = 0.0f64;
    let mut worst_image = 0.0f64;
    for i in 0..20 {
        let y = 0.15 * i as f64;
        let marginal = integrate(
            |z| joint_unchecked(y, z, s, t),
            0.0,
            y + gaussian_cutoff(t - s),
            QuadratureSpec::with_tol(1e-12),
        )?
        .value;
        worst_marginal = worst_marginal.max((marginal - half_normal_density(y, s)?).abs());

        let z = 0.1 + 0.17 * i as f64;
        let transition = gauss(z - y, t - s) + gauss(z + y, t - s);
        let image = half_normal_density(y, s)? * transition;
        worst_image = worst_image.max((image - joint_unchecked(y, z, s, t)).abs());
    }
    check(&mut report, "joint marginal", worst_marginal, 0.0, 1e-8);
    check(&mut report, "joint image construction", worst_image, 0.0, 1e-12);
    Ok(report)
}
