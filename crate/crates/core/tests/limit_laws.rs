use rwalk_core::lattice::{bridge_expectation, meander_expectation};
use rwalk_core::limit_laws::{
    bridge_expectation_limit, bridge_marginal_density, half_normal_cdf, half_normal_density, half_normal_expectation,
    imk_identity, integrate, rayleigh_expectation, rayleigh_meander_density, reflected_bm_expectation,
    reflected_bm_joint_density, self_checks, QuadratureSpec,
};
use rwalk_core::step_dist::lazy_walk;
use rwalk_core::Error;

const PI: f64 = std::f64::consts::PI;

fn spec() -> QuadratureSpec {
    QuadratureSpec::default()
}

#[test]
fn half_normal_law() {
    assert!((half_normal_density(0.0, 1.0).unwrap() - 2.0 / (2.0 * PI).sqrt()).abs() < 1e-15);
    assert!((half_normal_expectation(|_| 1.0, 1.0, spec()).unwrap() - 1.0).abs() < 1e-12);
    for t in [0.25, 1.0, 3.0] {
        let mean = half_normal_expectation(|u| u, t, spec()).unwrap();
        assert!((mean - (2.0 * t / PI).sqrt()).abs() < 1e-10, "t={t}");
    }
    // the CDF is the integral of the density
    for u in [0.1, 0.7, 1.5, 3.0] {
        let q = integrate(|v| half_normal_density(v, 2.0).unwrap(), 0.0, u, spec()).unwrap();
        assert!((q.value - half_normal_cdf(u, 2.0).unwrap()).abs() < 1e-12);
    }
    assert!(half_normal_density(-1.0, 1.0).is_err());
    assert!(half_normal_cdf(1.0, 0.0).is_err());
}

#[test]
fn rayleigh_law() {
    assert!((rayleigh_expectation(|_| 1.0, spec()).unwrap() - 1.0).abs() < 1e-10);
    assert!((rayleigh_expectation(|z| z, spec()).unwrap() - (PI / 2.0).sqrt()).abs() < 1e-10);
    let f = |z: f64| rayleigh_meander_density(z).unwrap();
    assert!(f(1.0) > f(0.999) && f(1.0) > f(1.001));
    assert!(rayleigh_meander_density(-0.5).is_err());
}

#[test]
fn joint_law_of_reflected_brownian_motion() {
    let (s, t) = (0.25f64, 0.75f64);
    let mass = reflected_bm_expectation(|_| 1.0, |_| 1.0, s, t, spec()).unwrap();
    assert!((mass - 1.0).abs() < 1e-9);

    // integrating out y leaves the law of |B_t|
    let cap = |u: f64| u.min(3.0);
    let lhs = reflected_bm_expectation(|_| 1.0, cap, s, t, spec()).unwrap();
    let rhs = half_normal_expectation(cap, t, spec()).unwrap();
    assert!((lhs - rhs).abs() < 1e-9);

    // E|X||Y| for a centred Gaussian pair with correlation r is
    // (2/pi) sd_X sd_Y (sqrt(1 - r^2) + r asin r)
    let r = (s / t).sqrt();
    let closed = 2.0 / PI * (s * t).sqrt() * ((1.0 - r * r).sqrt() + r * r.asin());
    let quad = reflected_bm_expectation(|y| y, |z| z, s, t, spec()).unwrap();
    assert!((quad - closed).abs() < 1e-8, "{quad} vs {closed}");

    // image construction: Gaussian at y for |B_s| times the reflected
    // transition density of |B| over t - s
    let g = |x: f64, var: f64| (-x * x / (2.0 * var)).exp() / (2.0 * PI * var).sqrt();
    for i in 0..20 {
        let (y, z) = (0.1 + 0.13 * i as f64, 1.7 - 0.08 * i as f64);
        let image = 2.0 * g(y, s) * (g(z - y, t - s) + g(z + y, t - s));
        let got = reflected_bm_joint_density(y, z, s, t).unwrap();
        assert!((got - image).abs() < 1e-12 * image.max(1.0));
    }
    assert!(reflected_bm_joint_density(1.0, 1.0, 0.5, 0.5).is_err());
}

#[test]
fn bridge_marginal_law() {
    for (s, t) in [(0.5, 1.0), (0.2, 0.9), (0.7, 0.8)] {
        let mass = bridge_expectation_limit(|_| 1.0, s, t, spec()).unwrap();
        assert!((mass - 1.0).abs() < 1e-9, "s={s} t={t}");
    }
    assert!(bridge_marginal_density(1.0, 0.5, 0.5).is_err());
    assert!(bridge_marginal_density(1.0, 0.6, 0.5).is_err());
}

#[test]
fn exact_conditioned_walks_approach_their_limits() {
    let d = lazy_walk();
    let meander = meander_expectation(&d, 0, 2048, |u| u.min(10.0)).unwrap();
    assert!((meander / (PI / 2.0).sqrt() - 1.0).abs() <= 0.03, "{meander}");

    let cap = |u: f64| u.min(2.0);
    let bridge = bridge_expectation(&d, 0, 0, 0.5, 1.0, 2048, cap).unwrap();
    let limit = bridge_expectation_limit(cap, 0.5, 1.0, spec()).unwrap();
    assert!((bridge / limit - 1.0).abs() <= 0.05, "{bridge} vs {limit}");
}

#[test]
fn integral_identity() {
    let id = imk_identity(1.0, 1.0, spec()).unwrap();
    assert!((id.rhs - PI.sqrt() * (-2.0f64).exp()).abs() < 1e-15);
    assert!((id.rhs - 0.239_875_543_936_122_9).abs() < 1e-15);
    for (alpha, beta) in [(1.0, 1.0), (0.5, 2.0), (3.0, 0.25)] {
        let id = imk_identity(alpha, beta, spec()).unwrap();
        assert!(id.gap <= 1e-10, "({alpha}, {beta}): {:e}", id.gap);
    }
    let id = imk_identity(2.0, 1e-14, spec()).unwrap();
    assert!((id.rhs - (PI / 2.0).sqrt()).abs() < 1e-6);
    assert!(imk_identity(0.0, 1.0, spec()).is_err());
}

#[test]
fn unreachable_quadrature_tolerance_fails() {
    let tight = QuadratureSpec {
        abs_tol: 1e-15,
        max_subdivisions: 2,
    };
    assert!(matches!(
        imk_identity(0.5, 2.0, tight),
        Err(Error::QuadratureFailure { .. })
    ));
}

#[test]
fn bundled_self_checks_pass() {
    let report = self_checks(spec()).unwrap();
    assert!(report.passed(), "{:?}", report.verdicts);
    assert!(report.verdicts.len() >= 10);
}
