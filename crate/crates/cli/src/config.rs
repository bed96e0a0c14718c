//! Run configuration: `key = value` lines grouped under `[section]` headers.
//! `#` and `;` start comments; lists are comma separated. Relative paths are
//! resolved against the directory of the config file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{CliError, Result};

/// Every tolerance a check compares against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub tau_tail: f64,
    pub tau_local: f64,
    pub renewal: f64,
    pub sigma: f64,
    pub sigma_x: f64,
    pub sigma_hat: f64,
    pub sigma_tilde: f64,
    pub noise_factor: f64,
    pub lambda1: f64,
    pub gap: f64,
    pub nu_residual: f64,
    pub meander: f64,
    pub bridge: f64,
    pub ks: f64,
    pub se_multiple: f64,
    pub quadrature: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            tau_tail: 0.03,
            tau_local: 0.05,
            renewal: 0.02,
            sigma: 0.05,
            sigma_x: 0.01,
            sigma_hat: 0.10,
            sigma_tilde: 0.15,
            noise_factor: 1.5,
            lambda1: 1e-9,
            gap: 1e-6,
            nu_residual: 1e-10,
            meander: 0.03,
            bridge: 0.05,
            ks: 0.02,
            se_multiple: 3.0,
            quadrature: 1e-10,
        }
    }
}

impl Tolerances {
    /// Every tolerance multiplied by `factor`; the noise factor is a ratio
    /// of gaps and stays as is.
    pub fn scaled(self, factor: f64) -> Self {
        Self {
            tau_tail: self.tau_tail * factor,
            tau_local: self.tau_local * factor,
            renewal: self.renewal * factor,
            sigma: self.sigma * factor,
            sigma_x: self.sigma_x * factor,
            sigma_hat: self.sigma_hat * factor,
            sigma_tilde: self.sigma_tilde * factor,
            noise_factor: self.noise_factor,
            lambda1: self.lambda1 * factor,
            gap: self.gap * factor,
            nu_residual: self.nu_residual * factor,
            meander: self.meander * factor,
            bridge: self.bridge * factor,
            ks: self.ks * factor,
            se_multiple: self.se_multiple * factor,
            quadrature: self.quadrature * factor,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub dist: PathBuf,
    pub out: PathBuf,
    pub seed: u64,
    pub workers: usize,

    /// Starting points and horizons for the first-passage checks.
    pub passage_x: Vec<usize>,
    pub passage_scales: Vec<usize>,
    pub renewal_scales: Vec<usize>,

    pub sigma_x: Vec<usize>,
    pub sigma_y: Vec<usize>,
    pub sigma_scales: Vec<usize>,
    /// `(s, t)` for the split-time sums.
    pub split_times: (f64, f64),
    pub split_scales: Vec<usize>,

    pub conditioned_n: usize,
    /// `(s, t)` for the bridge check, pinned at `x = y = 0`.
    pub bridge_times: (f64, f64),

    pub mc_n: usize,
    pub mc_paths: usize,
    /// Times of the two-time functional.
    pub pair_times: (f64, f64),
    pub modulus_paths: usize,
    pub deltas: Vec<f64>,

    pub tol: Tolerances,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            dist: PathBuf::new(),
            out: PathBuf::from("out"),
            seed: 42,
            workers: 1,
            passage_x: vec![0, 3],
            passage_scales: vec![1_000, 10_000],
            renewal_scales: vec![2_000, 20_000],
            sigma_x: vec![0, 3],
            sigma_y: vec![1],
            sigma_scales: vec![500, 1_000, 2_000, 5_000],
            split_times: (0.2, 0.8),
            split_scales: vec![500, 1_000, 2_000],
            conditioned_n: 2048,
            bridge_times: (0.5, 1.0),
            mc_n: 4096,
            mc_paths: 100_000,
            pair_times: (0.25, 0.75),
            modulus_paths: 10_000,
            deltas: vec![0.125, 0.03125],
            tol: Tolerances::default(),
        }
    }
}

/// Raw `section.key -> value` entries.
#[derive(Debug, Default)]
struct Ini {
    entries: BTreeMap<String, (usize, String)>,
}

impl Ini {
    fn parse(text: &str, origin: &Path) -> Result<Self> {
        let mut ini = Ini::default();
        let mut section = String::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split(['#', ';']).next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let at = || format!("{}:{}", origin.display(), idx + 1);
            if let Some(name) = line.strip_prefix('[') {
                let Some(name) = name.strip_suffix(']') else {
                    return Err(CliError::Config(format!("{}: unterminated section header", at())));
                };
                section = name.trim().to_string();
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Config(format!(
                    "{}: expected `key = value`, got `{line}`",
                    at()
                )));
            };
            let full = format!("{section}.{}", key.trim());
            if ini
                .entries
                .insert(full.clone(), (idx + 1, value.trim().to_string()))
                .is_some()
            {
                return Err(CliError::Config(format!("{}: `{full}` set twice", at())));
            }
        }
        Ok(ini)
    }

    fn take<T: FromStr>(&mut self, key: &str, origin: &Path) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        let Some((line, raw)) = self.entries.remove(key) else {
            return Ok(None);
        };
        raw.parse().map(Some).map_err(|e| {
            CliError::Config(format!(
                "{}:{line}: bad value `{raw}` for `{key}`: {e}",
                origin.display()
            ))
        })
    }

    fn take_list<T: FromStr>(&mut self, key: &str, origin: &Path) -> Result<Option<Vec<T>>>
    where
        T::Err: std::fmt::Display,
    {
        let Some((line, raw)) = self.entries.remove(key) else {
            return Ok(None);
        };
        raw.split(',')
            .map(|item| {
                let item = item.trim();
                item.parse().map_err(|e| {
                    CliError::Config(format!(
                        "{}:{line}: bad item `{item}` in `{key}`: {e}",
                        origin.display()
                    ))
                })
            })
            .collect::<Result<Vec<T>>>()
            .map(Some)
    }

    fn take_pair(&mut self, key: &str, origin: &Path) -> Result<Option<(f64, f64)>> {
        match self.take_list::<f64>(key, origin)? {
            None => Ok(None),
            Some(v) if v.len() == 2 => Ok(Some((v[0], v[1]))),
            Some(v) => Err(CliError::Config(format!("`{key}` needs two values, got {}", v.len()))),
        }
    }
}

macro_rules! set {
    ($ini:ident, $origin:ident, $target:expr, $key:literal) => {
        if let Some(v) = $ini.take($key, $origin)? {
            $target = v;
        }
    };
    ($ini:ident, $origin:ident, $target:expr, $key:literal, list) => {
        if let Some(v) = $ini.take_list($key, $origin)? {
            $target = v;
        }
    };
    ($ini:ident, $origin:ident, $target:expr, $key:literal, pair) => {
        if let Some(v) = $ini.take_pair($key, $origin)? {
            $target = v;
        }
    };
}

impl RunConfig {
    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let mut ini = Ini::parse(text, origin)?;
        let mut c = RunConfig::default();
        let o = origin;
        let dist: Option<PathBuf> = ini.take("run.dist", o)?;
        let out: Option<PathBuf> = ini.take("run.out", o)?;
        set!(ini, o, c.seed, "run.seed");
        set!(ini, o, c.workers, "run.workers");

        set!(ini, o, c.passage_x, "fluctuations.x", list);
        set!(ini, o, c.passage_scales, "fluctuations.scales", list);
        set!(ini, o, c.renewal_scales, "fluctuations.renewal_scales", list);
        set!(ini, o, c.conditioned_n, "fluctuations.conditioned_n");
        set!(ini, o, c.bridge_times, "fluctuations.bridge_times", pair);

        set!(ini, o, c.sigma_x, "kernel.x", list);
        set!(ini, o, c.sigma_y, "kernel.y", list);
        set!(ini, o, c.sigma_scales, "kernel.scales", list);
        set!(ini, o, c.split_times, "kernel.split_times", pair);
        set!(ini, o, c.split_scales, "kernel.split_scales", list);

        set!(ini, o, c.mc_n, "montecarlo.n");
        set!(ini, o, c.mc_paths, "montecarlo.paths");
        set!(ini, o, c.pair_times, "montecarlo.pair_times", pair);
        set!(ini, o, c.modulus_paths, "montecarlo.modulus_paths");
        set!(ini, o, c.deltas, "montecarlo.deltas", list);

        let t = &mut c.tol;
        set!(ini, o, t.tau_tail, "tolerances.tau_tail");
        set!(ini, o, t.tau_local, "tolerances.tau_local");
        set!(ini, o, t.renewal, "tolerances.renewal");
        set!(ini, o, t.sigma, "tolerances.sigma");
        set!(ini, o, t.sigma_x, "tolerances.sigma_x");
        set!(ini, o, t.sigma_hat, "tolerances.sigma_hat");
        set!(ini, o, t.sigma_tilde, "tolerances.sigma_tilde");
        set!(ini, o, t.noise_factor, "tolerances.noise_factor");
        set!(ini, o, t.lambda1, "tolerances.lambda1");
        set!(ini, o, t.gap, "tolerances.gap");
        set!(ini, o, t.nu_residual, "tolerances.nu_residual");
        set!(ini, o, t.meander, "tolerances.meander");
        set!(ini, o, t.bridge, "tolerances.bridge");
        set!(ini, o, t.ks, "tolerances.ks");
        set!(ini, o, t.se_multiple, "tolerances.se_multiple");
        set!(ini, o, t.quadrature, "tolerances.quadrature");

        if let Some(key) = ini.entries.keys().next() {
            return Err(CliError::Config(format!("{}: unknown key `{key}`", origin.display())));
        }
        let base = origin.parent().unwrap_or(Path::new(""));
        if let Some(d) = dist {
            c.dist = base.join(d);
        }
        if let Some(out) = out {
            c.out = base.join(out);
        }
        c.validate()?;
        Ok(c)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text, path)
    }

    pub fn validate(&self) -> Result<()> {
        let increasing = |name: &str, v: &[usize]| {
            if v.is_empty() || v[0] == 0 || !v.windows(2).all(|w| w[0] < w[1]) {
                Err(CliError::Config(format!(
                    "`{name}` must be a non-empty, strictly increasing list of positive scales, got {v:?}"
                )))
            } else {
                Ok(())
            }
        };
        increasing("fluctuations.scales", &self.passage_scales)?;
        increasing("fluctuations.renewal_scales", &self.renewal_scales)?;
        increasing("kernel.scales", &self.sigma_scales)?;
        increasing("kernel.split_scales", &self.split_scales)?;
        let ordered = |name: &str, (s, t): (f64, f64), t_max: f64| {
            if 0.0 < s && s < t && t <= t_max {
                Ok(())
            } else {
                Err(CliError::Config(format!(
                    "`{name}` needs 0 < s < t <= {t_max}, got ({s}, {t})"
                )))
            }
        };
        ordered("kernel.split_times", self.split_times, 1.0 - f64::EPSILON)?;
        ordered("fluctuations.bridge_times", self.bridge_times, 1.0)?;
        ordered("montecarlo.pair_times", self.pair_times, 1.0)?;
        if self.passage_x.is_empty() || self.sigma_x.is_empty() || self.sigma_y.is_empty() {
            return Err(CliError::Config(
                "starting points and target states must be non-empty".into(),
            ));
        }
        if [
            self.workers,
            self.mc_n,
            self.mc_paths,
            self.modulus_paths,
            self.conditioned_n,
        ]
        .contains(&0)
        {
            return Err(CliError::Config("counts and horizons must be at least 1".into()));
        }
        if !self.deltas.iter().all(|&d| d > 0.0 && d < 1.0) {
            return Err(CliError::Config(format!(
                "deltas must lie in (0, 1), got {:?}",
                self.deltas
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections_lists_and_comments() {
        let text = "\
# demo
[run]
dist = walks/lazy.dist
seed = 7   ; inline comment

[kernel]
scales = 10, 20,40
split_times = 0.1, 0.9

[tolerances]
ks = 0.5
";
        let c = RunConfig::parse(text, Path::new("/etc/rw/demo.conf")).unwrap();
        assert_eq!(c.dist, PathBuf::from("/etc/rw/walks/lazy.dist"));
        assert_eq!(c.seed, 7);
        assert_eq!(c.sigma_scales, vec![10, 20, 40]);
        assert_eq!(c.split_times, (0.1, 0.9));
        assert_eq!(c.tol.ks, 0.5);
        assert_eq!(c.mc_paths, RunConfig::default().mc_paths);
    }

    #[test]
    fn rejects_bad_input() {
        let origin = Path::new("x.conf");
        for text in [
            "[run]\nunknown = 1\n",
            "[run]\nseed = abc\n",
            "[run]\nseed = 1\nseed = 2\n",
            "[kernel]\nscales = 30, 20\n",
            "[kernel\n",
            "just words\n",
            "[montecarlo]\npair_times = 0.5\n",
            "[montecarlo]\ndeltas = 0.5, 1.5\n",
        ] {
            assert!(
                matches!(RunConfig::parse(text, origin), Err(CliError::Config(_))),
                "{text}"
            );
        }
    }

    #[test]
    fn scaling_keeps_noise_factor() {
        let t = Tolerances::default().scaled(2.0);
        assert_eq!(t.ks, 0.04);
        assert_eq!(t.noise_factor, 1.5);
    }
}
