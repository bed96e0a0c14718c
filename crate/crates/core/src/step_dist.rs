//! Finite-support integer step laws and the moment/aperiodicity checks the
//! limit theorems rely on.

use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};
use crate::numeric::{compensated_sum, gcd};

/// Sums within this distance of 1 are renormalized; anything further is rejected.
const NORMALIZE_TOL: f64 = 1e-9;

/// Absolute tolerance for the centering assumption.
pub const MEAN_ZERO_TOL: f64 = 1e-12;

/// Law of the i.i.d. increments, stored densely on `[support_min, support_max]`.
///
/// Both edges carry positive mass; interior atoms may be zero.
#[derive(Debug, Clone, PartialEq)]
pub struct StepDistribution {
    support_min: i64,
    probs: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSummary {
    pub mean: f64,
    /// Variance of a step; equals the second moment once the mean is zero.
    pub sigma2: f64,
    /// Third moment of the negative part.
    pub neg_moment3: f64,
    pub aperiodic: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let mark = if c.passed { "ok  " } else { "FAIL" };
            writeln!(f, "{mark} {:<22} {}", c.name, c.detail)?;
        }
        Ok(())
    }
}

impl StepDistribution {
    /// Builds a distribution from `(offset, weight)` atoms. Repeated offsets
    /// are merged.
    pub fn from_table(atoms: &[(i64, f64)]) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::EmptySupport);
        }
        for &(offset, weight) in atoms {
            if !weight.is_finite() || weight < 0.0 {
                return Err(Error::NegativeWeight { offset, weight });
            }
        }
        let positive = atoms.iter().filter(|(_, w)| *w > 0.0);
        let lo = positive.clone().map(|(k, _)| *k).min();
        let hi = positive.map(|(k, _)| *k).max();
        let (lo, hi) = match (lo, hi) {
            (Some(lo), Some(hi)) => (lo, hi),
            _ => return Err(Error::MassNotNormalizable { sum: 0.0 }),
        };

        let mut probs = vec![0.0; (hi - lo + 1) as usize];
        for &(k, w) in atoms {
            if w > 0.0 {
                probs[(k - lo) as usize] += w;
            }
        }
        let sum = compensated_sum(probs.iter().copied());
        if (sum - 1.0).abs() > NORMALIZE_TOL {
            return Err(Error::MassNotNormalizable { sum });
        }
        for p in &mut probs {
            *p /= sum;
        }
        Ok(Self { support_min: lo, probs })
    }

    /// Parses the plain-text format: one `offset weight` pair per line,
    /// `#` starts a comment.
    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let mut atoms = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Parse {
                path: origin.to_path_buf(),
                line: idx + 1,
                msg,
            };
            let mut fields = line.split_whitespace();
            let (Some(k), Some(w), None) = (fields.next(), fields.next(), fields.next()) else {
                return Err(err(format!("expected `offset weight`, got `{line}`")));
            };
            let k: i64 = k.parse().map_err(|e| err(format!("bad offset `{k}`: {e}")))?;
            let w: f64 = w.parse().map_err(|e| err(format!("bad weight `{w}`: {e}")))?;
            atoms.push((k, w));
        }
        Self::from_table(&atoms)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, path)
    }

    /// Plain-text form accepted by [`StepDistribution::parse`].
    pub fn to_table_string(&self) -> String {
        self.atoms().map(|(k, p)| format!("{k} {p}\n")).collect()
    }

    pub fn support_min(&self) -> i64 {
        self.support_min
    }

    pub fn support_max(&self) -> i64 {
        self.support_min + self.probs.len() as i64 - 1
    }

    /// Dense weights for `support_min..=support_max`.
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, k: i64) -> f64 {
        let idx = k - self.support_min;
        if idx < 0 || idx >= self.probs.len() as i64 {
            0.0
        } else {
            self.probs[idx as usize]
        }
    }

    /// Atoms with positive mass, in increasing order.
    pub fn atoms(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .filter(|(_, p)| **p > 0.0)
            .map(move |(i, p)| (self.support_min + i as i64, *p))
    }

    /// Largest downward jump `C = max{y >= 1 : mu(-y) > 0}`, or 0 if none.
    pub fn max_down_jump(&self) -> usize {
        if self.support_min < 0 {
            (-self.support_min) as usize
        } else {
            0
        }
    }

    /// Largest upward jump, or 0 if none.
    pub fn max_up_jump(&self) -> usize {
        self.support_max().max(0) as usize
    }

    pub fn negative_mass(&self) -> f64 {
        compensated_sum(self.atoms().filter(|(k, _)| *k < 0).map(|(_, p)| p))
    }

    /// The law of `-xi`.
    pub fn mirrored(&self) -> Self {
        let mut probs = self.probs.clone();
        probs.reverse();
        Self {
            support_min: -self.support_max(),
            probs,
        }
    }

    pub fn moments(&self) -> MomentSummary {
        let mean = compensated_sum(self.atoms().map(|(k, p)| k as f64 * p));
        let sigma2 = compensated_sum(self.atoms().map(|(k, p)| {
            let d = k as f64 - mean;
            d * d * p
        }));
        let neg_moment3 = compensated_sum(
            self.atoms()
                .filter(|(k, _)| *k < 0)
                .map(|(k, p)| (-k as f64).powi(3) * p),
        );
        MomentSummary {
            mean,
            sigma2,
            neg_moment3,
            aperiodic: self.difference_gcd() == 1,
        }
    }

    /// gcd of the pairwise differences of support points; 0 for a single atom.
    pub fn difference_gcd(&self) -> u64 {
        let mut atoms = self.atoms().map(|(k, _)| k);
        let Some(first) = atoms.next() else { return 0 };
        atoms.fold(0, |g, k| gcd(g, (k - first).unsigned_abs()))
    }

    pub fn validate(&self) -> ValidationReport {
        let m = self.moments();
        let g = self.difference_gcd();
        let checks = vec![
            Check {
                name: "moments",
                passed: true,
                detail: format!(
                    "finite support [{}, {}]: sigma^2 = {}, E[(xi^-)^3] = {}",
                    self.support_min,
                    self.support_max(),
                    m.sigma2,
                    m.neg_moment3
                ),
            },
            Check {
                name: "centered",
                passed: m.mean.abs() <= MEAN_ZERO_TOL,
                detail: format!("mean = {:e}", m.mean),
            },
            Check {
                name: "strong aperiodicity",
                passed: g == 1,
                detail: format!("gcd of support differences = {g}"),
            },
            Check {
                name: "negative atom",
                passed: self.support_min < 0,
                detail: format!("P[xi < 0] = {}", self.negative_mass()),
            },
        ];
        ValidationReport { checks }
    }
}

/// `mu(-1) = mu(1) = 1/4`, `mu(0) = 1/2`.
pub fn lazy_walk() -> StepDistribution {
    StepDistribution::from_table(&[(-1, 0.25), (0, 0.5), (1, 0.25)]).expect("valid table")
}

/// `mu(-2) = 0.2`, `mu(0) = mu(1) = 0.4`.
pub fn skew_walk() -> StepDistribution {
    StepDistribution::from_table(&[(-2, 0.2), (0, 0.4), (1, 0.4)]).expect("valid table")
}
