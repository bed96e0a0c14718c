//! The walk killed on first entry into the negative integers.

use crate::error::{Error, Result};
use crate::lattice::LatticePmf;
use crate::numeric::compensated_sum;
use crate::step_dist::StepDistribution;

/// Caps the number of lattice entries a DP call may allocate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DpBudget {
    pub max_entries: u64,
}

impl Default for DpBudget {
    fn default() -> Self {
        Self {
            max_entries: 50_000_000,
        }
    }
}

impl DpBudget {
    /// Rejects horizons whose widest front exceeds the budget.
    pub fn check_front(&self, d: &StepDistribution, start: usize, n: usize) -> Result<()> {
        let span = d.probs().len() as u64 - 1;
        let requested = start as u64 + 1 + n as u64 * span;
        if requested > self.max_entries {
            return Err(Error::HorizonTooLarge {
                requested,
                budget: self.max_entries,
            });
        }
        Ok(())
    }

    /// Rejects horizons whose full list of fronts exceeds the budget.
    pub fn check_history(&self, d: &StepDistribution, n: usize) -> Result<()> {
        let span = d.probs().len() as u64 - 1;
        let n = n as u64;
        let requested = (n + 1) + span * n * (n + 1) / 2;
        if requested > self.max_entries {
            return Err(Error::HorizonTooLarge {
                requested,
                budget: self.max_entries,
            });
        }
        Ok(())
    }
}

/// Convolves `front` (offset `lo >= 0`) with the step law into `out`, and
/// returns the offset of `out[0]`.
fn convolve(front: &[f64], lo: i64, d: &StepDistribution, out: &mut Vec<f64>) -> i64 {
    let probs = d.probs();
    out.clear();
    if front.is_empty() {
        return lo + d.support_min();
    }
    out.resize(front.len() + probs.len() - 1, 0.0);
    for (j, &p) in probs.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        for (o, &f) in out[j..j + front.len()].iter_mut().zip(front) {
            *o += p * f;
        }
    }
    lo + d.support_min()
}

/// One step of the killed walk: the surviving front on `z >= 0` and the mass
/// that lands on `z < 0`.
pub fn confined_step(front: &LatticePmf, d: &StepDistribution) -> (LatticePmf, LatticePmf) {
    assert!(front.offset >= 0, "front must live on the non-negative integers");
    let mut out = Vec::new();
    let base = convolve(&front.weights, front.offset, d, &mut out);
    let neg = ((-base).max(0) as usize).min(out.len());
    let killed = LatticePmf::new(base, out[..neg].to_vec(), 0.0);
    let mut next = LatticePmf::new(base.max(0), out[neg..].to_vec(), front.deficit + killed.mass());
    if next.weights.is_empty() {
        next.offset = 0;
    }
    (next, killed)
}

/// Streaming form of [`confined_step`] that reuses its buffers.
///
/// After `k` calls to [`ConfinedWalk::step`] the front holds
/// `P[tau(x) > k, x + S(k) = z]`.
#[derive(Debug, Clone)]
pub struct ConfinedWalk<'a> {
    dist: &'a StepDistribution,
    lo: i64,
    front: Vec<f64>,
    scratch: Vec<f64>,
    /// `killed[y - 1]` is the mass that landed on `-y` during the last step.
    killed: Vec<f64>,
    steps: usize,
}

impl<'a> ConfinedWalk<'a> {
    pub fn new(dist: &'a StepDistribution, start: usize) -> Self {
        Self::from_front(dist, LatticePmf::delta(start as i64))
    }

    pub fn from_front(dist: &'a StepDistribution, front: LatticePmf) -> Self {
        assert!(front.offset >= 0, "front must live on the non-negative integers");
        Self {
            dist,
            lo: front.offset,
            front: front.weights,
            scratch: Vec::new(),
            killed: vec![0.0; dist.max_down_jump()],
            steps: 0,
        }
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Advances one step and returns the killed mass.
    pub fn step(&mut self) -> f64 {
        let base = convolve(&self.front, self.lo, self.dist, &mut self.scratch);
        self.killed.iter_mut().for_each(|k| *k = 0.0);
        let neg = ((-base).max(0) as usize).min(self.scratch.len());
        for (i, &w) in self.scratch[..neg].iter().enumerate() {
            let y = (-(base + i as i64)) as usize;
            self.killed[y - 1] = w;
        }
        self.front.clear();
        self.front.extend_from_slice(&self.scratch[neg..]);
        self.lo = base.max(0);
        while self.front.last() == Some(&0.0) {
            self.front.pop();
        }
        self.steps += 1;
        compensated_sum(self.killed.iter().copied())
    }

    /// Mass that landed on `-y`, `y >= 1`, during the last step.
    pub fn killed_at(&self, y: usize) -> f64 {
        self.killed.get(y.wrapping_sub(1)).copied().unwrap_or(0.0)
    }

    pub fn killed(&self) -> &[f64] {
        &self.killed
    }

    pub fn front_offset(&self) -> i64 {
        self.lo
    }

    pub fn front(&self) -> &[f64] {
        &self.front
    }

    pub fn front_at(&self, z: i64) -> f64 {
        let idx = z - self.lo;
        if idx < 0 || idx >= self.front.len() as i64 {
            0.0
        } else {
            self.front[idx as usize]
        }
    }

    pub fn survival(&self) -> f64 {
        compensated_sum(self.front.iter().copied())
    }

    pub fn to_pmf(&self) -> LatticePmf {
        let mut pmf = LatticePmf::new(self.lo, self.front.clone(), 0.0);
        pmf.deficit = 1.0 - pmf.mass();
        pmf
    }
}

/// `P[tau(x) > k, x + S(k) = z]` for every `k = 0..=n`.
pub fn survival_law(d: &StepDistribution, x: usize, n: usize, budget: DpBudget) -> Result<Vec<LatticePmf>> {
    budget.check_history(d, n)?;
    let mut out = Vec::with_capacity(n + 1);
    let mut front = LatticePmf::delta(x as i64);
    out.push(front.clone());
    for _ in 0..n {
        let (next, _) = confined_step(&front, d);
        front = next;
        out.push(front.clone());
    }
    Ok(out)
}

/// Point and tail probabilities of `tau(x) = inf{n >= 1 : x + S(n) < 0}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FirstPassage {
    /// `point[n] = P[tau = n]`; `point[0] = 0`.
    pub point: Vec<f64>,
    /// `tail[n] = P[tau > n]`, computed as surviving mass.
    pub tail: Vec<f64>,
}

pub fn first_passage(d: &StepDistribution, x: usize, n: usize, budget: DpBudget) -> Result<FirstPassage> {
    budget.check_front(d, x, n)?;
    let mut walk = ConfinedWalk::new(d, x);
    let mut point = Vec::with_capacity(n + 1);
    let mut tail = Vec::with_capacity(n + 1);
    point.push(0.0);
    tail.push(1.0);
    for _ in 0..n {
        point.push(walk.step());
        tail.push(walk.survival());
    }
    Ok(FirstPassage { point, tail })
}

/// `P[tau(x) = n]` for `n = 1..=horizon`.
pub fn tau_law(d: &StepDistribution, x: usize, horizon: usize, budget: DpBudget) -> Result<Vec<f64>> {
    let mut fp = first_passage(d, x, horizon, budget)?;
    fp.point.remove(0);
    Ok(fp.point)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::step_dist::{lazy_walk, skew_walk};

    #[test]
    fn lazy_one_step_from_origin() {
        let (next, killed) = confined_step(&LatticePmf::delta(0), &lazy_walk());
        assert_eq!(next.offset, 0);
        assert_eq!(next.weights, vec![0.5, 0.25]);
        assert_eq!(killed.offset, -1);
        assert_eq!(killed.weights, vec![0.25]);
        assert_eq!(next.deficit, 0.25);
    }

    #[test]
    fn skew_one_step_from_one() {
        let (mut next, killed) = confined_step(&LatticePmf::delta(1), &skew_walk());
        next.trim();
        assert_eq!(next.offset, 1);
        assert_eq!(next.weights, vec![0.4, 0.4]);
        assert_eq!(killed.get(-1), 0.2);
        assert_eq!(killed.mass(), 0.2);
    }

    #[test]
    fn zero_front_stays_zero() {
        let zero = LatticePmf::new(0, vec![0.0; 4], 0.0);
        let (next, killed) = confined_step(&zero, &skew_walk());
        assert_eq!(next.mass(), 0.0);
        assert_eq!(killed.mass(), 0.0);
    }

    #[test]
    fn lazy_survival_small_horizon() {
        let law = survival_law(&lazy_walk(), 0, 3, DpBudget::default()).unwrap();
        assert_eq!(law[0], LatticePmf::delta(0));
        assert_eq!(law[1].mass(), 0.75);
        assert_eq!(law[3].mass(), 35.0 / 64.0);
        let tau = tau_law(&lazy_walk(), 0, 3, DpBudget::default()).unwrap();
        assert_eq!(tau, vec![0.25, 0.125, 5.0 / 64.0]);
    }

    #[test]
    fn first_step_kill_is_negative_mass() {
        for d in [lazy_walk(), skew_walk()] {
            let tau = tau_law(&d, 0, 1, DpBudget::default()).unwrap();
            assert_eq!(tau[0], d.negative_mass());
        }
    }

    #[test]
    fn far_start_cannot_die() {
        let d = skew_walk();
        let n = 20;
        let x = n * d.max_down_jump();
        let law = survival_law(&d, x, n, DpBudget::default()).unwrap();
        assert!((law[n].mass() - 1.0).abs() < 1e-14);
        let fp = first_passage(&d, x, n, DpBudget::default()).unwrap();
        assert!(fp.point.iter().all(|p| *p == 0.0));
    }

    #[test]
    fn streaming_matches_list() {
        let d = skew_walk();
        let law = survival_law(&d, 2, 30, DpBudget::default()).unwrap();
        let mut walk = ConfinedWalk::new(&d, 2);
        for expected in &law[1..=30] {
            walk.step();
            let mut a = walk.to_pmf();
            let mut b = expected.clone();
            a.trim();
            b.trim();
            assert_eq!(a.weights, b.weights);
            assert_eq!(a.offset, b.offset);
        }
    }

    #[test]
    fn mass_is_conserved() {
        let d = skew_walk();
        let mut walk = ConfinedWalk::new(&d, 3);
        let mut alive = 1.0;
        for k in 1..=500 {
            let killed = walk.step();
            let now = walk.survival();
            assert!((alive - killed - now).abs() <= 1e-14 * k as f64);
            alive = now;
        }
    }

    #[test]
    fn budget_is_enforced() {
        let budget = DpBudget { max_entries: 1000 };
        assert!(matches!(
            survival_law(&lazy_walk(), 0, 100, budget),
            Err(Error::HorizonTooLarge { .. })
        ));
        assert!(first_passage(&lazy_walk(), 0, 100, budget).is_ok());
        assert!(first_passage(&lazy_walk(), 0, 1000, budget).is_err());
    }
}
