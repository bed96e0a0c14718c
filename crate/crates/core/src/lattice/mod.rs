//! Exact dynamic programming for the fluctuation quantities of the
//! underlying walk `S`: killed-walk laws, first-passage times, ladder
//! heights and epochs, renewal functions, and conditioned expectations.

mod conditional;
mod confined;
mod ladder;
mod pmf;

pub use conditional::{bridge_expectation, meander_expectation};
pub use confined::{confined_step, first_passage, survival_law, tau_law, ConfinedWalk, DpBudget, FirstPassage};
pub use ladder::{
    c1, ladder_epoch_renewal, ladder_height_law, ladder_height_partial, potential, potential_and_renewal,
    renewal_function, renewal_sequence, LadderConfig, RenewalTables,
};
pub use pmf::LatticePmf;

use crate::error::Result;
use crate::step_dist::StepDistribution;

/// Everything the reflection kernel and the asymptotic checks need about `S`.
#[derive(Debug, Clone, PartialEq)]
pub struct FluctuationTables {
    pub mu_star: LatticePmf,
    /// `u_star[w] = U*(-w)`.
    pub u_star: Vec<f64>,
    pub h: Vec<f64>,
    pub h_tilde: Vec<f64>,
    pub c1: f64,
    /// `tau0_law[n] = P[tau(0) = n]`, with `tau0_law[0] = 0`.
    pub tau0_law: Vec<f64>,
    /// `tau0_tail[n] = P[tau(0) > n]`.
    pub tau0_tail: Vec<f64>,
    /// `u[n] = sum_l P[l_l = n]`.
    pub u: Vec<f64>,
}

impl FluctuationTables {
    pub fn compute(
        d: &StepDistribution,
        x_max: usize,
        horizon: usize,
        ladder: LadderConfig,
        budget: DpBudget,
    ) -> Result<Self> {
        let mu_star = ladder_height_law(d, ladder)?;
        let renewal = potential_and_renewal(d, &mu_star, x_max, ladder)?;
        let c1 = c1(d, &mu_star);
        let fp = first_passage(d, 0, horizon, budget)?;
        let u = renewal_sequence(&fp.point[1..]);
        Ok(Self {
            mu_star,
            u_star: renewal.u_star,
            h: renewal.h,
            h_tilde: renewal.h_tilde,
            c1,
            tau0_law: fp.point,
            tau0_tail: fp.tail,
            u,
        })
    }

    /// Largest `x` covered by `u_star`, `h` and `h_tilde`.
    pub fn x_max(&self) -> usize {
        self.h.len() - 1
    }
}
