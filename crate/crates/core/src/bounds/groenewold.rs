//! Randomized check of the information-gain inequalities of an instrument.

use crate::entropy::mutual_info_classical;
use crate::error::{Error, Result};
use crate::instrument::{a_posteriori_all, Instrument};
use crate::scenarios::{random_ensemble, random_pure_state, random_state, rng_for};

use super::{iq_gain, measurement_data, BOUND_SLACK};

/// Largest `p(w) (1 - Tr pi(w)^2)` tolerated for a pure input.
const PURITY_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct GroenewoldLindbladReport {
    pub trials: usize,
    /// Every random pure input produced pure a posteriori states.
    pub pure_preserving: bool,
    pub max_weighted_impurity: f64,
    /// Smallest information gain on random mixed inputs; only measured
    /// for pure-preserving instruments.
    pub min_gain_mixed: Option<f64>,
    /// Smallest `I_q(eta) - sum_a p(a) I_q(rho(a)) - I_c` on random ensembles.
    pub min_chain_slack: f64,
    /// Smallest `I_c` over the same ensembles.
    pub min_ic: f64,
}

impl GroenewoldLindbladReport {
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let Some(g) = self.min_gain_mixed {
            if g < -BOUND_SLACK {
                out.push(format!("negative information gain {g:.3e} on a mixed input"));
            }
        }
        if self.min_chain_slack < -BOUND_SLACK {
            out.push(format!("gain difference falls below I_c by {:.3e}", -self.min_chain_slack));
        }
        if self.min_ic < -BOUND_SLACK {
            out.push(format!("negative I_c {:.3e}", self.min_ic));
        }
        out
    }

    pub fn passed(&self) -> bool {
        self.violations().is_empty()
    }
}

pub fn groenewold_lindblad_check(
    inst: &Instrument,
    trials: usize,
    seed: u64,
) -> Result<GroenewoldLindbladReport> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be positive".into()));
    }
    let d = inst.dim();

    let mut rng = rng_for(seed, 1);
    let mut max_weighted_impurity: f64 = 0.0;
    for _ in 0..trials {
        let psi = random_pure_state(&mut rng, d);
        let dec = a_posteriori_all(inst, &psi)?;
        for (&p, s) in dec.probs.weights().iter().zip(&dec.states) {
            max_weighted_impurity = max_weighted_impurity.max(p * s.impurity());
        }
    }
    let pure_preserving = max_weighted_impurity <= PURITY_TOL;

    let min_gain_mixed = if pure_preserving {
        let mut rng = rng_for(seed, 2);
        let mut min = f64::INFINITY;
        for _ in 0..trials {
            min = min.min(iq_gain(inst, &random_state(&mut rng, d))?);
        }
        Some(min)
    } else {
        None
    };

    let mut rng = rng_for(seed, 3);
    let mut min_chain_slack = f64::INFINITY;
    let mut min_ic = f64::INFINITY;
    for t in 0..trials {
        let e = random_ensemble(&mut rng, d, 2 + t % 3);
        let data = measurement_data(&e, inst)?;
        let mut diff = iq_gain(inst, &data.eta_i)?;
        for (&p, rho) in e.prior().weights().iter().zip(e.states()) {
            diff -= p * iq_gain(inst, rho)?;
        }
        let i_c = mutual_info_classical(&data.joint);
        min_chain_slack = min_chain_slack.min(diff - i_c);
        min_ic = min_ic.min(i_c);
    }

    Ok(GroenewoldLindbladReport {
        trials,
        pure_preserving,
        max_weighted_impurity,
        min_gain_mixed,
        min_chain_slack,
        min_ic,
    })
}
