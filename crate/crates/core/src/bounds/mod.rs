//! Classical information of an (ensemble, instrument) pair and the upper
//! and lower bounds built from chi-quantities, Hall's transformation and
//! subentropy.

mod groenewold;
mod tripartite;

pub use groenewold::{groenewold_lindblad_check, GroenewoldLindbladReport};
pub use tripartite::{
    gamma_channel_check, identity_suite, tripartite_final, GammaReport, IdentityCheck,
    MutualEntropy, TripartiteReport,
};

use crate::entropy::{chi, chi_quantity, mutual_info_classical, subentropy, vn_entropy};
use crate::error::{Error, Result};
use crate::hall::{build_hall, joint_distribution, HallPackage};
use crate::instrument::{a_posteriori_all, Instrument, Povm};
use crate::states::{
    DensityMatrix, Ensemble, JointDistribution, Marginals, ZERO_PROB_TOL,
};

/// Additive slack, in bits, for every inequality check.
pub const BOUND_SLACK: f64 = 1e-9;

/// Intermediate objects shared by the bounds of one (ensemble, instrument)
/// pair.
#[derive(Clone, Debug)]
pub struct MeasurementData {
    pub eta_i: DensityMatrix,
    pub chi_i: f64,
    pub joint: JointDistribution,
    pub marginals: Marginals,
    /// A posteriori states of the average input, per outcome.
    pub rho_f: Vec<DensityMatrix>,
    /// `rho_f_letters[a][w]`: a posteriori state of letter `a`.
    pub rho_f_letters: Vec<Vec<DensityMatrix>>,
    /// A priori state of each letter.
    pub eta_f_letters: Vec<DensityMatrix>,
    /// A priori state of the average input.
    pub eta_f: DensityMatrix,
}

pub fn measurement_data(e: &Ensemble, inst: &Instrument) -> Result<MeasurementData> {
    if e.dim() != inst.dim() {
        return Err(Error::DimensionMismatch(e.dim(), inst.dim()));
    }
    let eta_i = e.average();
    let mut table = Vec::with_capacity(e.len());
    let mut rho_f_letters = Vec::with_capacity(e.len());
    let mut eta_f_letters = Vec::with_capacity(e.len());
    for (rho, &p) in e.states().iter().zip(e.prior().weights()) {
        let dec = a_posteriori_all(inst, rho)?;
        table.push(dec.probs.weights().iter().map(|q| p * q).collect());
        eta_f_letters.push(crate::instrument::a_priori(inst, rho)?);
        rho_f_letters.push(dec.states);
    }
    let joint = JointDistribution::new(e.labels().to_vec(), inst.labels().to_vec(), table)?;
    let marginals = joint.marginals();
    let rho_f = a_posteriori_all(inst, &eta_i)?.states;
    let eta_f = crate::instrument::a_priori(inst, &eta_i)?;
    Ok(MeasurementData {
        chi_i: chi_quantity(e),
        eta_i,
        joint,
        marginals,
        rho_f,
        rho_f_letters,
        eta_f_letters,
        eta_f,
    })
}

impl MeasurementData {
    pub fn i_c(&self) -> f64 {
        mutual_info_classical(&self.joint)
    }

    /// Letter states after outcome `w`, in alphabet order.
    pub fn posterior_letters(&self, w: usize) -> Vec<DensityMatrix> {
        self.rho_f_letters.iter().map(|row| row[w].clone()).collect()
    }

    /// `sum_w p_f(w) chi{p_{i|f}(.|w), rho_f^.(w)}`.
    pub fn mean_posterior_chi(&self) -> f64 {
        let p_f = self.marginals.cols.weights();
        (0..p_f.len())
            .filter(|&w| p_f[w] > ZERO_PROB_TOL)
            .map(|w| p_f[w] * chi(&self.marginals.row_given_col[w], &self.posterior_letters(w)))
            .sum()
    }

    /// `sum_a p_i(a) chi{p_{f|i}(.|a), rho_f^a(.)}`.
    pub fn mean_letter_chi(&self) -> f64 {
        let p_i = self.marginals.rows.weights();
        (0..p_i.len())
            .filter(|&a| p_i[a] > ZERO_PROB_TOL)
            .map(|a| p_i[a] * chi(&self.marginals.col_given_row[a], &self.rho_f_letters[a]))
            .sum()
    }

    /// `chi{p_f, rho_f}`.
    pub fn chi_posterior(&self) -> f64 {
        chi(self.marginals.cols.weights(), &self.rho_f)
    }

    /// `chi{p_i, eta_f^.}`.
    pub fn chi_a_priori(&self) -> f64 {
        chi(self.marginals.rows.weights(), &self.eta_f_letters)
    }

    /// `chi{p_if, rho_f^.}` over all (letter, outcome) pairs.
    pub fn chi_joint(&self) -> f64 {
        let weights: Vec<f64> = self.joint.table().iter().flatten().copied().collect();
        let states: Vec<DensityMatrix> = self.rho_f_letters.iter().flatten().cloned().collect();
        chi(&weights, &states)
    }
}

/// Mutual information between letters and outcomes of `povm`.
pub fn classical_info(e: &Ensemble, povm: &Povm) -> Result<f64> {
    Ok(mutual_info_classical(&joint_distribution(e, povm)?))
}

/// Holevo's bound.
pub fn holevo(e: &Ensemble) -> f64 {
    chi_quantity(e)
}

/// The bound from the mean chi-quantity left in the a posteriori states,
/// in its direct form and its symmetric form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SwwBound {
    pub value: f64,
    pub symmetric: f64,
}

pub fn sww(e: &Ensemble, inst: &Instrument) -> Result<SwwBound> {
    Ok(sww_from(&measurement_data(e, inst)?))
}

pub(crate) fn sww_from(data: &MeasurementData) -> SwwBound {
    SwwBound {
        value: data.chi_i - data.mean_posterior_chi(),
        symmetric: data.chi_i + data.chi_posterior() - data.chi_joint(),
    }
}

/// Quantum information gain `S(eta) - sum_w p(w) S(pi(w))`.
pub fn iq_gain(inst: &Instrument, eta: &DensityMatrix) -> Result<f64> {
    let dec = a_posteriori_all(inst, eta)?;
    let mean: f64 = dec
        .probs
        .weights()
        .iter()
        .zip(&dec.states)
        .filter(|(&p, _)| p > ZERO_PROB_TOL)
        .map(|(&p, s)| p * vn_entropy(s))
        .sum();
    Ok(vn_entropy(eta) - mean)
}

/// `(chi{p_i, xi}, chi{p_f, epsilon})`.
pub fn lower_bounds(e: &Ensemble, pkg: &HallPackage) -> (f64, f64) {
    (
        chi(e.prior().weights(), &pkg.xi),
        chi(pkg.marginals.cols.weights(), &pkg.epsilon),
    )
}

/// Hall's bound and the sharper bound from the dual instrument.
#[derive(Clone, Debug, PartialEq)]
pub struct HallUpper {
    pub b_hall: f64,
    pub b_nub: f64,
    /// `I_q{sigma(w); J}` per outcome.
    pub dual_gains: Vec<f64>,
    /// `sum_w p_f(w) I_q{sigma(w); J}`.
    pub mean_dual_gain: f64,
    /// `I_q{eta_i; J}`, equal to the chi-quantity of the ensemble.
    pub dual_gain_at_average: f64,
}

pub fn hall_and_nub(e: &Ensemble, pkg: &HallPackage) -> Result<HallUpper> {
    let p_f = pkg.marginals.cols.weights();
    let dual_gains: Vec<f64> = pkg
        .sigma
        .iter()
        .zip(&pkg.pi_j)
        .enumerate()
        .map(|(w, (s, row))| {
            let cond = &pkg.marginals.row_given_col[w];
            let mean: f64 = cond
                .iter()
                .zip(row)
                .filter(|(&q, _)| q > ZERO_PROB_TOL)
                .map(|(&q, pi)| q * vn_entropy(pi))
                .sum();
            vn_entropy(s) - mean
        })
        .collect();
    let mean_dual_gain: f64 = p_f
        .iter()
        .zip(&dual_gains)
        .filter(|(&p, _)| p > ZERO_PROB_TOL)
        .map(|(&p, g)| p * g)
        .sum();
    let chi_i = chi_quantity(e);
    Ok(HallUpper {
        b_hall: chi(p_f, &pkg.sigma),
        b_nub: chi_i - mean_dual_gain,
        dual_gains,
        mean_dual_gain,
        dual_gain_at_average: iq_gain(&pkg.instrument, &e.average())?,
    })
}

/// `chi{p_i, eta_f^.}` minus the mean a posteriori chi-quantity.
pub fn b1(data: &MeasurementData) -> f64 {
    data.chi_a_priori() - data.mean_posterior_chi()
}

/// `chi{p_i, rho_i}` minus the mean chi-quantity of the dual a posteriori
/// ensembles.
pub fn b2(e: &Ensemble, pkg: &HallPackage) -> f64 {
    let p_f = pkg.marginals.cols.weights();
    let mean: f64 = (0..p_f.len())
        .filter(|&w| p_f[w] > ZERO_PROB_TOL)
        .map(|w| p_f[w] * chi(&pkg.marginals.row_given_col[w], &pkg.pi_j[w]))
        .sum();
    chi_quantity(e) - mean
}

pub fn b1_b2(e: &Ensemble, inst: &Instrument, pkg: &HallPackage) -> Result<(f64, f64)> {
    Ok((b1(&measurement_data(e, inst)?), b2(e, pkg)))
}

/// `Q(eta_i) - sum_a p_i(a) Q(rho_i(a))`.
pub fn subentropy_bound(e: &Ensemble) -> f64 {
    let mean: f64 = e
        .prior()
        .weights()
        .iter()
        .zip(e.states())
        .map(|(&p, s)| p * subentropy(s))
        .sum();
    subentropy(&e.average()) - mean
}

/// Bounds that need Hall's construction (an invertible average state).
#[derive(Clone, Debug, PartialEq)]
pub struct HallBounds {
    pub b_hall: f64,
    pub b_nub: f64,
    pub b_nlb: f64,
    pub b_scu: f64,
    pub b2: f64,
    pub mean_dual_gain: f64,
    pub min_dual_gain: f64,
    pub dual_gain_at_average: f64,
}

/// Every bound for one (ensemble, instrument) pair.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundsReport {
    pub i_c: f64,
    pub b_hlv: f64,
    pub b_sww: f64,
    pub b_sww_symmetric: f64,
    pub b_subent: f64,
    pub b1: f64,
    /// `I_q(eta_i; I)`.
    pub iq_eta: f64,
    pub mean_posterior_chi: f64,
    /// `None` when the average state is singular.
    pub hall: Option<HallBounds>,
    pub hall_unavailable: Option<String>,
    /// Outcomes that never occur; their a posteriori states are completions.
    pub completed_outcomes: Vec<String>,
}

/// One inequality `lhs <= rhs` with its slack `rhs - lhs`.
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantCheck {
    pub name: String,
    pub slack: f64,
}

impl InvariantCheck {
    fn new(name: &str, lhs: f64, rhs: f64) -> Self {
        InvariantCheck { name: name.to_string(), slack: rhs - lhs }
    }

    pub fn passed(&self) -> bool {
        self.slack >= -BOUND_SLACK
    }
}

impl BoundsReport {
    pub fn b_hall(&self) -> Option<f64> {
        self.hall.as_ref().map(|h| h.b_hall)
    }

    pub fn b_nub(&self) -> Option<f64> {
        self.hall.as_ref().map(|h| h.b_nub)
    }

    pub fn b_nlb(&self) -> Option<f64> {
        self.hall.as_ref().map(|h| h.b_nlb)
    }

    pub fn b_scu(&self) -> Option<f64> {
        self.hall.as_ref().map(|h| h.b_scu)
    }

    pub fn b2(&self) -> Option<f64> {
        self.hall.as_ref().map(|h| h.b2)
    }

    /// The ordering chain between the bounds.
    pub fn invariants(&self) -> Vec<InvariantCheck> {
        let mut out = vec![
            InvariantCheck::new("I_c <= B_SWW", self.i_c, self.b_sww),
            InvariantCheck::new("B_SWW <= B_Hlv", self.b_sww, self.b_hlv),
            InvariantCheck::new("b1 <= I_c", self.b1, self.i_c),
            InvariantCheck::new("0 <= I_c", 0.0, self.i_c),
        ];
        if let Some(h) = &self.hall {
            out.extend([
                InvariantCheck::new("0 <= b_nlb", 0.0, h.b_nlb),
                InvariantCheck::new("b_nlb <= I_c", h.b_nlb, self.i_c),
                InvariantCheck::new("0 <= b_Scu", 0.0, h.b_scu),
                InvariantCheck::new("b_Scu <= I_c", h.b_scu, self.i_c),
                InvariantCheck::new("I_c <= B_nub", self.i_c, h.b_nub),
                InvariantCheck::new("B_nub <= B_Hall", h.b_nub, h.b_hall),
                InvariantCheck::new("B_nub <= B_Hlv", h.b_nub, self.b_hlv),
                InvariantCheck::new("b2 <= I_c", h.b2, self.i_c),
                InvariantCheck::new("0 <= I_q(sigma; J)", 0.0, h.min_dual_gain),
            ]);
        }
        out
    }

    pub fn all_pass(&self) -> bool {
        self.invariants().iter().all(InvariantCheck::passed)
    }
}

pub fn full_report(e: &Ensemble, inst: &Instrument) -> Result<BoundsReport> {
    let data = measurement_data(e, inst)?;
    let sww = sww_from(&data);
    let completed_outcomes = data
        .marginals
        .cols
        .weights()
        .iter()
        .zip(inst.labels())
        .filter(|(&p, _)| p <= ZERO_PROB_TOL)
        .map(|(_, l)| l.clone())
        .collect();
    let (hall, hall_unavailable) = match build_hall(e, &inst.povm()) {
        Ok(pkg) => {
            let upper = hall_and_nub(e, &pkg)?;
            let (b_nlb, b_scu) = lower_bounds(e, &pkg);
            let min_dual_gain = upper
                .dual_gains
                .iter()
                .zip(pkg.marginals.cols.weights())
                .filter(|(_, &p)| p > ZERO_PROB_TOL)
                .map(|(g, _)| *g)
                .fold(f64::INFINITY, f64::min);
            let hall = HallBounds {
                b_hall: upper.b_hall,
                b_nub: upper.b_nub,
                b_nlb,
                b_scu,
                b2: b2(e, &pkg),
                mean_dual_gain: upper.mean_dual_gain,
                min_dual_gain,
                dual_gain_at_average: upper.dual_gain_at_average,
            };
            (Some(hall), None)
        }
        Err(Error::SingularAverageState(min)) => {
            (None, Some(format!("average state is singular (smallest eigenvalue {min:.3e})")))
        }
        Err(other) => return Err(other),
    };
    Ok(BoundsReport {
        i_c: data.i_c(),
        b_hlv: data.chi_i,
        b_sww: sww.value,
        b_sww_symmetric: sww.symmetric,
        b_subent: subentropy_bound(e),
        b1: b1(&data),
        iq_eta: iq_gain(inst, &data.eta_i)?,
        mean_posterior_chi: data.mean_posterior_chi(),
        hall,
        hall_unavailable,
        completed_outcomes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenarios::{
        example_a_ensemble, example_b_ensemble, rng_for, random_pure_ensemble, random_scenario,
        two_level_example_a, two_level_example_b, von_neumann_scenario,
    };
    use crate::states::ProbVector;

    #[test]
    fn trivial_povm_carries_no_information() {
        let e = example_a_ensemble();
        assert_eq!(classical_info(&e, &Povm::trivial(2)).unwrap(), 0.0);
        let pkg = build_hall(&e, &Povm::trivial(2)).unwrap();
        let (nlb, scu) = lower_bounds(&e, &pkg);
        assert!(nlb.abs() < 1e-12 && scu.abs() < 1e-12);
    }

    #[test]
    fn holevo_values() {
        assert!((holevo(&example_a_ensemble()) - 0.600876).abs() < 1e-5);
        assert!((holevo(&example_b_ensemble()) - 0.448368).abs() < 1e-5);
    }

    #[test]
    fn example_a_information_closed_form() {
        for x in [0.3f64, 1.0, 2.5] {
            let q = (-x).exp();
            let closed = 1.5 + (1.0 + q) / 4.0 * (1.0 + q).log2() - (3.0 + q) / 4.0 * (3.0 + q).log2();
            let r = full_report(&example_a_ensemble(), &crate::scenarios::counting_instrument_a(x).unwrap())
                .unwrap();
            assert!((r.i_c - closed).abs() < 1e-12, "x {x}");
        }
        let r = full_report(&example_a_ensemble(), &crate::scenarios::counting_instrument_a(30.0).unwrap())
            .unwrap();
        assert!((r.i_c - 0.311278).abs() < 1e-5);
    }

    #[test]
    fn example_a_sign_pattern() {
        let s = two_level_example_a(1.0).unwrap();
        let r = full_report(&s.ensemble, &s.instrument).unwrap();
        let h = r.hall.as_ref().unwrap();
        assert!((h.b_nub - h.b_hall).abs() < 1e-9);
        assert!((r.b_sww - h.b_hall).abs() < 1e-9);
        assert!((h.b2 - h.b_scu).abs() < 1e-9);
        assert!(r.b1 < 0.0);
        assert!(r.all_pass(), "{:?}", r.invariants());
    }

    #[test]
    fn example_b_report() {
        let s = two_level_example_b(30.0).unwrap();
        let r = full_report(&s.ensemble, &s.instrument).unwrap();
        assert!((r.i_c - 0.21822).abs() < 1e-4);
        assert!((r.b_subent - 0.118467).abs() < 1e-5);
        let h = r.hall.as_ref().unwrap();
        // independent oracle values
        assert!((r.b1 - 0.004108977).abs() < 1e-8, "{}", r.b1);
        assert!((h.b2 - 0.151405094).abs() < 1e-8, "{}", h.b2);
        assert!(r.all_pass());
        let s = two_level_example_b(1.0).unwrap();
        let r = full_report(&s.ensemble, &s.instrument).unwrap();
        assert!((r.b1 + 0.071716065).abs() < 1e-8, "{}", r.b1);
        assert!((r.hall.unwrap().b2 - 0.097240227).abs() < 1e-8);
    }

    #[test]
    fn von_neumann_on_average_gives_b1_equal_nlb_equal_ic() {
        let mut rng = rng_for(5, 0);
        let e = crate::scenarios::random_ensemble(&mut rng, 3, 3);
        let s = von_neumann_scenario(e).unwrap();
        let r = full_report(&s.ensemble, &s.instrument).unwrap();
        let h = r.hall.unwrap();
        assert!((r.b1 - r.i_c).abs() < 1e-9, "{} vs {}", r.b1, r.i_c);
        assert!((h.b_nlb - r.i_c).abs() < 1e-9);
        assert!(h.b_scu <= r.i_c + 1e-9);
    }

    #[test]
    fn pure_ensemble_sww_is_information_gain() {
        let mut rng = rng_for(9, 0);
        let e = random_pure_ensemble(&mut rng, 2, 3);
        let inst = crate::scenarios::random_instrument(&mut rng, 2, 3, 1);
        let data = measurement_data(&e, &inst).unwrap();
        let sww = sww_from(&data);
        assert!((sww.value - iq_gain(&inst, &data.eta_i).unwrap()).abs() < 1e-9);
        let r = full_report(&e, &inst).unwrap();
        let h = r.hall.unwrap();
        assert!(h.b_nub <= h.b_hall + 1e-9 && h.b_hall <= r.b_hlv + 1e-9);
    }

    #[test]
    fn unitary_gain_is_zero() {
        let mut rng = rng_for(1, 0);
        let u = crate::scenarios::random_unitary(&mut rng, 3);
        let inst = Instrument::single(u).unwrap();
        let rho = crate::scenarios::random_state(&mut rng, 3);
        assert!(iq_gain(&inst, &rho).unwrap().abs() < 1e-12);
    }

    #[test]
    fn single_letter_report_is_zero() {
        let s = random_scenario(3, 2, 1, 3, 2).unwrap();
        let r = full_report(&s.ensemble, &s.instrument).unwrap();
        for v in [r.i_c, r.b_hlv, r.b_sww, r.b_subent] {
            assert!(v.abs() < 1e-12);
        }
        let h = r.hall.unwrap();
        for v in [h.b_nub, h.b_nlb, h.b_scu] {
            assert!(v.abs() < 1e-9);
        }
    }

    #[test]
    fn singular_average_marks_hall_unavailable() {
        let e = Ensemble::new(
            ProbVector::from_weights(vec![0.5, 0.5]).unwrap(),
            vec![DensityMatrix::basis(2, 0), DensityMatrix::basis(2, 0)],
        )
        .unwrap();
        let inst = crate::scenarios::counting_instrument_a(1.0).unwrap();
        let r = full_report(&e, &inst).unwrap();
        assert!(r.hall.is_none() && r.hall_unavailable.is_some());
        assert!(r.all_pass());
    }

    #[test]
    fn sww_forms_agree_on_random_scenarios() {
        for seed in 0..50 {
            let s = random_scenario(seed, 2 + seed as usize % 2, 3, 3, 2).unwrap();
            let r = full_report(&s.ensemble, &s.instrument).unwrap();
            assert!((r.b_sww - r.b_sww_symmetric).abs() < 1e-9);
            assert!(r.all_pass(), "seed {seed}: {:?}", r.invariants());
        }
    }
}
