//! Hall's transformation: the dual instrument over the alphabet and the
//! state families derived from an ensemble and a POVM.

use crate::error::{Error, Result};
use crate::instrument::{Instrument, Operation, Povm};
use crate::matrix::{inv_sqrt, psd_sqrt, HermitianMatrix, SquareMatrix, INVERTIBILITY_TOL};
use crate::states::{
    weighted_sum, DensityMatrix, Ensemble, JointDistribution, Marginals, ZERO_PROB_TOL,
};

/// Everything Hall's construction produces for one (ensemble, POVM) pair.
#[derive(Clone, Debug)]
pub struct HallPackage {
    /// The dual instrument over the alphabet, Kraus `M(a)` per letter.
    pub instrument: Instrument,
    /// Its POVM `E_J(a) = M(a)^† M(a)`.
    pub povm: Povm,
    /// Joint letter/outcome distribution of the original problem.
    pub joint: JointDistribution,
    pub marginals: Marginals,
    /// `sigma(w) = eta^{1/2} E(w) eta^{1/2} / p_f(w)`.
    pub sigma: Vec<DensityMatrix>,
    /// `xi(a) = sum_w p_{f|i}(w|a) sigma(w)`.
    pub xi: Vec<DensityMatrix>,
    /// `epsilon(w) = sum_a p_{i|f}(a|w) rho(a)`.
    pub epsilon: Vec<DensityMatrix>,
    /// `pi_j[w][a]`: a posteriori state of the dual instrument on `sigma(w)`.
    pub pi_j: Vec<Vec<DensityMatrix>>,
    /// `eta_j[w] = sum_a M(a) sigma(w) M(a)^†`.
    pub eta_j: Vec<DensityMatrix>,
    /// Outcomes with vanishing probability, whose states are completions.
    pub completed_outcomes: Vec<bool>,
}

fn check_invertible(eta: &DensityMatrix) -> Result<()> {
    let min = eta.spectrum().eigenvalues.first().copied().unwrap_or(0.0);
    if min <= INVERTIBILITY_TOL {
        return Err(Error::SingularAverageState(min));
    }
    Ok(())
}

/// Joint distribution `p_i(a) Tr{E(w) rho(a)}`, each row renormalized so
/// that small completeness errors of the POVM do not leak into the total.
pub fn joint_distribution(e: &Ensemble, povm: &Povm) -> Result<JointDistribution> {
    if e.dim() != povm.dim() {
        return Err(Error::DimensionMismatch(e.dim(), povm.dim()));
    }
    let table = e
        .states()
        .iter()
        .zip(e.prior().weights())
        .map(|(rho, &p)| {
            let raw: Vec<f64> =
                povm.elements().iter().map(|el| el.trace_product(rho.matrix()).max(0.0)).collect();
            let total: f64 = raw.iter().sum();
            raw.iter().map(|x| p * x / total).collect()
        })
        .collect();
    JointDistribution::new(e.labels().to_vec(), povm.labels().to_vec(), table)
}

pub fn build_hall(e: &Ensemble, povm: &Povm) -> Result<HallPackage> {
    let d = e.dim();
    let eta = e.average();
    check_invertible(&eta)?;
    let eta_root = psd_sqrt(eta.hermitian())?;
    let eta_inv_root = inv_sqrt(eta.hermitian())?;

    let joint = joint_distribution(e, povm)?;
    let marginals = joint.marginals();

    let kraus: Vec<SquareMatrix> = e
        .states()
        .iter()
        .zip(e.prior().weights())
        .map(|(rho, &p)| {
            let root = psd_sqrt(rho.hermitian())?;
            Ok((root.matrix() * eta_inv_root.matrix()).scale(p.sqrt()))
        })
        .collect::<Result<_>>()?;
    let ops = kraus.iter().map(|m| Operation::new(vec![m.clone()])).collect::<Result<Vec<_>>>()?;
    let instrument = Instrument::new(e.labels().to_vec(), ops)?;
    let povm_j = instrument.povm();

    let p_f = marginals.cols.weights().to_vec();
    let mut sigma = Vec::with_capacity(p_f.len());
    let mut completed = Vec::with_capacity(p_f.len());
    for (el, &pf) in povm.elements().iter().zip(&p_f) {
        if pf <= ZERO_PROB_TOL {
            sigma.push(DensityMatrix::maximally_mixed(d));
            completed.push(true);
        } else {
            let s = HermitianMatrix::from_hermitian_part(&eta_root.matrix().sandwich(el.matrix()));
            sigma.push(DensityMatrix::from_unnormalized(&s)?);
            completed.push(false);
        }
    }

    let xi = marginals
        .col_given_row
        .iter()
        .map(|cond| DensityMatrix::from_unnormalized(&weighted_sum(cond, &sigma)))
        .collect::<Result<Vec<_>>>()?;
    let epsilon = marginals
        .row_given_col
        .iter()
        .map(|cond| DensityMatrix::from_unnormalized(&weighted_sum(cond, e.states())))
        .collect::<Result<Vec<_>>>()?;

    let mut pi_j = Vec::with_capacity(sigma.len());
    let mut eta_j = Vec::with_capacity(sigma.len());
    for s in &sigma {
        let blocks: Vec<HermitianMatrix> = kraus
            .iter()
            .map(|m| HermitianMatrix::from_hermitian_part(&m.sandwich(s.matrix())))
            .collect();
        let row = blocks
            .iter()
            .map(|b| {
                if b.trace() <= ZERO_PROB_TOL {
                    Ok(DensityMatrix::maximally_mixed(d))
                } else {
                    DensityMatrix::from_unnormalized(b)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let total = blocks.iter().skip(1).fold(blocks[0].clone(), |acc, b| acc.add(b));
        eta_j.push(DensityMatrix::from_unnormalized(&total)?);
        pi_j.push(row);
    }

    Ok(HallPackage {
        instrument,
        povm: povm_j,
        joint,
        marginals,
        sigma,
        xi,
        epsilon,
        pi_j,
        eta_j,
        completed_outcomes: completed,
    })
}

/// Joint distribution of the transformed problem: `{p_f, sigma}` measured
/// by `E_J`, rows indexed by outcomes and columns by letters.
pub fn hall_joint(pkg: &HallPackage) -> Result<JointDistribution> {
    let p_f = pkg.marginals.cols.weights();
    let table = pkg
        .sigma
        .iter()
        .zip(p_f)
        .map(|(s, &pf)| {
            let raw: Vec<f64> = pkg
                .povm
                .elements()
                .iter()
                .map(|el| el.trace_product(s.matrix()).max(0.0))
                .collect();
            let total: f64 = raw.iter().sum();
            raw.iter().map(|x| pf * x / total).collect()
        })
        .collect();
    JointDistribution::new(
        pkg.joint.col_labels().to_vec(),
        pkg.joint.row_labels().to_vec(),
        table,
    )
}

/// Largest deviation among the package's bookkeeping identities: dual
/// completeness and the three average-state identities.
pub fn hall_residuals(e: &Ensemble, pkg: &HallPackage) -> HallResiduals {
    let eta = e.average();
    let d = e.dim();
    let mut sum = SquareMatrix::zeros(d);
    for el in pkg.povm.elements() {
        sum = &sum + el.matrix();
    }
    let completeness = sum.max_abs_diff(&SquareMatrix::identity(d));
    let p_f = pkg.marginals.cols.weights();
    let avg = |w: &[f64], s: &[DensityMatrix]| weighted_sum(w, s).matrix().max_abs_diff(eta.matrix());
    HallResiduals {
        completeness,
        sigma_average: avg(p_f, &pkg.sigma),
        xi_average: avg(e.prior().weights(), &pkg.xi),
        epsilon_average: avg(p_f, &pkg.epsilon),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HallResiduals {
    pub completeness: f64,
    pub sigma_average: f64,
    pub xi_average: f64,
    pub epsilon_average: f64,
}

impl HallResiduals {
    pub fn max(&self) -> f64 {
        self.completeness.max(self.sigma_average).max(self.xi_average).max(self.epsilon_average)
    }
}

/// Smallest eigenvalue of the average state, for callers that want to test
/// invertibility before building the package.
pub fn min_average_eigenvalue(e: &Ensemble) -> f64 {
    e.average().spectrum().eigenvalues[0]
}
