//! Instruments with finitely many outcomes, stored as Kraus families, and
//! the channels built from them.

use crate::error::{Error, Result};
use crate::matrix::{eigh, psd_sqrt, HermitianMatrix, SquareMatrix};
use crate::states::{
    hybrid_decompose, DensityMatrix, HybridDecomposition, HybridState, ProbVector, ZERO_PROB_TOL,
};

/// Tolerance on `sum_w E(w) = 1`.
pub const COMPLETENESS_TOL: f64 = 1e-10;

/// One completely positive map `rho -> sum_k V_k rho V_k^†`.
#[derive(Clone, Debug, PartialEq)]
pub struct Operation {
    kraus: Vec<SquareMatrix>,
}

impl Operation {
    pub fn new(kraus: Vec<SquareMatrix>) -> Result<Self> {
        let Some(first) = kraus.first() else {
            return Err(Error::InvalidArgument("operation without Kraus operators".into()));
        };
        let d = first.dim();
        if let Some(bad) = kraus.iter().find(|k| k.dim() != d) {
            return Err(Error::DimensionMismatch(bad.dim(), d));
        }
        Ok(Operation { kraus })
    }

    pub fn kraus(&self) -> &[SquareMatrix] {
        &self.kraus
    }

    pub fn dim(&self) -> usize {
        self.kraus[0].dim()
    }

    pub fn apply(&self, rho: &SquareMatrix) -> HermitianMatrix {
        let mut acc = SquareMatrix::zeros(self.dim());
        for v in &self.kraus {
            acc = &acc + &v.sandwich(rho);
        }
        HermitianMatrix::from_hermitian_part(&acc)
    }

    /// `sum_k V_k^† V_k`.
    pub fn effect(&self) -> HermitianMatrix {
        let mut acc = SquareMatrix::zeros(self.dim());
        for v in &self.kraus {
            acc = &acc + &(&v.adjoint() * v);
        }
        HermitianMatrix::from_hermitian_part(&acc)
    }
}

/// An instrument: one operation per outcome, with effects summing to the
/// identity.
#[derive(Clone, Debug, PartialEq)]
pub struct Instrument {
    labels: Vec<String>,
    ops: Vec<Operation>,
}

impl Instrument {
    pub fn new(labels: Vec<String>, ops: Vec<Operation>) -> Result<Self> {
        if labels.len() != ops.len() {
            return Err(Error::DimensionMismatch(labels.len(), ops.len()));
        }
        if ops.is_empty() {
            return Err(Error::InvalidArgument("instrument without outcomes".into()));
        }
        let d = ops[0].dim();
        if let Some(bad) = ops.iter().find(|o| o.dim() != d) {
            return Err(Error::DimensionMismatch(bad.dim(), d));
        }
        // labels must be unique; ProbVector-style check
        ProbVector::uniform(labels.clone())?;
        let inst = Instrument { labels, ops };
        let residual = completeness_residual(&inst.effects());
        if residual > COMPLETENESS_TOL {
            return Err(Error::NormalizationError(residual));
        }
        Ok(inst)
    }

    /// Single-outcome instrument with one Kraus operator.
    pub fn single(kraus: SquareMatrix) -> Result<Self> {
        Self::new(vec!["0".into()], vec![Operation::new(vec![kraus])?])
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn ops(&self) -> &[Operation] {
        &self.ops
    }

    pub fn dim(&self) -> usize {
        self.ops[0].dim()
    }

    pub fn n_outcomes(&self) -> usize {
        self.ops.len()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// At most one Kraus operator per outcome.
    pub fn is_single_kraus(&self) -> bool {
        self.ops.iter().all(|o| o.kraus.len() == 1)
    }

    fn effects(&self) -> Vec<HermitianMatrix> {
        self.ops.iter().map(Operation::effect).collect()
    }

    pub fn povm(&self) -> Povm {
        Povm { labels: self.labels.clone(), elements: self.effects() }
    }
}

fn completeness_residual(elements: &[HermitianMatrix]) -> f64 {
    let d = elements[0].dim();
    let mut sum = SquareMatrix::zeros(d);
    for e in elements {
        sum = &sum + e.matrix();
    }
    sum.max_abs_diff(&SquareMatrix::identity(d))
}

/// A POV measure.
#[derive(Clone, Debug, PartialEq)]
pub struct Povm {
    labels: Vec<String>,
    elements: Vec<HermitianMatrix>,
}

impl Povm {
    pub fn new(labels: Vec<String>, elements: Vec<HermitianMatrix>) -> Result<Self> {
        if labels.len() != elements.len() {
            return Err(Error::DimensionMismatch(labels.len(), elements.len()));
        }
        if elements.is_empty() {
            return Err(Error::InvalidArgument("POVM without elements".into()));
        }
        ProbVector::uniform(labels.clone())?;
        let d = elements[0].dim();
        for e in &elements {
            if e.dim() != d {
                return Err(Error::DimensionMismatch(e.dim(), d));
            }
            eigh(e).clipped_eigenvalues()?;
        }
        let residual = completeness_residual(&elements);
        if residual > COMPLETENESS_TOL {
            return Err(Error::NormalizationError(residual));
        }
        Ok(Povm { labels, elements })
    }

    pub fn trivial(dim: usize) -> Self {
        Povm { labels: vec!["0".into()], elements: vec![HermitianMatrix::identity(dim)] }
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn elements(&self) -> &[HermitianMatrix] {
        &self.elements
    }

    pub fn dim(&self) -> usize {
        self.elements[0].dim()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// The Lüders instrument `rho -> E^{1/2} rho E^{1/2}`.
    pub fn luders(&self) -> Result<Instrument> {
        let ops = self
            .elements
            .iter()
            .map(|e| Operation::new(vec![psd_sqrt(e)?.into_matrix()]))
            .collect::<Result<Vec<_>>>()?;
        Instrument::new(self.labels.clone(), ops)
    }
}

pub fn povm_of(inst: &Instrument) -> Povm {
    inst.povm()
}

/// Renormalizes raw outcome weights whose sum deviates from one by at most
/// the completeness tolerance.
fn probs_from_raw(labels: &[String], raw: Vec<f64>) -> ProbVector {
    let clipped: Vec<f64> = raw.iter().map(|&x| x.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    let weights = clipped.iter().map(|x| x / total).collect();
    ProbVector::new(labels.to_vec(), weights).expect("normalized outcome probabilities")
}

/// `p_rho(w) = Tr{E(w) rho}`.
pub fn outcome_probs(povm: &Povm, rho: &DensityMatrix) -> Result<ProbVector> {
    if povm.dim() != rho.dim() {
        return Err(Error::DimensionMismatch(povm.dim(), rho.dim()));
    }
    let raw = povm.elements.iter().map(|e| e.trace_product(rho.matrix())).collect();
    Ok(probs_from_raw(&povm.labels, raw))
}

/// `w -> O(w)[rho]`.
pub fn channel_lambda_i(inst: &Instrument, rho: &DensityMatrix) -> Result<HybridState> {
    if inst.dim() != rho.dim() {
        return Err(Error::DimensionMismatch(inst.dim(), rho.dim()));
    }
    let blocks: Vec<HermitianMatrix> = inst.ops.iter().map(|o| o.apply(rho.matrix())).collect();
    let total: f64 = blocks.iter().map(|b| b.trace()).sum();
    let blocks = blocks.iter().map(|b| b.scale(1.0 / total)).collect();
    HybridState::new(inst.labels.clone(), blocks)
}

/// Outcome probabilities and a posteriori states for every outcome.
pub fn a_posteriori_all(inst: &Instrument, rho: &DensityMatrix) -> Result<HybridDecomposition> {
    Ok(hybrid_decompose(&channel_lambda_i(inst, rho)?))
}

/// `O(w)[rho] / p_rho(w)`; the flag is set when `p_rho(w)` vanishes and the
/// maximally mixed completion is returned.
pub fn a_posteriori(inst: &Instrument, rho: &DensityMatrix, omega: &str) -> Result<(DensityMatrix, bool)> {
    let k = inst.index_of(omega).ok_or_else(|| Error::UnknownOutcome(omega.to_string()))?;
    if inst.dim() != rho.dim() {
        return Err(Error::DimensionMismatch(inst.dim(), rho.dim()));
    }
    let block = inst.ops[k].apply(rho.matrix());
    if block.trace() <= ZERO_PROB_TOL {
        return Ok((DensityMatrix::maximally_mixed(rho.dim()), true));
    }
    Ok((DensityMatrix::from_unnormalized(&block)?, false))
}

/// `I(Omega)[rho] = sum_w O(w)[rho]`.
pub fn a_priori(inst: &Instrument, rho: &DensityMatrix) -> Result<DensityMatrix> {
    Ok(quantum_part(&channel_lambda_i(inst, rho)?))
}

pub fn classical_part(s: &HybridState) -> ProbVector {
    let raw = s.blocks().iter().map(|b| b.trace()).collect();
    probs_from_raw(s.labels(), raw)
}

pub fn quantum_part(s: &HybridState) -> DensityMatrix {
    let sum = s.blocks().iter().skip(1).fold(s.blocks()[0].clone(), |acc, b| acc.add(b));
    DensityMatrix::from_unnormalized(&sum).expect("sum of hybrid blocks is a state")
}

/// The `phi`-transpose of the measurement channel:
/// `f -> sum_w f(w)/p_phi(w) phi^{1/2} E(w) phi^{1/2}`.
pub fn transpose_channel(povm: &Povm, phi: &DensityMatrix, f: &ProbVector) -> Result<DensityMatrix> {
    if f.labels() != povm.labels() {
        return Err(Error::LabelMismatch);
    }
    let p_phi = outcome_probs(povm, phi)?;
    let root = psd_sqrt(phi.hermitian())?;
    let mut acc = SquareMatrix::zeros(phi.dim());
    for ((e, &fw), (label, &pw)) in
        povm.elements.iter().zip(f.weights()).zip(povm.labels.iter().zip(p_phi.weights()))
    {
        if pw <= ZERO_PROB_TOL {
            return Err(Error::ZeroReferenceProbability(label.clone()));
        }
        if fw != 0.0 {
            acc = &acc + &root.matrix().sandwich(e.matrix()).scale(fw / pw);
        }
    }
    DensityMatrix::from_unnormalized(&HermitianMatrix::from_hermitian_part(&acc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::C64;
    use crate::states::index_labels;

    fn counting(x: f64) -> Instrument {
        let k0 = SquareMatrix::from_diagonal(&[(-x / 2.0).exp(), 1.0]);
        let mut k1 = SquareMatrix::zeros(2);
        k1[(1, 0)] = C64::new((1.0 - (-x).exp()).sqrt(), 0.0);
        Instrument::new(
            index_labels(2),
            vec![Operation::new(vec![k0]).unwrap(), Operation::new(vec![k1]).unwrap()],
        )
        .unwrap()
    }

    fn eta() -> DensityMatrix {
        DensityMatrix::from_real_rows(&[&[0.25, 0.25], &[0.25, 0.75]]).unwrap()
    }

    #[test]
    fn trivial_instrument() {
        let inst = Instrument::single(SquareMatrix::identity(2)).unwrap();
        let povm = inst.povm();
        assert_eq!(povm.elements()[0], HermitianMatrix::identity(2));
        assert_eq!(outcome_probs(&povm, &eta()).unwrap().weights(), &[1.0]);
        let h = channel_lambda_i(&inst, &eta()).unwrap();
        assert!(h.blocks()[0].matrix().max_abs_diff(eta().matrix()) < 1e-15);
    }

    #[test]
    fn counting_povm_and_probabilities() {
        let x = 1.0;
        let e = (-x as f64).exp();
        let povm = counting(x).povm();
        let expect = HermitianMatrix::from_diagonal(&[1.0 - e, 0.0]);
        assert!(povm.elements()[1].matrix().max_abs_diff(expect.matrix()) < 1e-15);
        let p = outcome_probs(&povm, &eta()).unwrap();
        assert!((p.weights()[0] - (3.0 + e) / 4.0).abs() < 1e-15);
        assert!((p.weights()[0] - 0.841970).abs() < 1e-6);
    }

    #[test]
    fn incomplete_instrument_is_rejected() {
        let k = SquareMatrix::from_diagonal(&[1.0, 0.5]);
        let r = Instrument::new(index_labels(1), vec![Operation::new(vec![k]).unwrap()]);
        assert!(matches!(r, Err(Error::NormalizationError(_))));
    }

    #[test]
    fn detection_leaves_ground_state() {
        let plus = DensityMatrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]).unwrap();
        let (post, flag) = a_posteriori(&counting(0.7), &plus, "1").unwrap();
        assert!(!flag);
        assert!(post.matrix().max_abs_diff(DensityMatrix::basis(2, 1).matrix()) < 1e-14);
        let ground = DensityMatrix::basis(2, 1);
        let (post, flag) = a_posteriori(&counting(0.7), &ground, "1").unwrap();
        assert!(flag);
        assert_eq!(post, DensityMatrix::maximally_mixed(2));
        assert!(matches!(a_posteriori(&counting(0.7), &ground, "9"), Err(Error::UnknownOutcome(_))));
    }

    #[test]
    fn a_priori_values() {
        let x: f64 = 1.0;
        let e = (-x).exp();
        let ground = DensityMatrix::basis(2, 1);
        let eta_t0 = a_priori(&counting(x), &ground).unwrap();
        assert!(eta_t0.matrix().max_abs_diff(ground.matrix()) < 1e-15);
        let eta_t = a_priori(&counting(x), &eta()).unwrap();
        let det = eta_t.hermitian().det_from_spectrum();
        assert!((det - e / 16.0 * (3.0 - e)).abs() < 1e-12);
        assert!((det - 0.0605189).abs() < 1e-6);
    }

    #[test]
    fn unitary_a_priori() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let u = SquareMatrix::from_real_rows(&[&[h, h], &[h, -h]]);
        let inst = Instrument::single(u.clone()).unwrap();
        let out = a_priori(&inst, &eta()).unwrap();
        assert!(out.matrix().max_abs_diff(&u.sandwich(eta().matrix())) < 1e-15);
    }

    #[test]
    fn channel_parts() {
        let x: f64 = 1.3;
        let inst = counting(x);
        let h = channel_lambda_i(&inst, &eta()).unwrap();
        let block1 = HermitianMatrix::from_diagonal(&[0.0, (1.0 - (-x).exp()) / 4.0]);
        assert!(h.blocks()[1].matrix().max_abs_diff(block1.matrix()) < 1e-15);
        let c = classical_part(&h);
        let p = outcome_probs(&inst.povm(), &eta()).unwrap();
        for (a, b) in c.weights().iter().zip(p.weights()) {
            assert!((a - b).abs() < 1e-15);
        }
        let q = quantum_part(&h);
        assert!(q.matrix().max_abs_diff(a_priori(&inst, &eta()).unwrap().matrix()) < 1e-15);
        let prod = HybridState::product(&p, &eta());
        assert_eq!(classical_part(&prod), p);
        assert!(quantum_part(&prod).matrix().max_abs_diff(eta().matrix()) < 1e-15);
    }

    #[test]
    fn transpose_channel_values() {
        let x: f64 = 1.0;
        let e = (-x).exp();
        let povm = counting(x).povm();
        let p = outcome_probs(&povm, &eta()).unwrap();
        let back = transpose_channel(&povm, &eta(), &p).unwrap();
        assert!(back.matrix().max_abs_diff(eta().matrix()) < 1e-14);
        let point = ProbVector::from_weights(vec![1.0, 0.0]).unwrap();
        let sigma0 = transpose_channel(&povm, &eta(), &point).unwrap();
        let det = sigma0.hermitian().det_from_spectrum();
        assert!((det - 2.0 * e / (3.0 + e).powi(2)).abs() < 1e-12);
        assert!((det - 0.064867).abs() < 1e-6);
        let triv = transpose_channel(&Povm::trivial(2), &eta(), &ProbVector::from_weights(vec![1.0]).unwrap())
            .unwrap();
        assert!(triv.matrix().max_abs_diff(eta().matrix()) < 1e-14);
    }

    #[test]
    fn transpose_requires_positive_reference() {
        let povm = counting(1.0).povm();
        let ground = DensityMatrix::basis(2, 1);
        let f = ProbVector::from_weights(vec![0.5, 0.5]).unwrap();
        assert!(matches!(
            transpose_channel(&povm, &ground, &f),
            Err(Error::ZeroReferenceProbability(_))
        ));
    }

    #[test]
    fn luders_instrument_of_projective_povm() {
        let povm = Povm::new(
            index_labels(2),
            vec![HermitianMatrix::from_diagonal(&[1.0, 0.0]), HermitianMatrix::from_diagonal(&[0.0, 1.0])],
        )
        .unwrap();
        let inst = povm.luders().unwrap();
        assert!(inst.is_single_kraus());
        let (post, _) = a_posteriori(&inst, &eta(), "0").unwrap();
        assert!(post.matrix().max_abs_diff(DensityMatrix::basis(2, 0).matrix()) < 1e-14);
    }
}
