//! States on the classical algebra, on `M_d`, and on the hybrid algebra of
//! outcome-indexed matrices, together with ensembles, joint input/output
//! distributions and the tripartite letter/system/outcome state.
//!
//! Labels are kept in declaration order and every map-like structure
//! iterates in that order. Wherever a conditional object is undefined
//! because its conditioning probability vanishes (at most `1e-12`), it is
//! completed with the maximally mixed state or the uniform distribution and
//! flagged, so it never carries weight downstream.

use crate::error::{Error, Result};
use crate::matrix::{eigh, C64, HermitianMatrix, SquareMatrix, Spectrum};

/// Probabilities at or below this value are treated as exactly zero.
pub const ZERO_PROB_TOL: f64 = 1e-12;
/// Tolerance on unit total mass / unit trace.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// Labels `"0", "1", ..., "n-1"`.
pub fn index_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

fn check_unique(labels: &[String]) -> Result<()> {
    for (i, a) in labels.iter().enumerate() {
        if labels[..i].contains(a) {
            return Err(Error::InvalidArgument(format!("duplicate label `{a}`")));
        }
    }
    Ok(())
}

/// A probability vector over an ordered finite label set.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbVector {
    labels: Vec<String>,
    weights: Vec<f64>,
}

impl ProbVector {
    /// Validates nonnegativity and unit mass (`1e-12`). Weights in
    /// `[-1e-12, 0)` are clamped to zero.
    pub fn new(labels: Vec<String>, weights: Vec<f64>) -> Result<Self> {
        if labels.len() != weights.len() {
            return Err(Error::DimensionMismatch(labels.len(), weights.len()));
        }
        if labels.is_empty() {
            return Err(Error::InvalidProbability("empty label set".into()));
        }
        check_unique(&labels)?;
        let mut clean = Vec::with_capacity(weights.len());
        for &w in &weights {
            if !w.is_finite() || w < -ZERO_PROB_TOL {
                return Err(Error::InvalidProbability(format!("weight {w} is not a probability")));
            }
            clean.push(w.max(0.0));
        }
        let total: f64 = clean.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidProbability(format!("weights sum to {total}")));
        }
        Ok(ProbVector { labels, weights: clean })
    }

    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        Self::new(index_labels(weights.len()), weights)
    }

    pub fn uniform(labels: Vec<String>) -> Result<Self> {
        let n = labels.len();
        Self::new(labels, vec![1.0 / n as f64; n])
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn get(&self, label: &str) -> Option<f64> {
        self.index_of(label).map(|i| self.weights[i])
    }
}

/// A statistical operator: PSD (after clipping) with unit trace.
///
/// The clipped spectrum is computed once at construction.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    mat: HermitianMatrix,
    spectrum: Spectrum,
}

impl DensityMatrix {
    pub fn new(mat: HermitianMatrix) -> Result<Self> {
        let tr = mat.trace();
        if (tr - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidState(format!("trace is {tr}")));
        }
        Self::with_spectrum(mat)
    }

    /// Normalizes a nonzero PSD matrix to unit trace.
    pub fn from_unnormalized(mat: &HermitianMatrix) -> Result<Self> {
        let tr = mat.trace();
        if !(tr > 0.0) {
            return Err(Error::InvalidState(format!("trace is {tr}")));
        }
        Self::with_spectrum(mat.scale(1.0 / tr))
    }

    fn with_spectrum(mat: HermitianMatrix) -> Result<Self> {
        let mut spectrum = eigh(&mat);
        spectrum.eigenvalues = spectrum.clipped_eigenvalues()?;
        Ok(DensityMatrix { mat, spectrum })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::with_spectrum(HermitianMatrix::identity(dim).scale(1.0 / dim as f64))
            .expect("maximally mixed state is valid")
    }

    /// The pure state `|u><u| / <u|u>`.
    pub fn pure(ket: &[C64]) -> Result<Self> {
        Self::from_unnormalized(&HermitianMatrix::projector(ket))
    }

    pub fn pure_real(ket: &[f64]) -> Result<Self> {
        let v: Vec<C64> = ket.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::pure(&v)
    }

    /// Basis projector `|k><k|` in dimension `dim`.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut diag = vec![0.0; dim];
        diag[k] = 1.0;
        Self::with_spectrum(HermitianMatrix::from_diagonal(&diag)).expect("basis state is valid")
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::new(HermitianMatrix::new(SquareMatrix::from_real_rows(rows))?)
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn hermitian(&self) -> &HermitianMatrix {
        &self.mat
    }

    pub fn matrix(&self) -> &SquareMatrix {
        self.mat.matrix()
    }

    /// Clipped eigenvalues, ascending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.spectrum.eigenvalues
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    /// `1 - Tr{rho^2}`.
    pub fn impurity(&self) -> f64 {
        1.0 - self.eigenvalues().iter().map(|x| x * x).sum::<f64>()
    }
}

/// Prior probabilities over an alphabet together with one state per letter.
#[derive(Clone, Debug, PartialEq)]
pub struct Ensemble {
    prior: ProbVector,
    states: Vec<DensityMatrix>,
}

impl Ensemble {
    pub fn new(prior: ProbVector, states: Vec<DensityMatrix>) -> Result<Self> {
        if prior.len() != states.len() {
            return Err(Error::DimensionMismatch(prior.len(), states.len()));
        }
        let d = states[0].dim();
        if let Some(bad) = states.iter().find(|s| s.dim() != d) {
            return Err(Error::DimensionMismatch(bad.dim(), d));
        }
        Ok(Ensemble { prior, states })
    }

    pub fn prior(&self) -> &ProbVector {
        &self.prior
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    pub fn labels(&self) -> &[String] {
        self.prior.labels()
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn average(&self) -> DensityMatrix {
        average_state(self)
    }
}

/// `sum_a p(a) rho(a)`, accumulated without renormalization.
pub fn weighted_sum(weights: &[f64], states: &[DensityMatrix]) -> HermitianMatrix {
    let d = states[0].dim();
    let mut acc = SquareMatrix::zeros(d);
    for (w, s) in weights.iter().zip(states) {
        if *w != 0.0 {
            acc = &acc + &s.matrix().scale(*w);
        }
    }
    HermitianMatrix::from_hermitian_part(&acc)
}

/// The average state of an ensemble.
pub fn average_state(e: &Ensemble) -> DensityMatrix {
    DensityMatrix::from_unnormalized(&weighted_sum(e.prior.weights(), &e.states))
        .expect("convex combination of states is a state")
}

/// A state on the hybrid algebra: outcome-indexed PSD blocks with unit
/// total trace.
#[derive(Clone, Debug, PartialEq)]
pub struct HybridState {
    labels: Vec<String>,
    blocks: Vec<HermitianMatrix>,
}

/// Result of splitting a hybrid state into its classical part and
/// conditional quantum states.
#[derive(Clone, Debug, PartialEq)]
pub struct HybridDecomposition {
    pub probs: ProbVector,
    pub states: Vec<DensityMatrix>,
    /// `true` where the probability vanished and the state is the
    /// maximally mixed completion.
    pub completed: Vec<bool>,
}

impl HybridState {
    pub fn new(labels: Vec<String>, blocks: Vec<HermitianMatrix>) -> Result<Self> {
        if labels.len() != blocks.len() {
            return Err(Error::DimensionMismatch(labels.len(), blocks.len()));
        }
        if blocks.is_empty() {
            return Err(Error::InvalidState("hybrid state without blocks".into()));
        }
        check_unique(&labels)?;
        let d = blocks[0].dim();
        let mut total = 0.0;
        for b in &blocks {
            if b.dim() != d {
                return Err(Error::DimensionMismatch(b.dim(), d));
            }
            eigh(b).clipped_eigenvalues()?;
            total += b.trace();
        }
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidState(format!("total trace is {total}")));
        }
        Ok(HybridState { labels, blocks })
    }

    /// `{p(w) rho}`.
    pub fn product(p: &ProbVector, rho: &DensityMatrix) -> Self {
        let blocks = p.weights().iter().map(|&w| rho.hermitian().scale(w)).collect();
        HybridState { labels: p.labels().to_vec(), blocks }
    }

    /// `{p(a) rho(a)}`.
    pub fn from_ensemble(e: &Ensemble) -> Self {
        Self::from_parts(e.prior(), e.states())
    }

    /// `{p(w) sigma(w)}` for any probability vector and matching states.
    pub fn from_parts(p: &ProbVector, states: &[DensityMatrix]) -> Self {
        let blocks =
            p.weights().iter().zip(states).map(|(&w, s)| s.hermitian().scale(w)).collect();
        HybridState { labels: p.labels().to_vec(), blocks }
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn blocks(&self) -> &[HermitianMatrix] {
        &self.blocks
    }

    pub fn dim(&self) -> usize {
        self.blocks[0].dim()
    }

    pub fn decompose(&self) -> HybridDecomposition {
        hybrid_decompose(self)
    }
}

/// Splits `Sigma` into `p(w) = Tr{Sigma(w)}` and `sigma(w) = Sigma(w) / p(w)`.
pub fn hybrid_decompose(s: &HybridState) -> HybridDecomposition {
    let d = s.dim();
    let traces: Vec<f64> = s.blocks.iter().map(|b| b.trace().max(0.0)).collect();
    let total: f64 = traces.iter().sum();
    let weights: Vec<f64> = traces.iter().map(|t| t / total).collect();
    let mut states = Vec::with_capacity(weights.len());
    let mut completed = Vec::with_capacity(weights.len());
    for (b, &p) in s.blocks.iter().zip(&weights) {
        if p <= ZERO_PROB_TOL {
            states.push(DensityMatrix::maximally_mixed(d));
            completed.push(true);
        } else {
            states.push(DensityMatrix::from_unnormalized(b).expect("PSD block with positive trace"));
            completed.push(false);
        }
    }
    let probs = ProbVector { labels: s.labels.clone(), weights };
    HybridDecomposition { probs, states, completed }
}

/// A joint distribution over (input letter, output outcome) pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct JointDistribution {
    rows: Vec<String>,
    cols: Vec<String>,
    table: Vec<Vec<f64>>,
}

/// Marginals and both conditionals of a joint distribution.
#[derive(Clone, Debug, PartialEq)]
pub struct Marginals {
    pub rows: ProbVector,
    pub cols: ProbVector,
    /// `col_given_row[a][w] = p(w | a)`.
    pub col_given_row: Vec<Vec<f64>>,
    /// `row_given_col[w][a] = p(a | w)`.
    pub row_given_col: Vec<Vec<f64>>,
    pub completed_rows: Vec<bool>,
    pub completed_cols: Vec<bool>,
}

impl JointDistribution {
    pub fn new(rows: Vec<String>, cols: Vec<String>, table: Vec<Vec<f64>>) -> Result<Self> {
        if table.len() != rows.len() {
            return Err(Error::DimensionMismatch(table.len(), rows.len()));
        }
        check_unique(&rows)?;
        check_unique(&cols)?;
        let mut clean = Vec::with_capacity(table.len());
        let mut total = 0.0;
        for row in table {
            if row.len() != cols.len() {
                return Err(Error::DimensionMismatch(row.len(), cols.len()));
            }
            let mut r = Vec::with_capacity(row.len());
            for x in row {
                if !x.is_finite() || x < -ZERO_PROB_TOL {
                    return Err(Error::InvalidProbability(format!("entry {x}")));
                }
                total += x.max(0.0);
                r.push(x.max(0.0));
            }
            clean.push(r);
        }
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidProbability(format!("total mass is {total}")));
        }
        Ok(JointDistribution { rows, cols, table: clean })
    }

    pub fn product(p: &ProbVector, q: &ProbVector) -> Self {
        let table = p
            .weights()
            .iter()
            .map(|&a| q.weights().iter().map(|&b| a * b).collect())
            .collect();
        JointDistribution { rows: p.labels().to_vec(), cols: q.labels().to_vec(), table }
    }

    pub fn row_labels(&self) -> &[String] {
        &self.rows
    }

    pub fn col_labels(&self) -> &[String] {
        &self.cols
    }

    pub fn table(&self) -> &[Vec<f64>] {
        &self.table
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.table[row][col]
    }

    pub fn transpose(&self) -> Self {
        let table = (0..self.cols.len())
            .map(|j| self.table.iter().map(|r| r[j]).collect())
            .collect();
        JointDistribution { rows: self.cols.clone(), cols: self.rows.clone(), table }
    }

    /// Flattened into a probability vector over labels `"row|col"`.
    pub fn flatten(&self) -> ProbVector {
        let mut labels = Vec::new();
        let mut weights = Vec::new();
        for (r, row) in self.rows.iter().zip(&self.table) {
            for (c, &x) in self.cols.iter().zip(row) {
                labels.push(format!("{r}|{c}"));
                weights.push(x);
            }
        }
        ProbVector { labels, weights }
    }

    pub fn marginals(&self) -> Marginals {
        joint_marginals(self)
    }
}

/// Marginals and conditionals. Conditionals given a vanishing marginal are
/// uniform and flagged.
pub fn joint_marginals(j: &JointDistribution) -> Marginals {
    let nr = j.rows.len();
    let nc = j.cols.len();
    let row_w: Vec<f64> = j.table.iter().map(|r| r.iter().sum()).collect();
    let col_w: Vec<f64> = (0..nc).map(|c| j.table.iter().map(|r| r[c]).sum()).collect();

    let mut col_given_row = Vec::with_capacity(nr);
    let mut completed_rows = Vec::with_capacity(nr);
    for (r, &pr) in j.table.iter().zip(&row_w) {
        if pr <= ZERO_PROB_TOL {
            col_given_row.push(vec![1.0 / nc as f64; nc]);
            completed_rows.push(true);
        } else {
            col_given_row.push(r.iter().map(|x| x / pr).collect());
            completed_rows.push(false);
        }
    }
    let mut row_given_col = Vec::with_capacity(nc);
    let mut completed_cols = Vec::with_capacity(nc);
    for (c, &pc) in col_w.iter().enumerate() {
        if pc <= ZERO_PROB_TOL {
            row_given_col.push(vec![1.0 / nr as f64; nr]);
            completed_cols.push(true);
        } else {
            row_given_col.push(j.table.iter().map(|r| r[c] / pc).collect());
            completed_cols.push(false);
        }
    }
    Marginals {
        rows: ProbVector { labels: j.rows.clone(), weights: row_w },
        cols: ProbVector { labels: j.cols.clone(), weights: col_w },
        col_given_row,
        row_given_col,
        completed_rows,
        completed_cols,
    }
}

/// A state on `C(A) (x) M_d (x) C(Omega)`: blocks indexed by (letter, outcome).
#[derive(Clone, Debug, PartialEq)]
pub struct TripartiteState {
    alphabet: Vec<String>,
    outcomes: Vec<String>,
    /// `blocks[a][w]`.
    blocks: Vec<Vec<HermitianMatrix>>,
}

impl TripartiteState {
    pub fn new(
        alphabet: Vec<String>,
        outcomes: Vec<String>,
        blocks: Vec<Vec<HermitianMatrix>>,
    ) -> Result<Self> {
        if blocks.len() != alphabet.len() {
            return Err(Error::DimensionMismatch(blocks.len(), alphabet.len()));
        }
        if let Some(r) = blocks.iter().find(|r| r.len() != outcomes.len()) {
            return Err(Error::DimensionMismatch(r.len(), outcomes.len()));
        }
        let state = TripartiteState { alphabet, outcomes, blocks };
        // validates PSD blocks and unit total trace
        HybridState::new(state.flat_labels(), state.blocks.concat())?;
        Ok(state)
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn outcomes(&self) -> &[String] {
        &self.outcomes
    }

    pub fn block(&self, a: usize, w: usize) -> &HermitianMatrix {
        &self.blocks[a][w]
    }

    pub fn dim(&self) -> usize {
        self.blocks[0][0].dim()
    }

    fn flat_labels(&self) -> Vec<String> {
        self.alphabet
            .iter()
            .flat_map(|a| self.outcomes.iter().map(move |w| format!("{a}|{w}")))
            .collect()
    }

    /// The same state viewed as a hybrid state over `A x Omega`.
    pub fn as_hybrid(&self) -> HybridState {
        HybridState { labels: self.flat_labels(), blocks: self.blocks.concat() }
    }

    /// Marginal on letters and system: `{sum_w Sigma(a, w)}`.
    pub fn marginal_01(&self) -> HybridState {
        let blocks = self
            .blocks
            .iter()
            .map(|row| {
                row.iter().skip(1).fold(row[0].clone(), |acc, b| acc.add(b))
            })
            .collect();
        HybridState { labels: self.alphabet.clone(), blocks }
    }

    /// Classical marginal on letters and outcomes.
    pub fn marginal_02(&self) -> JointDistribution {
        let table = self
            .blocks
            .iter()
            .map(|row| row.iter().map(|b| b.trace().max(0.0)).collect())
            .collect();
        JointDistribution { rows: self.alphabet.clone(), cols: self.outcomes.clone(), table }
    }

    /// Marginal on system and outcomes: `{sum_a Sigma(a, w)}`.
    pub fn marginal_12(&self) -> HybridState {
        let blocks = (0..self.outcomes.len())
            .map(|w| {
                (1..self.alphabet.len())
                    .fold(self.blocks[0][w].clone(), |acc, a| acc.add(&self.blocks[a][w]))
            })
            .collect();
        HybridState { labels: self.outcomes.clone(), blocks }
    }

    pub fn marginal_0(&self) -> ProbVector {
        self.marginal_02().marginals().rows
    }

    pub fn marginal_1(&self) -> DensityMatrix {
        let all = self.blocks.concat();
        let sum = all.iter().skip(1).fold(all[0].clone(), |acc, b| acc.add(b));
        DensityMatrix::from_unnormalized(&sum).expect("marginal of a state is a state")
    }

    pub fn marginal_2(&self) -> ProbVector {
        self.marginal_02().marginals().cols
    }
}
