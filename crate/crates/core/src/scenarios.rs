//! Worked two-level examples, structured scenario families, and seeded
//! random generators for the property suites.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::error::{Error, Result};
use crate::instrument::{Instrument, Operation, Povm};
use crate::matrix::{inv_sqrt, HermitianMatrix, SquareMatrix, C64};
use crate::states::{index_labels, DensityMatrix, Ensemble, ProbVector};

/// Tolerance for user-supplied normalization data.
pub const SCENARIO_TOL: f64 = 1e-10;

/// Names accepted by [`builtin`].
pub const BUILTIN_NAMES: [&str; 2] = ["example_A", "example_B"];

/// An ensemble together with the instrument measuring it.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub label: String,
    pub parameters: Vec<(String, f64)>,
    pub ensemble: Ensemble,
    pub instrument: Instrument,
}

impl Scenario {
    pub fn new(label: impl Into<String>, ensemble: Ensemble, instrument: Instrument) -> Result<Self> {
        if ensemble.dim() != instrument.dim() {
            return Err(Error::DimensionMismatch(ensemble.dim(), instrument.dim()));
        }
        Ok(Scenario { label: label.into(), parameters: Vec::new(), ensemble, instrument })
    }

    pub fn with_parameter(mut self, name: &str, value: f64) -> Self {
        self.parameters.push((name.to_string(), value));
        self
    }

    pub fn parameter(&self, name: &str) -> Option<f64> {
        self.parameters.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    pub fn dim(&self) -> usize {
        self.ensemble.dim()
    }
}

fn check_time(x: f64) -> Result<()> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::InvalidArgument(format!("parameter x must be finite and >= 0, got {x}")));
    }
    Ok(())
}

/// `|0><1|` in the basis where index 0 is the excited level.
fn lowering() -> SquareMatrix {
    let mut m = SquareMatrix::zeros(2);
    m[(1, 0)] = C64::new(1.0, 0.0);
    m
}

/// Ground state and `|+>` with equal priors.
pub fn example_a_ensemble() -> Ensemble {
    let plus = DensityMatrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]).expect("valid state");
    Ensemble::new(
        ProbVector::from_weights(vec![0.5, 0.5]).expect("valid prior"),
        vec![DensityMatrix::basis(2, 1), plus],
    )
    .expect("valid ensemble")
}

/// Ground state and a mixed state with priors 4/9, 5/9; same average as
/// [`example_a_ensemble`].
pub fn example_b_ensemble() -> Ensemble {
    let mixed = DensityMatrix::from_real_rows(&[&[0.45, 0.45], &[0.45, 0.55]]).expect("valid state");
    Ensemble::new(
        ProbVector::from_weights(vec![4.0 / 9.0, 5.0 / 9.0]).expect("valid prior"),
        vec![DensityMatrix::basis(2, 1), mixed],
    )
    .expect("valid ensemble")
}

/// Photon counting on a decaying two-level atom, no dark counts.
pub fn counting_instrument_a(x: f64) -> Result<Instrument> {
    check_time(x)?;
    let decay = (-x).exp();
    let no_click = SquareMatrix::from_diagonal(&[(-x / 2.0).exp(), 1.0]);
    let click = lowering().scale((1.0 - decay).sqrt());
    Instrument::new(
        index_labels(2),
        vec![Operation::new(vec![no_click])?, Operation::new(vec![click])?],
    )
}

/// Photon counting with a 1/50 chance of a spurious outcome.
pub fn counting_instrument_b(x: f64) -> Result<Instrument> {
    check_time(x)?;
    let decay = (-x).exp();
    let id = SquareMatrix::identity(2);
    let no_click = vec![
        SquareMatrix::from_diagonal(&[(-x / 2.0).exp(), 1.0]).scale((49.0 / 50.0f64).sqrt()),
        id.scale((decay / 50.0).sqrt()),
    ];
    let click = vec![
        lowering().scale((49.0 / 50.0 * (1.0 - decay)).sqrt()),
        id.scale(((1.0 - decay) / 50.0).sqrt()),
    ];
    Instrument::new(index_labels(2), vec![Operation::new(no_click)?, Operation::new(click)?])
}

pub fn two_level_example_a(x: f64) -> Result<Scenario> {
    Ok(Scenario::new("example_A", example_a_ensemble(), counting_instrument_a(x)?)?
        .with_parameter("x", x))
}

pub fn two_level_example_b(x: f64) -> Result<Scenario> {
    Ok(Scenario::new("example_B", example_b_ensemble(), counting_instrument_b(x)?)?
        .with_parameter("x", x))
}

/// Looks up a builtin scenario by name.
pub fn builtin(name: &str, x: f64) -> Result<Scenario> {
    match name {
        "example_A" => two_level_example_a(x),
        "example_B" => two_level_example_b(x),
        _ => Err(Error::InvalidArgument(format!(
            "unknown builtin `{name}` (expected one of {})",
            BUILTIN_NAMES.join(", ")
        ))),
    }
}

/// Instrument with Kraus operators `|phi_k(w)><psi(w)|`, whose a posteriori
/// states do not depend on the input.
pub fn rank_one_scenario(
    weights: &[f64],
    psi: &[Vec<C64>],
    phi: &[Vec<Vec<C64>>],
    ensemble: Ensemble,
) -> Result<Scenario> {
    if weights.len() != psi.len() || weights.len() != phi.len() {
        return Err(Error::DimensionMismatch(weights.len(), psi.len().min(phi.len())));
    }
    let mut ops = Vec::with_capacity(weights.len());
    for ((&mu, ket), family) in weights.iter().zip(psi).zip(phi) {
        let norm2: f64 = ket.iter().map(|z| z.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > SCENARIO_TOL {
            return Err(Error::NormalizationError((norm2 - 1.0).abs()));
        }
        let split: f64 = family.iter().flat_map(|v| v.iter()).map(|z| z.norm_sqr()).sum();
        if (split - mu).abs() > SCENARIO_TOL {
            return Err(Error::NormalizationError((split - mu).abs()));
        }
        let kraus = family.iter().map(|v| SquareMatrix::outer(v, ket)).collect();
        ops.push(Operation::new(kraus)?);
    }
    let inst = Instrument::new(index_labels(weights.len()), ops)?;
    Scenario::new("rank_one", ensemble, inst)
}

/// Projectors onto the eigenvectors of `rho`, by descending eigenvalue.
pub fn eigenprojection_povm(rho: &DensityMatrix) -> Povm {
    let spec = rho.spectrum();
    let d = rho.dim();
    let elements = (0..d)
        .rev()
        .map(|k| HermitianMatrix::projector(&spec.eigenvector(k)))
        .collect();
    Povm::new(index_labels(d), elements).expect("eigenprojections form a POVM")
}

/// Complete von Neumann measurement in the eigenbasis of the average state,
/// with the Lüders reduction.
pub fn von_neumann_scenario(ensemble: Ensemble) -> Result<Scenario> {
    let eta = ensemble.average();
    let min = eta.eigenvalues()[0];
    if min <= crate::matrix::INVERTIBILITY_TOL {
        return Err(Error::SingularAverageState(min));
    }
    let inst = eigenprojection_povm(&eta).luders()?;
    Scenario::new("von_neumann", ensemble, inst)
}

/// Letter states `U diag(spectrum) U^†` sharing the eigenbasis `U`.
pub fn commuting_ensemble(prior: ProbVector, spectra: &[Vec<f64>], basis: &SquareMatrix) -> Result<Ensemble> {
    let states = spectra
        .iter()
        .map(|s| {
            let m = basis.sandwich(&SquareMatrix::from_diagonal(s));
            DensityMatrix::new(HermitianMatrix::new(m)?)
        })
        .collect::<Result<Vec<_>>>()?;
    Ensemble::new(prior, states)
}

/// Generator for stream `stream` of seed `seed`.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn gaussian(rng: &mut impl Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Matrix with independent standard complex Gaussian entries.
pub fn gaussian_matrix(rng: &mut impl Rng, d: usize) -> SquareMatrix {
    SquareMatrix::new(d, (0..d * d).map(|_| gaussian(rng)).collect()).expect("finite entries")
}

pub fn gaussian_vector(rng: &mut impl Rng, d: usize) -> Vec<C64> {
    (0..d).map(|_| gaussian(rng)).collect()
}

/// Ginibre state `G G^† / Tr{G G^†}`.
pub fn random_state(rng: &mut impl Rng, d: usize) -> DensityMatrix {
    let g = gaussian_matrix(rng, d);
    let m = &g * &g.adjoint();
    DensityMatrix::from_unnormalized(&HermitianMatrix::from_hermitian_part(&m)).expect("Ginibre state")
}

pub fn random_pure_state(rng: &mut impl Rng, d: usize) -> DensityMatrix {
    DensityMatrix::pure(&gaussian_vector(rng, d)).expect("nonzero Gaussian vector")
}

/// Dirichlet(1, ..., 1) prior via normalized exponentials.
pub fn random_prior(rng: &mut impl Rng, n: usize) -> ProbVector {
    let raw: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = raw.iter().sum();
    ProbVector::from_weights(raw.iter().map(|x| x / total).collect()).expect("normalized prior")
}

pub fn random_ensemble(rng: &mut impl Rng, d: usize, n: usize) -> Ensemble {
    let prior = random_prior(rng, n);
    let states = (0..n).map(|_| random_state(rng, d)).collect();
    Ensemble::new(prior, states).expect("consistent ensemble")
}

pub fn random_pure_ensemble(rng: &mut impl Rng, d: usize, n: usize) -> Ensemble {
    let prior = random_prior(rng, n);
    let states = (0..n).map(|_| random_pure_state(rng, d)).collect();
    Ensemble::new(prior, states).expect("consistent ensemble")
}

/// Haar-like unitary from Gram-Schmidt on a Gaussian matrix.
pub fn random_unitary(rng: &mut impl Rng, d: usize) -> SquareMatrix {
    let g = gaussian_matrix(rng, d);
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(d);
    for j in 0..d {
        let mut v = g.column(j);
        for u in &cols {
            let proj: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (x, y) in v.iter_mut().zip(u) {
                *x -= proj * y;
            }
        }
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        cols.push(v.iter().map(|z| z / n).collect());
    }
    let mut u = SquareMatrix::zeros(d);
    for (j, c) in cols.iter().enumerate() {
        for (i, z) in c.iter().enumerate() {
            u[(i, j)] = *z;
        }
    }
    u
}

/// Random letter states sharing one random eigenbasis.
pub fn random_commuting_ensemble(rng: &mut impl Rng, d: usize, n: usize) -> Ensemble {
    let prior = random_prior(rng, n);
    let basis = random_unitary(rng, d);
    let spectra: Vec<Vec<f64>> = (0..n).map(|_| random_prior(rng, d).weights().to_vec()).collect();
    commuting_ensemble(prior, &spectra, &basis).expect("commuting ensemble")
}

/// Gaussian Kraus operators right-multiplied by `S^{-1/2}`,
/// `S = sum V^† V`.
pub fn random_instrument(rng: &mut impl Rng, d: usize, n_outcomes: usize, kraus_per_outcome: usize) -> Instrument {
    let raw: Vec<Vec<SquareMatrix>> = (0..n_outcomes)
        .map(|_| (0..kraus_per_outcome).map(|_| gaussian_matrix(rng, d)).collect())
        .collect();
    let mut s = SquareMatrix::zeros(d);
    for v in raw.iter().flatten() {
        s = &s + &(&v.adjoint() * v);
    }
    let fix = inv_sqrt(&HermitianMatrix::from_hermitian_part(&s)).expect("Gaussian frame is invertible");
    let ops = raw
        .into_iter()
        .map(|family| Operation::new(family.iter().map(|v| v * fix.matrix()).collect()))
        .collect::<Result<Vec<_>>>()
        .expect("consistent Kraus families");
    Instrument::new(index_labels(n_outcomes), ops).expect("normalized by construction")
}

/// Deterministic random scenario for the given seed.
pub fn random_scenario(
    seed: u64,
    d: usize,
    n_letters: usize,
    n_outcomes: usize,
    kraus_per_outcome: usize,
) -> Result<Scenario> {
    if d == 0 || n_letters == 0 || n_outcomes == 0 || kraus_per_outcome == 0 {
        return Err(Error::InvalidArgument("all counts must be at least 1".into()));
    }
    let mut rng = rng_for(seed, 0);
    let ensemble = random_ensemble(&mut rng, d, n_letters);
    let instrument = random_instrument(&mut rng, d, n_outcomes, kraus_per_outcome);
    Ok(Scenario::new(format!("random_{seed}"), ensemble, instrument)?
        .with_parameter("seed", seed as f64))
}
