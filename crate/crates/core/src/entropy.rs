//! Entropy functionals. All logarithms are base 2 and `0 log 0 = 0`.

use std::fmt;

use crate::error::{Error, Result};
use crate::states::{
    hybrid_decompose, DensityMatrix, Ensemble, HybridState, JointDistribution, ProbVector,
    ZERO_PROB_TOL,
};

/// Overlap of the first argument with the kernel of the second above which
/// a relative entropy is infinite.
pub const SUPPORT_TOL: f64 = 1e-10;
/// Eigenvalue gap below which subentropy switches to derivative limits.
pub const SUBENTROPY_GAP_TOL: f64 = 1e-7;

/// A nonnegative real or `+inf`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtendedReal {
    Finite(f64),
    Infinite,
}

impl ExtendedReal {
    /// Values in `[-1e-12, 0)` are clamped to zero.
    pub fn finite(x: f64) -> Self {
        if (-ZERO_PROB_TOL..0.0).contains(&x) {
            ExtendedReal::Finite(0.0)
        } else {
            ExtendedReal::Finite(x)
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }

    /// The value as `f64`, with `+inf` for the sentinel.
    pub fn value(&self) -> f64 {
        match self {
            ExtendedReal::Finite(x) => *x,
            ExtendedReal::Infinite => f64::INFINITY,
        }
    }

    pub fn unwrap_finite(&self) -> f64 {
        match self {
            ExtendedReal::Finite(x) => *x,
            ExtendedReal::Infinite => panic!("relative entropy is infinite"),
        }
    }
}

impl std::ops::Add for ExtendedReal {
    type Output = ExtendedReal;

    fn add(self, rhs: ExtendedReal) -> ExtendedReal {
        match (self, rhs) {
            (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => ExtendedReal::Finite(a + b),
            _ => ExtendedReal::Infinite,
        }
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::Finite(x) => write!(f, "{x}"),
            ExtendedReal::Infinite => write!(f, "inf"),
        }
    }
}

/// `-x log2 x` with the convention `0 log 0 = 0`.
pub fn eta_log(x: f64) -> f64 {
    if x > 0.0 {
        -x * x.log2()
    } else {
        0.0
    }
}

/// Shannon entropy of a list of nonnegative weights.
pub fn shannon_weights(w: &[f64]) -> f64 {
    w.iter().map(|&x| eta_log(x)).sum::<f64>().max(0.0)
}

pub fn vn_entropy(rho: &DensityMatrix) -> f64 {
    shannon_weights(rho.eigenvalues())
}

pub fn shannon(p: &ProbVector) -> f64 {
    shannon_weights(p.weights())
}

/// Kullback-Leibler divergence of weight lists; `+inf` when `p1` has mass
/// where `p2` vanishes.
pub fn kl_weights(p1: &[f64], p2: &[f64]) -> ExtendedReal {
    let mut acc = 0.0;
    for (&a, &b) in p1.iter().zip(p2) {
        if a <= ZERO_PROB_TOL {
            continue;
        }
        if b <= ZERO_PROB_TOL {
            return ExtendedReal::Infinite;
        }
        acc += a * (a / b).log2();
    }
    ExtendedReal::finite(acc)
}

pub fn kl(p1: &ProbVector, p2: &ProbVector) -> Result<ExtendedReal> {
    if p1.labels() != p2.labels() {
        return Err(Error::LabelMismatch);
    }
    Ok(kl_weights(p1.weights(), p2.weights()))
}

/// `Tr{r1 (log r1 - log r2)}`, evaluated in the eigenbasis of `r2`.
pub fn q_rel_entropy(r1: &DensityMatrix, r2: &DensityMatrix) -> Result<ExtendedReal> {
    if r1.dim() != r2.dim() {
        return Err(Error::DimensionMismatch(r1.dim(), r2.dim()));
    }
    let spec2 = r2.spectrum();
    let mut cross = 0.0;
    for (k, &lam) in r2.eigenvalues().iter().enumerate() {
        let v = spec2.eigenvector(k);
        let overlap = r1.matrix().expectation(&v).re;
        if lam <= ZERO_PROB_TOL {
            if overlap > SUPPORT_TOL {
                return Ok(ExtendedReal::Infinite);
            }
            continue;
        }
        cross += overlap * lam.log2();
    }
    Ok(ExtendedReal::finite(-vn_entropy(r1) - cross))
}

/// `S(p) + sum_w p(w) S(sigma(w))`.
pub fn hybrid_entropy(s: &HybridState) -> f64 {
    let dec = hybrid_decompose(s);
    let quantum: f64 = dec
        .probs
        .weights()
        .iter()
        .zip(&dec.states)
        .filter(|(&p, _)| p > ZERO_PROB_TOL)
        .map(|(&p, st)| p * vn_entropy(st))
        .sum();
    shannon(&dec.probs) + quantum
}

/// `S(p1 || p2) + sum_w p1(w) S(sigma1(w) || sigma2(w))`.
pub fn hybrid_rel_entropy(s1: &HybridState, s2: &HybridState) -> Result<ExtendedReal> {
    if s1.labels() != s2.labels() {
        return Err(Error::LabelMismatch);
    }
    if s1.dim() != s2.dim() {
        return Err(Error::DimensionMismatch(s1.dim(), s2.dim()));
    }
    let d1 = hybrid_decompose(s1);
    let d2 = hybrid_decompose(s2);
    let mut total = kl(&d1.probs, &d2.probs)?;
    if !total.is_finite() {
        return Ok(total);
    }
    for ((&p, a), b) in d1.probs.weights().iter().zip(&d1.states).zip(&d2.states) {
        if p <= ZERO_PROB_TOL {
            continue;
        }
        match q_rel_entropy(a, b)? {
            ExtendedReal::Finite(x) => total = total + ExtendedReal::Finite(p * x),
            ExtendedReal::Infinite => return Ok(ExtendedReal::Infinite),
        }
    }
    Ok(total)
}

/// `S(p_XY || p_X (x) p_Y)`.
pub fn mutual_info_classical(j: &JointDistribution) -> f64 {
    let m = j.marginals();
    let mut acc = 0.0;
    for (row, &pr) in j.table().iter().zip(m.rows.weights()) {
        for (&x, &pc) in row.iter().zip(m.cols.weights()) {
            if x > ZERO_PROB_TOL {
                acc += x * (x / (pr * pc)).log2();
            }
        }
    }
    acc.max(0.0)
}

/// `S(sum p rho) - sum p S(rho)` for any weights and states; zero-weight
/// terms are skipped.
pub fn chi(weights: &[f64], states: &[DensityMatrix]) -> f64 {
    let avg = crate::states::weighted_sum(weights, states);
    let avg = DensityMatrix::from_unnormalized(&avg).expect("average of states");
    let mean: f64 = weights
        .iter()
        .zip(states)
        .filter(|(&p, _)| p > ZERO_PROB_TOL)
        .map(|(&p, s)| p * vn_entropy(s))
        .sum();
    (vn_entropy(&avg) - mean).max(0.0)
}

/// Holevo's chi-quantity of an ensemble.
pub fn chi_quantity(e: &Ensemble) -> f64 {
    chi(e.prior().weights(), e.states())
}

/// The same quantity as `sum_a p(a) S(rho(a) || average)`.
pub fn chi_relative_form(e: &Ensemble) -> ExtendedReal {
    let avg = e.average();
    let mut total = ExtendedReal::Finite(0.0);
    for (&p, s) in e.prior().weights().iter().zip(e.states()) {
        if p <= ZERO_PROB_TOL {
            continue;
        }
        let r = q_rel_entropy(s, &avg).expect("same dimension");
        total = total + ExtendedReal::Finite(p * r.value());
        if !r.is_finite() {
            return ExtendedReal::Infinite;
        }
    }
    total
}

/// Subentropy `Q(rho) = -g[l_1, ..., l_d]`, the divided difference of
/// `g(l) = l^d log2 l` over the spectrum.
pub fn subentropy(rho: &DensityMatrix) -> f64 {
    subentropy_of_spectrum(rho.eigenvalues())
}

pub fn subentropy_of_spectrum(eigenvalues: &[f64]) -> f64 {
    let mut x: Vec<f64> = eigenvalues.iter().map(|&l| l.max(0.0)).collect();
    x.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = x.len();
    if n == 1 {
        return 0.0;
    }
    let power = n as i32;
    // table[i] holds g[x_i, ..., x_{i+order}]
    let mut table: Vec<f64> = x.iter().map(|&l| g_derivative(power, 0, l)).collect();
    for order in 1..n {
        for i in 0..n - order {
            let (lo, hi) = (x[i], x[i + order]);
            table[i] = if hi - lo < SUBENTROPY_GAP_TOL {
                let mean = x[i..=i + order].iter().sum::<f64>() / (order + 1) as f64;
                g_derivative(power, order, mean) / factorial(order)
            } else {
                (table[i + 1] - table[i]) / (hi - lo)
            };
        }
    }
    (-table[0]).max(0.0)
}

fn factorial(m: usize) -> f64 {
    (1..=m).map(|k| k as f64).product()
}

/// m-th derivative of `l^n log2 l`:
/// `n!/(n-m)! l^(n-m) (ln l + H_n - H_(n-m)) / ln 2`, zero at `l = 0` for `m < n`.
fn g_derivative(n: i32, m: usize, l: f64) -> f64 {
    if l <= 0.0 {
        return 0.0;
    }
    let n_u = n as usize;
    let falling: f64 = ((n_u - m + 1)..=n_u).map(|k| k as f64).product();
    let harmonic: f64 = ((n_u - m + 1)..=n_u).map(|k| 1.0 / k as f64).sum();
    falling * l.powi(n - m as i32) * (l.ln() + harmonic) / std::f64::consts::LN_2
}
