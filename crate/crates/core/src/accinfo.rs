//! Accessible information: the largest `I_c` over POVMs, searched over
//! rank-one POVMs at small dimension.
//!
//! A point is a list of vectors `v(k)`; with `S = sum_k |v(k)><v(k)|` it
//! decodes to `E(k) = S^{-1/2} |v(k)><v(k)| S^{-1/2}`, a POVM whenever `S`
//! is invertible.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::instrument::Povm;
use crate::matrix::{inv_sqrt, HermitianMatrix, SquareMatrix, C64};
use crate::scenarios::{gaussian_vector, rng_for};
use crate::states::{index_labels, DensityMatrix, Ensemble};

/// Largest Hilbert space dimension accepted by the search.
pub const MAX_DIM: usize = 4;
/// Default final step of the pattern search.
pub const DEFAULT_TOL: f64 = 1e-6;

const INITIAL_STEP: f64 = 0.25;
const MAX_EVALS_PER_START: usize = 40_000;
const COARSE_GRID: usize = 2000;
const PROJECTIVE_REFINES: usize = 4;

#[derive(Clone, Debug)]
pub struct AccessibleInfo {
    pub value: f64,
    pub povm: Povm,
    /// Which start produced the optimum.
    pub origin: String,
    pub evaluations: usize,
}

/// Mutual information between letters and the outcomes of the rank-one
/// POVM `{|w(k)><w(k)|}`.
fn info_of_vectors(priors: &[f64], states: &[&SquareMatrix], w: &[Vec<C64>]) -> f64 {
    let table: Vec<Vec<f64>> = priors
        .iter()
        .zip(states)
        .map(|(&p, rho)| w.iter().map(|v| p * rho.expectation(v).re.max(0.0)).collect())
        .collect();
    mutual_info_table(&table)
}

fn mutual_info_table(table: &[Vec<f64>]) -> f64 {
    let rows: Vec<f64> = table.iter().map(|r| r.iter().sum()).collect();
    let n_cols = table.first().map_or(0, Vec::len);
    let cols: Vec<f64> = (0..n_cols).map(|k| table.iter().map(|r| r[k]).sum()).collect();
    let mut total = 0.0;
    for (r, &pr) in table.iter().zip(&rows) {
        for (&pj, &pc) in r.iter().zip(&cols) {
            if pj > 0.0 && pr > 0.0 && pc > 0.0 {
                total += pj * (pj / (pr * pc)).log2();
            }
        }
    }
    total.max(0.0)
}

fn unpack(x: &[f64], d: usize) -> Vec<Vec<C64>> {
    x.chunks(2 * d)
        .map(|c| c.chunks(2).map(|z| C64::new(z[0], z[1])).collect())
        .collect()
}

fn pack(vectors: &[Vec<C64>]) -> Vec<f64> {
    vectors.iter().flatten().flat_map(|z| [z.re, z.im]).collect()
}

fn apply(m: &SquareMatrix, v: &[C64]) -> Vec<C64> {
    (0..v.len()).map(|i| (0..v.len()).map(|j| m[(i, j)] * v[j]).sum()).collect()
}

/// The normalized vectors `S^{-1/2} v(k)`, or `None` if `S` is singular.
fn decode(vectors: &[Vec<C64>]) -> Option<Vec<Vec<C64>>> {
    let d = vectors[0].len();
    let mut s = SquareMatrix::zeros(d);
    for v in vectors {
        s = &s + &SquareMatrix::outer(v, v);
    }
    let root = inv_sqrt(&HermitianMatrix::from_hermitian_part(&s)).ok()?;
    Some(vectors.iter().map(|v| apply(root.matrix(), v)).collect())
}

struct Objective<'a> {
    priors: Vec<f64>,
    states: Vec<&'a SquareMatrix>,
    d: usize,
    evals: usize,
}

impl<'a> Objective<'a> {
    fn new(e: &'a Ensemble) -> Self {
        Objective {
            priors: e.prior().weights().to_vec(),
            states: e.states().iter().map(DensityMatrix::matrix).collect(),
            d: e.dim(),
            evals: 0,
        }
    }

    fn frame(&mut self, x: &[f64]) -> f64 {
        self.evals += 1;
        match decode(&unpack(x, self.d)) {
            Some(w) => info_of_vectors(&self.priors, &self.states, &w),
            None => f64::NEG_INFINITY,
        }
    }

    fn projective(&mut self, theta: f64, phi: f64) -> f64 {
        self.evals += 1;
        info_of_vectors(&self.priors, &self.states, &bloch_basis(theta, phi))
    }
}

/// Coordinate pattern search: try `+step` then `-step` on each coordinate,
/// halve the step after a sweep without improvement.
fn pattern_search(
    mut f: impl FnMut(&[f64]) -> f64,
    mut x: Vec<f64>,
    mut step: f64,
    tol: f64,
    max_evals: usize,
) -> (Vec<f64>, f64) {
    let mut fx = f(&x);
    let mut evals = 1;
    while step >= tol && evals < max_evals {
        let mut improved = false;
        for i in 0..x.len() {
            for delta in [step, -step] {
                let old = x[i];
                x[i] = old + delta;
                let v = f(&x);
                evals += 1;
                if v > fx {
                    fx = v;
                    improved = true;
                    break;
                }
                x[i] = old;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (x, fx)
}

/// Orthonormal basis along `+n` and `-n` for the Bloch direction `(theta, phi)`.
fn bloch_basis(theta: f64, phi: f64) -> Vec<Vec<C64>> {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let ph = C64::from_polar(1.0, phi);
    vec![vec![C64::new(c, 0.0), ph * s], vec![C64::new(s, 0.0), -ph * c]]
}

/// Spread `basis` over `k` outcomes by splitting vectors into scaled copies.
fn spread(basis: &[Vec<C64>], k: usize) -> Vec<Vec<C64>> {
    let d = basis.len();
    (0..d)
        .flat_map(|j| {
            let copies = k / d + usize::from(j < k % d);
            let scale = 1.0 / (copies as f64).sqrt();
            (0..copies).map(move |_| basis[j].iter().map(|z| z * scale).collect::<Vec<_>>())
        })
        .collect()
}

fn eigenbasis(rho: &DensityMatrix) -> Vec<Vec<C64>> {
    let spec = rho.spectrum();
    (0..rho.dim()).map(|k| spec.eigenvector(k)).collect()
}

/// Fibonacci-sphere directions as `(theta, phi)`.
fn fibonacci_sphere(n: usize) -> Vec<(f64, f64)> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
            (z.clamp(-1.0, 1.0).acos(), (golden * i as f64).rem_euclid(2.0 * PI))
        })
        .collect()
}

/// Best projective qubit measurements: local maxima of a coarse sphere
/// grid refined by pattern search over the two Bloch angles.
fn projective_starts(obj: &mut Objective, tol: f64) -> Vec<(f64, f64)> {
    let mut scored: Vec<((f64, f64), f64)> =
        fibonacci_sphere(COARSE_GRID).into_iter().map(|(t, p)| ((t, p), obj.projective(t, p))).collect();
    scored.sort_by(|a, b| b.1.total_cmp(&a.1));
    let mut picks: Vec<(f64, f64)> = Vec::new();
    for &((t, p), _) in &scored {
        // skip points close to an already picked direction or its antipode
        let n = unit(t, p);
        if picks.iter().any(|&(t2, p2)| dot(n, unit(t2, p2)).abs() > 0.95) {
            continue;
        }
        picks.push((t, p));
        if picks.len() == PROJECTIVE_REFINES {
            break;
        }
    }
    picks
        .into_iter()
        .map(|(t, p)| {
            let (x, _) =
                pattern_search(|x| obj.projective(x[0], x[1]), vec![t, p], 0.05, tol * 1e-2, MAX_EVALS_PER_START);
            (x[0], x[1])
        })
        .collect()
}

fn unit(theta: f64, phi: f64) -> [f64; 3] {
    [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Maximize `I_c` over `n_outcomes`-element rank-one POVMs (default `d^2`),
/// from deterministic starts plus `restarts` random ones.
pub fn accessible_info(
    e: &Ensemble,
    n_outcomes: Option<usize>,
    restarts: usize,
    seed: u64,
    tol: f64,
) -> Result<AccessibleInfo> {
    let d = e.dim();
    if d > MAX_DIM {
        return Err(Error::DimensionTooLarge(d, MAX_DIM));
    }
    let k = n_outcomes.unwrap_or(d * d);
    if k < d || k > d * d {
        return Err(Error::InvalidArgument(format!(
            "outcome count {k} outside [{d}, {}] for dimension {d}",
            d * d
        )));
    }
    if restarts == 0 {
        return Err(Error::InvalidArgument("restarts must be positive".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance {tol} must be positive")));
    }

    let mut obj = Objective::new(e);
    let mut starts: Vec<(String, Vec<Vec<C64>>)> =
        vec![("eigenbasis of average".to_string(), spread(&eigenbasis(&e.average()), k))];
    for (label, rho) in e.labels().iter().zip(e.states()) {
        starts.push((format!("eigenbasis of letter {label}"), spread(&eigenbasis(rho), k)));
    }
    if d == 2 {
        for (i, (t, p)) in projective_starts(&mut obj, tol).into_iter().enumerate() {
            starts.push((format!("projective {i}"), spread(&bloch_basis(t, p), k)));
        }
    }
    for r in 0..restarts {
        let mut rng = rng_for(seed, r as u64);
        let vectors = (0..k).map(|_| gaussian_vector(&mut rng, d)).collect();
        starts.push((format!("random {r}"), vectors));
    }

    let mut best: Option<(f64, String, Vec<f64>)> = None;
    for (label, vectors) in starts {
        let (x, fx) = pattern_search(|x| obj.frame(x), pack(&vectors), INITIAL_STEP, tol, MAX_EVALS_PER_START);
        if best.as_ref().map_or(true, |b| fx > b.0) {
            best = Some((fx, label, x));
        }
    }
    let (value, origin, x) = best.expect("at least one start");
    let w = decode(&unpack(&x, d)).ok_or_else(|| Error::SingularAverageState(0.0))?;
    let povm = Povm::new(index_labels(k), w.iter().map(|v| HermitianMatrix::projector(v)).collect())?;
    Ok(AccessibleInfo { value, povm, origin, evaluations: obj.evals })
}

/// Largest `I_c` over two-outcome qubit projective measurements whose
/// Bloch directions lie on a Fibonacci sphere of `grid_size` points.
pub fn projective_grid_oracle(e: &Ensemble, grid_size: usize) -> Result<f64> {
    if e.dim() != 2 {
        return Err(Error::DimensionTooLarge(e.dim(), 2));
    }
    let paulis = [
        SquareMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]),
        SquareMatrix::from_rows(&[
            vec![C64::new(0.0, 0.0), C64::new(0.0, -1.0)],
            vec![C64::new(0.0, 1.0), C64::new(0.0, 0.0)],
        ])?,
        SquareMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]),
    ];
    let mut best: f64 = 0.0;
    for (t, p) in fibonacci_sphere(grid_size) {
        let n = unit(t, p);
        let mut plus = SquareMatrix::identity(2);
        for (ni, s) in n.iter().zip(&paulis) {
            plus = &plus + &s.scale(*ni);
        }
        let plus = plus.scale(0.5);
        let minus = &SquareMatrix::identity(2) - &plus;
        let table: Vec<Vec<f64>> = e
            .prior()
            .weights()
            .iter()
            .zip(e.states())
            .map(|(&q, rho)| {
                [&plus, &minus].iter().map(|el| q * (*el * rho.matrix()).trace().re.max(0.0)).collect()
            })
            .collect();
        best = best.max(mutual_info_table(&table));
    }
    Ok(best)
}
