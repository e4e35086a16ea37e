//! Dense complex square matrices, Hermitian eigendecomposition and spectral
//! matrix functions.
//!
//! Everything here is sized for the small dimensions that show up in
//! single-system measurement problems (d up to a dozen or so). The
//! eigensolver is a cyclic complex Jacobi method, which is slow for large
//! matrices but accurate to working precision and has no external
//! dependencies.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Relative tolerance on `max |A - A^†|` accepted by [`HermitianMatrix::new`].
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Eigenvalues in `[-PSD_CLIP_TOL, 0)` are treated as round-off and clipped to zero.
pub const PSD_CLIP_TOL: f64 = 1e-10;
/// Smallest eigenvalue required before an inverse square root is taken.
pub const INVERTIBILITY_TOL: f64 = 1e-10;

const JACOBI_OFF_DIAGONAL_TOL: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 100;

/// A dense `dim x dim` complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct SquareMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl SquareMatrix {
    /// Builds a matrix from row-major entries.
    pub fn new(dim: usize, data: Vec<C64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("matrix dimension must be positive".into()));
        }
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch(data.len(), dim * dim));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFiniteEntry);
        }
        Ok(SquareMatrix { dim, data })
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
        SquareMatrix { dim, data: vec![C64::new(0.0, 0.0); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &x) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(x, 0.0);
        }
        m
    }

    /// Builds a matrix from real rows. Panics on ragged input.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let dim = rows.len();
        let mut m = Self::zeros(dim);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), dim, "ragged matrix rows");
            for (j, &x) in row.iter().enumerate() {
                m[(i, j)] = C64::new(x, 0.0);
            }
        }
        m
    }

    /// Builds a matrix from complex rows.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch(row.len(), dim));
            }
            data.extend_from_slice(row);
        }
        Self::new(dim, data)
    }

    /// The rank-one operator `|ket><bra|`.
    pub fn outer(ket: &[C64], bra: &[C64]) -> Self {
        assert_eq!(ket.len(), bra.len());
        let dim = ket.len();
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = ket[i] * bra[j].conj();
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn rows(&self) -> impl Iterator<Item = &[C64]> {
        self.data.chunks(self.dim)
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        SquareMatrix { dim: self.dim, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn scale_complex(&self, s: C64) -> Self {
        SquareMatrix { dim: self.dim, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max_{jk} |A[j][k] - conj(A[k][j])|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// `(A + A^†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let n = self.dim;
        let mut m = self.clone();
        for i in 0..n {
            m[(i, i)] = C64::new(self[(i, i)].re, 0.0);
            for j in (i + 1)..n {
                let z = (self[(i, j)] + self[(j, i)].conj()) * 0.5;
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        m
    }

    /// `A X A^†`.
    pub fn sandwich(&self, x: &SquareMatrix) -> SquareMatrix {
        &(self * x) * &self.adjoint()
    }

    /// `max |A - B|` entrywise.
    pub fn max_abs_diff(&self, other: &SquareMatrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// `<u|A|u>`.
    pub fn expectation(&self, u: &[C64]) -> C64 {
        let n = self.dim;
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..n {
            let mut row = C64::new(0.0, 0.0);
            for j in 0..n {
                row += self[(i, j)] * u[j];
            }
            acc += u[i].conj() * row;
        }
        acc
    }

    /// Determinant by LU decomposition with partial pivoting.
    pub fn det(&self) -> C64 {
        let n = self.dim;
        let mut lu = self.data.clone();
        let mut det = C64::new(1.0, 0.0);
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&a, &b| lu[a * n + col].norm().total_cmp(&lu[b * n + col].norm()))
                .unwrap();
            if lu[pivot * n + col].norm() == 0.0 {
                return C64::new(0.0, 0.0);
            }
            if pivot != col {
                for k in 0..n {
                    lu.swap(col * n + k, pivot * n + k);
                }
                det = -det;
            }
            let p = lu[col * n + col];
            det *= p;
            for row in (col + 1)..n {
                let factor = lu[row * n + col] / p;
                if factor.norm() == 0.0 {
                    continue;
                }
                for k in col..n {
                    let v = lu[col * n + k];
                    lu[row * n + k] -= factor * v;
                }
            }
        }
        det
    }
}

impl Index<(usize, usize)> for SquareMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for SquareMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Add for &SquareMatrix {
    type Output = SquareMatrix;
    fn add(self, rhs: &SquareMatrix) -> SquareMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matrix sum");
        SquareMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &SquareMatrix {
    type Output = SquareMatrix;
    fn sub(self, rhs: &SquareMatrix) -> SquareMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matrix difference");
        SquareMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &SquareMatrix {
    type Output = SquareMatrix;
    fn mul(self, rhs: &SquareMatrix) -> SquareMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matrix product");
        let n = self.dim;
        let mut out = SquareMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

impl fmt::Debug for SquareMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SquareMatrix({}x{}) [", self.dim, self.dim)?;
        for row in self.rows() {
            let cells: Vec<String> =
                row.iter().map(|z| format!("{:+.6}{:+.6}i", z.re, z.im)).collect();
            writeln!(f, "  [{}]", cells.join(", "))?;
        }
        write!(f, "]")
    }
}

/// A self-adjoint matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix(SquareMatrix);

impl HermitianMatrix {
    /// Validates Hermiticity to `1e-12 * (1 + max|A|)` and stores the exact
    /// Hermitian part.
    pub fn new(m: SquareMatrix) -> Result<Self> {
        let defect = m.hermiticity_defect();
        if defect > HERMITICITY_TOL * (1.0 + m.max_abs()) {
            return Err(Error::NonHermitianInput(defect));
        }
        Ok(HermitianMatrix(m.hermitian_part()))
    }

    /// Takes the Hermitian part of a matrix known to be self-adjoint up to
    /// round-off (e.g. `V rho V^†`).
    pub fn from_hermitian_part(m: &SquareMatrix) -> Self {
        HermitianMatrix(m.hermitian_part())
    }

    pub fn identity(dim: usize) -> Self {
        HermitianMatrix(SquareMatrix::identity(dim))
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        HermitianMatrix(SquareMatrix::from_diagonal(diag))
    }

    /// `|u><u|`.
    pub fn projector(u: &[C64]) -> Self {
        Self::from_hermitian_part(&SquareMatrix::outer(u, u))
    }

    pub fn dim(&self) -> usize {
        self.0.dim
    }

    pub fn matrix(&self) -> &SquareMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> SquareMatrix {
        self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    pub fn scale(&self, s: f64) -> Self {
        HermitianMatrix(self.0.scale(s))
    }

    pub fn add(&self, other: &HermitianMatrix) -> Self {
        HermitianMatrix(&self.0 + &other.0)
    }

    /// `Tr{A B}` for Hermitian `A` and any `B`, real part.
    pub fn trace_product(&self, b: &SquareMatrix) -> f64 {
        let n = self.dim();
        let mut acc = 0.0;
        for i in 0..n {
            for k in 0..n {
                acc += (self.0[(i, k)] * b[(k, i)]).re;
            }
        }
        acc
    }

    pub fn spectrum(&self) -> Spectrum {
        eigh(self)
    }

    /// Determinant as the product of eigenvalues.
    pub fn det_from_spectrum(&self) -> f64 {
        eigh(self).eigenvalues.iter().product()
    }
}

impl Index<(usize, usize)> for HermitianMatrix {
    type Output = C64;
    fn index(&self, idx: (usize, usize)) -> &C64 {
        &self.0[idx]
    }
}

/// Eigendecomposition `A = V diag(lambda) V^†`, eigenvalues ascending.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    /// Unitary matrix whose columns are the eigenvectors.
    pub eigenvectors: SquareMatrix,
}

impl Spectrum {
    pub fn eigenvector(&self, k: usize) -> Vec<C64> {
        self.eigenvectors.column(k)
    }

    /// `V diag(values) V^†`.
    pub fn reconstruct_with(&self, values: &[f64]) -> HermitianMatrix {
        let n = self.eigenvectors.dim();
        assert_eq!(values.len(), n);
        let v = &self.eigenvectors;
        let mut out = SquareMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let mut acc = C64::new(0.0, 0.0);
                for (k, &lam) in values.iter().enumerate() {
                    if lam != 0.0 {
                        acc += v[(i, k)] * v[(j, k)].conj() * lam;
                    }
                }
                out[(i, j)] = acc;
                out[(j, i)] = acc.conj();
            }
            out[(i, i)] = C64::new(out[(i, i)].re, 0.0);
        }
        HermitianMatrix(out)
    }

    pub fn reconstruct(&self) -> HermitianMatrix {
        self.reconstruct_with(&self.eigenvalues)
    }

    /// Eigenvalues with the PSD clipping rule applied: values in
    /// `[-1e-10, 0)` become zero, anything more negative is an error.
    pub fn clipped_eigenvalues(&self) -> Result<Vec<f64>> {
        clip_psd(&self.eigenvalues)
    }
}

/// Applies the PSD clipping rule to a list of eigenvalues.
pub fn clip_psd(values: &[f64]) -> Result<Vec<f64>> {
    values
        .iter()
        .map(|&x| {
            if x < -PSD_CLIP_TOL {
                Err(Error::NotPsd(x))
            } else {
                Ok(x.max(0.0))
            }
        })
        .collect()
}

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
///
/// Eigenvalues come back ascending. Each eigenvector is normalized so that
/// its first component with modulus above `1e-12` is real and positive,
/// which makes the output deterministic up to degeneracies.
pub fn eigh(a: &HermitianMatrix) -> Spectrum {
    let n = a.dim();
    let mut m = a.0.data.clone();
    let mut v = SquareMatrix::identity(n).data;
    let scale = a.0.frobenius_norm();

    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += 2.0 * m[p * n + q].norm_sqr();
            }
        }
        if off.sqrt() <= JACOBI_OFF_DIAGONAL_TOL * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                let r = apq.norm();
                if r == 0.0 {
                    continue;
                }
                // Phase rotation makes the (p, q) entry real, then a real
                // Jacobi rotation annihilates it.
                let phase = apq / r;
                let app = m[p * n + p].re;
                let aqq = m[q * n + q].re;
                let theta = (aqq - app) / (2.0 * r);
                let t = if theta == 0.0 {
                    1.0
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let u_pp = C64::new(c, 0.0);
                let u_pq = C64::new(s, 0.0);
                let u_qp = -phase.conj() * s;
                let u_qq = phase.conj() * c;

                for k in 0..n {
                    let akp = m[k * n + p];
                    let akq = m[k * n + q];
                    m[k * n + p] = akp * u_pp + akq * u_qp;
                    m[k * n + q] = akp * u_pq + akq * u_qq;
                }
                for k in 0..n {
                    let apk = m[p * n + k];
                    let aqk = m[q * n + k];
                    m[p * n + k] = u_pp.conj() * apk + u_qp.conj() * aqk;
                    m[q * n + k] = u_pq.conj() * apk + u_qq.conj() * aqk;
                }
                m[p * n + q] = C64::new(0.0, 0.0);
                m[q * n + p] = C64::new(0.0, 0.0);
                m[p * n + p] = C64::new(m[p * n + p].re, 0.0);
                m[q * n + q] = C64::new(m[q * n + q].re, 0.0);

                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = vkp * u_pp + vkq * u_qp;
                    v[k * n + q] = vkp * u_pq + vkq * u_qq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[i * n + i].re.total_cmp(&m[j * n + j].re));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| m[i * n + i].re).collect();
    let mut vectors = SquareMatrix::zeros(n);
    for (col, &src) in order.iter().enumerate() {
        let lead = (0..n).map(|k| v[k * n + src]).find(|z| z.norm() > 1e-12);
        let fix = match lead {
            Some(z) => z.conj() / z.norm(),
            None => C64::new(1.0, 0.0),
        };
        for k in 0..n {
            vectors[(k, col)] = v[k * n + src] * fix;
        }
    }
    Spectrum { eigenvalues, eigenvectors: vectors }
}

/// `V diag(f(lambda)) V^†`; fails with `DomainError` if `f` is not finite
/// at some eigenvalue.
pub fn spectral_apply(a: &HermitianMatrix, f: impl Fn(f64) -> f64) -> Result<HermitianMatrix> {
    let spec = eigh(a);
    apply_on_spectrum(&spec, &spec.eigenvalues, f)
}

fn apply_on_spectrum(
    spec: &Spectrum,
    values: &[f64],
    f: impl Fn(f64) -> f64,
) -> Result<HermitianMatrix> {
    let mapped = values
        .iter()
        .map(|&x| {
            let y = f(x);
            if y.is_finite() {
                Ok(y)
            } else {
                Err(Error::DomainError(x))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(spec.reconstruct_with(&mapped))
}

/// Square root of a PSD matrix (after clipping).
pub fn psd_sqrt(a: &HermitianMatrix) -> Result<HermitianMatrix> {
    let spec = eigh(a);
    let clipped = spec.clipped_eigenvalues()?;
    apply_on_spectrum(&spec, &clipped, f64::sqrt)
}

/// Inverse square root of a positive definite matrix; requires the smallest
/// eigenvalue to exceed `1e-10`.
pub fn inv_sqrt(a: &HermitianMatrix) -> Result<HermitianMatrix> {
    let spec = eigh(a);
    let min = spec.eigenvalues.first().copied().unwrap_or(0.0);
    if min <= INVERTIBILITY_TOL {
        if min < -PSD_CLIP_TOL {
            return Err(Error::NotPsd(min));
        }
        return Err(Error::NotInvertible(min));
    }
    apply_on_spectrum(&spec, &spec.eigenvalues, |x| 1.0 / x.sqrt())
}
