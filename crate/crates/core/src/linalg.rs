//! Dense complex-Hermitian linear algebra.
//!
//! Everything in the crate is carried by [`HermitianMatrix`]: states, witnesses and
//! the iterates of the SDP solver. Bipartite objects use the Kronecker convention in
//! which subsystem 1 is the slow (major) index, so `|i j>` sits at row `i * d2 + j`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;

/// Largest tolerated `|H_ij - conj(H_ji)|` when accepting a matrix as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Eigenvalues down to `-PSD_TOL` are read as zero.
pub const PSD_TOL: f64 = 1e-9;
/// Allowed deviation of a density matrix trace from one.
pub const TRACE_TOL: f64 = 1e-9;

pub(crate) const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub(crate) const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Dense complex self-adjoint matrix.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct HermitianMatrix {
    m: CMatrix,
}

impl HermitianMatrix {
    /// Accepts `m` if it is square, non-empty and Hermitian within [`HERMITIAN_TOL`].
    /// The stored matrix is the exact Hermitian part of `m`.
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        if m.nrows() == 0 {
            return Err(domain("matrix dimension must be at least 1"));
        }
        let dev = hermiticity_deviation(&m);
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        Ok(Self::hermitian_part(&m))
    }

    /// `(m + m^dagger) / 2`. Panics if `m` is not square.
    pub fn hermitian_part(m: &CMatrix) -> Self {
        assert_eq!(
            m.nrows(),
            m.ncols(),
            "hermitian_part of a non-square matrix"
        );
        let n = m.nrows();
        let mut h = CMatrix::from_element(n, n, ZERO);
        for j in 0..n {
            for i in 0..n {
                h[(i, j)] = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            }
        }
        Self { m: h }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            m: CMatrix::identity(dim, dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            m: CMatrix::from_element(dim, dim, ZERO),
        }
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = CMatrix::from_element(n, n, ZERO);
        for (i, &x) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(x, 0.0);
        }
        Self { m }
    }

    /// Builds a real symmetric matrix from rows.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        let mut m = CMatrix::from_element(n, n, ZERO);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            for (j, &x) in row.iter().enumerate() {
                m[(i, j)] = C64::new(x, 0.0);
            }
        }
        Self::new(m)
    }

    /// `|v><v|` without normalisation.
    pub fn outer(v: &[C64]) -> Self {
        let n = v.len();
        let m = CMatrix::from_fn(n, n, |i, j| v[i] * v[j].conj());
        Self { m }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.m[(i, j)]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.m[(i, i)].re).sum()
    }

    /// Real Hilbert-Schmidt inner product `Re Tr(A B)`.
    pub fn inner(&self, other: &Self) -> f64 {
        inner(&self.m, &other.m)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `U H U^dagger`.
    pub fn conjugate_by(&self, u: &CMatrix) -> Self {
        Self::hermitian_part(&(u * &self.m * u.adjoint()))
    }

    pub fn scale(&self, a: f64) -> Self {
        Self {
            m: &self.m * C64::new(a, 0.0),
        }
    }

    /// Diagonal part in the reference basis.
    pub fn diagonal_part(&self) -> Self {
        let d: Vec<f64> = (0..self.dim()).map(|i| self.m[(i, i)].re).collect();
        Self::from_diagonal(&d)
    }

    pub fn eig(&self) -> EigenSystem {
        eig_hermitian(self)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eig().eigenvalues[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        *self.eig().eigenvalues.last().unwrap()
    }

    /// Applies `f` to the spectrum.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> Self {
        self.eig().rebuild_with(f)
    }

    pub fn is_psd(&self, tol: f64) -> bool {
        is_psd(self, tol)
    }

    pub(crate) fn from_raw(m: CMatrix) -> Self {
        Self { m }
    }
}

impl fmt::Debug for HermitianMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "HermitianMatrix({}x{})", self.dim(), self.dim())?;
        for i in 0..self.dim() {
            let row: Vec<String> = (0..self.dim())
                .map(|j| {
                    let z = self.m[(i, j)];
                    format!("{:+.6}{:+.6}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl Add for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn add(self, rhs: Self) -> HermitianMatrix {
        HermitianMatrix {
            m: &self.m + &rhs.m,
        }
    }
}

impl Sub for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn sub(self, rhs: Self) -> HermitianMatrix {
        HermitianMatrix {
            m: &self.m - &rhs.m,
        }
    }
}

impl Neg for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn neg(self) -> HermitianMatrix {
        HermitianMatrix { m: -&self.m }
    }
}

impl Mul<f64> for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn mul(self, rhs: f64) -> HermitianMatrix {
        self.scale(rhs)
    }
}

/// Quantum state: Hermitian, positive semidefinite and unit trace.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct DensityMatrix(HermitianMatrix);

impl DensityMatrix {
    /// Validates the eigenvalue (`>= -1e-9`) and trace (`|Tr - 1| <= 1e-9`) invariants.
    pub fn new(h: HermitianMatrix) -> Result<Self> {
        let tr = h.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::NotDensity(format!("trace {tr} differs from 1")));
        }
        let lmin = h.min_eigenvalue();
        if lmin < -PSD_TOL {
            return Err(Error::NotDensity(format!(
                "minimum eigenvalue {lmin:e} is negative"
            )));
        }
        Ok(Self(h))
    }

    /// Divides by the trace, then validates.
    pub fn normalized(h: HermitianMatrix) -> Result<Self> {
        let tr = h.trace();
        if tr.is_nan() || tr <= 0.0 {
            return Err(Error::NotDensity(format!(
                "cannot normalise a matrix with trace {tr}"
            )));
        }
        Self::new(h.scale(1.0 / tr))
    }

    /// Pure state `|psi><psi|` for a (not necessarily normalised) vector.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let norm2: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if psi.is_empty() || norm2 <= 0.0 {
            return Err(domain("pure state needs a non-zero vector"));
        }
        let scaled: Vec<C64> = psi.iter().map(|z| z / norm2.sqrt()).collect();
        Ok(Self(HermitianMatrix::outer(&scaled)))
    }

    /// Computational basis projector `|k><k|` in dimension `dim`.
    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(domain(format!(
                "basis index {k} out of range for dim {dim}"
            )));
        }
        let mut v = vec![ZERO; dim];
        v[k] = ONE;
        Self::pure(&v)
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self(HermitianMatrix::identity(dim).scale(1.0 / dim as f64))
    }

    /// `p * a + (1 - p) * b`.
    pub fn mix(p: f64, a: &Self, b: &Self) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(domain(format!("mixing weight {p} outside [0, 1]")));
        }
        if a.dim() != b.dim() {
            return Err(Error::DimensionMismatch {
                expected: a.dim(),
                found: b.dim(),
            });
        }
        Ok(Self(&a.0.scale(p) + &b.0.scale(1.0 - p)))
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn as_hermitian(&self) -> &HermitianMatrix {
        &self.0
    }

    pub fn into_hermitian(self) -> HermitianMatrix {
        self.0
    }

    pub fn matrix(&self) -> &CMatrix {
        self.0.matrix()
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.0.entry(i, j)
    }

    /// `Tr rho^2`.
    pub fn purity(&self) -> f64 {
        self.0.inner(&self.0)
    }

    /// Skips validation; for results that are states by construction.
    pub(crate) fn from_hermitian_unchecked(h: HermitianMatrix) -> Self {
        Self(h)
    }
}

impl fmt::Debug for DensityMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Density{:?}", self.0)
    }
}

impl TryFrom<HermitianMatrix> for DensityMatrix {
    type Error = Error;
    fn try_from(h: HermitianMatrix) -> Result<Self> {
        Self::new(h)
    }
}

/// Spectral decomposition `V diag(lambda) V^dagger` with ascending eigenvalues.
#[derive(Clone, Debug)]
pub struct EigenSystem {
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns.
    pub eigenvectors: CMatrix,
}

impl EigenSystem {
    pub fn reconstruct(&self) -> HermitianMatrix {
        self.rebuild_with(|x| x)
    }

    /// `V diag(f(lambda)) V^dagger`.
    pub fn rebuild_with(&self, f: impl Fn(f64) -> f64) -> HermitianMatrix {
        let n = self.eigenvalues.len();
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (j, &lam) in self.eigenvalues.iter().enumerate() {
            let s = f(lam);
            for i in 0..n {
                scaled[(i, j)] *= s;
            }
        }
        HermitianMatrix::hermitian_part(&(scaled * v.adjoint()))
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
pub fn eig_hermitian(h: &HermitianMatrix) -> EigenSystem {
    let (values, vectors) = jacobi_eigen(h.matrix().clone());
    EigenSystem {
        eigenvalues: values,
        eigenvectors: vectors,
    }
}

/// Only the eigenvalues, ascending.
pub fn eigenvalues(h: &HermitianMatrix) -> Vec<f64> {
    eig_hermitian(h).eigenvalues
}

/// Jacobi sweeps on a Hermitian matrix, returning ascending eigenvalues and the matching
/// eigenvector columns. The strictly lower/upper triangles must be conjugate.
pub(crate) fn jacobi_eigen(mut a: CMatrix) -> (Vec<f64>, CMatrix) {
    let n = a.nrows();
    let mut v = CMatrix::identity(n, n);
    let scale = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if n > 1 && scale > 0.0 {
        let tol = f64::EPSILON * scale;
        for _sweep in 0..64 {
            let mut off = 0.0;
            for q in 1..n {
                for p in 0..q {
                    off += a[(p, q)].norm_sqr();
                }
            }
            if off.sqrt() <= tol {
                break;
            }
            for p in 0..n - 1 {
                for q in p + 1..n {
                    rotate(&mut a, &mut v, p, q);
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    (values, vectors)
}

fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let b = a[(p, q)];
    let absb = b.norm();
    if absb == 0.0 {
        return;
    }
    let phase = b / absb;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (2.0 * absb);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        let t = 1.0 / (theta.abs() + (theta * theta + 1.0).sqrt());
        if theta < 0.0 {
            -t
        } else {
            t
        }
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let phase_c = phase.conj();
    let n = a.nrows();
    // A <- A V with V = [[c, s], [-s e^{-i phi}, c e^{-i phi}]] on (p, q)
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c - akq * phase_c * s;
        a[(k, q)] = akp * s + akq * phase_c * c;
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c - vkq * phase_c * s;
        v[(k, q)] = vkp * s + vkq * phase_c * c;
    }
    // A <- V^dagger A
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c - aqk * phase * s;
        a[(q, k)] = apk * s + aqk * phase * c;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = C64::new(app - t * absb, 0.0);
    a[(q, q)] = C64::new(aqq + t * absb, 0.0);
}

/// True iff the smallest eigenvalue is at least `-tol`.
pub fn is_psd(h: &HermitianMatrix, tol: f64) -> bool {
    h.min_eigenvalue() >= -tol
}

/// `-sum lambda ln lambda` in nats, with `0 ln 0 = 0` and eigenvalues in `[-1e-9, 0]` read as zero.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    entropy_of_spectrum(&eigenvalues(rho.as_hermitian()))
}

pub(crate) fn entropy_of_spectrum(lams: &[f64]) -> f64 {
    let s: f64 = lams
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| -l * l.ln())
        .sum();
    s.max(0.0)
}

/// Kronecker product, subsystem 1 major.
pub fn kron(a: &HermitianMatrix, b: &HermitianMatrix) -> HermitianMatrix {
    HermitianMatrix::from_raw(a.matrix().kronecker(b.matrix()))
}

pub fn kron_states(a: &DensityMatrix, b: &DensityMatrix) -> DensityMatrix {
    DensityMatrix::from_hermitian_unchecked(kron(a.as_hermitian(), b.as_hermitian()))
}

/// Which factor of a bipartite system to keep in a partial trace.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    First,
    Second,
}

/// Traces out the factor not named by `keep`.
pub fn partial_trace(
    rho: &DensityMatrix,
    dims: (usize, usize),
    keep: Subsystem,
) -> Result<DensityMatrix> {
    let (d1, d2) = dims;
    if d1 == 0 || d2 == 0 || d1 * d2 != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: d1 * d2,
            found: rho.dim(),
        });
    }
    let m = rho.matrix();
    let out = match keep {
        Subsystem::First => CMatrix::from_fn(d1, d1, |i, k| {
            (0..d2).map(|j| m[(i * d2 + j, k * d2 + j)]).sum()
        }),
        Subsystem::Second => CMatrix::from_fn(d2, d2, |j, l| {
            (0..d1).map(|i| m[(i * d2 + j, i * d2 + l)]).sum()
        }),
    };
    Ok(DensityMatrix::from_hermitian_unchecked(
        HermitianMatrix::hermitian_part(&out),
    ))
}

/// Squared Hilbert-Schmidt norm and operator norm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Norms {
    /// `Tr(H^dagger H)`.
    pub hs2: f64,
    /// `max |lambda_i|`.
    pub opnorm: f64,
}

pub fn norms(h: &HermitianMatrix) -> Norms {
    let lams = eigenvalues(h);
    let opnorm = lams.iter().fold(0.0f64, |acc, l| acc.max(l.abs()));
    Norms {
        hs2: h.inner(h),
        opnorm,
    }
}

/// Largest `|m_ij - conj(m_ji)|`.
pub fn hermiticity_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut dev = 0.0f64;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

pub(crate) fn inner(a: &CMatrix, b: &CMatrix) -> f64 {
    // Re Tr(A B) = Re sum_ij A_ij B_ji
    let n = a.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            let x = a[(i, j)];
            let y = b[(j, i)];
            s += x.re * y.re - x.im * y.im;
        }
    }
    s
}

pub(crate) fn frobenius_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Wire format for matrices: `{"dim": d, "re": [[..]], "im": [[..]]}`, row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let n = m.nrows();
        Self {
            dim: n,
            re: (0..n)
                .map(|i| (0..n).map(|j| m[(i, j)].re).collect())
                .collect(),
            im: (0..n)
                .map(|i| (0..n).map(|j| m[(i, j)].im).collect())
                .collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        let n = self.dim;
        let rows_ok = self.re.len() == n && self.im.len() == n;
        let cols_ok = self.re.iter().chain(self.im.iter()).all(|r| r.len() == n);
        if !rows_ok || !cols_ok {
            return Err(Error::Parse(format!(
                "matrix JSON entries do not match dim {n}"
            )));
        }
        Ok(CMatrix::from_fn(n, n, |i, j| {
            C64::new(self.re[i][j], self.im[i][j])
        }))
    }
}

impl From<HermitianMatrix> for MatrixJson {
    fn from(h: HermitianMatrix) -> Self {
        Self::from_matrix(h.matrix())
    }
}

impl TryFrom<MatrixJson> for HermitianMatrix {
    type Error = Error;
    fn try_from(j: MatrixJson) -> Result<Self> {
        HermitianMatrix::new(j.to_matrix()?)
    }
}

impl From<DensityMatrix> for MatrixJson {
    fn from(d: DensityMatrix) -> Self {
        Self::from_matrix(d.matrix())
    }
}

impl TryFrom<MatrixJson> for DensityMatrix {
    type Error = Error;
    fn try_from(j: MatrixJson) -> Result<Self> {
        DensityMatrix::new(HermitianMatrix::try_from(j)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> HermitianMatrix {
        let m = CMatrix::from_fn(n, n, |_, _| {
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        HermitianMatrix::hermitian_part(&m)
    }

    fn random_state(rng: &mut ChaCha8Rng, n: usize) -> DensityMatrix {
        let g = CMatrix::from_fn(n, n, |_, _| {
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        DensityMatrix::normalized(HermitianMatrix::hermitian_part(&(&g * g.adjoint()))).unwrap()
    }

    #[test]
    fn eig_small_cases() {
        let id = HermitianMatrix::identity(2);
        assert_eq!(eigenvalues(&id), vec![1.0, 1.0]);
        let d = HermitianMatrix::from_diagonal(&[3.0, 1.0, 2.0]);
        let l = eigenvalues(&d);
        assert_abs_diff_eq!(l[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(l[1], 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(l[2], 3.0, epsilon = 1e-15);
        let x = HermitianMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let l = eigenvalues(&x);
        assert_abs_diff_eq!(l[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(l[1], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn eig_reconstruction_and_orthonormality() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for trial in 0..1000 {
            let n = 1 + trial % 16;
            let h = random_hermitian(&mut rng, n);
            let es = eig_hermitian(&h);
            assert!(es.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
            let rec = es.reconstruct();
            assert!(frobenius_distance(rec.matrix(), h.matrix()) < 1e-9);
            let vtv = es.eigenvectors.adjoint() * &es.eigenvectors;
            let id = CMatrix::identity(n, n);
            assert!(frobenius_distance(&vtv, &id) < 1e-9);
        }
    }

    #[test]
    fn eig_handles_degenerate_and_complex_phases() {
        let v = [C64::new(0.5, 0.5), C64::new(0.0, -0.5), C64::new(0.5, 0.0)];
        let p = HermitianMatrix::outer(&v);
        let l = eigenvalues(&p);
        assert_abs_diff_eq!(l[0], 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(l[1], 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(l[2], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn non_hermitian_rejected() {
        let m = CMatrix::from_row_slice(2, 2, &[ONE, ONE, ZERO, ONE]);
        assert!(matches!(
            HermitianMatrix::new(m),
            Err(Error::NotHermitian(_))
        ));
        let rect = CMatrix::from_element(2, 3, ZERO);
        assert!(HermitianMatrix::new(rect).is_err());
    }

    #[test]
    fn psd_checks() {
        assert!(is_psd(&HermitianMatrix::identity(3), 1e-9));
        assert!(!is_psd(&HermitianMatrix::from_diagonal(&[1.0, -0.5]), 1e-9));
        assert!(is_psd(&HermitianMatrix::zeros(3), 1e-9));
    }

    #[test]
    fn entropy_examples() {
        let psi = DensityMatrix::pure(&[C64::new(0.6, 0.0), C64::new(0.0, 0.8)]).unwrap();
        assert_abs_diff_eq!(von_neumann_entropy(&psi), 0.0, epsilon = 1e-12);
        let mm = DensityMatrix::maximally_mixed(4);
        assert_abs_diff_eq!(von_neumann_entropy(&mm), 4f64.ln(), epsilon = 1e-12);
        let h = DensityMatrix::new(HermitianMatrix::from_diagonal(&[0.5, 0.5, 0.0])).unwrap();
        assert_abs_diff_eq!(von_neumann_entropy(&h), 2f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn entropy_unitarily_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let rho = random_state(&mut rng, 4);
            let h = random_hermitian(&mut rng, 4);
            // exp(iH) from the spectrum
            let es = h.eig();
            let phases = CMatrix::from_fn(4, 4, |i, j| {
                if i == j {
                    C64::from_polar(1.0, es.eigenvalues[i])
                } else {
                    ZERO
                }
            });
            let u = &es.eigenvectors * phases * es.eigenvectors.adjoint();
            let rotated = DensityMatrix::new(rho.as_hermitian().conjugate_by(&u)).unwrap();
            assert_abs_diff_eq!(
                von_neumann_entropy(&rho),
                von_neumann_entropy(&rotated),
                epsilon = 1e-9
            );
        }
    }

    #[test]
    fn kron_examples() {
        let i4 = kron(&HermitianMatrix::identity(2), &HermitianMatrix::identity(2));
        assert_eq!(i4, HermitianMatrix::identity(4));
        let a = HermitianMatrix::from_diagonal(&[1.0, 0.0]);
        let b = HermitianMatrix::from_diagonal(&[0.0, 1.0]);
        assert_eq!(
            kron(&a, &b),
            HermitianMatrix::from_diagonal(&[0.0, 1.0, 0.0, 0.0])
        );
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let a = random_hermitian(&mut rng, 3);
            let b = random_hermitian(&mut rng, 2);
            assert_abs_diff_eq!(kron(&a, &b).trace(), a.trace() * b.trace(), epsilon = 1e-12);
        }
    }

    #[test]
    fn partial_trace_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rho = random_state(&mut rng, 2);
        let sigma = random_state(&mut rng, 3);
        let joint = kron_states(&rho, &sigma);
        let back = partial_trace(&joint, (2, 3), Subsystem::First).unwrap();
        assert!(frobenius_distance(back.matrix(), rho.matrix()) < 1e-12);
        let back2 = partial_trace(&joint, (2, 3), Subsystem::Second).unwrap();
        assert!(frobenius_distance(back2.matrix(), sigma.matrix()) < 1e-12);

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = DensityMatrix::pure(&[C64::new(s, 0.0), ZERO, ZERO, C64::new(s, 0.0)]).unwrap();
        for keep in [Subsystem::First, Subsystem::Second] {
            let r = partial_trace(&bell, (2, 2), keep).unwrap();
            assert!(
                frobenius_distance(r.matrix(), DensityMatrix::maximally_mixed(2).matrix()) < 1e-12
            );
        }

        let ket01 = DensityMatrix::basis(4, 1).unwrap();
        let r = partial_trace(&ket01, (2, 2), Subsystem::First).unwrap();
        assert!(
            frobenius_distance(r.matrix(), DensityMatrix::basis(2, 0).unwrap().matrix()) < 1e-15
        );

        assert!(matches!(
            partial_trace(&ket01, (3, 2), Subsystem::First),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn partial_trace_keeps_trace_and_positivity() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let rho = random_state(&mut rng, 6);
            for keep in [Subsystem::First, Subsystem::Second] {
                let r = partial_trace(&rho, (2, 3), keep).unwrap();
                assert_abs_diff_eq!(r.as_hermitian().trace(), 1.0, epsilon = 1e-12);
                assert!(r.as_hermitian().is_psd(1e-12));
            }
        }
    }

    #[test]
    fn norm_examples() {
        let n = norms(&HermitianMatrix::identity(3));
        assert_abs_diff_eq!(n.hs2, 3.0);
        assert_abs_diff_eq!(n.opnorm, 1.0);
        assert_eq!(
            norms(&HermitianMatrix::zeros(2)),
            Norms {
                hs2: 0.0,
                opnorm: 0.0
            }
        );
        let n = norms(&HermitianMatrix::from_diagonal(&[2.0, -1.0]));
        assert_abs_diff_eq!(n.hs2, 5.0);
        assert_abs_diff_eq!(n.opnorm, 2.0);
    }

    #[test]
    fn hs2_is_sum_of_squared_eigenvalues() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..100 {
            let h = random_hermitian(&mut rng, 5);
            let s: f64 = eigenvalues(&h).iter().map(|l| l * l).sum();
            assert_abs_diff_eq!(norms(&h).hs2, s, epsilon = 1e-9);
        }
    }

    #[test]
    fn density_validation() {
        assert!(DensityMatrix::new(HermitianMatrix::from_diagonal(&[0.6, 0.6])).is_err());
        assert!(DensityMatrix::new(HermitianMatrix::from_diagonal(&[1.5, -0.5])).is_err());
        assert!(DensityMatrix::new(HermitianMatrix::from_diagonal(&[1.0, 0.0])).is_ok());
    }

    #[test]
    fn json_roundtrip_and_validation() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let rho = random_state(&mut rng, 3);
        let text = serde_json::to_string(&rho).unwrap();
        let back: DensityMatrix = serde_json::from_str(&text).unwrap();
        assert!(frobenius_distance(back.matrix(), rho.matrix()) < 1e-15);

        let bad = r#"{"dim": 2, "re": [[1, 1], [0, 1]], "im": [[0, 0], [0, 0]]}"#;
        assert!(serde_json::from_str::<HermitianMatrix>(bad).is_err());
        let short = r#"{"dim": 2, "re": [[1, 0]], "im": [[0, 0], [0, 0]]}"#;
        assert!(serde_json::from_str::<HermitianMatrix>(short).is_err());
    }
}
