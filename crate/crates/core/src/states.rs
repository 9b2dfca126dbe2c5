//! State families, unitary representations, free maps and seeded sampling.
//!
//! All random constructors take an explicit 64-bit seed (or a caller-owned RNG) and
//! draw from ChaCha8 streams, so a `(seed, stream)` pair always yields the same state.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::path::PathBuf;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{domain, Error, Result};
use crate::linalg::{
    frobenius_distance, partial_trace, CMatrix, DensityMatrix, HermitianMatrix, Subsystem, C64,
    ONE, ZERO,
};

/// Tolerance for unitarity, closure and completeness checks (Frobenius norm).
pub const STRUCTURE_TOL: f64 = 1e-9;

/// ChaCha8 stream `stream` of generator `seed`.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// A finite unitary representation `{U_g}`, closed under products and containing `I`.
#[derive(Clone, Debug)]
pub struct UnitaryRep {
    dim: usize,
    elements: Vec<CMatrix>,
}

impl UnitaryRep {
    pub fn new(elements: Vec<CMatrix>) -> Result<Self> {
        let first = elements
            .first()
            .ok_or_else(|| domain("a representation needs at least one element"))?;
        let dim = first.nrows();
        let id = CMatrix::identity(dim, dim);
        for u in &elements {
            if u.nrows() != dim || u.ncols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: u.nrows(),
                });
            }
            if frobenius_distance(&(u.adjoint() * u), &id) > STRUCTURE_TOL {
                return Err(domain("representation element is not unitary"));
            }
        }
        let contains = |m: &CMatrix| {
            elements
                .iter()
                .any(|u| frobenius_distance(u, m) <= STRUCTURE_TOL)
        };
        if !contains(&id) {
            return Err(domain("representation does not contain the identity"));
        }
        for a in &elements {
            for b in &elements {
                if !contains(&(a * b)) {
                    return Err(domain("representation is not closed under products"));
                }
            }
        }
        Ok(Self { dim, elements })
    }

    /// `{I}` on `C^dim`.
    pub fn trivial(dim: usize) -> Self {
        Self {
            dim,
            elements: vec![CMatrix::identity(dim, dim)],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[CMatrix] {
        &self.elements
    }

    /// `(1/|G|) sum_g U_g H U_g^dagger`.
    pub fn twirl(&self, h: &HermitianMatrix) -> Result<HermitianMatrix> {
        if h.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: h.dim(),
            });
        }
        Ok(HermitianMatrix::hermitian_part(&self.twirl_raw(h.matrix())))
    }

    pub(crate) fn twirl_raw(&self, m: &CMatrix) -> CMatrix {
        let mut acc = CMatrix::from_element(self.dim, self.dim, ZERO);
        for u in &self.elements {
            acc += u * m * u.adjoint();
        }
        acc / C64::new(self.elements.len() as f64, 0.0)
    }
}

/// Group average of `h` over `rep`.
pub fn group_average(h: &HermitianMatrix, rep: &UnitaryRep) -> Result<HermitianMatrix> {
    rep.twirl(h)
}

/// Swap operator `F = sum_ij |ij><ji|` on `C^d (x) C^d`.
pub fn swap_operator(d: usize) -> HermitianMatrix {
    let n = d * d;
    let mut f = CMatrix::from_element(n, n, ZERO);
    for i in 0..d {
        for j in 0..d {
            f[(i * d + j, j * d + i)] = ONE;
        }
    }
    HermitianMatrix::from_raw(f)
}

/// The S2 representation `{I, F}` on `C^d (x) C^d`.
pub fn rep_swap(d: usize) -> Result<UnitaryRep> {
    if d < 2 {
        return Err(domain(format!("swap representation needs d >= 2, got {d}")));
    }
    let n = d * d;
    Ok(UnitaryRep {
        dim: n,
        elements: vec![CMatrix::identity(n, n), swap_operator(d).into_matrix()],
    })
}

/// `Z_n` acting by the phases `U_k = diag(exp(2 pi i k j / n))_j`.
///
/// For `n >= d` the twirl coincides with the dephasing map.
pub fn rep_cyclic(d: usize, n: usize) -> Result<UnitaryRep> {
    if n < 2 || d < 1 {
        return Err(domain(format!(
            "cyclic representation needs n >= 2 and d >= 1, got d={d}, n={n}"
        )));
    }
    let elements = (0..n)
        .map(|k| {
            CMatrix::from_fn(d, d, |i, j| {
                if i == j {
                    C64::from_polar(1.0, 2.0 * PI * (k * j) as f64 / n as f64)
                } else {
                    ZERO
                }
            })
        })
        .collect();
    Ok(UnitaryRep { dim: d, elements })
}

/// Projection onto the diagonal of the reference basis.
pub fn dephase(rho: &DensityMatrix) -> DensityMatrix {
    DensityMatrix::from_hermitian_unchecked(rho.as_hermitian().diagonal_part())
}

/// `|psi+><psi+|` with all amplitudes `1/sqrt(d)`.
pub fn maximally_coherent(d: usize) -> Result<DensityMatrix> {
    if d < 1 {
        return Err(domain("dimension must be at least 1"));
    }
    DensityMatrix::pure(&vec![ONE; d])
}

/// Werner state `alpha (I - F)/(d(d-1)) + (1 - alpha) I/d^2` on `C^d (x) C^d`.
pub fn werner(d: usize, alpha: f64) -> Result<DensityMatrix> {
    if d < 2 {
        return Err(domain(format!("Werner states need d >= 2, got {d}")));
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(domain(format!("alpha = {alpha} outside [0, 1]")));
    }
    let n = d * d;
    let id = HermitianMatrix::identity(n);
    let anti = (&id - &swap_operator(d)).scale(alpha / (d * (d - 1)) as f64);
    let mixed = id.scale((1.0 - alpha) / n as f64);
    Ok(DensityMatrix::from_hermitian_unchecked(&anti + &mixed))
}

/// Two-qubit Gisin state `lambda |psi(theta)><psi(theta)| + (1 - lambda) sigma_0`, where
/// `psi(theta) = sin(theta)|01> - cos(theta)|10>` and `sigma_0 = (|00><00| + |11><11|)/2`.
pub fn gisin(lambda: f64, theta: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(domain(format!("lambda = {lambda} outside [0, 1]")));
    }
    let psi = [
        ZERO,
        C64::new(theta.sin(), 0.0),
        C64::new(-theta.cos(), 0.0),
        ZERO,
    ];
    let pure = HermitianMatrix::outer(&psi).scale(lambda);
    let sigma0 = HermitianMatrix::from_diagonal(&[0.5, 0.0, 0.0, 0.5]).scale(1.0 - lambda);
    Ok(DensityMatrix::from_hermitian_unchecked(&pure + &sigma0))
}

/// Parameters of a generalized X state: a diagonal plus the anti-diagonal entries
/// `rho[k][d-1-k]` for `k < d/2`. Odd dimensions leave the middle entry diagonal only.
#[derive(Clone, Debug, PartialEq)]
pub struct XStateSpec {
    pub diagonal: Vec<f64>,
    pub anti_diagonal: Vec<C64>,
}

impl XStateSpec {
    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.dim();
        if d == 0 {
            return Err(domain("X state needs d >= 1"));
        }
        if self.anti_diagonal.len() != d / 2 {
            return Err(Error::DimensionMismatch {
                expected: d / 2,
                found: self.anti_diagonal.len(),
            });
        }
        if self.diagonal.iter().any(|&p| p < -crate::linalg::PSD_TOL) {
            return Err(domain("X state diagonal has a negative entry"));
        }
        let total: f64 = self.diagonal.iter().sum();
        if (total - 1.0).abs() > crate::linalg::TRACE_TOL {
            return Err(domain(format!("X state diagonal sums to {total}, not 1")));
        }
        for (k, c) in self.anti_diagonal.iter().enumerate() {
            let bound = self.diagonal[k] * self.diagonal[d - 1 - k];
            if c.norm_sqr() > bound + crate::linalg::PSD_TOL {
                return Err(domain(format!(
                    "X state block {k} is not positive semidefinite"
                )));
            }
        }
        Ok(())
    }

    /// A random valid spec: Dirichlet-like diagonal, block coherences at a uniform
    /// fraction of their PSD bound with uniform phases.
    pub fn random<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Self {
        let raw: Vec<f64> = (0..d)
            .map(|_| -rng.random::<f64>().max(1e-300).ln())
            .collect();
        let total: f64 = raw.iter().sum();
        let diagonal: Vec<f64> = raw.iter().map(|x| x / total).collect();
        let anti_diagonal = (0..d / 2)
            .map(|k| {
                let r = (diagonal[k] * diagonal[d - 1 - k]).sqrt() * rng.random::<f64>();
                C64::from_polar(r, rng.random_range(0.0..2.0 * PI))
            })
            .collect();
        Self {
            diagonal,
            anti_diagonal,
        }
    }
}

/// Assembles the X state described by `spec`.
pub fn generalized_x(spec: &XStateSpec) -> Result<DensityMatrix> {
    spec.validate()?;
    let d = spec.dim();
    let mut m = CMatrix::from_element(d, d, ZERO);
    for (k, &p) in spec.diagonal.iter().enumerate() {
        m[(k, k)] = C64::new(p, 0.0);
    }
    for (k, &c) in spec.anti_diagonal.iter().enumerate() {
        m[(k, d - 1 - k)] = c;
        m[(d - 1 - k, k)] = c.conj();
    }
    DensityMatrix::new(HermitianMatrix::from_raw(m))
}

fn gaussian_c64<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

/// Haar-random unitary: Gram-Schmidt on a complex Ginibre matrix, which is QR with the
/// diagonal of `R` made positive.
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let mut q = CMatrix::from_fn(d, d, |_, _| gaussian_c64(rng));
    for j in 0..d {
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for k in 0..j {
                let proj: C64 = (0..d).map(|i| q[(i, k)].conj() * q[(i, j)]).sum();
                for i in 0..d {
                    let qik = q[(i, k)];
                    q[(i, j)] -= proj * qik;
                }
            }
        }
        let norm = (0..d).map(|i| q[(i, j)].norm_sqr()).sum::<f64>().sqrt();
        for i in 0..d {
            q[(i, j)] /= norm;
        }
    }
    q
}

/// Haar-random pure state drawn from `rng`.
pub fn haar_pure_with<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DensityMatrix {
    loop {
        let v: Vec<C64> = (0..d).map(|_| gaussian_c64(rng)).collect();
        if let Ok(rho) = DensityMatrix::pure(&v) {
            return rho;
        }
    }
}

/// Haar-random pure state on `C^d`.
pub fn haar_random_pure(d: usize, seed: u64) -> Result<DensityMatrix> {
    if d < 1 {
        return Err(domain("dimension must be at least 1"));
    }
    Ok(haar_pure_with(d, &mut rng_for(seed, 0)))
}

/// Reduced state of a Haar pure state on `C^d (x) C^d_env`, drawn from `rng`.
pub fn haar_mixed_with<R: Rng + ?Sized>(d: usize, d_env: usize, rng: &mut R) -> DensityMatrix {
    let joint = haar_pure_with(d * d_env, rng);
    partial_trace(&joint, (d, d_env), Subsystem::First).expect("dimensions agree by construction")
}

/// Induced-measure mixed state: partial trace over the environment of a Haar pure state.
pub fn haar_random_mixed(d: usize, d_env: usize, seed: u64) -> Result<DensityMatrix> {
    if d < 1 || d_env < 1 {
        return Err(domain("dimensions must be at least 1"));
    }
    Ok(haar_mixed_with(d, d_env, &mut rng_for(seed, 0)))
}

/// Kraus decomposition `{K_i}` with `sum K_i^dagger K_i = I`.
#[derive(Clone, Debug)]
pub struct KrausChannel {
    operators: Vec<CMatrix>,
}

/// One selective branch of a channel applied to a state.
#[derive(Clone, Debug)]
pub struct Branch {
    /// `Tr[K_i rho K_i^dagger]`.
    pub probability: f64,
    /// Normalised post-measurement state, absent when the probability vanishes.
    pub state: Option<DensityMatrix>,
}

impl KrausChannel {
    pub fn new(operators: Vec<CMatrix>) -> Result<Self> {
        let first = operators
            .first()
            .ok_or_else(|| domain("a channel needs at least one Kraus operator"))?;
        let d = first.ncols();
        let mut sum = CMatrix::from_element(d, d, ZERO);
        for k in &operators {
            if k.ncols() != d || k.nrows() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: k.ncols(),
                });
            }
            sum += k.adjoint() * k;
        }
        let err = frobenius_distance(&sum, &CMatrix::identity(d, d));
        if err > STRUCTURE_TOL {
            return Err(domain(format!(
                "Kraus operators violate completeness by {err:e}"
            )));
        }
        Ok(Self { operators })
    }

    pub fn operators(&self) -> &[CMatrix] {
        &self.operators
    }

    pub fn dim(&self) -> usize {
        self.operators[0].ncols()
    }

    /// `Phi(rho) = sum_i K_i rho K_i^dagger`.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        self.check_dim(rho)?;
        let mut acc = CMatrix::from_element(self.dim(), self.dim(), ZERO);
        for k in &self.operators {
            acc += k * rho.matrix() * k.adjoint();
        }
        Ok(DensityMatrix::from_hermitian_unchecked(
            HermitianMatrix::hermitian_part(&acc),
        ))
    }

    /// The ensemble `{p_i, rho_i}` produced by the selective operation.
    pub fn branches(&self, rho: &DensityMatrix) -> Result<Vec<Branch>> {
        self.check_dim(rho)?;
        Ok(self
            .operators
            .iter()
            .map(|k| {
                let out = HermitianMatrix::hermitian_part(&(k * rho.matrix() * k.adjoint()));
                let p = out.trace();
                let state = (p > 1e-14)
                    .then(|| DensityMatrix::from_hermitian_unchecked(out.scale(1.0 / p)));
                Branch {
                    probability: p,
                    state,
                }
            })
            .collect())
    }

    /// Every `K_i` has at most one non-zero entry per column.
    pub fn is_incoherent(&self) -> bool {
        self.operators.iter().all(|k| {
            (0..k.ncols())
                .all(|j| (0..k.nrows()).filter(|&i| k[(i, j)].norm() > 1e-14).count() <= 1)
        })
    }

    /// Every `K_i` commutes with every element of `rep`.
    pub fn is_covariant(&self, rep: &UnitaryRep) -> bool {
        self.operators.iter().all(|k| {
            rep.elements()
                .iter()
                .all(|u| frobenius_distance(&(u * k), &(k * u)) <= STRUCTURE_TOL)
        })
    }

    fn check_dim(&self, rho: &DensityMatrix) -> Result<()> {
        if rho.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: rho.dim(),
            });
        }
        Ok(())
    }
}

/// Random incoherent channel with `k` Kraus operators.
///
/// Each operator follows a random permutation pattern with complex Gaussian weights;
/// column `j` of every operator is then divided by `sqrt(sum_i |w_ij|^2)`, which enforces
/// completeness without leaving the one-entry-per-column pattern.
pub fn random_incoherent_kraus(d: usize, k: usize, seed: u64) -> Result<KrausChannel> {
    if k < 1 || d < 1 {
        return Err(domain("need k >= 1 Kraus operators and d >= 1"));
    }
    let mut rng = rng_for(seed, 0);
    let mut ops = Vec::with_capacity(k);
    for _ in 0..k {
        let mut perm: Vec<usize> = (0..d).collect();
        perm.shuffle(&mut rng);
        let mut m = CMatrix::from_element(d, d, ZERO);
        for (j, &target) in perm.iter().enumerate() {
            m[(target, j)] = gaussian_c64(&mut rng);
        }
        ops.push(m);
    }
    for j in 0..d {
        let norm = ops
            .iter()
            .map(|m| (0..d).map(|i| m[(i, j)].norm_sqr()).sum::<f64>())
            .sum::<f64>()
            .sqrt();
        for m in &mut ops {
            for i in 0..d {
                m[(i, j)] /= norm;
            }
        }
    }
    KrausChannel::new(ops)
}

/// Random channel whose Kraus operators all commute with `rep`.
///
/// Gaussian matrices are projected onto the commutant by the twirl, then right-multiplied
/// by `M^{-1/2}` with `M = sum K_i^dagger K_i`, which also lies in the commutant.
pub fn random_covariant_kraus(rep: &UnitaryRep, k: usize, seed: u64) -> Result<KrausChannel> {
    if k < 1 {
        return Err(domain("need k >= 1 Kraus operators"));
    }
    let d = rep.dim();
    let mut rng = rng_for(seed, 0);
    let raw: Vec<CMatrix> = (0..k)
        .map(|_| {
            let g = CMatrix::from_fn(d, d, |_, _| gaussian_c64(&mut rng));
            rep.twirl_raw(&g)
        })
        .collect();
    let mut m = CMatrix::from_element(d, d, ZERO);
    for op in &raw {
        m += op.adjoint() * op;
    }
    let inv_sqrt = HermitianMatrix::hermitian_part(&m)
        .map_spectrum(|x| 1.0 / x.max(1e-300).sqrt())
        .into_matrix();
    KrausChannel::new(raw.into_iter().map(|op| op * &inv_sqrt).collect())
}

/// The set of free states of a resource theory: incoherent states (dephasing) or states
/// invariant under a representation (twirl).
#[derive(Clone, Debug)]
pub enum FreeSet {
    Incoherent,
    Symmetric(UnitaryRep),
}

impl FreeSet {
    /// The resource-destroying projection `P`.
    pub fn project(&self, h: &HermitianMatrix) -> Result<HermitianMatrix> {
        match self {
            Self::Incoherent => Ok(h.diagonal_part()),
            Self::Symmetric(rep) => rep.twirl(h),
        }
    }

    pub fn project_state(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        Ok(DensityMatrix::from_hermitian_unchecked(
            self.project(rho.as_hermitian())?,
        ))
    }

    pub(crate) fn project_raw(&self, m: &CMatrix) -> CMatrix {
        match self {
            Self::Incoherent => {
                let mut out = CMatrix::from_element(m.nrows(), m.ncols(), ZERO);
                out.set_diagonal(&m.diagonal());
                out
            }
            Self::Symmetric(rep) => rep.twirl_raw(m),
        }
    }

    /// Dimension fixed by the representation, if any.
    pub fn dim(&self) -> Option<usize> {
        match self {
            Self::Incoherent => None,
            Self::Symmetric(rep) => Some(rep.dim()),
        }
    }

    pub fn check_dim(&self, d: usize) -> Result<()> {
        match self.dim() {
            Some(n) if n != d => Err(Error::DimensionMismatch {
                expected: n,
                found: d,
            }),
            _ => Ok(()),
        }
    }
}

/// Textual state description accepted by the CLI, e.g. `werner:d=3,alpha=0.5`.
#[derive(Clone, Debug, PartialEq)]
pub enum StateSpec {
    Werner { d: usize, alpha: f64 },
    Gisin { lambda: f64, theta: f64 },
    HaarMixed { d: usize, d_env: usize, seed: u64 },
    HaarPure { d: usize, seed: u64 },
    MaxCoherent { d: usize },
    Basis { d: usize, k: usize },
    File(PathBuf),
}

impl StateSpec {
    pub fn build(&self) -> Result<DensityMatrix> {
        match self {
            Self::Werner { d, alpha } => werner(*d, *alpha),
            Self::Gisin { lambda, theta } => gisin(*lambda, *theta),
            Self::HaarMixed { d, d_env, seed } => haar_random_mixed(*d, *d_env, *seed),
            Self::HaarPure { d, seed } => haar_random_pure(*d, *seed),
            Self::MaxCoherent { d } => maximally_coherent(*d),
            Self::Basis { d, k } => DensityMatrix::basis(*d, *k),
            Self::File(path) => {
                let text = std::fs::read_to_string(path)?;
                Ok(serde_json::from_str(&text)?)
            }
        }
    }
}

fn parse_params(body: &str) -> Result<HashMap<String, String>> {
    let mut out = HashMap::new();
    for part in body.split(',').filter(|p| !p.trim().is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected key=value, got '{part}'")))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

fn take<T: FromStr>(params: &HashMap<String, String>, key: &str) -> Result<T> {
    let raw = params
        .get(key)
        .ok_or_else(|| Error::Parse(format!("missing parameter '{key}'")))?;
    raw.parse()
        .map_err(|_| Error::Parse(format!("cannot parse {key}='{raw}'")))
}

impl FromStr for StateSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, body) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("state spec '{s}' lacks a ':'")))?;
        if kind == "file" {
            return Ok(Self::File(PathBuf::from(body)));
        }
        let p = parse_params(body)?;
        match kind {
            "werner" => Ok(Self::Werner {
                d: take(&p, "d")?,
                alpha: take(&p, "alpha")?,
            }),
            "gisin" => Ok(Self::Gisin {
                lambda: take(&p, "lambda")?,
                theta: take(&p, "theta")?,
            }),
            "haar-mixed" => Ok(Self::HaarMixed {
                d: take(&p, "d")?,
                d_env: take(&p, "denv")?,
                seed: take(&p, "seed")?,
            }),
            "haar-pure" => Ok(Self::HaarPure {
                d: take(&p, "d")?,
                seed: take(&p, "seed")?,
            }),
            "max-coherent" => Ok(Self::MaxCoherent { d: take(&p, "d")? }),
            "basis" => Ok(Self::Basis {
                d: take(&p, "d")?,
                k: take(&p, "k")?,
            }),
            other => Err(Error::Parse(format!("unknown state family '{other}'"))),
        }
    }
}

/// Textual representation description: `swap:d`, `cyclic:d,n` or `trivial:d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RepSpec {
    Swap { d: usize },
    Cyclic { d: usize, n: usize },
    Trivial { d: usize },
}

impl RepSpec {
    pub fn build(&self) -> Result<UnitaryRep> {
        match *self {
            Self::Swap { d } => rep_swap(d),
            Self::Cyclic { d, n } => rep_cyclic(d, n),
            Self::Trivial { d } => Ok(UnitaryRep::trivial(d)),
        }
    }
}

impl FromStr for RepSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, body) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("rep spec '{s}' lacks a ':'")))?;
        let nums: Vec<usize> = body
            .split(',')
            .map(|x| {
                x.trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad integer '{x}' in rep spec")))
            })
            .collect::<Result<_>>()?;
        match (kind, nums.as_slice()) {
            ("swap", [d]) => Ok(Self::Swap { d: *d }),
            ("cyclic", [d, n]) => Ok(Self::Cyclic { d: *d, n: *n }),
            ("trivial", [d]) => Ok(Self::Trivial { d: *d }),
            _ => Err(Error::Parse(format!("unrecognised rep spec '{s}'"))),
        }
    }
}
