//! Coherence and asymmetry quantifiers, witness utilities and brute-force oracles.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::linalg::{
    eig_hermitian, entropy_of_spectrum, frobenius_distance, von_neumann_entropy, CMatrix,
    DensityMatrix, HermitianMatrix, C64, ZERO,
};
use crate::sdp::{self, IterateRecord, SdpSolution, SolveStatus, SolverSettings};
use crate::states::{swap_operator, FreeSet, UnitaryRep};

/// A state whose weight is at most this counts as free.
pub const FREE_TOL: f64 = 1e-7;
/// Purity threshold of the pure-state shortcut.
pub const PURE_TOL: f64 = 1e-10;
/// Slack allowed when checking witness feasibility.
pub const WITNESS_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MeasureKind {
    #[serde(rename = "cw")]
    CoherenceWeight,
    #[serde(rename = "aw")]
    AsymmetryWeight,
    #[serde(rename = "cr")]
    RobustnessCoherence,
    #[serde(rename = "ar")]
    RobustnessAsymmetry,
    #[serde(rename = "cl1")]
    L1Coherence,
    #[serde(rename = "crel")]
    RelEntropyCoherence,
    #[serde(rename = "arel")]
    RelEntropyAsymmetry,
    #[serde(rename = "hsbound")]
    HsBound,
}

impl MeasureKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::CoherenceWeight => "cw",
            Self::AsymmetryWeight => "aw",
            Self::RobustnessCoherence => "cr",
            Self::RobustnessAsymmetry => "ar",
            Self::L1Coherence => "cl1",
            Self::RelEntropyCoherence => "crel",
            Self::RelEntropyAsymmetry => "arel",
            Self::HsBound => "hsbound",
        }
    }

    /// Whether the measure needs a representation.
    pub fn needs_rep(self) -> bool {
        matches!(
            self,
            Self::AsymmetryWeight | Self::RobustnessAsymmetry | Self::RelEntropyAsymmetry
        )
    }
}

impl std::str::FromStr for MeasureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "cw" => Self::CoherenceWeight,
            "aw" => Self::AsymmetryWeight,
            "cr" => Self::RobustnessCoherence,
            "ar" => Self::RobustnessAsymmetry,
            "cl1" => Self::L1Coherence,
            "crel" => Self::RelEntropyCoherence,
            "arel" => Self::RelEntropyAsymmetry,
            "hsbound" => Self::HsBound,
            other => return Err(Error::Parse(format!("unknown measure '{other}'"))),
        })
    }
}

/// Value of a quantifier together with its certificates.
///
/// For weights `rho = (1 - value) sigma* + value tau*`; for robustness
/// `rho = (1 + value) sigma* - value tau*`. The witness satisfies `Tr[rho W*] = value`.
#[derive(Clone, Debug, Serialize)]
pub struct MeasureReport {
    pub measure: MeasureKind,
    pub value: f64,
    pub witness: Option<HermitianMatrix>,
    pub free_state: Option<DensityMatrix>,
    pub residual_state: Option<DensityMatrix>,
    pub gap: f64,
    pub iterations: usize,
    pub status: SolveStatus,
    /// Iterate log, filled only when the solver settings ask for it.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub trace: Vec<IterateRecord>,
}

impl MeasureReport {
    fn scalar(measure: MeasureKind, value: f64) -> Self {
        Self {
            measure,
            value,
            witness: None,
            free_state: None,
            residual_state: None,
            gap: 0.0,
            iterations: 0,
            status: SolveStatus::Optimal,
            trace: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Frobenius distance between `rho` and the decomposition encoded by the certificates.
    pub fn decomposition_error(&self, rho: &DensityMatrix) -> Option<f64> {
        let s = self.value;
        let zero = HermitianMatrix::zeros(rho.dim());
        let part = |m: &Option<DensityMatrix>| m.as_ref().map(|x| x.as_hermitian().clone());
        let (sigma, tau) = (part(&self.free_state), part(&self.residual_state));
        let rebuilt = match self.measure {
            MeasureKind::CoherenceWeight | MeasureKind::AsymmetryWeight => {
                let sigma = if s < 1.0 - FREE_TOL {
                    sigma?
                } else {
                    zero.clone()
                };
                let tau = if s > FREE_TOL { tau? } else { zero };
                &sigma.scale(1.0 - s) + &tau.scale(s)
            }
            MeasureKind::RobustnessCoherence | MeasureKind::RobustnessAsymmetry => {
                let tau = if s > FREE_TOL { tau? } else { zero };
                &sigma?.scale(1.0 + s) - &tau.scale(s)
            }
            _ => return None,
        };
        Some(frobenius_distance(rebuilt.matrix(), rho.matrix()))
    }
}

#[derive(Clone, Debug)]
pub struct WeightOptions {
    /// Return exactly 1 for non-free pure states without solving.
    pub pure_shortcut: bool,
    pub solver: SolverSettings,
}

impl Default for WeightOptions {
    fn default() -> Self {
        Self {
            pure_shortcut: true,
            solver: SolverSettings::default(),
        }
    }
}

/// Nearest density matrix: negative eigenvalues clipped, trace renormalised.
fn clip_to_state(h: &HermitianMatrix) -> Option<DensityMatrix> {
    let clipped = h.map_spectrum(|x| x.max(0.0));
    let tr = clipped.trace();
    (tr > 0.0).then(|| DensityMatrix::normalized(clipped).expect("clipped matrix is a state"))
}

fn solve_optimal(p: &sdp::SdpProblem, settings: &SolverSettings) -> Result<SdpSolution> {
    sdp::solve_with(p, settings)?.require_optimal()
}

/// Resource weight with respect to `free`: smallest `s` with
/// `rho = (1 - s) sigma + s tau`, `sigma` free.
pub fn weight(rho: &DensityMatrix, free: &FreeSet, opts: &WeightOptions) -> Result<MeasureReport> {
    free.check_dim(rho.dim())?;
    let kind = match free {
        FreeSet::Incoherent => MeasureKind::CoherenceWeight,
        FreeSet::Symmetric(_) => MeasureKind::AsymmetryWeight,
    };
    let projected = free.project(rho.as_hermitian())?;
    if opts.pure_shortcut
        && rho.purity() > 1.0 - PURE_TOL
        && frobenius_distance(projected.matrix(), rho.matrix()) > FREE_TOL
    {
        return Ok(MeasureReport {
            residual_state: Some(rho.clone()),
            ..MeasureReport::scalar(kind, 1.0)
        });
    }
    let problem = match free {
        FreeSet::Incoherent => sdp::encode_coherence_weight(rho),
        FreeSet::Symmetric(rep) => sdp::encode_asymmetry_weight(rho, rep)?,
    };
    let sol = solve_optimal(&problem, &opts.solver)?;
    let value = (1.0 - sol.value()).clamp(0.0, 1.0);

    // X* is the unnormalised free part: P(X*) <= rho with Tr = 1 - value.
    let free_part = free.project(&sol.x)?;
    let free_state = (value < 1.0 - FREE_TOL)
        .then(|| clip_to_state(&free_part))
        .flatten();
    let residual_state = (value > FREE_TOL)
        .then(|| clip_to_state(&(rho.as_hermitian() - &free_part)))
        .flatten();
    let witness = &HermitianMatrix::identity(rho.dim()) - &sol.y;
    Ok(MeasureReport {
        measure: kind,
        value,
        witness: Some(witness),
        free_state,
        residual_state,
        gap: sol.gap,
        iterations: sol.iterations,
        status: sol.status,
        trace: sol.trace,
    })
}

/// Coherence weight `C_w`.
pub fn coherence_weight(rho: &DensityMatrix) -> Result<MeasureReport> {
    weight(rho, &FreeSet::Incoherent, &WeightOptions::default())
}

/// Asymmetry weight `A_w` with respect to the group represented by `rep`.
pub fn asymmetry_weight(rho: &DensityMatrix, rep: &UnitaryRep) -> Result<MeasureReport> {
    weight(
        rho,
        &FreeSet::Symmetric(rep.clone()),
        &WeightOptions::default(),
    )
}

/// Generalised robustness against free states: smallest `s` with
/// `(rho + s tau)/(1 + s)` free for some state `tau`.
pub fn robustness(
    rho: &DensityMatrix,
    free: &FreeSet,
    settings: &SolverSettings,
) -> Result<MeasureReport> {
    let kind = match free {
        FreeSet::Incoherent => MeasureKind::RobustnessCoherence,
        FreeSet::Symmetric(_) => MeasureKind::RobustnessAsymmetry,
    };
    let sol = solve_optimal(&sdp::encode_robustness(rho, free)?, settings)?;
    let value = sol.value().max(0.0);
    let cover = free.project(&sol.y)?;
    let free_state = clip_to_state(&cover);
    // rescale the cover to trace 1 + s so the decomposition closes exactly
    let cover = free_state
        .as_ref()
        .map(|s| s.as_hermitian().scale(1.0 + value));
    let residual_state = match &cover {
        Some(c) if value > FREE_TOL => clip_to_state(&(c - rho.as_hermitian())),
        _ => None,
    };
    let witness = &sol.x - &HermitianMatrix::identity(rho.dim());
    Ok(MeasureReport {
        measure: kind,
        value,
        witness: Some(witness),
        free_state,
        residual_state,
        gap: sol.gap,
        iterations: sol.iterations,
        status: sol.status,
        trace: sol.trace,
    })
}

/// Any quantifier by kind. `rep` is required exactly when [`MeasureKind::needs_rep`];
/// `hsbound` reports the sharp bound.
pub fn evaluate(
    kind: MeasureKind,
    rho: &DensityMatrix,
    rep: Option<&UnitaryRep>,
    opts: &WeightOptions,
) -> Result<MeasureReport> {
    let symmetric = || {
        rep.map(|r| FreeSet::Symmetric(r.clone()))
            .ok_or_else(|| domain(format!("measure '{}' needs a representation", kind.name())))
    };
    Ok(match kind {
        MeasureKind::CoherenceWeight => weight(rho, &FreeSet::Incoherent, opts)?,
        MeasureKind::AsymmetryWeight => weight(rho, &symmetric()?, opts)?,
        MeasureKind::RobustnessCoherence => robustness(rho, &FreeSet::Incoherent, &opts.solver)?,
        MeasureKind::RobustnessAsymmetry => robustness(rho, &symmetric()?, &opts.solver)?,
        MeasureKind::L1Coherence => MeasureReport::scalar(kind, l1_coherence(rho)),
        MeasureKind::RelEntropyCoherence => MeasureReport::scalar(kind, rel_entropy_coherence(rho)),
        MeasureKind::RelEntropyAsymmetry => {
            let rep = rep.ok_or_else(|| domain("measure 'arel' needs a representation"))?;
            MeasureReport::scalar(kind, rel_entropy_asymmetry(rho, rep)?)
        }
        MeasureKind::HsBound => {
            let free = match rep {
                Some(r) => FreeSet::Symmetric(r.clone()),
                None => FreeSet::Incoherent,
            };
            MeasureReport::scalar(kind, hs_lower_bound(rho, &free)?.0)
        }
    })
}

/// Robustness of coherence `C_R`.
pub fn robustness_coherence(rho: &DensityMatrix) -> Result<MeasureReport> {
    robustness(rho, &FreeSet::Incoherent, &SolverSettings::default())
}

/// Robustness of asymmetry `A_R`.
pub fn robustness_asymmetry(rho: &DensityMatrix, rep: &UnitaryRep) -> Result<MeasureReport> {
    robustness(
        rho,
        &FreeSet::Symmetric(rep.clone()),
        &SolverSettings::default(),
    )
}

/// `sum_{i != j} |rho_ij|`.
pub fn l1_coherence(rho: &DensityMatrix) -> f64 {
    let m = rho.matrix();
    let d = rho.dim();
    let mut s = 0.0;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                s += m[(i, j)].norm();
            }
        }
    }
    s
}

/// `S(Delta(rho)) - S(rho)` in nats.
pub fn rel_entropy_coherence(rho: &DensityMatrix) -> f64 {
    let diag: Vec<f64> = (0..rho.dim()).map(|i| rho.entry(i, i).re).collect();
    (entropy_of_spectrum(&diag) - von_neumann_entropy(rho)).max(0.0)
}

/// `S(G(rho)) - S(rho)` in nats.
pub fn rel_entropy_asymmetry(rho: &DensityMatrix, rep: &UnitaryRep) -> Result<f64> {
    let twirled = FreeSet::Symmetric(rep.clone()).project_state(rho)?;
    Ok(von_neumann_entropy(&twirled) - von_neumann_entropy(rho))
}

/// Hilbert-Schmidt lower bounds on the weight: `(||rho - P(rho)||_2^2 / ||rho||_inf,
/// ||rho - P(rho)||_2^2)`.
pub fn hs_lower_bound(rho: &DensityMatrix, free: &FreeSet) -> Result<(f64, f64)> {
    free.check_dim(rho.dim())?;
    let diff = rho.as_hermitian() - &free.project(rho.as_hermitian())?;
    let loose = diff.inner(&diff);
    let sharp = loose / rho.as_hermitian().max_eigenvalue();
    Ok((sharp, loose))
}

/// `(Tr[rho W], feasible)` where feasibility means `P(W) <= 0` and `W <= I` up to
/// [`WITNESS_TOL`].
pub fn witness_evaluate(
    rho: &DensityMatrix,
    w: &HermitianMatrix,
    free: &FreeSet,
) -> Result<(f64, bool)> {
    if w.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: w.dim(),
        });
    }
    free.check_dim(rho.dim())?;
    let value = rho.as_hermitian().inner(w);
    let feasible =
        free.project(w)?.max_eigenvalue() <= WITNESS_TOL && w.max_eigenvalue() <= 1.0 + WITNESS_TOL;
    Ok((value, feasible))
}

/// Largest violation of the constraints on the witness a report carries: `P(W) <= 0`
/// and `W <= I` for weights, `P(W) <= 0` and `W >= -I` for robustness. `None` when the
/// report has no witness.
pub fn witness_violation(report: &MeasureReport, free: &FreeSet) -> Result<Option<f64>> {
    let Some(w) = &report.witness else {
        return Ok(None);
    };
    free.check_dim(w.dim())?;
    let projected = free.project(w)?.max_eigenvalue();
    let bound = match report.measure {
        MeasureKind::CoherenceWeight | MeasureKind::AsymmetryWeight => w.max_eigenvalue() - 1.0,
        _ => -1.0 - w.min_eigenvalue(),
    };
    Ok(Some(projected.max(bound).max(0.0)))
}

/// Whether `rho` is free, judged by its weight.
pub fn is_free(rho: &DensityMatrix, free: &FreeSet) -> Result<bool> {
    let opts = WeightOptions {
        pure_shortcut: false,
        ..WeightOptions::default()
    };
    Ok(weight(rho, free, &opts)?.value <= FREE_TOL)
}

/// Brute-force coherence weight of a qubit: bisection on `s` to `1e-6`, deciding
/// feasibility of `rho - (1 - s) diag(p, 1 - p) >= 0` on a grid of step `1e-5` in `p`.
pub fn qubit_cw_oracle(rho: &DensityMatrix) -> Result<f64> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: rho.dim(),
        });
    }
    let (a, b) = (rho.entry(0, 0).re, rho.entry(1, 1).re);
    let c2 = rho.entry(0, 1).norm_sqr();
    let steps = 100_000usize;
    let feasible = |s: f64| {
        let t = 1.0 - s;
        (0..=steps).any(|k| {
            let p = k as f64 / steps as f64;
            let x = a - t * p;
            let y = b - t * (1.0 - p);
            x >= -1e-14 && y >= -1e-14 && x * y - c2 >= -1e-14
        })
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    if feasible(0.0) {
        return Ok(0.0);
    }
    while hi - lo > 1e-6 {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Phases `phi_k` of an incoherent diagonal unitary making every non-zero off-diagonal
/// entry real and negative, found by propagating along a spanning forest of the graph of
/// non-zero entries and then checking every edge. `None` means the search was
/// inconclusive.
pub fn prop6_applicable(rho: &DensityMatrix) -> Option<Vec<f64>> {
    let d = rho.dim();
    let m = rho.matrix();
    let edge = |j: usize, k: usize| m[(j, k)].norm() > 1e-12;
    let mut phase: Vec<Option<f64>> = vec![None; d];
    for root in 0..d {
        if phase[root].is_some() {
            continue;
        }
        phase[root] = Some(0.0);
        let mut stack = vec![root];
        while let Some(j) = stack.pop() {
            let pj = phase[j].expect("visited");
            for k in 0..d {
                if k != j && phase[k].is_none() && edge(j, k) {
                    phase[k] = Some(pj + m[(j, k)].arg() - PI);
                    stack.push(k);
                }
            }
        }
    }
    let phases: Vec<f64> = phase
        .into_iter()
        .map(|p| p.expect("every node visited").rem_euclid(2.0 * PI))
        .collect();
    for j in 0..d {
        for k in 0..d {
            if j != k && edge(j, k) {
                let rotated = C64::from_polar(1.0, phases[j] - phases[k]) * m[(j, k)];
                if (rotated + m[(j, k)].norm()).norm() > 1e-9 {
                    return None;
                }
            }
        }
    }
    Some(phases)
}

/// The diagonal unitary `diag(exp(i phi_k))`.
pub fn phase_unitary(phases: &[f64]) -> CMatrix {
    let d = phases.len();
    CMatrix::from_fn(d, d, |i, j| {
        if i == j {
            C64::from_polar(1.0, phases[i])
        } else {
            ZERO
        }
    })
}

/// Orthonormal columns spanning the vectors `u c` annihilated by the projector `p`.
fn kernel_within(u: &CMatrix, p: &CMatrix) -> CMatrix {
    let pu = p * u;
    let es = eig_hermitian(&HermitianMatrix::hermitian_part(&(pu.adjoint() * &pu)));
    let keep: Vec<usize> = (0..u.ncols())
        .filter(|&k| es.eigenvalues[k] < 1e-10)
        .collect();
    CMatrix::from_fn(u.nrows(), keep.len(), |i, j| {
        (u * es.eigenvectors.column(keep[j]))[(i, 0)]
    })
}

/// The swap-invariant states supported inside `span(support)`, written as
/// `sigma = Q M Q^dagger` with `M` block diagonal over the symmetric and antisymmetric
/// parts. `basis` is an orthonormal basis of the traceless such `M`.
struct SwapFace {
    q: CMatrix,
    basis: Vec<CMatrix>,
}

impl SwapFace {
    fn new(support: &CMatrix) -> Self {
        let f = swap_operator(2).into_matrix();
        let id = CMatrix::identity(4, 4);
        let half = C64::new(0.5, 0.0);
        let sym = kernel_within(support, &((&id - &f) * half));
        let anti = kernel_within(support, &((&id + &f) * half));
        let (a, m) = (sym.ncols(), sym.ncols() + anti.ncols());
        let q = CMatrix::from_fn(
            4,
            m,
            |i, j| if j < a { sym[(i, j)] } else { anti[(i, j - a)] },
        );

        let r = std::f64::consts::FRAC_1_SQRT_2;
        let unit = |j: usize, k: usize| {
            CMatrix::from_fn(m, m, |x, y| {
                if (x, y) == (j, k) {
                    C64::new(1.0, 0.0)
                } else {
                    ZERO
                }
            })
        };
        let mut raw = Vec::new();
        for (lo, hi) in [(0, a), (a, m)] {
            for j in lo..hi {
                raw.push(unit(j, j));
                for k in j + 1..hi {
                    let (jk, kj) = (unit(j, k), unit(k, j));
                    raw.push((&jk + &kj) * C64::new(r, 0.0));
                    raw.push((&jk - &kj) * C64::new(0.0, r));
                }
            }
        }
        let inner = |x: &CMatrix, y: &CMatrix| (x * y).trace().re;
        let centre = CMatrix::identity(m, m) / C64::new((m as f64).sqrt(), 0.0);
        let mut basis: Vec<CMatrix> = Vec::new();
        for e in raw {
            let mut v = &e - &centre * C64::new(inner(&e, &centre), 0.0);
            for b in &basis {
                v -= b * C64::new(inner(&v, b), 0.0);
            }
            let n = inner(&v, &v).sqrt();
            if n > 1e-10 {
                basis.push(v / C64::new(n, 0.0));
            }
        }
        Self { q, basis }
    }

    fn dim(&self) -> usize {
        self.q.ncols()
    }
}

/// Smallest eigenvalue and its eigenvector.
fn min_pair(m: &CMatrix) -> (f64, CMatrix) {
    let es = eig_hermitian(&HermitianMatrix::hermitian_part(m));
    let v = es.eigenvectors.columns(0, 1).into_owned();
    (es.eigenvalues[0], v)
}

/// Maximises a concave function of `theta in R^n` over the ball of radius `radius` with
/// the central-cut ellipsoid method. `f` returns the value and a supergradient. Stops as
/// soon as the best value reaches `-tol` (returns true) or the ellipsoid upper bound
/// drops below `-tol` (returns false).
fn ellipsoid_reaches(
    n: usize,
    radius: f64,
    tol: f64,
    max_iter: usize,
    f: impl Fn(&[f64]) -> (f64, Vec<f64>),
) -> bool {
    if n == 0 {
        return f(&[]).0 >= -tol;
    }
    // the update needs two dimensions; a dummy coordinate has zero gradient
    let dim = n.max(2);
    let mut c = vec![0.0; dim];
    let mut p = vec![vec![0.0; dim]; dim];
    for (i, row) in p.iter_mut().enumerate() {
        row[i] = radius * radius;
    }
    let mut best = f64::NEG_INFINITY;
    let nf = dim as f64;
    for _ in 0..max_iter {
        let (val, mut h) = f(&c[..n]);
        h.resize(dim, 0.0);
        best = best.max(val);
        if best >= -tol {
            return true;
        }
        let ph: Vec<f64> = (0..dim)
            .map(|i| (0..dim).map(|j| p[i][j] * h[j]).sum())
            .collect();
        let hph: f64 = (0..dim).map(|i| h[i] * ph[i]).sum();
        if hph <= 0.0 || val + hph.sqrt() < -tol {
            return false;
        }
        let g: Vec<f64> = ph.iter().map(|x| x / hph.sqrt()).collect();
        for i in 0..dim {
            c[i] += g[i] / (nf + 1.0);
        }
        let k = nf * nf / (nf * nf - 1.0);
        for i in 0..dim {
            for j in 0..dim {
                p[i][j] = k * (p[i][j] - 2.0 / (nf + 1.0) * g[i] * g[j]);
            }
        }
    }
    best >= -tol
}

/// Whether some swap-invariant state `sigma` on `face` has `A(sigma) >= 0` up to `1e-9`,
/// judged on the compression `U^dagger A(sigma) U`. `A` is affine and `linear_sign` is the
/// sign of its linear part.
fn swap_symmetric_exists(
    face: &SwapFace,
    u: &CMatrix,
    affine: impl Fn(&CMatrix) -> CMatrix,
    linear_sign: f64,
) -> bool {
    let m = face.dim();
    if m == 0 {
        return false;
    }
    let lifted: Vec<CMatrix> = face
        .basis
        .iter()
        .map(|e| u.adjoint() * &face.q * e * face.q.adjoint() * u)
        .collect();
    let centre = CMatrix::identity(m, m) / C64::new(m as f64, 0.0);
    let f = |theta: &[f64]| {
        let mut inner = centre.clone();
        for (t, e) in theta.iter().zip(&face.basis) {
            inner += e * C64::new(*t, 0.0);
        }
        let sigma = &face.q * &inner * face.q.adjoint();
        let (la, va) = min_pair(&(u.adjoint() * affine(&sigma) * u));
        let (ls, vs) = min_pair(&inner);
        let quad = |v: &CMatrix, e: &CMatrix| (v.adjoint() * e * v)[(0, 0)].re;
        let grad = if la <= ls {
            lifted.iter().map(|e| linear_sign * quad(&va, e)).collect()
        } else {
            face.basis.iter().map(|e| quad(&vs, e)).collect()
        };
        (la.min(ls), grad)
    };
    // a state's traceless part has Frobenius norm below 1
    ellipsoid_reaches(face.basis.len(), 1.0, 1e-9, 60_000, f)
}

fn check_two_qubits(rho: &DensityMatrix) -> Result<()> {
    if rho.dim() != 4 {
        return Err(domain(format!(
            "swap oracles act on two qubits, got dimension {}",
            rho.dim()
        )));
    }
    Ok(())
}

/// Definitional asymmetry weight under the two-qubit swap: bisection on `s` to `1e-6`,
/// deciding whether some symmetric state `sigma` has `rho - (1 - s) sigma >= 0`.
pub fn swap_aw_oracle(rho: &DensityMatrix) -> Result<f64> {
    check_two_qubits(rho)?;
    let r = rho.matrix().clone();
    // sigma must live on range(rho); restricting to it keeps the feasible set solid
    let es = rho.as_hermitian().eig();
    let keep: Vec<usize> = (0..4).filter(|&k| es.eigenvalues[k] > 1e-9).collect();
    let range = CMatrix::from_fn(4, keep.len(), |i, j| es.eigenvectors[(i, keep[j])]);
    let face = SwapFace::new(&range);
    let feasible = |s: f64| {
        let t = C64::new(1.0 - s, 0.0);
        swap_symmetric_exists(&face, &range, |sigma| &r - sigma * t, -(1.0 - s))
    };
    if feasible(0.0) {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > 1e-6 {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Definitional asymmetry robustness under the two-qubit swap: bisection on `s` to
/// `1e-6`, deciding whether some symmetric state `sigma` has `(1 + s) sigma - rho >= 0`.
pub fn swap_ar_oracle(rho: &DensityMatrix) -> Result<f64> {
    check_two_qubits(rho)?;
    let r = rho.matrix().clone();
    let id = CMatrix::identity(4, 4);
    let face = SwapFace::new(&id);
    let feasible = |s: f64| {
        let t = C64::new(1.0 + s, 0.0);
        swap_symmetric_exists(&face, &id, |sigma| sigma * t - &r, 1.0 + s)
    };
    if feasible(0.0) {
        return Ok(0.0);
    }
    let mut hi = 1.0;
    while !feasible(hi) {
        hi *= 2.0;
        if hi > 64.0 {
            return Err(domain("robustness oracle failed to bracket the optimum"));
        }
    }
    let mut lo = hi / 2.0;
    if hi == 1.0 {
        lo = 0.0;
    }
    while hi - lo > 1e-6 {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{
        dephase, generalized_x, gisin, haar_mixed_with, haar_pure_with, maximally_coherent,
        rep_swap, rng_for, werner, XStateSpec,
    };
    use approx::assert_abs_diff_eq;

    fn singlet() -> DensityMatrix {
        werner(2, 1.0).unwrap()
    }

    fn half_singlet_half_01() -> DensityMatrix {
        DensityMatrix::mix(0.5, &singlet(), &DensityMatrix::basis(4, 1).unwrap()).unwrap()
    }

    fn check_certificates(rho: &DensityMatrix, r: &MeasureReport, free: &FreeSet) {
        if let Some(err) = r.decomposition_error(rho) {
            assert!(err <= 1e-6, "decomposition error {err}");
        }
        if let Some(w) = &r.witness {
            assert!((rho.as_hermitian().inner(w) - r.value).abs() <= 1e-6);
            if matches!(
                r.measure,
                MeasureKind::CoherenceWeight | MeasureKind::AsymmetryWeight
            ) {
                let (_, feasible) = witness_evaluate(rho, w, free).unwrap();
                assert!(feasible);
            }
            let violation = witness_violation(r, free).unwrap().unwrap();
            assert!(violation <= WITNESS_TOL, "witness violation {violation}");
        }
        if let Some(s) = &r.free_state {
            let p = free.project(s.as_hermitian()).unwrap();
            assert!(frobenius_distance(p.matrix(), s.matrix()) <= 1e-8);
        }
    }

    #[test]
    fn coherence_weight_examples() {
        let mut rng = rng_for(1, 0);
        for _ in 0..5 {
            let rho = dephase(&haar_mixed_with(3, 3, &mut rng));
            assert_abs_diff_eq!(coherence_weight(&rho).unwrap().value, 0.0, epsilon = 1e-7);
        }
        let g = gisin(0.8, PI / 3.0).unwrap();
        let r = coherence_weight(&g).unwrap();
        assert_abs_diff_eq!(r.value, 0.8, epsilon = 1e-6);
        check_certificates(&g, &r, &FreeSet::Incoherent);

        let q = DensityMatrix::new(
            HermitianMatrix::from_real_rows(&[&[0.5, 0.3], &[0.3, 0.5]]).unwrap(),
        )
        .unwrap();
        let r = coherence_weight(&q).unwrap();
        assert_abs_diff_eq!(r.value, qubit_cw_oracle(&q).unwrap(), epsilon = 1e-4);
        check_certificates(&q, &r, &FreeSet::Incoherent);
    }

    #[test]
    fn weight_certificates_on_random_states() {
        let mut rng = rng_for(2, 0);
        for d in 2..=4 {
            for _ in 0..10 {
                let rho = haar_mixed_with(d, d, &mut rng);
                let r = coherence_weight(&rho).unwrap();
                assert!((0.0..=1.0).contains(&r.value));
                check_certificates(&rho, &r, &FreeSet::Incoherent);
                let r = robustness_coherence(&rho).unwrap();
                check_certificates(&rho, &r, &FreeSet::Incoherent);
            }
        }
    }

    #[test]
    fn asymmetry_weight_examples() {
        let rep = rep_swap(2).unwrap();
        for alpha in [0.0, 0.4, 1.0] {
            let w = werner(2, alpha).unwrap();
            assert_abs_diff_eq!(
                asymmetry_weight(&w, &rep).unwrap().value,
                0.0,
                epsilon = 1e-7
            );
        }
        let ket = DensityMatrix::basis(4, 1).unwrap();
        assert_eq!(asymmetry_weight(&ket, &rep).unwrap().value, 1.0);
        let opts = WeightOptions {
            pure_shortcut: false,
            ..WeightOptions::default()
        };
        let free = FreeSet::Symmetric(rep.clone());
        let r = weight(&ket, &free, &opts).unwrap();
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-6);
        check_certificates(&ket, &r, &free);

        let mix = half_singlet_half_01();
        let r = asymmetry_weight(&mix, &rep).unwrap();
        check_certificates(&mix, &r, &free);
        assert_abs_diff_eq!(r.value, swap_aw_oracle(&mix).unwrap(), epsilon = 1e-4);

        // rank deficient: the optimal sigma sits on a face of the symmetric states
        let thin = haar_mixed_with(4, 2, &mut rng_for(2, 0));
        let r = asymmetry_weight(&thin, &rep).unwrap();
        assert!(r.value < 0.95);
        assert_abs_diff_eq!(r.value, swap_aw_oracle(&thin).unwrap(), epsilon = 1e-4);
    }

    #[test]
    fn l1_and_relative_entropy_examples() {
        let diag = DensityMatrix::new(HermitianMatrix::from_diagonal(&[0.1, 0.9])).unwrap();
        assert_eq!(l1_coherence(&diag), 0.0);
        assert_abs_diff_eq!(rel_entropy_coherence(&diag), 0.0, epsilon = 1e-12);
        for d in 2..=5 {
            let plus = maximally_coherent(d).unwrap();
            assert_abs_diff_eq!(l1_coherence(&plus), (d - 1) as f64, epsilon = 1e-12);
            assert_abs_diff_eq!(
                rel_entropy_coherence(&plus),
                (d as f64).ln(),
                epsilon = 1e-9
            );
        }
        for alpha in [0.1, 0.6] {
            assert_abs_diff_eq!(
                l1_coherence(&werner(3, alpha).unwrap()),
                alpha,
                epsilon = 1e-12
            );
        }
        let mut rng = rng_for(3, 0);
        for _ in 0..5 {
            let psi = haar_pure_with(3, &mut rng);
            let expected = von_neumann_entropy(&dephase(&psi));
            assert_abs_diff_eq!(rel_entropy_coherence(&psi), expected, epsilon = 1e-9);
        }
    }

    #[test]
    fn rel_entropy_asymmetry_examples() {
        let rep = rep_swap(2).unwrap();
        assert_abs_diff_eq!(
            rel_entropy_asymmetry(&werner(2, 0.3).unwrap(), &rep).unwrap(),
            0.0,
            epsilon = 1e-9
        );
        let ket = DensityMatrix::basis(4, 1).unwrap();
        assert_abs_diff_eq!(
            rel_entropy_asymmetry(&ket, &rep).unwrap(),
            2f64.ln(),
            epsilon = 1e-9
        );
        let mut rng = rng_for(4, 0);
        for _ in 0..10 {
            let rho = haar_mixed_with(4, 4, &mut rng);
            let ar = rel_entropy_asymmetry(&rho, &rep).unwrap();
            let aw = asymmetry_weight(&rho, &rep).unwrap().value;
            assert!(ar >= -1e-9);
            assert!(ar <= 4f64.ln() * aw + 1e-6);
        }
    }

    #[test]
    fn robustness_examples() {
        let diag = DensityMatrix::new(HermitianMatrix::from_diagonal(&[0.3, 0.3, 0.4])).unwrap();
        assert_abs_diff_eq!(
            robustness_coherence(&diag).unwrap().value,
            0.0,
            epsilon = 1e-7
        );
        assert_abs_diff_eq!(
            robustness_coherence(&werner(3, 0.75).unwrap())
                .unwrap()
                .value,
            0.75,
            epsilon = 1e-6
        );
        let mut rng = rng_for(5, 0);
        for d in [2, 4] {
            for _ in 0..10 {
                let x = generalized_x(&XStateSpec::random(d, &mut rng)).unwrap();
                assert_abs_diff_eq!(
                    robustness_coherence(&x).unwrap().value,
                    l1_coherence(&x),
                    epsilon = 1e-6
                );
            }
        }
        let rep = rep_swap(2).unwrap();
        assert_abs_diff_eq!(
            robustness_asymmetry(&werner(2, 0.5).unwrap(), &rep)
                .unwrap()
                .value,
            0.0,
            epsilon = 1e-7
        );
        for _ in 0..10 {
            let rho = haar_mixed_with(4, 4, &mut rng);
            let ar = robustness_asymmetry(&rho, &rep).unwrap();
            check_certificates(&rho, &ar, &FreeSet::Symmetric(rep.clone()));
            let aw = asymmetry_weight(&rho, &rep).unwrap().value;
            assert!(ar.value <= 3.0 * aw + 1e-6);
        }
        let ket = DensityMatrix::basis(4, 1).unwrap();
        let ar = robustness_asymmetry(&ket, &rep).unwrap().value;
        assert_abs_diff_eq!(ar, swap_ar_oracle(&ket).unwrap(), epsilon = 1e-4);
    }

    #[test]
    fn hs_bound_examples() {
        let diag = DensityMatrix::new(HermitianMatrix::from_diagonal(&[0.5, 0.5])).unwrap();
        assert_eq!(
            hs_lower_bound(&diag, &FreeSet::Incoherent).unwrap(),
            (0.0, 0.0)
        );
        let (sharp, loose) =
            hs_lower_bound(&maximally_coherent(2).unwrap(), &FreeSet::Incoherent).unwrap();
        assert_abs_diff_eq!(sharp, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(loose, 0.5, epsilon = 1e-12);
        let mut rng = rng_for(6, 0);
        for _ in 0..50 {
            let rho = haar_mixed_with(3, 3, &mut rng);
            let (sharp, loose) = hs_lower_bound(&rho, &FreeSet::Incoherent).unwrap();
            assert!(sharp >= loose && loose >= 0.0);
            assert!(sharp <= coherence_weight(&rho).unwrap().value + 1e-6);
        }
    }

    #[test]
    fn witness_examples() {
        let mut rng = rng_for(7, 0);
        for _ in 0..10 {
            let rho = haar_mixed_with(3, 3, &mut rng);
            let w = (rho.as_hermitian() - &rho.as_hermitian().diagonal_part())
                .scale(1.0 / rho.as_hermitian().max_eigenvalue());
            let (value, feasible) = witness_evaluate(&rho, &w, &FreeSet::Incoherent).unwrap();
            assert!(feasible);
            assert!(value > 0.0);
        }
        // the negated swap scores +1 on the singlet, but G(-V) = -V has eigenvalue +1,
        // so it is not a feasible asymmetry witness
        let rep = rep_swap(2).unwrap();
        let minus_v = -&swap_operator(2);
        let (value, feasible) =
            witness_evaluate(&singlet(), &minus_v, &FreeSet::Symmetric(rep)).unwrap();
        assert_abs_diff_eq!(value, 1.0, epsilon = 1e-12);
        assert!(!feasible);
    }

    #[test]
    fn qubit_oracle_examples() {
        let diag = DensityMatrix::new(HermitianMatrix::from_diagonal(&[0.2, 0.8])).unwrap();
        assert!(qubit_cw_oracle(&diag).unwrap() <= 1e-4);
        assert_abs_diff_eq!(
            qubit_cw_oracle(&maximally_coherent(2).unwrap()).unwrap(),
            1.0,
            epsilon = 1e-4
        );
        assert!(qubit_cw_oracle(&maximally_coherent(3).unwrap()).is_err());
    }

    #[test]
    fn phase_alignment_examples() {
        let mut rng = rng_for(8, 0);
        for _ in 0..10 {
            let q = haar_mixed_with(2, 2, &mut rng);
            let phases = prop6_applicable(&q).unwrap();
            let u = phase_unitary(&phases);
            let rotated = q.as_hermitian().conjugate_by(&u);
            assert!(rotated.entry(0, 1).re < 0.0);
            assert!(rotated.entry(0, 1).im.abs() < 1e-12);
        }
        for d in [3, 4, 5] {
            for _ in 0..5 {
                let x = generalized_x(&XStateSpec::random(d, &mut rng)).unwrap();
                assert!(prop6_applicable(&x).is_some());
                assert!(coherence_weight(&x).unwrap().value >= l1_coherence(&x) - 1e-6);
            }
        }
        // three mutually coherent levels with incompatible phases
        let mut m = CMatrix::identity(3, 3) * C64::new(1.0 / 3.0, 0.0);
        for (i, j) in [(0, 1), (1, 2), (0, 2)] {
            m[(i, j)] = C64::new(0.1, 0.0);
            m[(j, i)] = C64::new(0.1, 0.0);
        }
        let rho = DensityMatrix::new(HermitianMatrix::new(m).unwrap()).unwrap();
        assert!(prop6_applicable(&rho).is_none());
    }

    #[test]
    fn swap_basis_spans_the_commutant() {
        let face = SwapFace::new(&CMatrix::identity(4, 4));
        assert_eq!(face.basis.len(), 9);
        let f = swap_operator(2).into_matrix();
        for e in &face.basis {
            let lifted = &face.q * e * face.q.adjoint();
            assert!(frobenius_distance(&(&f * &lifted), &(&lifted * &f)) < 1e-14);
            assert!(e.trace().norm() < 1e-14);
        }
        // a generic rank-2 range meets the symmetric subspace in one direction
        let rho = haar_mixed_with(4, 2, &mut rng_for(2, 0));
        let es = rho.as_hermitian().eig();
        let range = es.eigenvectors.columns(2, 2).into_owned();
        let face = SwapFace::new(&range);
        assert_eq!((face.dim(), face.basis.len()), (1, 0));
    }

    #[test]
    fn report_json_contains_matrices() {
        let r = coherence_weight(&werner(2, 0.5).unwrap()).unwrap();
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["measure"], "cw");
        assert_eq!(v["witness"]["dim"], 4);
        assert!(v["free_state"]["re"].is_array());
    }
}
