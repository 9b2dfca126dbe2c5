//! Dense primal-dual interior-point solver for small Hermitian SDPs.
//!
//! Every program is brought to the inequality form
//!
//! ```text
//! maximize  <B, X> + c   subject to  M(X) <= D,  X >= 0
//! minimize  <D, Y> + c   subject to  M(Y) >= B,  Y >= 0
//! ```
//!
//! where `M = +P` or `M = -P` for a self-adjoint free projection `P` (identity,
//! dephasing or a group twirl). If `B` is fixed by `P`, `X` can be replaced by `P(X)`
//! without changing anything, so the solver parametrizes `X` over the free subspace
//! only; symmetrically for `Y` when `D` is fixed. What remains is a two-block linear
//! matrix inequality, solved by a Mehrotra predictor-corrector with Nesterov-Todd
//! scaling. Newton systems are solved by QR on the scaled coefficients.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{inner, jacobi_eigen, CMatrix, DensityMatrix, HermitianMatrix, C64, ZERO};
use crate::states::{FreeSet, UnitaryRep};

/// Linear map appearing in the constraint `M(X) <= D`.
#[derive(Clone, Debug)]
pub enum ConstraintMap {
    Identity,
    Dephasing,
    GroupAverage(UnitaryRep),
}

impl ConstraintMap {
    fn apply(&self, m: &CMatrix) -> CMatrix {
        match self {
            Self::Identity => m.clone(),
            Self::Dephasing => FreeSet::Incoherent.project_raw(m),
            Self::GroupAverage(rep) => rep.twirl_raw(m),
        }
    }

    fn dim(&self) -> Option<usize> {
        match self {
            Self::GroupAverage(rep) => Some(rep.dim()),
            _ => None,
        }
    }
}

impl From<&FreeSet> for ConstraintMap {
    fn from(free: &FreeSet) -> Self {
        match free {
            FreeSet::Incoherent => Self::Dephasing,
            FreeSet::Symmetric(rep) => Self::GroupAverage(rep.clone()),
        }
    }
}

/// `maximize <B, X> + offset  s.t.  sign * P(X) <= D,  X >= 0`.
#[derive(Clone, Debug)]
pub struct SdpProblem {
    pub objective: HermitianMatrix,
    pub map: ConstraintMap,
    /// When set the constraint reads `-P(X) <= D`.
    pub negate_map: bool,
    pub bound: HermitianMatrix,
    pub offset: f64,
}

impl SdpProblem {
    pub fn new(
        objective: HermitianMatrix,
        map: ConstraintMap,
        bound: HermitianMatrix,
    ) -> Result<Self> {
        let d = objective.dim();
        if bound.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: bound.dim(),
            });
        }
        if let Some(n) = map.dim() {
            if n != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: n,
                });
            }
        }
        Ok(Self {
            objective,
            map,
            negate_map: false,
            bound,
            offset: 0.0,
        })
    }

    pub fn with_offset(mut self, offset: f64) -> Self {
        self.offset = offset;
        self
    }

    pub fn negated(mut self) -> Self {
        self.negate_map = !self.negate_map;
        self
    }

    pub fn dim(&self) -> usize {
        self.objective.dim()
    }

    /// `M(X)` including the sign.
    pub fn apply_map(&self, h: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix::hermitian_part(&self.apply(h.matrix()))
    }

    fn apply(&self, m: &CMatrix) -> CMatrix {
        let out = self.map.apply(m);
        if self.negate_map {
            -out
        } else {
            out
        }
    }

    /// Checks `<M(A), B> = <A, M(B)>` on two fixed Hermitian probes.
    pub fn check_self_adjoint(&self) -> Result<()> {
        let d = self.dim();
        let probe = |k: f64| {
            let m = CMatrix::from_fn(d, d, |i, j| {
                let t = (i * d + j) as f64 + k;
                C64::new((1.3 * t).sin(), (0.7 * t + k).cos())
            });
            (&m + m.adjoint()) * C64::new(0.5, 0.0)
        };
        let (a, b) = (probe(0.0), probe(1.0));
        let lhs = inner(&self.apply(&a), &b);
        let rhs = inner(&a, &self.apply(&b));
        let scale = 1.0 + a.norm() * b.norm();
        if (lhs - rhs).abs() > 1e-10 * scale {
            return Err(Error::Domain(format!(
                "constraint map is not self-adjoint: {lhs} vs {rhs}"
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Optimal,
    MaxIter,
    Infeasible,
}

#[derive(Clone, Debug)]
pub struct SolverSettings {
    /// Stop once gap and complementarity fall below this.
    pub gap_tol: f64,
    /// Largest gap still reported as optimal when the iteration stalls.
    pub accept_gap: f64,
    pub feas_tol: f64,
    pub max_iterations: usize,
    pub step_fraction: f64,
    /// The parametrized variable starts at `tau0 * I`.
    pub tau0: f64,
    pub record_trace: bool,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            gap_tol: 1e-8,
            accept_gap: 1e-7,
            feas_tol: 1e-8,
            max_iterations: 200,
            step_fraction: 0.98,
            tau0: 1.0,
            record_trace: false,
        }
    }
}

/// One row of the optional iterate log.
#[derive(Clone, Debug, Serialize)]
pub struct IterateRecord {
    pub iteration: usize,
    pub primal_value: f64,
    pub dual_value: f64,
    pub gap: f64,
    pub mu: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub step_primal: f64,
    pub step_dual: f64,
}

#[derive(Clone, Debug)]
pub struct SdpSolution {
    pub primal_value: f64,
    pub dual_value: f64,
    /// Primal optimizer `X*`.
    pub x: HermitianMatrix,
    /// Dual optimizer `Y*`.
    pub y: HermitianMatrix,
    /// Primal slack `S* = D - M(X*)`.
    pub slack: HermitianMatrix,
    /// Dual slack `Z* = M(Y*) - B`.
    pub dual_slack: HermitianMatrix,
    /// `|dual - primal|`.
    pub gap: f64,
    /// Larger of the primal and dual residual norms.
    pub residual: f64,
    pub iterations: usize,
    pub status: SolveStatus,
    pub trace: Vec<IterateRecord>,
}

impl SdpSolution {
    /// Midpoint of the primal and dual values.
    pub fn value(&self) -> f64 {
        0.5 * (self.primal_value + self.dual_value)
    }

    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }

    /// Error unless the status is optimal.
    pub fn require_optimal(self) -> Result<Self> {
        if self.is_optimal() {
            Ok(self)
        } else {
            Err(Error::Solver {
                status: self.status,
                gap: self.gap,
                residual: self.residual,
            })
        }
    }

    /// Iterate log as JSON lines.
    pub fn trace_json_lines(&self) -> String {
        self.trace
            .iter()
            .map(|r| serde_json::to_string(r).expect("record serializes") + "\n")
            .collect()
    }
}

/// Orthonormal basis of the real space of `d x d` Hermitian matrices under `Re Tr(AB)`:
/// `E_kk`, `(E_kl + E_lk)/sqrt 2`, `i(E_kl - E_lk)/sqrt 2`.
struct HermitianBasis {
    d: usize,
    pairs: Vec<(usize, usize)>,
}

impl HermitianBasis {
    fn new(d: usize) -> Self {
        let pairs = (0..d)
            .flat_map(|k| (k + 1..d).map(move |l| (k, l)))
            .collect();
        Self { d, pairs }
    }

    fn len(&self) -> usize {
        self.d * self.d
    }

    fn element(&self, idx: usize) -> CMatrix {
        let mut coords = vec![0.0; self.len()];
        coords[idx] = 1.0;
        self.assemble(&coords)
    }

    fn coords(&self, h: &CMatrix) -> Vec<f64> {
        let d = self.d;
        let r2 = std::f64::consts::SQRT_2;
        let mut out = Vec::with_capacity(self.len());
        out.extend((0..d).map(|k| h[(k, k)].re));
        for &(k, l) in &self.pairs {
            // average the two triangles so slightly non-Hermitian input is projected
            let z = (h[(k, l)] + h[(l, k)].conj()) * 0.5;
            out.push(r2 * z.re);
            out.push(r2 * z.im);
        }
        out
    }

    fn assemble(&self, c: &[f64]) -> CMatrix {
        let d = self.d;
        let r2 = std::f64::consts::FRAC_1_SQRT_2;
        let mut m = CMatrix::from_element(d, d, ZERO);
        for k in 0..d {
            m[(k, k)] = C64::new(c[k], 0.0);
        }
        for (n, &(k, l)) in self.pairs.iter().enumerate() {
            let z = C64::new(c[d + 2 * n], c[d + 2 * n + 1]) * r2;
            m[(k, l)] = z;
            m[(l, k)] = z.conj();
        }
        m
    }
}

fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

fn eig(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    jacobi_eigen(hermitize(m))
}

fn min_eig(m: &CMatrix) -> f64 {
    eig(m).0[0]
}

fn scale_columns(u: &CMatrix, s: &[f64]) -> CMatrix {
    let mut out = u.clone();
    for (j, &x) in s.iter().enumerate() {
        out.column_mut(j).scale_mut(x);
    }
    out
}

/// Lifts `m` into the interior so that its smallest eigenvalue is at least 1.
fn shift_into_cone(m: CMatrix) -> CMatrix {
    let lmin = min_eig(&m);
    if lmin < 1.0 {
        let d = m.nrows();
        m + CMatrix::identity(d, d) * C64::new(1.0 - lmin, 0.0)
    } else {
        m
    }
}

/// Nesterov-Todd scaling of a pair `(P, Q)` of positive definite matrices:
/// `G^{-1} P G^{-dagger} = G^dagger Q G = V` with `V` diagonal, and `W = G G^dagger`
/// satisfies `W Q W = P`.
struct NtScaling {
    g: CMatrix,
    g_inv: CMatrix,
    v: Vec<f64>,
}

impl NtScaling {
    fn new(p: &CMatrix, q: &CMatrix) -> Option<Self> {
        let (ep, u) = eig(p);
        if ep[0] <= 0.0 {
            return None;
        }
        let sq: Vec<f64> = ep.iter().map(|x| x.sqrt()).collect();
        let p_half = scale_columns(&u, &sq) * u.adjoint();
        let p_mhalf =
            scale_columns(&u, &sq.iter().map(|x| 1.0 / x).collect::<Vec<_>>()) * u.adjoint();
        let (lam, qv) = eig(&(&p_half * q * &p_half));
        if lam[0] <= 0.0 {
            return None;
        }
        let quarter: Vec<f64> = lam.iter().map(|x| x.powf(-0.25)).collect();
        let g = &p_half * scale_columns(&qv, &quarter);
        let inv_quarter: Vec<f64> = lam.iter().map(|x| x.powf(0.25)).collect();
        let g_inv = scale_columns(&qv, &inv_quarter).adjoint() * p_mhalf;
        let v = lam.iter().map(|x| x.sqrt()).collect();
        Some(Self { g, g_inv, v })
    }

    fn scale_primal(&self, dp: &CMatrix) -> CMatrix {
        &self.g_inv * dp * self.g_inv.adjoint()
    }

    fn scale_dual(&self, dq: &CMatrix) -> CMatrix {
        self.g.adjoint() * dq * &self.g
    }

    fn unscale_primal(&self, m: &CMatrix) -> CMatrix {
        hermitize(&(&self.g * m * self.g.adjoint()))
    }

    fn unscale_dual(&self, m: &CMatrix) -> CMatrix {
        hermitize(&(self.g_inv.adjoint() * m * &self.g_inv))
    }

    /// Solves `(V K + K V)/2 = R` for `K`.
    fn lyapunov(&self, r: &CMatrix) -> CMatrix {
        let n = self.v.len();
        CMatrix::from_fn(n, n, |i, j| r[(i, j)] * (2.0 / (self.v[i] + self.v[j])))
    }

    /// Largest `alpha` keeping `V + alpha * D` positive semidefinite (may be infinite).
    fn max_step(&self, scaled: &CMatrix) -> f64 {
        let n = self.v.len();
        let m = CMatrix::from_fn(n, n, |i, j| scaled[(i, j)] / (self.v[i] * self.v[j]).sqrt());
        let lmin = min_eig(&m);
        if lmin >= 0.0 {
            f64::INFINITY
        } else {
            -1.0 / lmin
        }
    }

    fn v_diag(&self) -> CMatrix {
        let n = self.v.len();
        CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                C64::new(self.v[i], 0.0)
            } else {
                ZERO
            }
        })
    }

    fn v_squared(&self) -> CMatrix {
        let n = self.v.len();
        CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                C64::new(self.v[i] * self.v[i], 0.0)
            } else {
                ZERO
            }
        })
    }
}

/// Newton system `At^T At dy = rhs` for the scaled coefficient matrix `At`. The triangular
/// factor comes from a QR factorization of `At`, so the normal matrix is never formed
/// and its squared conditioning never enters.
struct Newton {
    at: DMatrix<f64>,
    r: DMatrix<f64>,
}

impl Newton {
    fn new(at: DMatrix<f64>) -> Option<Self> {
        let r = at.clone().qr().r();
        let diag = r.diagonal();
        let scale = diag.amax();
        if scale.is_nan() || scale <= 0.0 || diag.iter().any(|v| v.abs() <= 1e-15 * scale) {
            return None;
        }
        Some(Self { at, r })
    }

    fn normal_solve(&self, b: &DVector<f64>) -> Option<DVector<f64>> {
        let w = self.r.tr_solve_upper_triangular(b)?;
        self.r.solve_upper_triangular(&w)
    }

    fn solve(&self, b: &DVector<f64>) -> Option<DVector<f64>> {
        let mut x = self.normal_solve(b)?;
        let res = b - self.at.tr_mul(&(&self.at * &x));
        x += self.normal_solve(&res)?;
        x.iter().all(|v| v.is_finite()).then_some(x)
    }
}

/// Which variable of the pair is parametrized directly.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Side {
    Primal,
    Dual,
}

/// Two-block linear matrix inequality
///
/// ```text
/// minimize c.y   s.t.  S_k = C_k + sum_i y_i A_ki >= 0      (k = 1, 2)
/// maximize -sum_k <C_k, Z_k>   s.t.  sum_k <A_ki, Z_k> = c_i,  Z_k >= 0
/// ```
///
/// Block 1 is the matrix variable itself, block 2 the constraint. When `B` is fixed by
/// the free projection the primal `X` may be taken free too (replace it by `P(X)`), and
/// likewise `Y` when `D` is free. Parametrizing only that subspace removes the flat
/// directions of the unreduced problem, which otherwise wreck the Newton system on
/// nearly singular states.
struct Lmi {
    side: Side,
    full: HermitianBasis,
    basis: Vec<CMatrix>,
    c: Vec<f64>,
    consts: [CMatrix; 2],
    coeffs: [Vec<CMatrix>; 2],
}

impl Lmi {
    fn new(p: &SdpProblem) -> Self {
        let d = p.dim();
        let b = p.objective.matrix();
        let dm = p.bound.matrix();
        let fixed = |m: &CMatrix| (p.map.apply(m) - m).norm() <= 1e-12 * (1.0 + m.norm());
        let (side, basis) = if fixed(b) {
            (Side::Primal, subspace_basis(&p.map, d))
        } else if fixed(dm) {
            (Side::Dual, subspace_basis(&p.map, d))
        } else {
            (Side::Primal, subspace_basis(&ConstraintMap::Identity, d))
        };
        let zero = CMatrix::from_element(d, d, ZERO);
        let mapped: Vec<CMatrix> = basis.iter().map(|f| p.apply(f)).collect();
        match side {
            // X = F(y):  X >= 0,  D - M(X) >= 0
            Side::Primal => Self {
                side,
                c: basis.iter().map(|f| -inner(b, f)).collect(),
                consts: [zero, dm.clone()],
                coeffs: [basis.clone(), mapped.into_iter().map(|m| -m).collect()],
                full: HermitianBasis::new(d),
                basis,
            },
            // Y = F(y):  Y >= 0,  M(Y) - B >= 0
            Side::Dual => Self {
                side,
                c: basis.iter().map(|f| inner(dm, f)).collect(),
                consts: [zero, -b],
                coeffs: [basis.clone(), mapped],
                full: HermitianBasis::new(d),
                basis,
            },
        }
    }

    fn combine(&self, y: &[f64]) -> CMatrix {
        let d = self.consts[0].nrows();
        y.iter()
            .zip(&self.basis)
            .fold(CMatrix::from_element(d, d, ZERO), |acc, (&v, f)| {
                acc + f * C64::new(v, 0.0)
            })
    }

    fn affine(&self, k: usize, y: &[f64]) -> CMatrix {
        y.iter()
            .zip(&self.coeffs[k])
            .fold(self.consts[k].clone(), |acc, (&v, a)| {
                acc + a * C64::new(v, 0.0)
            })
    }

    fn adjoint(&self, k: usize, z: &CMatrix) -> Vec<f64> {
        self.coeffs[k].iter().map(|a| inner(a, z)).collect()
    }

    /// Stacks the coordinates of the scaled coefficients `G_k^-1 A_ki G_k^-dagger`.
    fn newton(&self, nt: &[NtScaling; 2]) -> Option<Newton> {
        let n = self.full.len();
        let mut at = DMatrix::<f64>::zeros(2 * n, self.basis.len());
        for (k, scaling) in nt.iter().enumerate() {
            for (i, a) in self.coeffs[k].iter().enumerate() {
                let coords = self.full.coords(&scaling.scale_primal(a));
                at.view_mut((k * n, i), (n, 1)).copy_from_slice(&coords);
            }
        }
        Newton::new(at)
    }
}

/// Orthonormal basis of the Hermitian matrices fixed by the map.
fn subspace_basis(map: &ConstraintMap, d: usize) -> Vec<CMatrix> {
    let full = HermitianBasis::new(d);
    match map {
        ConstraintMap::Identity => (0..full.len()).map(|k| full.element(k)).collect(),
        ConstraintMap::Dephasing => (0..d).map(|k| full.element(k)).collect(),
        ConstraintMap::GroupAverage(_) => {
            let n = full.len();
            let mut proj = DMatrix::<f64>::zeros(n, n);
            for k in 0..n {
                for (i, v) in full
                    .coords(&map.apply(&full.element(k)))
                    .into_iter()
                    .enumerate()
                {
                    proj[(i, k)] = v;
                }
            }
            let eig = ((&proj + proj.transpose()) * 0.5).symmetric_eigen();
            (0..n)
                .filter(|&j| eig.eigenvalues[j] > 0.5)
                .map(|j| full.assemble(eig.eigenvectors.column(j).as_slice()))
                .collect()
        }
    }
}

struct Direction {
    dy: DVector<f64>,
    ds: [CMatrix; 2],
    dz: [CMatrix; 2],
    /// `G^-1 dS G^-dagger` and `G^dagger dZ G`.
    ds_scaled: [CMatrix; 2],
    dz_scaled: [CMatrix; 2],
}

struct Iterate<'a> {
    lmi: &'a Lmi,
    y: Vec<f64>,
    s: [CMatrix; 2],
    z: [CMatrix; 2],
}

impl Iterate<'_> {
    fn residuals(&self) -> ([CMatrix; 2], Vec<f64>) {
        let lmi = self.lmi;
        let rp = [0, 1].map(|k| lmi.affine(k, &self.y) - &self.s[k]);
        let (a0, a1) = (lmi.adjoint(0, &self.z[0]), lmi.adjoint(1, &self.z[1]));
        let rd = (0..lmi.c.len()).map(|i| lmi.c[i] - a0[i] - a1[i]).collect();
        (rp, rd)
    }

    /// Newton direction for the scaled complementarity targets `dS~ + dZ~ = K_k`.
    fn direction(
        &self,
        newton: &Newton,
        nt: &[NtScaling; 2],
        rp: &[CMatrix; 2],
        rd: &[f64],
        targets: &[CMatrix; 2],
    ) -> Option<Direction> {
        let lmi = self.lmi;
        let n = lmi.full.len();
        let rp_scaled = [0, 1].map(|k| nt[k].scale_primal(&rp[k]));
        let mut bt = DVector::<f64>::zeros(2 * n);
        for k in 0..2 {
            let coords = lmi.full.coords(&(&targets[k] - &rp_scaled[k]));
            bt.rows_mut(k * n, n).copy_from_slice(&coords);
        }
        let rhs = newton.at.tr_mul(&bt) - DVector::from_column_slice(rd);
        let dy = newton.solve(&rhs)?;
        let lin = &newton.at * &dy;
        let ds_scaled =
            [0, 1].map(|k| lmi.full.assemble(lin.rows(k * n, n).as_slice()) + &rp_scaled[k]);
        let mut dz_scaled = [0, 1].map(|k| &targets[k] - &ds_scaled[k]);
        let ds = [0, 1].map(|k| nt[k].unscale_primal(&ds_scaled[k]));
        let mut dz = [0, 1].map(|k| nt[k].unscale_dual(&dz_scaled[k]));
        // leftover rounding in the dual equation; block 1 is the variable itself, so its
        // coordinates absorb it exactly
        let (a0, a1) = (lmi.adjoint(0, &dz[0]), lmi.adjoint(1, &dz[1]));
        let err: Vec<f64> = (0..rd.len()).map(|i| rd[i] - a0[i] - a1[i]).collect();
        let fix = lmi.combine(&err);
        dz_scaled[0] += nt[0].scale_dual(&fix);
        dz[0] += fix;
        Some(Direction {
            dy,
            ds,
            dz,
            ds_scaled,
            dz_scaled,
        })
    }
}

/// Solves with [`SolverSettings::default`].
pub fn solve(p: &SdpProblem) -> Result<SdpSolution> {
    solve_with(p, &SolverSettings::default())
}

pub fn solve_with(p: &SdpProblem, settings: &SolverSettings) -> Result<SdpSolution> {
    p.check_self_adjoint()?;
    let d = p.dim();
    let id = CMatrix::identity(d, d);
    let lmi = Lmi::new(p);
    let y0: Vec<f64> = lmi
        .basis
        .iter()
        .map(|f| settings.tau0 * f.trace().re)
        .collect();
    let s = [0, 1].map(|k| shift_into_cone(lmi.affine(k, &y0)));
    let mut it = Iterate {
        lmi: &lmi,
        y: y0,
        s,
        z: [id.clone(), id.clone()],
    };
    // LMI objectives in terms of the original pair
    let values = |it: &Iterate| {
        let cy: f64 = lmi.c.iter().zip(&it.y).map(|(a, b)| a * b).sum();
        let dual = -inner(&lmi.consts[1], &it.z[1]);
        match lmi.side {
            Side::Primal => (-cy + p.offset, -dual + p.offset),
            Side::Dual => (dual + p.offset, cy + p.offset),
        }
    };

    let nn = 2.0 * d as f64;
    let mut trace = Vec::new();
    let mut status = SolveStatus::MaxIter;
    let mut iterations = 0;
    let (mut step_p, mut step_d) = (0.0, 0.0);
    let mut last;
    // best iterate with small residual: (score, values, y, s, z)
    type Snapshot = (
        f64,
        (f64, f64, f64, f64),
        Vec<f64>,
        [CMatrix; 2],
        [CMatrix; 2],
    );
    let mut best: Option<Snapshot> = None;
    let mut tiny_steps = 0;

    loop {
        let (rp, rd) = it.residuals();
        let (pobj, dobj) = values(&it);
        let comp = inner(&it.s[0], &it.z[0]) + inner(&it.s[1], &it.z[1]);
        let mu = comp / nn;
        let rp_norm = rp[0].norm().hypot(rp[1].norm());
        let rd_norm = rd.iter().map(|v| v * v).sum::<f64>().sqrt();
        let res = rp_norm.max(rd_norm);
        let gap = (dobj - pobj).abs();
        last = (pobj, dobj, gap, res);
        let score = gap.max(comp);
        if res <= settings.feas_tol && best.as_ref().is_none_or(|b| score < b.0) {
            best = Some((score, last, it.y.clone(), it.s.clone(), it.z.clone()));
        }
        if settings.record_trace {
            let (primal_residual, dual_residual) = match lmi.side {
                Side::Primal => (rp_norm, rd_norm),
                Side::Dual => (rd_norm, rp_norm),
            };
            trace.push(IterateRecord {
                iteration: iterations,
                primal_value: pobj,
                dual_value: dobj,
                gap,
                mu,
                primal_residual,
                dual_residual,
                step_primal: step_p,
                step_dual: step_d,
            });
        }
        if gap <= settings.gap_tol && comp <= settings.gap_tol && res <= settings.feas_tol {
            status = SolveStatus::Optimal;
            break;
        }
        let size =
            it.y.iter()
                .fold(0f64, |a, v| a.max(v.abs()))
                .max(it.z[0].norm())
                .max(it.z[1].norm());
        if size > 1e9 {
            status = SolveStatus::Infeasible;
            break;
        }
        if iterations >= settings.max_iterations {
            break;
        }
        iterations += 1;

        let (Some(n0), Some(n1)) = (
            NtScaling::new(&it.s[0], &it.z[0]),
            NtScaling::new(&it.s[1], &it.z[1]),
        ) else {
            break;
        };
        let nt = [n0, n1];
        let Some(newton) = lmi.newton(&nt) else {
            break;
        };
        let v_diag = nt.each_ref().map(NtScaling::v_diag);

        // predictor: aim at S Z = 0, i.e. K = -V in scaled form
        let targets = v_diag.each_ref().map(|v| -v);
        let Some(aff) = it.direction(&newton, &nt, &rp, &rd, &targets) else {
            break;
        };
        let ap = (0..2).fold(1f64, |a, k| a.min(nt[k].max_step(&aff.ds_scaled[k])));
        let ad = (0..2).fold(1f64, |a, k| a.min(nt[k].max_step(&aff.dz_scaled[k])));
        let (cp, cd) = (C64::new(ap, 0.0), C64::new(ad, 0.0));
        let mu_aff = (0..2)
            .map(|k| {
                inner(
                    &(&v_diag[k] + &aff.ds_scaled[k] * cp),
                    &(&v_diag[k] + &aff.dz_scaled[k] * cd),
                )
            })
            .sum::<f64>()
            / nn;
        // short predictor steps signal lost centrality: damp the reduction
        let expon = (3.0 * ap.min(ad).powi(2)).max(1.0);
        let sigma = (mu_aff.max(0.0) / mu).powf(expon).clamp(0.0, 1.0);

        // corrector
        let targets = [0, 1].map(|k| {
            let n = &nt[k];
            let cross = hermitize(&(&aff.ds_scaled[k] * &aff.dz_scaled[k]));
            n.lyapunov(&(&id * C64::new(sigma * mu, 0.0) - n.v_squared() - cross))
        });
        let Some(dir) = it.direction(&newton, &nt, &rp, &rd, &targets) else {
            break;
        };
        let frac = settings.step_fraction.min(0.9 + 0.09 * step_p.min(step_d));
        let ap = (0..2).fold(1f64, |a, k| a.min(frac * nt[k].max_step(&dir.ds_scaled[k])));
        let ad = (0..2).fold(1f64, |a, k| a.min(frac * nt[k].max_step(&dir.dz_scaled[k])));
        if ap.max(ad) < 1e-12 {
            break;
        }
        step_p = ap;
        step_d = ad;
        for (v, dv) in it.y.iter_mut().zip(dir.dy.iter()) {
            *v += ap * dv;
        }
        for k in 0..2 {
            it.s[k] += &dir.ds[k] * C64::new(ap, 0.0);
            it.z[k] += &dir.dz[k] * C64::new(ad, 0.0);
        }
        tiny_steps = if ap.max(ad) < 1e-3 { tiny_steps + 1 } else { 0 };
        if tiny_steps >= 5 && best.as_ref().is_some_and(|b| b.1 .2 <= settings.accept_gap) {
            break;
        }
    }

    if status != SolveStatus::Optimal {
        if let Some((_, vals, y, s, z)) = best {
            if vals.2 <= settings.accept_gap {
                last = vals;
                (it.y, it.s, it.z) = (y, s, z);
            }
        }
    }
    let (primal_value, dual_value, gap, residual) = last;
    if status != SolveStatus::Optimal && gap <= settings.accept_gap && residual <= settings.feas_tol
    {
        // stalled close to the optimum: numerically converged
        status = SolveStatus::Optimal;
    }
    log::debug!(
        "sdp d={d} side={:?} status={status:?} iterations={iterations} gap={gap:e} residual={residual:e}",
        lmi.side
    );
    let (x, y) = match lmi.side {
        Side::Primal => (lmi.combine(&it.y), it.z[1].clone()),
        Side::Dual => (it.z[1].clone(), lmi.combine(&it.y)),
    };
    let slack = p.bound.matrix() - p.apply(&x);
    let dual_slack = p.apply(&y) - p.objective.matrix();
    Ok(SdpSolution {
        primal_value,
        dual_value,
        x: HermitianMatrix::hermitian_part(&x),
        y: HermitianMatrix::hermitian_part(&y),
        slack: HermitianMatrix::hermitian_part(&slack),
        dual_slack: HermitianMatrix::hermitian_part(&dual_slack),
        gap,
        residual,
        iterations,
        status,
        trace,
    })
}

/// `maximize Tr X  s.t.  Delta(X) <= rho,  X >= 0`; the optimum is `1 - C_w(rho)`.
pub fn encode_coherence_weight(rho: &DensityMatrix) -> SdpProblem {
    encode_weight_primal(rho, ConstraintMap::Dephasing)
}

/// Witness form `maximize Tr[rho W]  s.t.  Delta(W) <= 0,  W <= I`, written in the
/// variable `X = I - W >= 0`; the optimum is `C_w(rho)` and `W* = I - X*`.
pub fn encode_coherence_weight_dual(rho: &DensityMatrix) -> SdpProblem {
    encode_weight_witness(rho, ConstraintMap::Dephasing)
}

/// `maximize Tr X  s.t.  G(X) <= rho,  X >= 0`; the optimum is `1 - A_w(rho)`.
pub fn encode_asymmetry_weight(rho: &DensityMatrix, rep: &UnitaryRep) -> Result<SdpProblem> {
    check_rep_dim(rho, rep)?;
    Ok(encode_weight_primal(
        rho,
        ConstraintMap::GroupAverage(rep.clone()),
    ))
}

/// Witness form of the asymmetry weight; the optimum is `A_w(rho)`.
pub fn encode_asymmetry_weight_dual(rho: &DensityMatrix, rep: &UnitaryRep) -> Result<SdpProblem> {
    check_rep_dim(rho, rep)?;
    Ok(encode_weight_witness(
        rho,
        ConstraintMap::GroupAverage(rep.clone()),
    ))
}

/// `maximize Tr[rho W] - 1  s.t.  P(W) <= I,  W >= 0`, whose dual is
/// `minimize Tr Y - 1  s.t.  P(Y) >= rho,  Y >= 0`. The optimum is the robustness and
/// `P(Y*)` is `(1 + s)` times the optimal free state.
pub fn encode_robustness(rho: &DensityMatrix, free: &FreeSet) -> Result<SdpProblem> {
    free.check_dim(rho.dim())?;
    Ok(SdpProblem::new(
        rho.as_hermitian().clone(),
        free.into(),
        HermitianMatrix::identity(rho.dim()),
    )?
    .with_offset(-1.0))
}

fn encode_weight_primal(rho: &DensityMatrix, map: ConstraintMap) -> SdpProblem {
    let d = rho.dim();
    SdpProblem::new(
        HermitianMatrix::identity(d),
        map,
        rho.as_hermitian().clone(),
    )
    .expect("dimensions agree")
}

fn encode_weight_witness(rho: &DensityMatrix, map: ConstraintMap) -> SdpProblem {
    let d = rho.dim();
    SdpProblem::new(-rho.as_hermitian(), map, -&HermitianMatrix::identity(d))
        .expect("dimensions agree")
        .negated()
        .with_offset(1.0)
}

fn check_rep_dim(rho: &DensityMatrix, rep: &UnitaryRep) -> Result<()> {
    if rho.dim() != rep.dim() {
        return Err(Error::DimensionMismatch {
            expected: rep.dim(),
            found: rho.dim(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{
        dephase, gisin, haar_mixed_with, haar_pure_with, maximally_coherent, rep_swap, rng_for,
        werner,
    };
    use approx::assert_abs_diff_eq;

    fn value(p: &SdpProblem) -> f64 {
        let sol = solve(p).unwrap();
        assert_eq!(
            sol.status,
            SolveStatus::Optimal,
            "gap {} res {}",
            sol.gap,
            sol.residual
        );
        assert!(sol.gap <= 1e-7);
        assert!(sol.residual <= 1e-8);
        assert!(sol.x.min_eigenvalue() >= -1e-8);
        sol.value()
    }

    #[test]
    fn basis_roundtrip() {
        let basis = HermitianBasis::new(3);
        for k in 0..9 {
            let e = basis.element(k);
            for j in 0..9 {
                let expected = if j == k { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(inner(&e, &basis.element(j)), expected, epsilon = 1e-15);
            }
        }
        let rho = haar_mixed_with(3, 3, &mut rng_for(1, 0));
        let back = basis.assemble(&basis.coords(rho.matrix()));
        assert!((back - rho.matrix()).norm() < 1e-15);
    }

    #[test]
    fn identity_map_trivial_value() {
        let p = SdpProblem::new(
            HermitianMatrix::identity(2),
            ConstraintMap::Identity,
            HermitianMatrix::identity(2),
        )
        .unwrap();
        assert_abs_diff_eq!(value(&p), 2.0, epsilon = 1e-7);
    }

    #[test]
    fn coherence_weight_primal_examples() {
        let diag = DensityMatrix::new(HermitianMatrix::from_diagonal(&[0.2, 0.3, 0.5])).unwrap();
        assert_abs_diff_eq!(value(&encode_coherence_weight(&diag)), 1.0, epsilon = 1e-7);
        let plus = maximally_coherent(3).unwrap();
        assert_abs_diff_eq!(value(&encode_coherence_weight(&plus)), 0.0, epsilon = 1e-6);
        let w = werner(2, 0.5).unwrap();
        assert_abs_diff_eq!(value(&encode_coherence_weight(&w)), 0.5, epsilon = 1e-6);
    }

    #[test]
    fn coherence_weight_dual_examples() {
        let diag = dephase(&haar_mixed_with(3, 3, &mut rng_for(3, 0)));
        assert_abs_diff_eq!(
            value(&encode_coherence_weight_dual(&diag)),
            0.0,
            epsilon = 1e-7
        );
        let plus = maximally_coherent(2).unwrap();
        let sol = solve(&encode_coherence_weight_dual(&plus)).unwrap();
        assert_abs_diff_eq!(sol.value(), 1.0, epsilon = 1e-6);
        let w = &HermitianMatrix::identity(2) - &sol.x;
        assert!(w.diagonal_part().max_eigenvalue() <= 1e-8);
        assert!(w.max_eigenvalue() <= 1.0 + 1e-8);
    }

    #[test]
    fn strong_duality_on_random_instances() {
        let mut rng = rng_for(11, 0);
        for _ in 0..100 {
            let rho = haar_mixed_with(3, 3, &mut rng);
            let sol = solve(&encode_coherence_weight(&rho)).unwrap();
            assert!(sol.is_optimal());
            assert!((sol.primal_value - sol.dual_value).abs() <= 1e-7);
        }
    }

    #[test]
    fn primal_and_witness_encodings_agree() {
        let mut rng = rng_for(12, 0);
        for d in 2..=4 {
            for _ in 0..10 {
                let rho = haar_mixed_with(d, d, &mut rng);
                let cw_primal = 1.0 - value(&encode_coherence_weight(&rho));
                let cw_dual = value(&encode_coherence_weight_dual(&rho));
                assert!((cw_primal - cw_dual).abs() <= 1e-6);
                assert!((-1e-8..=1.0 + 1e-8).contains(&cw_dual));
            }
        }
    }

    #[test]
    fn pure_coherent_states_have_zero_free_part() {
        let mut rng = rng_for(13, 0);
        for d in 2..=4 {
            for _ in 0..5 {
                let psi = haar_pure_with(d, &mut rng);
                assert_abs_diff_eq!(value(&encode_coherence_weight(&psi)), 0.0, epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn asymmetry_weight_examples() {
        let rep = rep_swap(2).unwrap();
        let w = werner(2, 0.3).unwrap();
        assert_abs_diff_eq!(
            value(&encode_asymmetry_weight(&w, &rep).unwrap()),
            1.0,
            epsilon = 1e-6
        );
        let ket01 = DensityMatrix::basis(4, 1).unwrap();
        assert_abs_diff_eq!(
            value(&encode_asymmetry_weight(&ket01, &rep).unwrap()),
            0.0,
            epsilon = 1e-6
        );
        assert_abs_diff_eq!(
            value(&encode_asymmetry_weight_dual(&ket01, &rep).unwrap()),
            1.0,
            epsilon = 1e-6
        );
        assert!(encode_asymmetry_weight(&maximally_coherent(3).unwrap(), &rep).is_err());
    }

    #[test]
    fn robustness_examples() {
        let diag = DensityMatrix::new(HermitianMatrix::from_diagonal(&[0.7, 0.3])).unwrap();
        assert_abs_diff_eq!(
            value(&encode_robustness(&diag, &FreeSet::Incoherent).unwrap()),
            0.0,
            epsilon = 1e-7
        );
        for d in [2, 3] {
            for alpha in [0.25, 0.5, 1.0] {
                let w = werner(d, alpha).unwrap();
                let v = value(&encode_robustness(&w, &FreeSet::Incoherent).unwrap());
                assert_abs_diff_eq!(v, alpha, epsilon = 1e-6);
            }
        }
        for (lambda, theta) in [(0.8, 0.3), (0.5, 1.0)] {
            let g = gisin(lambda, theta).unwrap();
            let v = value(&encode_robustness(&g, &FreeSet::Incoherent).unwrap());
            assert_abs_diff_eq!(v, lambda * (2.0 * theta).sin().abs(), epsilon = 1e-6);
        }
    }

    #[test]
    fn robustness_scale_sanity() {
        let mut rng = rng_for(14, 0);
        for d in 2..=4 {
            for _ in 0..10 {
                let rho = haar_mixed_with(d, 2, &mut rng);
                let v = value(&encode_robustness(&rho, &FreeSet::Incoherent).unwrap());
                assert!(v <= (d - 1) as f64 + 1e-6);
            }
        }
        let v = value(
            &encode_robustness(&maximally_coherent(4).unwrap(), &FreeSet::Incoherent).unwrap(),
        );
        assert_abs_diff_eq!(v, 3.0, epsilon = 1e-6);
    }

    #[test]
    fn infeasible_problem_is_flagged() {
        // X >= 0 and X <= -I cannot both hold
        let p = SdpProblem::new(
            HermitianMatrix::identity(2),
            ConstraintMap::Identity,
            -&HermitianMatrix::identity(2),
        )
        .unwrap();
        let sol = solve(&p).unwrap();
        assert_eq!(sol.status, SolveStatus::Infeasible);
        assert!(sol.require_optimal().is_err());
    }

    #[test]
    fn iteration_cap_reports_max_iter() {
        let rho = haar_mixed_with(3, 3, &mut rng_for(5, 0));
        let settings = SolverSettings {
            max_iterations: 2,
            record_trace: true,
            ..SolverSettings::default()
        };
        let sol = solve_with(&encode_coherence_weight(&rho), &settings).unwrap();
        assert_eq!(sol.status, SolveStatus::MaxIter);
        assert_eq!(sol.trace.len(), 3);
        assert_eq!(sol.trace_json_lines().lines().count(), 3);
    }

    #[test]
    fn twirl_passes_self_adjoint_check() {
        let rho = haar_mixed_with(9, 2, &mut rng_for(6, 0));
        encode_asymmetry_weight(&rho, &rep_swap(3).unwrap())
            .unwrap()
            .check_self_adjoint()
            .unwrap();
    }
}
