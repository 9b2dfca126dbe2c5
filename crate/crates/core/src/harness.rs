//! Experiment drivers: figure-data sweeps, violation search, closed-form regressions and
//! the sampled property suite.
//!
//! Sample `i` of every experiment draws from ChaCha8 stream `i` (offset per sub-suite),
//! so results do not depend on how the work is split across threads.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::linalg::{kron_states, partial_trace, DensityMatrix, Subsystem};
use crate::measures::{
    self, coherence_weight, hs_lower_bound, l1_coherence, prop6_applicable, rel_entropy_asymmetry,
    rel_entropy_coherence, robustness_coherence, weight, WeightOptions,
};
use crate::sdp;
use crate::states::{
    generalized_x, gisin, haar_mixed_with, haar_pure_with, random_covariant_kraus,
    random_incoherent_kraus, rep_swap, rng_for, werner, FreeSet, XStateSpec,
};

/// Default tolerance of every sampled inequality.
pub const DEFAULT_TOL: f64 = 1e-6;
/// A delta below this counts as a violation of a marginal inequality.
pub const VIOLATION_THRESHOLD: f64 = -1e-5;

pub const SCATTER_HEADER: &str = "index,cw,cl1,cr,crel,hs_bound";
pub const VIOLATION_HEADER: &str = "index,cw,cw1,cw2,delta_w,cr,cr1,cr2,delta_r";
pub const CHECK_HEADER: &str = "label,expected,got,error,pass";
pub const PROPERTY_HEADER: &str = "label,samples,failures,worst_margin,pass";
const CSV_VERSION: &str = "# rw-csv v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExperimentName {
    Scatter,
    Violation,
    ClosedForms,
    Properties,
}

impl FromStr for ExperimentName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "scatter" => Ok(Self::Scatter),
            "violation" => Ok(Self::Violation),
            "closed-forms" => Ok(Self::ClosedForms),
            "properties" => Ok(Self::Properties),
            other => Err(Error::Parse(format!("unknown experiment '{other}'"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub name: ExperimentName,
    pub dim: usize,
    /// Environment dimension of the violation search (1 gives pure states).
    pub env_dim: usize,
    /// `None` uses the experiment's default size.
    pub samples: Option<usize>,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub tolerance: f64,
}

impl ExperimentConfig {
    pub fn new(name: ExperimentName) -> Self {
        Self {
            name,
            dim: 3,
            env_dim: 4,
            samples: None,
            seed: 42,
            out: None,
            tolerance: DEFAULT_TOL,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == Some(0) {
            return Err(domain("sample count must be at least 1"));
        }
        if self.name == ExperimentName::Scatter && !(2..=8).contains(&self.dim) {
            return Err(domain(format!(
                "scatter needs 2 <= d <= 8, got {}",
                self.dim
            )));
        }
        if self.env_dim == 0 {
            return Err(domain("environment dimension must be at least 1"));
        }
        if self.tolerance.is_nan() || self.tolerance < 0.0 {
            return Err(domain("tolerance must be non-negative"));
        }
        Ok(())
    }
}

/// `%.12g`-style formatting: 12 significant digits, locale independent.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let fixed = format!("{x:.decimals$}");
        if fixed.contains('.') {
            fixed
                .trim_end_matches('0')
                .trim_end_matches('.')
                .to_string()
        } else {
            fixed
        }
    } else {
        let m = if mantissa.contains('.') {
            mantissa.trim_end_matches('0').trim_end_matches('.')
        } else {
            mantissa
        };
        format!("{m}e{exp}")
    }
}

fn state_json(rho: &DensityMatrix) -> String {
    serde_json::to_string(rho).expect("state serializes")
}

#[derive(Clone, Debug, Serialize)]
pub struct ScatterRow {
    pub index: usize,
    pub cw: f64,
    pub cl1: f64,
    pub cr: f64,
    pub crel: f64,
    pub hs_bound: f64,
}

/// A sample that broke one of the inequalities.
#[derive(Clone, Debug, Serialize)]
pub struct BoundViolation {
    pub index: usize,
    pub label: &'static str,
    pub margin: f64,
    pub state: String,
}

#[derive(Clone, Debug)]
pub struct ScatterOutput {
    pub dim: usize,
    pub rows: Vec<ScatterRow>,
    pub violations: Vec<BoundViolation>,
}

/// Margins of the bound chain (`lhs - rhs` for `lhs >= rhs`) on one scatter row.
pub fn bound_chain_margins(row: &ScatterRow, d: usize) -> [(&'static str, f64); 5] {
    let dm1 = (d - 1) as f64;
    [
        ("cw>=cr/(d-1)", row.cw - row.cr / dm1),
        ("cw>=cl1/(d-1)", row.cw - row.cl1 / dm1),
        ("cw>=crel/ln(d)", row.cw - row.crel / (d as f64).ln()),
        ("cw>=hs_bound", row.cw - row.hs_bound),
        ("cr<=cl1", row.cl1 - row.cr),
    ]
}

/// Scatter data for Haar-random mixed states of dimension `d` (environment dimension
/// `d`), checking every row against the bound chain at [`DEFAULT_TOL`].
pub fn run_scatter(d: usize, n: usize, seed: u64) -> Result<ScatterOutput> {
    run_scatter_with(d, n, seed, DEFAULT_TOL)
}

pub fn run_scatter_with(d: usize, n: usize, seed: u64, tol: f64) -> Result<ScatterOutput> {
    if !(2..=8).contains(&d) || n == 0 {
        return Err(domain(format!(
            "scatter needs 2 <= d <= 8 and n >= 1, got d={d}, n={n}"
        )));
    }
    let samples: Vec<(ScatterRow, DensityMatrix)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let rho = haar_mixed_with(d, d, &mut rng_for(seed, i as u64));
            let row = ScatterRow {
                index: i,
                cw: coherence_weight(&rho)?.value,
                cl1: l1_coherence(&rho),
                cr: robustness_coherence(&rho)?.value,
                crel: rel_entropy_coherence(&rho),
                hs_bound: hs_lower_bound(&rho, &FreeSet::Incoherent)?.0,
            };
            Ok((row, rho))
        })
        .collect::<Result<_>>()?;
    let mut violations = Vec::new();
    for (row, rho) in &samples {
        for (label, margin) in bound_chain_margins(row, d) {
            if margin < -tol {
                log::warn!(
                    "scatter sample {} violates {label} by {margin:e}",
                    row.index
                );
                violations.push(BoundViolation {
                    index: row.index,
                    label,
                    margin,
                    state: state_json(rho),
                });
            }
        }
    }
    Ok(ScatterOutput {
        dim: d,
        rows: samples.into_iter().map(|(r, _)| r).collect(),
        violations,
    })
}

pub fn write_scatter_csv(rows: &[ScatterRow], mut w: impl Write) -> Result<()> {
    writeln!(w, "{CSV_VERSION} scatter")?;
    writeln!(w, "{SCATTER_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            r.index,
            fmt_sig(r.cw),
            fmt_sig(r.cl1),
            fmt_sig(r.cr),
            fmt_sig(r.crel),
            fmt_sig(r.hs_bound)
        )?;
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct ViolationRow {
    pub index: usize,
    pub cw: f64,
    pub cw1: f64,
    pub cw2: f64,
    /// `C_w(rho) + C_w(rho_1) C_w(rho_2) - (C_w(rho_1) + C_w(rho_2))`.
    pub delta_w: f64,
    pub cr: f64,
    pub cr1: f64,
    pub cr2: f64,
    /// `C_R(rho) - (C_R(rho_1) + C_R(rho_2))`.
    pub delta_r: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ViolationSummary {
    pub samples: usize,
    pub env_dim: usize,
    pub negative_w: usize,
    pub negative_r: usize,
    pub min_delta_w: f64,
    pub min_delta_r: f64,
}

#[derive(Clone, Debug)]
pub struct ViolationOutput {
    pub rows: Vec<ViolationRow>,
    pub summary: ViolationSummary,
}

/// Marginal-inequality deltas on two-qubit states obtained by tracing out a
/// `d_env = 4` environment from Haar pure states.
pub fn run_violation_search(n: usize, seed: u64) -> Result<ViolationOutput> {
    run_violation_search_with(n, seed, 4)
}

pub fn run_violation_search_with(n: usize, seed: u64, env_dim: usize) -> Result<ViolationOutput> {
    if n == 0 || env_dim == 0 {
        return Err(domain("violation search needs n >= 1 and d_env >= 1"));
    }
    let rows: Vec<ViolationRow> = (0..n)
        .into_par_iter()
        .map(|i| {
            let rho = haar_mixed_with(4, env_dim, &mut rng_for(seed, i as u64));
            let rho1 = partial_trace(&rho, (2, 2), Subsystem::First)?;
            let rho2 = partial_trace(&rho, (2, 2), Subsystem::Second)?;
            let (cw, cw1, cw2) = (
                coherence_weight(&rho)?.value,
                coherence_weight(&rho1)?.value,
                coherence_weight(&rho2)?.value,
            );
            let (cr, cr1, cr2) = (
                robustness_coherence(&rho)?.value,
                robustness_coherence(&rho1)?.value,
                robustness_coherence(&rho2)?.value,
            );
            Ok(ViolationRow {
                index: i,
                cw,
                cw1,
                cw2,
                delta_w: cw + cw1 * cw2 - (cw1 + cw2),
                cr,
                cr1,
                cr2,
                delta_r: cr - (cr1 + cr2),
            })
        })
        .collect::<Result<_>>()?;
    let summary = ViolationSummary {
        samples: n,
        env_dim,
        negative_w: rows
            .iter()
            .filter(|r| r.delta_w < VIOLATION_THRESHOLD)
            .count(),
        negative_r: rows
            .iter()
            .filter(|r| r.delta_r < VIOLATION_THRESHOLD)
            .count(),
        min_delta_w: rows.iter().map(|r| r.delta_w).fold(f64::INFINITY, f64::min),
        min_delta_r: rows.iter().map(|r| r.delta_r).fold(f64::INFINITY, f64::min),
    };
    Ok(ViolationOutput { rows, summary })
}

pub fn write_violation_csv(rows: &[ViolationRow], mut w: impl Write) -> Result<()> {
    writeln!(w, "{CSV_VERSION} violation")?;
    writeln!(w, "{VIOLATION_HEADER}")?;
    for r in rows {
        let vals = [r.cw, r.cw1, r.cw2, r.delta_w, r.cr, r.cr1, r.cr2, r.delta_r];
        let cols: Vec<String> = vals.iter().map(|&v| fmt_sig(v)).collect();
        writeln!(w, "{},{}", r.index, cols.join(","))?;
    }
    Ok(())
}

/// Equal-width histogram `(lower edge, upper edge, count)` over the data range.
pub fn histogram(values: &[f64], bins: usize) -> Vec<(f64, f64, usize)> {
    if values.is_empty() || bins == 0 {
        return Vec::new();
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = if hi > lo {
        (hi - lo) / bins as f64
    } else {
        1.0
    };
    let mut counts = vec![0usize; bins];
    for &v in values {
        let k = (((v - lo) / width) as usize).min(bins - 1);
        counts[k] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(k, c)| (lo + k as f64 * width, lo + (k + 1) as f64 * width, c))
        .collect()
}

pub fn write_histogram_csv(
    label: &str,
    values: &[f64],
    bins: usize,
    mut w: impl Write,
) -> Result<()> {
    writeln!(w, "{CSV_VERSION} histogram {label}")?;
    writeln!(w, "lower,upper,count")?;
    for (a, b, c) in histogram(values, bins) {
        writeln!(w, "{},{},{c}", fmt_sig(a), fmt_sig(b))?;
    }
    Ok(())
}

/// One comparison of a computed value against a closed form.
#[derive(Clone, Debug, Serialize)]
pub struct CheckRow {
    pub label: String,
    pub expected: f64,
    pub got: f64,
    pub error: f64,
    pub pass: bool,
}

impl CheckRow {
    fn new(label: String, expected: f64, got: f64, tol: f64) -> Self {
        let error = (got - expected).abs();
        Self {
            label,
            expected,
            got,
            error,
            pass: error <= tol,
        }
    }
}

pub const WERNER_DIMS: [usize; 2] = [2, 3];
pub const WERNER_ALPHAS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];
pub const GISIN_LAMBDAS: [f64; 4] = [0.2, 0.5, 0.8, 1.0];
pub const GISIN_THETAS: [f64; 3] = [PI / 8.0, PI / 4.0, 3.0 * PI / 8.0];

/// Werner: `C_w = C_R = C_l1 = alpha`. Gisin: `C_w = lambda`,
/// `C_l1 = C_R = lambda |sin 2 theta|`.
pub fn run_closed_forms() -> Result<Vec<CheckRow>> {
    run_closed_forms_with(DEFAULT_TOL)
}

pub fn run_closed_forms_with(tol: f64) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    for d in WERNER_DIMS {
        for alpha in WERNER_ALPHAS {
            let rho = werner(d, alpha)?;
            let tag = format!("werner(d={d},alpha={alpha})");
            rows.push(CheckRow::new(
                format!("{tag} cw"),
                alpha,
                coherence_weight(&rho)?.value,
                tol,
            ));
            rows.push(CheckRow::new(
                format!("{tag} cr"),
                alpha,
                robustness_coherence(&rho)?.value,
                tol,
            ));
            rows.push(CheckRow::new(
                format!("{tag} cl1"),
                alpha,
                l1_coherence(&rho),
                tol,
            ));
        }
    }
    for lambda in GISIN_LAMBDAS {
        for theta in GISIN_THETAS {
            let rho = gisin(lambda, theta)?;
            let tag = format!("gisin(lambda={lambda},theta={theta:.6})");
            let coh = lambda * (2.0 * theta).sin().abs();
            rows.push(CheckRow::new(
                format!("{tag} cw"),
                lambda,
                coherence_weight(&rho)?.value,
                tol,
            ));
            rows.push(CheckRow::new(
                format!("{tag} cl1"),
                coh,
                l1_coherence(&rho),
                tol,
            ));
            rows.push(CheckRow::new(
                format!("{tag} cr"),
                coh,
                robustness_coherence(&rho)?.value,
                tol,
            ));
        }
    }
    Ok(rows)
}

pub fn write_checks_csv(rows: &[CheckRow], mut w: impl Write) -> Result<()> {
    writeln!(w, "{CSV_VERSION} closed-forms")?;
    writeln!(w, "{CHECK_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{}",
            r.label,
            fmt_sig(r.expected),
            fmt_sig(r.got),
            fmt_sig(r.error),
            r.pass
        )?;
    }
    Ok(())
}

/// Outcome of one sampled invariant.
#[derive(Clone, Debug, Serialize)]
pub struct PropertyResult {
    pub label: &'static str,
    pub samples: usize,
    pub failures: usize,
    /// Smallest `lhs - rhs` over all samples of `lhs >= rhs` (equalities use `-|lhs - rhs|`).
    pub worst_margin: f64,
    /// Serialized states of the first failing sample.
    pub first_failure: Option<String>,
}

impl PropertyResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Sample counts of the property suite.
#[derive(Clone, Debug)]
pub struct PropertySizes {
    pub convexity: usize,
    pub monotonicity_channels: usize,
    pub monotonicity_states: usize,
    pub covariant_channels: usize,
    pub covariant_states: usize,
    pub bound_chain: usize,
    pub tensor_pairs: usize,
    pub pure_marginals: usize,
    pub x_states: usize,
    pub phases: usize,
    pub asymmetry_bounds: usize,
    pub pure_weights: usize,
    pub encodings: usize,
}

impl Default for PropertySizes {
    fn default() -> Self {
        Self {
            convexity: 500,
            monotonicity_channels: 100,
            monotonicity_states: 100,
            covariant_channels: 20,
            covariant_states: 20,
            bound_chain: 10_000,
            tensor_pairs: 200,
            pure_marginals: 200,
            x_states: 200,
            phases: 100,
            asymmetry_bounds: 200,
            pure_weights: 100,
            encodings: 100,
        }
    }
}

impl PropertySizes {
    /// Every sub-suite capped at `n` samples.
    pub fn capped(n: usize) -> Self {
        let d = Self::default();
        let c = |x: usize| x.min(n).max(1);
        Self {
            convexity: c(d.convexity),
            monotonicity_channels: c(d.monotonicity_channels),
            monotonicity_states: c(d.monotonicity_states),
            covariant_channels: c(d.covariant_channels),
            covariant_states: c(d.covariant_states),
            bound_chain: c(d.bound_chain),
            tensor_pairs: c(d.tensor_pairs),
            pure_marginals: c(d.pure_marginals),
            x_states: c(d.x_states),
            phases: c(d.phases),
            asymmetry_bounds: c(d.asymmetry_bounds),
            pure_weights: c(d.pure_weights),
            encodings: c(d.encodings),
        }
    }
}

/// Runs `sample(i)` for `i < n` and folds the margins. A sample fails when its margin
/// is below `-tol`.
fn check_samples<F>(label: &'static str, n: usize, tol: f64, sample: F) -> Result<PropertyResult>
where
    F: Fn(usize) -> Result<(f64, Vec<DensityMatrix>)> + Sync,
{
    let results: Vec<(f64, Vec<DensityMatrix>)> = (0..n)
        .into_par_iter()
        .map(|i| sample(i).inspect_err(|e| log::error!("{label}: sample {i} failed: {e}")))
        .collect::<Result<_>>()?;
    let mut out = PropertyResult {
        label,
        samples: n,
        failures: 0,
        worst_margin: f64::INFINITY,
        first_failure: None,
    };
    for (i, (margin, states)) in results.iter().enumerate() {
        out.worst_margin = out.worst_margin.min(*margin);
        if *margin < -tol {
            out.failures += 1;
            if out.first_failure.is_none() {
                let mut s = format!("sample {i}:");
                for rho in states {
                    let _ = write!(s, " {}", state_json(rho));
                }
                out.first_failure = Some(s);
            }
        }
    }
    log::info!(
        "{label}: {} samples, {} failures, worst margin {:e}",
        n,
        out.failures,
        out.worst_margin
    );
    Ok(out)
}

/// Per-suite stream offset so sub-suites draw disjoint streams.
fn stream(suite: u64, i: usize) -> u64 {
    (suite << 32) | i as u64
}

fn no_shortcut() -> WeightOptions {
    WeightOptions {
        pure_shortcut: false,
        ..WeightOptions::default()
    }
}

/// Every sampled invariant of the quantifiers at the default sizes.
pub fn run_property_suite(seed: u64) -> Result<Vec<PropertyResult>> {
    run_property_suite_with(seed, &PropertySizes::default(), DEFAULT_TOL)
}

pub fn run_property_suite_with(
    seed: u64,
    sizes: &PropertySizes,
    tol: f64,
) -> Result<Vec<PropertyResult>> {
    let swap = rep_swap(2)?;
    let sym = FreeSet::Symmetric(swap.clone());
    let inc = FreeSet::Incoherent;
    let defaults = WeightOptions::default();
    let mut results = Vec::new();

    // convexity of both weights
    for (suite, label, free, d) in [
        (1u64, "convexity/cw", &inc, 3usize),
        (2, "convexity/aw-swap", &sym, 4),
    ] {
        results.push(check_samples(label, sizes.convexity, tol, |i| {
            let mut rng = rng_for(seed, stream(suite, i));
            let a = haar_mixed_with(d, d, &mut rng);
            let b = haar_mixed_with(d, d, &mut rng);
            let p: f64 = rng.random();
            let mix = DensityMatrix::mix(p, &a, &b)?;
            let lhs = p * weight(&a, free, &defaults)?.value
                + (1.0 - p) * weight(&b, free, &defaults)?.value;
            Ok((lhs - weight(&mix, free, &defaults)?.value, vec![a, b]))
        })?);
    }

    // monotonicity on average under incoherent selective operations
    let states: Vec<DensityMatrix> = (0..sizes.monotonicity_states)
        .map(|j| haar_mixed_with(3, 3, &mut rng_for(seed, stream(3, j))))
        .collect();
    let cws: Vec<f64> = states
        .par_iter()
        .map(|rho| Ok(coherence_weight(rho)?.value))
        .collect::<Result<_>>()?;
    let n_states = states.len();
    results.push(check_samples(
        "monotonicity/cw-incoherent",
        sizes.monotonicity_channels * n_states,
        tol,
        |idx| {
            let (c, j) = (idx / n_states, idx % n_states);
            let channel_seed = seed.wrapping_add(stream(4, c));
            let ch = random_incoherent_kraus(3, 2 + c % 3, channel_seed)?;
            let mut avg = 0.0;
            for branch in ch.branches(&states[j])? {
                if let Some(s) = branch.state {
                    avg += branch.probability * coherence_weight(&s)?.value;
                }
            }
            Ok((cws[j] - avg, vec![states[j].clone()]))
        },
    )?);

    // monotonicity on average under swap-covariant selective operations
    let cov_states: Vec<DensityMatrix> = (0..sizes.covariant_states)
        .map(|j| haar_mixed_with(4, 4, &mut rng_for(seed, stream(5, j))))
        .collect();
    let n_cov = cov_states.len();
    results.push(check_samples(
        "monotonicity/aw-covariant",
        sizes.covariant_channels * n_cov,
        tol,
        |idx| {
            let (c, j) = (idx / n_cov, idx % n_cov);
            let ch = random_covariant_kraus(&swap, 2 + c % 2, seed.wrapping_add(stream(6, c)))?;
            let rho = &cov_states[j];
            let mut avg = 0.0;
            for branch in ch.branches(rho)? {
                if let Some(s) = branch.state {
                    avg += branch.probability * weight(&s, &sym, &defaults)?.value;
                }
            }
            Ok((weight(rho, &sym, &defaults)?.value - avg, vec![rho.clone()]))
        },
    )?);

    // bound chain at d = 3 and d = 4
    for (suite, d) in [(7u64, 3usize), (8, 4)] {
        let label = if d == 3 {
            "bound-chain/d3"
        } else {
            "bound-chain/d4"
        };
        results.push(check_samples(label, sizes.bound_chain, tol, |i| {
            let rho = haar_mixed_with(d, d, &mut rng_for(seed, stream(suite, i)));
            let row = ScatterRow {
                index: i,
                cw: coherence_weight(&rho)?.value,
                cl1: l1_coherence(&rho),
                cr: robustness_coherence(&rho)?.value,
                crel: rel_entropy_coherence(&rho),
                hs_bound: hs_lower_bound(&rho, &inc)?.0,
            };
            let worst = bound_chain_margins(&row, d)
                .iter()
                .map(|(_, m)| *m)
                .fold(f64::INFINITY, f64::min);
            Ok((worst, vec![rho]))
        })?);
    }

    // certificates reconstruct the state
    results.push(check_samples(
        "certificates/decomposition",
        sizes.encodings,
        tol,
        |i| {
            let rho = haar_mixed_with(3, 3, &mut rng_for(seed, stream(9, i)));
            let mut worst: f64 = 0.0;
            for r in [coherence_weight(&rho)?, robustness_coherence(&rho)?] {
                worst = worst.max(r.decomposition_error(&rho).unwrap_or(f64::INFINITY));
                let w = r.witness.as_ref().expect("solver reports carry a witness");
                worst = worst.max((rho.as_hermitian().inner(w) - r.value).abs());
            }
            Ok((-worst, vec![rho]))
        },
    )?);

    // tensor-product inequalities
    results.push(check_samples(
        "tensor/cw-and-cr",
        sizes.tensor_pairs,
        tol,
        |i| {
            let mut rng = rng_for(seed, stream(10, i));
            let a = haar_mixed_with(2, 2, &mut rng);
            let b = haar_mixed_with(2, 2, &mut rng);
            let ab = kron_states(&a, &b);
            let (wa, wb, wab) = (
                coherence_weight(&a)?.value,
                coherence_weight(&b)?.value,
                coherence_weight(&ab)?.value,
            );
            let (ra, rb, rab) = (
                robustness_coherence(&a)?.value,
                robustness_coherence(&b)?.value,
                robustness_coherence(&ab)?.value,
            );
            let m_w = wa + wb - wa * wb - wab;
            let m_r = ra + rb + ra * rb - rab;
            Ok((m_w.min(m_r), vec![a, b]))
        },
    )?);

    // pure bipartite states against their marginals
    results.push(check_samples(
        "marginals/pure",
        sizes.pure_marginals,
        tol,
        |i| {
            let psi = haar_pure_with(4, &mut rng_for(seed, stream(11, i)));
            let a = partial_trace(&psi, (2, 2), Subsystem::First)?;
            let b = partial_trace(&psi, (2, 2), Subsystem::Second)?;
            let m_r = robustness_coherence(&psi)?.value
                - robustness_coherence(&a)?.value
                - robustness_coherence(&b)?.value;
            let (wa, wb) = (coherence_weight(&a)?.value, coherence_weight(&b)?.value);
            let m_w = coherence_weight(&psi)?.value - (wa + wb - wa * wb);
            Ok((m_r.min(m_w), vec![psi]))
        },
    )?);

    // X states: robustness equals l1
    for (suite, d) in [(12u64, 2usize), (13, 4)] {
        let label = if d == 2 {
            "x-states/cr=cl1/d2"
        } else {
            "x-states/cr=cl1/d4"
        };
        results.push(check_samples(label, sizes.x_states, tol, |i| {
            let spec = XStateSpec::random(d, &mut rng_for(seed, stream(suite, i)));
            let x = generalized_x(&spec)?;
            Ok((
                -(robustness_coherence(&x)?.value - l1_coherence(&x)).abs(),
                vec![x],
            ))
        })?);
    }

    // weight dominates l1 whenever suitable incoherent phases exist
    results.push(check_samples("phases/cw>=cl1", sizes.phases, tol, |i| {
        let mut rng = rng_for(seed, stream(14, i));
        let d = 3 + i % 3;
        let x = generalized_x(&XStateSpec::random(d, &mut rng))?;
        if prop6_applicable(&x).is_none() {
            return Ok((f64::NEG_INFINITY, vec![x]));
        }
        Ok((coherence_weight(&x)?.value - l1_coherence(&x), vec![x]))
    })?);

    // asymmetry measures bounded by the asymmetry weight
    results.push(check_samples(
        "asymmetry/ar-arel-vs-aw",
        sizes.asymmetry_bounds,
        tol,
        |i| {
            let rho = haar_mixed_with(4, 4, &mut rng_for(seed, stream(15, i)));
            let aw = weight(&rho, &sym, &defaults)?.value;
            let ar = measures::robustness(&rho, &sym, &sdp::SolverSettings::default())?.value;
            let arel = rel_entropy_asymmetry(&rho, &swap)?;
            Ok((
                (3.0 * aw - ar).min(4f64.ln() * aw - arel).min(arel + 1e-9),
                vec![rho],
            ))
        },
    )?);

    // pure coherent states have unit weight on the solver path
    results.push(check_samples(
        "pure/cw=1",
        3 * sizes.pure_weights,
        tol,
        |i| {
            let d = 2 + i % 3;
            let psi = haar_pure_with(d, &mut rng_for(seed, stream(16, i)));
            Ok((
                -(weight(&psi, &inc, &no_shortcut())?.value - 1.0).abs(),
                vec![psi],
            ))
        },
    )?);

    // primal and witness encodings agree
    results.push(check_samples(
        "encodings/primal=dual",
        sizes.encodings,
        tol,
        |i| {
            let rho = haar_mixed_with(3, 3, &mut rng_for(seed, stream(17, i)));
            let primal = sdp::solve(&sdp::encode_coherence_weight(&rho))?.require_optimal()?;
            let dual = sdp::solve(&sdp::encode_coherence_weight_dual(&rho))?.require_optimal()?;
            Ok((-((1.0 - primal.value()) - dual.value()).abs(), vec![rho]))
        },
    )?);

    Ok(results)
}

pub fn write_properties_csv(rows: &[PropertyResult], mut w: impl Write) -> Result<()> {
    writeln!(w, "{CSV_VERSION} properties")?;
    writeln!(w, "{PROPERTY_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{}",
            r.label,
            r.samples,
            r.failures,
            fmt_sig(r.worst_margin),
            r.passed()
        )?;
    }
    Ok(())
}

/// Result of [`run_experiment`]: whether every assertion held, and a human summary.
#[derive(Clone, Debug)]
pub struct ExperimentOutcome {
    pub passed: bool,
    pub summary: String,
}

fn open_out(config: &ExperimentConfig, suffix: &str) -> Result<Box<dyn Write>> {
    Ok(match &config.out {
        Some(path) => {
            let mut p = path.clone().into_os_string();
            p.push(suffix);
            Box::new(std::io::BufWriter::new(std::fs::File::create(
                PathBuf::from(p),
            )?))
        }
        None if suffix.is_empty() => Box::new(std::io::stdout().lock()),
        None => Box::new(std::io::sink()),
    })
}

/// Runs the configured experiment, writing CSV to `config.out` (stdout when unset).
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome> {
    config.validate()?;
    let mut summary = String::new();
    let passed = match config.name {
        ExperimentName::Scatter => {
            let n = config.samples.unwrap_or(1000);
            let out = run_scatter_with(config.dim, n, config.seed, config.tolerance)?;
            write_scatter_csv(&out.rows, open_out(config, "")?)?;
            let _ = writeln!(
                summary,
                "scatter d={} n={n}: {} bound violations",
                config.dim,
                out.violations.len()
            );
            for v in &out.violations {
                let _ = writeln!(
                    summary,
                    "  sample {} {} margin {:e} state {}",
                    v.index, v.label, v.margin, v.state
                );
            }
            out.violations.is_empty()
        }
        ExperimentName::Violation => {
            let n = config.samples.unwrap_or(10_000);
            let out = run_violation_search_with(n, config.seed, config.env_dim)?;
            write_violation_csv(&out.rows, open_out(config, "")?)?;
            let dw: Vec<f64> = out.rows.iter().map(|r| r.delta_w).collect();
            let dr: Vec<f64> = out.rows.iter().map(|r| r.delta_r).collect();
            write_histogram_csv("delta_w", &dw, 50, open_out(config, ".delta_w.hist.csv")?)?;
            write_histogram_csv("delta_r", &dr, 50, open_out(config, ".delta_r.hist.csv")?)?;
            let s = &out.summary;
            let _ = writeln!(
                summary,
                "violation n={} d_env={}: negative delta_w {} (min {:e}), negative delta_r {} (min {:e})",
                s.samples, s.env_dim, s.negative_w, s.min_delta_w, s.negative_r, s.min_delta_r
            );
            if config.env_dim == 1 {
                s.min_delta_w >= -config.tolerance && s.min_delta_r >= -config.tolerance
            } else {
                true
            }
        }
        ExperimentName::ClosedForms => {
            let rows = run_closed_forms_with(config.tolerance)?;
            write_checks_csv(&rows, open_out(config, "")?)?;
            for r in rows.iter().filter(|r| !r.pass) {
                let _ = writeln!(
                    summary,
                    "FAIL {} expected {} got {}",
                    r.label, r.expected, r.got
                );
            }
            let failed = rows.iter().filter(|r| !r.pass).count();
            let _ = writeln!(
                summary,
                "closed forms: {} checks, {failed} failed",
                rows.len()
            );
            failed == 0
        }
        ExperimentName::Properties => {
            let sizes = config
                .samples
                .map_or_else(PropertySizes::default, PropertySizes::capped);
            let rows = run_property_suite_with(config.seed, &sizes, config.tolerance)?;
            write_properties_csv(&rows, open_out(config, "")?)?;
            for r in &rows {
                let status = if r.passed() { "PASS" } else { "FAIL" };
                let _ = writeln!(
                    summary,
                    "{status} {} ({} samples, worst margin {:e})",
                    r.label, r.samples, r.worst_margin
                );
                if let Some(f) = &r.first_failure {
                    let _ = writeln!(summary, "  first failure {f}");
                }
            }
            rows.iter().all(PropertyResult::passed)
        }
    };
    Ok(ExperimentOutcome { passed, summary })
}
