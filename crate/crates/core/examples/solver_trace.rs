//! Driving the SDP solver directly: a hand-built problem and the iterate log.
//!
//! The problem is `maximize Tr[B X] s.t. X <= I, X >= 0`, whose optimum is the sum of the
//! positive eigenvalues of `B`.
//!
//!     cargo run --example solver_trace

use resource_weight::sdp::{solve_with, ConstraintMap, SdpProblem, SolverSettings};
use resource_weight::HermitianMatrix;

fn main() -> resource_weight::Result<()> {
    let b =
        HermitianMatrix::from_real_rows(&[&[1.0, 2.0, 0.0], &[2.0, -1.0, 0.5], &[0.0, 0.5, 0.3]])?;
    let exact: f64 = b.eig().eigenvalues.iter().filter(|&&x| x > 0.0).sum();
    let problem = SdpProblem::new(b, ConstraintMap::Identity, HermitianMatrix::identity(3))?;

    let settings = SolverSettings {
        record_trace: true,
        ..SolverSettings::default()
    };
    let sol = solve_with(&problem, &settings)?;
    println!(
        "{:>4} {:>14} {:>14} {:>9} {:>9} {:>9} {:>6} {:>6}",
        "it", "primal", "dual", "gap", "mu", "res", "ap", "ad"
    );
    for r in &sol.trace {
        println!(
            "{:>4} {:>14.10} {:>14.10} {:>9.2e} {:>9.2e} {:>9.2e} {:>6.3} {:>6.3}",
            r.iteration,
            r.primal_value,
            r.dual_value,
            r.gap,
            r.mu,
            r.primal_residual.max(r.dual_residual),
            r.step_primal,
            r.step_dual
        );
    }
    println!(
        "{:?}: value {:.10}, exact {exact:.10}",
        sol.status,
        sol.value()
    );
    Ok(())
}
