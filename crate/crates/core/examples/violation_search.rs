//! Searching two-qubit states for breaches of the marginal inequalities
//! `C_w(rho) >= C_w(rho_1) + C_w(rho_2) - C_w(rho_1) C_w(rho_2)` and
//! `C_R(rho) >= C_R(rho_1) + C_R(rho_2)`. Both hold on pure states and fail on some
//! mixed ones.
//!
//!     cargo run --example violation_search -- [n]

use resource_weight::harness::{histogram, run_violation_search, run_violation_search_with};

fn main() -> resource_weight::Result<()> {
    let n = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(2000);
    let mixed = run_violation_search(n, 42)?;
    let pure = run_violation_search_with(n.min(500), 42, 1)?;
    for (tag, s) in [("mixed", &mixed.summary), ("pure", &pure.summary)] {
        println!(
            "{tag:>5}: {} samples, weight breached {} times (min delta {:.3e}), robustness {} times (min {:.3e})",
            s.samples, s.negative_w, s.min_delta_w, s.negative_r, s.min_delta_r
        );
    }
    if let Some(worst) = mixed
        .rows
        .iter()
        .min_by(|a, b| a.delta_w.total_cmp(&b.delta_w))
    {
        println!(
            "worst weight sample #{}: C_w={:.4}, marginals {:.4}, {:.4}",
            worst.index, worst.cw, worst.cw1, worst.cw2
        );
    }
    println!("delta_w histogram (mixed):");
    let deltas: Vec<f64> = mixed.rows.iter().map(|r| r.delta_w).collect();
    for (lo, hi, count) in histogram(&deltas, 12) {
        println!(
            "  [{lo:>7.3}, {hi:>7.3}) {count:>6} {}",
            "#".repeat(count * 60 / n.max(1))
        );
    }
    Ok(())
}
