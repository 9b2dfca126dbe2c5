//! The sampled invariants: convexity, monotonicity under free operations, tensor
//! inequalities, X-state equalities and certificate checks.
//!
//!     cargo run --example property_suite -- [cap]
//!
//! `cap` limits every sub-suite to that many samples (default 50).

use resource_weight::harness::{run_property_suite_with, PropertySizes, DEFAULT_TOL};

fn main() -> resource_weight::Result<()> {
    let cap = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(50);
    let rows = run_property_suite_with(42, &PropertySizes::capped(cap), DEFAULT_TOL)?;
    for r in &rows {
        let status = if r.passed() { "ok  " } else { "FAIL" };
        println!(
            "{status} {:<28} {:>6} samples  worst margin {:+.2e}",
            r.label, r.samples, r.worst_margin
        );
    }
    Ok(())
}
