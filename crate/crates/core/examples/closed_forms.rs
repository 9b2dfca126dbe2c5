//! Werner and Gisin families against their closed forms.
//!
//!     cargo run --example closed_forms

use resource_weight::harness::run_closed_forms;

fn main() -> resource_weight::Result<()> {
    let rows = run_closed_forms()?;
    for r in &rows {
        println!(
            "{:<48} expected {:.6}  got {:.9}  err {:.1e}",
            r.label, r.expected, r.got, r.error
        );
    }
    let failed = rows.iter().filter(|r| !r.pass).count();
    println!("{} checks, {failed} failed", rows.len());
    Ok(())
}
