//! Coherence weight of a random qutrit with its full certificate:
//! the free/resource split, the witness, and a check that they fit together.
//!
//!     cargo run --example coherence_weight -- [seed]

use resource_weight::measures::{coherence_weight, witness_evaluate, witness_violation};
use resource_weight::states::haar_random_mixed;
use resource_weight::FreeSet;

fn main() -> resource_weight::Result<()> {
    let seed = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(3);
    let rho = haar_random_mixed(3, 3, seed)?;
    let report = coherence_weight(&rho)?;

    println!(
        "C_w = {:.9}  ({:?}, gap {:.1e}, {} iterations)",
        report.value, report.status, report.gap, report.iterations
    );
    if let Some(sigma) = &report.free_state {
        println!("incoherent part sigma*:\n{:.4}", sigma.matrix());
    }
    if let Some(tau) = &report.residual_state {
        println!("resource part tau*:\n{:.4}", tau.matrix());
    }
    println!(
        "|rho - (1-s) sigma* - s tau*| = {:.2e}",
        report.decomposition_error(&rho).unwrap_or(f64::NAN)
    );

    let w = report
        .witness
        .as_ref()
        .expect("SDP reports carry a witness");
    let (value, feasible) = witness_evaluate(&rho, w, &FreeSet::Incoherent)?;
    println!("Tr[rho W*] = {value:.9}, feasible witness: {feasible}");
    println!(
        "witness constraint violation {:.1e}",
        witness_violation(&report, &FreeSet::Incoherent)?.unwrap_or(0.0)
    );
    Ok(())
}
