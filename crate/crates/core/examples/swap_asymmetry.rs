//! Asymmetry under the two-qubit swap: weight, robustness and relative entropy for a
//! family interpolating between the singlet and |01>, checked against the
//! brute-force oracles.
//!
//!     cargo run --example swap_asymmetry

use num_complex::Complex64 as C64;
use resource_weight::measures::{
    asymmetry_weight, rel_entropy_asymmetry, robustness_asymmetry, swap_ar_oracle, swap_aw_oracle,
};
use resource_weight::states::rep_swap;
use resource_weight::DensityMatrix;

fn main() -> resource_weight::Result<()> {
    let swap = rep_swap(2)?;
    let h = 0.5f64.sqrt();
    let z = C64::new(0.0, 0.0);
    let singlet = DensityMatrix::pure(&[z, C64::new(h, 0.0), C64::new(-h, 0.0), z])?;
    let ket01 = DensityMatrix::basis(4, 1)?;

    println!(
        "{:>5} {:>10} {:>10} {:>10} {:>10} {:>10}",
        "p", "A_w", "oracle", "A_R", "oracle", "A_rel"
    );
    for p in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let rho = DensityMatrix::mix(p, &singlet, &ket01)?;
        let aw = asymmetry_weight(&rho, &swap)?;
        let ar = robustness_asymmetry(&rho, &swap)?;
        println!(
            "{p:>5} {:>10.6} {:>10.6} {:>10.6} {:>10.6} {:>10.6}",
            aw.value,
            swap_aw_oracle(&rho)?,
            ar.value,
            swap_ar_oracle(&rho)?,
            rel_entropy_asymmetry(&rho, &swap)?
        );
    }
    // The singlet is antisymmetric yet swap-invariant as a state, hence free.
    println!(
        "singlet is free: A_w = {:.2e}",
        asymmetry_weight(&singlet, &swap)?.value
    );
    Ok(())
}
