//! SDP values against independent brute-force oracles: a grid search for qubit
//! coherence weight, and an ellipsoid feasibility bisection for swap asymmetry.
//!
//!     cargo run --example oracles

use resource_weight::measures::{
    asymmetry_weight, coherence_weight, qubit_cw_oracle, swap_aw_oracle,
};
use resource_weight::states::{haar_mixed_with, rep_swap, rng_for};

fn main() -> resource_weight::Result<()> {
    let mut worst = 0.0f64;
    for i in 0..50 {
        let rho = haar_mixed_with(2, 2, &mut rng_for(1, i));
        worst = worst.max((coherence_weight(&rho)?.value - qubit_cw_oracle(&rho)?).abs());
    }
    println!("qubit C_w, 50 states: max |SDP - oracle| = {worst:.2e}");

    let swap = rep_swap(2)?;
    for i in 0..3 {
        let rho = haar_mixed_with(4, 2, &mut rng_for(2, i));
        let sdp = asymmetry_weight(&rho, &swap)?.value;
        let oracle = swap_aw_oracle(&rho)?;
        println!("swap A_w sample {i}: SDP {sdp:.7}, oracle {oracle:.7}");
    }
    Ok(())
}
