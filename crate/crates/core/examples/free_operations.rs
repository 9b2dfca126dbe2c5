//! Monotonicity on average under a random incoherent selective operation: the
//! averaged weight of the branches never exceeds the weight of the input.
//!
//!     cargo run --example free_operations -- [seed]

use resource_weight::measures::{coherence_weight, robustness_coherence};
use resource_weight::states::{haar_random_mixed, random_incoherent_kraus};

fn main() -> resource_weight::Result<()> {
    let seed = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(7);
    let rho = haar_random_mixed(3, 3, seed)?;
    let channel = random_incoherent_kraus(3, 3, seed)?;
    assert!(channel.is_incoherent());

    let (mut cw, mut cr) = (0.0, 0.0);
    for (i, b) in channel.branches(&rho)?.into_iter().enumerate() {
        let Some(state) = b.state else { continue };
        let (w, r) = (
            coherence_weight(&state)?.value,
            robustness_coherence(&state)?.value,
        );
        println!(
            "branch {i}: p = {:.4}, C_w = {w:.6}, C_R = {r:.6}",
            b.probability
        );
        cw += b.probability * w;
        cr += b.probability * r;
    }
    println!(
        "input:   C_w = {:.6}, C_R = {:.6}",
        coherence_weight(&rho)?.value,
        robustness_coherence(&rho)?.value
    );
    println!("average: C_w = {cw:.6}, C_R = {cr:.6}");
    let out = channel.apply(&rho)?;
    println!("output:  C_w = {:.6}", coherence_weight(&out)?.value);
    Ok(())
}
