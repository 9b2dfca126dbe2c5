//! Random mixed states in the (C_l1, C_R, C_rel, HS bound) vs C_w plane, with the bound
//! chain checked on every sample. CSV goes to stdout.
//!
//!     cargo run --example scatter -- [d] [n] > scatter.csv

use resource_weight::harness::{run_scatter, write_scatter_csv};

fn main() -> resource_weight::Result<()> {
    let mut args = std::env::args()
        .skip(1)
        .map(|a| a.parse::<usize>().expect("integer argument"));
    let d = args.next().unwrap_or(3);
    let n = args.next().unwrap_or(500);
    let out = run_scatter(d, n, 42)?;
    write_scatter_csv(&out.rows, std::io::stdout().lock())?;
    eprintln!(
        "d={d}: {} samples, {} bound violations",
        out.rows.len(),
        out.violations.len()
    );
    Ok(())
}
