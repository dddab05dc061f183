//! Second moments of a Gaussian restricted to the cone where the narrow
//! piece of the planar cone truth is active, against the exact values.
//!
//! cargo run --release --example cone_moments

use maxaffine::experiments::{cone_moments, cone_reference};

fn main() -> maxaffine::Result<()> {
    println!("alpha     kept   lambda1  E[W1^2]  lambda2   E[W2^2]   cross");
    for q in [32.0, 16.0, 8.0, 4.0] {
        let alpha = std::f64::consts::PI / q;
        let m = cone_moments(alpha, 400_000, 0, "cone", q as u64)?;
        let (w1, w2) = cone_reference(alpha);
        println!(
            "pi/{q:<4} {:>7}  {:.4}   {w1:.4}   {:.5}   {w2:.5}   {:+.1e}",
            m.retained, m.lambda1, m.lambda2, m.cross
        );
    }
    Ok(())
}
