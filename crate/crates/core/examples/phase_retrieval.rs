//! Real phase retrieval `y = |<x, theta>|` with the sign-flipping iteration,
//! started near the truth. Recovery is up to a global sign.
//!
//! cargo run --release --example phase_retrieval

use maxaffine::numerics::sample_unit_sphere;
use maxaffine::{pr_run, synthesize_pr, CovariateDist, RngStream};

fn main() -> maxaffine::Result<()> {
    let (d, n) = (50, 500);
    let mut rng = RngStream::new(3, 0);
    let theta = sample_unit_sphere(d, &mut rng);

    for law in [CovariateDist::Gaussian, CovariateDist::UniformCube] {
        let data = synthesize_pr(&theta, law, n, 0.0, &mut rng)?;
        let start = &theta + sample_unit_sphere(d, &mut rng) * 0.2;
        let trace = pr_run(&start, &data.x, &data.y, 15)?;
        println!("{law}:");
        for (t, it) in trace.iterates.iter().enumerate().step_by(3) {
            let err = (it - &theta).norm_squared().min((it + &theta).norm_squared());
            println!("  t={t:>2}  error={err:.3e}");
        }
    }
    Ok(())
}
