//! Piece probabilities and separation constants of two truths, and how the
//! initialization condition of a perturbed start compares to its bound.
//!
//! cargo run --release --example geometry

use maxaffine::experiments::{cone_pimin, perturbed_init};
use maxaffine::metrics::init_condition;
use maxaffine::model::geometry;
use maxaffine::{CovariateDist, ParamSet, RngStream};

fn main() -> maxaffine::Result<()> {
    let mut rng = RngStream::new(1, 0);
    let alpha = std::f64::consts::PI / 8.0;
    let truths = [
        ("standard basis k=4, d=6", ParamSet::standard_basis(4, 6)?),
        ("cone alpha=pi/8", ParamSet::cone(alpha)),
    ];
    for (label, ps) in &truths {
        let g = geometry(ps, CovariateDist::Gaussian, 200_000, &mut rng)?;
        println!("{label}");
        println!("  pi     = {:.4?}", g.pi.as_slice());
        println!("  pi_min = {:.4} (+- {:.4})", g.pi_min, g.mc_stderr);
        println!("  delta  = {:.4}, kappa = {:.4}, b_max = {:.4}", g.delta, g.kappa, g.b_max);
    }
    println!("cone pi_min in closed form: {:.4}", cone_pimin(alpha));

    let truth = &truths[0].1;
    for r in [0.05, 0.2, 0.5] {
        let start = perturbed_init(truth, r, &mut rng)?;
        println!(
            "r={r}: init condition {:.4} <= bound {:.4}",
            init_condition(&start, truth)?,
            2.0 * r / 2f64.sqrt()
        );
    }
    Ok(())
}
