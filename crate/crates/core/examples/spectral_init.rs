//! The two initialization stages on their own: the moment-based estimate of
//! the slope span, then the scale-free random search inside it.
//!
//! cargo run --release --example spectral_init

use maxaffine::experiments::orthonormal_truth;
use maxaffine::init::{init_basis, pca_subspace};
use maxaffine::{random_search, scaled_dist, subspace_error, synthesize, CovariateDist, RngStream};

fn main() -> maxaffine::Result<()> {
    let (k, d) = (3, 20);
    let mut rng = RngStream::new(11, 0);
    let (truth, u_star) = orthonormal_truth(k, d, &mut rng)?;

    println!("    n  subspace error");
    for n in [1000, 4000, 16000, 64000] {
        let data = synthesize(&truth, CovariateDist::Gaussian, n, 0.1, &mut rng)?;
        let est = pca_subspace(&data.x, &data.y, k)?;
        println!("{n:>5}  {:.4}", subspace_error(&est.u_hat, &u_star)?);
    }

    let data = synthesize(&truth, CovariateDist::Gaussian, 8000, 0.1, &mut rng)?;
    let (basis, hold) = init_basis(&data, k)?;
    for m in [10, 100, 1000] {
        let out = random_search(&basis, &hold.xi, &hold.y, k, m, &mut rng)?;
        let gap = scaled_dist(&out.params, &truth)?;
        println!(
            "M={m:>4}: picked candidate {:>3}, hold-out fit {:.4}, scale-free distance {:.4}",
            out.selected, out.fits[out.selected], gap.value
        );
    }
    Ok(())
}
