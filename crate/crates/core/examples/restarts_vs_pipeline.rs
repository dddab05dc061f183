//! Spectral init plus random search against AM from many random starts on
//! the same data, for a growing candidate budget.
//!
//! cargo run --release --example restarts_vs_pipeline

use maxaffine::experiments::{orthonormal_truth, RestartPool};
use maxaffine::init::init_candidates;
use maxaffine::{am_run, dist, synthesize, CovariateDist, RngStream};

fn main() -> maxaffine::Result<()> {
    let (k, d, n, iters) = (3, 20, 2100, 30);
    let mut rng = RngStream::new(5, 0);
    let (truth, _) = orthonormal_truth(k, d, &mut rng)?;
    let data = synthesize(&truth, CovariateDist::Gaussian, n, 0.1, &mut rng)?;

    let pool = init_candidates(&data, k, 40, &mut rng)?;
    let restarts = RestartPool::draw(&data, k, 40, iters, &mut rng)?;
    println!("  M  pipeline   restarts");
    for m in [1, 5, 10, 20, 40] {
        let start = &pool.candidates[pool.select(m)];
        let pipeline = dist(am_run(start, &data.xi, &data.y, iters)?.last(), &truth)?.value;
        let baseline = dist(restarts.select(m), &truth)?.value;
        println!("{m:>3}  {pipeline:.3e}  {baseline:.3e}");
    }
    Ok(())
}
