//! Relabeling-invariant distances: matched distance, its scale-free variant,
//! and the AM update's tie rule on a tiny example.
//!
//! cargo run --example distances

use maxaffine::model::partition;
use maxaffine::{dist, scaled_dist, Matrix, ParamSet};

fn main() -> maxaffine::Result<()> {
    let truth = ParamSet::standard_basis(3, 3)?;
    let shuffled = truth.permuted(&[2, 0, 1]).scaled(4.0);

    let plain = dist(&shuffled, &truth)?;
    let free = scaled_dist(&shuffled, &truth)?;
    println!("dist        = {:.4}, matching {:?}", plain.value, plain.permutation);
    println!("scaled_dist = {:.4}, matching {:?}, scale {:.4}", free.value, free.permutation, free.scale);

    // the point (1, 1, 0) ties pieces 0 and 1; the lower label wins
    let xi = Matrix::from_row_slice(2, 4, &[1.0, 1.0, 0.0, 1.0, 0.0, 0.0, 2.0, 1.0]);
    println!("assignment  = {:?}", partition(&truth, &xi)?.assignment());
    Ok(())
}
