//! Round-trip a dataset through CSV and fit it, the library path behind
//! `maxaffine fit`.
//!
//! cargo run --release --example fit_csv -- [data.csv]

use maxaffine::experiments::{fit_dataset, params_table};
use maxaffine::{synthesize, CovariateDist, Dataset, ParamSet, RngStream};

fn main() -> maxaffine::Result<()> {
    let data = match std::env::args().nth(1) {
        Some(path) => Dataset::load_csv(path)?,
        None => {
            let dir = std::env::temp_dir().join("maxaffine-example");
            std::fs::create_dir_all(&dir)?;
            let path = dir.join("data.csv");
            let truth = ParamSet::cone(std::f64::consts::PI / 5.0);
            let mut rng = RngStream::new(2, 0);
            synthesize(&truth, CovariateDist::UniformCube, 2000, 0.05, &mut rng)?.save_csv(&path)?;
            println!("wrote {}", path.display());
            Dataset::load_csv(&path)?
        }
    };
    let fit = fit_dataset(&data, 3, 50, 200, 0)?;
    print!("{}", params_table("fit", &fit)?.to_csv());
    Ok(())
}
