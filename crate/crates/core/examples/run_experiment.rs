//! Run a registered simulation study with config overrides and write its
//! CSV table, the library path behind `maxaffine run`.
//!
//! cargo run --release --example run_experiment -- pimin "trials=10" /tmp/out

use maxaffine::experiments;

fn main() -> maxaffine::Result<()> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "cone_conditioning".into());
    let overrides = args.next().unwrap_or_default().replace(';', "\n");
    let out = args.next().unwrap_or_else(|| std::env::temp_dir().join("maxaffine-runs").display().to_string());

    let exp = experiments::find(&name)?;
    let mut cfg = exp.defaults();
    cfg.apply_str(&overrides)?;
    let table = exp.run(&cfg)?;
    print!("{}", table.to_csv());
    println!("-> {}", table.write_to_dir(&out)?.display());
    Ok(())
}
