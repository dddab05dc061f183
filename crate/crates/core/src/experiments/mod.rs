//! Simulation harness: experiment registry, flat config files, and
//! deterministic CSV result tables.
//!
//! Every experiment is a function of its [`ExperimentConfig`] alone. Trials
//! draw from independent streams keyed by `(experiment, grid point, trial)`,
//! run in parallel, and are gathered in trial order, so the emitted CSV is
//! byte-identical across runs and thread counts.

mod complexity;
mod config;
mod cone;
mod studies;
mod table;
mod trials;

pub use complexity::{
    parse_cells, sample_complexity_search, search_cells, success_rate, threshold_search, CellResult,
    ZERO_OBJECTIVE,
};
pub use config::{parse_real, ExperimentConfig};
pub use cone::{cone_conditioning, cone_moments, cone_reference, ConeMoments, MIN_RETAINED};
pub use studies::{
    cone_alpha, cone_pimin, convergence_curves, orthonormal_truth, run_convergence, run_overall,
    run_pca_rate, run_phase_retrieval, run_pimin, run_rate, samples_for_ratio, ConvergenceCurve,
};
pub use table::{Cell, ResultTable};
pub use trials::{
    line_fit, mean, perturbed_init, rand_am_baseline, run_trials, stderr, trial_rng, LineFit,
    RestartPool,
};

use crate::am::am_run;
use crate::covariates::Dataset;
use crate::init::full_init;
use crate::model::ParamSet;
use crate::numerics::{stream_id, RngStream};
use crate::{Error, Result};

/// A registered experiment.
pub struct Experiment {
    pub name: &'static str,
    pub summary: &'static str,
    defaults: fn() -> ExperimentConfig,
    run: fn(&ExperimentConfig) -> Result<ResultTable>,
}

impl Experiment {
    pub fn defaults(&self) -> ExperimentConfig {
        (self.defaults)()
    }

    /// Runs the experiment and stamps the table with the config echo.
    pub fn run(&self, cfg: &ExperimentConfig) -> Result<ResultTable> {
        if cfg.name != self.name {
            return Err(Error::Config(format!(
                "config is for `{}`, experiment is `{}`",
                cfg.name, self.name
            )));
        }
        let mut table = (self.run)(cfg)?;
        let mut provenance = cfg.pairs();
        provenance.push(("version".into(), version()));
        table.set_provenance(provenance);
        Ok(table)
    }
}

/// Version string recorded in every table.
pub fn version() -> String {
    format!("maxaffine {}", env!("CARGO_PKG_VERSION"))
}

fn cfg(
    name: &str,
    k: usize,
    d: &[usize],
    n: &[usize],
    sigma: &[f64],
    iterations: usize,
    trials: usize,
    extras: &[(&str, &str)],
) -> ExperimentConfig {
    let mut c = ExperimentConfig::with_defaults(name, extras);
    c.k = k;
    c.d = d.to_vec();
    c.n = n.to_vec();
    c.sigma = sigma.to_vec();
    c.iterations = iterations;
    c.trials = trials;
    c
}

const REGISTRY: &[Experiment] = &[
    Experiment {
        name: "convergence",
        summary: "optimization and estimation error per AM iteration for several noise levels",
        defaults: || cfg("convergence", 5, &[100], &[500], &[0.0, 0.15, 0.25, 0.4, 0.5], 50, 20, &[("r", "0.3")]),
        run: run_convergence,
    },
    Experiment {
        name: "rate",
        summary: "final estimation error against 5d/n for several dimensions",
        defaults: || {
            cfg("rate", 5, &[10, 20, 30, 50], &[], &[0.25], 50, 20, &[
                ("r", "0.3"),
                ("ratios", "0.025,0.05,0.1,0.25"),
            ])
        },
        run: run_rate,
    },
    Experiment {
        name: "pimin",
        summary: "final estimation error on the planar cone truth as the rarest piece shrinks",
        defaults: || {
            cfg("pimin", 3, &[2], &[1000], &[0.4], 50, 50, &[
                ("r", "0.3"),
                ("inv_pimin_cubed", "36,64,100,150,200"),
            ])
        },
        run: run_pimin,
    },
    Experiment {
        name: "pca_rate",
        summary: "subspace error of the spectral estimate against 5d/n",
        defaults: || {
            cfg("pca_rate", 3, &[20, 30, 50], &[], &[0.1], 50, 30, &[(
                "ratios",
                "0.0031,0.005,0.01,0.02",
            )])
        },
        run: run_pca_rate,
    },
    Experiment {
        name: "overall",
        summary: "spectral init + random search + AM against AM with random restarts",
        defaults: || cfg("overall", 3, &[50], &[5250], &[0.1], 50, 10, &[("M", "30,50,70,90,110")]),
        run: run_overall,
    },
    Experiment {
        name: "sample_complexity",
        summary: "least n with noiseless recovery probability above a threshold",
        defaults: || {
            cfg("sample_complexity", 2, &[15, 30], &[], &[0.0], 50, 20, &[
                ("cells", "gaussian:2,rademacher:5"),
                ("success", "0.9"),
                ("tol", "0.01"),
                ("r", "0.3"),
                ("n_max", "20000"),
            ])
        },
        run: sample_complexity_search,
    },
    Experiment {
        name: "cone_conditioning",
        summary: "second moments of a Gaussian restricted to a narrow planar cone",
        defaults: || cfg("cone_conditioning", 3, &[2], &[], &[0.0], 1, 1, &[("alpha", "pi/16,pi/8"), ("draws", "200000")]),
        run: cone_conditioning,
    },
    Experiment {
        name: "phase_retrieval",
        summary: "sign-flipping AM for real phase retrieval from a nearby start",
        defaults: || {
            cfg("phase_retrieval", 2, &[50], &[500], &[0.0], 15, 50, &[
                ("dists", "gaussian,uniform_cube"),
                ("r", "0.2"),
                ("tol", "1e-8"),
            ])
        },
        run: run_phase_retrieval,
    },
];

/// Every registered experiment, in listing order.
pub fn registry() -> &'static [Experiment] {
    REGISTRY
}

pub fn find(name: &str) -> Result<&'static Experiment> {
    REGISTRY.iter().find(|e| e.name == name).ok_or_else(|| {
        let names: Vec<&str> = REGISTRY.iter().map(|e| e.name).collect();
        Error::Config(format!("unknown experiment `{name}` (known: {})", names.join(", ")))
    })
}

/// Fits `k` pieces to `data`: spectral init and random search over `m`
/// candidates, then `iterations` AM steps. The stream is derived from `seed`.
pub fn fit_dataset(data: &Dataset, k: usize, iterations: usize, m: usize, seed: u64) -> Result<ParamSet> {
    let mut rng = RngStream::new(seed, stream_id("fit", &[]));
    let init = full_init(data, k, m, &mut rng)?;
    Ok(am_run(&init, &data.xi, &data.y, iterations)?.last().clone())
}

/// One row per piece: `piece, theta1..thetad, b`.
pub fn params_table(name: &str, ps: &ParamSet) -> Result<ResultTable> {
    let mut columns = vec!["piece".to_string()];
    columns.extend((1..=ps.dim()).map(|i| format!("theta{i}")));
    columns.push("b".into());
    let refs: Vec<&str> = columns.iter().map(String::as_str).collect();
    let mut table = ResultTable::new(name, &refs);
    for (j, p) in ps.iter().enumerate() {
        let mut row = vec![j.into()];
        row.extend(p.theta.iter().map(|&v| v.into()));
        row.push(p.intercept.into());
        table.push_row(row)?;
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_names_unique_and_defaults_consistent() {
        let mut names: Vec<&str> = registry().iter().map(|e| e.name).collect();
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), registry().len());
        for e in registry() {
            assert_eq!(e.defaults().name, e.name);
        }
        assert!(find("nope").is_err());
    }

    #[test]
    fn cone_run_is_deterministic() {
        let e = find("cone_conditioning").unwrap();
        let mut c = e.defaults();
        c.apply_str("draws=20000\nseed=4").unwrap();
        let a = e.run(&c).unwrap().to_csv();
        assert_eq!(a, e.run(&c).unwrap().to_csv());
        assert!(a.starts_with("# name=cone_conditioning\n"));
        assert!(a.contains(&format!("# version={}\n", version())));
    }

    #[test]
    fn params_table_layout() {
        let ps = ParamSet::standard_basis(2, 2).unwrap();
        let csv = params_table("fit", &ps).unwrap().to_csv();
        assert_eq!(csv.lines().next().unwrap(), "piece,theta1,theta2,b");
        assert_eq!(csv.lines().count(), 3);
    }
}
