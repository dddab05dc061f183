//! Convergence, rate, πmin, subspace and pipeline studies.

use std::collections::BTreeMap;

use super::table::ResultTable;
use super::trials::{line_fit, mean, perturbed_init, run_trials, stderr, trial_rng, RestartPool};
use super::ExperimentConfig;
use crate::am::{am_run, pr_run};
use crate::covariates::{synthesize, synthesize_pr, CovariateDist};
use crate::init::{init_candidates, pca_subspace};
use crate::metrics::{dist, subspace_error};
use crate::model::ParamSet;
use crate::numerics::{sample_unit_sphere, Matrix, RngStream};
use crate::{Error, Result};

/// Truth with orthonormal random slopes `theta_j = U e_j` and zero
/// intercepts; returns the parameters and `U`.
pub fn orthonormal_truth(k: usize, d: usize, rng: &mut RngStream) -> Result<(ParamSet, Matrix)> {
    if k == 0 || k > d {
        return Err(Error::invalid(format!("orthonormal truth needs 1 <= k <= d, got k={k}, d={d}")));
    }
    let g = Matrix::from_fn(d, k, |_, _| rng.normal());
    let u = g.qr().q();
    let mut betas = Matrix::zeros(d + 1, k);
    betas.view_mut((0, 0), (d, k)).copy_from(&u);
    Ok((ParamSet::from_betas(&betas)?, u))
}

/// `round(5 d / ratio)`, the sample size at which `5d/n` equals `ratio`.
pub fn samples_for_ratio(d: usize, ratio: f64) -> Result<usize> {
    if !(ratio > 0.0 && ratio.is_finite()) {
        return Err(Error::Config(format!("ratio 5d/n must be positive, got {ratio}")));
    }
    Ok(((5 * d) as f64 / ratio).round().max(1.0) as usize)
}

/// Per-iteration errors of one trial.
#[derive(Clone, Debug)]
pub struct ConvergenceCurve {
    /// `sum_j ||beta_j^(t) - beta_j^(T)||^2` for `t = 0..=T`.
    pub opt_error: Vec<f64>,
    /// Relabeled `sum_j ||beta_j^(t) - beta*_j||^2` for `t = 0..=T`.
    pub est_error: Vec<f64>,
}

/// Curves for every noise level (outer) and trial (inner): standard-basis
/// truth, perturbed initialization of radius `r`, `T` AM steps.
pub fn convergence_curves(cfg: &ExperimentConfig) -> Result<Vec<Vec<ConvergenceCurve>>> {
    let (d, n, r) = (cfg.single_d()?, cfg.single_n()?, cfg.extra_f64("r")?);
    let truth = ParamSet::standard_basis(cfg.k, d)?;
    cfg.sigma
        .iter()
        .enumerate()
        .map(|(s, &sigma)| {
            run_trials(cfg.trials, |trial| {
                let mut rng = trial_rng(cfg.seed, &cfg.name, &[s as u64, trial as u64]);
                let data = synthesize(&truth, cfg.dist, n, sigma, &mut rng)?;
                let init = perturbed_init(&truth, r, &mut rng)?;
                let trace = am_run(&init, &data.xi, &data.y, cfg.iterations)?;
                let last = trace.last().betas();
                let opt_error = trace.iterates.iter().map(|p| (p.betas() - &last).norm_squared()).collect();
                let est_error = trace
                    .iterates
                    .iter()
                    .map(|p| dist(p, &truth).map(|m| m.value))
                    .collect::<Result<_>>()?;
                Ok(ConvergenceCurve { opt_error, est_error })
            })
        })
        .collect()
}

/// Mean optimization and estimation error per `(sigma, t)`. The normalized
/// error divides by `sigma^2` and is NaN for noiseless rows.
pub fn run_convergence(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let curves = convergence_curves(cfg)?;
    let mut table = ResultTable::new(
        &cfg.name,
        &["sigma", "t", "opt_error", "est_error", "normalized_error"],
    );
    for (&sigma, trials) in cfg.sigma.iter().zip(&curves) {
        for t in 0..=cfg.iterations {
            let opt = mean(&trials.iter().map(|c| c.opt_error[t]).collect::<Vec<_>>());
            let est = mean(&trials.iter().map(|c| c.est_error[t]).collect::<Vec<_>>());
            let normalized = if sigma > 0.0 { est / (sigma * sigma) } else { f64::NAN };
            table.push_row(vec![sigma.into(), t.into(), opt.into(), est.into(), normalized.into()])?;
        }
    }
    Ok(table)
}

/// Final estimation error over a grid of `d` and `5d/n`, with a per-`d`
/// least-squares line of error against `5d/n`.
pub fn run_rate(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let (sigma, r) = (cfg.single_sigma()?, cfg.extra_f64("r")?);
    let ratios = cfg.extra_reals("ratios")?;
    let mut table = ResultTable::new(
        &cfg.name,
        &["d", "ratio", "n", "mean_error", "stderr", "slope", "intercept"],
    );
    for (di, &d) in cfg.d.iter().enumerate() {
        let truth = ParamSet::standard_basis(cfg.k, d)?;
        let mut points = Vec::new();
        for (ri, &ratio) in ratios.iter().enumerate() {
            let n = samples_for_ratio(d, ratio)?;
            let point = (di * ratios.len() + ri) as u64;
            let errors = run_trials(cfg.trials, |trial| {
                let mut rng = trial_rng(cfg.seed, &cfg.name, &[point, trial as u64]);
                let data = synthesize(&truth, cfg.dist, n, sigma, &mut rng)?;
                let init = perturbed_init(&truth, r, &mut rng)?;
                let trace = am_run(&init, &data.xi, &data.y, cfg.iterations)?;
                Ok(dist(trace.last(), &truth)?.value)
            })?;
            points.push((ratio, n, mean(&errors), stderr(&errors)));
        }
        let fit = line_fit(
            &points.iter().map(|p| p.0).collect::<Vec<_>>(),
            &points.iter().map(|p| p.2).collect::<Vec<_>>(),
        );
        for (ratio, n, m, se) in points {
            table.push_row(vec![
                d.into(),
                ratio.into(),
                n.into(),
                m.into(),
                se.into(),
                fit.slope.into(),
                fit.intercept.into(),
            ])?;
        }
    }
    Ok(table)
}

/// Cone half-angle with `1 / pimin^3 = c` when `pimin = alpha / pi`.
pub fn cone_alpha(inv_pimin_cubed: f64) -> f64 {
    std::f64::consts::PI / inv_pimin_cubed.cbrt()
}

/// Smallest Gaussian mass among the three pieces of [`ParamSet::cone`].
pub fn cone_pimin(alpha: f64) -> f64 {
    let narrow = alpha / std::f64::consts::PI;
    narrow.min(0.5 * (1.0 - narrow))
}

/// Final estimation error on the planar cone truth as the rarest piece
/// shrinks, with a line fit of error against `1 / pimin^3`.
pub fn run_pimin(cfg: &ExperimentConfig) -> Result<ResultTable> {
    if cfg.k != 3 || cfg.single_d()? != 2 {
        return Err(Error::Config("the cone construction has k=3 and d=2".into()));
    }
    let (n, sigma, r) = (cfg.single_n()?, cfg.single_sigma()?, cfg.extra_f64("r")?);
    let grid = cfg.extra_reals("inv_pimin_cubed")?;
    let mut rows = Vec::new();
    for (gi, &c) in grid.iter().enumerate() {
        let alpha = cone_alpha(c);
        if !(alpha > 0.0 && alpha <= std::f64::consts::FRAC_PI_3) {
            return Err(Error::Config(format!(
                "1/pimin^3 = {c} gives alpha = {alpha}; need 0 < alpha <= pi/3 (1/pimin^3 >= 27)"
            )));
        }
        let truth = ParamSet::cone(alpha);
        let errors = run_trials(cfg.trials, |trial| {
            let mut rng = trial_rng(cfg.seed, &cfg.name, &[gi as u64, trial as u64]);
            let data = synthesize(&truth, cfg.dist, n, sigma, &mut rng)?;
            let init = perturbed_init(&truth, r, &mut rng)?;
            let trace = am_run(&init, &data.xi, &data.y, cfg.iterations)?;
            Ok(dist(trace.last(), &truth)?.value)
        })?;
        rows.push((c, alpha, cone_pimin(alpha), mean(&errors), stderr(&errors)));
    }
    let fit = line_fit(
        &rows.iter().map(|r| r.0).collect::<Vec<_>>(),
        &rows.iter().map(|r| r.3).collect::<Vec<_>>(),
    );
    let mut table = ResultTable::new(
        &cfg.name,
        &["inv_pimin_cubed", "alpha", "pimin", "mean_error", "stderr", "slope", "r2"],
    );
    for (c, alpha, pimin, m, se) in rows {
        table.push_row(vec![
            c.into(),
            alpha.into(),
            pimin.into(),
            m.into(),
            se.into(),
            fit.slope.into(),
            fit.r2.into(),
        ])?;
    }
    Ok(table)
}

/// Subspace error of the spectral estimate computed from all `n = 5d/ratio`
/// samples, for a random orthonormal truth with zero intercepts.
pub fn run_pca_rate(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let sigma = cfg.single_sigma()?;
    let ratios = cfg.extra_reals("ratios")?;
    let mut table = ResultTable::new(&cfg.name, &["d", "ratio", "n", "mean_error", "stderr"]);
    for (di, &d) in cfg.d.iter().enumerate() {
        for (ri, &ratio) in ratios.iter().enumerate() {
            let n = samples_for_ratio(d, ratio)?;
            let point = (di * ratios.len() + ri) as u64;
            let errors = run_trials(cfg.trials, |trial| {
                let mut rng = trial_rng(cfg.seed, &cfg.name, &[point, trial as u64]);
                let (truth, u) = orthonormal_truth(cfg.k, d, &mut rng)?;
                let data = synthesize(&truth, cfg.dist, n, sigma, &mut rng)?;
                let est = pca_subspace(&data.x, &data.y, cfg.k)?;
                subspace_error(&est.u_hat, &u)
            })?;
            table.push_row(vec![
                d.into(),
                ratio.into(),
                n.into(),
                mean(&errors).into(),
                stderr(&errors).into(),
            ])?;
        }
    }
    Ok(table)
}

/// Spectral initialization plus random search plus AM against AM with
/// repeated random restarts, as a function of the number `M` of candidates
/// (or restarts). Both methods draw one pool of `max(M)` and read off
/// every smaller `M` as a prefix.
pub fn run_overall(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let (d, n, sigma) = (cfg.single_d()?, cfg.single_n()?, cfg.single_sigma()?);
    let grid = cfg.extra_counts("M")?;
    let m_max = *grid.iter().max().expect("non-empty grid");
    let per_trial = run_trials(cfg.trials, |trial| {
        let mut rng = trial_rng(cfg.seed, &cfg.name, &[0, trial as u64]);
        let (truth, _) = orthonormal_truth(cfg.k, d, &mut rng)?;
        let data = synthesize(&truth, cfg.dist, n, sigma, &mut rng)?;

        let pool = init_candidates(&data, cfg.k, m_max, &mut rng)?;
        let mut finished: BTreeMap<usize, f64> = BTreeMap::new();
        let mut pipeline = Vec::with_capacity(grid.len());
        for &m in &grid {
            let l = pool.select(m);
            if !finished.contains_key(&l) {
                let trace = am_run(&pool.candidates[l], &data.xi, &data.y, cfg.iterations)?;
                finished.insert(l, dist(trace.last(), &truth)?.value);
            }
            pipeline.push(finished[&l]);
        }

        let restarts = RestartPool::draw(&data, cfg.k, m_max, cfg.iterations, &mut rng)?;
        let baseline = grid
            .iter()
            .map(|&m| dist(restarts.select(m), &truth).map(|r| r.value))
            .collect::<Result<Vec<_>>>()?;
        Ok((pipeline, baseline))
    })?;
    let mut table = ResultTable::new(
        &cfg.name,
        &["M", "pipeline_error", "pipeline_stderr", "baseline_error", "baseline_stderr"],
    );
    for (i, &m) in grid.iter().enumerate() {
        let p: Vec<f64> = per_trial.iter().map(|t| t.0[i]).collect();
        let b: Vec<f64> = per_trial.iter().map(|t| t.1[i]).collect();
        table.push_row(vec![
            m.into(),
            mean(&p).into(),
            stderr(&p).into(),
            mean(&b).into(),
            stderr(&b).into(),
        ])?;
    }
    Ok(table)
}

/// Sign-flipping AM for real phase retrieval from `theta* + r ||theta*|| g`:
/// per covariate law, the fraction of trials whose final iterate is within
/// `tol` of `theta*` or `-theta*` in squared distance.
pub fn run_phase_retrieval(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let (d, n, sigma) = (cfg.single_d()?, cfg.single_n()?, cfg.single_sigma()?);
    let (r, tol) = (cfg.extra_f64("r")?, cfg.extra_f64("tol")?);
    let dists = cfg
        .extra("dists")?
        .split(',')
        .map(|s| s.parse::<CovariateDist>())
        .collect::<Result<Vec<_>>>()?;
    let mut table = ResultTable::new(
        &cfg.name,
        &["dist", "d", "n", "success_rate", "mean_error", "max_error"],
    );
    for (di, &law) in dists.iter().enumerate() {
        let errors = run_trials(cfg.trials, |trial| {
            let mut rng = trial_rng(cfg.seed, &cfg.name, &[di as u64, trial as u64]);
            let theta = sample_unit_sphere(d, &mut rng);
            let data = synthesize_pr(&theta, law, n, sigma, &mut rng)?;
            let init = &theta + sample_unit_sphere(d, &mut rng) * (r * theta.norm());
            let trace = pr_run(&init, &data.x, &data.y, cfg.iterations)?;
            let last = trace.last();
            Ok((last - &theta).norm_squared().min((last + &theta).norm_squared()))
        })?;
        let successes = errors.iter().filter(|&&e| e < tol).count();
        table.push_row(vec![
            law.name().into(),
            d.into(),
            n.into(),
            (successes as f64 / errors.len() as f64).into(),
            mean(&errors).into(),
            errors.iter().copied().fold(0.0, f64::max).into(),
        ])?;
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthonormal_truth_shape() {
        let mut rng = RngStream::new(1, 1);
        let (ps, u) = orthonormal_truth(3, 6, &mut rng).unwrap();
        assert_eq!((ps.k(), ps.dim()), (3, 6));
        assert!((u.transpose() * &u - Matrix::identity(3, 3)).norm() < 1e-12);
        assert!(ps.iter().all(|p| p.intercept == 0.0));
        assert!(orthonormal_truth(4, 3, &mut rng).is_err());
    }

    #[test]
    fn cone_grid() {
        let a = cone_alpha(36.0);
        assert!((std::f64::consts::PI / a).powi(3) - 36.0 < 1e-9);
        assert!((cone_pimin(a) - a / std::f64::consts::PI).abs() < 1e-15);
        assert!((cone_pimin(std::f64::consts::FRAC_PI_2) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn ratio_sample_sizes() {
        assert_eq!(samples_for_ratio(10, 0.25).unwrap(), 200);
        assert_eq!(samples_for_ratio(20, 0.0031).unwrap(), 32258);
        assert!(samples_for_ratio(10, 0.0).is_err());
    }
}
