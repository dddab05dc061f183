//! Shared pieces of the simulation studies: seeding, parallel trials,
//! initializations and summary statistics.

use rayon::prelude::*;

use crate::am::am_run;
use crate::covariates::Dataset;
use crate::model::{AffineParam, ParamSet};
use crate::numerics::{sample_unit_ball, sample_unit_sphere, stream_id, Matrix, RngStream};
use crate::{Error, Result};

/// Random stream for trial `trial` at grid point `point` of experiment `name`.
pub fn trial_rng(seed: u64, name: &str, indices: &[u64]) -> RngStream {
    RngStream::new(seed, stream_id(name, indices))
}

/// Runs `trials` independent trials in parallel, returning results in trial order.
pub fn run_trials<T: Send>(trials: usize, f: impl Fn(usize) -> Result<T> + Sync) -> Result<Vec<T>> {
    (0..trials).into_par_iter().map(&f).collect()
}

/// `beta_j + r * g_j` with each `g_j` uniform on the unit sphere of `R^{d+1}`.
pub fn perturbed_init(truth: &ParamSet, r: f64, rng: &mut RngStream) -> Result<ParamSet> {
    if !(r >= 0.0 && r.is_finite()) {
        return Err(Error::invalid(format!("perturbation radius must be finite and >= 0, got {r}")));
    }
    if r == 0.0 {
        return Ok(truth.clone());
    }
    let dim = truth.dim() + 1;
    let params = truth
        .iter()
        .map(|p| AffineParam::from_beta(&(p.beta() + sample_unit_sphere(dim, rng) * r)))
        .collect();
    ParamSet::new(params)
}

/// Final objectives of `m` AM runs, each started from pieces drawn uniformly
/// on the unit ball of `R^{d+1}`, plus the runs' final iterates.
#[derive(Clone, Debug)]
pub struct RestartPool {
    pub finals: Vec<ParamSet>,
    pub objectives: Vec<f64>,
}

impl RestartPool {
    pub fn draw(data: &Dataset, k: usize, m: usize, iterations: usize, rng: &mut RngStream) -> Result<Self> {
        if k == 0 || m == 0 {
            return Err(Error::invalid("restart pool needs k >= 1 and M >= 1"));
        }
        let dim = data.d() + 1;
        let mut finals = Vec::with_capacity(m);
        let mut objectives = Vec::with_capacity(m);
        for _ in 0..m {
            let cols: Vec<_> = (0..k).map(|_| sample_unit_ball(dim, rng)).collect();
            let init = ParamSet::from_betas(&Matrix::from_columns(&cols))?;
            let trace = am_run(&init, &data.xi, &data.y, iterations)?;
            objectives.push(trace.final_objective());
            finals.push(trace.last().clone());
        }
        Ok(Self { finals, objectives })
    }

    /// The run with the smallest final objective among the first `m`
    /// (smallest index on ties).
    pub fn select(&self, m: usize) -> &ParamSet {
        let m = m.clamp(1, self.objectives.len());
        let mut best = 0;
        for l in 1..m {
            if self.objectives[l] < self.objectives[best] {
                best = l;
            }
        }
        &self.finals[best]
    }
}

/// AM with repeated random initialization: `M` restarts of `T` iterations on
/// the full data, keeping the run with the smallest final objective.
pub fn rand_am_baseline(
    data: &Dataset,
    k: usize,
    m: usize,
    iterations: usize,
    rng: &mut RngStream,
) -> Result<ParamSet> {
    Ok(RestartPool::draw(data, k, m, iterations, rng)?.select(m).clone())
}

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Standard error of the mean (zero for fewer than two values).
pub fn stderr(v: &[f64]) -> f64 {
    let n = v.len();
    if n < 2 {
        return 0.0;
    }
    let m = mean(v);
    let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1) as f64;
    (var / n as f64).sqrt()
}

/// Least-squares line `y = slope * x + intercept` and its R².
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

pub fn line_fit(x: &[f64], y: &[f64]) -> LineFit {
    let (mx, my) = (mean(x), mean(y));
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    if x.len() < 2 || sxx == 0.0 {
        return LineFit { slope: f64::NAN, intercept: f64::NAN, r2: f64::NAN };
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    LineFit { slope, intercept: my - slope * mx, r2 }
}
