//! Noiseless sample-complexity search.

use std::collections::BTreeMap;

use super::table::ResultTable;
use super::trials::{line_fit, perturbed_init, run_trials, trial_rng};
use super::ExperimentConfig;
use crate::am::am_run_until;
use crate::covariates::{synthesize, CovariateDist};
use crate::metrics::is_recovered;
use crate::model::ParamSet;
use crate::{Error, Result};

/// Relative objective below which a noiseless run counts as interpolating
/// and AM stops early.
pub const ZERO_OBJECTIVE: f64 = 1e-20;

/// Smallest multiple of `step` (at least `start`, at most `budget`) for which
/// `ok` holds, assuming `ok` is monotone in `n`.
///
/// Doubles from `start` until `ok` holds, then bisects on multiples of `step`
/// between the last failure and the first success. The answer `n` has been
/// evaluated true and, unless it is `step`, `n - step` evaluated false.
pub fn threshold_search(
    start: usize,
    step: usize,
    budget: usize,
    mut ok: impl FnMut(usize) -> Result<bool>,
) -> Result<usize> {
    if step == 0 || start == 0 {
        return Err(Error::invalid("search needs positive start and step"));
    }
    let round_up = |n: usize| n.div_ceil(step) * step;
    let mut lo = 0;
    let mut hi = round_up(start);
    loop {
        if hi > budget {
            return Err(Error::BudgetExceeded { budget });
        }
        if ok(hi)? {
            break;
        }
        lo = hi;
        hi *= 2;
    }
    while hi - lo > step {
        let mid = lo + ((hi - lo) / step / 2) * step;
        if ok(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Parses `dist:k` pairs such as `gaussian:2,rademacher:5`.
pub fn parse_cells(text: &str) -> Result<Vec<(CovariateDist, usize)>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|cell| {
            let (law, k) = cell
                .split_once(':')
                .ok_or_else(|| Error::Config(format!("cell `{cell}` is not of the form dist:k")))?;
            let k: usize = k
                .trim()
                .parse()
                .ok()
                .filter(|&k| k >= 1)
                .ok_or_else(|| Error::Config(format!("cell `{cell}` needs a positive k")))?;
            Ok((law.parse()?, k))
        })
        .collect()
}

/// Outcome of the search for one `(dist, k, d)` cell.
#[derive(Clone, Debug, PartialEq)]
pub struct CellResult {
    pub dist: CovariateDist,
    pub k: usize,
    pub d: usize,
    /// `None` when the search ran past the sample budget.
    pub n_star: Option<usize>,
    /// Empirical success probability at every `n` evaluated.
    pub evaluated: BTreeMap<usize, f64>,
}

/// Success fraction of noiseless AM from a perturbed standard-basis truth.
///
/// Trial `t` reuses one covariate stream and one initialization stream for
/// every `n`, so a larger sample extends a smaller one.
pub fn success_rate(
    cfg: &ExperimentConfig,
    cell: usize,
    law: CovariateDist,
    k: usize,
    d: usize,
    n: usize,
) -> Result<f64> {
    let (r, tol) = (cfg.extra_f64("r")?, cfg.extra_f64("tol")?);
    let truth = ParamSet::standard_basis(k, d)?;
    let hits = run_trials(cfg.trials, |trial| {
        let key = [cell as u64, d as u64, trial as u64];
        let mut data_rng = trial_rng(cfg.seed, &cfg.name, &[key[0], key[1], key[2], 0]);
        let mut init_rng = trial_rng(cfg.seed, &cfg.name, &[key[0], key[1], key[2], 1]);
        let data = synthesize(&truth, law, n, 0.0, &mut data_rng)?;
        let init = perturbed_init(&truth, r, &mut init_rng)?;
        let floor = ZERO_OBJECTIVE * data.y.norm_squared();
        let trace = am_run_until(&init, &data.xi, &data.y, cfg.iterations, |t| {
            t.final_objective() <= floor
        })?;
        is_recovered(trace.last(), &truth, tol)
    })?;
    Ok(hits.iter().filter(|&&h| h).count() as f64 / cfg.trials as f64)
}

/// Runs the search for every cell and every `d`.
pub fn search_cells(cfg: &ExperimentConfig) -> Result<Vec<CellResult>> {
    let cells = parse_cells(cfg.extra("cells")?)?;
    let (threshold, budget) = (cfg.extra_f64("success")?, cfg.extra_count("n_max")?);
    let mut out = Vec::new();
    for (ci, &(law, k)) in cells.iter().enumerate() {
        for &d in &cfg.d {
            let mut evaluated = BTreeMap::new();
            let found = threshold_search(k * (d + 1), k, budget, |n| {
                let rate = match evaluated.get(&n) {
                    Some(&rate) => rate,
                    None => {
                        let rate = success_rate(cfg, ci, law, k, d, n)?;
                        evaluated.insert(n, rate);
                        rate
                    }
                };
                Ok(rate >= threshold)
            });
            let n_star = match found {
                Ok(n) => Some(n),
                Err(Error::BudgetExceeded { .. }) => None,
                Err(e) => return Err(e),
            };
            out.push(CellResult { dist: law, k, d, n_star, evaluated });
        }
    }
    Ok(out)
}

/// Minimal `n` reaching the success threshold per `(dist, k, d)`, with `n/k`
/// and the log-log slope of `n*` against `d` per `(dist, k)`. Cells whose
/// search exceeds `n_max` report status `budget_exceeded` and NaN values.
pub fn sample_complexity_search(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let results = search_cells(cfg)?;
    let mut table = ResultTable::new(
        &cfg.name,
        &["dist", "k", "d", "n_star", "n_over_k", "success_rate", "slope", "status"],
    );
    for group in results.chunks(cfg.d.len()) {
        let complete: Option<Vec<(f64, f64)>> = group
            .iter()
            .map(|c| c.n_star.map(|n| ((c.d as f64).ln(), (n as f64).ln())))
            .collect();
        let slope = match complete {
            Some(pts) if pts.len() >= 2 => {
                let (x, y): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
                line_fit(&x, &y).slope
            }
            _ => f64::NAN,
        };
        for c in group {
            let (n_star, rate, status) = match c.n_star {
                Some(n) => (n as f64, c.evaluated[&n], "ok"),
                None => (f64::NAN, f64::NAN, "budget_exceeded"),
            };
            table.push_row(vec![
                c.dist.name().into(),
                c.k.into(),
                c.d.into(),
                n_star.into(),
                (n_star / c.k as f64).into(),
                rate.into(),
                slope.into(),
                status.into(),
            ])?;
        }
    }
    Ok(table)
}
