//! Alternating minimization for max-affine regression and for real phase
//! retrieval.
//!
//! Both loops run a caller-chosen number of iterations on the full sample.
//! Once an iteration reproduces the previous partition (or sign pattern) the
//! iterate is a fixed point, and the remaining trace entries are copies.

use crate::model::{partition, predict, AffineParam, ParamSet, Partition};
use crate::numerics::{solve_min_norm_ls, Matrix, Vector};
use crate::{Error, Result};

/// Iterates, partitions and least-squares objectives of a max-affine AM run.
///
/// `iterates[0]` is the initialization; `partitions[t]` is the partition
/// induced by `iterates[t]`, which produced `iterates[t + 1]`;
/// `objective[t] = sum_i (y_i - max_j <xi_i, beta_j^(t)>)^2`.
#[derive(Clone, Debug)]
pub struct AmTrace {
    pub iterates: Vec<ParamSet>,
    pub partitions: Vec<Partition>,
    pub objective: Vec<f64>,
}

impl AmTrace {
    pub fn last(&self) -> &ParamSet {
        self.iterates.last().expect("trace holds the initialization")
    }

    pub fn final_objective(&self) -> f64 {
        *self.objective.last().expect("trace holds the initial objective")
    }

    /// Number of AM updates performed.
    pub fn steps(&self) -> usize {
        self.partitions.len()
    }
}

/// Iterates and sign vectors of a phase-retrieval AM run; `signs[t]` is
/// computed from `iterates[t]`.
#[derive(Clone, Debug)]
pub struct PrTrace {
    pub iterates: Vec<Vector>,
    pub signs: Vec<Vec<f64>>,
}

impl PrTrace {
    pub fn last(&self) -> &Vector {
        self.iterates.last().expect("trace holds the initialization")
    }
}

fn check_design(d: usize, xi: &Matrix, y: &Vector) -> Result<()> {
    if xi.ncols() != d + 1 {
        return Err(Error::invalid(format!(
            "design has {} columns, expected {}",
            xi.ncols(),
            d + 1
        )));
    }
    if xi.nrows() != y.len() {
        return Err(Error::invalid(format!(
            "design has {} rows but {} responses",
            xi.nrows(),
            y.len()
        )));
    }
    Ok(())
}

/// Least-squares refit of every piece on a given partition. Pieces whose
/// subset is empty are kept unchanged.
pub(crate) fn refit(ps: &ParamSet, part: &Partition, xi: &Matrix, y: &Vector) -> Result<ParamSet> {
    let mut next = ps.clone();
    for (j, subset) in part.subsets().iter().enumerate() {
        if subset.is_empty() {
            continue;
        }
        let a = xi.select_rows(subset.iter());
        let b = y.select_rows(subset.iter());
        let beta = solve_min_norm_ls(&a, &b)?;
        next = next.with_piece(j, AffineParam::from_beta(&beta));
    }
    Ok(next)
}

/// One AM update: partition the samples by the current argmax, then refit each
/// piece by minimum-norm least squares on its subset.
pub fn am_step(ps: &ParamSet, xi: &Matrix, y: &Vector) -> Result<(ParamSet, Partition)> {
    check_design(ps.dim(), xi, y)?;
    let part = partition(ps, xi)?;
    let next = refit(ps, &part, xi, y)?;
    Ok((next, part))
}

/// Sum of squared residuals of the max-affine fit.
pub fn objective(ps: &ParamSet, xi: &Matrix, y: &Vector) -> Result<f64> {
    Ok((y - predict(ps, xi)?).norm_squared())
}

/// `iterations` AM updates from `ps0` on the full data.
pub fn am_run(ps0: &ParamSet, xi: &Matrix, y: &Vector, iterations: usize) -> Result<AmTrace> {
    am_run_until(ps0, xi, y, iterations, |_| false)
}

/// As [`am_run`], but stops after the first update whose trace satisfies
/// `stop`. The predicate sees the trace including the newest iterate.
pub fn am_run_until(
    ps0: &ParamSet,
    xi: &Matrix,
    y: &Vector,
    iterations: usize,
    mut stop: impl FnMut(&AmTrace) -> bool,
) -> Result<AmTrace> {
    check_design(ps0.dim(), xi, y)?;
    let mut trace = AmTrace {
        iterates: vec![ps0.clone()],
        partitions: Vec::with_capacity(iterations),
        objective: vec![objective(ps0, xi, y)?],
    };
    for _ in 0..iterations {
        let current = trace.last();
        let part = partition(current, xi)?;
        let repeated = trace.partitions.last() == Some(&part);
        let (next, obj) = if repeated {
            (current.clone(), trace.final_objective())
        } else {
            let next = refit(current, &part, xi, y)?;
            let obj = objective(&next, xi, y)?;
            (next, obj)
        };
        trace.partitions.push(part);
        trace.iterates.push(next);
        trace.objective.push(obj);
        if stop(&trace) {
            break;
        }
    }
    Ok(trace)
}

fn signs(theta: &Vector, x: &Matrix) -> Vec<f64> {
    (x * theta)
        .iter()
        .map(|&v| if v >= 0.0 { 1.0 } else { -1.0 })
        .collect()
}

fn sign_refit(s: &[f64], x: &Matrix, y: &Vector) -> Result<Vector> {
    let mut a = x.clone();
    for (i, &si) in s.iter().enumerate() {
        if si < 0.0 {
            a.row_mut(i).neg_mut();
        }
    }
    solve_min_norm_ls(&a, y)
}

fn check_pr(theta: &Vector, x: &Matrix, y: &Vector) -> Result<()> {
    if x.ncols() != theta.len() || x.nrows() != y.len() {
        return Err(Error::invalid(format!(
            "phase retrieval shapes disagree: X is {}x{}, theta {}, y {}",
            x.nrows(),
            x.ncols(),
            theta.len(),
            y.len()
        )));
    }
    Ok(())
}

/// One phase-retrieval AM update: `s_i = sgn(<x_i, theta>)` with `sgn(0) = 1`,
/// then the minimum-norm least-squares fit of `y` on the rows `s_i x_i`.
pub fn pr_step(theta: &Vector, x: &Matrix, y: &Vector) -> Result<Vector> {
    check_pr(theta, x, y)?;
    sign_refit(&signs(theta, x), x, y)
}

pub fn pr_run(theta0: &Vector, x: &Matrix, y: &Vector, iterations: usize) -> Result<PrTrace> {
    check_pr(theta0, x, y)?;
    let mut trace = PrTrace {
        iterates: vec![theta0.clone()],
        signs: Vec::with_capacity(iterations),
    };
    for _ in 0..iterations {
        let s = signs(trace.last(), x);
        let next = if trace.signs.last() == Some(&s) {
            trace.last().clone()
        } else {
            sign_refit(&s, x, y)?
        };
        trace.signs.push(s);
        trace.iterates.push(next);
    }
    Ok(trace)
}
