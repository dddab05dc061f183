//! Error measures between parameter sets: relabeling-matched distance (with and
//! without a global scale), subspace error, prediction error, the exact
//! recovery predicate and the initialization-condition diagnostic.

use crate::model::{predict, ParamSet};
use crate::numerics::{Matrix, Vector};
use crate::{Error, Result};

/// Largest `k` for which [`scaled_dist`] enumerates all `k!` relabelings.
pub const MAX_SCALED_K: usize = 9;

const ORTHONORMAL_TOL: f64 = 1e-8;

/// Distance after the best relabeling (and scale, for [`scaled_dist`]).
///
/// `permutation[j]` is the label of the first argument matched to label `j` of
/// the second, and `value = sum_j ||scale * a[permutation[j]] - b[j]||^2`.
#[derive(Clone, Debug, PartialEq)]
pub struct MatchedDistance {
    pub value: f64,
    pub permutation: Vec<usize>,
    /// 1 for [`dist`]. For [`scaled_dist`], 0 means the infimum is approached
    /// as the scale goes to zero.
    pub scale: f64,
}

fn check_shapes(a: &ParamSet, b: &ParamSet) -> Result<()> {
    if a.k() != b.k() || a.dim() != b.dim() {
        return Err(Error::invalid(format!(
            "parameter sets differ in shape: k={} d={} vs k={} d={}",
            a.k(),
            a.dim(),
            b.k(),
            b.dim()
        )));
    }
    Ok(())
}

/// `cost[(j', j)] = ||a_j' - b_j||^2`.
fn cost_matrix(a: &ParamSet, b: &ParamSet) -> Matrix {
    let (ba, bb) = (a.betas(), b.betas());
    let k = a.k();
    Matrix::from_fn(k, k, |r, c| (ba.column(r) - bb.column(c)).norm_squared())
}

/// Minimum-cost perfect matching on a square cost matrix (Hungarian method with
/// row/column potentials). Returns, for every column, the row matched to it.
pub fn min_cost_assignment(cost: &Matrix) -> Vec<usize> {
    let n = cost.nrows();
    assert_eq!(n, cost.ncols(), "assignment needs a square cost matrix");
    // 1-based with a virtual row/column 0; `way` tracks augmenting paths.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut row_of = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for col in 1..=n {
        row_of[0] = col;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[(j - 1, i0 - 1)] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    // row_of[j] (1-based row index j of `cost`) holds the matched column
    let mut matched = vec![0usize; n];
    for j in 1..=n {
        matched[row_of[j] - 1] = j - 1;
    }
    matched
}

/// `min_P sum_j ||a_{P(j)} - b_j||^2` over relabelings, solved exactly as an
/// assignment problem.
pub fn dist(a: &ParamSet, b: &ParamSet) -> Result<MatchedDistance> {
    check_shapes(a, b)?;
    let cost = cost_matrix(a, b);
    let permutation = min_cost_assignment(&cost);
    let value = permutation.iter().enumerate().map(|(j, &p)| cost[(p, j)]).sum();
    Ok(MatchedDistance { value, permutation, scale: 1.0 })
}

/// Calls `f` on every permutation of `0..k` in lexicographic order.
fn for_each_permutation(k: usize, mut f: impl FnMut(&[usize])) {
    let mut perm: Vec<usize> = (0..k).collect();
    loop {
        f(&perm);
        // next lexicographic permutation
        let Some(i) = (1..k).rev().find(|&i| perm[i - 1] < perm[i]) else {
            return;
        };
        let j = (i..k).rev().find(|&j| perm[j] > perm[i - 1]).expect("pivot exists");
        perm.swap(i - 1, j);
        perm[i..].reverse();
    }
}

/// `min_{c > 0} min_P sum_j ||c a_{P(j)} - b_j||^2`, by enumerating
/// relabelings; the best scale for each is closed form.
pub fn scaled_dist(a: &ParamSet, b: &ParamSet) -> Result<MatchedDistance> {
    check_shapes(a, b)?;
    let k = a.k();
    if k > MAX_SCALED_K {
        return Err(Error::UnsupportedSize { k, max: MAX_SCALED_K });
    }
    let (ba, bb) = (a.betas(), b.betas());
    let a_sq = ba.norm_squared();
    if a_sq == 0.0 {
        return Err(Error::DegenerateInput("scaled distance needs a nonzero first argument".into()));
    }
    let cross = ba.tr_mul(&bb);

    let mut best: Option<MatchedDistance> = None;
    for_each_permutation(k, |perm| {
        let inner: f64 = perm.iter().enumerate().map(|(j, &p)| cross[(p, j)]).sum();
        let c = (inner / a_sq).max(0.0);
        let value: f64 = perm
            .iter()
            .enumerate()
            .map(|(j, &p)| (ba.column(p) * c - bb.column(j)).norm_squared())
            .sum();
        if best.as_ref().map_or(true, |b| value < b.value) {
            best = Some(MatchedDistance { value, permutation: perm.to_vec(), scale: c });
        }
    });
    Ok(best.expect("at least one permutation"))
}

fn orthonormal_residual(u: &Matrix) -> f64 {
    (u.tr_mul(u) - Matrix::identity(u.ncols(), u.ncols())).norm()
}

/// `||U U^T - V V^T||_F^2` for two `d x k` matrices with orthonormal columns.
pub fn subspace_error(u_hat: &Matrix, u_star: &Matrix) -> Result<f64> {
    if u_hat.shape() != u_star.shape() {
        return Err(Error::invalid(format!(
            "subspace bases differ in shape: {:?} vs {:?}",
            u_hat.shape(),
            u_star.shape()
        )));
    }
    for (name, u) in [("estimate", u_hat), ("reference", u_star)] {
        let r = orthonormal_residual(u);
        if r > ORTHONORMAL_TOL {
            return Err(Error::invalid(format!("{name} basis is not orthonormal (residual {r:e})")));
        }
    }
    let diff = u_hat * u_hat.transpose() - u_star * u_star.transpose();
    Ok(diff.norm_squared())
}

/// `(1/n) sum_i (max_j <xi_i, a_j> - max_j <xi_i, b_j>)^2`.
pub fn prediction_error(a: &ParamSet, b: &ParamSet, xi: &Matrix) -> Result<f64> {
    if xi.nrows() == 0 {
        return Err(Error::invalid("prediction error needs at least one sample"));
    }
    let diff: Vector = predict(a, xi)? - predict(b, xi)?;
    Ok(diff.norm_squared() / xi.nrows() as f64)
}

/// Default per-piece recovery tolerance.
pub const RECOVERY_TOL: f64 = 0.01;

/// True when, after optimal relabeling, every piece lies within `tol`
/// (inclusive) of its true counterpart.
pub fn is_recovered(a: &ParamSet, truth: &ParamSet, tol: f64) -> Result<bool> {
    if !(tol > 0.0) {
        return Err(Error::invalid(format!("recovery tolerance must be positive, got {tol}")));
    }
    let m = dist(a, truth)?;
    Ok(m
        .permutation
        .iter()
        .enumerate()
        .all(|(j, &p)| (a.get(p).beta() - truth.get(j).beta()).norm() <= tol))
}

/// `max_{j != j'} ||c (a_j - a_j') - (b_j - b_j')|| / ||theta_j - theta_j'||`
/// where `b` is the truth; labels are taken as given.
pub fn init_condition_at(a: &ParamSet, truth: &ParamSet, c: f64) -> f64 {
    let (ba, bb) = (a.betas(), truth.betas());
    let k = a.k();
    let d = a.dim();
    let mut worst: f64 = 0.0;
    for j in 0..k {
        for u in 0..k {
            if u == j {
                continue;
            }
            let lhs = (ba.column(j) - ba.column(u)) * c - (bb.column(j) - bb.column(u));
            let gap = (bb.column(j) - bb.column(u)).rows(0, d).norm();
            worst = worst.max(lhs.norm() / gap);
        }
    }
    worst
}

/// Number of ternary-search iterations in [`init_condition`].
pub const INIT_CONDITION_ITERS: usize = 200;

/// Minimum over `c > 0` of [`init_condition_at`]. The objective is a maximum
/// of convex functions of `c`, so a ternary search on
/// `(0, 10 * max ||beta*|| / max ||a_j - a_j'||]` finds it.
pub fn init_condition(a: &ParamSet, truth: &ParamSet) -> Result<f64> {
    check_shapes(a, truth)?;
    let k = truth.k();
    if k < 2 {
        return Err(Error::DegenerateParameters("initialization condition needs k >= 2".into()));
    }
    let (ba, bb) = (a.betas(), truth.betas());
    let d = truth.dim();
    let mut max_a_gap: f64 = 0.0;
    for j in 0..k {
        for u in (j + 1)..k {
            if (bb.column(j) - bb.column(u)).rows(0, d).norm() == 0.0 {
                return Err(Error::DegenerateParameters(format!(
                    "true pieces {j} and {u} share a slope"
                )));
            }
            max_a_gap = max_a_gap.max((ba.column(j) - ba.column(u)).norm());
        }
    }
    let max_truth = bb.column_iter().map(|c| c.norm()).fold(0.0, f64::max);
    let upper = if max_a_gap > 0.0 && max_truth > 0.0 {
        10.0 * max_truth / max_a_gap
    } else {
        10.0
    };

    let f = |c: f64| init_condition_at(a, truth, c);
    let (mut lo, mut hi) = (0.0, upper);
    for _ in 0..INIT_CONDITION_ITERS {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if f(m1) <= f(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    Ok(f(0.5 * (lo + hi)))
}
