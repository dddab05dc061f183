//! Max-affine parameters, evaluation, the argmax partition and the geometric
//! quantities (piece probabilities, separation, conditioning) of a parameter set.

use crate::covariates::{sample_covariates, CovariateDist};
use crate::numerics::{all_finite, Matrix, RngStream, Vector};
use crate::{Error, Result};

/// One affine piece `x -> <theta, x> + intercept`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineParam {
    pub theta: Vector,
    pub intercept: f64,
}

impl AffineParam {
    pub fn new(theta: Vector, intercept: f64) -> Self {
        Self { theta, intercept }
    }

    /// Splits an appended vector `(theta, b)` of length `d + 1`.
    pub fn from_beta(beta: &Vector) -> Self {
        let d = beta.len() - 1;
        Self {
            theta: beta.rows(0, d).into_owned(),
            intercept: beta[d],
        }
    }

    /// The appended vector `(theta, b)`.
    pub fn beta(&self) -> Vector {
        let d = self.dim();
        Vector::from_fn(d + 1, |i, _| if i < d { self.theta[i] } else { self.intercept })
    }

    pub fn dim(&self) -> usize {
        self.theta.len()
    }
}

/// An ordered hypothesis of `k >= 1` affine pieces sharing the same dimension.
/// Labels are the positions `0..k`.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamSet {
    params: Vec<AffineParam>,
}

impl ParamSet {
    pub fn new(params: Vec<AffineParam>) -> Result<Self> {
        let first = params
            .first()
            .ok_or_else(|| Error::invalid("a parameter set needs at least one piece"))?;
        let d = first.dim();
        if d == 0 {
            return Err(Error::invalid("covariate dimension must be at least 1"));
        }
        for (j, p) in params.iter().enumerate() {
            if p.dim() != d {
                return Err(Error::invalid(format!(
                    "piece {j} has dimension {}, expected {d}",
                    p.dim()
                )));
            }
            if !all_finite(p.theta.iter()) || !p.intercept.is_finite() {
                return Err(Error::invalid(format!("piece {j} has a non-finite entry")));
            }
        }
        Ok(Self { params })
    }

    /// Builds a set from a `(d+1) x k` matrix whose columns are `(theta_j, b_j)`.
    pub fn from_betas(betas: &Matrix) -> Result<Self> {
        if betas.nrows() < 2 {
            return Err(Error::invalid("beta matrix needs at least two rows"));
        }
        Self::new(
            betas
                .column_iter()
                .map(|c| AffineParam::from_beta(&c.into_owned()))
                .collect(),
        )
    }

    /// `theta_j = e_j` in `R^d` with zero intercepts; requires `k <= d`.
    pub fn standard_basis(k: usize, d: usize) -> Result<Self> {
        if k == 0 || k > d {
            return Err(Error::invalid(format!("standard basis needs 1 <= k <= d, got k={k}, d={d}")));
        }
        Self::new(
            (0..k)
                .map(|j| AffineParam::new(Vector::from_fn(d, |i, _| if i == j { 1.0 } else { 0.0 }), 0.0))
                .collect(),
        )
    }

    /// The cone configuration `theta_1 = sin(a) e_1`, `theta_2 = cos(a) e_2`,
    /// `theta_3 = -cos(a) e_2` in the plane, zero intercepts. Piece 0 wins on
    /// the cone `{x_1 >= 0, |x_2| <= x_1 tan a}` of Gaussian mass `a / pi`.
    pub fn cone(alpha: f64) -> Self {
        let (s, c) = alpha.sin_cos();
        Self {
            params: vec![
                AffineParam::new(Vector::from_vec(vec![s, 0.0]), 0.0),
                AffineParam::new(Vector::from_vec(vec![0.0, c]), 0.0),
                AffineParam::new(Vector::from_vec(vec![0.0, -c]), 0.0),
            ],
        }
    }

    pub fn k(&self) -> usize {
        self.params.len()
    }

    /// Covariate dimension `d` (each appended parameter has length `d + 1`).
    pub fn dim(&self) -> usize {
        self.params[0].dim()
    }

    pub fn params(&self) -> &[AffineParam] {
        &self.params
    }

    pub fn get(&self, j: usize) -> &AffineParam {
        &self.params[j]
    }

    pub fn iter(&self) -> impl Iterator<Item = &AffineParam> {
        self.params.iter()
    }

    /// `(d+1) x k` matrix with column `j` equal to `(theta_j, b_j)`.
    pub fn betas(&self) -> Matrix {
        let d = self.dim();
        let mut m = Matrix::zeros(d + 1, self.k());
        for (j, p) in self.params.iter().enumerate() {
            m.view_mut((0, j), (d, 1)).copy_from(&p.theta);
            m[(d, j)] = p.intercept;
        }
        m
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            params: self
                .params
                .iter()
                .map(|p| AffineParam::new(&p.theta * c, p.intercept * c))
                .collect(),
        }
    }

    /// Reorders pieces so that new label `j` holds old label `order[j]`.
    pub fn permuted(&self, order: &[usize]) -> Self {
        Self {
            params: order.iter().map(|&j| self.params[j].clone()).collect(),
        }
    }

    pub(crate) fn with_piece(&self, j: usize, piece: AffineParam) -> Self {
        let mut params = self.params.clone();
        params[j] = piece;
        Self { params }
    }
}

/// Assignment of every sample to exactly one piece.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    assignment: Vec<usize>,
    subsets: Vec<Vec<usize>>,
}

impl Partition {
    pub fn from_assignment(assignment: Vec<usize>, k: usize) -> Result<Self> {
        let mut subsets = vec![Vec::new(); k];
        for (i, &label) in assignment.iter().enumerate() {
            if label >= k {
                return Err(Error::invalid(format!("label {label} out of range for k = {k}")));
            }
            subsets[label].push(i);
        }
        Ok(Self { assignment, subsets })
    }

    /// Label of every sample, in `0..k`.
    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    /// Sample indices assigned to each label, in increasing order.
    pub fn subsets(&self) -> &[Vec<usize>] {
        &self.subsets
    }

    pub fn subset(&self, j: usize) -> &[usize] {
        &self.subsets[j]
    }

    pub fn k(&self) -> usize {
        self.subsets.len()
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }
}

/// Piece probabilities and the separation/conditioning constants of a
/// parameter set under a covariate law.
#[derive(Clone, Debug)]
pub struct GeometryReport {
    /// Monte-Carlo estimate of `P(piece j wins)` under the tie-broken partition.
    pub pi: Vector,
    pub pi_min: f64,
    /// Smallest squared slope gap `min_{j != j'} ||theta_j - theta_j'||^2`.
    pub delta: f64,
    /// `max_j (max_{j' != j} gap / min_{j' != j} gap)` over squared slope gaps.
    pub kappa: f64,
    /// Largest appended-parameter norm `max_j ||(theta_j, b_j)||`.
    pub b_max: f64,
    pub mc_samples: usize,
    /// Conservative standard error `1 / (2 sqrt(mc_samples))` of each `pi_j`.
    pub mc_stderr: f64,
}

/// `(x, 1)`.
pub fn append_one(x: &Vector) -> Vector {
    let d = x.len();
    Vector::from_fn(d + 1, |i, _| if i < d { x[i] } else { 1.0 })
}

/// The `n x (d+1)` matrix `[X, 1]`.
pub fn append_ones(x: &Matrix) -> Matrix {
    x.clone().insert_column(x.ncols(), 1.0)
}

/// `max_j <xi, beta_j>` for an appended covariate `xi = (x, 1)`.
pub fn eval_max_affine(ps: &ParamSet, xi: &Vector) -> Result<f64> {
    if xi.len() != ps.dim() + 1 {
        return Err(Error::invalid(format!(
            "covariate has length {}, expected {}",
            xi.len(),
            ps.dim() + 1
        )));
    }
    let d = ps.dim();
    let head = xi.rows(0, d);
    Ok(ps
        .iter()
        .map(|p| p.theta.dot(&head) + p.intercept * xi[d])
        .fold(f64::NEG_INFINITY, f64::max))
}

/// `n x k` matrix of inner products `<xi_i, beta_j>`.
pub(crate) fn scores(ps: &ParamSet, xi: &Matrix) -> Result<Matrix> {
    if xi.ncols() != ps.dim() + 1 {
        return Err(Error::invalid(format!(
            "design has {} columns, expected {}",
            xi.ncols(),
            ps.dim() + 1
        )));
    }
    Ok(xi * ps.betas())
}

/// Row-wise maxima of the scores, i.e. the max-affine predictions.
pub fn predict(ps: &ParamSet, xi: &Matrix) -> Result<Vector> {
    let s = scores(ps, xi)?;
    Ok(Vector::from_iterator(
        s.nrows(),
        s.row_iter().map(|r| r.iter().cloned().fold(f64::NEG_INFINITY, f64::max)),
    ))
}

/// Assigns every row of `xi` to the smallest label attaining the maximum of
/// `<xi_i, beta_j>`. Ties use exact floating-point equality.
pub fn partition(ps: &ParamSet, xi: &Matrix) -> Result<Partition> {
    let s = scores(ps, xi)?;
    let assignment = s
        .row_iter()
        .map(|row| {
            let mut best = 0;
            for j in 1..row.len() {
                if row[j] > row[best] {
                    best = j;
                }
            }
            best
        })
        .collect();
    Partition::from_assignment(assignment, ps.k())
}

pub const MIN_GEOMETRY_SAMPLES: usize = 1000;

pub fn geometry(
    ps: &ParamSet,
    dist: CovariateDist,
    mc_samples: usize,
    rng: &mut RngStream,
) -> Result<GeometryReport> {
    if mc_samples < MIN_GEOMETRY_SAMPLES {
        return Err(Error::invalid(format!(
            "geometry needs at least {MIN_GEOMETRY_SAMPLES} Monte-Carlo samples, got {mc_samples}"
        )));
    }
    let b_max = ps
        .iter()
        .map(|p| p.beta().norm())
        .fold(0.0, f64::max);
    let k = ps.k();
    if k == 1 {
        return Err(Error::GeometryUndefined { b_max });
    }

    let mut gaps = Matrix::zeros(k, k);
    for a in 0..k {
        for b in (a + 1)..k {
            let g = (&ps.get(a).theta - &ps.get(b).theta).norm_squared();
            gaps[(a, b)] = g;
            gaps[(b, a)] = g;
        }
    }
    let mut delta = f64::INFINITY;
    let mut kappa: f64 = 1.0;
    for j in 0..k {
        let others = (0..k).filter(|&u| u != j).map(|u| gaps[(j, u)]);
        let (lo, hi) = others.fold((f64::INFINITY, 0.0f64), |(lo, hi), g| (lo.min(g), hi.max(g)));
        delta = delta.min(lo);
        if lo > 0.0 {
            kappa = kappa.max(hi / lo);
        }
    }
    if delta <= 0.0 {
        return Err(Error::DegenerateParameters(
            "two pieces share the same slope (separation is zero)".into(),
        ));
    }

    let x = sample_covariates(dist, mc_samples, ps.dim(), rng);
    let part = partition(ps, &append_ones(&x))?;
    let pi = Vector::from_iterator(
        k,
        part.subsets().iter().map(|s| s.len() as f64 / mc_samples as f64),
    );
    let pi_min = pi.min();

    Ok(GeometryReport {
        pi,
        pi_min,
        delta,
        kappa,
        b_max,
        mc_samples,
        mc_stderr: 1.0 / (2.0 * (mc_samples as f64).sqrt()),
    })
}
