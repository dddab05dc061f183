//! Initialization: a spectral estimate of the span of the slopes, lifted to
//! the appended space, followed by a scale-invariant random search in that
//! low-dimensional span scored on held-out samples.

use rayon::prelude::*;

use crate::covariates::Dataset;
use crate::model::{predict, ParamSet};
use crate::numerics::{sample_unit_ball, sym_eig_desc, Matrix, RngStream, Vector};
use crate::{Error, Result};

/// Top-`k` eigenvectors of the second-moment matrix, with the full descending
/// spectrum kept for diagnostics.
#[derive(Clone, Debug)]
pub struct SubspaceEstimate {
    /// `d x k`, orthonormal columns.
    pub u_hat: Matrix,
    /// All `d` eigenvalues, descending.
    pub eigenvalues: Vector,
}

/// `[[U, 0], [0, 1]]`, mapping `(k+1)`-dimensional search points to appended
/// parameters. When the spectral step is skipped this is the identity.
#[derive(Clone, Debug)]
pub struct LiftedBasis {
    pub v_hat: Matrix,
}

impl LiftedBasis {
    pub fn identity(d: usize) -> Self {
        Self { v_hat: Matrix::identity(d + 1, d + 1) }
    }

    /// Dimension of the search space.
    pub fn search_dim(&self) -> usize {
        self.v_hat.ncols()
    }

    /// Covariate dimension `d`.
    pub fn dim(&self) -> usize {
        self.v_hat.nrows() - 1
    }
}

/// Spectral subspace estimate from `m` samples.
///
/// With `M1 = (1/m) sum y_i x_i` and `M2 = (1/m) sum y_i (x_i x_i^T - I)`,
/// returns the top-`k` eigenvectors of `M1 M1^T + M2` (symmetrized before the
/// eigendecomposition). The moments are plain averages over the samples
/// passed in.
pub fn pca_subspace(x: &Matrix, y: &Vector, k: usize) -> Result<SubspaceEstimate> {
    let (m, d) = x.shape();
    if k == 0 || k > d {
        return Err(Error::invalid(format!("subspace rank must satisfy 1 <= k <= d, got k={k}, d={d}")));
    }
    if m < k {
        return Err(Error::invalid(format!("need at least k = {k} samples, got {m}")));
    }
    if y.len() != m {
        return Err(Error::invalid(format!("{m} covariate rows but {} responses", y.len())));
    }
    let inv_m = 1.0 / m as f64;
    let m1 = x.tr_mul(y) * inv_m;

    let mut weighted = x.clone();
    for mut col in weighted.column_iter_mut() {
        col.component_mul_assign(y);
    }
    let mut moment = weighted.tr_mul(x) * inv_m;
    let y_mean = y.sum() * inv_m;
    for i in 0..d {
        moment[(i, i)] -= y_mean;
    }
    moment += &m1 * m1.transpose();
    let moment = (&moment + moment.transpose()) * 0.5;

    let (eigenvalues, vectors) = sym_eig_desc(&moment)?;
    Ok(SubspaceEstimate {
        u_hat: vectors.columns(0, k).into_owned(),
        eigenvalues,
    })
}

pub fn lift(sub: &SubspaceEstimate) -> LiftedBasis {
    let (d, k) = sub.u_hat.shape();
    let mut v_hat = Matrix::zeros(d + 1, k + 1);
    v_hat.view_mut((0, 0), (d, k)).copy_from(&sub.u_hat);
    v_hat[(d, k)] = 1.0;
    LiftedBasis { v_hat }
}

/// `argmin_{c >= 0} ||u - c v||^2 = max(<u, v> / ||v||^2, 0)`; zero when `v = 0`.
pub fn optimal_scale(u: &Vector, v: &Vector) -> f64 {
    let vv = v.norm_squared();
    if vv == 0.0 {
        return 0.0;
    }
    (u.dot(v) / vv).max(0.0)
}

/// Scale-free hold-out fit `(1/m) min_{c >= 0} ||y - c * max_j <xi, beta_j>||^2`.
pub fn candidate_fit(ps: &ParamSet, xi_hold: &Matrix, y_hold: &Vector) -> Result<f64> {
    let v = predict(ps, xi_hold)?;
    let c = optimal_scale(y_hold, &v);
    Ok((y_hold - v * c).norm_squared() / y_hold.len() as f64)
}

/// Every candidate drawn by a random search together with its hold-out fit.
#[derive(Clone, Debug)]
pub struct CandidateSearch {
    pub candidates: Vec<ParamSet>,
    pub fits: Vector,
}

impl CandidateSearch {
    /// Index of the best fit among the first `m` candidates (smallest index on
    /// ties). Candidates are drawn sequentially, so this is exactly what a
    /// search with `M = m` selects.
    pub fn select(&self, m: usize) -> usize {
        let m = m.clamp(1, self.fits.len());
        let mut best = 0;
        for l in 1..m {
            if self.fits[l] < self.fits[best] {
                best = l;
            }
        }
        best
    }
}

/// Result of [`random_search`].
#[derive(Clone, Debug)]
pub struct SearchOutcome {
    /// The selected candidate, unscaled.
    pub params: ParamSet,
    pub selected: usize,
    pub fits: Vector,
}

/// Draws `m_candidates * k` points uniformly from the unit ball of the search
/// space (candidate by candidate, piece by piece) and maps them through `V`.
pub fn draw_candidates(
    basis: &LiftedBasis,
    k: usize,
    m_candidates: usize,
    rng: &mut RngStream,
) -> Result<Vec<ParamSet>> {
    let dim = basis.search_dim();
    (0..m_candidates)
        .map(|_| {
            let nu = Matrix::from_columns(
                &(0..k).map(|_| sample_unit_ball(dim, rng)).collect::<Vec<_>>(),
            );
            ParamSet::from_betas(&(&basis.v_hat * nu))
        })
        .collect()
}

pub fn search_candidates(
    basis: &LiftedBasis,
    xi_hold: &Matrix,
    y_hold: &Vector,
    k: usize,
    m_candidates: usize,
    rng: &mut RngStream,
) -> Result<CandidateSearch> {
    if m_candidates == 0 || k == 0 {
        return Err(Error::invalid("random search needs M >= 1 and k >= 1"));
    }
    if xi_hold.nrows() == 0 || xi_hold.nrows() != y_hold.len() {
        return Err(Error::invalid("hold-out design and responses disagree or are empty"));
    }
    if xi_hold.ncols() != basis.v_hat.nrows() {
        return Err(Error::invalid(format!(
            "hold-out design has {} columns, basis lifts to {}",
            xi_hold.ncols(),
            basis.v_hat.nrows()
        )));
    }
    let candidates = draw_candidates(basis, k, m_candidates, rng)?;
    let fits = candidates
        .par_iter()
        .map(|ps| candidate_fit(ps, xi_hold, y_hold))
        .collect::<Result<Vec<f64>>>()?;
    Ok(CandidateSearch { candidates, fits: Vector::from_vec(fits) })
}

/// Low-dimensional random search: the candidate with the smallest scale-free
/// hold-out fit, returned without rescaling.
pub fn random_search(
    basis: &LiftedBasis,
    xi_hold: &Matrix,
    y_hold: &Vector,
    k: usize,
    m_candidates: usize,
    rng: &mut RngStream,
) -> Result<SearchOutcome> {
    let search = search_candidates(basis, xi_hold, y_hold, k, m_candidates, rng)?;
    let selected = search.select(m_candidates);
    Ok(SearchOutcome {
        params: search.candidates[selected].clone(),
        selected,
        fits: search.fits,
    })
}

/// Number of leading samples used by the spectral step: `ceil(n / 2)`.
pub fn spectral_split(n: usize) -> usize {
    n.div_ceil(2)
}

/// Basis used by [`full_init`] and the samples the search is scored on.
///
/// For `k < d` the first `ceil(n/2)` samples give the spectral estimate and
/// the rest are held out. For `k >= d` no dimension reduction is possible;
/// the basis is the identity and every sample is used for scoring.
pub fn init_basis(data: &Dataset, k: usize) -> Result<(LiftedBasis, Dataset)> {
    let (n, d) = (data.n(), data.d());
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    if k >= d {
        return Ok((LiftedBasis::identity(d), data.clone()));
    }
    let head = spectral_split(n);
    if head == n {
        return Err(Error::invalid(format!("need at least 2 samples to split, got {n}")));
    }
    let first = data.rows(0, head);
    let sub = pca_subspace(&first.x, &first.y, k)?;
    Ok((lift(&sub), data.rows(head, n - head)))
}

/// The full candidate pool behind [`full_init`].
pub fn init_candidates(
    data: &Dataset,
    k: usize,
    m_candidates: usize,
    rng: &mut RngStream,
) -> Result<CandidateSearch> {
    let (basis, hold) = init_basis(data, k)?;
    search_candidates(&basis, &hold.xi, &hold.y, k, m_candidates, rng)
}

/// Spectral estimate followed by random search.
pub fn full_init(data: &Dataset, k: usize, m_candidates: usize, rng: &mut RngStream) -> Result<ParamSet> {
    let search = init_candidates(data, k, m_candidates, rng)?;
    Ok(search.candidates[search.select(m_candidates)].clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covariates::{synthesize, CovariateDist};
    use crate::metrics::subspace_error;
    use crate::model::AffineParam;

    fn orthonormal(rng: &mut RngStream, d: usize, k: usize) -> Matrix {
        let g = Matrix::from_fn(d, k, |_, _| rng.normal());
        g.qr().q()
    }

    #[test]
    fn full_rank_subspace_is_everything() {
        let mut rng = RngStream::new(1, 0);
        let x = Matrix::from_fn(50, 4, |_, _| rng.normal());
        let y = Vector::from_fn(50, |_, _| rng.normal());
        let sub = pca_subspace(&x, &y, 4).unwrap();
        let truth = orthonormal(&mut rng, 4, 4);
        assert!(subspace_error(&sub.u_hat, &truth).unwrap() < 1e-10);
        assert!((sub.u_hat.tr_mul(&sub.u_hat) - Matrix::identity(4, 4)).norm() < 1e-8);
    }

    #[test]
    fn pca_rejects_rank_above_dimension() {
        let x = Matrix::zeros(5, 2);
        assert!(pca_subspace(&x, &Vector::zeros(5), 3).is_err());
    }

    #[test]
    fn pca_is_row_permutation_invariant() {
        let mut rng = RngStream::new(2, 0);
        let x = Matrix::from_fn(40, 5, |_, _| rng.normal());
        let y = Vector::from_fn(40, |_, _| rng.normal());
        let order: Vec<usize> = (0..40).rev().collect();
        let a = pca_subspace(&x, &y, 2).unwrap();
        let b = pca_subspace(&x.select_rows(order.iter()), &y.select_rows(order.iter()), 2).unwrap();
        let pa = &a.u_hat * a.u_hat.transpose();
        let pb = &b.u_hat * b.u_hat.transpose();
        assert!((pa - pb).norm() < 1e-8);
    }

    #[test]
    fn lift_block_structure() {
        let sub = SubspaceEstimate {
            u_hat: Matrix::from_column_slice(2, 1, &[1.0, 0.0]),
            eigenvalues: Vector::from_vec(vec![1.0, 0.0]),
        };
        let v = lift(&sub).v_hat;
        assert_eq!(v, Matrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 0.0, 0.0, 1.0]));

        let mut rng = RngStream::new(3, 0);
        let u = orthonormal(&mut rng, 6, 2);
        let sub = SubspaceEstimate { u_hat: u.clone(), eigenvalues: Vector::zeros(6) };
        let v = lift(&sub).v_hat;
        assert!((v.tr_mul(&v) - Matrix::identity(3, 3)).norm() < 1e-12);
        let x = Vector::from_fn(6, |_, _| rng.normal());
        let xi = crate::model::append_one(&x);
        let split = v.tr_mul(&xi);
        let ux = u.tr_mul(&x);
        assert!((split.rows(0, 2) - ux).norm() < 1e-12);
        assert_eq!(split[2], 1.0);
    }

    #[test]
    fn optimal_scale_examples() {
        let u = Vector::from_vec(vec![1.0, -2.0, 0.5]);
        assert!((optimal_scale(&u, &u) - 1.0).abs() < 1e-15);
        assert_eq!(optimal_scale(&u, &(-&u)), 0.0);
        assert_eq!(optimal_scale(&Vector::from_vec(vec![2.0, 0.0]), &Vector::from_vec(vec![1.0, 0.0])), 2.0);
        assert_eq!(optimal_scale(&u, &Vector::zeros(3)), 0.0);
    }

    #[test]
    fn optimal_scale_beats_grid() {
        let mut rng = RngStream::new(4, 0);
        for _ in 0..20 {
            let u = Vector::from_fn(8, |_, _| rng.normal());
            let v = Vector::from_fn(8, |_, _| rng.normal());
            let c = optimal_scale(&u, &v);
            let loss = |c: f64| (&u - &v * c).norm_squared();
            let grid_best = (0..=4000).map(|i| loss(i as f64 * 1e-3)).fold(f64::INFINITY, f64::min);
            assert!(loss(c) <= grid_best + 1e-12);
        }
    }

    fn hold_out(seed: u64) -> (ParamSet, Matrix, Vector) {
        let truth = ParamSet::standard_basis(2, 3).unwrap();
        let data = synthesize(&truth, CovariateDist::Gaussian, 80, 0.1, &mut RngStream::new(seed, 0)).unwrap();
        (truth, data.xi, data.y)
    }

    #[test]
    fn fits_match_naive_double_loop() {
        let (_, xi, y) = hold_out(5);
        let basis = LiftedBasis::identity(3);
        let out = search_candidates(&basis, &xi, &y, 2, 12, &mut RngStream::new(5, 1)).unwrap();
        for (l, ps) in out.candidates.iter().enumerate() {
            let mut v = vec![0.0; y.len()];
            for i in 0..y.len() {
                let mut best = f64::NEG_INFINITY;
                for p in ps.iter() {
                    let mut s = p.intercept;
                    for j in 0..3 {
                        s += p.theta[j] * xi[(i, j)];
                    }
                    best = best.max(s);
                }
                v[i] = best;
            }
            let uv: f64 = (0..y.len()).map(|i| y[i] * v[i]).sum();
            let vv: f64 = v.iter().map(|a| a * a).sum();
            let c = if vv > 0.0 { (uv / vv).max(0.0) } else { 0.0 };
            let fit: f64 = (0..y.len()).map(|i| (y[i] - c * v[i]).powi(2)).sum::<f64>() / y.len() as f64;
            assert!((fit - out.fits[l]).abs() < 1e-12);
            assert!(out.fits[l] >= 0.0);
        }
    }

    #[test]
    fn planted_exact_candidate_wins() {
        let (_, xi, _) = hold_out(6);
        let basis = LiftedBasis::identity(3);
        let draws = search_candidates(&basis, &xi, &Vector::zeros(xi.nrows()), 2, 9, &mut RngStream::new(6, 2)).unwrap();
        // plant: responses are exactly 3x the predictions of candidate 4
        let y = predict(&draws.candidates[4], &xi).unwrap() * 3.0;
        let out = random_search(&basis, &xi, &y, 2, 9, &mut RngStream::new(6, 2)).unwrap();
        assert_eq!(out.selected, 4);
        assert!(out.fits[4] < 1e-24);
        assert_eq!(out.params, draws.candidates[4]);
    }

    #[test]
    fn selection_is_invariant_to_response_scale() {
        let (_, xi, y) = hold_out(7);
        let basis = LiftedBasis::identity(3);
        let a = random_search(&basis, &xi, &y, 2, 25, &mut RngStream::new(7, 1)).unwrap();
        for lambda in [0.1, 3.0, 10.0] {
            let b = random_search(&basis, &xi, &(&y * lambda), 2, 25, &mut RngStream::new(7, 1)).unwrap();
            assert_eq!(a.selected, b.selected);
            for l in 0..25 {
                assert!((b.fits[l] - lambda * lambda * a.fits[l]).abs() <= 1e-10 * (1.0 + b.fits[l]));
            }
        }
    }

    #[test]
    fn prefix_selection_matches_smaller_search() {
        let (_, xi, y) = hold_out(8);
        let basis = LiftedBasis::identity(3);
        let big = search_candidates(&basis, &xi, &y, 2, 30, &mut RngStream::new(8, 1)).unwrap();
        let small = random_search(&basis, &xi, &y, 2, 10, &mut RngStream::new(8, 1)).unwrap();
        assert_eq!(big.select(10), small.selected);
        assert_eq!(big.candidates[big.select(10)], small.params);
    }

    #[test]
    fn identity_basis_when_k_reaches_d() {
        let truth = ParamSet::new(vec![
            AffineParam::new(Vector::from_vec(vec![1.0, 0.0]), 0.0),
            AffineParam::new(Vector::from_vec(vec![0.0, 1.0]), 0.0),
        ])
        .unwrap();
        let data = synthesize(&truth, CovariateDist::Gaussian, 40, 0.0, &mut RngStream::new(9, 0)).unwrap();
        let (basis, hold) = init_basis(&data, 2).unwrap();
        assert_eq!(basis.v_hat, Matrix::identity(3, 3));
        assert_eq!(hold.n(), 40);
    }

    #[test]
    fn odd_split_gives_spectral_step_the_extra_sample() {
        assert_eq!(spectral_split(7), 4);
        let truth = ParamSet::standard_basis(1, 3).unwrap();
        let data = synthesize(&truth, CovariateDist::Gaussian, 7, 0.0, &mut RngStream::new(10, 0)).unwrap();
        let (_, hold) = init_basis(&data, 1).unwrap();
        assert_eq!(hold.n(), 3);
        assert_eq!(hold.x, data.x.rows(4, 3).into_owned());
    }

    #[test]
    fn full_init_is_deterministic() {
        let truth = ParamSet::standard_basis(2, 6).unwrap();
        let data = synthesize(&truth, CovariateDist::Gaussian, 200, 0.1, &mut RngStream::new(11, 0)).unwrap();
        let a = full_init(&data, 2, 15, &mut RngStream::new(11, 1)).unwrap();
        let b = full_init(&data, 2, 15, &mut RngStream::new(11, 1)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.k(), 2);
        assert_eq!(a.dim(), 6);
    }
}
