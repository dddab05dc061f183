use super::{all_finite, Matrix, Vector};
use crate::{Error, Result};

const SYMMETRY_TOL: f64 = 1e-10;
const SIGN_EPS: f64 = 1e-12;

/// Eigendecomposition of a symmetric matrix with eigenvalues in descending
/// order and a deterministic sign per eigenvector: the first coordinate of
/// magnitude above `1e-12` is positive.
///
/// Equal eigenvalues keep the order the underlying solver produced them in.
pub fn sym_eig_desc(s: &Matrix) -> Result<(Vector, Matrix)> {
    let (rows, cols) = s.shape();
    if rows != cols || rows == 0 {
        return Err(Error::invalid(format!("expected a square matrix, got {rows}x{cols}")));
    }
    if !all_finite(s.iter()) {
        return Err(Error::invalid("non-finite entry in symmetric matrix"));
    }
    let scale = s.norm();
    let asym = (s - s.transpose()).amax();
    if asym > SYMMETRY_TOL * scale {
        return Err(Error::invalid(format!(
            "matrix is not symmetric (max asymmetry {asym:e})"
        )));
    }

    let eig = nalgebra::SymmetricEigen::new(s.clone());
    let mut order: Vec<usize> = (0..rows).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    let values = Vector::from_iterator(rows, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = Matrix::zeros(rows, rows);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = eig.eigenvectors.column(src).into_owned();
        if let Some(lead) = col.iter().find(|v| v.abs() > SIGN_EPS) {
            if *lead < 0.0 {
                col.neg_mut();
            }
        }
        vectors.set_column(dst, &col);
    }
    Ok((values, vectors))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::RngStream;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn diagonal_is_sorted_with_basis_vectors() {
        let s = Matrix::from_diagonal(&Vector::from_vec(vec![3.0, 1.0, 2.0]));
        let (vals, vecs) = sym_eig_desc(&s).unwrap();
        assert_eq!(vals.as_slice(), &[3.0, 2.0, 1.0]);
        let expected = Matrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 0.0]);
        assert!((vecs - expected).norm() < 1e-12);
    }

    #[test]
    fn identity_keeps_orthonormal_basis() {
        let (vals, vecs) = sym_eig_desc(&Matrix::identity(3, 3)).unwrap();
        assert!(vals.iter().all(|v| (v - 1.0).abs() < 1e-14));
        assert!((vecs.tr_mul(&vecs) - Matrix::identity(3, 3)).norm() < 1e-12);
    }

    #[test]
    fn random_reconstruction_and_signs() {
        let mut rng = RngStream::new(11, 3);
        let g = Matrix::from_fn(6, 6, |_, _| StandardNormal.sample(&mut rng));
        let s = &g + g.transpose();
        let (vals, q) = sym_eig_desc(&s).unwrap();
        let recon = &q * Matrix::from_diagonal(&vals) * q.transpose();
        assert!((&s - recon).norm() <= 1e-8 * s.norm());
        assert!((q.tr_mul(&q) - Matrix::identity(6, 6)).norm() <= 1e-10);
        assert!(vals.as_slice().windows(2).all(|w| w[0] >= w[1]));
        for col in q.column_iter() {
            let lead = col.iter().find(|v| v.abs() > 1e-12).unwrap();
            assert!(*lead > 0.0);
        }
    }

    #[test]
    fn rejects_asymmetric() {
        let s = Matrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        assert!(matches!(sym_eig_desc(&s), Err(Error::InvalidInput(_))));
    }
}
