use super::{all_finite, Matrix, Vector};
use crate::{Error, Result};

/// Singular values at or below `RANK_CUTOFF * sigma_max` are treated as zero.
pub const RANK_CUTOFF: f64 = 1e-12;

/// Minimum-norm least-squares solution of `A x ~ b`.
///
/// Among all minimizers of `||A x - b||` this returns the one of smallest
/// Euclidean norm, so rank-deficient and underdetermined systems are fine.
/// Tall systems are first reduced by a Householder QR (`A = Q R`, and
/// `pinv(A) = pinv(R) Q^T`), then the small `p x p` factor is solved through
/// its SVD; wide systems go straight to the SVD.
pub fn solve_min_norm_ls(a: &Matrix, b: &Vector) -> Result<Vector> {
    let (m, p) = a.shape();
    if m == 0 || p == 0 {
        return Err(Error::invalid(format!("empty system {m}x{p}")));
    }
    if b.len() != m {
        return Err(Error::invalid(format!(
            "right-hand side has length {}, expected {m}",
            b.len()
        )));
    }
    if !all_finite(a.iter()) || !all_finite(b.iter()) {
        return Err(Error::invalid("non-finite entry in least-squares system"));
    }

    if m >= p {
        let qr = a.clone().qr();
        let mut qtb = b.clone();
        qr.q_tr_mul(&mut qtb);
        let r = qr.r();
        let rhs = qtb.rows(0, p).into_owned();
        Ok(svd_pinv_apply(r, &rhs))
    } else {
        Ok(svd_pinv_apply(a.clone(), b))
    }
}

fn svd_pinv_apply(a: Matrix, b: &Vector) -> Vector {
    let p = a.ncols();
    let svd = a.svd(true, true);
    let u = svd.u.as_ref().expect("requested U");
    let v_t = svd.v_t.as_ref().expect("requested V^T");
    let sigma_max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cutoff = RANK_CUTOFF * sigma_max;

    let utb = u.tr_mul(b);
    let mut x = Vector::zeros(p);
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s > cutoff && s > 0.0 {
            let coef = utb[i] / s;
            x.axpy(coef, &v_t.row(i).transpose(), 1.0);
        }
    }
    x
}
