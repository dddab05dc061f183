//! Dense linear algebra and seeded randomness shared by the estimators.

mod eig;
mod lstsq;
mod rng;

pub use eig::sym_eig_desc;
pub use lstsq::{solve_min_norm_ls, RANK_CUTOFF};
pub use rng::{sample_unit_ball, sample_unit_sphere, stream_id, RngStream};

/// Dense column-major matrix of `f64`.
pub type Matrix = nalgebra::DMatrix<f64>;
/// Dense column vector of `f64`.
pub type Vector = nalgebra::DVector<f64>;

pub(crate) fn all_finite<'a>(values: impl IntoIterator<Item = &'a f64>) -> bool {
    values.into_iter().all(|v| v.is_finite())
}

/// Formats a float with 17 significant digits, enough to round-trip any `f64`.
pub fn format_f64(v: f64) -> String {
    if v == 0.0 {
        // keep the sign of negative zero out of the output
        return "0".to_string();
    }
    format!("{v:.16e}")
}
