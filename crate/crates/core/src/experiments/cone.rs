//! Second moments of a Gaussian restricted to a planar cone.

use super::table::ResultTable;
use super::trials::{mean, stderr, trial_rng};
use super::ExperimentConfig;
use crate::numerics::{sym_eig_desc, Matrix};
use crate::{Error, Result};

/// Fewest retained draws for which the moments are reported.
pub const MIN_RETAINED: usize = 500;

/// Moments of `W ~ N(0, I_2)` conditioned on `{w_1 >= 0, |w_2| <= w_1 tan a}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConeMoments {
    pub alpha: f64,
    pub retained: usize,
    /// Eigenvalues of the empirical second-moment matrix, descending.
    pub lambda1: f64,
    pub lambda2: f64,
    /// Empirical `E[W_1 W_2]` and its standard error.
    pub cross: f64,
    pub cross_stderr: f64,
}

/// Exact `(E[W_1^2], E[W_2^2])` on the cone: `1 +- sin(2a) / (2a)`.
pub fn cone_reference(alpha: f64) -> (f64, f64) {
    let s = (2.0 * alpha).sin() / (2.0 * alpha);
    (1.0 + s, 1.0 - s)
}

/// Draws `draws` standard Gaussian pairs and keeps those inside the cone.
pub fn cone_moments(alpha: f64, draws: usize, seed: u64, label: &str, index: u64) -> Result<ConeMoments> {
    if !(alpha > 0.0 && alpha < std::f64::consts::FRAC_PI_2) {
        return Err(Error::invalid(format!("cone half-angle must lie in (0, pi/2), got {alpha}")));
    }
    let mut rng = trial_rng(seed, label, &[index]);
    let tan = alpha.tan();
    let mut kept = Vec::new();
    for _ in 0..draws {
        let (w1, w2) = (rng.normal(), rng.normal());
        if w1 >= 0.0 && w2.abs() <= w1 * tan {
            kept.push((w1, w2));
        }
    }
    if kept.len() < MIN_RETAINED {
        return Err(Error::InsufficientSamples { retained: kept.len(), required: MIN_RETAINED });
    }
    let m = kept.len() as f64;
    let mut s = Matrix::zeros(2, 2);
    for &(a, b) in &kept {
        s[(0, 0)] += a * a;
        s[(0, 1)] += a * b;
        s[(1, 1)] += b * b;
    }
    s[(1, 0)] = s[(0, 1)];
    s /= m;
    let (values, _) = sym_eig_desc(&s)?;
    let products: Vec<f64> = kept.iter().map(|&(a, b)| a * b).collect();
    Ok(ConeMoments {
        alpha,
        retained: kept.len(),
        lambda1: values[0],
        lambda2: values[1],
        cross: mean(&products),
        cross_stderr: stderr(&products),
    })
}

/// One row per half-angle: retained draws, eigenvalues, cross moment and
/// the exact diagonal moments for reference.
pub fn cone_conditioning(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let alphas = cfg.extra_reals("alpha")?;
    let draws = cfg.extra_count("draws")?;
    let mut table = ResultTable::new(
        &cfg.name,
        &["alpha", "retained", "lambda1", "lambda2", "cross", "cross_stderr", "ref_w1_sq", "ref_w2_sq"],
    );
    for (i, &alpha) in alphas.iter().enumerate() {
        let m = cone_moments(alpha, draws, cfg.seed, &cfg.name, i as u64)?;
        let (r1, r2) = cone_reference(alpha);
        table.push_row(vec![
            alpha.into(),
            m.retained.into(),
            m.lambda1.into(),
            m.lambda2.into(),
            m.cross.into(),
            m.cross_stderr.into(),
            r1.into(),
            r2.into(),
        ])?;
    }
    Ok(table)
}
