//! Covariate laws, synthetic datasets for the max-affine and phase-retrieval
//! models, and dataset CSV I/O.

use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use crate::model::{append_ones, eval_max_affine, AffineParam, ParamSet};
use crate::numerics::{all_finite, format_f64, Matrix, RngStream, Vector};
use crate::{Error, Result};

/// Coordinate law of an isotropic product covariate distribution. Every kind
/// has mean 0 and variance 1 per coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CovariateDist {
    /// `N(0, 1)`.
    Gaussian,
    /// `Unif[-sqrt(3), sqrt(3)]`.
    UniformCube,
    /// `+1` or `-1` with equal probability.
    Rademacher,
    /// `(Bin(10, 0.4) - 4) / sqrt(2.4)`.
    CenteredBinomial,
}

impl CovariateDist {
    pub const ALL: [CovariateDist; 4] = [
        CovariateDist::Gaussian,
        CovariateDist::UniformCube,
        CovariateDist::Rademacher,
        CovariateDist::CenteredBinomial,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CovariateDist::Gaussian => "gaussian",
            CovariateDist::UniformCube => "uniform_cube",
            CovariateDist::Rademacher => "rademacher",
            CovariateDist::CenteredBinomial => "centered_binomial",
        }
    }

    pub fn sample(self, rng: &mut RngStream) -> f64 {
        match self {
            CovariateDist::Gaussian => rng.normal(),
            CovariateDist::UniformCube => 3f64.sqrt() * (2.0 * rng.uniform() - 1.0),
            CovariateDist::Rademacher => {
                if rng.uniform() < 0.5 {
                    -1.0
                } else {
                    1.0
                }
            }
            CovariateDist::CenteredBinomial => {
                let successes = (0..10).filter(|_| rng.uniform() < 0.4).count();
                (successes as f64 - 4.0) / 2.4f64.sqrt()
            }
        }
    }
}

impl fmt::Display for CovariateDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CovariateDist {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gaussian" | "normal" => Ok(CovariateDist::Gaussian),
            "uniform_cube" | "uniform" => Ok(CovariateDist::UniformCube),
            "rademacher" => Ok(CovariateDist::Rademacher),
            "centered_binomial" | "binomial" => Ok(CovariateDist::CenteredBinomial),
            other => Err(Error::Parse(format!("unknown covariate distribution `{other}`"))),
        }
    }
}

/// `n x d` matrix of i.i.d. draws, filled row by row.
pub fn sample_covariates(dist: CovariateDist, n: usize, d: usize, rng: &mut RngStream) -> Matrix {
    let draws: Vec<f64> = (0..n * d).map(|_| dist.sample(rng)).collect();
    Matrix::from_row_slice(n, d, &draws)
}

/// Samples with covariates `x`, appended design `xi = [x, 1]` and responses `y`.
#[derive(Clone, Debug)]
pub struct Dataset {
    pub x: Matrix,
    pub xi: Matrix,
    pub y: Vector,
    pub sigma: f64,
    pub truth: Option<ParamSet>,
}

impl Dataset {
    pub fn new(x: Matrix, y: Vector) -> Result<Self> {
        if x.nrows() == 0 || x.ncols() == 0 {
            return Err(Error::invalid("dataset needs at least one sample and one covariate"));
        }
        if x.nrows() != y.len() {
            return Err(Error::invalid(format!(
                "{} covariate rows but {} responses",
                x.nrows(),
                y.len()
            )));
        }
        if !all_finite(x.iter()) || !all_finite(y.iter()) {
            return Err(Error::invalid("dataset contains a non-finite value"));
        }
        let xi = append_ones(&x);
        Ok(Self { x, xi, y, sigma: 0.0, truth: None })
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn d(&self) -> usize {
        self.x.ncols()
    }

    /// Rows `[start, start + len)` as a new dataset.
    pub fn rows(&self, start: usize, len: usize) -> Dataset {
        Dataset {
            x: self.x.rows(start, len).into_owned(),
            xi: self.xi.rows(start, len).into_owned(),
            y: self.y.rows(start, len).into_owned(),
            sigma: self.sigma,
            truth: self.truth.clone(),
        }
    }

    /// CSV with header `x1,...,xd,y`, floats at 17 significant digits.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let header = (1..=self.d()).map(|j| format!("x{j}")).chain(["y".to_string()]);
        w.write_record(header).map_err(csv_error)?;
        for i in 0..self.n() {
            let row = self.x.row(i);
            let fields = row.iter().chain(std::iter::once(&self.y[i])).map(|&v| format_f64(v));
            w.write_record(fields).map_err(csv_error)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_csv(std::io::BufWriter::new(file))
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Dataset> {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
        let header = reader.headers().map_err(csv_error)?.clone();
        let d = header.len().saturating_sub(1);
        let expected = (1..=d).map(|j| format!("x{j}")).chain(["y".to_string()]);
        if d == 0 || !header.iter().eq(expected.collect::<Vec<_>>().iter().map(String::as_str)) {
            let got: Vec<&str> = header.iter().collect();
            return Err(Error::Parse(format!("bad dataset header `{}`, expected x1,...,xd,y", got.join(","))));
        }
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for record in reader.records() {
            let record = record.map_err(csv_error)?;
            let line = record.position().map_or(0, |p| p.line());
            let vals = record
                .iter()
                .map(str::parse::<f64>)
                .collect::<std::result::Result<Vec<f64>, _>>()
                .map_err(|e| Error::Parse(format!("line {line}: {e}")))?;
            xs.extend_from_slice(&vals[..d]);
            ys.push(vals[d]);
        }
        let n = ys.len();
        Dataset::new(Matrix::from_row_slice(n, d, &xs), Vector::from_vec(ys))
    }

    pub fn load_csv(path: impl AsRef<Path>) -> Result<Dataset> {
        let file = std::fs::File::open(path)?;
        Dataset::read_csv(std::io::BufReader::new(file))
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

fn check_sigma(sigma: f64) -> Result<()> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::invalid(format!("noise level must be finite and >= 0, got {sigma}")));
    }
    Ok(())
}

/// Draws `n` samples of `y = max_j <xi, beta_j> + N(0, sigma^2)`.
///
/// Covariates are drawn first (row by row), then the noise.
pub fn synthesize(
    ps: &ParamSet,
    dist: CovariateDist,
    n: usize,
    sigma: f64,
    rng: &mut RngStream,
) -> Result<Dataset> {
    check_sigma(sigma)?;
    if n == 0 {
        return Err(Error::invalid("need at least one sample"));
    }
    let x = sample_covariates(dist, n, ps.dim(), rng);
    let xi = append_ones(&x);
    let mut y = Vector::zeros(n);
    for i in 0..n {
        y[i] = eval_max_affine(ps, &xi.row(i).transpose())?;
    }
    if sigma > 0.0 {
        for v in y.iter_mut() {
            *v += sigma * rng.normal();
        }
    }
    Ok(Dataset { x, xi, y, sigma, truth: Some(ps.clone()) })
}

/// Draws `n` samples of `y = |<x, theta_star>| + N(0, sigma^2)`. The truth is
/// recorded as the single piece `(theta_star, 0)`.
pub fn synthesize_pr(
    theta_star: &Vector,
    dist: CovariateDist,
    n: usize,
    sigma: f64,
    rng: &mut RngStream,
) -> Result<Dataset> {
    check_sigma(sigma)?;
    if n == 0 || theta_star.is_empty() {
        return Err(Error::invalid("need at least one sample and one coordinate"));
    }
    let x = sample_covariates(dist, n, theta_star.len(), rng);
    let mut y = &x * theta_star;
    y.apply(|v| *v = v.abs());
    if sigma > 0.0 {
        for v in y.iter_mut() {
            *v += sigma * rng.normal();
        }
    }
    let truth = ParamSet::new(vec![AffineParam::new(theta_star.clone(), 0.0)])?;
    Ok(Dataset { xi: append_ones(&x), x, y, sigma, truth: Some(truth) })
}
