use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::covariates::CovariateDist;
use crate::numerics::format_f64;
use crate::{Error, Result};

/// Parameters of one experiment run.
///
/// List-valued keys (`d`, `n`, `sigma`) accept comma-separated values; each
/// experiment documents which entries it reads. Experiment-specific knobs
/// live in `extras` and are validated against the experiment's allowed set.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub k: usize,
    pub d: Vec<usize>,
    pub n: Vec<usize>,
    pub sigma: Vec<f64>,
    /// AM iterations `T`.
    pub iterations: usize,
    pub dist: CovariateDist,
    pub trials: usize,
    pub seed: u64,
    pub extras: BTreeMap<String, String>,
}

const CORE_KEYS: [&str; 9] = ["name", "k", "d", "n", "sigma", "T", "dist", "trials", "seed"];

impl ExperimentConfig {
    /// Defaults for `name` with the given extras, before any overrides.
    pub(crate) fn with_defaults(name: &str, extras: &[(&str, &str)]) -> Self {
        Self {
            name: name.to_string(),
            k: 3,
            d: vec![10],
            n: Vec::new(),
            sigma: vec![0.0],
            iterations: 50,
            dist: CovariateDist::Gaussian,
            trials: 20,
            seed: 0,
            extras: extras.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
        }
    }

    /// Applies one `key=value` override. Extras must already be present in
    /// the map (their defaults define the allowed set).
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        let bad = |e: String| Error::Config(format!("key `{key}`: {e}"));
        match key {
            "name" => {
                if value != self.name {
                    return Err(Error::Config(format!(
                        "config is for experiment `{value}`, running `{}`",
                        self.name
                    )));
                }
            }
            "k" => self.k = parse_count(value).map_err(bad)?,
            "d" => self.d = parse_list(value, parse_count).map_err(bad)?,
            "n" => self.n = parse_list(value, parse_count).map_err(bad)?,
            "sigma" => self.sigma = parse_list(value, parse_sigma).map_err(bad)?,
            "T" => self.iterations = parse_count(value).map_err(bad)?,
            "dist" => self.dist = CovariateDist::from_str(value).map_err(|e| bad(e.to_string()))?,
            "trials" => self.trials = parse_count(value).map_err(bad)?,
            "seed" => {
                self.seed = value
                    .parse()
                    .map_err(|_| bad(format!("expected a 64-bit unsigned integer, got `{value}`")))?
            }
            _ => match self.extras.get_mut(key) {
                Some(slot) => *slot = value.to_string(),
                None => {
                    let mut allowed: Vec<&str> = CORE_KEYS.to_vec();
                    allowed.extend(self.extras.keys().map(String::as_str));
                    return Err(Error::Config(format!(
                        "unknown key `{key}` for experiment `{}` (allowed: {})",
                        self.name,
                        allowed.join(", ")
                    )));
                }
            },
        }
        Ok(())
    }

    /// Applies every `key=value` line of `text`. Blank lines and `#`
    /// comments are skipped; a key may appear only once.
    pub fn apply_str(&mut self, text: &str) -> Result<()> {
        let mut seen = std::collections::HashSet::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(i) => &raw[..i],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected key=value, got `{line}`", lineno + 1))
            })?;
            let key = key.trim();
            if !seen.insert(key.to_string()) {
                return Err(Error::Config(format!("line {}: duplicate key `{key}`", lineno + 1)));
            }
            self.set(key, value)
                .map_err(|e| Error::Config(format!("line {}: {}", lineno + 1, strip_prefix(e))))?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: impl AsRef<Path>) -> Result<()> {
        let text = std::fs::read_to_string(path.as_ref()).map_err(|e| {
            Error::Config(format!("cannot read {}: {e}", path.as_ref().display()))
        })?;
        self.apply_str(&text)
    }

    /// Every key with its current value, core keys first, in a stable order.
    pub fn pairs(&self) -> Vec<(String, String)> {
        let join = |v: Vec<String>| v.join(",");
        let mut out = vec![
            ("name".to_string(), self.name.clone()),
            ("k".to_string(), self.k.to_string()),
            ("d".to_string(), join(self.d.iter().map(|v| v.to_string()).collect())),
            ("n".to_string(), join(self.n.iter().map(|v| v.to_string()).collect())),
            ("sigma".to_string(), join(self.sigma.iter().map(|&v| format_f64(v)).collect())),
            ("T".to_string(), self.iterations.to_string()),
            ("dist".to_string(), self.dist.name().to_string()),
            ("trials".to_string(), self.trials.to_string()),
            ("seed".to_string(), self.seed.to_string()),
        ];
        out.extend(self.extras.iter().map(|(k, v)| (k.clone(), v.clone())));
        out
    }

    pub fn extra(&self, key: &str) -> Result<&str> {
        self.extras
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| Error::Config(format!("experiment `{}` has no key `{key}`", self.name)))
    }

    pub fn extra_f64(&self, key: &str) -> Result<f64> {
        parse_real(self.extra(key)?).map_err(|e| Error::Config(format!("key `{key}`: {e}")))
    }

    pub fn extra_count(&self, key: &str) -> Result<usize> {
        parse_count(self.extra(key)?).map_err(|e| Error::Config(format!("key `{key}`: {e}")))
    }

    pub fn extra_reals(&self, key: &str) -> Result<Vec<f64>> {
        parse_list(self.extra(key)?, parse_real).map_err(|e| Error::Config(format!("key `{key}`: {e}")))
    }

    pub fn extra_counts(&self, key: &str) -> Result<Vec<usize>> {
        parse_list(self.extra(key)?, parse_count).map_err(|e| Error::Config(format!("key `{key}`: {e}")))
    }

    pub fn single_n(&self) -> Result<usize> {
        match self.n.as_slice() {
            [n] => Ok(*n),
            _ => Err(Error::Config(format!("experiment `{}` needs exactly one n", self.name))),
        }
    }

    pub fn single_d(&self) -> Result<usize> {
        match self.d.as_slice() {
            [d] => Ok(*d),
            _ => Err(Error::Config(format!("experiment `{}` needs exactly one d", self.name))),
        }
    }

    pub fn single_sigma(&self) -> Result<f64> {
        match self.sigma.as_slice() {
            [s] => Ok(*s),
            _ => Err(Error::Config(format!("experiment `{}` needs exactly one sigma", self.name))),
        }
    }
}

fn strip_prefix(e: Error) -> String {
    match e {
        Error::Config(msg) => msg,
        other => other.to_string(),
    }
}

fn parse_count(s: &str) -> std::result::Result<usize, String> {
    match s.trim().parse::<usize>() {
        Ok(v) if v >= 1 => Ok(v),
        _ => Err(format!("expected a positive integer, got `{}`", s.trim())),
    }
}

fn parse_sigma(s: &str) -> std::result::Result<f64, String> {
    let v = parse_real(s)?;
    if v < 0.0 {
        return Err(format!("noise level must be >= 0, got {v}"));
    }
    Ok(v)
}

/// A finite real, also accepting `pi`, `pi/q`, `p*pi` and `p*pi/q`.
pub fn parse_real(s: &str) -> std::result::Result<f64, String> {
    let s = s.trim();
    let err = || format!("expected a real number, got `{s}`");
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), Some(b.trim().parse::<f64>().map_err(|_| err())?)),
        None => (s, None),
    };
    let num = if num == "pi" {
        std::f64::consts::PI
    } else if let Some(p) = num.strip_suffix("*pi") {
        p.trim().parse::<f64>().map_err(|_| err())? * std::f64::consts::PI
    } else {
        num.parse::<f64>().map_err(|_| err())?
    };
    let v = match den {
        Some(q) => num / q,
        None => num,
    };
    if !v.is_finite() {
        return Err(err());
    }
    Ok(v)
}

fn parse_list<T>(
    s: &str,
    item: impl Fn(&str) -> std::result::Result<T, String>,
) -> std::result::Result<Vec<T>, String> {
    let items: Vec<T> = s
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(item)
        .collect::<std::result::Result<_, _>>()?;
    if items.is_empty() {
        return Err("expected at least one value".into());
    }
    Ok(items)
}
