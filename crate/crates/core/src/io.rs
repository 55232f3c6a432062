//! System config files, time-series ingestion and estimation.
//!
//! Config schema (JSON, `type` tagged):
//!
//! ```json
//! {"type": "discrete", "n": 2, "probs": [/* 16 reals */]}
//! {"type": "discrete", "n": 2, "prior": [/* 4 */], "kernel": [[/* 4 */], /* x4 */]}
//! {"type": "gaussian", "n": 2, "sigma_x": [[..]], "a": [[..]], "sigma_e": [[..]]}
//! ```
//!
//! with optional `label` and `seed`. Cell index: bit `i` is `x_i`, bit
//! `n + j` is `y_j`. Matrices are row-major lists of rows.

use std::fs;
use std::path::Path;

use nalgebra::{Cholesky, DMatrix, DVector};
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::discrete::{joint_from_transition, DiscreteJoint, TransitionKernel, MAX_ELEMENTS};
use crate::error::{Error, Result};
use crate::gaussian::GaussianSystem;
use crate::random::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum SystemSpec {
    Discrete {
        n: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        probs: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        prior: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        kernel: Option<Vec<Vec<f64>>>,
    },
    Gaussian {
        n: usize,
        sigma_x: Vec<Vec<f64>>,
        a: Vec<Vec<f64>>,
        sigma_e: Vec<Vec<f64>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    #[serde(flatten)]
    pub system: SystemSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// A validated system ready for computation.
#[derive(Debug, Clone)]
pub enum System {
    Discrete(DiscreteJoint),
    Gaussian(GaussianSystem),
}

impl System {
    pub fn n(&self) -> usize {
        match self {
            System::Discrete(p) => p.n(),
            System::Gaussian(s) => s.n(),
        }
    }

    pub fn type_name(&self) -> &'static str {
        match self {
            System::Discrete(_) => "discrete",
            System::Gaussian(_) => "gaussian",
        }
    }
}

fn to_matrix(rows: &[Vec<f64>], n: usize, name: &str) -> Result<DMatrix<f64>> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(Error::BadMatrixShape(name.into()));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

fn to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

impl SystemConfig {
    pub fn from_discrete(p: &DiscreteJoint) -> Self {
        SystemConfig {
            system: SystemSpec::Discrete {
                n: p.n(),
                probs: Some(p.probs().to_vec()),
                prior: None,
                kernel: None,
            },
            label: None,
            seed: None,
        }
    }

    pub fn from_gaussian(sys: &GaussianSystem) -> Self {
        SystemConfig {
            system: SystemSpec::Gaussian {
                n: sys.n(),
                sigma_x: to_rows(sys.sigma_x()),
                a: to_rows(sys.a()),
                sigma_e: to_rows(sys.sigma_e()),
            },
            label: None,
            seed: None,
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn n(&self) -> usize {
        match self.system {
            SystemSpec::Discrete { n, .. } | SystemSpec::Gaussian { n, .. } => n,
        }
    }

    /// Validates the config and builds the system.
    pub fn build(&self) -> Result<System> {
        match &self.system {
            SystemSpec::Discrete {
                n,
                probs,
                prior,
                kernel,
            } => {
                let n = *n;
                if n == 0 || n > MAX_ELEMENTS {
                    return Err(Error::UnsupportedSize(n));
                }
                let joint = match (probs, prior, kernel) {
                    (Some(probs), None, None) => {
                        let sum: f64 = probs.iter().sum();
                        if (sum - 1.0).abs() > 1e-12 && (sum - 1.0).abs() <= 1e-9 {
                            log::warn!("probs sum to {sum}; renormalizing");
                        }
                        DiscreteJoint::new(n, probs.clone())?
                    }
                    (None, Some(prior), Some(kernel)) => {
                        joint_from_transition(prior, &TransitionKernel::new(n, kernel.clone())?)?
                    }
                    _ => {
                        return Err(Error::Schema(
                            "discrete config needs exactly one of `probs` or `prior` + `kernel`"
                                .into(),
                        ))
                    }
                };
                Ok(System::Discrete(joint))
            }
            SystemSpec::Gaussian {
                n,
                sigma_x,
                a,
                sigma_e,
            } => {
                if *n == 0 {
                    return Err(Error::UnsupportedSize(0));
                }
                Ok(System::Gaussian(GaussianSystem::new(
                    to_matrix(sigma_x, *n, "sigma_x")?,
                    to_matrix(a, *n, "a")?,
                    to_matrix(sigma_e, *n, "sigma_e")?,
                )?))
            }
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }
}

/// Parses a config from JSON text and validates it. Type-level schema
/// violations map to `E_SCHEMA`, malformed JSON to `E_PARSE`.
pub fn parse_system(text: &str) -> Result<SystemConfig> {
    let cfg: SystemConfig = serde_json::from_str(text).map_err(|e| match e.classify() {
        serde_json::error::Category::Data => Error::Schema(e.to_string()),
        _ => Error::Json(e),
    })?;
    cfg.build()?;
    Ok(cfg)
}

pub fn load_system(path: impl AsRef<Path>) -> Result<SystemConfig> {
    parse_system(&fs::read_to_string(path)?)
}

pub fn save_system(path: impl AsRef<Path>, cfg: &SystemConfig) -> Result<()> {
    fs::write(path, cfg.to_json())?;
    Ok(())
}

/// Observations of `n` channels over `T` time steps.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub names: Vec<String>,
    /// `T x n`, one row per time step.
    pub data: DMatrix<f64>,
    /// Sampling step; informational only.
    pub step: Option<f64>,
}

impl TimeSeries {
    pub fn new(names: Vec<String>, data: DMatrix<f64>) -> Result<Self> {
        if names.len() != data.ncols() {
            return Err(Error::DimensionMismatch {
                expected: data.ncols(),
                found: names.len(),
            });
        }
        if data.nrows() < 2 {
            return Err(Error::InsufficientData {
                len: data.nrows(),
                needed: 2,
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("time series".into()));
        }
        Ok(TimeSeries {
            names,
            data,
            step: None,
        })
    }

    pub fn len(&self) -> usize {
        self.data.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.data.nrows() == 0
    }

    pub fn channels(&self) -> usize {
        self.data.ncols()
    }
}

/// Reads a CSV with a header row of channel names and one row per step.
pub fn read_timeseries(path: impl AsRef<Path>) -> Result<TimeSeries> {
    let mut reader = csv::Reader::from_path(path)?;
    parse_timeseries(&mut reader)
}

pub fn parse_timeseries_str(text: &str) -> Result<TimeSeries> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    parse_timeseries(&mut reader)
}

fn parse_timeseries<R: std::io::Read>(reader: &mut csv::Reader<R>) -> Result<TimeSeries> {
    let names: Vec<String> = reader
        .headers()?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    let mut values = Vec::new();
    let mut rows = 0;
    for record in reader.records() {
        let record = record?;
        for field in record.iter() {
            let v: f64 = field.trim().parse().map_err(|_| {
                Error::Schema(format!("row {}: `{field}` is not a number", rows + 1))
            })?;
            values.push(v);
        }
        rows += 1;
    }
    let data = DMatrix::from_row_slice(rows, names.len(), &values);
    TimeSeries::new(names, data)
}

pub fn write_timeseries(path: impl AsRef<Path>, ts: &TimeSeries) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(&ts.names)?;
    for r in 0..ts.len() {
        w.write_record(ts.data.row(r).iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// Least-squares fit of `x_{t+1} = A x_t + e` with its diagnostics.
#[derive(Debug, Clone)]
pub struct ArFit {
    pub system: GaussianSystem,
    /// Diagonal of the residual covariance.
    pub residual_variances: Vec<f64>,
    /// Number of `(x_t, x_{t+1})` pairs used.
    pub pairs: usize,
}

/// Regresses `x_{t+1}` on `x_t` after subtracting means. `Sigma_X` is the
/// covariance of the regressors and `Sigma_E` the residual covariance, both
/// with denominator `T - 1` (the number of pairs).
pub fn fit_ar(ts: &TimeSeries) -> Result<ArFit> {
    let n = ts.channels();
    let t = ts.len();
    if t < 10 * n {
        return Err(Error::InsufficientData {
            len: t,
            needed: 10 * n,
        });
    }
    let m = t - 1;
    let center = |block: DMatrix<f64>| {
        let mean = block.row_mean();
        let mut c = block;
        for mut row in c.row_iter_mut() {
            row -= &mean;
        }
        c
    };
    let x = center(ts.data.rows(0, m).into_owned());
    let y = center(ts.data.rows(1, m).into_owned());
    let c0 = x.transpose() * &x / m as f64;
    let c1 = y.transpose() * &x / m as f64;
    let scale = c0.diagonal().amax();
    let min_eig = c0.clone().symmetric_eigen().eigenvalues.min();
    if !(scale > 0.0) || min_eig <= 1e-12 * scale {
        return Err(Error::RankDeficient);
    }
    let chol = Cholesky::new(c0.clone()).ok_or(Error::RankDeficient)?;
    // A C0 = C1  =>  C0 A' = C1'.
    let a = chol.solve(&c1.transpose()).transpose();
    let resid = &y - &x * a.transpose();
    let sigma_e = resid.transpose() * &resid / m as f64;
    let sym = |s: DMatrix<f64>| (&s + s.transpose()) * 0.5;
    let sigma_e = sym(sigma_e);
    let residual_variances = sigma_e.diagonal().iter().copied().collect();
    let system = GaussianSystem::new(sym(c0), a, sigma_e).map_err(|e| match e {
        Error::NotPositiveDefinite(_) => Error::RankDeficient,
        other => other,
    })?;
    Ok(ArFit {
        system,
        residual_variances,
        pairs: m,
    })
}

/// Simulates `x_{t+1} = A x_t + e_t`, `e_t ~ N(0, Sigma_E)`, from `x_0 = 0`
/// with `burn_in` discarded steps.
pub fn simulate_ar(
    a: &DMatrix<f64>,
    sigma_e: &DMatrix<f64>,
    len: usize,
    burn_in: usize,
    seed: u64,
) -> Result<TimeSeries> {
    let n = a.nrows();
    let l = Cholesky::new(sigma_e.clone())
        .ok_or_else(|| Error::NotPositiveDefinite("sigma_e".into()))?
        .l();
    let mut r = rng(seed);
    let mut x = DVector::zeros(n);
    let mut data = DMatrix::zeros(len, n);
    for step in 0..burn_in + len {
        if step >= burn_in {
            data.set_row(step - burn_in, &x.transpose());
        }
        let z = DVector::from_fn(n, |_, _| -> f64 { StandardNormal.sample(&mut r) });
        x = a * x + &l * z;
    }
    TimeSeries::new((1..=n).map(|i| format!("x{i}")).collect(), data)
}

/// Frequency table from paired states `(x, y)`, each packed as `n` bits,
/// with `alpha` pseudo-counts added to every cell.
pub fn empirical_joint(n: usize, samples: &[(usize, usize)], alpha: f64) -> Result<DiscreteJoint> {
    if n == 0 || n > MAX_ELEMENTS {
        return Err(Error::UnsupportedSize(n));
    }
    if samples.is_empty() {
        return Err(Error::InsufficientData { len: 0, needed: 1 });
    }
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::NonFinite("alpha".into()));
    }
    let states = 1usize << n;
    let mut counts = vec![alpha; states * states];
    for &(x, y) in samples {
        for s in [x, y] {
            if s >= states {
                return Err(Error::StateOutOfRange { state: s, n });
            }
        }
        counts[x | y << n] += 1.0;
    }
    DiscreteJoint::from_weights(n, counts)
}
