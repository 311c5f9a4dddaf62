//! Multivariate normal distributions over encoded poses (dimension 6 or 7).

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported dimension.
pub const MAX_DIM: usize = 7;

const RIDGE_RELATIVE: f64 = 1e-6;
const RIDGE_FLOOR: f64 = 1e-12;

/// How the covariance is estimated from few samples.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CovarianceEstimator {
    /// Sample covariance plus the relative ridge only.
    Ridge,
    /// Sample correlations shrunk toward zero with the data-driven intensity of
    /// Schäfer and Strimmer (diagonal target), then the relative ridge. With five
    /// samples in six or seven dimensions the plain estimate is rank deficient.
    #[default]
    Shrinkage,
}

/// A multivariate normal with a cached Cholesky factor.
#[derive(Clone, Debug)]
pub struct GaussianModel {
    mean: Vec<f64>,
    covariance: DMatrix<f64>,
    ridge: f64,
    shrinkage: f64,
    /// Row-major lower Cholesky factor, `MAX_DIM` stride.
    chol: [f64; MAX_DIM * MAX_DIM],
    log_det: f64,
}

impl PartialEq for GaussianModel {
    fn eq(&self, other: &Self) -> bool {
        self.mean == other.mean
            && self.covariance == other.covariance
            && self.ridge == other.ridge
            && self.shrinkage == other.shrinkage
    }
}

impl GaussianModel {
    /// Builds a model from a mean and a symmetric positive-definite covariance.
    pub fn new(mean: Vec<f64>, covariance: DMatrix<f64>) -> Result<Self> {
        Self::with_meta(mean, covariance, 0.0, 0.0)
    }

    fn with_meta(mean: Vec<f64>, covariance: DMatrix<f64>, ridge: f64, shrinkage: f64) -> Result<Self> {
        let k = mean.len();
        if k == 0 || k > MAX_DIM {
            return Err(Error::InvalidInput(format!("unsupported dimension {k}")));
        }
        if covariance.nrows() != k || covariance.ncols() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                found: covariance.nrows(),
            });
        }
        let sym = (&covariance + covariance.transpose()) * 0.5;
        let chol = sym
            .clone()
            .cholesky()
            .ok_or_else(|| Error::InvalidInput("covariance is not positive definite".into()))?;
        let l = chol.l();
        let mut packed = [0.0; MAX_DIM * MAX_DIM];
        let mut log_det = 0.0;
        for i in 0..k {
            for j in 0..=i {
                packed[i * MAX_DIM + j] = l[(i, j)];
            }
            log_det += 2.0 * l[(i, i)].ln();
        }
        Ok(Self {
            mean,
            covariance: sym,
            ridge,
            shrinkage,
            chol: packed,
            log_det,
        })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.covariance
    }

    /// Diagonal regularization that was added to the covariance.
    pub fn ridge(&self) -> f64 {
        self.ridge
    }

    /// Correlation shrinkage intensity used at fit time (0 for the ridge-only estimator).
    pub fn shrinkage(&self) -> f64 {
        self.shrinkage
    }

    pub fn log_det(&self) -> f64 {
        self.log_det
    }

    /// Squared Mahalanobis distance; `v` must have `dim()` entries.
    pub(crate) fn mahalanobis_sq(&self, v: &[f64]) -> f64 {
        let k = self.dim();
        let mut z = [0.0; MAX_DIM];
        let mut acc = 0.0;
        for i in 0..k {
            let row = &self.chol[i * MAX_DIM..i * MAX_DIM + i + 1];
            let mut s = v[i] - self.mean[i];
            for j in 0..i {
                s -= row[j] * z[j];
            }
            z[i] = s / row[i];
            acc += z[i] * z[i];
        }
        acc
    }

    pub(crate) fn log_density_unchecked(&self, v: &[f64]) -> f64 {
        let k = self.dim() as f64;
        -0.5 * (self.mahalanobis_sq(v) + k * (2.0 * PI).ln() + self.log_det)
    }

    pub fn log_density(&self, v: &[f64]) -> Result<f64> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: v.len(),
            });
        }
        Ok(self.log_density_unchecked(v))
    }

    /// Differential entropy in nats, `0.5 * ln((2 pi e)^k det Sigma)`.
    pub fn entropy(&self) -> f64 {
        let k = self.dim() as f64;
        0.5 * (k * (2.0 * PI * std::f64::consts::E).ln() + self.log_det)
    }

    /// Entropy per dimension, comparable across dimensions.
    pub fn entropy_per_dim(&self) -> f64 {
        self.entropy() / self.dim() as f64
    }

    /// Draws one sample into `out[..dim()]`.
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64; MAX_DIM]) {
        let k = self.dim();
        let mut z = [0.0; MAX_DIM];
        for zi in z.iter_mut().take(k) {
            *zi = rng.sample(StandardNormal);
        }
        for i in 0..k {
            let row = &self.chol[i * MAX_DIM..i * MAX_DIM + i + 1];
            let mut s = self.mean[i];
            for j in 0..=i {
                s += row[j] * z[j];
            }
            out[i] = s;
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let mut buf = [0.0; MAX_DIM];
        self.sample_into(rng, &mut buf);
        buf[..self.dim()].to_vec()
    }
}

/// Fits mean and regularized sample covariance (denominator `n - 1`) with the
/// ridge-only estimator.
pub fn fit_gaussian<S: AsRef<[f64]>>(samples: &[S]) -> Result<GaussianModel> {
    fit_gaussian_with(samples, CovarianceEstimator::Ridge)
}

pub fn fit_gaussian_with<S: AsRef<[f64]>>(samples: &[S], estimator: CovarianceEstimator) -> Result<GaussianModel> {
    let n = samples.len();
    if n < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 samples, got {n}")));
    }
    let k = samples[0].as_ref().len();
    if k == 0 || k > MAX_DIM {
        return Err(Error::InvalidInput(format!("unsupported dimension {k}")));
    }
    let mut data = DMatrix::zeros(n, k);
    for (r, s) in samples.iter().enumerate() {
        let s = s.as_ref();
        if s.len() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                found: s.len(),
            });
        }
        for (c, x) in s.iter().enumerate() {
            data[(r, c)] = *x;
        }
    }
    let mean: DVector<f64> = data.row_mean().transpose();
    let centered = DMatrix::from_fn(n, k, |r, c| data[(r, c)] - mean[c]);
    let mut cov = centered.transpose() * &centered / (n as f64 - 1.0);

    let shrinkage = match estimator {
        CovarianceEstimator::Ridge => 0.0,
        CovarianceEstimator::Shrinkage => {
            let lambda = correlation_shrinkage(&centered, &cov);
            for i in 0..k {
                for j in 0..k {
                    if i != j {
                        cov[(i, j)] *= 1.0 - lambda;
                    }
                }
            }
            lambda
        }
    };

    let ridge = (RIDGE_RELATIVE * cov.trace() / k as f64).max(RIDGE_FLOOR);
    for i in 0..k {
        cov[(i, i)] += ridge;
    }
    GaussianModel::with_meta(mean.iter().copied().collect(), cov, ridge, shrinkage)
}

/// Optimal shrinkage intensity of the correlation matrix toward the identity
/// (Schäfer & Strimmer 2005, target "D"). Coordinates with zero variance are ignored.
fn correlation_shrinkage(centered: &DMatrix<f64>, cov: &DMatrix<f64>) -> f64 {
    let n = centered.nrows();
    let k = centered.ncols();
    let nf = n as f64;
    let sd: Vec<f64> = (0..k).map(|i| cov[(i, i)].sqrt()).collect();
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..k {
        for j in 0..k {
            if i == j || sd[i] <= 0.0 || sd[j] <= 0.0 {
                continue;
            }
            let w: Vec<f64> = (0..n)
                .map(|r| centered[(r, i)] / sd[i] * centered[(r, j)] / sd[j])
                .collect();
            let w_mean = w.iter().sum::<f64>() / nf;
            let r_ij = nf / (nf - 1.0) * w_mean;
            let var_r = nf / (nf - 1.0).powi(3) * w.iter().map(|x| (x - w_mean).powi(2)).sum::<f64>();
            num += var_r;
            den += r_ij * r_ij;
        }
    }
    if den <= 0.0 {
        return 1.0;
    }
    (num / den).clamp(0.0, 1.0)
}

#[derive(Serialize, Deserialize)]
struct GaussianRepr {
    mean: Vec<f64>,
    /// Row-major.
    covariance: Vec<f64>,
    ridge: f64,
    #[serde(default)]
    shrinkage: f64,
}

impl Serialize for GaussianModel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let k = self.dim();
        let mut flat = Vec::with_capacity(k * k);
        for i in 0..k {
            for j in 0..k {
                flat.push(self.covariance[(i, j)]);
            }
        }
        GaussianRepr {
            mean: self.mean.clone(),
            covariance: flat,
            ridge: self.ridge,
            shrinkage: self.shrinkage,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GaussianModel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = GaussianRepr::deserialize(d)?;
        let k = repr.mean.len();
        if repr.covariance.len() != k * k {
            return Err(serde::de::Error::custom(format!(
                "covariance has {} entries, expected {}",
                repr.covariance.len(),
                k * k
            )));
        }
        let cov = DMatrix::from_row_slice(k, k, &repr.covariance);
        GaussianModel::with_meta(repr.mean, cov, repr.ridge, repr.shrinkage).map_err(serde::de::Error::custom)
    }
}
