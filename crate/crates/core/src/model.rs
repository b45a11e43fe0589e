//! Calibration fit, the parameter bundle of calibrated measurements and the
//! closed-form mean/covariance algebra.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{invalid, Error, Result};

/// Paired calibration readings: instrument readings `x` against reference
/// measurements `u`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CalibrationData {
    x: Vec<f64>,
    u: Vec<f64>,
}

impl CalibrationData {
    pub fn new(x: Vec<f64>, u: Vec<f64>) -> Result<Self> {
        if x.len() != u.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                found: u.len(),
            });
        }
        if let Some(i) = x.iter().chain(u.iter()).position(|v| !v.is_finite()) {
            return Err(invalid(format!(
                "non-finite calibration entry at position {}",
                i % x.len().max(1)
            )));
        }
        Ok(Self { x, u })
    }

    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(
            pairs.iter().map(|p| p.0).collect(),
            pairs.iter().map(|p| p.1).collect(),
        )
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }
}

/// Least-squares calibration line fitted on centered readings.
///
/// New readings `z` are projected as `beta0_hat + beta1_hat * (z - xbar)`, so
/// the intercept and slope estimators are uncorrelated.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CalibrationFit {
    pub beta0_hat: f64,
    pub beta1_hat: f64,
    pub sigma_u_hat: f64,
    /// Standard deviation of the intercept estimator, `σ_U / sqrt(n0)`.
    pub sigma0: f64,
    /// Standard deviation of the slope estimator, `σ_U / sqrt(S_xx)`.
    pub sigma1: f64,
    pub sxx: f64,
    pub n0: usize,
    pub xbar: f64,
}

impl CalibrationFit {
    pub fn project(&self, z: f64) -> f64 {
        self.beta0_hat + self.beta1_hat * (z - self.xbar)
    }

    /// Parameters for `n` new readings with raw mean `mu_z`, treating the
    /// fitted line as the truth and its standard errors as the estimator
    /// spread.
    pub fn mixture_params(&self, n: usize, mu_z: f64, sigma_z: f64) -> Result<MixtureParams> {
        MixtureParams::new(
            n,
            self.beta0_hat,
            self.sigma0,
            mu_z - self.xbar,
            sigma_z,
            self.beta1_hat,
            self.sigma1,
        )
    }
}

/// Fits `u = b0 + b1 (x - xbar)` by least squares.
pub fn fit_calibration(data: &CalibrationData) -> Result<CalibrationFit> {
    let n0 = data.len();
    if n0 < 3 {
        return Err(Error::Degenerate(format!(
            "calibration needs at least 3 pairs for a residual variance, got {n0}"
        )));
    }
    let nf = n0 as f64;
    let xbar = data.x.iter().sum::<f64>() / nf;
    let ubar = data.u.iter().sum::<f64>() / nf;
    let (mut sxx, mut sxu, mut suu) = (0.0, 0.0, 0.0);
    for (&x, &u) in data.x.iter().zip(&data.u) {
        let dx = x - xbar;
        let du = u - ubar;
        sxx += dx * dx;
        sxu += dx * du;
        suu += du * du;
    }
    if sxx <= 0.0 {
        return Err(Error::Degenerate(
            "all calibration readings x are equal".into(),
        ));
    }
    let beta1_hat = sxu / sxx;
    let sse = (suu - beta1_hat * sxu).max(0.0);
    let sigma_u_hat = (sse / (nf - 2.0)).sqrt();
    Ok(CalibrationFit {
        beta0_hat: ubar,
        beta1_hat,
        sigma_u_hat,
        sigma0: sigma_u_hat / nf.sqrt(),
        sigma1: sigma_u_hat / sxx.sqrt(),
        sxx,
        n0,
        xbar,
    })
}

/// The parameter bundle `{n, β0, σ0, μ_Z, σ_Z, β1, σ1}` behind every mixture law.
///
/// `known_coefficients` marks the ideal case where the line is known exactly
/// (`σ0 = σ1 = 0`); build it with [`MixtureParams::known_coefficients`].
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct MixtureParams {
    pub n: usize,
    pub beta0: f64,
    pub sigma0: f64,
    pub mu_z: f64,
    pub sigma_z: f64,
    pub beta1: f64,
    pub sigma1: f64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub known_coefficients: bool,
}

impl MixtureParams {
    pub fn new(
        n: usize,
        beta0: f64,
        sigma0: f64,
        mu_z: f64,
        sigma_z: f64,
        beta1: f64,
        sigma1: f64,
    ) -> Result<Self> {
        let p = Self {
            n,
            beta0,
            sigma0,
            mu_z,
            sigma_z,
            beta1,
            sigma1,
            known_coefficients: false,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn known_coefficients(
        n: usize,
        beta0: f64,
        mu_z: f64,
        sigma_z: f64,
        beta1: f64,
    ) -> Result<Self> {
        let p = Self {
            n,
            beta0,
            sigma0: 0.0,
            mu_z,
            sigma_z,
            beta1,
            sigma1: 0.0,
            known_coefficients: true,
        };
        p.validate()?;
        Ok(p)
    }

    /// Unit parameters `n = 10`, every other entry 1, with `μ_Z` as given.
    pub fn unit(mu_z: f64) -> Self {
        Self {
            n: 10,
            beta0: 1.0,
            sigma0: 1.0,
            mu_z,
            sigma_z: 1.0,
            beta1: 1.0,
            sigma1: 1.0,
            known_coefficients: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.beta0,
            self.sigma0,
            self.mu_z,
            self.sigma_z,
            self.beta1,
            self.sigma1,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(invalid("mixture parameters must be finite"));
        }
        if self.n < 2 {
            return Err(invalid(format!(
                "sample size n must be at least 2, got {}",
                self.n
            )));
        }
        if self.sigma_z <= 0.0 {
            return Err(invalid("sigma_z must be positive"));
        }
        if self.known_coefficients {
            if self.sigma0 != 0.0 || self.sigma1 != 0.0 {
                return Err(invalid("known coefficients require sigma0 = sigma1 = 0"));
            }
        } else {
            if self.sigma0 < 0.0 {
                return Err(invalid("sigma0 must be nonnegative"));
            }
            if self.sigma1 <= 0.0 {
                return Err(invalid(
                    "sigma1 must be positive; use the known-coefficients constructor for an exact slope",
                ));
            }
        }
        Ok(())
    }

    /// Second raw moment of the slope estimator, `σ1² + β1²`.
    pub fn kappa2(&self) -> f64 {
        self.sigma1 * self.sigma1 + self.beta1 * self.beta1
    }

    pub fn mu_y(&self) -> f64 {
        self.beta0 + self.beta1 * self.mu_z
    }

    /// Variance shared by every calibrated value through the coefficients.
    pub fn shared_variance(&self) -> f64 {
        self.sigma0 * self.sigma0 + self.sigma1 * self.sigma1 * self.mu_z * self.mu_z
    }

    pub fn var_y(&self) -> f64 {
        self.kappa2() * self.sigma_z * self.sigma_z + self.shared_variance()
    }

    pub fn var_ybar(&self) -> f64 {
        self.var_ybar_at(self.n)
    }

    pub fn var_ybar_at(&self, n: usize) -> f64 {
        self.kappa2() * self.sigma_z * self.sigma_z / n as f64 + self.shared_variance()
    }

    pub fn with_n(self, n: usize) -> Self {
        Self { n, ..self }
    }
}

/// Quantities derived from [`MixtureParams`].
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DerivedParams {
    pub kappa2: f64,
    /// `β1² / σ1²`, noncentrality of the squared slope estimator.
    pub lambda: f64,
    pub nu: f64,
    /// `(μ_Y - μ_Y0)² / (σ1² σ_Z²)`, present only when a null mean was given.
    pub delta: Option<f64>,
    pub mu_y: f64,
    pub var_y: f64,
    pub var_ybar: f64,
}

pub fn derive_params(p: &MixtureParams, mu_y0: Option<f64>) -> Result<DerivedParams> {
    p.validate()?;
    if p.known_coefficients {
        return Err(Error::Degenerate(
            "lambda is undefined when the coefficients are known exactly".into(),
        ));
    }
    let s1sq = p.sigma1 * p.sigma1;
    let mu_y = p.mu_y();
    Ok(DerivedParams {
        kappa2: p.kappa2(),
        lambda: p.beta1 * p.beta1 / s1sq,
        nu: (p.n - 1) as f64,
        delta: mu_y0.map(|m| (mu_y - m) * (mu_y - m) / (s1sq * p.sigma_z * p.sigma_z)),
        mu_y,
        var_y: p.var_y(),
        var_ybar: p.var_ybar(),
    })
}

/// Dense row-major matrix, just enough for covariance bookkeeping.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::DimensionMismatch {
                    expected: c,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Self {
            rows: r,
            cols: c,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.rows == self.cols
            && (0..self.rows)
                .all(|i| (0..i).all(|j| (self.get(i, j) - self.get(j, i)).abs() <= tol))
    }

    /// Numerical rank by Gaussian elimination with full pivoting.
    pub fn rank(&self, tol: f64) -> usize {
        let mut a = self.clone();
        let (m, n) = (a.rows, a.cols);
        let mut rank = 0;
        for col in 0..n.min(m) {
            let mut best = (0.0, rank, col);
            for i in rank..m {
                for j in col..n {
                    let v = a.get(i, j).abs();
                    if v > best.0 {
                        best = (v, i, j);
                    }
                }
            }
            if best.0 <= tol {
                break;
            }
            for j in 0..n {
                let (x, y) = (a.get(rank, j), a.get(best.1, j));
                a.set(rank, j, y);
                a.set(best.1, j, x);
            }
            for i in 0..m {
                let (x, y) = (a.get(i, col), a.get(i, best.2));
                a.set(i, col, y);
                a.set(i, best.2, x);
            }
            let piv = a.get(rank, col);
            for i in rank + 1..m {
                let f = a.get(i, col) / piv;
                for j in col..n {
                    let v = a.get(i, j) - f * a.get(rank, j);
                    a.set(i, j, v);
                }
            }
            rank += 1;
        }
        rank
    }
}

/// Weights of the unconditional covariance `κ2 Σ + σ0² 11' + σ1² μ μ'`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CovarianceStructure {
    pub diag_weight: f64,
    pub ones_weight: f64,
    pub mean_outer_weight: f64,
}

impl CovarianceStructure {
    pub fn from_params(p: &MixtureParams) -> Self {
        Self {
            diag_weight: p.kappa2(),
            ones_weight: p.sigma0 * p.sigma0,
            mean_outer_weight: p.sigma1 * p.sigma1,
        }
    }

    pub fn apply(&self, sigma: &Matrix, mu_z: &[f64]) -> Result<Matrix> {
        let n = mu_z.len();
        if sigma.rows != n || sigma.cols != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: if sigma.rows != n {
                    sigma.rows
                } else {
                    sigma.cols
                },
            });
        }
        let mut out = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out.set(
                    i,
                    j,
                    self.diag_weight * sigma.get(i, j)
                        + self.ones_weight
                        + self.mean_outer_weight * mu_z[i] * mu_z[j],
                );
            }
        }
        Ok(out)
    }
}

/// Unconditional mean `β0 1 + β1 μ_Z` and covariance of calibrated readings
/// whose raw readings have mean vector `mu_z` and covariance `sigma`.
/// The scalar `p.mu_z` is ignored in favor of the vector.
pub fn unconditional_mean_cov(
    mu_z: &[f64],
    sigma: &Matrix,
    p: &MixtureParams,
) -> Result<(Vec<f64>, Matrix)> {
    p.validate()?;
    let cov = CovarianceStructure::from_params(p).apply(sigma, mu_z)?;
    let mean = mu_z.iter().map(|m| p.beta0 + p.beta1 * m).collect();
    Ok((mean, cov))
}

/// Equicorrelation of calibrated readings: conditional on a realized slope
/// `σ0² / (β1_hat² σ_Z² + σ0²)` (only when `beta1_hat` is given), and
/// unconditional `(σ0² + σ1² μ_Z²) / (κ2 σ_Z² + σ0² + σ1² μ_Z²)`.
pub fn correlation_params(p: &MixtureParams, beta1_hat: Option<f64>) -> Result<(Option<f64>, f64)> {
    p.validate()?;
    let s0 = p.sigma0 * p.sigma0;
    let sz = p.sigma_z * p.sigma_z;
    let conditional = match beta1_hat {
        Some(b) => {
            let den = b * b * sz + s0;
            if den <= 0.0 {
                return Err(Error::Degenerate(
                    "conditional correlation has zero variance".into(),
                ));
            }
            Some(s0 / den)
        }
        None => None,
    };
    Ok((conditional, p.shared_variance() / p.var_y()))
}
