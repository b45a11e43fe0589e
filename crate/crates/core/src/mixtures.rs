//! The four mixture laws of calibrated statistics.
//!
//! Writing `s = β1_hat / σ1 ~ N(sqrt(λ), 1)`, every law below is a textbook
//! law conditionally on `s`, and the unconditional law is obtained by
//! integrating over `s`:
//!
//! * [`MeanMixture`]: `Ȳ | β1_hat ~ N(β0 + β1_hat μ_Z, β1_hat² σ_Z²/n + σ0²)`.
//! * [`VarianceMixture`]: `ν S² / (σ1² σ_Z²) = s² χ²_ν`, with `s²` noncentral
//!   chi-squared on one degree of freedom.
//! * [`TsqMixture`]: `t0² | s ~ F(1, ν, δ/s²)`.
//! * [`SignedTMixture`]: `t0 | |s| ~ t(ν, δ0/|s|)` with `|s|` folded normal.
//! * [`CalibratedTsq`]: `t0²` without the restriction `σ0 = 0`, `μ_Z = 0`.
//!
//! The squared-slope laws weight by the series form of the noncentral
//! chi-squared density; the signed law uses the closed-form folded normal, so
//! the two routes to `P(t0² <= c)` are computed independently.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{invalid, Error, Result};
use crate::model::MixtureParams;
use crate::noncentral::{nc_chisq1_pdf_series, ncf_cdf, ncf_pdf, nct_cdf, nct_pdf};
use crate::quad::{breakpoints, integrate, QuadTol};
use crate::series::SeriesCfg;
use crate::special::{
    chi2_cdf, chi2_pdf, f_cdf, f_pdf, invert_monotone, norm_cdf, norm_pdf, t_cdf, LN_SQRT_2PI,
};

/// Accuracy knobs shared by every mixture evaluation.
///
/// Series term counts are minimums: each series keeps adding terms until its
/// tail bound drops below `abs_tol / 100`, up to `max_series_terms`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct QuadSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Half-width of the mixing window, in standard deviations of the slope
    /// estimator.
    pub mixing_range_sigmas: f64,
    /// Minimum terms of the noncentral t² (F) series.
    pub series_terms_outer: usize,
    /// Minimum terms of the noncentral chi-squared mixing series.
    pub series_terms_inner: usize,
    /// Minimum terms of the noncentral t density series.
    pub series_terms_signed: usize,
    pub max_series_terms: usize,
}

impl Default for QuadSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            mixing_range_sigmas: 10.0,
            series_terms_outer: 15,
            series_terms_inner: 30,
            series_terms_signed: 20,
            max_series_terms: 100_000,
        }
    }
}

impl QuadSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(invalid("quadrature tolerances must be positive"));
        }
        if !(self.mixing_range_sigmas > 0.0 && self.mixing_range_sigmas.is_finite()) {
            return Err(invalid("mixing_range_sigmas must be positive and finite"));
        }
        if self.max_series_terms == 0 {
            return Err(invalid("max_series_terms must be positive"));
        }
        Ok(())
    }

    pub(crate) fn quad(&self) -> QuadTol {
        QuadTol::new(self.abs_tol, self.rel_tol)
    }

    pub(crate) fn series(&self, min_terms: usize) -> SeriesCfg {
        SeriesCfg::new(
            min_terms,
            self.max_series_terms.max(min_terms),
            self.abs_tol * 1e-2,
        )
    }
}

/// Noncentral chi-squared density on one degree of freedom; `0` for `w < 0`.
pub fn nc_chisq1_pdf(w: f64, lambda: f64, q: &QuadSpec) -> Result<f64> {
    nc_chisq1_pdf_series(w, lambda, &q.series(q.series_terms_inner))
}

/// Density and distribution function of a univariate law.
pub trait CdfEval {
    fn pdf(&self, u: f64) -> Result<f64>;

    fn cdf(&self, u: f64) -> Result<f64>;

    /// Edges of the support; either may be infinite.
    fn support(&self) -> (f64, f64);

    /// Rough location and spread, used to seed searches and grids.
    fn location_scale(&self) -> (f64, f64);

    /// Interior points where the density changes character.
    fn break_hints(&self) -> Vec<f64> {
        Vec::new()
    }

    /// Quantile by bisection on the CDF, to relative precision `1e-8`.
    fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(invalid("quantile probability must lie in (0, 1)"));
        }
        let (lo_edge, _) = self.support();
        let (loc, scale) = self.location_scale();
        if lo_edge == 0.0 {
            // positive laws: search in ln u so small quantiles keep relative precision
            let y = invert_monotone(
                |y| self.cdf(y.exp()),
                p,
                loc.ln() - 1.0,
                (loc + scale).ln(),
                f64::MIN,
                1e-9,
            )?;
            return Ok(y.exp());
        }
        invert_monotone(|x| self.cdf(x), p, loc - scale, loc + scale, f64::MIN, 1e-8)
    }
}

/// Breakpoints for a mixing integral whose kernel concentrates near `turn`
/// on a scale proportional to `turn` itself (noncentrality or scale `∝ 1/s`).
fn around(lambda0: f64, turn: f64) -> [f64; 8] {
    [
        lambda0,
        turn / 16.0,
        turn / 4.0,
        turn / 2.0,
        turn,
        2.0 * turn,
        4.0 * turn,
        16.0 * turn,
    ]
}

/// Window of `s` carrying all but a negligible part of the mixing mass.
fn slope_window(lambda0: f64, sigmas: f64) -> (f64, f64) {
    ((lambda0 - sigmas).max(0.0), lambda0 + sigmas)
}

/// Density of `|s|` with `s ~ N(λ0, 1)`, through the noncentral chi-squared
/// series: `2 s f_{χ²1(λ)}(s²)`.
fn folded_slope_density_series(s: f64, lambda: f64, q: &QuadSpec) -> Result<f64> {
    if s < 0.0 {
        return Ok(0.0);
    }
    if s == 0.0 {
        return Ok(2.0 * (-0.5 * lambda - LN_SQRT_2PI).exp());
    }
    Ok(2.0 * s * nc_chisq1_pdf(s * s, lambda, q)?)
}

fn check_dof(nu: f64) -> Result<()> {
    if !(nu >= 1.0 && nu.is_finite()) {
        return Err(invalid("degrees of freedom must be at least 1"));
    }
    Ok(())
}

fn check_nonneg(v: f64, name: &str) -> Result<()> {
    if !(v >= 0.0 && v.is_finite()) {
        return Err(invalid(alloc::format!(
            "{name} must be finite and nonnegative"
        )));
    }
    Ok(())
}

/// Law of the calibrated sample mean `Ȳ`.
#[derive(Debug, Clone, Copy)]
pub struct MeanMixture {
    p: MixtureParams,
    q: QuadSpec,
}

impl MeanMixture {
    pub fn new(p: MixtureParams, q: QuadSpec) -> Result<Self> {
        p.validate()?;
        q.validate()?;
        if p.known_coefficients && p.beta1 == 0.0 {
            return Err(Error::Degenerate(
                "a known zero slope makes the mean a constant".into(),
            ));
        }
        Ok(Self { p, q })
    }

    pub fn params(&self) -> &MixtureParams {
        &self.p
    }

    fn inner_sd(&self, t: f64) -> f64 {
        let p = &self.p;
        (t * t * p.sigma_z * p.sigma_z / p.n as f64 + p.sigma0 * p.sigma0).sqrt()
    }

    fn slope_breaks(&self) -> Vec<f64> {
        let p = &self.p;
        let r = self.q.mixing_range_sigmas * p.sigma1;
        breakpoints(p.beta1 - r, p.beta1 + r, &[0.0, p.beta1])
    }

    fn mix<F>(&self, mut inner: F, context: &'static str) -> Result<f64>
    where
        F: FnMut(f64) -> f64,
    {
        let p = &self.p;
        integrate(
            |t| Ok(inner(t) * norm_pdf((t - p.beta1) / p.sigma1) / p.sigma1),
            &self.slope_breaks(),
            &self.q.quad(),
            context,
        )
    }
}

impl CdfEval for MeanMixture {
    fn pdf(&self, u: f64) -> Result<f64> {
        let p = self.p;
        if p.known_coefficients {
            let sd = self.inner_sd(p.beta1);
            return Ok(norm_pdf((u - p.mu_y()) / sd) / sd);
        }
        self.mix(
            |t| {
                let sd = self.inner_sd(t);
                if sd == 0.0 {
                    0.0
                } else {
                    norm_pdf((u - p.beta0 - t * p.mu_z) / sd) / sd
                }
            },
            "mean mixture density",
        )
    }

    fn cdf(&self, u: f64) -> Result<f64> {
        let p = self.p;
        if p.known_coefficients {
            return Ok(norm_cdf((u - p.mu_y()) / self.inner_sd(p.beta1)));
        }
        let v = self.mix(
            |t| {
                let sd = self.inner_sd(t);
                let x = u - p.beta0 - t * p.mu_z;
                if sd == 0.0 {
                    if x >= 0.0 {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    norm_cdf(x / sd)
                }
            },
            "mean mixture cdf",
        )?;
        Ok(v.clamp(0.0, 1.0))
    }

    fn support(&self) -> (f64, f64) {
        (f64::NEG_INFINITY, f64::INFINITY)
    }

    fn location_scale(&self) -> (f64, f64) {
        (self.p.mu_y(), self.p.var_ybar().sqrt())
    }
}

/// Law of `u = ν S² / (σ1² σ_Z²)`, a chi-squared law on `ν` degrees of
/// freedom scaled by an independent noncentral chi-squared `χ²1(λ)`.
#[derive(Debug, Clone, Copy)]
pub struct VarianceMixture {
    nu: f64,
    lambda: f64,
    q: QuadSpec,
}

impl VarianceMixture {
    pub fn new(nu: f64, lambda: f64, q: QuadSpec) -> Result<Self> {
        check_dof(nu)?;
        check_nonneg(lambda, "lambda")?;
        q.validate()?;
        Ok(Self { nu, lambda, q })
    }

    pub fn from_params(p: &MixtureParams, q: QuadSpec) -> Result<Self> {
        let d = crate::model::derive_params(p, None)?;
        Self::new(d.nu, d.lambda, q)
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn mean(&self) -> f64 {
        self.nu * (1.0 + self.lambda)
    }

    fn mix<F>(&self, u: f64, mut inner: F, context: &'static str) -> Result<f64>
    where
        F: FnMut(f64) -> f64,
    {
        let l0 = self.lambda.sqrt();
        let (a, b) = slope_window(l0, self.q.mixing_range_sigmas);
        let peak = (u / self.nu).sqrt();
        integrate(
            |s| {
                if s <= 0.0 {
                    return Ok(0.0);
                }
                let g = folded_slope_density_series(s, self.lambda, &self.q)?;
                Ok(if g == 0.0 { 0.0 } else { inner(s) * g })
            },
            &breakpoints(a, b, &around(l0, peak)),
            &self.q.quad(),
            context,
        )
    }
}

impl CdfEval for VarianceMixture {
    fn pdf(&self, u: f64) -> Result<f64> {
        if u <= 0.0 {
            return Ok(0.0);
        }
        let nu = self.nu;
        self.mix(
            u,
            |s| chi2_pdf(u / (s * s), nu) / (s * s),
            "variance mixture density",
        )
    }

    fn cdf(&self, u: f64) -> Result<f64> {
        if u <= 0.0 {
            return Ok(0.0);
        }
        let nu = self.nu;
        let v = self.mix(u, |s| chi2_cdf(u / (s * s), nu), "variance mixture cdf")?;
        Ok(v.clamp(0.0, 1.0))
    }

    fn support(&self) -> (f64, f64) {
        (0.0, f64::INFINITY)
    }

    fn location_scale(&self) -> (f64, f64) {
        let m = self.mean();
        // Var(w χ²_ν) with w ~ χ²1(λ)
        let ew2 = 3.0 + 6.0 * self.lambda + self.lambda * self.lambda;
        let var = ew2 * self.nu * (self.nu + 2.0) - m * m;
        (m, var.sqrt())
    }

    fn break_hints(&self) -> Vec<f64> {
        alloc::vec![self.nu, self.mean()]
    }
}

/// Law of Student's squared statistic `t0²` computed on calibrated data:
/// noncentral `F(1, ν, δ/w)` mixed over `w ~ χ²1(λ)`.
#[derive(Debug, Clone, Copy)]
pub struct TsqMixture {
    nu: f64,
    delta: f64,
    lambda: f64,
    q: QuadSpec,
}

impl TsqMixture {
    pub fn new(nu: f64, delta: f64, lambda: f64, q: QuadSpec) -> Result<Self> {
        check_dof(nu)?;
        check_nonneg(delta, "delta")?;
        check_nonneg(lambda, "lambda")?;
        q.validate()?;
        Ok(Self {
            nu,
            delta,
            lambda,
            q,
        })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    fn mix<F>(&self, u: f64, mut inner: F, context: &'static str) -> Result<f64>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let l0 = self.lambda.sqrt();
        let (a, b) = slope_window(l0, self.q.mixing_range_sigmas);
        let turn = (self.delta / u.max(f64::MIN_POSITIVE)).sqrt();
        integrate(
            |s| {
                if s <= 0.0 {
                    return Ok(0.0);
                }
                let g = folded_slope_density_series(s, self.lambda, &self.q)?;
                if g == 0.0 {
                    return Ok(0.0);
                }
                Ok(inner(self.delta / (s * s))? * g)
            },
            &breakpoints(a, b, &around(l0, turn)),
            &self.q.quad(),
            context,
        )
    }
}

impl CdfEval for TsqMixture {
    fn pdf(&self, u: f64) -> Result<f64> {
        if u <= 0.0 {
            return Ok(0.0);
        }
        if self.delta == 0.0 {
            return Ok(f_pdf(u, 1.0, self.nu));
        }
        let cfg = self.q.series(self.q.series_terms_outer);
        self.mix(
            u,
            |nc| ncf_pdf(u, 1.0, self.nu, nc, &cfg),
            "t-squared mixture density",
        )
    }

    fn cdf(&self, u: f64) -> Result<f64> {
        if u <= 0.0 {
            return Ok(0.0);
        }
        if self.delta == 0.0 {
            return Ok(f_cdf(u, 1.0, self.nu));
        }
        let cfg = self.q.series(self.q.series_terms_outer);
        let v = self.mix(
            u,
            |nc| ncf_cdf(u, 1.0, self.nu, nc, &cfg),
            "t-squared mixture cdf",
        )?;
        Ok(v.clamp(0.0, 1.0))
    }

    fn support(&self) -> (f64, f64) {
        (0.0, f64::INFINITY)
    }

    fn location_scale(&self) -> (f64, f64) {
        let m = 1.0 + self.delta / (1.0 + self.lambda);
        (m, 2.0 * m)
    }

    fn break_hints(&self) -> Vec<f64> {
        alloc::vec![1.0, self.delta / (1.0 + self.lambda)]
    }
}

/// Law of `t0² = n (Ȳ - μ0)² / S²` for calibrated samples under general
/// parameters, including intercept error and `μ_Z ≠ 0`.
///
/// Given the slope estimate `t`, `t0² = c² F(1, ν, nc)` with
/// `c² = 1 + n σ0² / (t² σ_Z²)` and `nc = n a² / (t² σ_Z² + n σ0²)`,
/// `a = β0 + t μ_Z - μ0`. With `σ0 = 0` and `μ_Z = 0` this is the law of
/// [`TsqMixture`] with `δ = n (μ_Y - μ0)² / (σ1² σ_Z²)`.
#[derive(Debug, Clone, Copy)]
pub struct CalibratedTsq {
    p: MixtureParams,
    mu_y0: f64,
    q: QuadSpec,
}

impl CalibratedTsq {
    pub fn new(p: MixtureParams, mu_y0: f64, q: QuadSpec) -> Result<Self> {
        p.validate()?;
        q.validate()?;
        if p.n < 2 {
            return Err(invalid("t statistic needs n >= 2"));
        }
        if !mu_y0.is_finite() {
            return Err(invalid("null value must be finite"));
        }
        if p.known_coefficients && p.beta1 == 0.0 {
            return Err(Error::Degenerate(
                "a known zero slope makes S² vanish".into(),
            ));
        }
        Ok(Self { p, mu_y0, q })
    }

    pub fn params(&self) -> &MixtureParams {
        &self.p
    }

    pub fn mu_y0(&self) -> f64 {
        self.mu_y0
    }

    fn nu(&self) -> f64 {
        (self.p.n - 1) as f64
    }

    /// `(c², nc)` given slope `t`, or `None` at `t = 0`.
    fn conditional(&self, t: f64) -> Option<(f64, f64)> {
        let p = &self.p;
        let n = p.n as f64;
        let spread = t * t * p.sigma_z * p.sigma_z;
        if spread == 0.0 {
            return None;
        }
        let inflated = spread + n * p.sigma0 * p.sigma0;
        let a = p.beta0 + t * p.mu_z - self.mu_y0;
        Some((inflated / spread, n * a * a / inflated))
    }

    /// Slopes where the conditional mean `c² (1 + nc)` equals `u`, i.e. roots
    /// of `(σ_Z² (u - 1) - n μ_Z²) t² - 2 n μ_Z d t - n (d² + σ0²)` with
    /// `d = β0 - μ0`.
    fn peak_slopes(&self, u: f64) -> Vec<f64> {
        let p = &self.p;
        let n = p.n as f64;
        let d = p.beta0 - self.mu_y0;
        let a = p.sigma_z * p.sigma_z * (u - 1.0) - n * p.mu_z * p.mu_z;
        let b = -2.0 * n * p.mu_z * d;
        let c = -n * (d * d + p.sigma0 * p.sigma0);
        let roots = if a == 0.0 {
            if b == 0.0 {
                alloc::vec![]
            } else {
                alloc::vec![-c / b]
            }
        } else {
            let disc = b * b - 4.0 * a * c;
            if disc < 0.0 {
                alloc::vec![]
            } else {
                let s = disc.sqrt();
                alloc::vec![(-b - s) / (2.0 * a), (-b + s) / (2.0 * a)]
            }
        };
        roots
            .into_iter()
            .filter(|t| t.is_finite() && *t != 0.0)
            .collect()
    }

    fn mix<F>(&self, u: f64, mut inner: F, context: &'static str) -> Result<f64>
    where
        F: FnMut(f64, f64) -> Result<f64>,
    {
        let p = &self.p;
        if p.known_coefficients {
            return match self.conditional(p.beta1) {
                Some((c2, nc)) => inner(c2, nc),
                None => Ok(0.0),
            };
        }
        let r = self.q.mixing_range_sigmas * p.sigma1;
        let mut interior: Vec<f64> = [-3.0, -1.0, 0.0, 1.0, 3.0]
            .iter()
            .map(|k| p.beta1 + k * p.sigma1)
            .collect();
        interior.push(0.0);
        // for large u the kernel concentrates near t = 0, where c² ~ u
        let near_zero = p.sigma0 * (p.n as f64).sqrt() / (p.sigma_z * u.sqrt());
        for k in [0.25, 1.0, 4.0, 16.0] {
            interior.extend_from_slice(&[-k * near_zero, k * near_zero]);
        }
        for t in self.peak_slopes(u) {
            interior.extend_from_slice(&around(t, t)[1..]);
        }
        integrate(
            |t| match self.conditional(t) {
                Some((c2, nc)) => {
                    Ok(inner(c2, nc)? * norm_pdf((t - p.beta1) / p.sigma1) / p.sigma1)
                }
                None => Ok(0.0),
            },
            &breakpoints(p.beta1 - r, p.beta1 + r, &interior),
            &self.q.quad(),
            context,
        )
    }
}

impl CdfEval for CalibratedTsq {
    fn pdf(&self, u: f64) -> Result<f64> {
        if u <= 0.0 {
            return Ok(0.0);
        }
        let cfg = self.q.series(self.q.series_terms_outer);
        let nu = self.nu();
        self.mix(
            u,
            |c2, nc| Ok(ncf_pdf(u / c2, 1.0, nu, nc, &cfg)? / c2),
            "calibrated t-squared density",
        )
    }

    fn cdf(&self, u: f64) -> Result<f64> {
        if u <= 0.0 {
            return Ok(0.0);
        }
        let cfg = self.q.series(self.q.series_terms_outer);
        let nu = self.nu();
        let v = self.mix(
            u,
            |c2, nc| ncf_cdf(u / c2, 1.0, nu, nc, &cfg),
            "calibrated t-squared cdf",
        )?;
        Ok(v.clamp(0.0, 1.0))
    }

    fn support(&self) -> (f64, f64) {
        (0.0, f64::INFINITY)
    }

    fn location_scale(&self) -> (f64, f64) {
        let p = &self.p;
        let d = p.mu_y() - self.mu_y0;
        let m = 1.0
            + p.n as f64 * d * d / (p.kappa2() * p.sigma_z * p.sigma_z)
            + p.n as f64 * p.shared_variance() / (p.kappa2() * p.sigma_z * p.sigma_z);
        (m, 2.0 * m)
    }

    fn break_hints(&self) -> Vec<f64> {
        alloc::vec![1.0, self.location_scale().0]
    }
}

/// Law of the signed statistic `t0`: noncentral `t(ν, δ0/s)` mixed over
/// `s = |β1_hat|/σ1`, whose density is `φ(s - λ0) + φ(s + λ0)` on `s > 0`.
#[derive(Debug, Clone, Copy)]
pub struct SignedTMixture {
    nu: f64,
    delta0: f64,
    lambda0: f64,
    q: QuadSpec,
}

impl SignedTMixture {
    pub fn new(nu: f64, delta0: f64, lambda0: f64, q: QuadSpec) -> Result<Self> {
        check_dof(nu)?;
        if !delta0.is_finite() {
            return Err(invalid("delta0 must be finite"));
        }
        check_nonneg(lambda0, "lambda0")?;
        q.validate()?;
        Ok(Self {
            nu,
            delta0,
            lambda0,
            q,
        })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn delta0(&self) -> f64 {
        self.delta0
    }

    pub fn lambda0(&self) -> f64 {
        self.lambda0
    }

    fn mix<F>(&self, x: f64, mut inner: F, context: &'static str) -> Result<f64>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let (a, b) = slope_window(self.lambda0, self.q.mixing_range_sigmas);
        let turn = (self.delta0 / x).abs();
        let l0 = self.lambda0;
        integrate(
            |s| {
                if s <= 0.0 {
                    return Ok(0.0);
                }
                let g = norm_pdf(s - l0) + norm_pdf(s + l0);
                Ok(inner(self.delta0 / s)? * g)
            },
            &breakpoints(a, b, &around(l0, turn)),
            &self.q.quad(),
            context,
        )
    }

    /// `P(-sqrt(c) <= t0 <= sqrt(c))`, integrating the series density over
    /// the interval for each value of the mixing variable.
    pub fn central_probability(&self, c: f64) -> Result<f64> {
        if c <= 0.0 {
            return Ok(0.0);
        }
        let r = c.sqrt();
        let cfg = self.q.series(self.q.series_terms_signed);
        let nu = self.nu;
        let inner_tol = self.q.quad();
        let v = self.mix(
            r,
            |mu| {
                integrate(
                    |x| nct_pdf(x, nu, mu, &cfg),
                    &[-r, 0.0, r],
                    &inner_tol,
                    "signed t interval probability",
                )
            },
            "signed t interval probability",
        )?;
        Ok(v.clamp(0.0, 1.0))
    }
}

impl CdfEval for SignedTMixture {
    fn pdf(&self, x: f64) -> Result<f64> {
        let cfg = self.q.series(self.q.series_terms_signed);
        let nu = self.nu;
        self.mix(x, |mu| nct_pdf(x, nu, mu, &cfg), "signed t mixture density")
    }

    fn cdf(&self, x: f64) -> Result<f64> {
        if self.delta0 == 0.0 {
            return Ok(t_cdf(x, self.nu));
        }
        let cfg = self.q.series(self.q.series_terms_signed);
        let nu = self.nu;
        let v = self.mix(x, |mu| nct_cdf(x, nu, mu, &cfg), "signed t mixture cdf")?;
        Ok(v.clamp(0.0, 1.0))
    }

    fn support(&self) -> (f64, f64) {
        (f64::NEG_INFINITY, f64::INFINITY)
    }

    fn location_scale(&self) -> (f64, f64) {
        let m = self.delta0 / (1.0 + self.lambda0);
        (m, 2.0 + m.abs())
    }

    fn break_hints(&self) -> Vec<f64> {
        alloc::vec![0.0, self.delta0 / (1.0 + self.lambda0)]
    }
}

/// Choice of mixture law with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum DistSpec {
    Mean(MixtureParams),
    Variance { nu: f64, lambda: f64 },
    Tsq { nu: f64, delta: f64, lambda: f64 },
    SignedT { nu: f64, delta0: f64, lambda0: f64 },
    CalibratedTsq { params: MixtureParams, mu_y0: f64 },
}

impl DistSpec {
    /// Variance law of `ν S² / (σ1² σ_Z²)` for calibrated samples drawn
    /// under `p`.
    pub fn variance_for(p: &MixtureParams) -> Result<Self> {
        let d = crate::model::derive_params(p, None)?;
        Ok(Self::Variance {
            nu: d.nu,
            lambda: d.lambda,
        })
    }

    /// Law of `t0² = n (Ȳ - μ0)² / S²` for calibrated samples drawn under `p`.
    ///
    /// The noncentrality is `n (μ_Y - μ0)² / (σ1² σ_Z²)`. The law is exact when
    /// the intercept is known (`σ0 = 0`) and `μ_Z = 0`; otherwise the
    /// intercept error enters the numerator and [`CalibratedTsq`] gives the
    /// exact law.
    pub fn tsq_for(p: &MixtureParams, mu_y0: f64) -> Result<Self> {
        let d = crate::model::derive_params(p, Some(mu_y0))?;
        Ok(Self::Tsq {
            nu: d.nu,
            delta: p.n as f64 * d.delta.unwrap_or(0.0),
            lambda: d.lambda,
        })
    }

    pub fn build(&self, q: QuadSpec) -> Result<Mixture> {
        Ok(match *self {
            DistSpec::Mean(p) => Mixture::Mean(MeanMixture::new(p, q)?),
            DistSpec::Variance { nu, lambda } => {
                Mixture::Variance(VarianceMixture::new(nu, lambda, q)?)
            }
            DistSpec::Tsq { nu, delta, lambda } => {
                Mixture::Tsq(TsqMixture::new(nu, delta, lambda, q)?)
            }
            DistSpec::SignedT {
                nu,
                delta0,
                lambda0,
            } => Mixture::SignedT(SignedTMixture::new(nu, delta0, lambda0, q)?),
            DistSpec::CalibratedTsq { params, mu_y0 } => {
                Mixture::CalibratedTsq(CalibratedTsq::new(params, mu_y0, q)?)
            }
        })
    }
}

/// A built mixture evaluator.
#[derive(Debug, Clone, Copy)]
pub enum Mixture {
    Mean(MeanMixture),
    Variance(VarianceMixture),
    Tsq(TsqMixture),
    SignedT(SignedTMixture),
    CalibratedTsq(CalibratedTsq),
}

impl Mixture {
    fn inner(&self) -> &dyn CdfEval {
        match self {
            Mixture::Mean(m) => m,
            Mixture::Variance(m) => m,
            Mixture::Tsq(m) => m,
            Mixture::SignedT(m) => m,
            Mixture::CalibratedTsq(m) => m,
        }
    }
}

impl CdfEval for Mixture {
    fn pdf(&self, u: f64) -> Result<f64> {
        self.inner().pdf(u)
    }

    fn cdf(&self, u: f64) -> Result<f64> {
        self.inner().cdf(u)
    }

    fn support(&self) -> (f64, f64) {
        self.inner().support()
    }

    fn location_scale(&self) -> (f64, f64) {
        self.inner().location_scale()
    }

    fn break_hints(&self) -> Vec<f64> {
        self.inner().break_hints()
    }
}

/// Breakdown of `∫ pdf`: the integral of the density between the
/// `tail`-quantiles plus the two tail masses taken from the CDF.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdfMass {
    pub lower: f64,
    pub upper: f64,
    pub central: f64,
    pub tails: f64,
}

impl PdfMass {
    pub fn total(&self) -> f64 {
        self.central + self.tails
    }
}

/// Integrates the density of `dist` between its `tail` and `1 - tail`
/// quantiles. Laws on `(0, ∞)` are integrated in `v = sqrt(u)`, which removes
/// the `u^{-1/2}` behavior at the origin.
pub fn pdf_mass<D: CdfEval + ?Sized>(dist: &D, tail: f64, tol: &QuadTol) -> Result<PdfMass> {
    let lower = dist.quantile(tail)?;
    let upper = dist.quantile(1.0 - tail)?;
    let (loc, scale) = dist.location_scale();
    let mut hints = dist.break_hints();
    hints.extend_from_slice(&[loc - scale, loc, loc + scale]);
    let positive = dist.support().0 == 0.0;
    let central = if positive {
        let a = lower.max(0.0).sqrt();
        let b = upper.sqrt();
        let mut pts: Vec<f64> = hints
            .iter()
            .filter(|h| **h > 0.0)
            .map(|h| h.sqrt())
            .collect();
        pts.extend(geometric(0.0, 1.0, b));
        integrate(
            |v| Ok(2.0 * v * dist.pdf(v * v)?),
            &breakpoints(a, b, &pts),
            tol,
            "density mass",
        )?
    } else {
        let step = scale.max(f64::MIN_POSITIVE);
        hints.extend(geometric(loc, step, upper - loc));
        hints.extend(geometric(loc, -step, loc - lower));
        integrate(
            |u| dist.pdf(u),
            &breakpoints(lower, upper, &hints),
            tol,
            "density mass",
        )?
    };
    let tails = dist.cdf(lower)? + (1.0 - dist.cdf(upper)?);
    Ok(PdfMass {
        lower,
        upper,
        central,
        tails,
    })
}

/// `origin + step * 4^k` for `k = 0, 1, ...` while the offset stays below `reach`.
fn geometric(origin: f64, step: f64, reach: f64) -> Vec<f64> {
    let mut pts = Vec::new();
    let mut d = step;
    while d.abs() < reach {
        pts.push(origin + d);
        d *= 4.0;
    }
    pts
}
