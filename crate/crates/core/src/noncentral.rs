//! Noncentral chi-squared, F and t kernels used inside the mixture laws.
//!
//! The density expansions are summed from their largest term with a geometric
//! tail bound (see [`crate::series`]). CDF expansions are Poisson mixtures of
//! regularized incomplete beta functions. At very large noncentrality the
//! expansions need too many terms, and the t-type kernels switch to a single
//! quadrature over the chi-squared denominator.

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::Result;
use crate::quad::{integrate, QuadTol};
use crate::series::{poisson_weighted_sum, sum_log_concave, BetaLadder, SeriesCfg};
use crate::special::{
    chi2_pdf, chi2_sf, f_cdf, f_pdf, ln_beta, ln_gamma, norm_cdf, norm_pdf, norm_sf, t_cdf,
};

/// Bound below which a kernel value is treated as exactly zero.
const LN_NEGLIGIBLE: f64 = -700.0;

/// Poisson mean above which t-type kernels use the quadrature form.
const LARGE_POISSON_MEAN: f64 = 5e3;

/// `∫ f(r) h(r) dr` where `h` is the density of `r = sqrt(V/ν)`, `V ~ χ²_ν`.
/// The integrand changes over a width `width` around `turn`.
fn over_denominator<F>(nu: f64, turn: f64, width: f64, cfg: &SeriesCfg, mut f: F) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let v_max = nu + 60.0 * (2.0 * nu).sqrt() + 200.0;
    let r_max = (v_max / nu).sqrt();
    let mut pts = alloc::vec![0.0, 0.5, 1.0, 1.5, r_max];
    if turn > 0.0 && turn < r_max {
        for k in [-30.0, -10.0, -3.0, -1.0, 0.0, 1.0, 3.0, 10.0, 30.0] {
            let p = turn + k * width;
            if p > 0.0 && p < r_max {
                pts.push(p);
            }
        }
    }
    pts.sort_by(|a, b| a.total_cmp(b));
    pts.dedup();
    let tol = QuadTol::new(cfg.tol, cfg.tol);
    integrate(
        |r| Ok(f(r) * 2.0 * nu * r * chi2_pdf(nu * r * r, nu)),
        &pts,
        &tol,
        "noncentral t quadrature",
    )
}

/// Density of the noncentral chi-squared law with one degree of freedom,
/// summed as `e^{-λ/2 - w/2} 2^{-1/2} Σ_k (λ/4)^k w^{k-1/2} / (k! Γ(k+1/2))`.
pub fn nc_chisq1_pdf_series(w: f64, lambda: f64, cfg: &SeriesCfg) -> Result<f64> {
    if w < 0.0 {
        return Ok(0.0);
    }
    if w == 0.0 {
        return Ok(f64::INFINITY);
    }
    if lambda == 0.0 {
        return Ok(chi2_pdf(w, 1.0));
    }
    let ln_w = w.ln();
    let ln_l4 = (0.25 * lambda).ln();
    let base = -0.5 * lambda - 0.5 * w - 0.5 * core::f64::consts::LN_2;
    sum_log_concave(
        |k| {
            let k = k as f64;
            (
                base + k * ln_l4 + (k - 0.5) * ln_w - ln_gamma(k + 1.0) - ln_gamma(k + 0.5),
                1.0,
            )
        },
        |k| {
            let k = k as f64;
            0.25 * lambda * w / ((k + 1.0) * (k + 0.5))
        },
        cfg,
        "noncentral chi-squared density series",
    )
}

/// CDF of the noncentral F law `F(d1, d2, nc)`.
pub fn ncf_cdf(x: f64, d1: f64, d2: f64, nc: f64, cfg: &SeriesCfg) -> Result<f64> {
    if x <= 0.0 {
        return Ok(0.0);
    }
    if nc == 0.0 {
        return Ok(f_cdf(x, d1, d2));
    }
    if d1 == 1.0 && nct_cdf_upper_bound(x.sqrt(), d2, nc.sqrt()) <= cfg.tol * 1e-3 {
        return Ok(0.0);
    }
    if d1 == 1.0 && 0.5 * nc > LARGE_POISSON_MEAN {
        let (root, mu) = (x.sqrt(), nc.sqrt());
        let v = over_denominator(d2, mu / root, 1.0 / root, cfg, |r| {
            norm_cdf(root * r - mu) - norm_cdf(-root * r - mu)
        })?;
        return Ok(v.clamp(0.0, 1.0));
    }
    let y = d1 * x / (d1 * x + d2);
    poisson_weighted_sum(
        0.5 * nc,
        0.0,
        |j| BetaLadder::new(0.5 * d1, 0.5 * d2, y, j),
        cfg,
        "noncentral F cdf series",
    )
}

/// Density of the noncentral F law; for `d1 = 1` this is the noncentral t²
/// density used in the calibrated t² mixture.
pub fn ncf_pdf(x: f64, d1: f64, d2: f64, nc: f64, cfg: &SeriesCfg) -> Result<f64> {
    if x <= 0.0 {
        return Ok(0.0);
    }
    if nc == 0.0 {
        return Ok(f_pdf(x, d1, d2));
    }
    if d1 == 1.0 {
        let root = x.sqrt();
        let mu = nc.sqrt();
        let ln_bound = nct_pdf_ln_bound(root, d2, mu) - (2.0 * root).ln() + core::f64::consts::LN_2;
        if ln_bound < LN_NEGLIGIBLE {
            return Ok(0.0);
        }
        if 0.5 * nc > LARGE_POISSON_MEAN {
            let f = nct_pdf(root, d2, mu, cfg)? + nct_pdf(-root, d2, mu, cfg)?;
            return Ok(f / (2.0 * root));
        }
    }
    let (a, b) = (0.5 * d1, 0.5 * d2);
    let m = 0.5 * nc;
    let r = d1 * x / d2;
    let ln_r = r.ln();
    let ln_1r = r.ln_1p();
    let y = r / (1.0 + r);
    let ln_m = m.ln();
    let front = -m + (d1 / d2).ln();
    sum_log_concave(
        |j| {
            let jf = j as f64;
            (
                front + jf * ln_m - ln_gamma(jf + 1.0) + (a + jf - 1.0) * ln_r
                    - (a + jf + b) * ln_1r
                    - ln_beta(a + jf, b),
                1.0,
            )
        },
        |j| {
            let jf = j as f64;
            m / (jf + 1.0) * y * (a + jf + b) / (a + jf)
        },
        cfg,
        "noncentral F density series",
    )
}

/// Upper bound on `ln |f(x)|` for the noncentral t density with `nu` degrees
/// of freedom and noncentrality `mu`. Derived from
/// `|z| sqrt(y) <= ε y + z²/(4ε)` with `ε = (1 + r) / 2`, `r = x²/(ν + x²)`.
fn nct_pdf_ln_bound(x: f64, nu: f64, mu: f64) -> f64 {
    let r = x * x / (nu + x * x);
    nct_ln_front(x, nu) - 0.5 * mu * mu * (1.0 - r) / (1.0 + r)
        + 0.5 * (nu + 1.0) * (2.0 / (1.0 - r)).ln()
}

/// `ln [Γ((ν+1)/2) (ν/(ν+x²))^{(ν+1)/2} / (sqrt(πν) Γ(ν/2))]`
fn nct_ln_front(x: f64, nu: f64) -> f64 {
    ln_gamma(0.5 * (nu + 1.0)) + 0.5 * (nu + 1.0) * (nu / (nu + x * x)).ln()
        - 0.5 * (core::f64::consts::PI * nu).ln()
        - ln_gamma(0.5 * nu)
}

/// Noncentral t density through the power series in
/// `z = sqrt(2) x μ / sqrt(ν + x²)`:
/// `e^{-μ²/2} C(x) Σ_j Γ((ν+j+1)/2) / (j! Γ((ν+1)/2)) z^j`.
pub fn nct_pdf(x: f64, nu: f64, mu: f64, cfg: &SeriesCfg) -> Result<f64> {
    let front = nct_ln_front(x, nu) - 0.5 * mu * mu;
    let z = core::f64::consts::SQRT_2 * x * mu / (nu + x * x).sqrt();
    if z == 0.0 {
        return Ok(front.exp());
    }
    if nct_pdf_ln_bound(x, nu, mu) < LN_NEGLIGIBLE {
        return Ok(0.0);
    }
    if 0.5 * mu * mu > LARGE_POISSON_MEAN || z * z > 2.0 * LARGE_POISSON_MEAN {
        return over_denominator(nu, mu / x, 1.0 / x.abs(), cfg, |r| norm_pdf(x * r - mu) * r);
    }
    let ln_z = z.abs().ln();
    let neg = z < 0.0;
    let g0 = ln_gamma(0.5 * (nu + 1.0));
    sum_log_concave(
        |j| {
            let jf = j as f64;
            let sign = if neg && j % 2 == 1 { -1.0 } else { 1.0 };
            (
                front + ln_gamma(0.5 * (nu + jf + 1.0)) - ln_gamma(jf + 1.0) - g0 + jf * ln_z,
                sign,
            )
        },
        |j| {
            let jf = j as f64;
            z * (ln_gamma(0.5 * (nu + jf + 2.0)) - ln_gamma(0.5 * (nu + jf + 1.0))).exp()
                / (jf + 1.0)
        },
        cfg,
        "noncentral t density series",
    )
}

/// `P(T <= x)` is at most this for `x >= 0` and `μ > 0`, using
/// `{Z + μ <= x sqrt(V/ν)} ⊂ {Z <= -μ/2} ∪ {x sqrt(V/ν) >= μ/2}`.
fn nct_cdf_upper_bound(x: f64, nu: f64, mu: f64) -> f64 {
    if mu <= 0.0 {
        return 1.0;
    }
    if x <= 0.0 {
        return norm_cdf(-mu);
    }
    let ratio = mu / (2.0 * x);
    norm_cdf(-0.5 * mu) + chi2_sf(nu * ratio * ratio, nu)
}

/// Noncentral t CDF (Lenth's expansion):
/// `F(x) = Φ(-μ) + ½ Σ_j [p_j I_y(j+½, ν/2) + q_j I_y(j+1, ν/2)]`,
/// `y = x²/(x²+ν)`, for `x >= 0`; negative `x` by reflection.
pub fn nct_cdf(x: f64, nu: f64, mu: f64, cfg: &SeriesCfg) -> Result<f64> {
    if mu == 0.0 {
        return Ok(t_cdf(x, nu));
    }
    if x < 0.0 {
        return Ok(1.0 - nct_cdf_nonneg(-x, nu, -mu, cfg)?);
    }
    nct_cdf_nonneg(x, nu, mu, cfg)
}

fn nct_cdf_nonneg(x: f64, nu: f64, mu: f64, cfg: &SeriesCfg) -> Result<f64> {
    if mu > 0.0 && nct_cdf_upper_bound(x, nu, mu) <= cfg.tol * 1e-3 {
        return Ok(0.0);
    }
    if mu < 0.0 && norm_sf(-mu) <= cfg.tol * 1e-3 {
        // P(T > x) <= P(Z > -μ) for x >= 0
        return Ok(1.0);
    }
    if x == 0.0 {
        return Ok(norm_cdf(-mu));
    }
    let m = 0.5 * mu * mu;
    if m > LARGE_POISSON_MEAN {
        return over_denominator(nu, mu / x, 1.0 / x, cfg, |r| norm_cdf(x * r - mu))
            .map(|v| v.clamp(0.0, 1.0));
    }
    let y = x * x / (x * x + nu);
    let b = 0.5 * nu;
    let p = poisson_weighted_sum(
        m,
        0.0,
        |j| BetaLadder::new(0.5, b, y, j),
        cfg,
        "noncentral t cdf series",
    )?;
    let q = poisson_weighted_sum(
        m,
        0.5,
        |j| BetaLadder::new(1.0, b, y, j),
        cfg,
        "noncentral t cdf series",
    )?;
    let q = if mu < 0.0 { -q } else { q };
    Ok((norm_cdf(-mu) + 0.5 * (p + q)).clamp(0.0, 1.0))
}
