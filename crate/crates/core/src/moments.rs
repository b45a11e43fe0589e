//! Moments of the calibrated mean and variance, and probability regions.

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{invalid, Error, Result};
use crate::mixtures::{CdfEval, QuadSpec};
use crate::model::MixtureParams;
use crate::quad::{breakpoints, integrate};
use crate::special::norm_pdf;

/// Mean, variance and moment ratios of a law. `kurtosis` is the raw
/// (non-excess) ratio `μ4 / μ2²`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MomentSummary {
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    pub kurtosis: f64,
    /// Second central moment recomputed by quadrature, next to the closed
    /// form in `variance`.
    pub quadrature_variance: f64,
}

/// Moments of the calibrated sample mean `Ȳ`.
///
/// Mean and variance are closed form. The third and fourth central moments
/// integrate the conditional Gaussian moments of `Ȳ` given the slope
/// estimate against its normal law.
pub fn mean_moments(p: &MixtureParams, q: &QuadSpec) -> Result<MomentSummary> {
    p.validate()?;
    q.validate()?;
    let mean = p.mu_y();
    let variance = p.var_ybar();
    if p.known_coefficients {
        return Ok(MomentSummary {
            mean,
            variance,
            skewness: 0.0,
            kurtosis: 3.0,
            quadrature_variance: variance,
        });
    }
    let n = p.n as f64;
    // given slope t: Ȳ - μ_Y ~ N(d, v), d = (t - β1) μ_Z, v = t² σ_Z²/n + σ0²
    let central = |r: u32| {
        move |t: f64| {
            let d = (t - p.beta1) * p.mu_z;
            let v = t * t * p.sigma_z * p.sigma_z / n + p.sigma0 * p.sigma0;
            let m = match r {
                2 => d * d + v,
                3 => d * d * d + 3.0 * d * v,
                _ => d.powi(4) + 6.0 * d * d * v + 3.0 * v * v,
            };
            Ok(m * norm_pdf((t - p.beta1) / p.sigma1) / p.sigma1)
        }
    };
    let r = q.mixing_range_sigmas * p.sigma1;
    let pts = breakpoints(p.beta1 - r, p.beta1 + r, &[0.0, p.beta1]);
    let tol = q.quad();
    let m2 = integrate(central(2), &pts, &tol, "second central moment")?;
    let m3 = integrate(central(3), &pts, &tol, "third central moment")?;
    let m4 = integrate(central(4), &pts, &tol, "fourth central moment")?;
    if m2 <= 0.0 {
        return Err(Error::Degenerate(
            "calibrated mean has zero variance".into(),
        ));
    }
    Ok(MomentSummary {
        mean,
        variance,
        skewness: m3 / m2.powf(1.5),
        kurtosis: m4 / (m2 * m2),
        quadrature_variance: m2,
    })
}

/// Expected sample variance of calibrated readings against the variance of
/// a single reading.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VarianceBias {
    /// `E(S²) = κ2 σ_Z²`.
    pub expected_s2: f64,
    /// `Var(Y) = κ2 σ_Z² + σ0² + σ1² μ_Z²`.
    pub var_y: f64,
    /// `E(S²) - Var(Y) = -(σ0² + σ1² μ_Z²)`.
    pub bias: f64,
}

pub fn expected_sample_variance(p: &MixtureParams) -> Result<VarianceBias> {
    p.validate()?;
    let expected_s2 = p.kappa2() * p.sigma_z * p.sigma_z;
    Ok(VarianceBias {
        expected_s2,
        var_y: p.var_y(),
        bias: -p.shared_variance(),
    })
}

/// An equal-tail probability region with its re-evaluated probability.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ProbRegion {
    pub lower: f64,
    pub upper: f64,
    pub coverage: f64,
    pub achieved: f64,
}

/// Equal-tail region `[Q(α/2), Q(1 - α/2)]` with `α = 1 - coverage`.
pub fn probability_region<D: CdfEval + ?Sized>(dist: &D, coverage: f64) -> Result<ProbRegion> {
    if !(coverage > 0.0 && coverage < 1.0) {
        return Err(invalid("coverage must lie in (0, 1)"));
    }
    let alpha = 1.0 - coverage;
    let lower = dist.quantile(0.5 * alpha)?;
    let upper = dist.quantile(1.0 - 0.5 * alpha)?;
    let achieved = interval_coverage(dist, lower, upper)?;
    if (achieved - coverage).abs() > 1e-6 {
        return Err(Error::Accuracy {
            context: "probability region",
            bound: (achieved - coverage).abs(),
            tol: 1e-6,
        });
    }
    Ok(ProbRegion {
        lower,
        upper,
        coverage,
        achieved,
    })
}

/// `P(lower < X <= upper)`.
pub fn interval_coverage<D: CdfEval + ?Sized>(dist: &D, lower: f64, upper: f64) -> Result<f64> {
    if !(lower < upper) {
        return Err(invalid("interval needs lower < upper"));
    }
    let hi = if upper == f64::INFINITY {
        1.0
    } else {
        dist.cdf(upper)?
    };
    let lo = if lower == f64::NEG_INFINITY {
        0.0
    } else {
        dist.cdf(lower)?
    };
    Ok((hi - lo).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_variance_bias() {
        let b = expected_sample_variance(&MixtureParams::unit(1.0)).unwrap();
        assert_eq!((b.expected_s2, b.bias, b.var_y), (2.0, -2.0, 4.0));
        let ideal = MixtureParams::known_coefficients(5, 0.0, 3.0, 2.0, 1.5).unwrap();
        let b = expected_sample_variance(&ideal).unwrap();
        assert_eq!((b.expected_s2, b.bias), (9.0, 0.0));
    }

    #[test]
    fn centered_readings_have_no_skew() {
        let p = MixtureParams::new(7, 2.0, 0.5, 0.0, 1.3, 1.1, 0.6).unwrap();
        let m = mean_moments(&p, &QuadSpec::default()).unwrap();
        assert!(m.skewness.abs() < 1e-12);
        assert!(m.kurtosis > 3.0);
    }
}
