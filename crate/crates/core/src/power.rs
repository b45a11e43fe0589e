//! Critical values and operating characteristics of the calibrated t² test,
//! plus numeric probes of the stochastic orderings of the mixture laws.

use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::mixtures::{CdfEval, QuadSpec, SignedTMixture, TsqMixture, VarianceMixture};
use crate::special::f_quantile;

#[allow(unused_imports)]
use num_traits::Float;

/// Upper `alpha` point of the central `F(1, ν)` law, the null law of `t0²`.
pub fn tsq_critical(nu: f64, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(invalid("alpha must lie in (0, 1)"));
    }
    if !(nu >= 1.0 && nu.is_finite()) {
        return Err(invalid("degrees of freedom must be at least 1"));
    }
    f_quantile(1.0 - alpha, 1.0, nu)
}

/// One cell of an operating-characteristic table.
///
/// `nonrejection_prob` is `P(t0² <= critical)` under the calibrated law;
/// `rejection_prob` is its complement, the power of the test.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PowerCell {
    pub nu: f64,
    pub delta: f64,
    pub lambda: f64,
    pub critical: f64,
    pub nonrejection_prob: f64,
    pub rejection_prob: f64,
}

pub fn operating_characteristics(
    nu: f64,
    delta: f64,
    lambda: f64,
    alpha: f64,
    q: &QuadSpec,
) -> Result<PowerCell> {
    let critical = tsq_critical(nu, alpha)?;
    let law = TsqMixture::new(nu, delta, lambda, *q)?;
    let nonrejection_prob = law.cdf(critical)?;
    Ok(PowerCell {
        nu,
        delta,
        lambda,
        critical,
        nonrejection_prob,
        rejection_prob: 1.0 - nonrejection_prob,
    })
}

/// The same non-rejection probability computed from the signed statistic,
/// `P(-sqrt(c) <= t0 <= sqrt(c))`, with `δ0 = sqrt(δ)` and `λ0 = sqrt(λ)`.
pub fn nonrejection_via_signed(
    nu: f64,
    delta: f64,
    lambda: f64,
    alpha: f64,
    q: &QuadSpec,
) -> Result<f64> {
    let critical = tsq_critical(nu, alpha)?;
    if !(delta >= 0.0 && lambda >= 0.0) {
        return Err(invalid("delta and lambda must be nonnegative"));
    }
    SignedTMixture::new(nu, delta.sqrt(), lambda.sqrt(), *q)?.central_probability(critical)
}

/// Cells for every `(δ, λ)` pair, rows by `δ` and columns by `λ`.
pub fn power_table(
    nu: f64,
    deltas: &[f64],
    lambdas: &[f64],
    alpha: f64,
    q: &QuadSpec,
) -> Result<Vec<Vec<PowerCell>>> {
    deltas
        .iter()
        .map(|&d| {
            lambdas
                .iter()
                .map(|&l| operating_characteristics(nu, d, l, alpha, q))
                .collect()
        })
        .collect()
}

/// A one-parameter family of mixture CDFs with a predicted monotone
/// direction in that parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "family", rename_all = "snake_case"))]
pub enum OrderingFamily {
    /// Variance mixture CDF, nonincreasing in `λ`.
    VarianceInLambda { nu: f64 },
    /// t² mixture CDF at fixed `λ`, nonincreasing in `δ`.
    TsqInDelta { nu: f64, lambda: f64 },
    /// t² mixture CDF at fixed `δ`, nondecreasing in `λ`.
    TsqInLambda { nu: f64, delta: f64 },
}

impl OrderingFamily {
    fn increasing(&self) -> bool {
        matches!(self, OrderingFamily::TsqInLambda { .. })
    }

    fn cdf_at(&self, theta: f64, u: f64, q: &QuadSpec) -> Result<f64> {
        match *self {
            OrderingFamily::VarianceInLambda { nu } => VarianceMixture::new(nu, theta, *q)?.cdf(u),
            OrderingFamily::TsqInDelta { nu, lambda } => {
                TsqMixture::new(nu, theta, lambda, *q)?.cdf(u)
            }
            OrderingFamily::TsqInLambda { nu, delta } => {
                TsqMixture::new(nu, delta, theta, *q)?.cdf(u)
            }
        }
    }
}

/// CDF values over a parameter grid and the largest step against the
/// predicted direction.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OrderingReport {
    pub family: OrderingFamily,
    pub grid: Vec<f64>,
    pub u_grid: Vec<f64>,
    /// `cdf[i][j]` is the CDF at `u_grid[j]` for parameter `grid[i]`.
    pub cdf: Vec<Vec<f64>>,
    /// Largest change against the predicted direction; `<= 0` when the
    /// ordering holds, and strictly negative when it holds strictly.
    pub max_violation: f64,
}

impl OrderingReport {
    pub fn holds(&self, tol: f64) -> bool {
        self.max_violation <= tol
    }

    pub fn holds_strictly(&self) -> bool {
        self.max_violation < 0.0
    }
}

/// Evaluates the family on `grid × u_grid` and checks pointwise
/// monotonicity in the grid parameter. Violations are reported, not raised.
pub fn ordering_probe(
    family: OrderingFamily,
    grid: &[f64],
    u_grid: &[f64],
    q: &QuadSpec,
) -> Result<OrderingReport> {
    if grid.is_empty() || u_grid.is_empty() {
        return Err(invalid("ordering probe needs nonempty grids"));
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(invalid("parameter grid must be strictly increasing"));
    }
    let cdf = grid
        .iter()
        .map(|&theta| {
            u_grid
                .iter()
                .map(|&u| family.cdf_at(theta, u, q))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let sign = if family.increasing() { -1.0 } else { 1.0 };
    let mut max_violation = f64::NEG_INFINITY;
    for pair in cdf.windows(2) {
        for (a, b) in pair[0].iter().zip(&pair[1]) {
            max_violation = max_violation.max(sign * (b - a));
        }
    }
    if grid.len() < 2 {
        max_violation = 0.0;
    }
    Ok(OrderingReport {
        family,
        grid: grid.to_vec(),
        u_grid: u_grid.to_vec(),
        cdf,
        max_violation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn critical_values() {
        assert!((tsq_critical(10.0, 0.05).unwrap() - 4.964_602_743_730_7).abs() < 1e-9);
        assert!(tsq_critical(10.0, 0.999_999).unwrap() < 1e-9);
        assert!(tsq_critical(10.0, 0.0).is_err());
    }

    #[test]
    fn null_row_is_exact() {
        for &l in &[1.0, 4.0, 9.0] {
            let c = operating_characteristics(10.0, 0.0, l, 0.05, &QuadSpec::default()).unwrap();
            assert!((c.nonrejection_prob - 0.95).abs() < 1e-10);
            assert_eq!(c.nonrejection_prob + c.rejection_prob, 1.0);
        }
    }

    #[test]
    fn probe_rejects_unsorted_grid() {
        let f = OrderingFamily::VarianceInLambda { nu: 5.0 };
        assert!(ordering_probe(f, &[2.0, 1.0], &[3.0], &QuadSpec::default()).is_err());
    }
}
