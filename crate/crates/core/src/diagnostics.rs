//! Residual diagnostics and normality statistics for a single sample, and a
//! suite showing they cannot see calibration error.
//!
//! Every statistic here is invariant under `y -> a + b y` with `b > 0`, so
//! on calibrated data `Y = b0 + b1 Z` it takes the value it has on the raw
//! readings `Z` (studentized residuals flip sign with `b1`).

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{invalid, Error, Result};
use crate::model::MixtureParams;
use crate::simulate::{
    draw_coefficients, ks_band_two_sample, ks_two_sample, replicate, BlockExecutor, McConfig,
};
use crate::special::norm_quantile;

fn centered(y: &[f64]) -> Result<(Vec<f64>, f64)> {
    let n = y.len() as f64;
    let mean = y.iter().sum::<f64>() / n;
    let r: Vec<f64> = y.iter().map(|v| v - mean).collect();
    let ss: f64 = r.iter().map(|v| v * v).sum();
    if !(ss > 0.0) {
        return Err(Error::Degenerate("sample is constant".into()));
    }
    Ok((r, ss))
}

/// Residuals about the sample mean and their scaled versions.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ResidualSet {
    pub residuals: Vec<f64>,
    pub sample_sd: f64,
    /// `R_i / (S sqrt(1 - 1/n))`.
    pub studentized: Vec<f64>,
    /// `R_i / (S_(-i) sqrt(1 - 1/n))`; infinite when the other values are
    /// all equal.
    pub r_student: Vec<f64>,
}

/// Residual diagnostics. The leave-one-out variance uses the downdate
/// `(n - 2) S_(-i)² = (n - 1) S² - n R_i² / (n - 1)`.
pub fn residual_diagnostics(y: &[f64]) -> Result<ResidualSet> {
    if y.len() < 3 {
        return Err(invalid("residual diagnostics need n >= 3"));
    }
    let (residuals, ss) = centered(y)?;
    let n = y.len() as f64;
    let sample_sd = (ss / (n - 1.0)).sqrt();
    let lev = (1.0 - 1.0 / n).sqrt();
    let studentized = residuals.iter().map(|r| r / (sample_sd * lev)).collect();
    let r_student = residuals
        .iter()
        .map(|r| {
            let ss_i = (ss - n * r * r / (n - 1.0)).max(0.0);
            r / ((ss_i / (n - 2.0)).sqrt() * lev)
        })
        .collect();
    Ok(ResidualSet {
        residuals,
        sample_sd,
        studentized,
        r_student,
    })
}

/// Successive-difference quadratic form used in the von Neumann ratio.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum DifferenceMatrix {
    /// `Σ_{i>1} (R_i - R_{i-1})²`.
    #[default]
    FirstDifference,
    /// First differences plus the wrap-around term `(R_1 - R_n)²`.
    Circular,
}

/// `U = R'BR / R'R`.
pub fn von_neumann_ratio(r: &[f64], kind: DifferenceMatrix) -> Result<f64> {
    if r.len() < 2 {
        return Err(invalid("von Neumann ratio needs at least 2 residuals"));
    }
    let rr: f64 = r.iter().map(|v| v * v).sum();
    if !(rr > 0.0) {
        return Err(Error::Degenerate("residual vector is zero".into()));
    }
    let mut num: f64 = r.windows(2).map(|w| (w[1] - w[0]) * (w[1] - w[0])).sum();
    if kind == DifferenceMatrix::Circular {
        let d = r[0] - r[r.len() - 1];
        num += d * d;
    }
    Ok(num / rr)
}

/// Unit-length, zero-sum weights from Blom's approximation to expected
/// normal order statistics, `Φ⁻¹((i - 3/8) / (n + 1/4))`.
pub fn blom_weights(n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(invalid("weights need n >= 2"));
    }
    let nf = n as f64;
    let mut m: Vec<f64> = (1..=n)
        .map(|i| norm_quantile((i as f64 - 0.375) / (nf + 0.25)))
        .collect();
    let mean = m.iter().sum::<f64>() / nf;
    m.iter_mut().for_each(|v| *v -= mean);
    let norm = m.iter().map(|v| v * v).sum::<f64>().sqrt();
    m.iter_mut().for_each(|v| *v /= norm);
    Ok(m)
}

/// `W = (Σ w_i y_(i))² / ((n - 1) S²)` for zero-sum weights. With unit-length
/// weights `W <= 1`.
pub fn shapiro_type_w(y: &[f64], weights: &[f64]) -> Result<f64> {
    if weights.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: y.len(),
            found: weights.len(),
        });
    }
    let scale = weights.iter().map(|w| w.abs()).fold(0.0, f64::max);
    if !(scale > 0.0) {
        return Err(invalid("weights are all zero"));
    }
    if weights.iter().sum::<f64>().abs() > 1e-12 * scale * weights.len() as f64 {
        return Err(invalid("weights must sum to zero"));
    }
    let (_, ss) = centered(y)?;
    let mut sorted = y.to_vec();
    sorted.sort_by(f64::total_cmp);
    let lin: f64 = weights.iter().zip(&sorted).map(|(w, v)| w * v).sum();
    Ok(lin * lin / ss)
}

/// `(b1, b2) = (m3² / m2³, m4 / m2²)` from central sample moments.
pub fn moment_ratios(y: &[f64]) -> Result<(f64, f64)> {
    if y.len() < 4 {
        return Err(invalid("moment ratios need n >= 4"));
    }
    let (r, ss) = centered(y)?;
    let n = y.len() as f64;
    let m2 = ss / n;
    let m3 = r.iter().map(|v| v * v * v).sum::<f64>() / n;
    let m4 = r.iter().map(|v| v * v * v * v).sum::<f64>() / n;
    Ok((m3 * m3 / (m2 * m2 * m2), m4 / (m2 * m2)))
}

/// All single-sample diagnostics with default weights and the
/// first-difference ratio.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DiagnosticReport {
    pub n: usize,
    pub von_neumann_ratio: f64,
    pub shapiro_type_w: f64,
    pub b1: f64,
    pub b2: f64,
    pub residuals: ResidualSet,
}

pub fn diagnose(y: &[f64]) -> Result<DiagnosticReport> {
    let residuals = residual_diagnostics(y)?;
    let (b1, b2) = moment_ratios(y)?;
    Ok(DiagnosticReport {
        n: y.len(),
        von_neumann_ratio: von_neumann_ratio(
            &residuals.residuals,
            DifferenceMatrix::FirstDifference,
        )?,
        shapiro_type_w: shapiro_type_w(y, &blom_weights(y.len())?)?,
        b1,
        b2,
        residuals,
    })
}

/// Largest relative gap between a statistic on `Y` and on `Z` across all
/// replications.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IdentityGaps {
    pub shapiro_type_w: f64,
    pub von_neumann_ratio: f64,
    pub b1: f64,
    pub b2: f64,
    /// Compares `t_i(Y)` with `sign(b1) t_i(Z)`.
    pub studentized: f64,
}

impl IdentityGaps {
    pub fn max(&self) -> f64 {
        [
            self.shapiro_type_w,
            self.von_neumann_ratio,
            self.b1,
            self.b2,
            self.studentized,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    fn merge(&self, o: &IdentityGaps) -> IdentityGaps {
        IdentityGaps {
            shapiro_type_w: self.shapiro_type_w.max(o.shapiro_type_w),
            von_neumann_ratio: self.von_neumann_ratio.max(o.von_neumann_ratio),
            b1: self.b1.max(o.b1),
            b2: self.b2.max(o.b2),
            studentized: self.studentized.max(o.studentized),
        }
    }
}

/// Two-sample KS comparison of a statistic under calibration and under
/// plain iid Gaussian data.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct KsComparison {
    pub statistic: &'static str,
    pub distance: f64,
    pub band: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct BlindnessReport {
    pub replications: usize,
    pub gaps: IdentityGaps,
    pub ks: Vec<KsComparison>,
}

impl BlindnessReport {
    pub fn identities_hold(&self, tol: f64) -> bool {
        self.gaps.max() < tol
    }

    pub fn indistinguishable(&self) -> bool {
        self.ks.iter().all(|k| k.distance < k.band)
    }
}

fn rel_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

struct Stats {
    w: f64,
    u: f64,
    b1: f64,
    b2: f64,
}

fn stats(y: &[f64], weights: &[f64]) -> Result<(Stats, ResidualSet)> {
    let res = residual_diagnostics(y)?;
    let (b1, b2) = moment_ratios(y)?;
    Ok((
        Stats {
            w: shapiro_type_w(y, weights)?,
            u: von_neumann_ratio(&res.residuals, DifferenceMatrix::FirstDifference)?,
            b1,
            b2,
        },
        res,
    ))
}

/// Checks, replication by replication, that the diagnostics computed on
/// calibrated values equal those on the raw readings, then compares their
/// sampling distributions with those under plain Gaussian data of the same
/// mean and variance. Plain-data replications use streams from `1 << 48`.
pub fn blindness_suite<E: BlockExecutor + ?Sized>(
    p: &MixtureParams,
    cfg: &McConfig,
    exec: &E,
) -> Result<BlindnessReport> {
    p.validate()?;
    if p.n < 4 {
        return Err(invalid("blindness suite needs n >= 4"));
    }
    let weights = blom_weights(p.n)?;
    let calibrated = replicate(cfg, 0, exec, |rng| -> Result<(IdentityGaps, [f64; 4])> {
        let (b0, b1) = draw_coefficients(p, &cfg.mode, rng);
        let z: Vec<f64> = (0..p.n).map(|_| rng.normal(p.mu_z, p.sigma_z)).collect();
        let y: Vec<f64> = z.iter().map(|v| b0 + b1 * v).collect();
        let (sz, rz) = stats(&z, &weights)?;
        let (sy, ry) = stats(&y, &weights)?;
        let sign = b1.signum();
        let studentized = ry
            .studentized
            .iter()
            .zip(&rz.studentized)
            .map(|(a, b)| rel_gap(*a, sign * b))
            .fold(0.0, f64::max);
        Ok((
            IdentityGaps {
                shapiro_type_w: rel_gap(sy.w, sz.w),
                von_neumann_ratio: rel_gap(sy.u, sz.u),
                b1: rel_gap(sy.b1, sz.b1),
                b2: rel_gap(sy.b2, sz.b2),
                studentized,
            },
            [sy.w, sy.u, sy.b1, sy.b2],
        ))
    })?;
    let sd = p.var_y().sqrt();
    let mu = p.mu_y();
    let plain = replicate(cfg, 1 << 48, exec, |rng| -> Result<[f64; 4]> {
        let y: Vec<f64> = (0..p.n).map(|_| rng.normal(mu, sd)).collect();
        let (s, _) = stats(&y, &weights)?;
        Ok([s.w, s.u, s.b1, s.b2])
    })?;
    let mut gaps = IdentityGaps::default();
    let mut cal_cols: [Vec<f64>; 4] = Default::default();
    for r in calibrated {
        let (g, v) = r?;
        gaps = gaps.merge(&g);
        for (col, x) in cal_cols.iter_mut().zip(v) {
            col.push(x);
        }
    }
    let mut plain_cols: [Vec<f64>; 4] = Default::default();
    for r in plain {
        for (col, x) in plain_cols.iter_mut().zip(r?) {
            col.push(x);
        }
    }
    let names = ["shapiro_type_w", "von_neumann_ratio", "b1", "b2"];
    let ks = names
        .iter()
        .zip(cal_cols.iter_mut().zip(plain_cols.iter_mut()))
        .map(|(name, (a, b))| {
            Ok(KsComparison {
                statistic: name,
                distance: ks_two_sample(a, b)?,
                band: ks_band_two_sample(a.len(), b.len(), 0.01),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BlindnessReport {
        replications: cfg.replications,
        gaps,
        ks,
    })
}
