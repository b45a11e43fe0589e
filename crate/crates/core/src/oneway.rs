//! One-way layouts of calibrated measurements: the sums-of-squares
//! decomposition, the F test, scale-free tests of equal variances, and the
//! per-group effects of calibration error.
//!
//! All groups share one calibration draw, so `Y_ij = b0 + b1 Z_ij` is an
//! affine image of the raw readings and every statistic here that is
//! invariant under `y -> a + b y` has the same value on `Y` as on `Z`.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{invalid, Error, Result};
use crate::mixtures::QuadSpec;
use crate::model::MixtureParams;
use crate::noncentral::ncf_cdf;
use crate::simulate::{draw_coefficients, replicate, BlockExecutor, Estimate, McConfig, Moments};
use crate::special::f_quantile;

/// Model side of a one-way layout: group sizes, and the means and standard
/// deviations of the raw readings in each group.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct OneWayDesign {
    pub sizes: Vec<usize>,
    pub means: Vec<f64>,
    pub sds: Vec<f64>,
}

impl OneWayDesign {
    pub fn new(sizes: Vec<usize>, means: Vec<f64>, sds: Vec<f64>) -> Result<Self> {
        let d = Self { sizes, means, sds };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.sizes.len();
        if k < 2 {
            return Err(invalid("a one-way layout needs at least 2 groups"));
        }
        for len in [self.means.len(), self.sds.len()] {
            if len != k {
                return Err(Error::DimensionMismatch {
                    expected: k,
                    found: len,
                });
            }
        }
        if self.sizes.iter().any(|&n| n < 2) {
            return Err(invalid("every group needs at least 2 observations"));
        }
        if self.means.iter().any(|m| !m.is_finite()) {
            return Err(invalid("group means must be finite"));
        }
        if self.sds.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
            return Err(invalid("group standard deviations must be positive"));
        }
        Ok(())
    }

    pub fn k(&self) -> usize {
        self.sizes.len()
    }

    pub fn total(&self) -> usize {
        self.sizes.iter().sum()
    }
}

/// `Y'Y = ss0 + ss1 + ss2`: grand-mean, between-group and within-group sums
/// of squares.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AnovaDecomposition {
    pub ss0: f64,
    pub ss1: f64,
    pub ss2: f64,
    pub total: f64,
    pub df1: usize,
    pub df2: usize,
    /// `(n - k) ss1 / ((k - 1) ss2)`.
    pub f_statistic: f64,
}

fn check_sizes(y_len: usize, sizes: &[usize]) -> Result<()> {
    if sizes.len() < 2 {
        return Err(invalid("a one-way layout needs at least 2 groups"));
    }
    let n: usize = sizes.iter().sum();
    if n != y_len {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: y_len,
        });
    }
    if sizes.iter().any(|&s| s < 2) {
        return Err(invalid("every group needs at least 2 observations"));
    }
    Ok(())
}

fn groups<'a>(y: &'a [f64], sizes: &'a [usize]) -> impl Iterator<Item = &'a [f64]> + 'a {
    let mut start = 0;
    sizes.iter().map(move |&s| {
        let g = &y[start..start + s];
        start += s;
        g
    })
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Decomposes `y`, laid out group after group with the given sizes.
pub fn decompose(y: &[f64], sizes: &[usize]) -> Result<AnovaDecomposition> {
    check_sizes(y.len(), sizes)?;
    let n = y.len();
    let k = sizes.len();
    let grand = mean(y);
    let (mut ss1, mut ss2) = (0.0, 0.0);
    for g in groups(y, sizes) {
        let m = mean(g);
        ss1 += g.len() as f64 * (m - grand) * (m - grand);
        ss2 += g.iter().map(|v| (v - m) * (v - m)).sum::<f64>();
    }
    if !(ss2 > 0.0) {
        return Err(Error::Degenerate(
            "within-group sum of squares is zero".into(),
        ));
    }
    let ss0 = n as f64 * grand * grand;
    Ok(AnovaDecomposition {
        ss0,
        ss1,
        ss2,
        total: y.iter().map(|v| v * v).sum(),
        df1: k - 1,
        df2: n - k,
        f_statistic: (n - k) as f64 * ss1 / ((k - 1) as f64 * ss2),
    })
}

/// Level-`α` F test on a homoscedastic design.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FPower {
    pub df1: usize,
    pub df2: usize,
    /// `Σ n_i (μ_i - μ̄)² / ω²` with `μ̄ = Σ n_i μ_i / n`.
    pub lambda: f64,
    pub critical: f64,
    pub power: f64,
}

pub fn f_noncentrality(design: &OneWayDesign) -> Result<f64> {
    design.validate()?;
    let w = design.sds[0];
    if design.sds.iter().any(|&s| s != w) {
        return Err(invalid(
            "the F power calculation needs a common standard deviation",
        ));
    }
    let n = design.total() as f64;
    let mbar = design
        .sizes
        .iter()
        .zip(&design.means)
        .map(|(&s, m)| s as f64 * m)
        .sum::<f64>()
        / n;
    Ok(design
        .sizes
        .iter()
        .zip(&design.means)
        .map(|(&s, m)| s as f64 * (m - mbar) * (m - mbar))
        .sum::<f64>()
        / (w * w))
}

pub fn f_power(design: &OneWayDesign, alpha: f64, q: &QuadSpec) -> Result<FPower> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(invalid("alpha must lie in (0, 1)"));
    }
    q.validate()?;
    let lambda = f_noncentrality(design)?;
    let df1 = design.k() - 1;
    let df2 = design.total() - design.k();
    let critical = f_quantile(1.0 - alpha, df1 as f64, df2 as f64)?;
    let cfg = q.series(q.series_terms_outer);
    let power = 1.0 - ncf_cdf(critical, df1 as f64, df2 as f64, lambda, &cfg)?;
    Ok(FPower {
        df1,
        df2,
        lambda,
        critical,
        power: power.clamp(0.0, 1.0),
    })
}

/// Tests of equal group variances that depend on the variances only
/// through their ratios.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VarianceTests {
    /// `M / C` with `M = (n - k) ln S_p² - Σ (n_i - 1) ln S_i²` and
    /// `C = 1 + (Σ 1/(n_i - 1) - 1/(n - k)) / (3 (k - 1))`.
    pub bartlett: f64,
    /// `max S_i² / Σ S_i²`.
    pub cochran: f64,
    /// `max S_i² / min S_i²`.
    pub hartley: f64,
}

pub fn variance_tests(s2: &[f64], sizes: &[usize]) -> Result<VarianceTests> {
    let k = s2.len();
    if k < 2 {
        return Err(invalid("variance tests need at least 2 groups"));
    }
    if sizes.len() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            found: sizes.len(),
        });
    }
    if sizes.iter().any(|&s| s < 2) {
        return Err(invalid("every group needs at least 2 observations"));
    }
    if s2.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(Error::Degenerate("group variances must be positive".into()));
    }
    let dfs: Vec<f64> = sizes.iter().map(|&s| (s - 1) as f64).collect();
    let df: f64 = dfs.iter().sum();
    let pooled = s2.iter().zip(&dfs).map(|(v, d)| v * d).sum::<f64>() / df;
    let m = df * pooled.ln() - s2.iter().zip(&dfs).map(|(v, d)| d * v.ln()).sum::<f64>();
    let c = 1.0 + (dfs.iter().map(|d| 1.0 / d).sum::<f64>() - 1.0 / df) / (3.0 * (k - 1) as f64);
    let max = s2.iter().cloned().fold(f64::MIN, f64::max);
    let min = s2.iter().cloned().fold(f64::MAX, f64::min);
    Ok(VarianceTests {
        bartlett: (m / c).max(0.0),
        cochran: max / s2.iter().sum::<f64>(),
        hartley: max / min,
    })
}

/// Within-group sample variances of `y` laid out group after group.
pub fn group_variances(y: &[f64], sizes: &[usize]) -> Result<Vec<f64>> {
    check_sizes(y.len(), sizes)?;
    Ok(groups(y, sizes)
        .map(|g| {
            let m = mean(g);
            g.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (g.len() - 1) as f64
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GroupBias {
    /// `E(S_i²) = κ2 ω_i²`.
    pub expected_s2: f64,
    /// `Var(Y_ij) = κ2 ω_i² + σ0² + σ1² μ_i²`.
    pub var_y: f64,
    /// `-(σ0² + σ1² μ_i²)`.
    pub bias: f64,
}

/// Per-group bias of `S_i²` for `Var(Y_ij)`. Only the calibration fields of
/// `p` are used; group means and spreads come from the design.
pub fn group_variance_bias(design: &OneWayDesign, p: &MixtureParams) -> Result<Vec<GroupBias>> {
    design.validate()?;
    p.validate()?;
    let k2 = p.kappa2();
    Ok(design
        .means
        .iter()
        .zip(&design.sds)
        .map(|(m, w)| {
            let shared = p.sigma0 * p.sigma0 + p.sigma1 * p.sigma1 * m * m;
            GroupBias {
                expected_s2: k2 * w * w,
                var_y: k2 * w * w + shared,
                bias: -shared,
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PairCheck {
    pub i: usize,
    pub j: usize,
    /// `ω_i² - ω_j²`.
    pub lhs: f64,
    /// `c (μ_j² - μ_i²)`.
    pub rhs: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Homoscedasticity {
    /// `σ1² / κ2`.
    pub c: f64,
    pub pairs: Vec<PairCheck>,
    pub holds: bool,
}

/// Checks whether calibrated values have equal variances across groups,
/// which happens exactly when `ω_i² - ω_j² = c (μ_j² - μ_i²)` for all pairs.
/// Pairs are compared with tolerance `tol` relative to the larger side.
pub fn homoscedasticity_condition(
    design: &OneWayDesign,
    p: &MixtureParams,
    tol: f64,
) -> Result<Homoscedasticity> {
    design.validate()?;
    p.validate()?;
    let k2 = p.kappa2();
    if !(k2 > 0.0) {
        return Err(Error::Degenerate("slope has zero second moment".into()));
    }
    let c = p.sigma1 * p.sigma1 / k2;
    let k = design.k();
    let mut pairs = Vec::with_capacity(k * (k - 1) / 2);
    for i in 0..k {
        for j in i + 1..k {
            let (wi, wj) = (design.sds[i], design.sds[j]);
            let (mi, mj) = (design.means[i], design.means[j]);
            let lhs = wi * wi - wj * wj;
            let rhs = c * (mj * mj - mi * mi);
            let scale = lhs.abs().max(rhs.abs()).max(wi * wi).max(wj * wj);
            pairs.push(PairCheck {
                i,
                j,
                lhs,
                rhs,
                holds: (lhs - rhs).abs() <= tol * scale,
            });
        }
    }
    let holds = pairs.iter().all(|pc| pc.holds);
    Ok(Homoscedasticity { c, pairs, holds })
}

/// Sampling results of the one-way statistics over replications.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OneWayMc {
    pub f: Vec<f64>,
    pub bartlett: Vec<f64>,
    pub cochran: Vec<f64>,
    pub hartley: Vec<f64>,
    /// Largest relative gap between a statistic on `Y` and on `Z`.
    pub max_identity_gap: f64,
    /// Mean of `S_i²` per group.
    pub group_s2: Vec<Estimate>,
    /// Variance of the first value of each group.
    pub group_var_y: Vec<Estimate>,
}

struct Rep {
    f: f64,
    tests: VarianceTests,
    gap: f64,
    s2: Vec<f64>,
    first: Vec<f64>,
}

fn rel_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

/// Simulates the layout. With `p = Some(..)` every replication draws one
/// calibration and projects all readings through it; with `None` the
/// readings are used as they are.
pub fn mc_oneway<E: BlockExecutor + ?Sized>(
    design: &OneWayDesign,
    p: Option<&MixtureParams>,
    cfg: &McConfig,
    exec: &E,
) -> Result<OneWayMc> {
    design.validate()?;
    if let Some(p) = p {
        p.validate()?;
    }
    let sizes = &design.sizes;
    let reps = replicate(cfg, 0, exec, |rng| -> Result<Rep> {
        let (b0, b1) = match p {
            Some(p) => draw_coefficients(p, &cfg.mode, rng),
            None => (0.0, 1.0),
        };
        let mut z = Vec::with_capacity(design.total());
        for ((&s, m), w) in sizes.iter().zip(&design.means).zip(&design.sds) {
            z.extend((0..s).map(|_| rng.normal(*m, *w)));
        }
        let y: Vec<f64> = z.iter().map(|v| b0 + b1 * v).collect();
        let dy = decompose(&y, sizes)?;
        let dz = decompose(&z, sizes)?;
        let s2y = group_variances(&y, sizes)?;
        let s2z = group_variances(&z, sizes)?;
        let ty = variance_tests(&s2y, sizes)?;
        let tz = variance_tests(&s2z, sizes)?;
        let gap = [
            rel_gap(dy.f_statistic, dz.f_statistic),
            rel_gap(ty.bartlett, tz.bartlett),
            rel_gap(ty.cochran, tz.cochran),
            rel_gap(ty.hartley, tz.hartley),
        ]
        .into_iter()
        .fold(0.0, f64::max);
        let first = groups(&y, sizes).map(|g| g[0]).collect();
        Ok(Rep {
            f: dy.f_statistic,
            tests: ty,
            gap,
            s2: s2y,
            first,
        })
    })?;
    let k = design.k();
    let mut out = OneWayMc {
        f: Vec::with_capacity(reps.len()),
        bartlett: Vec::with_capacity(reps.len()),
        cochran: Vec::with_capacity(reps.len()),
        hartley: Vec::with_capacity(reps.len()),
        max_identity_gap: 0.0,
        group_s2: Vec::new(),
        group_var_y: Vec::new(),
    };
    let mut s2m = alloc::vec![Moments::default(); k];
    let mut firstm = alloc::vec![Moments::default(); k];
    for r in reps {
        let r = r?;
        out.f.push(r.f);
        out.bartlett.push(r.tests.bartlett);
        out.cochran.push(r.tests.cochran);
        out.hartley.push(r.tests.hartley);
        out.max_identity_gap = out.max_identity_gap.max(r.gap);
        for i in 0..k {
            s2m[i].push(r.s2[i]);
            firstm[i].push(r.first[i]);
        }
    }
    out.group_s2 = s2m.iter().map(Moments::mean_estimate).collect();
    out.group_var_y = firstm.iter().map(Moments::variance_estimate).collect();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_examples() {
        let d = decompose(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0], &[3, 3]).unwrap();
        assert_eq!((d.ss1, d.ss2, d.f_statistic), (13.5, 4.0, 13.5));
        assert!((d.ss0 + d.ss1 + d.ss2 - d.total).abs() < 1e-12);
        assert!(decompose(&[2.0; 6], &[3, 3]).is_err());
        assert!(decompose(&[2.0; 6], &[3, 2]).is_err());

        let t = variance_tests(&[1.0, 4.0], &[5, 5]).unwrap();
        assert_eq!((t.cochran, t.hartley), (0.8, 4.0));
        let t = variance_tests(&[2.0; 4], &[3, 4, 5, 6]).unwrap();
        assert_eq!((t.cochran, t.hartley), (0.25, 1.0));
        assert!(t.bartlett.abs() < 1e-12);
        assert!(variance_tests(&[1.0, 0.0], &[3, 3]).is_err());
    }

    #[test]
    fn noncentrality_and_bias_substitutions() {
        let d = OneWayDesign::new(
            alloc::vec![3, 3],
            alloc::vec![0.0, 1.0],
            alloc::vec![1.0, 1.0],
        )
        .unwrap();
        assert_eq!(f_noncentrality(&d).unwrap(), 1.5);
        let hetero = OneWayDesign::new(
            alloc::vec![3, 3],
            alloc::vec![0.0, 1.0],
            alloc::vec![1.0, 2.0],
        )
        .unwrap();
        assert!(f_power(&hetero, 0.05, &QuadSpec::default()).is_err());

        let g = OneWayDesign::new(
            alloc::vec![4, 4],
            alloc::vec![2.0, 0.0],
            alloc::vec![1.0, 1.0],
        )
        .unwrap();
        let b = group_variance_bias(&g, &MixtureParams::unit(0.0)).unwrap();
        assert_eq!(b[0].bias, -5.0);
        assert_eq!(b[1].bias, -1.0);
    }
}
