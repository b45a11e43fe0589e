//! Seeded Monte Carlo engine for calibrated measurements.
//!
//! Replications are grouped in blocks of [`BLOCK_SIZE`]. Block `b` draws from
//! ChaCha8 seeded with `seed_from_u64(seed)` on stream `b`, so every block is
//! an independent substream and results do not depend on how blocks are
//! scheduled. Normals come from the Box–Muller transform, two uniforms per
//! pair, so the number of raw words consumed per draw is fixed.

use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{invalid, Error, Result};
use crate::model::MixtureParams;
use crate::power::tsq_critical;

/// Replications per RNG substream.
pub const BLOCK_SIZE: usize = 1024;

/// Identifies the sampling scheme; bump when any draw order changes.
pub const STREAM_VERSION: &str = "chacha8-block1024-boxmuller-v1";

/// Standard normal source over one ChaCha8 substream.
#[derive(Debug, Clone)]
pub struct Normals {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl Normals {
    pub fn for_stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { rng, spare: None }
    }

    /// Uniform on `(0, 1]` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn standard(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let r = (-2.0 * self.uniform().ln()).sqrt();
        let theta = 2.0 * core::f64::consts::PI * self.uniform();
        self.spare = Some(r * theta.sin());
        r * theta.cos()
    }

    pub fn normal(&mut self, mean: f64, sd: f64) -> f64 {
        mean + sd * self.standard()
    }
}

/// Runs independent blocks, possibly in parallel. Results come back in
/// block order.
pub trait BlockExecutor {
    fn map_blocks<R, F>(&self, blocks: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send;
}

/// Runs blocks one after another on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Serial;

impl BlockExecutor for Serial {
    fn map_blocks<R, F>(&self, blocks: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        (0..blocks).map(f).collect()
    }
}

/// How the calibration coefficients are drawn in each replication.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum SimMode {
    /// `b0 ~ N(β0, σ0²)` and `b1 ~ N(β1, σ1²)`, independent.
    CoefficientLevel,
    /// A fresh calibration set `u = β0 + β1 (x - x̄) + σ_U e` on the fixed
    /// design `x`, fitted by least squares; `σ0` and `σ1` of the parameters
    /// are ignored.
    FullCalibration { design: Vec<f64>, sigma_u: f64 },
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct McConfig {
    pub replications: usize,
    pub seed: u64,
    #[cfg_attr(feature = "serde", serde(default = "coefficient_level"))]
    pub mode: SimMode,
}

#[cfg(feature = "serde")]
fn coefficient_level() -> SimMode {
    SimMode::CoefficientLevel
}

impl McConfig {
    pub fn new(replications: usize, seed: u64) -> Self {
        Self {
            replications,
            seed,
            mode: SimMode::CoefficientLevel,
        }
    }

    pub fn with_mode(mut self, mode: SimMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(invalid("replications must be at least 1"));
        }
        if let SimMode::FullCalibration { design, sigma_u } = &self.mode {
            design_moments(design)?;
            if !(*sigma_u >= 0.0 && sigma_u.is_finite()) {
                return Err(invalid("sigma_u must be finite and nonnegative"));
            }
        }
        Ok(())
    }

    fn blocks(&self) -> usize {
        self.replications.div_ceil(BLOCK_SIZE)
    }

    fn block_len(&self, b: usize) -> usize {
        (self.replications - b * BLOCK_SIZE).min(BLOCK_SIZE)
    }
}

fn design_moments(design: &[f64]) -> Result<(f64, f64)> {
    if design.len() < 3 {
        return Err(invalid("calibration design needs at least 3 points"));
    }
    let xbar = design.iter().sum::<f64>() / design.len() as f64;
    let sxx: f64 = design.iter().map(|x| (x - xbar) * (x - xbar)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Degenerate("calibration design has no spread".into()));
    }
    Ok((xbar, sxx))
}

/// Parameters whose coefficient spreads match a full calibration on
/// `design`: `σ0 = σ_U/sqrt(n0)`, `σ1 = σ_U/sqrt(S_xx)`.
pub fn calibration_params(
    p: &MixtureParams,
    design: &[f64],
    sigma_u: f64,
) -> Result<MixtureParams> {
    let (_, sxx) = design_moments(design)?;
    MixtureParams::new(
        p.n,
        p.beta0,
        sigma_u / (design.len() as f64).sqrt(),
        p.mu_z,
        p.sigma_z,
        p.beta1,
        sigma_u / sxx.sqrt(),
    )
}

/// Draws one pair `(b0, b1)` of calibration coefficients.
pub fn draw_coefficients(p: &MixtureParams, mode: &SimMode, rng: &mut Normals) -> (f64, f64) {
    match mode {
        SimMode::CoefficientLevel => {
            if p.known_coefficients {
                (p.beta0, p.beta1)
            } else {
                (rng.normal(p.beta0, p.sigma0), rng.normal(p.beta1, p.sigma1))
            }
        }
        SimMode::FullCalibration { design, sigma_u } => {
            let nf = design.len() as f64;
            let xbar = design.iter().sum::<f64>() / nf;
            let (mut su, mut sxu, mut sxx) = (0.0, 0.0, 0.0);
            for &x in design {
                let dx = x - xbar;
                let u = rng.normal(p.beta0 + p.beta1 * dx, *sigma_u);
                su += u;
                sxu += dx * u;
                sxx += dx * dx;
            }
            (su / nf, sxu / sxx)
        }
    }
}

/// Fills `out` with `n` calibrated values `b0 + b1 Z_i`, all sharing one
/// coefficient draw, and returns that draw.
pub fn draw_calibrated_sample(
    p: &MixtureParams,
    mode: &SimMode,
    rng: &mut Normals,
    out: &mut Vec<f64>,
) -> (f64, f64) {
    let (b0, b1) = draw_coefficients(p, mode, rng);
    out.clear();
    out.extend((0..p.n).map(|_| b0 + b1 * rng.normal(p.mu_z, p.sigma_z)));
    (b0, b1)
}

/// Runs `f` once per replication, each block on its own substream offset
/// by `stream_base`, and returns the results in replication order.
pub fn replicate<R, F, E>(cfg: &McConfig, stream_base: u64, exec: &E, f: F) -> Result<Vec<R>>
where
    R: Send,
    F: Fn(&mut Normals) -> R + Sync + Send,
    E: BlockExecutor + ?Sized,
{
    cfg.validate()?;
    let per_block = exec.map_blocks(cfg.blocks(), |b| {
        let mut rng = Normals::for_stream(cfg.seed, stream_base + b as u64);
        (0..cfg.block_len(b))
            .map(|_| f(&mut rng))
            .collect::<Vec<R>>()
    });
    Ok(per_block.into_iter().flatten().collect())
}

/// Running moments up to order four; `merge` combines partial results
/// exactly, so block sums can be reduced in any grouping.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    pub count: u64,
    pub mean: f64,
    m2: f64,
    m3: f64,
    m4: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        let n1 = self.count as f64;
        self.count += 1;
        let n = self.count as f64;
        let d = x - self.mean;
        let dn = d / n;
        let dn2 = dn * dn;
        let t = d * dn * n1;
        self.mean += dn;
        self.m4 += t * dn2 * (n * n - 3.0 * n + 3.0) + 6.0 * dn2 * self.m2 - 4.0 * dn * self.m3;
        self.m3 += t * dn * (n - 2.0) - 3.0 * dn * self.m2;
        self.m2 += t;
    }

    pub fn merge(&self, o: &Moments) -> Moments {
        if self.count == 0 {
            return *o;
        }
        if o.count == 0 {
            return *self;
        }
        let (na, nb) = (self.count as f64, o.count as f64);
        let n = na + nb;
        let d = o.mean - self.mean;
        let d2 = d * d;
        let m2 = self.m2 + o.m2 + d2 * na * nb / n;
        let m3 = self.m3
            + o.m3
            + d2 * d * na * nb * (na - nb) / (n * n)
            + 3.0 * d * (na * o.m2 - nb * self.m2) / n;
        let m4 = self.m4
            + o.m4
            + d2 * d2 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n)
            + 6.0 * d2 * (na * na * o.m2 + nb * nb * self.m2) / (n * n)
            + 4.0 * d * (na * o.m3 - nb * self.m3) / n;
        Moments {
            count: self.count + o.count,
            mean: self.mean + d * nb / n,
            m2,
            m3,
            m4,
        }
    }

    pub fn from_slice(xs: &[f64]) -> Moments {
        let mut m = Moments::default();
        xs.iter().for_each(|&x| m.push(x));
        m
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        self.m2 / (self.count - 1) as f64
    }

    pub fn skewness(&self) -> f64 {
        let n = self.count as f64;
        (self.m3 / n) / (self.m2 / n).powf(1.5)
    }

    pub fn kurtosis(&self) -> f64 {
        let n = self.count as f64;
        (self.m4 / n) / ((self.m2 / n) * (self.m2 / n))
    }

    pub fn mean_estimate(&self) -> Estimate {
        Estimate::new(
            self.mean,
            (self.variance() / self.count as f64).sqrt(),
            self.count,
        )
    }

    /// Sample variance with the large-sample standard error
    /// `sqrt((μ4 - σ⁴) / R)`.
    pub fn variance_estimate(&self) -> Estimate {
        let n = self.count as f64;
        let v = self.variance();
        let mu2 = self.m2 / n;
        let se = ((self.m4 / n - mu2 * mu2).max(0.0) / n).sqrt();
        Estimate::new(v, se, self.count)
    }

    /// Sample skewness with the normal-theory standard error `sqrt(6/R)`.
    pub fn skewness_estimate(&self) -> Estimate {
        Estimate::new(
            self.skewness(),
            (6.0 / self.count as f64).sqrt(),
            self.count,
        )
    }
}

/// A Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Estimate {
    pub estimate: f64,
    pub std_error: f64,
    pub replications: u64,
}

impl Estimate {
    pub fn new(estimate: f64, std_error: f64, replications: u64) -> Self {
        Self {
            estimate,
            std_error,
            replications,
        }
    }

    /// Distance from `target` in standard errors.
    pub fn z_score(&self, target: f64) -> f64 {
        (self.estimate - target) / self.std_error
    }

    pub fn within(&self, target: f64, n_se: f64) -> bool {
        (self.estimate - target).abs() <= n_se * self.std_error
    }
}

/// Functionals tracked over replications of a calibrated sample.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct McSummary {
    pub replications: u64,
    pub mean_ybar: Estimate,
    pub var_ybar: Estimate,
    pub skew_ybar: Estimate,
    pub mean_s2: Estimate,
    /// Variance of a single calibrated value `Y_1`.
    pub var_y: Estimate,
    /// Correlation of `Y_1` and `Y_2` across replications.
    pub corr_y12: Estimate,
    /// Rate of `t0² > F(1, ν; 1 - α)` when a null value was supplied.
    pub rejection_rate: Option<Estimate>,
}

/// Optional t test run on every replication.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TsqTest {
    pub mu_y0: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone, Copy, Default)]
struct Acc {
    ybar: Moments,
    s2: Moments,
    y1: Moments,
    y2: Moments,
    c12: f64,
    rejections: u64,
}

impl Acc {
    fn merge(&self, o: &Acc) -> Acc {
        let (na, nb) = (self.y1.count as f64, o.y1.count as f64);
        let n = na + nb;
        let c12 = if n == 0.0 {
            0.0
        } else {
            self.c12 + o.c12 + (o.y1.mean - self.y1.mean) * (o.y2.mean - self.y2.mean) * na * nb / n
        };
        Acc {
            ybar: self.ybar.merge(&o.ybar),
            s2: self.s2.merge(&o.s2),
            y1: self.y1.merge(&o.y1),
            y2: self.y2.merge(&o.y2),
            c12,
            rejections: self.rejections + o.rejections,
        }
    }
}

fn mean_and_var(y: &[f64]) -> (f64, f64) {
    let n = y.len() as f64;
    let m = y.iter().sum::<f64>() / n;
    let ss: f64 = y.iter().map(|v| (v - m) * (v - m)).sum();
    (m, ss / (n - 1.0))
}

pub fn simulate_summary<E: BlockExecutor + ?Sized>(
    p: &MixtureParams,
    cfg: &McConfig,
    test: Option<TsqTest>,
    exec: &E,
) -> Result<McSummary> {
    p.validate()?;
    cfg.validate()?;
    if p.n < 2 {
        return Err(invalid("summaries need n >= 2"));
    }
    let critical = match test {
        Some(t) => Some(tsq_critical((p.n - 1) as f64, t.alpha)?),
        None => None,
    };
    let blocks = exec.map_blocks(cfg.blocks(), |b| {
        let mut rng = Normals::for_stream(cfg.seed, b as u64);
        let mut acc = Acc::default();
        let mut y = Vec::with_capacity(p.n);
        for _ in 0..cfg.block_len(b) {
            draw_calibrated_sample(p, &cfg.mode, &mut rng, &mut y);
            let (m, s2) = mean_and_var(&y);
            acc.ybar.push(m);
            acc.s2.push(s2);
            let dx = y[0] - acc.y1.mean;
            acc.y1.push(y[0]);
            acc.y2.push(y[1]);
            acc.c12 += dx * (y[1] - acc.y2.mean);
            if let (Some(t), Some(c)) = (test, critical) {
                let t2 = p.n as f64 * (m - t.mu_y0) * (m - t.mu_y0) / s2;
                if t2 > c {
                    acc.rejections += 1;
                }
            }
        }
        acc
    });
    let acc = blocks.iter().fold(Acc::default(), |a, b| a.merge(b));
    let r = acc.y1.count;
    let rf = r as f64;
    let rho = acc.c12 / (acc.y1.variance() * acc.y2.variance()).sqrt() / (rf - 1.0);
    let rejection_rate = test.map(|_| {
        let rate = acc.rejections as f64 / rf;
        Estimate::new(rate, (rate * (1.0 - rate) / rf).sqrt(), r)
    });
    Ok(McSummary {
        replications: r,
        mean_ybar: acc.ybar.mean_estimate(),
        var_ybar: acc.ybar.variance_estimate(),
        skew_ybar: acc.ybar.skewness_estimate(),
        mean_s2: acc.s2.mean_estimate(),
        var_y: acc.y1.variance_estimate(),
        corr_y12: Estimate::new(rho, (1.0 - rho * rho) / rf.sqrt(), r),
        rejection_rate,
    })
}

/// Empirical `Var(Ȳ_n)` at one sample size, with its model value.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CurvePoint {
    pub n: usize,
    pub var_ybar: Estimate,
    pub model: f64,
    /// `σ0² + σ1² μ_Z²`, the level the curve flattens to.
    pub floor: f64,
}

/// Empirical variance of `Ȳ_n` across `n_grid`.
///
/// Given the coefficients, `Ȳ = b0 + b1 Z̄` with `Z̄ ~ N(μ_Z, σ_Z²/n)`, so
/// `Z̄` is drawn directly and the cost does not grow with `n`. Grid entry
/// `i` uses streams starting at `i << 32`.
pub fn mc_inconsistency_curve<E: BlockExecutor + ?Sized>(
    p: &MixtureParams,
    n_grid: &[usize],
    cfg: &McConfig,
    exec: &E,
) -> Result<Vec<CurvePoint>> {
    p.validate()?;
    if n_grid.is_empty() || n_grid.windows(2).any(|w| w[0] >= w[1]) || n_grid[0] == 0 {
        return Err(invalid("n grid must be positive and strictly increasing"));
    }
    n_grid
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let pn = p.with_n(n);
            let sd = p.sigma_z / (n as f64).sqrt();
            let draws = replicate(cfg, (i as u64) << 32, exec, |rng| {
                let (b0, b1) = draw_coefficients(&pn, &cfg.mode, rng);
                b0 + b1 * rng.normal(p.mu_z, sd)
            })?;
            Ok(CurvePoint {
                n,
                var_ybar: Moments::from_slice(&draws).variance_estimate(),
                model: pn.var_ybar(),
                floor: pn.shared_variance(),
            })
        })
        .collect()
}

/// Statistic recorded per replication by [`mc_statistic_sample`].
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "statistic", rename_all = "snake_case"))]
pub enum Statistic {
    Mean,
    SampleVariance,
    /// `ν S² / (σ1² σ_Z²)`, the scale of the variance mixture.
    ScaledVariance,
    Tsq {
        mu_y0: f64,
    },
}

pub fn mc_statistic_sample<E: BlockExecutor + ?Sized>(
    p: &MixtureParams,
    stat: Statistic,
    cfg: &McConfig,
    exec: &E,
) -> Result<Vec<f64>> {
    p.validate()?;
    if p.n < 2 {
        return Err(invalid("statistics need n >= 2"));
    }
    if matches!(stat, Statistic::ScaledVariance) && !(p.sigma1 > 0.0 && p.sigma_z > 0.0) {
        return Err(Error::Degenerate(
            "scaled variance needs sigma1 > 0 and sigma_z > 0".into(),
        ));
    }
    let nf = p.n as f64;
    let scale = (nf - 1.0) / (p.sigma1 * p.sigma1 * p.sigma_z * p.sigma_z);
    replicate(cfg, 0, exec, |rng| {
        let mut y = Vec::with_capacity(p.n);
        draw_calibrated_sample(p, &cfg.mode, rng, &mut y);
        let (m, s2) = mean_and_var(&y);
        match stat {
            Statistic::Mean => m,
            Statistic::SampleVariance => s2,
            Statistic::ScaledVariance => scale * s2,
            Statistic::Tsq { mu_y0 } => nf * (m - mu_y0) * (m - mu_y0) / s2,
        }
    })
}

/// Kolmogorov–Smirnov distance between a sample and a CDF. The sample is
/// sorted in place.
pub fn ks_distance<F>(sample: &mut [f64], cdf: F) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    Ok(ks_bounds(sample, cdf, 1)?.upper)
}

/// Bracket on the one-sample Kolmogorov–Smirnov distance.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KsBounds {
    pub lower: f64,
    pub upper: f64,
    pub evaluations: usize,
}

/// Kolmogorov–Smirnov distance with the CDF evaluated only at every
/// `stride`-th order statistic (and the last). Between evaluated points the
/// CDF is bounded by its values at the neighbours, which gives a rigorous
/// bracket; `stride = 1` is exact.
pub fn ks_bounds<F>(sample: &mut [f64], mut cdf: F, stride: usize) -> Result<KsBounds>
where
    F: FnMut(f64) -> Result<f64>,
{
    if sample.is_empty() {
        return Err(invalid("empty sample"));
    }
    if stride == 0 {
        return Err(invalid("stride must be positive"));
    }
    if sample.iter().any(|x| x.is_nan()) {
        return Err(invalid("sample contains NaN"));
    }
    sample.sort_by(f64::total_cmp);
    let n = sample.len();
    let nf = n as f64;
    let mut idx: Vec<usize> = (0..n).step_by(stride).collect();
    if *idx.last().unwrap_or(&0) != n - 1 {
        idx.push(n - 1);
    }
    let values = idx
        .iter()
        .map(|&i| cdf(sample[i]))
        .collect::<Result<Vec<f64>>>()?;
    let mut lower: f64 = 0.0;
    for (&i, &f) in idx.iter().zip(&values) {
        lower = lower.max(f - i as f64 / nf).max((i + 1) as f64 / nf - f);
    }
    let mut upper = lower;
    for (w, f) in idx.windows(2).zip(values.windows(2)) {
        let (a, b) = (w[0], w[1]);
        if b > a + 1 {
            upper = upper
                .max(f[1] - (a + 1) as f64 / nf)
                .max(b as f64 / nf - f[0]);
        }
    }
    Ok(KsBounds {
        lower,
        upper,
        evaluations: idx.len(),
    })
}

/// Two-sample Kolmogorov–Smirnov distance; both samples are sorted in place.
pub fn ks_two_sample(a: &mut [f64], b: &mut [f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(invalid("empty sample"));
    }
    if a.iter().chain(b.iter()).any(|x| x.is_nan()) {
        return Err(invalid("sample contains NaN"));
    }
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}

/// Asymptotic critical value `sqrt(-ln(α/2)/2) / sqrt(n)` of the one-sample
/// statistic; `1.63/sqrt(n)` at `α = 0.01`.
pub fn ks_band(n: usize, alpha: f64) -> f64 {
    (-(0.5 * alpha).ln() / 2.0).sqrt() / (n as f64).sqrt()
}

/// Asymptotic two-sample critical value at level `α`.
pub fn ks_band_two_sample(n: usize, m: usize, alpha: f64) -> f64 {
    let (n, m) = (n as f64, m as f64);
    (-(0.5 * alpha).ln() / 2.0).sqrt() * ((n + m) / (n * m)).sqrt()
}
