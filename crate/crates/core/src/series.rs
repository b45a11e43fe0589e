//! Summation of the infinite series behind the noncentral laws.
//!
//! Every series here is summed outward from its largest term, with an
//! explicit bound on the discarded tail. The configured minimum term count is
//! always honored; once it is reached, summation continues until the tail
//! bound drops below the tolerance, and failing that within `max_terms` is an
//! [`Error::Accuracy`].

use crate::error::{Error, Result};
use crate::special::ln_gamma;
#[allow(unused_imports)]
use num_traits::Float;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesCfg {
    pub min_terms: usize,
    pub max_terms: usize,
    /// Absolute bound on the discarded tail.
    pub tol: f64,
}

impl SeriesCfg {
    pub fn new(min_terms: usize, max_terms: usize, tol: f64) -> Self {
        Self {
            min_terms,
            max_terms,
            tol,
        }
    }
}

/// Sums `Σ_j t_j` for a series whose term ratio `t_{j+1} / t_j` decreases in
/// absolute value (log-concave magnitudes). Terms may alternate in sign.
///
/// `log_term(j)` returns `(ln |t_j|, sign(t_j))`; `ratio(j)` returns
/// `t_{j+1} / t_j`.
pub fn sum_log_concave<L, R>(
    log_term: L,
    ratio: R,
    cfg: &SeriesCfg,
    context: &'static str,
) -> Result<f64>
where
    L: Fn(usize) -> (f64, f64),
    R: Fn(usize) -> f64,
{
    let peak = find_peak(&ratio);
    let (ln_peak, sign_peak) = log_term(peak);
    if ln_peak == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    let scale = ln_peak.exp();
    let half_tol = 0.5 * cfg.tol;

    let mut sum = 1.0;
    let mut count = 1usize;

    // upward from the peak
    let mut rel = 1.0;
    let mut j = peak;
    loop {
        let r = ratio(j);
        rel *= r;
        j += 1;
        sum += rel;
        count += 1;
        let rho = ratio(j).abs();
        let bound = if rho < 1.0 {
            rel.abs() * rho / (1.0 - rho) * scale
        } else {
            f64::INFINITY
        };
        if (bound <= half_tol || rel == 0.0) && count >= cfg.min_terms {
            break;
        }
        if count > cfg.max_terms {
            return Err(Error::Accuracy {
                context,
                bound,
                tol: cfg.tol,
            });
        }
    }

    // downward from the peak
    let mut rel = 1.0;
    let mut j = peak;
    while j > 0 {
        rel /= ratio(j - 1);
        j -= 1;
        sum += rel;
        count += 1;
        if j == 0 {
            break;
        }
        let rho = 1.0 / ratio(j - 1).abs();
        let bound = if rho < 1.0 {
            rel.abs() * rho / (1.0 - rho) * scale
        } else {
            f64::INFINITY
        };
        if bound <= half_tol {
            break;
        }
        if count > cfg.max_terms {
            return Err(Error::Accuracy {
                context,
                bound,
                tol: cfg.tol,
            });
        }
    }

    Ok(sign_peak * sum * scale)
}

/// First index whose forward ratio drops below one in magnitude.
fn find_peak<R: Fn(usize) -> f64>(ratio: &R) -> usize {
    if ratio(0).abs() < 1.0 {
        return 0;
    }
    let mut lo = 0usize;
    let mut hi = 1usize;
    while ratio(hi).abs() >= 1.0 {
        lo = hi;
        hi = hi.saturating_mul(2);
        if hi >= 1usize << 60 {
            return hi;
        }
    }
    // ratio(lo) >= 1 > ratio(hi)
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ratio(mid).abs() >= 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// A sequence `F_j` in `[0, 1]`, nonincreasing in `j`, that can be stepped
/// in either direction from a starting index.
pub trait Ladder {
    fn value(&self) -> f64;
    fn step_up(&mut self);
    fn step_down(&mut self);
}

/// `I_y(a0 + j, b)` stepped with the two-term recurrence
/// `I_y(a+1, b) = I_y(a, b) - y^a (1-y)^b / (a B(a, b))`.
#[derive(Debug, Clone, Copy)]
pub struct BetaLadder {
    y: f64,
    b: f64,
    a: f64,
    value: f64,
    /// `y^a (1-y)^b / (a B(a, b))` at the current `a`.
    gap: f64,
}

impl BetaLadder {
    pub fn new(a0: f64, b: f64, y: f64, j: usize) -> Self {
        let a = a0 + j as f64;
        let value = crate::special::beta_inc(a, b, y);
        let gap = if y <= 0.0 || y >= 1.0 {
            0.0
        } else {
            (a * y.ln() + b * (-y).ln_1p() - crate::special::ln_beta(a, b)).exp() / a
        };
        Self {
            y,
            b,
            a,
            value,
            gap,
        }
    }
}

impl Ladder for BetaLadder {
    fn value(&self) -> f64 {
        self.value.clamp(0.0, 1.0)
    }

    fn step_up(&mut self) {
        self.value -= self.gap;
        self.gap *= self.y * (self.a + self.b) / (self.a + 1.0);
        self.a += 1.0;
    }

    fn step_down(&mut self) {
        let a = self.a;
        if self.y > 0.0 {
            self.gap *= a / (self.y * (a - 1.0 + self.b));
        }
        self.a -= 1.0;
        self.value += self.gap;
    }
}

/// Sums `Σ_j w_j F_j` with Poisson-type weights
/// `w_j = e^{-m} m^{j+θ} / Γ(j+θ+1)` and a nonincreasing ladder `F_j ∈ [0, 1]`.
///
/// `θ = 0` gives ordinary Poisson weights, `θ = 1/2` the half-integer
/// weights of the noncentral t expansion.
pub fn poisson_weighted_sum<L, M>(
    m: f64,
    theta: f64,
    ladder_at: M,
    cfg: &SeriesCfg,
    context: &'static str,
) -> Result<f64>
where
    L: Ladder,
    M: Fn(usize) -> L,
{
    if m <= 0.0 {
        return Ok(if theta == 0.0 {
            ladder_at(0).value()
        } else {
            0.0
        });
    }
    let mode = (m - theta).floor().max(0.0) as usize;
    let ln_w = |j: usize| -m + (j as f64 + theta) * m.ln() - ln_gamma(j as f64 + theta + 1.0);
    let w_mode = ln_w(mode).exp();
    let half_tol = 0.5 * cfg.tol;

    let start = ladder_at(mode);
    let mut sum = w_mode * start.value();
    let mut count = 1usize;

    // upward
    let mut ladder = ladder_at(mode);
    let mut w = w_mode;
    let mut j = mode;
    loop {
        let w_next = w * m / (j as f64 + theta + 1.0);
        let rho = m / (j as f64 + theta + 2.0);
        let bound = if rho < 1.0 {
            ladder.value() * w_next / (1.0 - rho)
        } else {
            f64::INFINITY
        };
        if bound <= half_tol && count >= cfg.min_terms {
            break;
        }
        if count > cfg.max_terms {
            return Err(Error::Accuracy {
                context,
                bound,
                tol: cfg.tol,
            });
        }
        ladder.step_up();
        j += 1;
        w = w_next;
        sum += w * ladder.value();
        count += 1;
    }

    // downward
    let mut ladder = start;
    let mut w = w_mode;
    let mut j = mode;
    while j > 0 {
        // mass of indices 0..j-1
        let w_prev = w * (j as f64 + theta) / m;
        let rho = (j as f64 - 1.0 + theta) / m;
        let bound = if rho < 1.0 {
            w_prev / (1.0 - rho)
        } else {
            f64::INFINITY
        };
        if bound <= half_tol {
            break;
        }
        if count > cfg.max_terms {
            return Err(Error::Accuracy {
                context,
                bound,
                tol: cfg.tol,
            });
        }
        ladder.step_down();
        j -= 1;
        w = w_prev;
        sum += w * ladder.value();
        count += 1;
    }

    Ok(sum)
}
