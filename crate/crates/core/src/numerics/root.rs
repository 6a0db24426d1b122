use crate::error::{Error, Result};

/// Solver policy for `x / (1 - e^-x) = ratio`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootConfig {
    /// Absolute tolerance on the root.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Initial bracket `(lo, hi)`.
    pub bracket: (f64, f64),
    /// How many times `hi` may be doubled before giving up.
    pub max_widenings: u32,
}

impl Default for RootConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-12,
            max_iterations: 200,
            bracket: (1e-9, 50.0),
            max_widenings: 24,
        }
    }
}

/// `x / (1 - e^-x)`: mean of a zero-truncated Poisson with mean parameter `x`.
pub fn truncated_mean_ratio(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x / -(-x).exp_m1()
    }
}

/// Solves `x / (1 - e^-x) = ratio` for `x > 0`.
///
/// Bracketed regula falsi with a bisection fallback whenever a step fails to
/// halve the bracket. `ratio` at or below the value at the lower bracket end is
/// degenerate (the root tends to zero and the population estimate diverges).
pub fn solve_truncated_rate(ratio: f64, config: &RootConfig) -> Result<f64> {
    let (mut lo, mut hi) = config.bracket;
    if !(config.tolerance > 0.0 && lo > 0.0 && lo < hi) {
        return Err(Error::domain(
            "root config needs tolerance > 0 and 0 < lo < hi",
        ));
    }
    if !ratio.is_finite() {
        return Err(Error::domain(format!("ratio must be finite, got {ratio}")));
    }
    let f = |x: f64| truncated_mean_ratio(x) - ratio;

    let mut f_lo = f(lo);
    if f_lo >= 0.0 {
        return Err(Error::Degenerate(format!(
            "mean events per observed subject {ratio} gives a vanishing rate"
        )));
    }
    let mut f_hi = f(hi);
    let mut widenings = 0;
    while f_hi < 0.0 {
        if widenings == config.max_widenings {
            return Err(Error::BracketExhausted { ratio, hi });
        }
        lo = hi;
        f_lo = f_hi;
        hi *= 2.0;
        f_hi = f(hi);
        widenings += 1;
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }

    let mut x = 0.5 * (lo + hi);
    for _ in 0..config.max_iterations {
        let width = hi - lo;
        let floor = config.tolerance + 4.0 * f64::EPSILON * hi.abs();
        if width <= floor {
            break;
        }
        let secant = hi - f_hi * (hi - lo) / (f_hi - f_lo);
        x = if secant > lo && secant < hi {
            secant
        } else {
            0.5 * (lo + hi)
        };
        let fx = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx < 0.0 {
            lo = x;
            f_lo = fx;
        } else {
            hi = x;
            f_hi = fx;
        }
        if hi - lo > 0.5 * width {
            let mid = 0.5 * (lo + hi);
            let fm = f(mid);
            if fm == 0.0 {
                return Ok(mid);
            }
            if fm < 0.0 {
                lo = mid;
                f_lo = fm;
            } else {
                hi = mid;
                f_hi = fm;
            }
        }
    }
    // Final interpolation inside the converged bracket.
    let secant = hi - f_hi * (hi - lo) / (f_hi - f_lo);
    if secant >= lo && secant <= hi {
        x = secant;
    }
    Ok(x)
}
