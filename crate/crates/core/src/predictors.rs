//! Temporal projection of frequency tables and prediction of new discoveries.
//!
//! Observing a Poisson process for a fraction `p = t / T` of the original
//! window thins each subject's count binomially, so a table known at `T`
//! projects to `t` by
//!
//! ```text
//! n_r(t) = sum_{k >= r} n_k(T) C(k, r) p^r (1 - p)^(k - r)
//! ```
//!
//! The unknown `n_0(T)` term is left out, so the `r = 0` entry is the change
//! in the unseen count contributed by observed subjects only. For `t > T` the
//! same sum becomes an alternating extrapolation; past `t = 2T` it no longer
//! contracts and results are tagged unstable.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::counts::{from_events, EventLog, Frequencies};
use crate::error::{Error, Result};
use crate::estimators::{binomial, EstimatorId};

/// A table projected from horizon `T` to time `t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Projection {
    pub horizon: f64,
    pub time: f64,
    /// `(r, n_r(t))` for `r = 0..=r_max`; the `r = 0` entry is the unseen increment.
    pub counts: Vec<(u64, f64)>,
    /// Set when `|1 - t/T| > 1`.
    pub unstable: bool,
}

impl Projection {
    pub fn unseen_increment(&self) -> f64 {
        self.counts.first().map_or(0.0, |&(_, v)| v)
    }

    pub fn get(&self, r: u64) -> f64 {
        self.counts
            .iter()
            .find(|&&(k, _)| k == r)
            .map_or(0.0, |&(_, v)| v)
    }
}

/// A scalar prediction with its extrapolation flag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Prediction {
    pub value: f64,
    pub unstable: bool,
}

/// Projects `table` (observed up to `horizon`) to time `t`.
///
/// `r_max` defaults to the largest stored multiplicity; higher `r` are zero.
pub fn mnatsakanian_project<F: Frequencies + ?Sized>(
    table: &F,
    horizon: f64,
    t: f64,
    r_max: Option<u64>,
) -> Result<Projection> {
    check_times(horizon, t)?;
    let r_max = r_max.unwrap_or_else(|| table.max_multiplicity().unwrap_or(0));
    let p = t / horizon;
    let q = (horizon - t) / horizon;
    let entries: Vec<(u64, f64)> = table.entries().collect();
    let counts = (0..=r_max)
        .map(|r| {
            let value = entries
                .iter()
                .filter(|&&(k, _)| k >= r)
                .map(|&(k, c)| c * binomial_term(k, r, p, q))
                .sum();
            (r, value)
        })
        .collect();
    Ok(Projection {
        horizon,
        time: t,
        counts,
        unstable: q.abs() > 1.0,
    })
}

/// `sum_{k>=1} n_k(T) (1 - t/T)^k`: the observed subjects' contribution to `n_0(t)`.
pub fn unseen_at<F: Frequencies + ?Sized>(table: &F, horizon: f64, t: f64) -> Result<Prediction> {
    check_times(horizon, t)?;
    let q = (horizon - t) / horizon;
    let value = table.entries().map(|(k, c)| c * pow(q, k)).sum();
    Ok(Prediction {
        value,
        unstable: q.abs() > 1.0,
    })
}

/// Expected number of new subjects discovered in a further window `tau`:
/// `sum_k (-1)^(k+1) (tau/T)^k n_k`.
pub fn efron_thisted_new<F: Frequencies + ?Sized>(
    table: &F,
    horizon: f64,
    tau: f64,
) -> Result<Prediction> {
    check_times(horizon, tau)?;
    let ratio = tau / horizon;
    let value = table
        .entries()
        .map(|(k, c)| {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            sign * pow(ratio, k) * c
        })
        .sum();
    Ok(Prediction {
        value,
        unstable: ratio > 1.0,
    })
}

/// Solow-Polasky prediction of new subjects after `m` further events.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolowPolasky {
    /// `(n_1^2 / 2n_2) [1 - (1 - 2n_2 / (n_1 n))^m]`.
    pub value: f64,
    /// The small-`m` approximation `m n_1 / n`.
    pub linear: f64,
    /// Whether `m < n n_1 / (2 n_2)`, where the linear form applies.
    pub linear_regime: bool,
}

pub fn solow_polasky_new<F: Frequencies + ?Sized>(table: &F, m: u64) -> Result<SolowPolasky> {
    let (n1, n2, n) = (table.count(1), table.count(2), table.events());
    if !(n1 > 0.0) {
        return Err(Error::inapplicable("solow-polasky", "n_1 = 0"));
    }
    if !(n2 > 0.0) {
        return Err(Error::inapplicable("solow-polasky", "n_2 = 0"));
    }
    let x = 2.0 * n2 / (n1 * n);
    // (1 - (1 - x)^m) / x as a geometric sum for small m.
    let factor = if m <= 64 {
        let keep = 1.0 - x;
        (0..m).fold(0.0, |acc, _| acc * keep + 1.0)
    } else {
        -(m as f64 * (-x).ln_1p()).exp_m1() / x
    };
    let m_f = m as f64;
    Ok(SolowPolasky {
        value: n1 / n * factor,
        linear: m_f * n1 / n,
        linear_regime: m_f < n * n1 / (2.0 * n2),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Axis {
    Time,
    SampleSize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvePoint {
    pub x: f64,
    /// `None` marks a gap where the estimator was inapplicable.
    pub value: Option<f64>,
    pub estimator: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredictionCurve {
    pub axis: Axis,
    /// Observation horizon (time axis) or sample size (sample-size axis).
    pub reference: f64,
    pub points: Vec<CurvePoint>,
}

impl PredictionCurve {
    pub fn gaps(&self) -> usize {
        self.points.iter().filter(|p| p.value.is_none()).count()
    }

    /// `x,value,estimator`, one row per non-gap point.
    pub fn write_csv<W: Write>(&self, mut writer: W) -> Result<()> {
        writeln!(writer, "x,value,estimator")?;
        for p in &self.points {
            if let Some(v) = p.value {
                writeln!(writer, "{},{},{}", p.x, v, p.estimator)?;
            }
        }
        Ok(())
    }
}

/// Replays an estimator over a grid of cut-off times.
///
/// Grid points are evaluated in parallel and assembled in grid order.
pub fn estimate_curve(
    log: &EventLog,
    grid: &[f64],
    estimator: EstimatorId,
) -> Result<PredictionCurve> {
    if grid.is_empty() {
        return Err(Error::domain("empty grid"));
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::domain("grid times must be strictly increasing"));
    }
    let points = grid
        .par_iter()
        .map(|&t| {
            let table = from_events(log, t)?;
            Ok(CurvePoint {
                x: t,
                value: estimator.evaluate(&table).ok().map(|e| e.value),
                estimator: estimator.to_string(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PredictionCurve {
        axis: Axis::Time,
        reference: log.horizon(),
        points,
    })
}

/// `t_i = T i / size` for `i = 1..=size`.
pub fn uniform_grid(horizon: f64, size: usize) -> Vec<f64> {
    (1..=size)
        .map(|i| {
            if i == size {
                horizon
            } else {
                horizon * i as f64 / size as f64
            }
        })
        .collect()
}

/// Solow-Polasky predictions over a grid of further sample sizes.
pub fn solow_polasky_curve<F: Frequencies + ?Sized>(
    table: &F,
    sizes: &[u64],
) -> Result<PredictionCurve> {
    if sizes.is_empty() {
        return Err(Error::domain("empty grid"));
    }
    if sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::domain("sample sizes must be strictly increasing"));
    }
    let points = sizes
        .iter()
        .map(|&m| {
            Ok(CurvePoint {
                x: m as f64,
                value: Some(solow_polasky_new(table, m)?.value),
                estimator: "solow-polasky".into(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PredictionCurve {
        axis: Axis::SampleSize,
        reference: table.events(),
        points,
    })
}

fn check_times(horizon: f64, t: f64) -> Result<()> {
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(Error::domain(format!(
            "horizon must be positive, got {horizon}"
        )));
    }
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::domain(format!("time must be positive, got {t}")));
    }
    Ok(())
}

fn pow(base: f64, k: u64) -> f64 {
    match i32::try_from(k) {
        Ok(k) => base.powi(k),
        Err(_) => base.powf(k as f64),
    }
}

/// `C(k, r) p^r q^(k-r)`, falling back to log space when the coefficient overflows.
fn binomial_term(k: u64, r: u64, p: f64, q: f64) -> f64 {
    let c = binomial(k, r);
    if c.is_finite() {
        return c * pow(p, r) * pow(q, k - r);
    }
    if p == 0.0 || q == 0.0 {
        return 0.0;
    }
    let sign = if q < 0.0 && (k - r) % 2 == 1 {
        -1.0
    } else {
        1.0
    };
    let ln_c = ln_gamma(k as f64 + 1.0) - ln_gamma(r as f64 + 1.0) - ln_gamma((k - r) as f64 + 1.0);
    sign * (ln_c + r as f64 * p.ln() + (k - r) as f64 * q.abs().ln()).exp()
}
