//! Adaptive Gauss-Kronrod (7/15) quadrature on finite and semi-infinite ranges.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

pub const DEFAULT_TOLERANCE: f64 = 1e-10;

const MAX_INTERVALS: usize = 4000;

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Result of [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    /// Estimated absolute error.
    pub error: f64,
    pub intervals: usize,
}

/// Integrates `f` over `[lower, upper]`; `upper` may be `f64::INFINITY`.
///
/// Semi-infinite ranges are mapped to `[0, 1)` with `x = lower + u / (1 - u)`.
/// Subdivides the interval with the largest error estimate until the summed
/// estimate drops below `tol`.
pub fn integrate<F>(f: F, lower: f64, upper: f64, tol: f64) -> Result<Quadrature>
where
    F: Fn(f64) -> f64,
{
    if !(tol > 0.0) {
        return Err(Error::domain(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    if !lower.is_finite() || upper.is_nan() || upper == f64::NEG_INFINITY {
        return Err(Error::domain("integration needs a finite lower limit"));
    }
    if upper == f64::INFINITY {
        let mapped = |u: f64| {
            let one_minus = 1.0 - u;
            let x = lower + u / one_minus;
            let fx = f(x);
            if fx == 0.0 {
                0.0
            } else {
                fx / (one_minus * one_minus)
            }
        };
        return adaptive(&mapped, 0.0, 1.0, tol);
    }
    if upper < lower {
        let mut q = adaptive(&f, upper, lower, tol)?;
        q.value = -q.value;
        return Ok(q);
    }
    adaptive(&f, lower, upper, tol)
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Result<Quadrature> {
    let (value, error) = gauss_kronrod(f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, error });
    let mut total = value;
    let mut total_error = error;

    while !(total_error <= tol) {
        if heap.len() >= MAX_INTERVALS || !total.is_finite() || !total_error.is_finite() {
            return Err(Error::Quadrature {
                estimate: total,
                error: total_error,
            });
        }
        let worst = heap.pop().expect("heap never empties");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // Interval cannot be split further in floating point.
            return Err(Error::Quadrature {
                estimate: total,
                error: total_error,
            });
        }
        let (left_value, left_error) = gauss_kronrod(f, worst.a, mid);
        let (right_value, right_error) = gauss_kronrod(f, mid, worst.b);
        total += left_value + right_value - worst.value;
        total_error += left_error + right_error - worst.error;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: left_value,
            error: left_error,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: right_value,
            error: right_error,
        });
    }

    // Re-sum to shed the drift of the running updates.
    let mut value = 0.0;
    let mut error = 0.0;
    let intervals = heap.len();
    for s in heap {
        value += s.value;
        error += s.error;
    }
    Ok(Quadrature {
        value,
        error,
        intervals,
    })
}

/// One 15-point Kronrod estimate with the QUADPACK error heuristic.
fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);

    let mut gauss = f_center * WG[3];
    let mut kronrod = f_center * WGK[7];
    let mut abs_sum = kronrod.abs();
    let mut lower_vals = [0.0; 7];
    let mut upper_vals = [0.0; 7];

    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        lower_vals[j] = f1;
        upper_vals[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        abs_sum += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = 0.5 * kronrod;
    let mut asc = WGK[7] * (f_center - mean).abs();
    for j in 0..7 {
        asc += WGK[j] * ((lower_vals[j] - mean).abs() + (upper_vals[j] - mean).abs());
    }

    let value = kronrod * half;
    let abs_sum = abs_sum * half.abs();
    let asc = asc * half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if asc != 0.0 && error != 0.0 {
        error = asc * (200.0 * error / asc).powf(1.5).min(1.0);
    }
    if abs_sum > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * abs_sum);
    }
    (value, error)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_tail() {
        let q = integrate(|x| (-x).exp(), 0.0, f64::INFINITY, DEFAULT_TOLERANCE).unwrap();
        assert!((q.value - 1.0).abs() < 1e-10, "{q:?}");
    }

    #[test]
    fn first_gamma_moment() {
        let q = integrate(|x| x * (-x).exp(), 0.0, f64::INFINITY, DEFAULT_TOLERANCE).unwrap();
        assert!((q.value - 1.0).abs() < 1e-10, "{q:?}");
    }

    #[test]
    fn gamma_mixture_second_mass() {
        // gamma(shape 2, rate 2) density times the Poisson k = 2 mass at t = 1;
        // closed form 2 * 3! / 3^4 = 12/81.
        let integrand = |v: f64| 4.0 * v * (-2.0 * v).exp() * v * v * (-v).exp() / 2.0;
        let q = integrate(integrand, 0.0, f64::INFINITY, DEFAULT_TOLERANCE).unwrap();
        assert!((q.value - 12.0 / 81.0).abs() < 1e-8, "{q:?}");
    }

    #[test]
    fn finite_range_and_reversed_limits() {
        let q = integrate(|x| x.sin(), 0.0, std::f64::consts::PI, 1e-12).unwrap();
        assert!((q.value - 2.0).abs() < 1e-12);
        let r = integrate(|x| x.sin(), std::f64::consts::PI, 0.0, 1e-12).unwrap();
        assert!((r.value + 2.0).abs() < 1e-12);
    }

    #[test]
    fn endpoint_singularity() {
        let q = integrate(|x| 1.0 / x.sqrt(), 0.0, 1.0, 1e-10).unwrap();
        assert!((q.value - 2.0).abs() < 1e-9, "{q:?}");
    }

    #[test]
    fn divergent_integral_reports_best_estimate() {
        let err = integrate(|x| 1.0 / x, 0.0, 1.0, 1e-10).unwrap_err();
        assert!(matches!(err, Error::Quadrature { .. }));
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(integrate(|x| x, 0.0, 1.0, 0.0).is_err());
        assert!(integrate(|x| x, f64::NEG_INFINITY, 1.0, 1e-8).is_err());
    }
}
