//! Stirling numbers of the second kind, exactly and in log space.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact `S(x, y)`: the number of partitions of `x` items into `y` non-empty blocks.
pub fn stirling2(x: u64, y: u64) -> BigUint {
    if y > x {
        return BigUint::zero();
    }
    exact_row(x as usize, y as usize).swap_remove(y as usize)
}

/// `ln S(x, y)`, computed by the recurrence in log space.
pub fn stirling2_log(x: u64, y: u64) -> Result<f64> {
    if y > x || (y == 0 && x > 0) {
        return Err(Error::LogOfZero { x, y });
    }
    Ok(log_row(x as usize, y as usize)[y as usize])
}

/// `S(n, k) / S(n - 1, k)` from exact big-integer rows.
pub fn stirling_ratio_exact(n: u64, k: u64) -> Result<f64> {
    if n == 0 || k >= n || k == 0 {
        return Err(degenerate_ratio(n, k));
    }
    let (n, k) = (n as usize, k as usize);
    let prev = exact_row(n - 1, k);
    let numerator = &prev[k] * k + &prev[k - 1];
    Ok(big_ratio(&numerator, &prev[k]))
}

/// `S(n, k) / S(n - 1, k)` from log-space rows.
pub fn stirling_ratio_log(n: u64, k: u64) -> Result<f64> {
    if n == 0 || k >= n || k == 0 {
        return Err(degenerate_ratio(n, k));
    }
    let (n, k) = (n as usize, k as usize);
    let prev = log_row(n - 1, k);
    let current = log_add((k as f64).ln() + prev[k], prev[k - 1]);
    Ok((current - prev[k]).exp())
}

fn degenerate_ratio(n: u64, k: u64) -> Error {
    Error::Degenerate(format!(
        "S({}, {k}) = 0 in the Stirling ratio for n = {n}",
        n.saturating_sub(1)
    ))
}

/// Full exact triangle `S(x, y)` for `0 <= y <= x <= max_x`.
#[derive(Debug, Clone)]
pub struct Stirling2Rows {
    rows: Vec<Vec<BigUint>>,
}

impl Stirling2Rows {
    pub fn up_to(max_x: usize) -> Self {
        let mut rows: Vec<Vec<BigUint>> = Vec::with_capacity(max_x + 1);
        rows.push(vec![BigUint::one()]);
        for x in 1..=max_x {
            let prev = &rows[x - 1];
            let mut row = vec![BigUint::zero(); x + 1];
            for y in 1..=x {
                let carried = if y < x { &prev[y] * y } else { BigUint::zero() };
                row[y] = carried + &prev[y - 1];
            }
            rows.push(row);
        }
        Self { rows }
    }

    pub fn get(&self, x: usize, y: usize) -> BigUint {
        self.rows
            .get(x)
            .and_then(|r| r.get(y))
            .cloned()
            .unwrap_or_default()
    }

    pub fn ratio(&self, n: usize, k: usize) -> Result<f64> {
        if n == 0 || k >= n || k == 0 {
            return Err(degenerate_ratio(n as u64, k as u64));
        }
        Ok(big_ratio(&self.rows[n][k], &self.rows[n - 1][k]))
    }
}

/// Full log-space triangle `ln S(x, y)`; zero entries hold `-inf`.
#[derive(Debug, Clone)]
pub struct Stirling2LogRows {
    rows: Vec<Vec<f64>>,
}

impl Stirling2LogRows {
    pub fn up_to(max_x: usize) -> Self {
        let mut rows: Vec<Vec<f64>> = Vec::with_capacity(max_x + 1);
        rows.push(vec![0.0]);
        for x in 1..=max_x {
            let prev = &rows[x - 1];
            let mut row = vec![f64::NEG_INFINITY; x + 1];
            for y in 1..=x {
                let carried = if y < x {
                    (y as f64).ln() + prev[y]
                } else {
                    f64::NEG_INFINITY
                };
                row[y] = log_add(carried, prev[y - 1]);
            }
            rows.push(row);
        }
        Self { rows }
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.rows
            .get(x)
            .and_then(|r| r.get(y))
            .copied()
            .unwrap_or(f64::NEG_INFINITY)
    }

    pub fn ratio(&self, n: usize, k: usize) -> Result<f64> {
        if n == 0 || k >= n || k == 0 {
            return Err(degenerate_ratio(n as u64, k as u64));
        }
        Ok((self.rows[n][k] - self.rows[n - 1][k]).exp())
    }
}

/// Row `x` of the triangle, truncated to columns `0..=max_y`.
fn exact_row(x: usize, max_y: usize) -> Vec<BigUint> {
    let width = max_y.min(x) + 1;
    let mut row = vec![BigUint::zero(); max_y + 1];
    row[0] = BigUint::one();
    for i in 1..=x {
        // Descending so row[y - 1] still holds the previous row.
        for y in (1..width.min(i + 1)).rev() {
            let carried = &row[y] * y;
            row[y] = carried + &row[y - 1];
        }
        row[0] = BigUint::zero();
    }
    row
}

fn log_row(x: usize, max_y: usize) -> Vec<f64> {
    let width = max_y.min(x) + 1;
    let mut row = vec![f64::NEG_INFINITY; max_y + 1];
    row[0] = 0.0;
    for i in 1..=x {
        for y in (1..width.min(i + 1)).rev() {
            row[y] = log_add((y as f64).ln() + row[y], row[y - 1]);
        }
        row[0] = f64::NEG_INFINITY;
    }
    row
}

fn log_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// `a / b` for big integers, keeping the leading 62 bits of the denominator.
fn big_ratio(a: &BigUint, b: &BigUint) -> f64 {
    let shift = b.bits().saturating_sub(62);
    let a = (a >> shift).to_f64().unwrap_or(f64::INFINITY);
    let b = (b >> shift).to_f64().unwrap_or(f64::INFINITY);
    a / b
}

/// Natural log of a positive big integer.
#[cfg(test)]
pub(crate) fn big_ln(value: &BigUint) -> f64 {
    let shift = value.bits().saturating_sub(62);
    let mantissa = (value >> shift).to_f64().unwrap_or(f64::INFINITY);
    mantissa.ln() + shift as f64 * std::f64::consts::LN_2
}
