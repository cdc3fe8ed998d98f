//! Derivatives of `Z(y) = (1 - 4y^2)^{-1/2}` and linear combinations of them.
//!
//! `Z^(k)(y) = Q_k(y) (1 - 4y^2)^{-(2k+1)/2}` where `Q_0 = 1` and
//! `Q_{k+1} = Q_k' (1 - 4y^2) + 4(2k+1) y Q_k`. Every `Q_k` has nonnegative
//! integer coefficients and parity `k`, so `ln Q_k(y)` is a log-sum-exp of
//! positive terms and never cancels. Coefficients are generated exactly with
//! big integers and cached as natural logarithms.

use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{ln_factorial, ln_sum_exp};
use crate::params::check_y;

/// Highest derivative order served by the cache.
pub const MAX_ORDER: usize = 1024;

/// Below this `y` combinations are summed from their Taylor series, which is
/// free of cancellation; above it the closed form is used.
const SERIES_THRESHOLD: f64 = 0.1;

struct QTable {
    /// `ln_rows[k][j] = ln [y^j] Q_k` (`-inf` for vanishing coefficients).
    ln_rows: Vec<Arc<[f64]>>,
    last: Vec<BigUint>,
}

fn table() -> &'static RwLock<QTable> {
    static TABLE: OnceLock<RwLock<QTable>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let q0 = vec![BigUint::from(1u32)];
        RwLock::new(QTable {
            ln_rows: vec![ln_row(&q0)],
            last: q0,
        })
    })
}

fn ln_biguint(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 1000 {
        x.to_f64().map_or(f64::NAN, f64::ln)
    } else {
        let shift = bits - 64;
        let top = (x >> shift).to_f64().map_or(f64::NAN, f64::ln);
        top + shift as f64 * std::f64::consts::LN_2
    }
}

fn ln_row(coeffs: &[BigUint]) -> Arc<[f64]> {
    coeffs.iter().map(ln_biguint).collect::<Vec<_>>().into()
}

/// One step of the `Q` recurrence: `Q_k -> Q_{k+1}`.
fn next_q(q: &[BigUint], k: usize) -> Vec<BigUint> {
    let deg = k + 1;
    let mut out = vec![BigUint::zero(); deg + 1];
    for (j, slot) in out.iter_mut().enumerate() {
        // [y^j] Q_{k+1} = (j+1) c_{j+1} + 4 (2k + 2 - j) c_{j-1}
        if let Some(c) = q.get(j + 1) {
            if !c.is_zero() {
                *slot += c * (j as u64 + 1);
            }
        }
        if j >= 1 {
            let c = &q[j - 1];
            if !c.is_zero() {
                *slot += c * (4 * (2 * k as u64 + 2 - j as u64));
            }
        }
    }
    out
}

/// Exact coefficients of `Q_k`, lowest degree first. Not cached.
pub fn q_coefficients(k: usize) -> Vec<BigUint> {
    let mut q = vec![BigUint::from(1u32)];
    for i in 0..k {
        q = next_q(&q, i);
    }
    q
}

fn ln_q_row(k: usize) -> Result<Arc<[f64]>> {
    if k > MAX_ORDER {
        return Err(Error::OrderTooLarge { order: k, max: MAX_ORDER });
    }
    {
        let t = table().read().unwrap_or_else(|e| e.into_inner());
        if let Some(row) = t.ln_rows.get(k) {
            return Ok(row.clone());
        }
    }
    let mut t = table().write().unwrap_or_else(|e| e.into_inner());
    while t.ln_rows.len() <= k {
        let order = t.ln_rows.len() - 1;
        let next = next_q(&t.last, order);
        t.ln_rows.push(ln_row(&next));
        t.last = next;
    }
    Ok(t.ln_rows[k].clone())
}

/// `ln Q_k(y)`.
fn ln_q(k: usize, y: f64) -> Result<f64> {
    let row = ln_q_row(k)?;
    if y == 0.0 {
        return Ok(row[0]);
    }
    let ln_y = y.ln();
    Ok(ln_sum_exp(
        row.iter()
            .enumerate()
            .filter(|(_, c)| c.is_finite())
            .map(|(j, c)| c + j as f64 * ln_y),
    ))
}

/// `ln Z^(k)(y)`; `-inf` where the derivative vanishes (odd `k` at `y = 0`).
pub fn ln_z_derivative(k: usize, y: f64) -> Result<f64> {
    check_y(y)?;
    let ln_q = ln_q(k, y)?;
    Ok(ln_q - (k as f64 + 0.5) * (-4.0 * y * y).ln_1p())
}

/// `d^k Z / dy^k` at `y`, for `0 <= y < 1/2`.
pub fn z_derivative(k: usize, y: f64) -> Result<f64> {
    Ok(ln_z_derivative(k, y)?.exp())
}

/// `ln Z^(m)(0) = ln(m! C(m, m/2))` for even `m`, `-inf` for odd `m`.
pub fn ln_z_derivative_at_zero(m: usize) -> f64 {
    if m % 2 == 1 {
        f64::NEG_INFINITY
    } else {
        2.0 * ln_factorial(m) - 2.0 * ln_factorial(m / 2)
    }
}

/// `G(y) = alpha Z^(j)(y) + beta y Z^(j+1)(y) + gamma y^2 Z^(j+2)(y)`.
///
/// Every normalization factor of the measurement-induced CV states has this
/// form. The Taylor coefficient of `y^p` is
/// `Z^(j+p)(0)/p! * (alpha + beta p + gamma p (p-1))`, which is nonnegative
/// for all of them: `G` is a squared norm and `p` is the photon number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZCombination {
    pub order: usize,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl ZCombination {
    /// A bare derivative `Z^(order)`.
    pub fn single(order: usize) -> Self {
        Self { order, alpha: 1.0, beta: 0.0, gamma: 0.0 }
    }

    pub fn new(order: usize, alpha: f64, beta: f64, gamma: f64) -> Self {
        Self { order, alpha, beta, gamma }
    }

    fn weight(&self, p: usize) -> f64 {
        let p = p as f64;
        self.alpha + self.beta * p + self.gamma * p * (p - 1.0)
    }

    /// `y G'(y)` is itself a combination, one order up, scaled by `y`.
    fn derivative(&self) -> Self {
        Self {
            order: self.order + 1,
            alpha: self.alpha + self.beta,
            beta: self.beta + 2.0 * self.gamma,
            gamma: self.gamma,
        }
    }

    fn is_single(&self) -> bool {
        self.beta == 0.0 && self.gamma == 0.0
    }

    /// `ln G(y)`; `-inf` when `G` vanishes, NaN if the combination is negative.
    pub fn ln_value(&self, y: f64) -> Result<f64> {
        check_y(y)?;
        if self.is_single() {
            return Ok(self.alpha.ln() + ln_z_derivative(self.order, y)?);
        }
        if y <= SERIES_THRESHOLD {
            return Ok(self.series(y)?.ln_value);
        }
        self.ln_closed_form(y)
    }

    pub fn value(&self, y: f64) -> Result<f64> {
        Ok(self.ln_value(y)?.exp())
    }

    /// `y G'(y) / G(y)`, the mean of the Taylor index under weights `g_p y^p`.
    ///
    /// At `y = 0` this is the lowest index with a nonzero coefficient.
    pub fn log_derivative(&self, y: f64) -> Result<f64> {
        check_y(y)?;
        if y <= SERIES_THRESHOLD {
            return Ok(self.series(y)?.mean_index);
        }
        let ln_g = self.ln_closed_form(y)?;
        let ln_dg = self.derivative().ln_closed_form(y)?;
        Ok((y.ln() + ln_dg - ln_g).exp())
    }

    fn ln_closed_form(&self, y: f64) -> Result<f64> {
        let j = self.order;
        let ln_y = y.ln();
        let parts = [
            (self.alpha, ln_z_derivative(j, y)?),
            (self.beta, ln_y + ln_z_derivative(j + 1, y)?),
            (self.gamma, 2.0 * ln_y + ln_z_derivative(j + 2, y)?),
        ];
        let reference = parts
            .iter()
            .filter(|(c, _)| *c != 0.0)
            .map(|(_, l)| *l)
            .fold(f64::NEG_INFINITY, f64::max);
        if reference == f64::NEG_INFINITY {
            return Ok(reference);
        }
        let sum: f64 = parts
            .iter()
            .filter(|(c, l)| *c != 0.0 && l.is_finite())
            .map(|(c, l)| c * (l - reference).exp())
            .sum();
        Ok(if sum < 0.0 { f64::NAN } else { reference + sum.ln() })
    }

    fn series(&self, y: f64) -> Result<SeriesEval> {
        let j = self.order;
        if y == 0.0 {
            // A quadratic weight vanishes at no more than two indices.
            let p = (0..3)
                .map(|i| j % 2 + 2 * i)
                .find(|&p| self.weight(p) != 0.0)
                .unwrap_or(j % 2 + 6);
            let ln_value = if p == 0 {
                self.weight(0).ln() + ln_z_derivative_at_zero(j)
            } else {
                f64::NEG_INFINITY
            };
            return Ok(SeriesEval { ln_value, mean_index: p as f64 });
        }
        let ln_y = y.ln();
        let mut terms: Vec<(f64, f64, usize)> = Vec::new();
        let mut max_ln = f64::NEG_INFINITY;
        let mut prev_ln = f64::NEG_INFINITY;
        let mut p = j % 2;
        while p < crate::math::SERIES_MAX_TERMS {
            let w = self.weight(p);
            let ln_mag = ln_z_derivative_at_zero(j + p) - ln_factorial(p)
                + if p == 0 { 0.0 } else { p as f64 * ln_y };
            if w != 0.0 {
                let ln_term = ln_mag + w.abs().ln();
                terms.push((w.signum(), ln_term, p));
                max_ln = max_ln.max(ln_term);
            }
            // Past the peak the ratio of consecutive magnitudes is below 1.
            if ln_mag < prev_ln && ln_mag < max_ln + (1e-20f64).ln() {
                break;
            }
            prev_ln = ln_mag;
            p += 2;
        }
        if max_ln == f64::NEG_INFINITY {
            return Ok(SeriesEval { ln_value: max_ln, mean_index: f64::NAN });
        }
        let mut num = crate::math::NeumaierSum::default();
        let mut den = crate::math::NeumaierSum::default();
        for &(sign, ln_term, p) in &terms {
            let t = sign * (ln_term - max_ln).exp();
            den.add(t);
            num.add(p as f64 * t);
        }
        let den = den.value();
        Ok(SeriesEval {
            ln_value: if den < 0.0 { f64::NAN } else { max_ln + den.ln() },
            mean_index: num.value() / den,
        })
    }
}

struct SeriesEval {
    ln_value: f64,
    mean_index: f64,
}
