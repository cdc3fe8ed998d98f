//! Small numerical helpers shared by the analytic and oracle code.

use std::sync::OnceLock;

const LN_FACTORIAL_TABLE: usize = 1 << 15;

fn ln_factorial_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = Vec::with_capacity(LN_FACTORIAL_TABLE);
        let mut acc = NeumaierSum::default();
        table.push(0.0);
        for n in 1..LN_FACTORIAL_TABLE {
            acc.add((n as f64).ln());
            table.push(acc.value());
        }
        table
    })
}

/// `ln(n!)`, tabulated by cumulative summation of `ln k`.
pub fn ln_factorial(n: usize) -> f64 {
    let table = ln_factorial_table();
    if n < table.len() {
        table[n]
    } else {
        // Stirling series; beyond the table the relative error is far below 1e-16.
        let x = n as f64;
        x * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI * x).ln() + 1.0 / (12.0 * x)
            - 1.0 / (360.0 * x.powi(3))
    }
}

/// `exponent * ln(base)` with the convention `0 * ln(0) = 0`.
pub fn ln_pow(base: f64, exponent: f64) -> f64 {
    if exponent == 0.0 {
        0.0
    } else {
        exponent * base.ln()
    }
}

/// `ln(exp(a) + exp(b))` without overflow.
pub fn ln_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `ln(sum_i exp(x_i))`; `-inf` for an empty or all-zero sum.
pub fn ln_sum_exp<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let terms: Vec<f64> = terms.into_iter().collect();
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    let mut acc = NeumaierSum::default();
    for t in &terms {
        acc.add((t - max).exp());
    }
    max + acc.value().ln()
}

/// Neumaier's variant of Kahan compensated summation.
#[derive(Debug, Default, Clone, Copy)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl std::iter::FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = NeumaierSum::default();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Relative size below which a series term counts as negligible.
pub const SERIES_RELATIVE_CUTOFF: f64 = 1e-16;
/// Hard cap on the number of series terms.
pub const SERIES_MAX_TERMS: usize = 100_000;

/// Sums `term(0) + term(1) + ...` with compensated summation.
///
/// Stops once two consecutive terms fall below `SERIES_RELATIVE_CUTOFF` times
/// the running sum (a single tiny term can be an isolated zero of a polynomial
/// factor), or after `SERIES_MAX_TERMS` terms.
pub fn series_sum<F: FnMut(usize) -> f64>(mut term: F) -> f64 {
    let mut acc = NeumaierSum::default();
    let mut small_run = 0;
    for n in 0..SERIES_MAX_TERMS {
        let t = term(n);
        acc.add(t);
        if t.abs() < SERIES_RELATIVE_CUTOFF * acc.value().abs() {
            small_run += 1;
            if small_run >= 2 {
                break;
            }
        } else {
            small_run = 0;
        }
    }
    acc.value()
}

/// `n` points spaced evenly in `ln x` over `[lo, hi]`, endpoints included.
pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..n)
                .map(|i| {
                    if i == 0 {
                        lo
                    } else if i == n - 1 {
                        hi
                    } else {
                        (a + (b - a) * i as f64 / (n - 1) as f64).exp()
                    }
                })
                .collect()
        }
    }
}
