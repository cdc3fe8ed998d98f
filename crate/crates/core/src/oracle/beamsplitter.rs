//! Two-mode beam-splitter unitary in the Fock basis.
//!
//! Convention: `a1^dagger -> t a1^dagger - r a2^dagger`,
//! `a2^dagger -> r a1^dagger + t a2^dagger`. Total photon number is conserved,
//! so the unitary is block diagonal in sectors `N = n1 + n2`.

use nalgebra::DMatrix;

use super::fock::TwoModeFockState;
use crate::error::{Error, Result};
use crate::math::ln_factorial;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamSplitter {
    pub t: f64,
    pub r: f64,
}

impl BeamSplitter {
    /// `t` in `(0, 1]`, `r = sqrt(1 - t^2)`.
    pub fn from_transmittance(t: f64) -> Result<Self> {
        if !(t > 0.0 && t <= 1.0) {
            return Err(Error::InvalidTransmittance(t));
        }
        Ok(Self { t, r: (1.0 - t * t).max(0.0).sqrt() })
    }

    pub fn from_b(b_param: f64) -> Result<Self> {
        crate::params::check_b(b_param)?;
        Ok(Self { t: (1.0 / (1.0 + b_param)).sqrt(), r: (b_param / (1.0 + b_param)).sqrt() })
    }

    /// Applies the unitary exactly; the output holds every sector the input
    /// reaches, so both output cutoffs equal the largest total photon number.
    pub fn apply(&self, state: &TwoModeFockState) -> TwoModeFockState {
        let input = &state.coefficients;
        let n_max = input.nrows() + input.ncols() - 2;
        let mut out = DMatrix::zeros(n_max + 1, n_max + 1);
        let mut sector = Sector::vacuum();
        for n in 0..=n_max {
            if n > 0 {
                sector = sector.next(self);
            }
            let lo = n.saturating_sub(input.ncols() - 1);
            let hi = n.min(input.nrows() - 1);
            for n1 in lo..=hi {
                let amp = input[(n1, n - n1)];
                if amp == 0.0 {
                    continue;
                }
                for j in 0..=n {
                    out[(n - j, j)] += sector.get(j, n1) * amp;
                }
            }
        }
        TwoModeFockState::new(out)
    }

    /// [`apply`](Self::apply) followed by truncation to the given cutoffs;
    /// fails when more than `tolerance` of the squared norm is discarded.
    pub fn apply_truncated(
        &self,
        state: &TwoModeFockState,
        cutoff1: usize,
        cutoff2: usize,
        tolerance: f64,
    ) -> Result<TwoModeFockState> {
        let full = self.apply(state);
        let total = full.norm_sqr();
        let m = &full.coefficients;
        let (r, c) = ((cutoff1 + 1).min(m.nrows()), (cutoff2 + 1).min(m.ncols()));
        let kept = m.view((0, 0), (r, c)).into_owned();
        let mut padded = DMatrix::zeros(cutoff1 + 1, cutoff2 + 1);
        padded.view_mut((0, 0), (r, c)).copy_from(&kept);
        let lost = (total - kept.iter().map(|x| x * x).sum::<f64>()).max(0.0);
        if lost > tolerance * total {
            return Err(Error::Truncation { cutoff: cutoff1.max(cutoff2), tail: lost / total, tolerance });
        }
        Ok(TwoModeFockState::new(padded))
    }
}

/// `apply_beamsplitter` as a free function taking the transmittance.
pub fn apply_beamsplitter(state: &TwoModeFockState, t: f64) -> Result<TwoModeFockState> {
    Ok(BeamSplitter::from_transmittance(t)?.apply(state))
}

/// Matrix of one total-photon sector: entry `(j, n1)` is
/// `<N - j, j| U |n1, N - n1>`.
struct Sector {
    n: usize,
    m: Vec<f64>,
}

impl Sector {
    fn vacuum() -> Self {
        Self { n: 0, m: vec![1.0] }
    }

    fn get(&self, j: usize, n1: usize) -> f64 {
        self.m[j * (self.n + 1) + n1]
    }

    /// Builds sector `N` from sector `N - 1` using both
    /// `sqrt(n1) U|n> = (t a1^+ - r a2^+) U|n - e1>` and
    /// `sqrt(n2) U|n> = (r a1^+ + t a2^+) U|n - e2>`, weighted by `sqrt(n1)` and
    /// `sqrt(n2)` so that `N U|n>` is their sum. The four coefficients have
    /// squared sum at most one, which keeps rounding errors from growing;
    /// peeling a single operator amplifies them by up to `sqrt(N / n1)` per step.
    fn next(&self, bs: &BeamSplitter) -> Self {
        let n = self.n + 1;
        let dim = n + 1;
        let mut m = vec![0.0; dim * dim];
        let sq: Vec<f64> = (0..=n).map(|i| (i as f64).sqrt()).collect();
        let inv_n = 1.0 / n as f64;
        for n1 in 0..=n {
            let n2 = n - n1;
            for j in 0..=n {
                let (out1, out2) = (sq[n - j], sq[j]);
                let mut v = 0.0;
                if n1 > 0 {
                    let src = n1 - 1;
                    let mut w = 0.0;
                    if j < n {
                        w += bs.t * out1 * self.get(j, src);
                    }
                    if j > 0 {
                        w -= bs.r * out2 * self.get(j - 1, src);
                    }
                    v += sq[n1] * w;
                }
                if n2 > 0 {
                    let src = n1;
                    let mut w = 0.0;
                    if j < n {
                        w += bs.r * out1 * self.get(j, src);
                    }
                    if j > 0 {
                        w += bs.t * out2 * self.get(j - 1, src);
                    }
                    v += sq[n2] * w;
                }
                m[j * dim + n1] = v * inv_n;
            }
        }
        Self { n, m }
    }
}

/// `<m1, m2| U |n1, n2>` from the binomial expansion of
/// `(t a1^+ - r a2^+)^{n1} (r a1^+ + t a2^+)^{n2}`.
pub fn binomial_matrix_element(bs: &BeamSplitter, n1: usize, n2: usize, m1: usize, m2: usize) -> f64 {
    if n1 + n2 != m1 + m2 {
        return 0.0;
    }
    let ln_binom = |n: usize, k: usize| ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k);
    let mut sum = 0.0;
    // j photons of the first group and l of the second end up in mode 2.
    for j in 0..=n1 {
        if j > m2 {
            break;
        }
        let l = m2 - j;
        if l > n2 {
            continue;
        }
        let sign = if j % 2 == 1 { -1.0 } else { 1.0 };
        let ln_mag = ln_binom(n1, j) + ln_binom(n2, l)
            + (n1 - j + l) as f64 * bs.t.ln()
            + (j + n2 - l) as f64 * bs.r.ln();
        sum += sign * ln_mag.exp();
    }
    let norm = 0.5 * (ln_factorial(m1) + ln_factorial(m2) - ln_factorial(n1) - ln_factorial(n2));
    sum * norm.exp()
}
