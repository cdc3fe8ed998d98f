//! Truncated single- and two-mode Fock-space states.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::check_y;

/// Real amplitudes over photon numbers `0..=cutoff`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FockVector {
    pub coefficients: Vec<f64>,
}

impl FockVector {
    pub fn new(coefficients: Vec<f64>) -> Self {
        assert!(!coefficients.is_empty(), "a Fock vector needs at least the vacuum entry");
        Self { coefficients }
    }

    pub fn vacuum(cutoff: usize) -> Self {
        Self::number_state(0, cutoff)
    }

    pub fn number_state(n: usize, cutoff: usize) -> Self {
        let mut c = vec![0.0; cutoff.max(n) + 1];
        c[n] = 1.0;
        Self { coefficients: c }
    }

    pub fn cutoff(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coefficients.iter().map(|c| c * c).sum()
    }

    /// Scales to unit norm; `None` for the zero vector.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm_sqr().sqrt();
        (n > 0.0).then(|| Self { coefficients: self.coefficients.iter().map(|c| c / n).collect() })
    }

    pub fn mean_photons(&self) -> f64 {
        let w: f64 = self.coefficients.iter().enumerate().map(|(n, c)| n as f64 * c * c).sum();
        w / self.norm_sqr()
    }
}

/// `|<state|reference>|`, the shorter vector padded with zeros.
pub fn state_overlap(state: &FockVector, reference: &[f64]) -> f64 {
    state.coefficients.iter().zip(reference).map(|(a, b)| a * b).sum::<f64>().abs()
}

/// Amplitudes `c[n1, n2]` of a two-mode state.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeFockState {
    pub coefficients: DMatrix<f64>,
}

/// Which mode of a two-mode state is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    First,
    Second,
}

impl TwoModeFockState {
    pub fn new(coefficients: DMatrix<f64>) -> Self {
        Self { coefficients }
    }

    pub fn product(a: &FockVector, b: &FockVector) -> Self {
        let m = DMatrix::from_fn(a.coefficients.len(), b.coefficients.len(), |i, j| {
            a.coefficients[i] * b.coefficients[j]
        });
        Self { coefficients: m }
    }

    /// `(cutoff of mode 1, cutoff of mode 2)`.
    pub fn cutoffs(&self) -> (usize, usize) {
        (self.coefficients.nrows() - 1, self.coefficients.ncols() - 1)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coefficients.iter().map(|c| c * c).sum()
    }

    /// Mean photon numbers of the two modes.
    pub fn mean_photons(&self) -> (f64, f64) {
        let norm = self.norm_sqr();
        let (mut m1, mut m2) = (0.0, 0.0);
        for j in 0..self.coefficients.ncols() {
            for i in 0..self.coefficients.nrows() {
                let p = self.coefficients[(i, j)].powi(2);
                m1 += i as f64 * p;
                m2 += j as f64 * p;
            }
        }
        (m1 / norm, m2 / norm)
    }
}

/// Projects `mode` onto `k` photons. Returns the probability and the
/// normalized state of the other mode, `None` when the probability is zero.
pub fn project_pnr(state: &TwoModeFockState, mode: Mode, k: usize) -> (f64, Option<FockVector>) {
    let m = &state.coefficients;
    let slice: Vec<f64> = match mode {
        Mode::First if k < m.nrows() => m.row(k).iter().copied().collect(),
        Mode::Second if k < m.ncols() => m.column(k).iter().copied().collect(),
        _ => return (0.0, None),
    };
    let v = FockVector::new(slice);
    let p = v.norm_sqr();
    (p, v.normalized())
}

/// Squeezed vacuum `sum_n y^n sqrt((2n)!)/n! |2n>`, normalized, generated by
/// the ratio `c_{2n+2}/c_{2n} = y sqrt((2n+1)(2n+2))/(n+1)`.
pub fn smsv_vector(y: f64, cutoff: usize, tolerance: f64) -> Result<FockVector> {
    check_y(y)?;
    let (kept, tail) = smsv_terms(y, cutoff);
    let total = kept.iter().map(|c| c * c).sum::<f64>() + tail;
    let rel_tail = tail / total;
    if rel_tail > tolerance {
        return Err(Error::Truncation { cutoff, tail: rel_tail, tolerance });
    }
    let scale = total.sqrt();
    Ok(FockVector::new(kept.into_iter().map(|c| c / scale).collect()))
}

/// Unnormalized amplitudes up to `cutoff` and the squared norm beyond it.
fn smsv_terms(y: f64, cutoff: usize) -> (Vec<f64>, f64) {
    let mut kept = vec![0.0; cutoff + 1];
    let mut c = 1.0f64;
    let mut n = 0usize;
    let mut tail = 0.0;
    loop {
        let idx = 2 * n;
        if idx <= cutoff {
            kept[idx] = c;
        } else {
            let t = c * c;
            tail += t;
            if t < 1e-18 * tail || t == 0.0 {
                break;
            }
        }
        c *= y * (((2 * n + 1) * (2 * n + 2)) as f64).sqrt() / (n + 1) as f64;
        n += 1;
    }
    (kept, tail)
}

/// Smallest cutoff whose discarded squared norm is below `tolerance`.
pub fn smsv_cutoff(y: f64, tolerance: f64) -> Result<usize> {
    check_y(y)?;
    let mut c2 = 1.0f64;
    let mut terms = vec![1.0];
    let mut n = 0usize;
    loop {
        let r = y * (((2 * n + 1) * (2 * n + 2)) as f64).sqrt() / (n + 1) as f64;
        c2 *= r * r;
        n += 1;
        terms.push(c2);
        if c2 < 1e-18 * terms.iter().sum::<f64>() && n > 2 {
            break;
        }
    }
    let total: f64 = terms.iter().sum();
    let mut tail = total;
    for (i, t) in terms.iter().enumerate() {
        tail -= t;
        if tail / total < tolerance {
            return Ok(2 * i);
        }
    }
    Ok(2 * (terms.len() - 1))
}
