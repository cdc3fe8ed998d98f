//! Dense four-mode simulation for small cutoffs.
//!
//! Holds the full state of modes 1..4, applies both beam splitters with
//! matrix elements from the binomial expansion and then projects modes 3 and
//! 4. Shares no code with the factorized path beyond the Fock vector types.

use nalgebra::DMatrix;

use super::beamsplitter::{binomial_matrix_element, BeamSplitter};
use super::fock::{smsv_vector, FockVector};
use crate::error::{Error, Result};
use crate::params::{InputCase, OutcomePair, SplitterSpec, SqueezeSpec};

/// Largest input cutoff accepted by the dense path.
pub const MAX_DENSE_CUTOFF: usize = 16;

struct Tensor4 {
    d: usize,
    data: Vec<f64>,
}

impl Tensor4 {
    fn zeros(d: usize) -> Self {
        Self { d, data: vec![0.0; d * d * d * d] }
    }

    fn idx(&self, i: [usize; 4]) -> usize {
        ((i[0] * self.d + i[1]) * self.d + i[2]) * self.d + i[3]
    }

    /// Applies a beam splitter to modes `(a, b)`.
    fn mix(&self, bs: &BeamSplitter, a: usize, b: usize) -> Self {
        let d = self.d;
        let mut out = Self::zeros(d);
        // table[(na, nb, mb)] for ma = na + nb - mb
        let mut table = vec![0.0; d * d * d];
        for na in 0..d {
            for nb in 0..d {
                for mb in 0..d.min(na + nb + 1) {
                    let ma = na + nb - mb;
                    if ma < d {
                        table[(na * d + nb) * d + mb] = binomial_matrix_element(bs, na, nb, ma, mb);
                    }
                }
            }
        }
        for (pos, &amp) in self.data.iter().enumerate() {
            if amp == 0.0 {
                continue;
            }
            let mut i = [pos / (d * d * d), (pos / (d * d)) % d, (pos / d) % d, pos % d];
            let (na, nb) = (i[a], i[b]);
            for mb in 0..d.min(na + nb + 1) {
                let ma = na + nb - mb;
                if ma >= d {
                    continue;
                }
                i[a] = ma;
                i[b] = mb;
                let k = out.idx(i);
                out.data[k] += table[(na * d + nb) * d + mb] * amp;
            }
        }
        out
    }
}

fn dense_input(case: InputCase, y: f64, bs: &BeamSplitter, cutoff: usize, tolerance: f64) -> Result<FockVector> {
    let smsv = smsv_vector(y, cutoff, tolerance)?;
    match case {
        InputCase::Smsv => Ok(smsv),
        InputCase::Odd => {
            // <n, 1| U |m, 0> for m = n + 1.
            let c: Vec<f64> = (0..=cutoff)
                .map(|n| if n < cutoff { smsv.coefficients[n + 1] * binomial_matrix_element(bs, n + 1, 0, n, 1) } else { 0.0 })
                .collect();
            FockVector::new(c).normalized().ok_or(Error::InvalidArgument("empty heralded input".into()))
        }
    }
}

/// Probability of `outcome` and the normalized heralded two-mode state
/// (`None` at zero probability), from the dense four-mode state.
pub fn dense_tqe(
    case: InputCase,
    squeeze: &SqueezeSpec,
    splitter: &SplitterSpec,
    outcome: OutcomePair,
    cutoff: usize,
    tolerance: f64,
) -> Result<(f64, Option<DMatrix<f64>>)> {
    if cutoff > MAX_DENSE_CUTOFF {
        return Err(Error::InvalidArgument(format!(
            "dense simulation supports cutoffs up to {MAX_DENSE_CUTOFF}, got {cutoff}"
        )));
    }
    let bs = BeamSplitter::from_b(splitter.b_param)?;
    let input = dense_input(case, squeeze.y, &bs, cutoff, tolerance)?;
    let d = cutoff + 2;
    let mut t = Tensor4::zeros(d);
    let h = 0.5f64.sqrt();
    for n1 in 0..=cutoff {
        for n2 in 0..=cutoff {
            let a = input.coefficients[n1] * input.coefficients[n2] * h;
            let i = t.idx([n1, n2, 0, 1]);
            t.data[i] = a;
            let i = t.idx([n1, n2, 1, 0]);
            t.data[i] = a;
        }
    }
    let t = t.mix(&bs, 0, 2).mix(&bs, 1, 3);
    let (k1, k2) = (outcome.k1, outcome.k2);
    if k1 >= d || k2 >= d {
        return Ok((0.0, None));
    }
    let m = DMatrix::from_fn(d, d, |i, j| t.data[t.idx([i, j, k1, k2])]);
    let p: f64 = m.iter().map(|x| x * x).sum();
    Ok((p, (p > 0.0).then(|| m / p.sqrt())))
}
