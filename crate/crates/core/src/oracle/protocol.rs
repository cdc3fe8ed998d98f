//! The full optical setup simulated in truncated Fock space.
//!
//! Mode 1 couples only to mode 3 and mode 2 only to mode 4, and the nonlocal
//! photon `(|0>_3 |1>_4 + |1>_3 |0>_4)/sqrt(2)` has two branches, so the
//! four-mode output is `(A0 (x) A1 + A1 (x) A0)/sqrt(2)` where `A_m` is one arm
//! with `m` photons entering its measuring mode. Projecting modes 3 and 4 onto
//! `(k1, k2)` leaves `M = (A0[:,k1] A1[:,k2]^T + A1[:,k1] A0[:,k2]^T)/sqrt(2)`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::beamsplitter::BeamSplitter;
use super::fock::{project_pnr, smsv_cutoff, smsv_vector, FockVector, Mode, TwoModeFockState};
use crate::error::Result;
use crate::params::{InputCase, OutcomePair, SplitterSpec, SqueezeSpec};

/// Default bound on the discarded squared norm of the input states.
pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-12;

/// Singular values of the coefficient matrix, largest first.
pub fn schmidt_coefficients(state: &TwoModeFockState) -> Vec<f64> {
    let mut s: Vec<f64> = state.coefficients.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// `(sum_i lambda_i)^2 - 1` for a normalized pure state.
pub fn schmidt_negativity(state: &TwoModeFockState) -> f64 {
    let s: f64 = schmidt_coefficients(state).iter().sum();
    s * s - 1.0
}

/// Input CV state of one arm: squeezed vacuum, or squeezed vacuum after the
/// same beam splitter with one photon registered in its measuring mode.
pub fn input_state(
    case: InputCase,
    squeeze: &SqueezeSpec,
    bs: &BeamSplitter,
    cutoff: usize,
    tolerance: f64,
) -> Result<FockVector> {
    let smsv = smsv_vector(squeeze.y, cutoff, tolerance)?;
    match case {
        InputCase::Smsv => Ok(smsv),
        InputCase::Odd => {
            let out = bs.apply(&TwoModeFockState::product(&smsv, &FockVector::vacuum(0)));
            let (_, cond) = project_pnr(&out, Mode::Second, 1);
            let mut v = cond.unwrap_or_else(|| FockVector::number_state(1, cutoff));
            v.coefficients.truncate(cutoff + 1);
            Ok(v)
        }
    }
}

/// Output of one arm for `photons` (0 or 1) entering the measuring mode:
/// entry `(n, k)` is the amplitude of `|n>_cv |k>_measured`.
pub fn arm_output(input: &FockVector, bs: &BeamSplitter, photons: usize) -> DMatrix<f64> {
    bs.apply(&TwoModeFockState::product(input, &FockVector::number_state(photons, photons)))
        .coefficients
}

/// One run of the simulated protocol.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OracleResult {
    pub probability: f64,
    /// Normalized heralded state of modes 1 and 2; `None` at zero probability.
    #[serde(skip)]
    pub conditional_state: Option<TwoModeFockState>,
    pub negativity: f64,
    pub mean_photons: (f64, f64),
    pub schmidt_coefficients: Vec<f64>,
    pub cutoff: usize,
    #[serde(skip)]
    pub mode_states: Option<ModeStates>,
}

/// Normalized single-mode factors of the two product terms of the heralded
/// state, up to sign. `plain` came from the arm without the extra photon.
#[derive(Debug, Clone)]
pub struct ModeStates {
    pub mode1_plain: Option<FockVector>,
    pub mode1_added: Option<FockVector>,
    pub mode2_plain: Option<FockVector>,
    pub mode2_added: Option<FockVector>,
}

/// Simulates the setup and heralds `outcome`.
///
/// `cutoff` bounds the photon number of the input states; `None` picks the
/// smallest cutoff whose squeezed-vacuum tail is below
/// [`DEFAULT_TAIL_TOLERANCE`].
pub fn run_tqe_oracle(
    case: InputCase,
    squeeze: &SqueezeSpec,
    splitter: &SplitterSpec,
    outcome: OutcomePair,
    cutoff: Option<usize>,
) -> Result<OracleResult> {
    run_tqe_oracle_with_tolerance(case, squeeze, splitter, outcome, cutoff, DEFAULT_TAIL_TOLERANCE)
}

/// [`run_tqe_oracle`] with an explicit bound on the discarded input norm.
pub fn run_tqe_oracle_with_tolerance(
    case: InputCase,
    squeeze: &SqueezeSpec,
    splitter: &SplitterSpec,
    outcome: OutcomePair,
    cutoff: Option<usize>,
    tolerance: f64,
) -> Result<OracleResult> {
    let cutoff = match cutoff {
        Some(c) => c,
        None => smsv_cutoff(squeeze.y, tolerance)?,
    };
    let bs = BeamSplitter::from_b(splitter.b_param)?;
    let input = input_state(case, squeeze, &bs, cutoff, tolerance)?;
    let a0 = arm_output(&input, &bs, 0);
    let a1 = arm_output(&input, &bs, 1);
    let (k1, k2) = (outcome.k1, outcome.k2);
    let col = |a: &DMatrix<f64>, k: usize| -> DVector<f64> {
        let mut v = DVector::zeros(cutoff + 2);
        if k < a.ncols() {
            for n in 0..a.nrows().min(cutoff + 2) {
                v[n] = a[(n, k)];
            }
        }
        v
    };
    let (u0, u1) = (col(&a0, k1), col(&a1, k1));
    let (v0, v1) = (col(&a0, k2), col(&a1, k2));
    let m = (&u0 * v1.transpose() + &u1 * v0.transpose()) / 2f64.sqrt();
    let probability: f64 = m.iter().map(|x| x * x).sum();
    if probability == 0.0 {
        return Ok(OracleResult {
            probability,
            conditional_state: None,
            negativity: 0.0,
            mean_photons: (0.0, 0.0),
            schmidt_coefficients: Vec::new(),
            cutoff,
            mode_states: None,
        });
    }
    let conditional = TwoModeFockState::new(m / probability.sqrt());
    let schmidt = schmidt_coefficients(&conditional);
    let negativity = {
        let s: f64 = schmidt.iter().sum();
        s * s - 1.0
    };
    let parity = (case.input_parity() + k1) % 2;
    let mode_states = Some(extract_mode_states(&conditional, parity));
    Ok(OracleResult {
        probability,
        mean_photons: conditional.mean_photons(),
        conditional_state: Some(conditional),
        negativity,
        schmidt_coefficients: schmidt,
        cutoff,
        mode_states,
    })
}

/// Splits the heralded state by the parity of mode 1. Rows of `parity`
/// hold `u_plain (x) v_added`, the other rows `u_added (x) v_plain`; each block
/// has rank one.
pub fn extract_mode_states(state: &TwoModeFockState, parity: usize) -> ModeStates {
    let m = &state.coefficients;
    let block = |p: usize| -> (Option<FockVector>, Option<FockVector>) {
        let masked = DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| if i % 2 == p { m[(i, j)] } else { 0.0 });
        if masked.iter().all(|x| *x == 0.0) {
            return (None, None);
        }
        let svd = masked.svd(true, true);
        let idx = svd.singular_values.imax();
        let u = svd.u.as_ref().map(|u| FockVector::new(u.column(idx).iter().copied().collect()));
        let v = svd.v_t.as_ref().map(|vt| FockVector::new(vt.row(idx).iter().copied().collect()));
        (u, v)
    };
    let (mode1_plain, mode2_added) = block(parity);
    let (mode1_added, mode2_plain) = block(1 - parity);
    ModeStates { mode1_plain, mode1_added, mode2_plain, mode2_added }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn setup(s_db: f64, b: f64) -> (SqueezeSpec, SplitterSpec) {
        (SqueezeSpec::from_db(s_db).unwrap(), SplitterSpec::from_b(b).unwrap())
    }

    #[test]
    fn schmidt_examples() {
        let product = TwoModeFockState::product(&FockVector::new(vec![0.6, 0.8]), &FockVector::new(vec![0.0, 1.0]));
        assert!(schmidt_negativity(&product).abs() < 1e-14);
        let h = 0.5f64.sqrt();
        let bell = TwoModeFockState::new(DMatrix::from_row_slice(2, 2, &[0.0, h, h, 0.0]));
        assert_relative_eq!(schmidt_negativity(&bell), 1.0, max_relative = 1e-14);
        let b = 0.4f64;
        let n = (1.0 + b * b).sqrt();
        let two_term = TwoModeFockState::new(DMatrix::from_row_slice(3, 3, &[0.0, 0.0, 1.0 / n, 0.0, 0.0, 0.0, b / n, 0.0, 0.0]));
        assert_relative_eq!(schmidt_negativity(&two_term), 2.0 * b / (1.0 + b * b), max_relative = 1e-14);
    }

    #[test]
    fn vacuum_inputs_split_one_photon() {
        let (sq, bs) = setup(0.0, 3.0);
        let r = run_tqe_oracle(InputCase::Smsv, &sq, &bs, OutcomePair::new(InputCase::Smsv, 0, 1), None).unwrap();
        // The photon reaches mode 4 with probability T from the branch that sent it there.
        assert_relative_eq!(r.probability, bs.big_t / 2.0, max_relative = 1e-14);
        assert!(r.negativity.abs() < 1e-14);
        assert_relative_eq!(r.mean_photons.0, 0.0);
        let r = run_tqe_oracle(InputCase::Smsv, &sq, &bs, OutcomePair::new(InputCase::Smsv, 0, 0), None).unwrap();
        assert_relative_eq!(r.probability, bs.big_r, max_relative = 1e-14);
        assert_relative_eq!(r.negativity, 1.0, max_relative = 1e-14);
    }

    #[test]
    fn heralded_odd_input_has_odd_support() {
        let (sq, split) = setup(6.0, 1.0);
        let bs = BeamSplitter::from_b(split.b_param).unwrap();
        let v = input_state(InputCase::Odd, &sq, &bs, 120, 1e-12).unwrap();
        assert!(v.coefficients.iter().step_by(2).all(|c| *c == 0.0));
        assert_relative_eq!(v.norm_sqr(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn outcome_probabilities_sum_to_one() {
        let (sq, bs) = setup(3.0, 0.8);
        let cutoff = 40;
        let mut total = 0.0;
        for k1 in 0..=cutoff + 1 {
            for k2 in 0..=cutoff + 1 {
                let o = OutcomePair::new(InputCase::Smsv, k1, k2);
                total += run_tqe_oracle(InputCase::Smsv, &sq, &bs, o, Some(cutoff)).unwrap().probability;
            }
        }
        assert!((total - 1.0).abs() < 1e-12, "{total}");
    }
}
