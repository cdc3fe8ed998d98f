//! Closed-form amplitudes, normalization factors, distortion factors, outcome
//! probabilities, negativity and mean photon numbers.
//!
//! Each arm of the setup maps the input CV state and either zero or one photon
//! of the nonlocal photon to `sum_k c_k |Psi_k> |k>`, where `|k>` is the photon
//! count in the measuring mode. The heralded two-mode state is
//! `(|Psi^(0)_k1>|Psi^(1)_k2> + b |Psi^(1)_k1>|Psi^(0)_k2>) / sqrt(1 + b^2)`.
//!
//! Quantities are carried as logarithms where factorials and high derivatives
//! meet; the sign of `b` comes from the `(-1)^k` phases of the amplitudes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{ln_add_exp, ln_factorial};
use crate::params::{check_b, check_y, InputCase, OutcomePair, ReducedSqueeze, SplitterSpec, SqueezeSpec, StateFamily};
use crate::zfunc::{ln_z_derivative, z_derivative, ZCombination};

/// `(sign, ln |x|)`.
type SignedLn = (f64, f64);

fn ln_abs_amplitude(added: u8, k: usize, y_red: f64, b_param: f64) -> SignedLn {
    let kf = k as f64;
    let ln_yb = (y_red * b_param).ln();
    match (added, k) {
        (0, _) => {
            let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
            let ln = if k == 0 { 0.0 } else { 0.5 * kf * ln_yb - 0.5 * ln_factorial(k) };
            (sign, ln)
        }
        (_, 0) => (1.0, 0.5 * (b_param / (1.0 + b_param)).ln()),
        (_, _) => {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            let ln_power = if k == 1 { 0.0 } else { 0.5 * (kf - 1.0) * ln_yb };
            (sign, ln_power + kf.ln() - 0.5 * ln_factorial(k) - 0.5 * (1.0 + b_param).ln())
        }
    }
}

/// Amplitude of `|Psi_k> |k>` in the output of one arm.
///
/// `added = 0`: `(-1)^k (yB)^{k/2} / sqrt(k!)`.
/// `added = 1`: `sqrt(B/(1+B))` at `k = 0`, else
/// `(-1)^{k+1} (yB)^{(k-1)/2} k / sqrt((1+B) k!)`.
/// `y_red` is `y1` for squeezed-vacuum inputs and `y2` for odd inputs.
pub fn amplitude(family: StateFamily, y_red: f64, b_param: f64) -> Result<f64> {
    check_y(y_red)?;
    check_b(b_param)?;
    let (sign, ln) = ln_abs_amplitude(family.added, family.subtracted, y_red, b_param);
    Ok(sign * ln.exp())
}

/// Normalization factor of a CV state family, as a combination of `Z`
/// derivatives, and the photon-number offset of its Fock support relative to
/// the Taylor index of that combination.
pub fn family_norm(family: StateFamily, b_param: f64) -> (ZCombination, usize) {
    let k = family.subtracted;
    let base = match family.case {
        InputCase::Smsv => 0,
        InputCase::Odd => 1,
    };
    if family.added == 0 {
        return (ZCombination::single(k + base), 0);
    }
    if k == 0 {
        // a^dagger w: squared norm Z^(j) + y Z^(j+1), photon number raised by one.
        return (ZCombination::new(base, 1.0, 1.0, 0.0), 1);
    }
    let c1 = 2.0 * b_param / k as f64;
    let c2 = (b_param / k as f64).powi(2);
    (ZCombination::new(k - 1 + base, 1.0, c2 - c1, c2), 0)
}

fn ln_family_norm(family: StateFamily, y_red: f64, b_param: f64) -> Result<f64> {
    family_norm(family, b_param).0.ln_value(y_red)
}

/// `G_k^(1)(y1, B)`; `Z^3(y1)` at `k = 0`.
pub fn norm_g1(k: usize, y1: f64, b_param: f64) -> Result<f64> {
    check_b(b_param)?;
    Ok(ln_family_norm(StateFamily { case: InputCase::Smsv, added: 1, subtracted: k }, y1, b_param)?.exp())
}

/// `G_1k^(01)(y2, B)`; `d/dy (y Z'(y))` at `k = 0`.
pub fn norm_g1_odd(k: usize, y2: f64, b_param: f64) -> Result<f64> {
    check_b(b_param)?;
    Ok(ln_family_norm(StateFamily { case: InputCase::Odd, added: 1, subtracted: k }, y2, b_param)?.exp())
}

/// Normalization of a family given its parameters, `Z^(k)` or `Z^(k+1)` for
/// `added = 0`, `G` for `added = 1`.
pub fn family_norm_value(family: StateFamily, y_red: f64, b_param: f64) -> Result<f64> {
    check_b(b_param)?;
    Ok(ln_family_norm(family, y_red, b_param)?.exp())
}

/// Mean photon number `<n>` of a normalized CV state family.
pub fn mean_photons_cv(family: StateFamily, y_red: f64, b_param: f64) -> Result<f64> {
    check_b(b_param)?;
    let (comb, shift) = family_norm(family, b_param);
    Ok(shift as f64 + comb.log_derivative(y_red)?)
}

/// `ln |b|` and the sign of `b`, via the four-branch form.
fn ln_distortion(outcome: OutcomePair, y_red: f64, b_param: f64) -> Result<SignedLn> {
    let (k1, k2) = (outcome.k1, outcome.k2);
    if k1 == k2 {
        return Ok((1.0, 0.0));
    }
    let fam = |added, k| StateFamily { case: outcome.case, added, subtracted: k };
    let ln_g = |k| ln_family_norm(fam(1, k), y_red, b_param);
    let ln_z = |k| ln_family_norm(fam(0, k), y_red, b_param);
    let ln_b = b_param.ln();
    let ln_yb = (y_red * b_param).ln();
    let (sign, ln) = if k1 == 0 {
        let ln = 0.5 * ln_b + 0.5 * ln_yb - (k2 as f64).ln()
            + 0.5 * (ln_g(0)? + ln_z(k2)? - ln_g(k2)? - ln_z(0)?);
        (-1.0, ln)
    } else if k2 == 0 {
        let ln = -0.5 * ln_b + (k1 as f64).ln() - 0.5 * ln_yb
            + 0.5 * (ln_g(k1)? + ln_z(0)? - ln_g(0)? - ln_z(k1)?);
        (-1.0, ln)
    } else {
        let ln = (k1 as f64 / k2 as f64).ln() + 0.5 * (ln_g(k1)? + ln_z(k2)? - ln_g(k2)? - ln_z(k1)?);
        (1.0, ln)
    };
    if ln.is_nan() {
        return Err(Error::DegenerateOutcome { k1, k2, y: y_red });
    }
    Ok((sign, ln))
}

/// Distortion factor `b_{k1 k2}`: ratio of the amplitude of
/// `|Psi^(1)_k1>|Psi^(0)_k2>` to that of `|Psi^(0)_k1>|Psi^(1)_k2>`.
///
/// `y_red` is `y1` for squeezed-vacuum inputs, `y2` for odd inputs.
/// Equal counts give exactly 1. Outcomes that are impossible at `y_red = 0`
/// (both terms vanish) are reported as [`Error::DegenerateOutcome`].
pub fn distortion_b(outcome: OutcomePair, y_red: f64, b_param: f64) -> Result<f64> {
    check_y(y_red)?;
    check_b(b_param)?;
    let (sign, ln) = ln_distortion(outcome, y_red, b_param)?;
    Ok(sign * ln.exp())
}

/// `2|b| / (1 + b^2)`, written so that `b = 0` and `|b| = inf` give 0.
pub fn negativity_from_b(b: f64) -> f64 {
    let a = b.abs();
    if a == 0.0 || a.is_infinite() {
        return 0.0;
    }
    2.0 / (a + 1.0 / a)
}

/// Which reduced parameter enters the power `(yB)^{k1}` of the `k2 = 0`
/// branch of the odd-input probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum OddMiddleBranch {
    /// `y2`, consistent with every other factor; agrees with the Fock simulation.
    #[default]
    ReducedY2,
    /// `y1`, as printed.
    PrintedY1,
}

fn reduced(squeeze: &SqueezeSpec, splitter: &SplitterSpec) -> ReducedSqueeze {
    splitter.reduce(squeeze)
}

/// `ln` of the squared norm of the input CV state in the same unnormalized
/// convention as the arm amplitudes: `cosh^2 s` or `Z'(y1)^2`.
fn ln_input_norm_sq(case: InputCase, r: &ReducedSqueeze, squeeze: &SqueezeSpec) -> Result<f64> {
    Ok(match case {
        InputCase::Smsv => -squeeze.inverse_cosh_sq().ln(),
        InputCase::Odd => 2.0 * ln_z_derivative(1, r.y1)?,
    })
}

/// Probability of registering `(k1, k2)` in the two measuring modes.
pub fn outcome_probability(outcome: OutcomePair, squeeze: &SqueezeSpec, splitter: &SplitterSpec) -> Result<f64> {
    outcome_probability_with(outcome, squeeze, splitter, OddMiddleBranch::default())
}

/// [`outcome_probability`] with an explicit choice of the odd-input middle
/// branch.
///
/// Uses the three-branch closed form. Where that form is `0 * inf` (vacuum
/// input with an outcome whose `b` is 0 or infinite), the algebraically equal
/// two-term form [`outcome_probability_from_amplitudes`] is used.
pub fn outcome_probability_with(
    outcome: OutcomePair,
    squeeze: &SqueezeSpec,
    splitter: &SplitterSpec,
    middle: OddMiddleBranch,
) -> Result<f64> {
    let r = reduced(squeeze, splitter);
    let b_param = splitter.b_param;
    let y_red = outcome.case.state_parameter(&r);
    let (k1, k2) = (outcome.k1, outcome.k2);
    let fam = |added, k| StateFamily { case: outcome.case, added, subtracted: k };
    let ln_z = |k| ln_family_norm(fam(0, k), y_red, b_param);
    let ln_g = |k| ln_family_norm(fam(1, k), y_red, b_param);
    let ln_yb = (y_red * b_param).ln();

    let ln_n = match ln_distortion(outcome, y_red, b_param) {
        Ok((_, ln_b)) => ln_add_exp(0.0, 2.0 * ln_b),
        Err(Error::DegenerateOutcome { .. }) => f64::NAN,
        Err(e) => return Err(e),
    };
    let ln_pre = ln_n - (2.0 * (1.0 + b_param)).ln() - ln_input_norm_sq(outcome.case, &r, squeeze)?;
    let ln_branch = if k1 == 0 && k2 == 0 {
        b_param.ln() + ln_z(0)? + ln_g(0)?
    } else if k2 == 0 {
        let ln_power = match (outcome.case, middle) {
            (InputCase::Odd, OddMiddleBranch::PrintedY1) => (r.y1 * b_param).ln(),
            _ => ln_yb,
        };
        b_param.ln() + k1 as f64 * ln_power - ln_factorial(k1) + ln_z(k1)? + ln_g(0)?
    } else {
        let power = (k1 + k2 - 1) as f64;
        let ln_power = if power == 0.0 { 0.0 } else { power * ln_yb };
        ln_power - ln_factorial(k1) - ln_factorial(k2) + 2.0 * (k2 as f64).ln() + ln_z(k1)? + ln_g(k2)?
    };
    let p = (ln_pre + ln_branch).exp();
    if p.is_finite() {
        Ok(p)
    } else {
        outcome_probability_from_amplitudes(outcome, squeeze, splitter)
    }
}

/// Outcome probability as `(|A0_k1|^2 |A1_k2|^2 + |A1_k1|^2 |A0_k2|^2) / 2`,
/// the two product terms being orthogonal by parity. `|A_k|^2` is the squared
/// amplitude times the family normalization over the input norm.
pub fn outcome_probability_from_amplitudes(
    outcome: OutcomePair,
    squeeze: &SqueezeSpec,
    splitter: &SplitterSpec,
) -> Result<f64> {
    let r = reduced(squeeze, splitter);
    let b_param = splitter.b_param;
    let y_red = outcome.case.state_parameter(&r);
    let ln_in = ln_input_norm_sq(outcome.case, &r, squeeze)?;
    let ln_arm = |added: u8, k: usize| -> Result<f64> {
        let (_, ln_c) = ln_abs_amplitude(added, k, y_red, b_param);
        let fam = StateFamily { case: outcome.case, added, subtracted: k };
        Ok(2.0 * ln_c + ln_family_norm(fam, y_red, b_param)?)
    };
    let t1 = ln_arm(0, outcome.k1)? + ln_arm(1, outcome.k2)?;
    let t2 = ln_arm(1, outcome.k1)? + ln_arm(0, outcome.k2)?;
    let p = (ln_add_exp(t1, t2) - 2f64.ln() - ln_in).exp();
    Ok(if p.is_nan() { 0.0 } else { p })
}

/// `sum_{k=1}^{k_max} P_kk`, plus `P_00` when `include_vacuum` is set.
pub fn equal_outcome_sum(
    case: InputCase,
    squeeze: &SqueezeSpec,
    splitter: &SplitterSpec,
    k_max: usize,
    include_vacuum: bool,
) -> Result<f64> {
    let start = if include_vacuum { 0 } else { 1 };
    let mut total = 0.0;
    for k in start..=k_max {
        total += outcome_probability(OutcomePair::new(case, k, k), squeeze, splitter)?;
    }
    Ok(total)
}

/// Everything about one heralded two-mode state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntanglementReport {
    pub case: InputCase,
    pub k1: usize,
    pub k2: usize,
    pub s_db: f64,
    pub b_param: f64,
    pub b: f64,
    pub norm_n: f64,
    pub negativity: f64,
    pub probability: f64,
    pub mean_photons_mode1: f64,
    pub mean_photons_mode2: f64,
}

/// Weights `(1, b^2) / (1 + b^2)` without overflow for large `|b|`.
pub(crate) fn branch_weights(b: f64) -> (f64, f64) {
    let b2 = b * b;
    if b2 <= 1.0 {
        (1.0 / (1.0 + b2), b2 / (1.0 + b2))
    } else {
        let inv = 1.0 / b2;
        (inv / (1.0 + inv), 1.0 / (1.0 + inv))
    }
}

/// Distortion factor, negativity, probability and per-mode mean photon numbers
/// for the state heralded by `outcome`.
pub fn entanglement_report(
    outcome: OutcomePair,
    squeeze: &SqueezeSpec,
    splitter: &SplitterSpec,
) -> Result<EntanglementReport> {
    let r = reduced(squeeze, splitter);
    let b_param = splitter.b_param;
    let y_red = outcome.case.state_parameter(&r);
    let b = distortion_b(outcome, y_red, b_param)?;
    let probability = outcome_probability(outcome, squeeze, splitter)?;
    let fam = |added, k| StateFamily { case: outcome.case, added, subtracted: k };
    let n = |added, k| mean_photons_cv(fam(added, k), y_red, b_param);
    let (w_first, w_second) = branch_weights(b);
    // The first product term carries the added-0 state in mode 1.
    let mean_photons_mode1 = w_first * n(0, outcome.k1)? + w_second * n(1, outcome.k1)?;
    let mean_photons_mode2 = w_first * n(1, outcome.k2)? + w_second * n(0, outcome.k2)?;
    Ok(EntanglementReport {
        case: outcome.case,
        k1: outcome.k1,
        k2: outcome.k2,
        s_db: squeeze.s_db,
        b_param,
        b,
        norm_n: 1.0 + b * b,
        negativity: negativity_from_b(b),
        probability,
        mean_photons_mode1,
        mean_photons_mode2,
    })
}

/// `P_02` for squeezed-vacuum inputs when `|b_02| = 1`:
/// `4 Z(y1) G_2(y1) y1 B / ((1+B) cosh^2 s 2!)`.
pub fn p02_unit_distortion(squeeze: &SqueezeSpec, splitter: &SplitterSpec) -> Result<f64> {
    let y1 = reduced(squeeze, splitter).y1;
    let b_param = splitter.b_param;
    Ok(4.0 * z_derivative(0, y1)? * norm_g1(2, y1, b_param)? * y1 * b_param * squeeze.inverse_cosh_sq()
        / ((1.0 + b_param) * 2.0))
}

/// `P_20` for squeezed-vacuum inputs when `|b_20| = 1`:
/// `4 B (1 + 8 y1^2) Z^8(y1) (y1 B)^2 / ((1+B) cosh^2 s 2!)`,
/// using `Z''(y) Z^3(y) = 4 (1 + 8y^2) Z^8(y)`.
pub fn p20_unit_distortion(squeeze: &SqueezeSpec, splitter: &SplitterSpec) -> Result<f64> {
    let y1 = reduced(squeeze, splitter).y1;
    let b_param = splitter.b_param;
    Ok(4.0 * b_param * (1.0 + 8.0 * y1 * y1) * z_derivative(0, y1)?.powi(8) * (y1 * b_param).powi(2)
        * squeeze.inverse_cosh_sq()
        / ((1.0 + b_param) * 2.0))
}

/// No-click probabilities of the two odd-input channels:
/// `Z'(y2)/Z'(y1)` (no photon added) and `B/(1+B) * d/dy(y Z')(y2) / Z'(y1)`
/// (one photon added). Their product is `P_00` for odd inputs.
pub fn odd_no_click_factors(squeeze: &SqueezeSpec, splitter: &SplitterSpec) -> Result<(f64, f64)> {
    let r = reduced(squeeze, splitter);
    let b_param = splitter.b_param;
    let zp1 = z_derivative(1, r.y1)?;
    let p_plain = z_derivative(1, r.y2)? / zp1;
    let p_added = b_param / (1.0 + b_param) * norm_g1_odd(0, r.y2, b_param)? / zp1;
    Ok((p_plain, p_added))
}

/// Closed forms of the same two factors in terms of `(1 - 4y^2)` powers.
pub fn odd_no_click_factors_explicit(squeeze: &SqueezeSpec, splitter: &SplitterSpec) -> (f64, f64) {
    let r = reduced(squeeze, splitter);
    let b_param = splitter.b_param;
    let u1 = 1.0 - 4.0 * r.y1 * r.y1;
    let u2 = 1.0 - 4.0 * r.y2 * r.y2;
    let p_plain = (u1 / u2).powf(1.5) / (1.0 + b_param);
    let p_added = 2.0 * b_param / (1.0 + b_param).powi(2) * u1.powf(1.5) * (1.0 + 2.0 * r.y2 * r.y2) / u2.powf(2.5);
    (p_plain, p_added)
}

/// Vanishing-squeezing limits of selected probabilities.
pub mod limits {
    /// `P_00 -> B/(1+B)` for squeezed-vacuum inputs.
    pub fn p00_smsv(b_param: f64) -> f64 {
        b_param / (1.0 + b_param)
    }

    /// `P_00 -> 2B/(1+B)^3` for odd inputs.
    pub fn p00_odd(b_param: f64) -> f64 {
        2.0 * b_param / (1.0 + b_param).powi(3)
    }

    /// `P_11 -> B (1-B)^2 / (1+B)^3` for odd inputs.
    pub fn p11_odd(b_param: f64) -> f64 {
        b_param * (1.0 - b_param).powi(2) / (1.0 + b_param).powi(3)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn fam(case: InputCase, added: u8, k: usize) -> StateFamily {
        StateFamily { case, added, subtracted: k }
    }

    fn setup(s_db: f64, b: f64) -> (SqueezeSpec, SplitterSpec) {
        (SqueezeSpec::from_db(s_db).unwrap(), SplitterSpec::from_b(b).unwrap())
    }

    fn z(y: f64) -> f64 {
        1.0 / (1.0 - 4.0 * y * y).sqrt()
    }

    #[test]
    fn amplitude_examples() {
        for (y, b) in [(0.0, 1.0), (0.3, 7.0)] {
            assert_eq!(amplitude(fam(InputCase::Smsv, 0, 0), y, b).unwrap(), 1.0);
        }
        assert_relative_eq!(amplitude(fam(InputCase::Smsv, 1, 0), 0.2, 1.0).unwrap(), 0.5f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(amplitude(fam(InputCase::Smsv, 0, 2), 0.2, 1.0).unwrap(), 0.141_421_356_237_309_5, max_relative = 1e-14);
        // Signs alternate as (-1)^k and (-1)^{k+1}.
        assert!(amplitude(fam(InputCase::Odd, 0, 3), 0.1, 2.0).unwrap() < 0.0);
        assert!(amplitude(fam(InputCase::Odd, 1, 2), 0.1, 2.0).unwrap() < 0.0);
        assert!(amplitude(fam(InputCase::Odd, 1, 1), 0.0, 2.0).unwrap() > 0.0);
    }

    #[test]
    fn norm_examples() {
        assert_relative_eq!(norm_g1(0, 0.2, 3.0).unwrap(), 0.84f64.powf(-1.5), max_relative = 1e-14);
        assert_relative_eq!(norm_g1(0, 0.2, 3.0).unwrap(), 1.298_916_013_309_478_6, max_relative = 1e-12);
        assert_relative_eq!(norm_g1(0, 0.0, 3.0).unwrap(), 1.0, max_relative = 1e-15);
        // Frozen from symbolic differentiation of the defining combinations.
        assert_relative_eq!(norm_g1(2, 0.1, 1.0).unwrap(), 0.109_083_269_885_770_66, max_relative = 1e-12);
        assert_relative_eq!(norm_g1_odd(1, 0.1, 0.5).unwrap(), 0.109_083_269_885_770_66, max_relative = 1e-12);
        assert_relative_eq!(norm_g1_odd(2, 0.1, 0.5).unwrap(), 4.181_236_948_651_334, max_relative = 1e-12);
        assert_relative_eq!(norm_g1_odd(0, 0.1, 0.5).unwrap(), 0.903_674_601_287_196_9, max_relative = 1e-12);
        // d/dy (y Z'(y)) = 8 y Z^3 + 48 y^3 Z^5 vanishes at the origin.
        assert_eq!(norm_g1_odd(0, 0.0, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn mean_photon_examples() {
        let y = 0.2;
        let m = mean_photons_cv(fam(InputCase::Smsv, 0, 0), y, 1.0).unwrap();
        assert_relative_eq!(m, 4.0 * y * y * z(y).powi(2), max_relative = 1e-14);
        let s1 = (2.0 * y).atanh();
        assert_relative_eq!(m, s1.sinh().powi(2), max_relative = 1e-13);
        assert_eq!(mean_photons_cv(fam(InputCase::Smsv, 0, 0), 0.0, 1.0).unwrap(), 0.0);
        // a^dagger on the squeezed vacuum: 1 + 12 y^2 Z^2 = 11/7 at y = 0.2.
        assert_relative_eq!(mean_photons_cv(fam(InputCase::Smsv, 1, 0), y, 1.0).unwrap(), 11.0 / 7.0, max_relative = 1e-13);
        // Odd family with one photon added and none subtracted starts at |2>.
        assert_eq!(mean_photons_cv(fam(InputCase::Odd, 1, 0), 0.0, 1.0).unwrap(), 2.0);
        assert_eq!(mean_photons_cv(fam(InputCase::Odd, 0, 0), 0.0, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn frozen_probabilities_and_distortions() {
        // Values from an independent dense-matrix simulation of both arms.
        let cases = [
            (InputCase::Smsv, 6.0, 1.0, 1, 1, 0.035_672_183_110_281_42, 1.0),
            (InputCase::Odd, 6.0, 1.0, 1, 1, 0.015_673_930_791_784_807, 1.0),
            (InputCase::Smsv, 6.0, 1.0, 0, 2, 0.022_251_540_063_000_21, -1.114_535_417_947_195_8),
            (InputCase::Odd, 6.0, 1.0, 0, 2, 0.109_299_701_918_904_09, -0.337_423_632_531_277_9),
            (InputCase::Smsv, 10.0, 0.2, 2, 1, 0.020_971_588_316_294_77, 0.774_791_151_839_147_6),
            (InputCase::Odd, 10.0, 0.2, 2, 1, 0.046_403_158_797_174_35, 1.967_826_852_618_779_2),
            (InputCase::Smsv, 2.0, 5.0, 0, 1, 0.086_525_434_668_874_51, -0.183_657_347_384_077_05),
            (InputCase::Odd, 2.0, 5.0, 0, 1, 0.152_189_970_492_770_53, -1.767_335_026_154_951_2),
        ];
        for (case, s_db, b, k1, k2, p, dist) in cases {
            let (sq, bs) = setup(s_db, b);
            let o = OutcomePair::new(case, k1, k2);
            let y_red = case.state_parameter(&bs.reduce(&sq));
            assert_relative_eq!(outcome_probability(o, &sq, &bs).unwrap(), p, max_relative = 1e-11);
            assert_relative_eq!(distortion_b(o, y_red, b).unwrap(), dist, max_relative = 1e-11);
        }
    }

    #[test]
    fn printed_middle_branch_differs_by_powers_of_one_plus_b() {
        let (sq, bs) = setup(6.0, 1.0);
        let o = OutcomePair::new(InputCase::Odd, 2, 0);
        let y2 = outcome_probability_with(o, &sq, &bs, OddMiddleBranch::ReducedY2).unwrap();
        let y1 = outcome_probability_with(o, &sq, &bs, OddMiddleBranch::PrintedY1).unwrap();
        assert_relative_eq!(y1 / y2, 4.0, max_relative = 1e-12);
        // The two-term amplitude form arbitrates.
        assert_relative_eq!(outcome_probability_from_amplitudes(o, &sq, &bs).unwrap(), y2, max_relative = 1e-12);
    }

    #[test]
    fn vacuum_input_outcomes() {
        // One photon split by a beam splitter with transmission T.
        let (sq, bs) = setup(0.0, 3.0);
        let p = |case, k1, k2| outcome_probability(OutcomePair::new(case, k1, k2), &sq, &bs).unwrap();
        assert_relative_eq!(p(InputCase::Smsv, 0, 0), bs.big_r, max_relative = 1e-14);
        assert_relative_eq!(p(InputCase::Smsv, 0, 1), bs.big_t / 2.0, max_relative = 1e-14);
        assert_eq!(p(InputCase::Smsv, 0, 2), 0.0);
        let b = distortion_b(OutcomePair::new(InputCase::Smsv, 0, 1), 0.0, 3.0).unwrap();
        assert_eq!(negativity_from_b(b), 0.0);
        assert!(matches!(
            distortion_b(OutcomePair::new(InputCase::Smsv, 0, 2), 0.0, 3.0),
            Err(Error::DegenerateOutcome { .. })
        ));
    }

    #[test]
    fn negativity_examples() {
        assert_eq!(negativity_from_b(1.0), 1.0);
        assert_eq!(negativity_from_b(-1.0), 1.0);
        assert_eq!(negativity_from_b(0.0), 0.0);
        assert_eq!(negativity_from_b(f64::INFINITY), 0.0);
    }

    #[test]
    fn unit_distortion_forms_match_general_formula_with_n_equal_two() {
        let (sq, bs) = setup(9.0, 0.7);
        let y1 = bs.reduce(&sq).y1;
        for (k1, k2, closed) in [(0, 2, p02_unit_distortion(&sq, &bs).unwrap()), (2, 0, p20_unit_distortion(&sq, &bs).unwrap())] {
            let o = OutcomePair::new(InputCase::Smsv, k1, k2);
            let b = distortion_b(o, y1, 0.7).unwrap();
            let general = outcome_probability(o, &sq, &bs).unwrap();
            assert_relative_eq!(general * 2.0 / (1.0 + b * b), closed, max_relative = 1e-12);
        }
    }

    #[test]
    fn odd_no_click_factorization() {
        for (s_db, b) in [(0.5, 0.3), (6.0, 1.0), (12.0, 4.0)] {
            let (sq, bs) = setup(s_db, b);
            let (a, c) = odd_no_click_factors(&sq, &bs).unwrap();
            let (ae, ce) = odd_no_click_factors_explicit(&sq, &bs);
            assert_relative_eq!(a, ae, max_relative = 1e-12);
            assert_relative_eq!(c, ce, max_relative = 1e-12);
            let p00 = outcome_probability(OutcomePair::new(InputCase::Odd, 0, 0), &sq, &bs).unwrap();
            assert!((p00 - a * c).abs() < 1e-10);
        }
    }

    #[test]
    fn report_is_consistent() {
        let (sq, bs) = setup(8.0, 0.6);
        let r = entanglement_report(OutcomePair::new(InputCase::Odd, 1, 3), &sq, &bs).unwrap();
        assert_relative_eq!(r.norm_n, 1.0 + r.b * r.b);
        assert_relative_eq!(r.negativity, 2.0 * r.b.abs() / r.norm_n, max_relative = 1e-14);
        assert!(r.mean_photons_mode1 > 0.0 && r.mean_photons_mode2 > 0.0);
    }

    fn outcome_strategy() -> impl Strategy<Value = (InputCase, usize, usize)> {
        (prop_oneof![Just(InputCase::Smsv), Just(InputCase::Odd)], 0usize..8, 0usize..8)
    }

    proptest! {
        #[test]
        fn reciprocity_of_distortion((case, k1, k2) in outcome_strategy(), y in 0.001f64..0.45, b in 0.01f64..50.0) {
            let f = distortion_b(OutcomePair::new(case, k1, k2), y, b).unwrap();
            let g = distortion_b(OutcomePair::new(case, k2, k1), y, b).unwrap();
            prop_assert!((f * g - 1.0).abs() < 1e-12);
            if k1 == k2 {
                prop_assert_eq!(f, 1.0);
            }
        }

        #[test]
        fn negativity_is_symmetric_under_inversion(b in 1e-6f64..1e6) {
            prop_assert!((negativity_from_b(b) - negativity_from_b(1.0 / b)).abs() < 1e-12);
            let n = negativity_from_b(b);
            prop_assert!((0.0..=1.0).contains(&n));
        }

        #[test]
        fn branch_and_amplitude_forms_agree((case, k1, k2) in outcome_strategy(), s_db in 0.1f64..15.0, b in 0.01f64..100.0) {
            let (sq, bs) = setup(s_db, b);
            let o = OutcomePair::new(case, k1, k2);
            let p = outcome_probability(o, &sq, &bs).unwrap();
            let q = outcome_probability_from_amplitudes(o, &sq, &bs).unwrap();
            prop_assert!((p - q).abs() <= 1e-11 * q.max(1e-300), "{} vs {}", p, q);
            prop_assert!((0.0..=1.0).contains(&p));
        }

        #[test]
        fn probabilities_are_symmetric((case, k1, k2) in outcome_strategy(), s_db in 0.1f64..15.0, b in 0.01f64..100.0) {
            let (sq, bs) = setup(s_db, b);
            let p = outcome_probability(OutcomePair::new(case, k1, k2), &sq, &bs).unwrap();
            let q = outcome_probability(OutcomePair::new(case, k2, k1), &sq, &bs).unwrap();
            prop_assert!((p - q).abs() <= 1e-11 * p.max(1e-300));
        }

        #[test]
        fn cosh_identity(s_db in 0.0f64..20.0, b in 0.01f64..100.0) {
            let (sq, bs) = setup(s_db, b);
            let y1 = bs.reduce(&sq).y1;
            let lhs = 1.0 - 4.0 * y1 * y1 * (1.0 + b).powi(2);
            prop_assert!((lhs - 1.0 / sq.s.cosh().powi(2)).abs() < 1e-12);
        }
    }
}
