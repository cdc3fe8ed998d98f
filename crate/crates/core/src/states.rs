//! Fock expansions of the measurement-induced CV states.
//!
//! With `w_m(y)[N] = y^{N/2} (2q)! / (q! sqrt(N!))`, `2q = N + m`, supported on
//! `N = m mod 2`, the unnormalized families are
//!
//! * no photon added: `w_k` (squeezed-vacuum input) or `w_{k+1}` (odd input),
//! * one photon added, `k > 0`: `w_j - (B sqrt(y)/k) a^dagger w_{j+1}`, whose
//!   coefficient is `w_j[N] (1 - B N / k)`, with `j = k-1` or `j = k`,
//! * one photon added, `k = 0`: `a^dagger w_0` or `a^dagger w_1`.
//!
//! Squared norms equal the closed forms of [`crate::analytic::family_norm`].

use crate::analytic::{family_norm, mean_photons_cv};
use crate::error::{Error, Result};
use crate::math::{ln_factorial, ln_pow, series_sum};
use crate::params::{check_b, check_y, InputCase, StateFamily};

/// `(sign, ln |c|)` of `w_m(y)[n]`; `None` off the parity support.
fn ln_w(m: usize, n: usize, y: f64) -> Option<(f64, f64)> {
    if (n + m) % 2 == 1 {
        return None;
    }
    let q = (n + m) / 2;
    Some((1.0, ln_pow(y, 0.5 * n as f64) + ln_factorial(2 * q) - ln_factorial(q) - 0.5 * ln_factorial(n)))
}

fn base_order(case: InputCase) -> usize {
    match case {
        InputCase::Smsv => 0,
        InputCase::Odd => 1,
    }
}

/// `(sign, ln |c_n|)` of the unnormalized state; `None` where the coefficient
/// vanishes identically.
fn ln_coefficient(family: StateFamily, n: usize, y: f64, b_param: f64) -> Option<(f64, f64)> {
    let k = family.subtracted;
    let base = base_order(family.case);
    match (family.added, k) {
        (0, _) => ln_w(k + base, n, y),
        (_, 0) => {
            if n == 0 {
                return None;
            }
            let (s, l) = ln_w(base, n - 1, y)?;
            Some((s, l + 0.5 * (n as f64).ln()))
        }
        (_, _) => {
            let (s, l) = ln_w(k - 1 + base, n, y)?;
            let factor = 1.0 - b_param * n as f64 / k as f64;
            if factor == 0.0 {
                return None;
            }
            Some((s * factor.signum(), l + factor.abs().ln()))
        }
    }
}

/// Unnormalized coefficients for photon numbers `0..=cutoff`.
pub fn unnormalized_coefficients(family: StateFamily, y_red: f64, b_param: f64, cutoff: usize) -> Result<Vec<f64>> {
    check_y(y_red)?;
    check_b(b_param)?;
    Ok((0..=cutoff)
        .map(|n| ln_coefficient(family, n, y_red, b_param).map_or(0.0, |(s, l)| s * l.exp()))
        .collect())
}

/// Normalized Fock coefficients of a CV state family up to `cutoff`.
///
/// Fails with [`Error::Truncation`] when the squared norm beyond `cutoff`
/// exceeds `tolerance`. At `y_red = 0` the state is the limit `y -> 0`,
/// a single Fock state.
pub fn cv_fock_coefficients(
    family: StateFamily,
    y_red: f64,
    b_param: f64,
    cutoff: usize,
    tolerance: f64,
) -> Result<Vec<f64>> {
    check_y(y_red)?;
    check_b(b_param)?;
    let mut out = vec![0.0; cutoff + 1];
    if y_red == 0.0 {
        let n0 = mean_photons_cv(family, 0.0, b_param)? as usize;
        if n0 > cutoff {
            return Err(Error::Truncation { cutoff, tail: 1.0, tolerance });
        }
        let sign = ln_coefficient(family, n0, 1.0, b_param).map_or(1.0, |(s, _)| s);
        out[n0] = sign;
        return Ok(out);
    }
    let (comb, _) = family_norm(family, b_param);
    let ln_norm = comb.ln_value(y_red)?;
    let mut kept = crate::math::NeumaierSum::default();
    for (n, slot) in out.iter_mut().enumerate() {
        if let Some((s, l)) = ln_coefficient(family, n, y_red, b_param) {
            let c = s * (l - 0.5 * ln_norm).exp();
            kept.add(c * c);
            *slot = c;
        }
    }
    let tail = (1.0 - kept.value()).max(0.0);
    if tail > tolerance {
        return Err(Error::Truncation { cutoff, tail, tolerance });
    }
    Ok(out)
}

fn series_moments(family: StateFamily, y_red: f64, b_param: f64) -> (f64, f64) {
    // Terms step through the parity support; the first index is 0 or 1.
    let parity = family.parity();
    let mut weighted = crate::math::NeumaierSum::default();
    let norm = series_sum(|i| {
        let n = parity + 2 * i;
        let c2 = ln_coefficient(family, n, y_red, b_param).map_or(0.0, |(_, l)| (2.0 * l).exp());
        weighted.add(n as f64 * c2);
        c2
    });
    (norm, weighted.value())
}

/// `sum_n |c_n|^2` of the unnormalized state by direct summation.
pub fn series_norm_sqr(family: StateFamily, y_red: f64, b_param: f64) -> Result<f64> {
    check_y(y_red)?;
    check_b(b_param)?;
    Ok(series_moments(family, y_red, b_param).0)
}

/// `sum_n n |c_n|^2 / sum_n |c_n|^2` by direct summation.
pub fn series_mean_photons(family: StateFamily, y_red: f64, b_param: f64) -> Result<f64> {
    check_y(y_red)?;
    check_b(b_param)?;
    let (norm, weighted) = series_moments(family, y_red, b_param);
    Ok(weighted / norm)
}

/// The heralded odd input state written as
/// `sum_n y1^n (2n)!/n! (2n+1)/sqrt((2n+1)!) |2n+1>`, normalized.
///
/// This is the same direction as the one-photon-subtracted family
/// `(Smsv, added 0, k = 1)`; the two series differ by an overall factor 2.
pub fn odd_input_alternate_form(y1: f64, cutoff: usize) -> Result<Vec<f64>> {
    check_y(y1)?;
    let mut out = vec![0.0; cutoff + 1];
    let mut norm = crate::math::NeumaierSum::default();
    for n in 0..=(cutoff.saturating_sub(1) / 2) {
        let idx = 2 * n + 1;
        if idx > cutoff {
            break;
        }
        let l = ln_pow(y1, n as f64) + ln_factorial(2 * n) - ln_factorial(n) + ((2 * n + 1) as f64).ln()
            - 0.5 * ln_factorial(2 * n + 1);
        out[idx] = l.exp();
        norm.add(out[idx] * out[idx]);
    }
    let scale = norm.value().sqrt();
    out.iter_mut().for_each(|c| *c /= scale);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{family_norm_value, norm_g1, norm_g1_odd};
    use approx::assert_relative_eq;

    fn fam(case: InputCase, added: u8, k: usize) -> StateFamily {
        StateFamily { case, added, subtracted: k }
    }

    fn all_families(k_max: usize) -> Vec<StateFamily> {
        let mut v = Vec::new();
        for case in [InputCase::Smsv, InputCase::Odd] {
            for added in 0..=1 {
                for k in 0..=k_max {
                    v.push(fam(case, added, k));
                }
            }
        }
        v
    }

    #[test]
    fn vacuum_limit() {
        let c = cv_fock_coefficients(fam(InputCase::Smsv, 0, 0), 0.0, 1.0, 5, 1e-12).unwrap();
        assert_eq!(c, vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let c = cv_fock_coefficients(fam(InputCase::Odd, 1, 0), 0.0, 1.0, 5, 1e-12).unwrap();
        assert_eq!(c[2], 1.0);
    }

    #[test]
    fn normalized_with_correct_parity() {
        for f in all_families(5) {
            let c = cv_fock_coefficients(f, 0.3, 0.7, 400, 1e-12).unwrap();
            let norm: f64 = c.iter().map(|x| x * x).sum();
            assert!((norm - 1.0).abs() < 1e-12, "{f:?}");
            for (n, x) in c.iter().enumerate() {
                if n % 2 != f.parity() {
                    assert_eq!(*x, 0.0);
                }
            }
        }
    }

    #[test]
    fn truncation_is_reported() {
        let err = cv_fock_coefficients(fam(InputCase::Smsv, 0, 2), 0.45, 1.0, 20, 1e-12).unwrap_err();
        assert!(matches!(err, Error::Truncation { cutoff: 20, .. }));
    }

    #[test]
    fn orthogonality_of_added_and_plain_states() {
        for case in [InputCase::Smsv, InputCase::Odd] {
            for k in 0..5 {
                let a = cv_fock_coefficients(fam(case, 0, k), 0.2, 2.0, 200, 1e-12).unwrap();
                let b = cv_fock_coefficients(fam(case, 1, k), 0.2, 2.0, 200, 1e-12).unwrap();
                assert!(a.iter().zip(&b).all(|(x, y)| *x == 0.0 || *y == 0.0));
            }
        }
    }

    #[test]
    fn closed_norms_match_direct_sums() {
        for &(y, b) in &[(0.05, 0.2), (0.2, 1.0), (0.35, 5.0), (0.45, 0.5)] {
            for f in all_families(4) {
                let direct = series_norm_sqr(f, y, b).unwrap();
                let closed = family_norm_value(f, y, b).unwrap();
                assert!((direct - closed).abs() <= 1e-8 * closed, "{f:?} y={y} B={b}: {direct} vs {closed}");
                let m = mean_photons_cv(f, y, b).unwrap();
                let md = series_mean_photons(f, y, b).unwrap();
                assert!((m - md).abs() <= 1e-9 * md.max(1.0), "{f:?} y={y} B={b}: {m} vs {md}");
            }
        }
    }

    #[test]
    fn norm_examples_against_direct_sums() {
        let s = series_norm_sqr(fam(InputCase::Smsv, 1, 2), 0.1, 1.0).unwrap();
        assert_relative_eq!(norm_g1(2, 0.1, 1.0).unwrap(), s, max_relative = 1e-12);
        for k in [1, 2] {
            let s = series_norm_sqr(fam(InputCase::Odd, 1, k), 0.1, 0.5).unwrap();
            assert_relative_eq!(norm_g1_odd(k, 0.1, 0.5).unwrap(), s, max_relative = 1e-12);
        }
        let s = series_mean_photons(fam(InputCase::Smsv, 1, 0), 0.2, 1.0).unwrap();
        assert_relative_eq!(s, 11.0 / 7.0, max_relative = 1e-13);
    }

    #[test]
    fn odd_input_forms_describe_the_same_state() {
        let y1 = 0.3;
        let canonical = cv_fock_coefficients(fam(InputCase::Smsv, 0, 1), y1, 1.0, 300, 1e-14).unwrap();
        let alternate = odd_input_alternate_form(y1, 300).unwrap();
        for (a, b) in canonical.iter().zip(&alternate) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    /// `a^k` applied to the squeezed vacuum `sum_n y^n sqrt((2n)!)/n! |2n>`.
    fn annihilated_smsv(k: usize, y: f64, cutoff: usize) -> Vec<f64> {
        let full = cutoff + k;
        let mut smsv = vec![0.0; full + 1];
        for n in 0..=full / 2 {
            smsv[2 * n] = (ln_pow(y, n as f64) + 0.5 * ln_factorial(2 * n) - ln_factorial(n)).exp();
        }
        let mut out: Vec<f64> = (0..=cutoff)
            .map(|m| smsv[m + k] * (0.5 * (ln_factorial(m + k) - ln_factorial(m))).exp())
            .collect();
        let norm = out.iter().map(|x| x * x).sum::<f64>().sqrt();
        out.iter_mut().for_each(|x| *x /= norm);
        out
    }

    #[test]
    fn weak_splitter_limit_is_photon_subtraction() {
        let y = 0.3;
        let b = 1e-6;
        for k in 0..5 {
            let c = cv_fock_coefficients(fam(InputCase::Smsv, 0, k), y / (1.0 + b), b, 200, 1e-12).unwrap();
            let reference = annihilated_smsv(k, y, 200);
            for (x, r) in c.iter().zip(&reference) {
                assert!((x - r).abs() < 1e-4);
            }
        }
    }
}
