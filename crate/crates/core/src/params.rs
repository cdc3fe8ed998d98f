//! Physical parameterizations of the input states, beam splitters and
//! measurement records.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Squeezing of an input SMSV state.
///
/// `y = tanh(s)/2` is the expansion parameter of the Fock series and
/// `s_db = 20 s / ln 10` the squeezing in decibels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezeSpec {
    pub s: f64,
    pub y: f64,
    pub s_db: f64,
    pub mean_photons: f64,
}

impl SqueezeSpec {
    /// Builds the squeezing from decibels: `s = S ln(10) / 20`.
    pub fn from_db(s_db: f64) -> Result<Self> {
        if !s_db.is_finite() || s_db < 0.0 {
            return Err(Error::NegativeSqueezing(s_db));
        }
        let s = s_db * std::f64::consts::LN_10 / 20.0;
        // Keep the caller's dB value rather than re-deriving it from `s`.
        Ok(Self { s, y: s.tanh() / 2.0, s_db, mean_photons: s.sinh().powi(2) })
    }

    /// `1/cosh^2(s)`, equal to `1 - 4y^2`.
    pub fn inverse_cosh_sq(&self) -> f64 {
        1.0 / self.s.cosh().powi(2)
    }
}

/// Alias matching the operation name used by callers that think in decibels.
pub fn squeeze_from_db(s_db: f64) -> Result<SqueezeSpec> {
    SqueezeSpec::from_db(s_db)
}

/// A lossless beam splitter with real amplitudes `t, r > 0`.
///
/// The parameter `B = r^2/t^2` gives `T = 1/(1+B)` and `R = B/(1+B)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitterSpec {
    pub t: f64,
    pub r: f64,
    pub big_t: f64,
    pub big_r: f64,
    pub b_param: f64,
}

impl SplitterSpec {
    pub fn from_b(b_param: f64) -> Result<Self> {
        check_b(b_param)?;
        let big_t = 1.0 / (1.0 + b_param);
        let big_r = b_param / (1.0 + b_param);
        Ok(Self {
            t: big_t.sqrt(),
            r: big_r.sqrt(),
            big_t,
            big_r,
            b_param,
        })
    }

    pub fn from_transmittance(t: f64) -> Result<Self> {
        if !(t > 0.0 && t < 1.0) {
            return Err(Error::InvalidTransmittance(t));
        }
        let r = (1.0 - t * t).sqrt();
        Self::from_b((r / t).powi(2))
    }

    /// Squeezing parameters after one and two passes through this splitter.
    pub fn reduce(&self, squeeze: &SqueezeSpec) -> ReducedSqueeze {
        ReducedSqueeze::new(squeeze.y, self.b_param)
    }
}

pub(crate) fn check_b(b_param: f64) -> Result<()> {
    if b_param.is_finite() && b_param > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidSplitterParameter(b_param))
    }
}

pub(crate) fn check_y(y: f64) -> Result<()> {
    if (0.0..0.5).contains(&y) {
        Ok(())
    } else {
        Err(Error::SqueezeParameterOutOfDomain(y))
    }
}

/// `y1 = y/(1+B)` and `y2 = y/(1+B)^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedSqueeze {
    pub y1: f64,
    pub y2: f64,
}

impl ReducedSqueeze {
    pub fn new(y: f64, b_param: f64) -> Self {
        let y1 = y / (1.0 + b_param);
        Self { y1, y2: y1 / (1.0 + b_param) }
    }
}

/// Which states enter the two beam splitters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputCase {
    /// Squeezed vacuum.
    Smsv,
    /// Squeezed vacuum with one photon subtracted (heralded on the same splitter).
    Odd,
}

impl InputCase {
    pub fn as_str(&self) -> &'static str {
        match self {
            InputCase::Smsv => "smsv",
            InputCase::Odd => "odd",
        }
    }

    /// Parity (0 even, 1 odd) of the input state.
    pub fn input_parity(&self) -> usize {
        match self {
            InputCase::Smsv => 0,
            InputCase::Odd => 1,
        }
    }

    /// The reduced squeezing that parameterizes the heralded CV states.
    pub fn state_parameter(&self, reduced: &ReducedSqueeze) -> f64 {
        match self {
            InputCase::Smsv => reduced.y1,
            InputCase::Odd => reduced.y2,
        }
    }
}

impl fmt::Display for InputCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for InputCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "smsv" => Ok(InputCase::Smsv),
            "odd" => Ok(InputCase::Odd),
            other => Err(Error::InvalidArgument(format!("unknown input case '{other}'"))),
        }
    }
}

/// A measurement-induced CV state: `added` photons (0 or 1) mixed in from the
/// nonlocal photon, `subtracted` photons counted in the measuring mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StateFamily {
    pub case: InputCase,
    pub added: u8,
    pub subtracted: usize,
}

impl StateFamily {
    pub fn new(case: InputCase, added: u8, subtracted: usize) -> Result<Self> {
        if added > 1 {
            return Err(Error::InvalidArgument(format!(
                "a state family adds 0 or 1 photons, got {added}"
            )));
        }
        Ok(Self { case, added, subtracted })
    }

    /// Parity (0 even, 1 odd) of the Fock support.
    pub fn parity(&self) -> usize {
        (self.case.input_parity() + self.added as usize + self.subtracted) % 2
    }
}

/// Photon counts registered in the two measuring modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OutcomePair {
    pub k1: usize,
    pub k2: usize,
    pub case: InputCase,
}

impl OutcomePair {
    pub fn new(case: InputCase, k1: usize, k2: usize) -> Self {
        Self { k1, k2, case }
    }

    pub fn swapped(&self) -> Self {
        Self { k1: self.k2, k2: self.k1, case: self.case }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum_squeezing() {
        let sq = SqueezeSpec::from_db(0.0).unwrap();
        assert_eq!(sq.s, 0.0);
        assert_eq!(sq.y, 0.0);
        assert_eq!(sq.mean_photons, 0.0);
    }

    #[test]
    fn db_conversion_matches_direct_evaluation() {
        // s = 10.6 ln(10)/20, y = tanh(s)/2
        let sq = SqueezeSpec::from_db(10.6).unwrap();
        assert!((sq.s - 1.220_370_099_286_844_3).abs() < 1e-12);
        assert!((sq.y - 0.419_881_656_970_980_7).abs() < 1e-12);
        assert!((sq.s_db - 10.6).abs() < 1e-12);
        assert!((-10.0 * (-2.0 * sq.s).exp().log10() - 10.6).abs() < 1e-12);
        assert!((1.0 - 4.0 * sq.y * sq.y - sq.inverse_cosh_sq()).abs() < 1e-14);
    }

    #[test]
    fn y_is_monotone_and_bounded() {
        let mut last = -1.0;
        for db in [0.0, 1.0, 5.0, 10.0, 20.0, 40.0, 80.0] {
            let y = SqueezeSpec::from_db(db).unwrap().y;
            assert!(y > last && y <= 0.5);
            last = y;
        }
    }

    #[test]
    fn negative_squeezing_rejected() {
        assert!(matches!(SqueezeSpec::from_db(-1.0), Err(Error::NegativeSqueezing(_))));
        assert!(SqueezeSpec::from_db(f64::NAN).is_err());
    }

    #[test]
    fn splitter_invariants() {
        let bs = SplitterSpec::from_b(1.0).unwrap();
        assert!((bs.big_t - 0.5).abs() < 1e-15 && (bs.big_r - 0.5).abs() < 1e-15);
        for b in [1e-6, 0.2, 3.0, 276.6] {
            let bs = SplitterSpec::from_b(b).unwrap();
            assert!((bs.t * bs.t + bs.r * bs.r - 1.0).abs() < 1e-15);
            assert!((bs.r * bs.r / (bs.t * bs.t) - b).abs() / b < 1e-12);
        }
        let back = SplitterSpec::from_transmittance(0.6).unwrap();
        assert!((back.t - 0.6).abs() < 1e-15);
        assert!(SplitterSpec::from_b(0.0).is_err());
        assert!(SplitterSpec::from_b(f64::INFINITY).is_err());
    }

    #[test]
    fn reduced_parameters_are_ordered() {
        let r = ReducedSqueeze::new(0.4, 0.5);
        assert!(r.y2 <= r.y1 && r.y1 <= 0.4);
        assert!((r.y1 - 0.4 / 1.5).abs() < 1e-16);
        assert!((r.y2 - 0.4 / 2.25).abs() < 1e-16);
    }

    #[test]
    fn family_parity() {
        let f = |case, added, k| StateFamily::new(case, added, k).unwrap().parity();
        assert_eq!(f(InputCase::Smsv, 0, 2), 0);
        assert_eq!(f(InputCase::Smsv, 1, 2), 1);
        assert_eq!(f(InputCase::Odd, 0, 0), 1);
        assert_eq!(f(InputCase::Odd, 1, 0), 0);
        assert!(StateFamily::new(InputCase::Smsv, 2, 0).is_err());
    }
}
