//! Entanglement transfer from a nonlocal photon to two separated continuous-variable
//! states of definite parity.
//!
//! Two identical single-mode squeezed vacuum (SMSV) states, or two odd states
//! obtained by heralded subtraction of one photon from them, are each mixed on a
//! beam splitter with one arm of a delocalized photon `(|01> + |10>)/sqrt(2)`.
//! Counting photons in both measuring modes heralds a two-mode parity-entangled
//! state whose degree of entanglement is set by a single distortion factor `b`.
//!
//! The crate is split into:
//!
//! * [`analytic`]: closed forms for amplitudes, normalization factors, distortion
//!   factors, outcome probabilities, negativity and mean photon numbers, built on
//!   the derivatives of `Z(y) = (1 - 4y^2)^{-1/2}` from [`zfunc`].
//! * [`states`]: explicit Fock expansions of the measurement-induced CV states.
//! * [`oracle`]: an exact truncated-Fock simulation of the same optical setup,
//!   sharing no formulas with [`analytic`].
//! * [`optimize`] and [`sweep`]: optimization over the beam-splitter parameter,
//!   unit-distortion root finding, and the data behind the figure sweeps.
//!
//! With the `parallel` feature (on by default) grid evaluations fan out over
//! rayon; [`par::Execution::Sequential`] forces the single-threaded path.

pub mod analytic;
pub mod error;
pub mod math;
pub mod optimize;
pub mod oracle;
pub mod par;
pub mod params;
pub mod states;
pub mod sweep;
pub mod zfunc;

pub use error::{Error, Result};
pub use params::{InputCase, OutcomePair, ReducedSqueeze, SplitterSpec, SqueezeSpec, StateFamily};
