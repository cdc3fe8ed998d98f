//! Brute-force simulation of the setup in a truncated Fock space.
//!
//! Nothing here uses the closed forms of [`crate::analytic`]; the two are
//! compared in tests and by the `check` command.

pub mod beamsplitter;
pub mod dense;
pub mod fock;
pub mod protocol;

pub use beamsplitter::{apply_beamsplitter, binomial_matrix_element, BeamSplitter};
pub use fock::{project_pnr, smsv_cutoff, smsv_vector, state_overlap, FockVector, Mode, TwoModeFockState};
pub use protocol::{
    extract_mode_states, input_state, run_tqe_oracle, run_tqe_oracle_with_tolerance, schmidt_coefficients, schmidt_negativity, ModeStates, OracleResult,
    DEFAULT_TAIL_TOLERANCE,
};
