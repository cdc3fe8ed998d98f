//! Closed forms against the brute-force simulation on a grid of inputs,
//! splitters and outcomes.

mod common;

use common::oracle_discrepancy;
use tqe_core::InputCase;

#[test]
fn squeezed_vacuum_inputs_match_simulation() {
    let d = oracle_discrepancy(InputCase::Smsv);
    assert_eq!(d.points, 108);
    assert!(d.within_tolerance(), "{d:?}");
}

#[test]
fn odd_inputs_match_simulation() {
    let d = oracle_discrepancy(InputCase::Odd);
    assert!(d.within_tolerance(), "{d:?}");
}
