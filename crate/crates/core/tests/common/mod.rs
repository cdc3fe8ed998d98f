//! Grid checks shared by the integration tests and the acceptance runner.
#![allow(dead_code)]

use tqe_core::analytic::{entanglement_report, outcome_probability};
use tqe_core::math::NeumaierSum;
use tqe_core::oracle::{run_tqe_oracle, state_overlap, FockVector};
use tqe_core::states::cv_fock_coefficients;
use tqe_core::{InputCase, OutcomePair, SplitterSpec, SqueezeSpec, StateFamily};

pub const S_GRID: [f64; 4] = [2.0, 6.0, 10.0, 14.0];
pub const B_GRID: [f64; 3] = [0.2, 1.0, 5.0];

/// Largest disagreements between closed forms and simulation over the grid.
#[derive(Debug, Default, Clone, Copy)]
pub struct Discrepancy {
    pub probability: f64,
    pub negativity: f64,
    pub mean_photons: f64,
    pub overlap_deficit: f64,
    pub third_schmidt: f64,
    pub points: usize,
}

impl Discrepancy {
    pub fn within_tolerance(&self) -> bool {
        self.probability < 1e-8
            && self.negativity < 1e-8
            && self.mean_photons < 1e-6
            && self.overlap_deficit <= 1e-6
            && self.third_schmidt < 1e-10
    }
}

fn overlap_with(state: &Option<FockVector>, family: StateFamily, y_red: f64, b_param: f64) -> f64 {
    let Some(state) = state.as_ref() else { return 0.0 };
    match cv_fock_coefficients(family, y_red, b_param, state.cutoff(), 1e-9) {
        Ok(reference) => state_overlap(state, &reference),
        Err(_) => 0.0,
    }
}

pub fn oracle_discrepancy(case: InputCase) -> Discrepancy {
    let mut d = Discrepancy::default();
    for s_db in S_GRID {
        let sq = SqueezeSpec::from_db(s_db).unwrap();
        for b_param in B_GRID {
            let split = SplitterSpec::from_b(b_param).unwrap();
            let y_red = case.state_parameter(&split.reduce(&sq));
            for k1 in 0..3 {
                for k2 in 0..3 {
                    let outcome = OutcomePair::new(case, k1, k2);
                    let report = entanglement_report(outcome, &sq, &split).unwrap();
                    let oracle = run_tqe_oracle(case, &sq, &split, outcome, None).unwrap();
                    d.probability = d.probability.max((report.probability - oracle.probability).abs());
                    d.negativity = d.negativity.max((report.negativity - oracle.negativity).abs());
                    d.mean_photons = d
                        .mean_photons
                        .max((report.mean_photons_mode1 - oracle.mean_photons.0).abs())
                        .max((report.mean_photons_mode2 - oracle.mean_photons.1).abs());
                    if let Some(third) = oracle.schmidt_coefficients.get(2) {
                        d.third_schmidt = d.third_schmidt.max(*third);
                    }
                    let modes = oracle.mode_states.as_ref().unwrap();
                    let fam = |added, k| StateFamily::new(case, added, k).unwrap();
                    for (state, family) in [
                        (&modes.mode1_plain, fam(0, k1)),
                        (&modes.mode1_added, fam(1, k1)),
                        (&modes.mode2_plain, fam(0, k2)),
                        (&modes.mode2_added, fam(1, k2)),
                    ] {
                        let deficit = 1.0 - overlap_with(state, family, y_red, b_param);
                        d.overlap_deficit = d.overlap_deficit.max(deficit);
                    }
                    d.points += 1;
                }
            }
        }
    }
    d
}

/// `sum P_{k1 k2}` over growing squares until the newest shell is below
/// `1e-13`. Returns the total and the final square size.
pub fn total_probability(case: InputCase, sq: &SqueezeSpec, split: &SplitterSpec) -> (f64, usize) {
    let p = |k1, k2| outcome_probability(OutcomePair::new(case, k1, k2), sq, split).unwrap();
    let mut sum = NeumaierSum::default();
    sum.add(p(0, 0));
    let mut k = 0;
    loop {
        k += 1;
        let mut shell = NeumaierSum::default();
        for j in 0..k {
            shell.add(p(k, j));
            shell.add(p(j, k));
        }
        shell.add(p(k, k));
        sum.add(shell.value());
        if k > 8 && shell.value() < 1e-13 || k >= 4000 {
            return (sum.value(), k);
        }
    }
}

/// Largest `|sum P - 1|` over the grid for one input case.
pub fn completeness_error(case: InputCase) -> f64 {
    let mut worst = 0.0f64;
    for s_db in S_GRID {
        let sq = SqueezeSpec::from_db(s_db).unwrap();
        for b_param in B_GRID {
            let split = SplitterSpec::from_b(b_param).unwrap();
            worst = worst.max((total_probability(case, &sq, &split).0 - 1.0).abs());
        }
    }
    worst
}
