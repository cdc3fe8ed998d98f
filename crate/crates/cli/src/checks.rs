//! Named self-check suites run by `tqe check`.

use serde::Serialize;
use tqe_core::analytic::{
    distortion_b, entanglement_report, limits, norm_g1, odd_no_click_factors, odd_no_click_factors_explicit,
    outcome_probability,
};
use tqe_core::oracle::run_tqe_oracle_with_tolerance;
use tqe_core::optimize::{solve_unit_distortion, BBracket};
use tqe_core::zfunc::z_derivative;
use tqe_core::{InputCase, OutcomePair, SplitterSpec, SqueezeSpec};

use crate::config::RunConfig;
use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Identities,
    Oracle,
    Asymptotics,
}

impl std::str::FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "identities" => Ok(Suite::Identities),
            "oracle" => Ok(Suite::Oracle),
            "asymptotics" => Ok(Suite::Asymptotics),
            other => Err(format!("unknown suite '{other}' (identities, oracle, asymptotics)")),
        }
    }
}

impl Suite {
    pub fn name(&self) -> &'static str {
        match self {
            Suite::Identities => "identities",
            Suite::Oracle => "oracle",
            Suite::Asymptotics => "asymptotics",
        }
    }
}

/// One check: `deviation` must not exceed `tolerance`.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    fn new(name: impl Into<String>, deviation: f64, tolerance: f64) -> Self {
        Self { name: name.into(), deviation, tolerance, pass: deviation <= tolerance }
    }
}

const S_GRID: [f64; 4] = [2.0, 6.0, 10.0, 14.0];
const B_GRID: [f64; 3] = [0.2, 1.0, 5.0];

fn worst<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    it.into_iter().fold(0.0, |a, b| if b.is_nan() { f64::INFINITY } else { a.max(b) })
}

fn grid() -> impl Iterator<Item = (SqueezeSpec, SplitterSpec)> {
    S_GRID.into_iter().flat_map(|s| {
        B_GRID
            .into_iter()
            .map(move |b| (SqueezeSpec::from_db(s).unwrap(), SplitterSpec::from_b(b).unwrap()))
    })
}

fn prob(case: InputCase, k1: usize, k2: usize, sq: &SqueezeSpec, split: &SplitterSpec) -> Result<f64, CliError> {
    Ok(outcome_probability(OutcomePair::new(case, k1, k2), sq, split)?)
}

fn identities() -> Result<Vec<Check>, CliError> {
    let mut diagonal = Vec::new();
    let mut reciprocal = Vec::new();
    let mut z_cubed = Vec::new();
    let mut z_prime = Vec::new();
    let mut cosh = Vec::new();
    let mut no_click = Vec::new();
    let mut symmetry = Vec::new();
    for (sq, split) in grid() {
        let r = split.reduce(&sq);
        let b_param = split.b_param;
        for case in [InputCase::Smsv, InputCase::Odd] {
            let y = case.state_parameter(&r);
            for k1 in 0..6 {
                let d = distortion_b(OutcomePair::new(case, k1, k1), y, b_param)?;
                diagonal.push(if d == 1.0 { 0.0 } else { (d - 1.0).abs().max(f64::MIN_POSITIVE) });
                for k2 in 0..6 {
                    let o = OutcomePair::new(case, k1, k2);
                    reciprocal.push((distortion_b(o, y, b_param)? * distortion_b(o.swapped(), y, b_param)? - 1.0).abs());
                    symmetry.push((prob(case, k1, k2, &sq, &split)? - prob(case, k2, k1, &sq, &split)?).abs());
                }
            }
        }
        let z = z_derivative(0, r.y1)?;
        z_cubed.push((norm_g1(0, r.y1, b_param)? / z.powi(3) - 1.0).abs());
        z_prime.push((z_derivative(1, r.y1)? / (4.0 * r.y1 * z.powi(3)) - 1.0).abs());
        cosh.push((1.0 - 4.0 * r.y1 * r.y1 * (1.0 + b_param).powi(2) - sq.inverse_cosh_sq()).abs());
        let (a, b) = odd_no_click_factors(&sq, &split)?;
        let (ea, eb) = odd_no_click_factors_explicit(&sq, &split);
        let p00 = prob(InputCase::Odd, 0, 0, &sq, &split)?;
        no_click.push((a - ea).abs().max((b - eb).abs()).max((a * b - p00).abs()));
    }
    let mut root_gap = Vec::new();
    for s_db in [4.0, 8.0, 13.303] {
        let sq = SqueezeSpec::from_db(s_db)?;
        if let Some(b) = solve_unit_distortion(0, 2, &sq, BBracket::default())?.root() {
            let split = SplitterSpec::from_b(b)?;
            root_gap.push((prob(InputCase::Smsv, 0, 2, &sq, &split)? - prob(InputCase::Smsv, 2, 0, &sq, &split)?).abs());
        }
    }
    Ok(vec![
        Check::new("b_kk equals 1 exactly", worst(diagonal), 0.0),
        Check::new("b_ij b_ji = 1", worst(reciprocal), 1e-12),
        Check::new("G_0 = Z^3 (relative)", worst(z_cubed), 1e-10),
        Check::new("Z' = 4yZ^3 (relative)", worst(z_prime), 1e-10),
        Check::new("1 - 4y1^2(1+B)^2 = 1/cosh^2 s", worst(cosh), 1e-12),
        Check::new("odd no-click factorization", worst(no_click), 1e-10),
        Check::new("P_ij = P_ji", worst(symmetry), 1e-12),
        Check::new("P02 = P20 at the unit-distortion root", worst(root_gap), 1e-8),
    ])
}

fn oracle(config: &RunConfig) -> Result<Vec<Check>, CliError> {
    let tol = config.oracle_tolerance;
    let mut checks = Vec::new();
    for case in [InputCase::Smsv, InputCase::Odd] {
        let (mut dp, mut dn, mut dm) = (Vec::new(), Vec::new(), Vec::new());
        for (sq, split) in grid() {
            for k1 in 0..3 {
                for k2 in 0..3 {
                    let outcome = OutcomePair::new(case, k1, k2);
                    let report = entanglement_report(outcome, &sq, &split)?;
                    let o = run_tqe_oracle_with_tolerance(case, &sq, &split, outcome, None, config.default_cutoff_tolerance)?;
                    dp.push((report.probability - o.probability).abs());
                    dn.push((report.negativity - o.negativity).abs());
                    dm.push((report.mean_photons_mode1 - o.mean_photons.0).abs());
                    dm.push((report.mean_photons_mode2 - o.mean_photons.1).abs());
                }
            }
        }
        checks.push(Check::new(format!("{case}: probability vs simulation"), worst(dp), tol));
        checks.push(Check::new(format!("{case}: negativity vs simulation"), worst(dn), tol));
        checks.push(Check::new(format!("{case}: mean photons vs simulation"), worst(dm), 100.0 * tol));
    }
    Ok(checks)
}

fn asymptotics() -> Result<Vec<Check>, CliError> {
    let sq = SqueezeSpec::from_db(1e-4)?;
    let bs = [0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0];
    let dev = |case, k1, k2, f: fn(f64) -> f64| -> Result<f64, CliError> {
        let mut v = Vec::new();
        for b in bs {
            v.push((prob(case, k1, k2, &sq, &SplitterSpec::from_b(b)?)? - f(b)).abs());
        }
        Ok(worst(v))
    };
    Ok(vec![
        Check::new("smsv P00 -> B/(1+B)", dev(InputCase::Smsv, 0, 0, limits::p00_smsv)?, 1e-6),
        Check::new("odd P00 -> 2B/(1+B)^3", dev(InputCase::Odd, 0, 0, limits::p00_odd)?, 1e-6),
        Check::new("odd P11 -> B(1-B)^2/(1+B)^3", dev(InputCase::Odd, 1, 1, limits::p11_odd)?, 1e-4),
    ])
}

pub fn run_suite(suite: Suite, config: &RunConfig) -> Result<Vec<Check>, CliError> {
    match suite {
        Suite::Identities => identities(),
        Suite::Oracle => oracle(config),
        Suite::Asymptotics => asymptotics(),
    }
}
