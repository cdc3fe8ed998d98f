//! Optimization over the beam-splitter parameter `B` at fixed squeezing, and
//! the unit-distortion condition `|b_{k1 k2}| = 1`.
//!
//! Objectives can be multimodal in `B`, so every maximization starts with a
//! log-spaced scan; golden-section search then refines around the best scan
//! point. Searches run on `ln B`.

use serde::{Deserialize, Serialize};

use crate::analytic::{distortion_b, equal_outcome_sum, outcome_probability};
use crate::error::{Error, Result};
use crate::math::log_space;
use crate::par::{map_collect, Execution};
use crate::params::{InputCase, OutcomePair, SplitterSpec, SqueezeSpec};

/// Hard limits on `B`.
pub const B_MIN: f64 = 1e-9;
pub const B_MAX: f64 = 1e9;
/// Points of the coarse scan.
pub const SCAN_POINTS: usize = 200;
/// Relative tolerance on the optimizing `B`.
pub const B_RELATIVE_TOLERANCE: f64 = 1e-6;
/// Target accuracy of `| |b| - 1 |` at a unit-distortion root.
pub const UNIT_DISTORTION_TOLERANCE: f64 = 1e-8;

/// A search interval `[lo, hi]` for `B`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BBracket {
    pub lo: f64,
    pub hi: f64,
}

impl BBracket {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo >= B_MIN && hi <= B_MAX && lo < hi) {
            return Err(Error::InvalidBracket { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    pub fn contains(&self, b: f64) -> bool {
        self.lo <= b && b <= self.hi
    }
}

impl Default for BBracket {
    fn default() -> Self {
        Self { lo: 1e-6, hi: 1e4 }
    }
}

/// What is maximized over `B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Objective {
    /// `sum_{k=1}^{k_max} P_kk`, plus `P_00` with `include_vacuum`.
    EqualSum { k_max: usize, include_vacuum: bool },
    /// A single `P_{k1 k2}`.
    Single { k1: usize, k2: usize },
}

impl Objective {
    pub fn p0_to(k_max: usize) -> Self {
        Objective::EqualSum { k_max, include_vacuum: true }
    }

    pub fn p1_to(k_max: usize) -> Self {
        Objective::EqualSum { k_max, include_vacuum: false }
    }

    pub fn evaluate(&self, case: InputCase, squeeze: &SqueezeSpec, b_param: f64) -> Result<f64> {
        let splitter = SplitterSpec::from_b(b_param)?;
        match *self {
            Objective::EqualSum { k_max, include_vacuum } => {
                equal_outcome_sum(case, squeeze, &splitter, k_max, include_vacuum)
            }
            Objective::Single { k1, k2 } => outcome_probability(OutcomePair::new(case, k1, k2), squeeze, &splitter),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub b_star: f64,
    pub value: f64,
    pub bracket: BBracket,
    /// Objective evaluations spent in the refinement stage.
    pub iterations: usize,
    /// The maximum sits at an end of the bracket: the objective is still
    /// rising there.
    pub boundary_optimum: bool,
}

/// Maximizes `objective` over `B` within `bracket`.
pub fn maximize_over_b(
    case: InputCase,
    squeeze: &SqueezeSpec,
    objective: Objective,
    bracket: BBracket,
) -> Result<OptimizationResult> {
    maximize_over_b_with(case, squeeze, objective, bracket, Execution::default())
}

/// [`maximize_over_b`] with an explicit schedule for the coarse scan.
pub fn maximize_over_b_with(
    case: InputCase,
    squeeze: &SqueezeSpec,
    objective: Objective,
    bracket: BBracket,
    execution: Execution,
) -> Result<OptimizationResult> {
    let bracket = BBracket::new(bracket.lo, bracket.hi)?;
    let grid = log_space(bracket.lo, bracket.hi, SCAN_POINTS);
    let values = map_collect(execution, &grid, |&b| objective.evaluate(case, squeeze, b))
        .into_iter()
        .collect::<Result<Vec<f64>>>()?;
    let best = values
        .iter()
        .enumerate()
        .fold(0, |best, (i, v)| if *v > values[best] { i } else { best });
    let lo = grid[best.saturating_sub(1)].ln();
    let hi = grid[(best + 1).min(grid.len() - 1)].ln();
    let f = |ln_b: f64| objective.evaluate(case, squeeze, ln_b.exp());
    let (ln_star, mut value, iterations) = golden_section_max(f, lo, hi, B_RELATIVE_TOLERANCE / 4.0)?;
    let mut b_star = ln_star.exp();
    // The scan point itself may beat the interior refinement at an edge.
    if values[best] > value {
        value = values[best];
        b_star = grid[best];
    }
    let edge_gap = (b_star.ln() - bracket.lo.ln()).min(bracket.hi.ln() - b_star.ln());
    Ok(OptimizationResult {
        b_star,
        value,
        bracket,
        iterations,
        boundary_optimum: edge_gap < B_RELATIVE_TOLERANCE,
    })
}

/// Golden-section maximization of a unimodal `f` on `[a, b]`.
/// Returns `(argmax, max, evaluations)`.
pub fn golden_section_max<F>(f: F, mut a: f64, mut b: f64, tolerance: f64) -> Result<(f64, f64, usize)>
where
    F: Fn(f64) -> Result<f64>,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    let mut evaluations = 2;
    while (b - a).abs() > tolerance {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
        evaluations += 1;
    }
    let (x, fx) = if fc > fd { (c, fc) } else { (d, fd) };
    Ok((x, fx, evaluations))
}

/// Outcome of a unit-distortion search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum UnitDistortion {
    Root { b_param: f64, abs_b: f64, iterations: usize },
    /// `|b| - 1` keeps one sign over the bracket; `closest` is the smallest
    /// `| |b| - 1 |` seen on the scan and `at_b` where.
    NoRoot { closest: f64, at_b: f64 },
}

impl UnitDistortion {
    pub fn root(&self) -> Option<f64> {
        match self {
            UnitDistortion::Root { b_param, .. } => Some(*b_param),
            UnitDistortion::NoRoot { .. } => None,
        }
    }
}

fn ln_abs_b(case: InputCase, k1: usize, k2: usize, squeeze: &SqueezeSpec, b_param: f64) -> Result<f64> {
    let splitter = SplitterSpec::from_b(b_param)?;
    let y_red = case.state_parameter(&splitter.reduce(squeeze));
    Ok(distortion_b(OutcomePair::new(case, k1, k2), y_red, b_param)?.abs().ln())
}

/// Every `B` in the bracket with `|b_{k1 k2}| = 1`, found by bisection on
/// `ln B` between sign changes of `ln |b|` on a log-spaced scan.
pub fn unit_distortion_roots(
    case: InputCase,
    k1: usize,
    k2: usize,
    squeeze: &SqueezeSpec,
    bracket: BBracket,
) -> Result<Vec<UnitDistortion>> {
    if k1 == k2 {
        return Err(Error::InvalidArgument(format!("b_{{{k1}{k2}}} is identically 1 for equal counts")));
    }
    let bracket = BBracket::new(bracket.lo, bracket.hi)?;
    let grid = log_space(bracket.lo, bracket.hi, SCAN_POINTS);
    let f = |b: f64| ln_abs_b(case, k1, k2, squeeze, b);
    let values = grid.iter().map(|&b| f(b)).collect::<Result<Vec<f64>>>()?;
    let mut roots = Vec::new();
    for i in 0..grid.len() - 1 {
        let (fa, fb) = (values[i], values[i + 1]);
        if fa == 0.0 {
            roots.push(UnitDistortion::Root { b_param: grid[i], abs_b: 1.0, iterations: 0 });
            continue;
        }
        if fa.signum() == fb.signum() || fb == 0.0 && i + 1 < grid.len() - 1 {
            continue;
        }
        let (mut lo, mut hi, mut flo) = (grid[i].ln(), grid[i + 1].ln(), fa);
        let mut iterations = 0;
        let mut mid = 0.5 * (lo + hi);
        let mut fm = f(mid.exp())?;
        while fm.abs() >= UNIT_DISTORTION_TOLERANCE && iterations < 200 && hi - lo > 1e-15 {
            if fm.signum() == flo.signum() {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
            mid = 0.5 * (lo + hi);
            fm = f(mid.exp())?;
            iterations += 1;
        }
        roots.push(UnitDistortion::Root { b_param: mid.exp(), abs_b: fm.exp(), iterations });
    }
    if roots.is_empty() {
        let (i, v) = values
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .map(|(i, v)| (i, *v))
            .unwrap_or((0, f64::NAN));
        return Ok(vec![UnitDistortion::NoRoot { closest: (v.exp() - 1.0).abs(), at_b: grid[i] }]);
    }
    Ok(roots)
}

/// Smallest `B` in the bracket with `|b_{k1 k2}| = 1` for squeezed-vacuum
/// inputs, or a no-root report.
pub fn solve_unit_distortion(k1: usize, k2: usize, squeeze: &SqueezeSpec, bracket: BBracket) -> Result<UnitDistortion> {
    solve_unit_distortion_for(InputCase::Smsv, k1, k2, squeeze, bracket)
}

/// [`solve_unit_distortion`] for either input case.
pub fn solve_unit_distortion_for(
    case: InputCase,
    k1: usize,
    k2: usize,
    squeeze: &SqueezeSpec,
    bracket: BBracket,
) -> Result<UnitDistortion> {
    Ok(unit_distortion_roots(case, k1, k2, squeeze, bracket)?[0])
}
