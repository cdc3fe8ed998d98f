//! Per-squeezing datasets behind the figures: optimized probabilities (3, 5)
//! and unit-distortion loci with their probabilities (4).
//!
//! Rows are independent. They are computed through [`map_collect`] and come
//! back in grid order whatever the schedule. A missing root or a failed
//! evaluation leaves a gap (`None`) rather than aborting the sweep.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::analytic::{distortion_b, outcome_probability, p02_unit_distortion, p20_unit_distortion};
use crate::error::{Error, Result};
use crate::math::log_space;
use crate::optimize::{maximize_over_b_with, solve_unit_distortion_for, BBracket, Objective};
use crate::par::{map_collect, Execution};
use crate::params::{InputCase, OutcomePair, SplitterSpec, SqueezeSpec};

/// The odd-input splitter value that the odd-input figures are quoted at.
pub const ODD_REFERENCE_B: f64 = 276.6;
/// `B` range over which the odd-input objective's flatness is reported.
pub const FLATNESS_RANGE: (f64, f64) = (100.0, 500.0);
const FLATNESS_POINTS: usize = 41;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Figure {
    #[serde(rename = "3a")]
    F3a,
    #[serde(rename = "3b")]
    F3b,
    #[serde(rename = "4a")]
    F4a,
    #[serde(rename = "4b")]
    F4b,
    #[serde(rename = "4c")]
    F4c,
    #[serde(rename = "4d")]
    F4d,
    #[serde(rename = "4e")]
    F4e,
    #[serde(rename = "4f")]
    F4f,
    #[serde(rename = "4g")]
    F4g,
    #[serde(rename = "4h")]
    F4h,
    #[serde(rename = "5a")]
    F5a,
    #[serde(rename = "5b")]
    F5b,
}

impl Figure {
    pub const ALL: [Figure; 12] = [
        Figure::F3a,
        Figure::F3b,
        Figure::F4a,
        Figure::F4b,
        Figure::F4c,
        Figure::F4d,
        Figure::F4e,
        Figure::F4f,
        Figure::F4g,
        Figure::F4h,
        Figure::F5a,
        Figure::F5b,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            Figure::F3a => "3a",
            Figure::F3b => "3b",
            Figure::F4a => "4a",
            Figure::F4b => "4b",
            Figure::F4c => "4c",
            Figure::F4d => "4d",
            Figure::F4e => "4e",
            Figure::F4f => "4f",
            Figure::F4g => "4g",
            Figure::F4h => "4h",
            Figure::F5a => "5a",
            Figure::F5b => "5b",
        }
    }

    pub fn case(&self) -> InputCase {
        match self {
            Figure::F5a | Figure::F5b => InputCase::Odd,
            _ => InputCase::Smsv,
        }
    }

    /// Outcome pair whose unit-distortion locus a figure-4 panel follows.
    pub fn unit_distortion_pair(&self) -> Option<(usize, usize)> {
        match self {
            Figure::F4a | Figure::F4b => Some((0, 2)),
            Figure::F4c | Figure::F4d => Some((1, 2)),
            Figure::F4e | Figure::F4f => Some((1, 3)),
            Figure::F4g | Figure::F4h => Some((1, 5)),
            _ => None,
        }
    }

    /// Names of the value columns following `s_db, b_param`.
    pub fn columns(&self, k_max: usize) -> Vec<String> {
        let p0 = format!("p0_{k_max}");
        let p1 = format!("p1_{k_max}");
        let b0 = format!("b0_{k_max}");
        let b1 = format!("b1_{k_max}");
        match self {
            Figure::F3a => vec![p0, p1],
            Figure::F3b => vec![b0.clone(), b1.clone(), format!("{b0}_at_edge"), format!("{b1}_at_edge")],
            Figure::F5a => vec![p0, p1, "difference".into()],
            Figure::F5b => vec![
                b0.clone(),
                b1.clone(),
                format!("{b0}_at_edge"),
                format!("{b1}_at_edge"),
                format!("{p1}_at_reference_b"),
                format!("{p1}_flatness"),
            ],
            Figure::F4a | Figure::F4c | Figure::F4e | Figure::F4g => vec!["abs_b".into()],
            Figure::F4b | Figure::F4d | Figure::F4f | Figure::F4h => {
                let (i, j) = self.unit_distortion_pair().expect("figure-4 panel");
                let mut cols = vec![format!("p{i}{j}"), format!("p{j}{i}"), "sum".into()];
                if *self == Figure::F4b {
                    cols.push("p02_closed_form".into());
                    cols.push("p20_closed_form".into());
                }
                cols
            }
        }
    }

    /// 32 evenly spaced squeezing values over the range the figure covers.
    pub fn default_grid(&self) -> Vec<f64> {
        let (lo, hi) = match self {
            Figure::F5a | Figure::F5b => (2.0, 14.0),
            _ => (0.5, 16.0),
        };
        let n = 32;
        (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Figure::ALL
            .into_iter()
            .find(|fig| fig.id().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown figure '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub k_max: usize,
    pub bracket: BBracket,
    #[serde(skip)]
    pub execution: Execution,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self { k_max: 4, bracket: BBracket::default(), execution: Execution::default() }
    }
}

/// One squeezing value. `b_param` is the optimizing `B` of the `k >= 1`
/// objective (figures 3, 5) or the unit-distortion root (figure 4).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub s_db: f64,
    pub b_param: Option<f64>,
    pub values: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub figure: Figure,
    pub case: InputCase,
    pub columns: Vec<String>,
    pub rows: Vec<SweepRow>,
}

/// Builds the dataset for `figure` on `s_grid` (dB, nonempty, ascending).
pub fn sweep_figure(figure: Figure, s_grid: &[f64], config: &SweepConfig) -> Result<Sweep> {
    if s_grid.is_empty() {
        return Err(Error::InvalidArgument("empty squeezing grid".into()));
    }
    if s_grid.iter().any(|s| s.is_nan()) || s_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("squeezing grid must be strictly ascending".into()));
    }
    if config.k_max == 0 {
        return Err(Error::InvalidArgument("k_max must be at least 1".into()));
    }
    let bracket = BBracket::new(config.bracket.lo, config.bracket.hi)?;
    let squeezes = s_grid.iter().map(|&s| SqueezeSpec::from_db(s)).collect::<Result<Vec<_>>>()?;
    // Rows run in parallel, so the per-row optimizers stay sequential.
    let rows = map_collect(config.execution, &squeezes, |sq| row(figure, sq, config.k_max, bracket));
    Ok(Sweep { figure, case: figure.case(), columns: figure.columns(config.k_max), rows })
}

fn row(figure: Figure, sq: &SqueezeSpec, k_max: usize, bracket: BBracket) -> SweepRow {
    match figure.unit_distortion_pair() {
        Some(pair) => locus_row(figure, sq, pair, bracket),
        None => optimized_row(figure, sq, k_max, bracket),
    }
}

fn flag(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

fn optimized_row(figure: Figure, sq: &SqueezeSpec, k_max: usize, bracket: BBracket) -> SweepRow {
    let case = figure.case();
    let seq = Execution::Sequential;
    let r0 = maximize_over_b_with(case, sq, Objective::p0_to(k_max), bracket, seq).ok();
    let r1 = maximize_over_b_with(case, sq, Objective::p1_to(k_max), bracket, seq).ok();
    let p0 = r0.map(|r| r.value);
    let p1 = r1.map(|r| r.value);
    let b0 = r0.map(|r| r.b_star);
    let b1 = r1.map(|r| r.b_star);
    let values = match figure {
        Figure::F3a => vec![p0, p1],
        Figure::F3b => vec![b0, b1, r0.map(|r| flag(r.boundary_optimum)), r1.map(|r| flag(r.boundary_optimum))],
        Figure::F5a => vec![p0, p1, p0.zip(p1).map(|(a, b)| a - b)],
        Figure::F5b => {
            let objective = Objective::p1_to(k_max);
            let at_reference = objective.evaluate(case, sq, ODD_REFERENCE_B).ok();
            let flatness = log_space(FLATNESS_RANGE.0, FLATNESS_RANGE.1, FLATNESS_POINTS)
                .into_iter()
                .map(|b| objective.evaluate(case, sq, b))
                .collect::<Result<Vec<f64>>>()
                .ok()
                .map(|v| {
                    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    let min = v.iter().copied().fold(f64::INFINITY, f64::min);
                    max - min
                });
            vec![
                b0,
                b1,
                r0.map(|r| flag(r.boundary_optimum)),
                r1.map(|r| flag(r.boundary_optimum)),
                at_reference,
                flatness,
            ]
        }
        _ => unreachable!("figure-4 panels take the locus path"),
    };
    SweepRow { s_db: sq.s_db, b_param: b1, values }
}

fn locus_row(figure: Figure, sq: &SqueezeSpec, (i, j): (usize, usize), bracket: BBracket) -> SweepRow {
    let case = figure.case();
    let n_cols = figure.columns(0).len();
    let root = solve_unit_distortion_for(case, i, j, sq, bracket).ok().and_then(|r| r.root());
    let Some(b_param) = root else {
        return SweepRow { s_db: sq.s_db, b_param: None, values: vec![None; n_cols] };
    };
    let Ok(split) = SplitterSpec::from_b(b_param) else {
        return SweepRow { s_db: sq.s_db, b_param: None, values: vec![None; n_cols] };
    };
    let values = if n_cols == 1 {
        let y_red = case.state_parameter(&split.reduce(sq));
        vec![distortion_b(OutcomePair::new(case, i, j), y_red, b_param).ok().map(f64::abs)]
    } else {
        let pij = outcome_probability(OutcomePair::new(case, i, j), sq, &split).ok();
        let pji = outcome_probability(OutcomePair::new(case, j, i), sq, &split).ok();
        let mut v = vec![pij, pji, pij.zip(pji).map(|(a, b)| a + b)];
        if figure == Figure::F4b {
            v.push(p02_unit_distortion(sq, &split).ok());
            v.push(p20_unit_distortion(sq, &split).ok());
        }
        v
    };
    SweepRow { s_db: sq.s_db, b_param: Some(b_param), values }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn figure_ids_round_trip() {
        for fig in Figure::ALL {
            assert_eq!(fig.id().parse::<Figure>().unwrap(), fig);
        }
        assert!("4i".parse::<Figure>().is_err());
    }

    #[test]
    fn grid_must_ascend() {
        let cfg = SweepConfig::default();
        assert!(sweep_figure(Figure::F3a, &[], &cfg).is_err());
        assert!(sweep_figure(Figure::F3a, &[3.0, 2.0], &cfg).is_err());
    }

    #[test]
    fn rows_keep_grid_order_and_width() {
        let grid = [2.0, 5.0, 9.0];
        for fig in [Figure::F3a, Figure::F4b, Figure::F4c, Figure::F5b] {
            let sweep = sweep_figure(fig, &grid, &SweepConfig::default()).unwrap();
            assert_eq!(sweep.rows.len(), grid.len());
            for (row, s) in sweep.rows.iter().zip(grid) {
                assert_eq!(row.s_db, s);
                assert_eq!(row.values.len(), sweep.columns.len());
            }
        }
    }

    #[test]
    fn missing_roots_become_gaps() {
        // (1,2) has no balanced splitter at weak squeezing.
        let sweep = sweep_figure(Figure::F4d, &[1.0], &SweepConfig::default()).unwrap();
        assert!(sweep.rows[0].b_param.is_none());
        assert!(sweep.rows[0].values.iter().all(Option::is_none));
    }

    #[test]
    fn probabilities_in_unit_interval() {
        let grid = [1.0, 6.0, 12.0];
        for fig in [Figure::F3a, Figure::F4b, Figure::F4f, Figure::F5a] {
            let sweep = sweep_figure(fig, &grid, &SweepConfig::default()).unwrap();
            for (col, name) in sweep.columns.iter().enumerate() {
                if !name.starts_with('p') {
                    continue;
                }
                for row in &sweep.rows {
                    if let Some(v) = row.values[col] {
                        assert!((0.0..=1.0).contains(&v), "{fig} {name} {v}");
                    }
                }
            }
        }
    }

    #[test]
    fn schedules_agree_bitwise() {
        let grid = [3.0, 8.0];
        let run = |execution| {
            sweep_figure(Figure::F5a, &grid, &SweepConfig { execution, ..SweepConfig::default() }).unwrap()
        };
        assert_eq!(run(Execution::Sequential), run(Execution::Parallel));
    }
}
