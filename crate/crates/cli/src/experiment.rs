//! Ratio of scheduled transmissions to the distance lower bound over a random
//! corpus, binned into a percentage table.

use std::fmt::Write as _;

use dissem::bounds::dmax;
use dissem::multiround::{ratio_of, schedule};
use dissem::{Gf2, SearchCaps, SolveMethod, Strategy};
use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use crate::format::FORMAT_VERSION;
use crate::generate::{corpus, GenParams};
use crate::CliError;

pub const BIN_LABELS: [&str; 6] = ["[1, 1.2)", "[1.2, 1.4)", "[1.4, 1.6)", "[1.6, 1.8)", "[1.8, 2.0)", "[2.0, inf)"];

/// Lower edges of the bins, in fifths.
const BIN_EDGES: [u64; 6] = [5, 6, 7, 8, 9, 10];

/// Bin of a ratio `≥ 1`; `None` below 1.
pub fn bin_of(r: &Ratio<u64>) -> Option<usize> {
    BIN_EDGES.iter().rposition(|&e| *r >= Ratio::new(e, 5))
}

/// Integer percentages summing to exactly 100, by largest remainder.
pub fn percentages(counts: &[usize]) -> Vec<u64> {
    let total: usize = counts.iter().sum();
    if total == 0 {
        return vec![0; counts.len()];
    }
    let mut out: Vec<u64> = counts.iter().map(|&c| (c * 100 / total) as u64).collect();
    let mut order: Vec<usize> = (0..counts.len()).collect();
    // ties go to the earlier bin
    order.sort_by_key(|&i| (std::cmp::Reverse(counts[i] * 100 % total), i));
    let short = 100 - out.iter().sum::<u64>();
    for &i in order.iter().take(short as usize) {
        out[i] += 1;
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExperimentParams {
    pub nodes: usize,
    pub symbols: usize,
    pub diameter: usize,
    pub count: usize,
    pub seed: u64,
    pub strategy: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Outcome {
    pub index: usize,
    pub tau: usize,
    pub dmax: usize,
    pub ratio: String,
    pub round_tau: Vec<usize>,
    /// Some round fell back to the heuristic.
    pub heuristic: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub index: usize,
    pub error: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Histogram {
    pub ranges: Vec<String>,
    pub counts: Vec<usize>,
    pub percent: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExperimentReport {
    pub format: u32,
    pub params: ExperimentParams,
    pub outcomes: Vec<Outcome>,
    pub failures: Vec<Failure>,
    pub histogram: Histogram,
}

fn evaluate(inst: &dissem::DisseminationInstance, r: usize, strategy: Strategy) -> Result<(Outcome, Ratio<u64>), dissem::Error> {
    let scheme = schedule::<Gf2>(inst, r, strategy, &SearchCaps::default())?;
    let lower = dmax(inst)?;
    let ratio = ratio_of(scheme.tau_total(), lower)?;
    Ok((
        Outcome {
            index: 0,
            tau: scheme.tau_total(),
            dmax: lower,
            ratio: ratio.to_string(),
            round_tau: scheme.round_tau().to_vec(),
            heuristic: scheme.methods().contains(&SolveMethod::Heuristic),
        },
        ratio,
    ))
}

pub fn strategy_name(s: Strategy) -> String {
    match s {
        Strategy::Exact => "exact".into(),
        Strategy::Flood => "flood".into(),
        Strategy::Random { samples, .. } => format!("random({samples})"),
    }
}

/// Generates `count` instances over GF(2) and schedules each in exactly
/// `diameter` rounds. Failing instances are listed and left out of the table.
pub fn run(nodes: usize, symbols: usize, diameter: usize, count: usize, seed: u64, strategy: Strategy) -> Result<ExperimentReport, CliError> {
    let gen = GenParams {
        nodes,
        symbols,
        diameter,
        field: 2,
    };
    let instances = corpus(&gen, count, seed)?;
    let results: Vec<_> = instances
        .par_iter()
        .map(|inst| evaluate(inst, diameter, strategy))
        .collect();
    let mut outcomes = Vec::new();
    let mut failures = Vec::new();
    let mut counts = vec![0; BIN_LABELS.len()];
    for (index, res) in results.into_iter().enumerate() {
        match res {
            Ok((mut o, ratio)) => match bin_of(&ratio) {
                Some(b) => {
                    counts[b] += 1;
                    o.index = index + 1;
                    outcomes.push(o);
                }
                None => failures.push(Failure {
                    index: index + 1,
                    error: format!("ratio {ratio} is below 1"),
                }),
            },
            Err(e) => failures.push(Failure {
                index: index + 1,
                error: e.to_string(),
            }),
        }
    }
    Ok(ExperimentReport {
        format: FORMAT_VERSION,
        params: ExperimentParams {
            nodes,
            symbols,
            diameter,
            count,
            seed,
            strategy: strategy_name(strategy),
        },
        outcomes,
        failures,
        histogram: Histogram {
            ranges: BIN_LABELS.iter().map(|s| s.to_string()).collect(),
            percent: percentages(&counts),
            counts,
        },
    })
}

impl ExperimentReport {
    /// Two-row table: `Range` and `Occurrence, %`.
    pub fn table(&self) -> String {
        let mut out = String::new();
        if self.outcomes.is_empty() {
            writeln!(out, "no instances").unwrap();
        }
        let widths: Vec<usize> = self.histogram.ranges.iter().map(|r| r.len().max(3)).collect();
        let head = "Occurrence, %";
        write!(out, "{:<w$}", "Range", w = head.len()).unwrap();
        for (r, w) in self.histogram.ranges.iter().zip(&widths) {
            write!(out, " | {r:>w$}").unwrap();
        }
        writeln!(out).unwrap();
        write!(out, "{head}").unwrap();
        for (p, w) in self.histogram.percent.iter().zip(&widths) {
            write!(out, " | {p:>w$}").unwrap();
        }
        writeln!(out).unwrap();
        if !self.failures.is_empty() {
            writeln!(out, "excluded: {} instance(s)", self.failures.len()).unwrap();
        }
        out
    }

    pub fn csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["index", "tau", "dmax", "ratio", "ratio_decimal"])?;
        for o in &self.outcomes {
            let dec = o.tau as f64 / o.dmax as f64;
            w.write_record([
                o.index.to_string(),
                o.tau.to_string(),
                o.dmax.to_string(),
                o.ratio.clone(),
                format!("{dec:.6}"),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Format(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("ascii"))
    }
}
