//! Side-by-side protocol comparison over a grid of error rates.

use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;

use super::{crossover, exact_failure, expected_cost, truncated_failure, Crossover, FailureError, Polynomial};
use crate::codes::{classify, ClassTag, Protocol};
use crate::decode::DecodePolicy;

/// `lo:hi:steps`, `steps` evenly spaced points including both ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridAxis {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl GridAxis {
    pub fn points(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.lo];
        }
        (0..self.steps)
            .map(|i| self.lo + (self.hi - self.lo) * i as f64 / (self.steps - 1) as f64)
            .collect()
    }
}

impl FromStr for GridAxis {
    type Err = FailureError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || FailureError::BadGrid(format!("{s:?} is not lo:hi:steps"));
        let parts: Vec<&str> = s.trim().split(':').collect();
        let [lo, hi, steps] = parts.as_slice() else {
            return Err(bad());
        };
        let lo: f64 = lo.parse().map_err(|_| bad())?;
        let hi: f64 = hi.parse().map_err(|_| bad())?;
        let steps: usize = steps.parse().map_err(|_| bad())?;
        if steps == 0 || !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo > hi {
            return Err(FailureError::BadGrid(format!(
                "{s:?} must lie in [0, 1] with lo <= hi and steps >= 1"
            )));
        }
        Ok(Self { lo, hi, steps })
    }
}

/// `pq` axis, then `pm` axis, separated by a comma.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub pq: GridAxis,
    pub pm: GridAxis,
}

impl FromStr for Grid {
    type Err = FailureError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s
            .split_once(',')
            .ok_or_else(|| FailureError::BadGrid(format!("{s:?} needs pq and pm axes separated by ','")))?;
        Ok(Self {
            pq: a.parse()?,
            pm: b.parse()?,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolSummary {
    pub label: String,
    pub failure: Polynomial,
    pub cost: Polynomial,
    pub tag: Option<ClassTag>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub protocols: Vec<ProtocolSummary>,
    /// `(i, j, F_i - F_j)` for every pair on the same code.
    pub diffs: Vec<(usize, usize, Polynomial)>,
    pub crossovers: Vec<(usize, usize, Crossover)>,
}

/// Failure and cost polynomials of each protocol, with pairwise differences
/// and leading-order crossovers among protocols of the same code. `degree`
/// truncates every failure polynomial.
pub fn compare(
    protocols: &[Protocol],
    policy: DecodePolicy,
    degree: Option<u32>,
) -> Result<ComparisonReport, FailureError> {
    if protocols.is_empty() {
        return Err(FailureError::EmptySelection);
    }
    let mut summaries = Vec::new();
    for p in protocols {
        let failure = match degree {
            Some(k) => truncated_failure(p, policy, k)?,
            None => exact_failure(p, policy)?,
        };
        summaries.push(ProtocolSummary {
            label: p.label(),
            failure,
            cost: expected_cost(p),
            tag: classify(p).ok(),
        });
    }
    let mut diffs = Vec::new();
    let mut crossovers = Vec::new();
    for i in 0..protocols.len() {
        for j in (i + 1)..protocols.len() {
            if protocols[i].code().name() != protocols[j].code().name() {
                continue;
            }
            let (a, b) = (&summaries[i].failure, &summaries[j].failure);
            diffs.push((i, j, a - b));
            crossovers.push((i, j, crossover(a, b)));
        }
    }
    Ok(ComparisonReport {
        protocols: summaries,
        diffs,
        crossovers,
    })
}

/// Decimal with 12 significant digits.
pub fn format_sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let mag = x.abs().log10().floor() as i32;
    if (-6..12).contains(&mag) {
        let prec = (11 - mag).max(0) as usize;
        format!("{x:.prec$}")
    } else {
        format!("{x:.11e}")
    }
}

impl ComparisonReport {
    pub fn diff_name(&self, i: usize, j: usize) -> String {
        format!("diff_{}-{}", self.protocols[i].label, self.protocols[j].label)
    }

    pub fn header(&self) -> String {
        let mut cols = vec!["pq".to_string(), "pm".to_string()];
        cols.extend(self.protocols.iter().map(|p| format!("F_{}", p.label)));
        cols.extend(self.diffs.iter().map(|(i, j, _)| self.diff_name(*i, *j)));
        cols.join(",")
    }

    /// CSV grid followed by `#` comment lines summarising costs and crossovers.
    pub fn to_csv(&self, grid: &Grid) -> String {
        let points: Vec<(f64, f64)> = grid
            .pq
            .points()
            .into_iter()
            .flat_map(|pq| grid.pm.points().into_iter().map(move |pm| (pq, pm)))
            .collect();
        let rows: Vec<String> = points
            .par_iter()
            .map(|&(pq, pm)| {
                let mut cells = vec![format_sig12(pq), format_sig12(pm)];
                cells.extend(self.protocols.iter().map(|p| format_sig12(p.failure.evaluate(pq, pm))));
                cells.extend(self.diffs.iter().map(|(_, _, d)| format_sig12(d.evaluate(pq, pm))));
                cells.join(",")
            })
            .collect();
        let mut out = self.header();
        out.push('\n');
        for r in rows {
            out.push_str(&r);
            out.push('\n');
        }
        out.push_str(&self.footer());
        out
    }

    pub fn footer(&self) -> String {
        let mut out = String::new();
        for p in &self.protocols {
            let tag = p
                .tag
                .map(|t| t.to_string())
                .unwrap_or_else(|| "unclassified".to_string());
            let _ = writeln!(out, "# {} {}: cost = {}", p.label, tag, p.cost.pretty());
        }
        for (i, j, c) in &self.crossovers {
            let _ = writeln!(
                out,
                "# crossover {} vs {}: {}",
                self.protocols[*i].label, self.protocols[*j].label, c
            );
        }
        out
    }
}
