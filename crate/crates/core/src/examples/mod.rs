//! The four explicit constructions: a map, its pushforward of the two-sided
//! exponential law, and a list of checkable claims about both.
//!
//! The smoothed variant of the staircase (steps replaced by shallow slopes)
//! is not constructed: the slope is a free choice.

mod ceil_sqrt;
mod section41;
mod staircase;
mod tbar;

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dist1d::Distribution1D;
use crate::error::{Error, Result};
use crate::grid::{linspace, GridSpec};
use crate::transport::{transport_map, MonotoneMap};

pub use ceil_sqrt::ceil_sqrt_example;
pub use section41::section41_example;
pub use staircase::{ln_staircase_d_closed_form, staircase_example};
pub use tbar::tbar_example;

pub const EXAMPLE_NAMES: [&str; 4] = ["ceil-sqrt", "section41", "staircase", "tbar"];

/// Builds a bundle by name; `section41` uses `r = 1/2`.
pub fn example_by_name(name: &str) -> Result<ExampleBundle> {
    match name {
        "ceil-sqrt" => Ok(ceil_sqrt_example()),
        "section41" => section41_example(0.5),
        "staircase" => Ok(staircase_example()),
        "tbar" => Ok(tbar_example()),
        _ => Err(Error::Domain(format!(
            "unknown example {name:?}; expected one of {}",
            EXAMPLE_NAMES.join(", ")
        ))),
    }
}

pub type ClaimCheck = fn(&ExampleBundle, &GridSpec) -> Result<ClaimOutcome>;

#[derive(Clone)]
pub struct Claim {
    pub name: &'static str,
    pub description: &'static str,
    pub check: ClaimCheck,
}

impl std::fmt::Debug for Claim {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Claim").field("name", &self.name).finish_non_exhaustive()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub name: String,
    #[serde(with = "crate::extended")]
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimOutcome {
    pub name: String,
    pub passed: bool,
    pub witnesses: Vec<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl ClaimOutcome {
    pub fn new(passed: bool) -> Self {
        Self {
            name: String::new(),
            passed,
            witnesses: Vec::new(),
            note: None,
        }
    }

    pub fn witness(mut self, name: impl Into<String>, value: f64) -> Self {
        self.witnesses.push(Witness {
            name: name.into(),
            value,
        });
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.witnesses.iter().find(|w| w.name == name).map(|w| w.value)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<TableRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TableRow(#[serde(with = "crate::extended::vec")] pub Vec<f64>);

impl Table {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.columns)?;
        for row in &self.rows {
            out.write_record(row.0.iter().map(|v| v.to_string()))?;
        }
        out.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct ExampleBundle {
    pub name: &'static str,
    pub description: &'static str,
    /// The map carrying the two-sided exponential law onto `measure`.
    pub map: MonotoneMap,
    pub measure: Distribution1D,
    /// Named scalar parameters (e.g. `r` for the composition example).
    pub params: Vec<(String, f64)>,
    pub claims: Vec<Claim>,
    pub table: Option<fn(&ExampleBundle, &GridSpec) -> Result<Table>>,
}

impl ExampleBundle {
    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.iter().find(|p| p.0 == name).map(|p| p.1)
    }

    /// Evaluates every claim; a check that errors counts as failed, with
    /// the error as note.
    pub fn run_claims(&self, grid: &GridSpec) -> Vec<ClaimOutcome> {
        self.claims
            .par_iter()
            .map(|c| {
                let mut out = (c.check)(self, grid).unwrap_or_else(|e| ClaimOutcome::new(false).note(e.to_string()));
                out.name = c.name.to_string();
                out
            })
            .collect()
    }

    pub fn run_claim(&self, name: &str, grid: &GridSpec) -> Result<ClaimOutcome> {
        let c = self
            .claims
            .iter()
            .find(|c| c.name == name)
            .ok_or_else(|| Error::Domain(format!("{} has no claim {name:?}", self.name)))?;
        let mut out = (c.check)(self, grid)?;
        out.name = c.name.to_string();
        Ok(out)
    }

    pub fn table(&self, grid: &GridSpec) -> Result<Option<Table>> {
        self.table.map(|t| t(self, grid)).transpose()
    }
}

/// Largest `|T(x) − T(y)| − bound(|x − y|)` over all pairs of `nodes`.
pub(crate) fn worst_pair_excess(map: &MonotoneMap, nodes: &[f64], bound: impl Fn(f64) -> f64 + Sync) -> f64 {
    let t: Vec<f64> = nodes.iter().map(|&x| map.eval(x)).collect();
    (0..nodes.len())
        .into_par_iter()
        .map(|i| {
            (i + 1..nodes.len())
                .map(|j| (t[j] - t[i]).abs() - bound((nodes[j] - nodes[i]).abs()))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .reduce(|| f64::NEG_INFINITY, f64::max)
}

/// Largest slope between consecutive sorted nodes, and the smallest one.
pub(crate) fn slope_range(map: &MonotoneMap, nodes: &[f64]) -> (f64, f64) {
    nodes.windows(2).fold((f64::NEG_INFINITY, f64::INFINITY), |(hi, lo), w| {
        let s = (map.eval(w[1]) - map.eval(w[0])) / (w[1] - w[0]);
        (hi.max(s), lo.min(s))
    })
}

/// `window` nodes plus the map's own breakpoints, sorted.
pub(crate) fn nodes_with_breaks(map: &MonotoneMap, lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let mut xs = linspace(lo, hi, n);
    xs.extend(map.breakpoints(lo, hi));
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    xs.dedup();
    xs
}

/// `transport_map(μ₁, μ)` against the bundle map at 10³ window nodes,
/// skipping nodes within `skip` of a discontinuity.
pub(crate) fn transport_map_agrees(b: &ExampleBundle, grid: &GridSpec, skip: impl Fn(f64) -> bool) -> Result<ClaimOutcome> {
    let t = transport_map(&Distribution1D::two_sided_exponential(), &b.measure)?;
    let (lo, hi) = grid.window;
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    for x in linspace(lo, hi, 1000) {
        if skip(x) {
            continue;
        }
        let (a, c) = (t.eval(x), b.map.eval(x));
        worst = worst.max((a - c).abs() / (1.0 + c.abs()));
        checked += 1;
    }
    Ok(ClaimOutcome::new(worst <= 1e-10)
        .witness("max_relative_gap", worst)
        .witness("nodes_checked", checked as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_resolve() {
        for n in EXAMPLE_NAMES {
            assert_eq!(example_by_name(n).unwrap().name, n);
        }
        let err = example_by_name("nope").unwrap_err().to_string();
        assert!(err.contains("ceil-sqrt") && err.contains("tbar"));
    }
}
