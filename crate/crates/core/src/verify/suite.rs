use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::checks::{bg_dual_check, dual_product_check, maurey_check, poincare_check};
use super::function::{Extension, GridFunction};
use crate::costfn::CostFunction;
use crate::dist1d::Distribution1D;
use crate::error::{Error, Result};
use crate::grid::{linspace, GridSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Maurey,
    Dual,
    Poincare,
    BgDual,
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "maurey" => Ok(Suite::Maurey),
            "dual" => Ok(Suite::Dual),
            "poincare" => Ok(Suite::Poincare),
            "bgdual" => Ok(Suite::BgDual),
            _ => Err(Error::Domain(format!("unknown suite {s:?}"))),
        }
    }
}

impl std::fmt::Display for Suite {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Suite::Maurey => "maurey",
            Suite::Dual => "dual",
            Suite::Poincare => "poincare",
            Suite::BgDual => "bgdual",
        })
    }
}

/// Everything a suite needs besides the random functions. `measure`,
/// `cost` and `lambda` default to the two-sided exponential, `β₂` and `1/4`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub suite: Suite,
    pub size: usize,
    pub seed: u64,
    pub measure: Option<Distribution1D>,
    pub cost: Option<CostFunction>,
    pub lambda: Option<f64>,
}

impl SuiteConfig {
    pub fn new(suite: Suite, size: usize, seed: u64) -> Self {
        Self {
            suite,
            size,
            seed,
            measure: None,
            cost: None,
            lambda: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteRow {
    pub function_id: usize,
    #[serde(with = "crate::extended")]
    pub margin: f64,
    pub grid_level: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub rows: Vec<SuiteRow>,
    #[serde(with = "crate::extended")]
    pub min_margin: f64,
    pub argmin: usize,
}

impl SuiteReport {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["function_id", "margin", "grid_level"])?;
        for r in &self.rows {
            out.write_record([r.function_id.to_string(), r.margin.to_string(), r.grid_level.to_string()])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Knots of the random test functions.
pub fn suite_knots() -> Vec<f64> {
    linspace(-20.0, 20.0, 41)
}

/// `size` bounded 3-Lipschitz piecewise-linear functions on [`suite_knots`],
/// constant outside. Function 0 is the identity clipped to `[−20, 20]`; the
/// rest start at 0 with slopes uniform in `[−3, 3]`.
pub fn random_lipschitz_functions(size: usize, seed: u64) -> Vec<GridFunction> {
    let knots = suite_knots();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(size);
    if size > 0 {
        out.push(GridFunction::from_fn(knots.clone(), |x| x, Extension::Constant).expect("valid knots"));
    }
    for _ in 1..size {
        let mut values = Vec::with_capacity(knots.len());
        let mut v = 0.0;
        values.push(v);
        for w in knots.windows(2) {
            v += rng.random_range(-3.0..=3.0) * (w[1] - w[0]);
            values.push(v);
        }
        out.push(GridFunction::new(knots.clone(), values, Extension::Constant).expect("valid knots"));
    }
    out
}

/// Margin of one function under the suite's measure, cost and `λ`.
pub fn suite_margin(config: &SuiteConfig, f: &GridFunction, grid: &GridSpec) -> Result<f64> {
    let mu = config
        .measure
        .clone()
        .unwrap_or_else(Distribution1D::two_sided_exponential);
    let cost = config.cost.clone().unwrap_or_else(CostFunction::beta2);
    let c = |t: f64| cost.eval_unchecked(t);
    match config.suite {
        Suite::Maurey => maurey_check(f, grid),
        Suite::Dual => dual_product_check(&mu, f, c, grid),
        Suite::BgDual => bg_dual_check(&mu, f, c, grid),
        Suite::Poincare => poincare_check(&mu, config.lambda.unwrap_or(0.25), f, grid),
    }
}

/// Margins of every function in the seeded family, in parallel. Rows record
/// the dyadic quadrature depth that produced them. Deterministic for a given
/// seed.
pub fn run_suite(config: &SuiteConfig, grid: &GridSpec) -> Result<SuiteReport> {
    grid.validate()?;
    if config.size == 0 {
        return Err(Error::Size("suite size must be positive".into()));
    }
    let depth = grid.dyadic_depth();
    let functions = random_lipschitz_functions(config.size, config.seed);
    let rows: Vec<SuiteRow> = functions
        .par_iter()
        .enumerate()
        .map(|(id, f)| {
            Ok(SuiteRow {
                function_id: id,
                margin: suite_margin(config, f, grid)?,
                grid_level: depth,
            })
        })
        .collect::<Result<_>>()?;
    let (argmin, min_margin) = rows
        .iter()
        .map(|r| (r.function_id, r.margin))
        .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
    Ok(SuiteReport {
        suite: config.suite,
        seed: config.seed,
        rows,
        min_margin,
        argmin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn functions_are_seeded_and_lipschitz() {
        let a = random_lipschitz_functions(20, 7);
        let b = random_lipschitz_functions(20, 7);
        assert_eq!(a, b);
        assert_ne!(a, random_lipschitz_functions(20, 8));
        for f in &a {
            assert!(f.lipschitz() <= 3.0 + 1e-12);
            assert!(f.is_bounded());
        }
        assert_eq!(a[0].eval(3.5), 3.5);
        assert_eq!(a[0].eval(30.0), 20.0);
    }

    #[test]
    fn csv_layout() {
        let grid = GridSpec::default().with_nodes(40);
        let r = run_suite(&SuiteConfig::new(Suite::Poincare, 3, 1), &grid).unwrap();
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("function_id,margin,grid_level\n"));
        assert_eq!(text.lines().count(), 4);
        assert!("bgdual".parse::<Suite>().unwrap() == Suite::BgDual);
    }
}
