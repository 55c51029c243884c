use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridSpec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioRow {
    pub x: f64,
    #[serde(with = "crate::extended")]
    pub ratio: f64,
}

/// Samples of `|V′(x + m)| / α′(λ|x|)`. The table is data, not a verdict:
/// a liminf cannot be certified from finitely many nodes, so the outer
/// infima are only heuristics to compare across windows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioTable {
    pub lambda: f64,
    pub median: f64,
    pub rows: Vec<RatioRow>,
    /// Nodes where `α′(λ|x|)` vanished or the ratio was not finite.
    pub flagged: Vec<f64>,
    /// Infimum over the outermost tenth of the positive nodes.
    #[serde(with = "crate::extended")]
    pub outer_inf_plus: f64,
    #[serde(with = "crate::extended")]
    pub outer_inf_minus: f64,
}

/// Tabulates the potential-to-cost slope ratio at the grid's linear nodes
/// (read as offsets `x` from `m`).
pub fn potential_cost_ratio<V, A>(v_prime: V, alpha_prime: A, lambda: f64, m: f64, grid: &GridSpec) -> Result<RatioTable>
where
    V: Fn(f64) -> f64,
    A: Fn(f64) -> f64,
{
    grid.validate()?;
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Domain(format!("lambda = {lambda} must be positive")));
    }
    let mut rows = Vec::new();
    let mut flagged = Vec::new();
    for x in grid.linear_nodes() {
        let den = alpha_prime(lambda * x.abs());
        let ratio = v_prime(x + m).abs() / den;
        if den > 0.0 && ratio.is_finite() {
            rows.push(RatioRow { x, ratio });
        } else {
            flagged.push(x);
        }
    }
    let outer = |pos: bool| {
        let mut side: Vec<&RatioRow> = rows.iter().filter(|r| if pos { r.x > 0.0 } else { r.x < 0.0 }).collect();
        side.sort_by(|a, b| a.x.abs().partial_cmp(&b.x.abs()).unwrap());
        let keep = side.len().div_ceil(10);
        side[side.len() - keep..]
            .iter()
            .map(|r| r.ratio)
            .fold(f64::INFINITY, f64::min)
    };
    Ok(RatioTable {
        lambda,
        median: m,
        outer_inf_plus: outer(true),
        outer_inf_minus: outer(false),
        rows,
        flagged,
    })
}

/// Symmetric difference quotient with a step scaled to `|x|`.
pub fn central_difference<F: Fn(f64) -> f64>(f: &F, x: f64) -> f64 {
    let h = 1e-5 * x.abs().max(1.0);
    (f(x + h) - f(x - h)) / (2.0 * h)
}
