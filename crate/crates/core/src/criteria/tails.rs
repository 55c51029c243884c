use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::Supremum;
use crate::costfn::CostFunction;
use crate::dist1d::{Distribution1D, Side};
use crate::error::{Error, Result};
use crate::grid::GridSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KFunctionals {
    pub b: f64,
    pub k_plus: Supremum,
    pub k_minus: Supremum,
}

/// `K⁺(b) = sup_{t_μ > x ≥ m} ∫ e^{β(bu)} μ_x⁺(du)` and its mirror image
/// over `s_μ < x ≤ m`. A side without admissible anchors reports 0.
pub fn k_functionals(mu: &Distribution1D, beta: &CostFunction, b: f64, grid: &GridSpec) -> Result<KFunctionals> {
    grid.validate()?;
    if !(b >= 0.0 && b.is_finite()) {
        return Err(Error::Domain(format!("b = {b} must be a non-negative real")));
    }
    beta.validate()?;
    Ok(KFunctionals {
        b,
        k_plus: side_sup(mu, beta, b, Side::Plus, grid),
        k_minus: side_sup(mu, beta, b, Side::Minus, grid),
    })
}

/// `∫ e^{β(bu)} μ_x^±(du)` for one anchor; `None` when the conditioning
/// set has no mass.
pub fn tail_exponential_moment(
    mu: &Distribution1D,
    beta: &CostFunction,
    b: f64,
    x: f64,
    side: Side,
    grid: &GridSpec,
) -> Option<f64> {
    let tail = mu.conditional_tail(x, side).ok()?;
    let kink = if b > 0.0 { beta.zero_threshold() / b } else { 0.0 };
    let breaks: Vec<f64> = [kink].into_iter().filter(|k| k.is_finite() && *k > 0.0).collect();
    let r = tail.expect_with_breaks(
        |u| beta.eval_unchecked(b * u).exp(),
        &breaks,
        grid.dyadic_depth(),
        &grid.divergence,
    );
    Some(if r.diverged { f64::INFINITY } else { r.value })
}

fn side_sup(mu: &Distribution1D, beta: &CostFunction, b: f64, side: Side, grid: &GridSpec) -> Supremum {
    let m = mu.median();
    let per_level: Vec<(f64, Option<f64>)> = (0..grid.levels)
        .into_par_iter()
        .map(|level| {
            let (plus, minus) = grid.sup_nodes(m, level);
            let outward = match side {
                Side::Plus => plus,
                Side::Minus => minus,
            };
            let nodes: Vec<f64> = std::iter::once(m).chain(outward).collect();
            let values: Vec<(f64, Option<f64>)> = nodes
                .par_iter()
                .map(|&x| (tail_exponential_moment(mu, beta, b, x, side, grid).unwrap_or(0.0), Some(x)))
                .collect();
            values
                .into_iter()
                .filter(|v| v.0 > 0.0)
                .fold((0.0, None), |acc, v| if v.0 > acc.0 { v } else { acc })
        })
        .collect();
    Supremum::from_levels(per_level.into_iter(), &grid.divergence)
}
