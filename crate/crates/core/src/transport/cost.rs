use serde::{Deserialize, Serialize};

use crate::costfn::CostFunction;
use crate::dist1d::{AtomList, Distribution1D};
use crate::error::Result;
use crate::grid::GridSpec;
use crate::quad::{dyadic_levels, summarize_two_sided};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransportCost {
    #[serde(with = "crate::extended")]
    pub cost: f64,
    #[serde(with = "crate::extended")]
    pub error_estimate: f64,
    pub diverged: bool,
    pub panels: usize,
    /// Cumulative value after each dyadic level (empty for exact sums).
    #[serde(with = "crate::extended::vec")]
    pub trace: Vec<f64>,
}

/// Cost of the monotone coupling, `∫₀¹ α(|F_μ⁻¹(u) − F_ν⁻¹(u)|) du`, which
/// is the optimal transport cost for convex `α`.
///
/// Two atom lists are handled by an exact finite sum over the merged
/// quantile breakpoints; everything else by dyadic quadrature toward both
/// ends of `(0, 1)`, with divergence detection.
pub fn transport_cost(
    alpha: &CostFunction,
    mu: &Distribution1D,
    nu: &Distribution1D,
    grid: &GridSpec,
) -> Result<TransportCost> {
    grid.validate()?;
    if let (Some(a), Some(b)) = (mu.atom_list(), nu.atom_list()) {
        let cost = discrete_cost(alpha, a, b);
        return Ok(TransportCost {
            cost,
            error_estimate: 0.0,
            diverged: !cost.is_finite(),
            panels: a.len() + b.len() - 1,
            trace: Vec::new(),
        });
    }
    let mut breaks = mu.quantile_breaks();
    breaks.extend(nu.quantile_breaks());
    let lower: Vec<f64> = breaks.iter().map(|b| b.0).filter(|&u| u < 0.5).collect();
    let upper: Vec<f64> = breaks.iter().map(|b| b.1).filter(|&s| s < 0.5).collect();
    let fl = |u: f64| alpha.eval_unchecked((mu.quantile_lower(u) - nu.quantile_lower(u)).abs());
    let fu = |s: f64| alpha.eval_unchecked((mu.quantile_upper(s) - nu.quantile_upper(s)).abs());
    let depth = grid.dyadic_depth();
    let (lo, p1) = dyadic_levels(&fl, 0.5, &lower, depth);
    let (hi, p2) = dyadic_levels(&fu, 0.5, &upper, depth);
    let t = summarize_two_sided(&lo, &hi, p1 + p2, &grid.divergence);
    Ok(TransportCost {
        cost: t.value,
        error_estimate: t.error_estimate,
        diverged: t.diverged,
        panels: t.panels,
        trace: t.trace,
    })
}

/// Exact monotone-coupling cost of two atom lists: both quantile functions
/// are constant between consecutive cumulative weights.
fn discrete_cost(alpha: &CostFunction, a: &AtomList, b: &AtomList) -> f64 {
    let (xa, wa) = (a.locations(), a.weights());
    let (xb, wb) = (b.locations(), b.weights());
    let (mut i, mut j) = (0, 0);
    let (mut ra, mut rb) = (wa[0], wb[0]);
    let mut total = 0.0;
    loop {
        let m = ra.min(rb);
        total += m * alpha.eval_unchecked((xa[i] - xb[j]).abs());
        ra -= m;
        rb -= m;
        let last_a = i + 1 == xa.len();
        let last_b = j + 1 == xb.len();
        if last_a && last_b {
            break;
        }
        // advance whichever atom is exhausted; rounding leftovers at the
        // end of one list are carried by the other list's last atom
        if (ra <= rb || last_b) && !last_a {
            i += 1;
            ra = wa[i];
        } else if !last_b {
            j += 1;
            rb = wb[j];
        } else {
            break;
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_shift_costs_m_squared() {
        let g = GridSpec::default();
        for m in [0.5, 2.0] {
            let a = Distribution1D::gaussian(0.0, 1.0).unwrap();
            let b = Distribution1D::gaussian(m, 1.0).unwrap();
            let c = transport_cost(&CostFunction::quadratic(), &a, &b, &g).unwrap();
            assert!(!c.diverged);
            assert!((c.cost - m * m).abs() < 1e-6 * m * m, "{}", c.cost);
        }
    }

    #[test]
    fn self_cost_is_zero() {
        let g = GridSpec::default();
        let mu = Distribution1D::two_sided_exponential();
        let c = transport_cost(&CostFunction::alpha1(1.0), &mu, &mu, &g).unwrap();
        assert_eq!(c.cost, 0.0);
    }

    #[test]
    fn two_atom_example() {
        let g = GridSpec::default();
        let mu = Distribution1D::atoms(vec![(0.0, 0.5), (1.0, 0.5)]).unwrap();
        let nu = Distribution1D::atoms(vec![(0.0, 0.5), (2.0, 0.5)]).unwrap();
        let c = transport_cost(&CostFunction::quadratic(), &mu, &nu, &g).unwrap();
        assert_eq!(c.cost, 0.5);
        assert_eq!(c.error_estimate, 0.0);
    }

    #[test]
    fn heavy_tails_diverge_under_quadratic_cost() {
        let g = GridSpec::default();
        let a = Distribution1D::cauchy(0.0, 1.0).unwrap();
        let b = Distribution1D::gaussian(0.0, 1.0).unwrap();
        let c = transport_cost(&CostFunction::quadratic(), &a, &b, &g).unwrap();
        assert!(c.diverged);
        assert_eq!(c.cost, f64::INFINITY);
        let s = serde_json::to_string(&c).unwrap();
        assert!(s.contains(r#""cost":"inf""#));
    }

    #[test]
    fn mixed_atoms_and_density() {
        // δ₀ against μ₁: cost E|X|² = 2
        let g = GridSpec::default();
        let d = Distribution1D::atoms(vec![(0.0, 1.0)]).unwrap();
        let mu = Distribution1D::two_sided_exponential();
        let c = transport_cost(&CostFunction::quadratic(), &d, &mu, &g).unwrap();
        assert!((c.cost - 2.0).abs() < 1e-9, "{}", c.cost);
    }
}
