use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::costfn::CostFunction;
use crate::grid::GridSpec;
use crate::transport::MonotoneMap;

/// Growth modulus `ω` in `|T(x) − T(y)| ≤ ω(|x − y|)/d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Modulus {
    /// `s ↦ β⁻¹(s)`.
    BetaInverse { cost: CostFunction },
    /// `s ↦ α⁻¹(h² + s)`.
    ShiftedInverse { cost: CostFunction, h: f64 },
}

impl Modulus {
    pub fn eval(&self, s: f64) -> f64 {
        let r = match self {
            Modulus::BetaInverse { cost } => cost.inverse(s),
            Modulus::ShiftedInverse { cost, h } => cost.inverse(h * h + s),
        };
        r.unwrap_or(f64::INFINITY)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Contraction {
    /// Largest `d` compatible with every checked pair; `inf` when `T` is
    /// constant on the nodes.
    #[serde(with = "crate::extended")]
    pub d: f64,
    /// Pair attaining the infimum.
    pub argmin: Option<(f64, f64)>,
}

/// `d = inf ω(|x − y|)/|T(x) − T(y)|` over pairs of the grid's linear
/// nodes. Pairs with `T(x) = T(y)` impose nothing and are skipped.
pub fn contraction_constant(map: &MonotoneMap, modulus: &Modulus, grid: &GridSpec) -> Contraction {
    contraction_constant_on(map, modulus, &grid.linear_nodes())
}

pub fn contraction_constant_on(map: &MonotoneMap, modulus: &Modulus, nodes: &[f64]) -> Contraction {
    let tv: Vec<f64> = nodes.iter().map(|&x| map.eval(x)).collect();
    let rows: Vec<(f64, Option<(f64, f64)>)> = (0..nodes.len())
        .into_par_iter()
        .map(|i| {
            let mut best = (f64::INFINITY, None);
            for j in i + 1..nodes.len() {
                let dt = (tv[j] - tv[i]).abs();
                if dt == 0.0 || nodes[j] == nodes[i] {
                    continue;
                }
                let r = modulus.eval((nodes[j] - nodes[i]).abs()) / dt;
                if r < best.0 {
                    best = (r, Some((nodes[i], nodes[j])));
                }
            }
            best
        })
        .collect();
    let (d, argmin) = rows
        .into_iter()
        .fold((f64::INFINITY, None), |acc, r| if r.0 < acc.0 { r } else { acc });
    Contraction { d, argmin }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthRatio {
    #[serde(with = "crate::extended")]
    pub sup: f64,
    pub argsup: Option<(f64, f64)>,
}

/// `sup |T(x) − T(y)| / √(1 + |x − y|)` over pairs of the grid's linear
/// nodes.
pub fn growth_ratio_sup(map: &MonotoneMap, grid: &GridSpec) -> GrowthRatio {
    growth_ratio_sup_on(map, &grid.linear_nodes())
}

pub fn growth_ratio_sup_on(map: &MonotoneMap, nodes: &[f64]) -> GrowthRatio {
    let tv: Vec<f64> = nodes.iter().map(|&x| map.eval(x)).collect();
    let rows: Vec<(f64, Option<(f64, f64)>)> = (0..nodes.len())
        .into_par_iter()
        .map(|i| {
            let mut best = (0.0, None);
            for j in i + 1..nodes.len() {
                let r = growth_ratio(tv[i], tv[j], nodes[i], nodes[j]);
                if r > best.0 {
                    best = (r, Some((nodes[i], nodes[j])));
                }
            }
            best
        })
        .collect();
    let (sup, argsup) = rows
        .into_iter()
        .fold((0.0, None), |acc, r| if r.0 > acc.0 { r } else { acc });
    GrowthRatio { sup, argsup }
}

/// The ratio for one pair, given the map's values.
pub fn growth_ratio(tx: f64, ty: f64, x: f64, y: f64) -> f64 {
    (ty - tx).abs() / (1.0 + (y - x).abs()).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_with_shifted_quadratic_modulus() {
        let g = GridSpec::default().with_window(0.0, 10.0).with_nodes(50);
        let m = Modulus::ShiftedInverse {
            cost: CostFunction::quadratic(),
            h: 1.0,
        };
        let c = contraction_constant(&MonotoneMap::Identity, &m, &g);
        assert!((c.d - 11f64.sqrt() / 10.0).abs() < 1e-12, "{}", c.d);
        assert_eq!(c.argmin, Some((0.0, 10.0)));
    }

    #[test]
    fn lipschitz_maps_have_d_at_least_one() {
        let g = GridSpec::default().with_nodes(60);
        let m = Modulus::BetaInverse {
            cost: CostFunction::power(1.0),
        };
        for map in [MonotoneMap::Staircase, MonotoneMap::WaitStep, MonotoneMap::affine(0.5, 3.0).unwrap()] {
            assert!(contraction_constant(&map, &m, &g).d >= 1.0 - 1e-12);
        }
    }

    #[test]
    fn constant_map_has_infinite_d() {
        let g = GridSpec::default().with_nodes(10);
        let m = Modulus::BetaInverse {
            cost: CostFunction::quadratic(),
        };
        let c = contraction_constant(&MonotoneMap::affine(0.0, 1.0).unwrap(), &m, &g);
        assert_eq!(c.d, f64::INFINITY);
        assert_eq!(c.argmin, None);
    }

    #[test]
    fn identity_growth_ratio() {
        let g = GridSpec::default().with_window(0.0, 30.0).with_nodes(40);
        let r = growth_ratio_sup(&MonotoneMap::Identity, &g);
        assert!((r.sup - 30.0 / 31f64.sqrt()).abs() < 1e-12);
    }
}
