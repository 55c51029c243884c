//! Hardy-type functionals of the Muckenhoupt and Bobkov–Götze criteria.
//!
//! Both are suprema over `x` on one side of the median of
//! `tail(x) · ∫_m^x 1/p`, the second with an extra `log(1/tail(x))`
//! factor. Tails and the inverse-density integral are carried in log space,
//! so measures like the staircase pushforward, whose `1/p` grows like
//! `e^{t²}`, can be probed far out.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::Supremum;
use crate::dist1d::{DistKind, Distribution1D, Side};
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::quad::{ln_add_exp, ln_integrate_exp};

/// Ingredients of both functionals at one node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub x: f64,
    /// `ln μ[x, ∞)` on the plus side, `ln μ(−∞, x)` on the minus side.
    #[serde(with = "crate::extended")]
    pub ln_tail: f64,
    /// `ln ∫ 1/p` between the median and `x`.
    #[serde(with = "crate::extended")]
    pub ln_inverse_density: f64,
}

impl ProfilePoint {
    /// `tail · ∫ 1/p`; zero beyond the support even when `∫ 1/p = ∞`.
    pub fn muckenhoupt(&self) -> f64 {
        if self.ln_tail == f64::NEG_INFINITY {
            return 0.0;
        }
        (self.ln_tail + self.ln_inverse_density).exp()
    }

    /// `tail · log(1/tail) · ∫ 1/p`.
    pub fn bobkov_goetze(&self) -> f64 {
        if self.ln_tail == f64::NEG_INFINITY {
            return 0.0;
        }
        let a = self.muckenhoupt();
        if a == 0.0 {
            0.0
        } else {
            a * (-self.ln_tail)
        }
    }
}

/// Evaluates the profile at `nodes`, which must run outward from the
/// median on `side`. The inverse-density integral is accumulated segment by
/// segment, split at the density's breakpoints.
pub fn hardy_profile(mu: &Distribution1D, side: Side, nodes: &[f64]) -> Vec<ProfilePoint> {
    let m = mu.median();
    let Some(&far) = nodes.last() else {
        return Vec::new();
    };
    let (lo, hi) = if far >= m { (m, far) } else { (far, m) };
    let breaks = mu.density_breakpoints(lo, hi);
    let g = |t: f64| -mu.ln_density(t);
    let mut cum = f64::NEG_INFINITY;
    let mut prev = m;
    let mut out = Vec::with_capacity(nodes.len());
    for &x in nodes {
        let (a, b) = if x >= prev { (prev, x) } else { (x, prev) };
        if cum < f64::INFINITY {
            cum = ln_add_exp(cum, ln_integrate_exp(&g, a, b, &breaks, cum));
        }
        prev = x;
        let s = mu.split(x);
        let ln_tail = match side {
            Side::Plus => s.right_closed(),
            Side::Minus => s.left,
        };
        out.push(ProfilePoint {
            x,
            ln_tail,
            ln_inverse_density: cum,
        });
    }
    out
}

/// Muckenhoupt constants and the Poincaré bracket they imply.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Muckenhoupt {
    pub a_plus: Supremum,
    pub a_minus: Supremum,
    /// `1/(4 max(A⁻, A⁺))`.
    #[serde(with = "crate::extended")]
    pub lambda_lower: f64,
    /// `1/max(A⁻, A⁺)`.
    #[serde(with = "crate::extended")]
    pub lambda_upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BobkovGoetze {
    pub d_plus: Supremum,
    pub d_minus: Supremum,
}

/// `A± = sup μ[x,∞) ∫_m^x 1/p` (plus side) and `sup μ(−∞,x) ∫_x^m 1/p`
/// (minus side), with the implied bracket `1/(4A) ≤ λ ≤ 1/A`.
pub fn muckenhoupt(mu: &Distribution1D, grid: &GridSpec) -> Result<Muckenhoupt> {
    let [a_plus, a_minus, _, _] = hardy_suprema(mu, grid)?;
    let (lambda_lower, lambda_upper) = lambda_bracket(a_plus.value, a_minus.value);
    Ok(Muckenhoupt {
        a_plus,
        a_minus,
        lambda_lower,
        lambda_upper,
    })
}

/// `D± = sup tail(x) · log(1/tail(x)) · ∫ 1/p`, the log-Sobolev analogue.
pub fn bobkov_goetze(mu: &Distribution1D, grid: &GridSpec) -> Result<BobkovGoetze> {
    let [_, _, d_plus, d_minus] = hardy_suprema(mu, grid)?;
    Ok(BobkovGoetze { d_plus, d_minus })
}

pub(crate) fn lambda_bracket(a_plus: f64, a_minus: f64) -> (f64, f64) {
    let a = a_plus.max(a_minus);
    if a == f64::INFINITY {
        (0.0, 0.0)
    } else {
        (1.0 / (4.0 * a), 1.0 / a)
    }
}

/// `[A⁺, A⁻, D⁺, D⁻]`, each a running supremum over window-doubling levels.
pub(crate) fn hardy_suprema(mu: &Distribution1D, grid: &GridSpec) -> Result<[Supremum; 4]> {
    grid.validate()?;
    if matches!(mu.kind(), DistKind::Atoms { .. }) {
        return Err(Error::Precondition(
            "Hardy-type criteria need a measure with a density part".into(),
        ));
    }
    let (s_mu, t_mu) = mu.support();
    let m = mu.median();
    // per level: (best A+, arg), (best A−, arg), (best D+, arg), (best D−, arg)
    let per_level: Vec<[(f64, Option<f64>); 4]> = (0..grid.levels)
        .into_par_iter()
        .map(|level| {
            let (plus, minus) = grid.sup_nodes(m, level);
            let plus: Vec<f64> = plus.into_iter().take_while(|&x| x < t_mu).collect();
            let minus: Vec<f64> = minus.into_iter().take_while(|&x| x > s_mu).collect();
            let pp = hardy_profile(mu, Side::Plus, &plus);
            let pm = hardy_profile(mu, Side::Minus, &minus);
            [
                best(&pp, ProfilePoint::muckenhoupt),
                best(&pm, ProfilePoint::muckenhoupt),
                best(&pp, ProfilePoint::bobkov_goetze),
                best(&pm, ProfilePoint::bobkov_goetze),
            ]
        })
        .collect();
    Ok(std::array::from_fn(|k| {
        Supremum::from_levels(per_level.iter().map(|l| l[k]), &grid.divergence)
    }))
}

fn best(points: &[ProfilePoint], f: fn(&ProfilePoint) -> f64) -> (f64, Option<f64>) {
    let mut out = (0.0, None);
    for p in points {
        let v = f(p);
        if v > out.0 || (out.1.is_none() && v >= out.0) {
            out = (v, Some(p.x));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mu1_profile_is_closed_form() {
        let mu = Distribution1D::two_sided_exponential();
        let nodes = [0.5, 1.0, 3.0, 10.0];
        for p in hardy_profile(&mu, Side::Plus, &nodes) {
            // ½e^{−x} · 2(e^x − 1)
            let a = 1.0 - (-p.x).exp();
            assert!((p.muckenhoupt() - a).abs() < 1e-12, "{}", p.x);
        }
        let minus = hardy_profile(&mu, Side::Minus, &[-2.0]);
        assert!((minus[0].muckenhoupt() - (1.0 - (-2f64).exp())).abs() < 1e-12);
    }

    #[test]
    fn vanishing_density_makes_the_integral_infinite() {
        let mu = Distribution1D::pushforward(
            Distribution1D::two_sided_exponential(),
            crate::transport::MonotoneMap::CeilSqrt,
        )
        .unwrap();
        let p = hardy_profile(&mu, Side::Plus, &[0.5, 1.5]);
        assert_eq!(p[1].ln_inverse_density, f64::INFINITY);
        assert_eq!(p[1].muckenhoupt(), f64::INFINITY);
    }
}
