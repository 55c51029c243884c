//! Explicit constants linking the equivalent formulations of a
//! transport-entropy inequality.
//!
//! For a cost `β` vanishing on `[0, h]` the four statements are: the
//! transport inequality with scale `a`; the tail bound `K±(b) ≤ K`; the
//! exponential tail estimate with constant `c`; the contraction property
//! of the map from `μ₁` with constant `d`. For quadratic-near-zero costs
//! `α`, the Poincaré constant `λ` enters through `K(c)` and the constants
//! `κ₁, κ₂` sandwich `a_opt` between multiples of `min(d_opt, √λ_opt)`.
//!
//! Everything here is plain arithmetic on the inputs; the only iterative
//! step is the bisection in [`solve_co`].

use serde::{Deserialize, Serialize};

use crate::costfn::CostFunction;
use crate::error::{Error, Result};
use crate::quad::bisect_boundary;

/// `√2 e^{−√5} / 4`.
pub fn kappa() -> f64 {
    std::f64::consts::SQRT_2 * (-(5f64.sqrt())).exp() / 4.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainStep {
    pub name: String,
    /// The formula producing `value` from earlier steps and inputs.
    pub formula: String,
    pub value: f64,
}

/// Inputs and step-by-step outputs of a constant chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainRecord {
    pub chain: String,
    pub inputs: Vec<(String, f64)>,
    pub steps: Vec<ChainStep>,
}

impl ChainRecord {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.steps
            .iter()
            .find(|s| s.name == name)
            .map(|s| s.value)
            .or_else(|| self.inputs.iter().find(|(n, _)| n == name).map(|(_, v)| *v))
    }

    fn push(&mut self, name: &str, formula: &str, value: f64) -> f64 {
        self.steps.push(ChainStep {
            name: name.into(),
            formula: formula.into(),
            value,
        });
        value
    }
}

fn threshold(beta: &CostFunction) -> Result<f64> {
    let h = beta.zero_threshold();
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Domain("cost must vanish exactly on some [0, h] with h > 0".into()));
    }
    Ok(h)
}

/// One full turn of the cycle transport inequality ⇒ tail bound ⇒
/// exponential tail estimate ⇒ contraction ⇒ transport inequality, starting
/// from scale `a`. Every step is linear, so `ratio = a′/a` does not depend
/// on `a`.
pub fn equivalence_chain(beta: &CostFunction, a: f64) -> Result<ChainRecord> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::Domain(format!("a = {a} must be positive")));
    }
    let h = threshold(beta)?;
    let mut r = ChainRecord {
        chain: "transport -> tail bound -> exponential tails -> contraction -> transport".into(),
        inputs: vec![("a".into(), a), ("h".into(), h)],
        steps: Vec::new(),
    };
    let b = r.push("b", "b = a/2", a / 2.0);
    let big_k = r.push("K", "K = 3", 3.0);
    let k = r.push("k", "k = log K", big_k.ln());
    let c = r.push("c", "c = b*h/(4*beta_inv(k))", b * h / (4.0 * beta.inverse(k)?));
    let d = r.push("d", "d = c", c);
    let a2 = r.push("a_prime", "a' = d*h/(9*beta_inv(2))", d * h / (9.0 * beta.inverse(2.0)?));
    r.push("ratio", "a'/a", a2 / a);
    Ok(r)
}

/// Bracket of `a_opt` in terms of `d_opt`:
/// `d_opt·h/(9β⁻¹(2)) ≤ a_opt ≤ d_opt·8β⁻¹(log 3)/h`.
pub fn a_opt_bracket(beta: &CostFunction, d_opt: f64) -> Result<(f64, f64)> {
    if !(d_opt > 0.0 && d_opt.is_finite()) {
        return Err(Error::Domain(format!("d_opt = {d_opt} must be positive")));
    }
    let h = threshold(beta)?;
    Ok((
        d_opt * h / (9.0 * beta.inverse(2.0)?),
        d_opt * 8.0 * beta.inverse(3f64.ln())? / h,
    ))
}

/// `K(c) = (1/(2λ)) ((2√λ + c)/(2√λ − c))² e^{c√(5/λ)}` on `c ∈ [0, 2√λ)`.
///
/// The ratio is read as `(2√λ + c)/(2√λ − c)`; the alternative reading
/// `2√(λ+c)/(2√(λ−c))` would put the pole at `c = λ` instead of `2√λ`.
pub fn k_of_c(lambda: f64, c: f64) -> Result<f64> {
    check_lambda(lambda)?;
    let s = 2.0 * lambda.sqrt();
    if !(c >= 0.0 && c < s) {
        return Err(Error::Domain(format!("c = {c} outside [0, {s})")));
    }
    let ratio = (s + c) / (s - c);
    Ok(ratio * ratio * (c * (5.0 / lambda).sqrt()).exp() / (2.0 * lambda))
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Domain(format!("lambda = {lambda} must be positive")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoincareConstants {
    pub k_of_c: f64,
    /// `1/(2√K(c))`.
    pub a: f64,
    /// `c√K(c)`.
    pub h: f64,
}

/// From a Poincaré constant `λ` and `c ∈ [0, 2√λ)` to the scale `a` and
/// threshold `h` of a transport inequality with a quadratic-then-linear
/// cost.
pub fn poincare_constants(lambda: f64, c: f64) -> Result<PoincareConstants> {
    let k = k_of_c(lambda, c)?;
    Ok(PoincareConstants {
        k_of_c: k,
        a: 1.0 / (2.0 * k.sqrt()),
        h: c * k.sqrt(),
    })
}

/// Converse step: a transport inequality at scale `a` gives `λ = 2a²`.
pub fn lambda_from_a(a: f64) -> f64 {
    2.0 * a * a
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoSolution {
    pub c_o: f64,
    /// `c_o √K(c_o) − h`.
    pub residual: f64,
    /// `c_o / (2h)`.
    pub a1: f64,
    /// `√λ κ / (1 + κh)`.
    pub a1_lower_bound: f64,
    pub bound_holds: bool,
}

/// The `c_o ∈ (0, 2√λ)` with `c_o √K(c_o) = h`, found by bisection
/// (`c ↦ c√K(c)` is increasing from 0 to `∞`).
pub fn solve_co(lambda: f64, h: f64) -> Result<CoSolution> {
    check_lambda(lambda)?;
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Domain(format!("h = {h} must be positive")));
    }
    let top = 2.0 * lambda.sqrt();
    let f = |c: f64| c * k_of_c(lambda, c).map(f64::sqrt).unwrap_or(f64::INFINITY);
    let lo = bisect_boundary(|c| f(c) <= h, 0.0, top);
    // the boundary lies in [lo, next float]; keep the closer end
    let hi = f64::from_bits(lo.to_bits() + 1).min(top);
    let c_o = if hi < top && (f(hi) - h).abs() < (f(lo) - h).abs() { hi } else { lo };
    let kap = kappa();
    let a1 = c_o / (2.0 * h);
    let a1_lower_bound = lambda.sqrt() * kap / (1.0 + kap * h);
    Ok(CoSolution {
        c_o,
        residual: f(c_o) - h,
        a1,
        a1_lower_bound,
        bound_holds: a1 >= a1_lower_bound,
    })
}

/// `(κ₁, κ₂)` with `κ₁ = ½ min(κ/(1+κh), h²/(9(h²+1)))` and
/// `κ₂ = (4/h²)(2h² + log 3)`.
pub fn kappas(h: f64) -> Result<(f64, f64)> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Domain(format!("h = {h} must be positive")));
    }
    let kap = kappa();
    let k1 = 0.5 * (kap / (1.0 + kap * h)).min(h * h / (9.0 * (h * h + 1.0)));
    let k2 = 4.0 / (h * h) * (2.0 * h * h + 3f64.ln());
    Ok((k1, k2))
}

/// Upper bracket `min(d, √λ) · max(1/√2, 8α⁻¹(h² + log 3)/h)` for `a_opt`,
/// for a cost `α` equal to `t²` on `[0, h]`.
pub fn a_opt_upper(alpha: &CostFunction, h: f64, d_opt: f64, lambda_opt: f64) -> Result<f64> {
    let m = d_opt.min(lambda_opt.sqrt());
    Ok(m * std::f64::consts::FRAC_1_SQRT_2.max(8.0 * alpha.inverse(h * h + 3f64.ln())? / h))
}

/// Lower bracket `½ min(d, √λ) · min(κ/(1+κh), h/(9α⁻¹(h² + 2)))`.
pub fn a_opt_lower(alpha: &CostFunction, h: f64, d_opt: f64, lambda_opt: f64) -> Result<f64> {
    let m = d_opt.min(lambda_opt.sqrt());
    let kap = kappa();
    Ok(0.5 * m * (kap / (1.0 + kap * h)).min(h / (9.0 * alpha.inverse(h * h + 2.0)?)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const KAPPA: f64 = 0.037_787_052_996_805_24;

    #[test]
    fn kappa_value() {
        assert!((kappa() - KAPPA).abs() < 1e-16);
    }

    #[test]
    fn chain_for_beta2() {
        let r = equivalence_chain(&CostFunction::beta2(), 1.0).unwrap();
        let sq = (3f64.ln()).sqrt();
        assert_eq!(r.get("b"), Some(0.5));
        assert!((r.get("k").unwrap() - 3f64.ln()).abs() < 1e-15);
        let c = 1.0 / (8.0 * (1.0 + sq));
        assert!((r.get("c").unwrap() - c).abs() < 1e-12);
        assert_eq!(r.get("d"), r.get("c"));
        let a2 = c / (9.0 * (1.0 + 2f64.sqrt()));
        assert!((r.get("a_prime").unwrap() - a2).abs() < 1e-12);
        let r5 = equivalence_chain(&CostFunction::beta2(), 5.0).unwrap();
        assert!((r5.get("ratio").unwrap() - r.get("ratio").unwrap()).abs() < 1e-15);
    }

    #[test]
    fn bracket_for_beta2() {
        let (lo, hi) = a_opt_bracket(&CostFunction::beta2(), 1.0).unwrap();
        assert!((lo - 0.046_023_729_152_566_12).abs() < 1e-12);
        assert!((hi - 16.385_176_591_745_64).abs() < 1e-12);
        let (lo2, hi2) = a_opt_bracket(&CostFunction::beta2(), 2.0).unwrap();
        assert!((lo2 - 2.0 * lo).abs() < 1e-15 && (hi2 - 2.0 * hi).abs() < 1e-12);
    }

    #[test]
    fn poincare_constants_at_zero() {
        let p = poincare_constants(1.0, 0.0).unwrap();
        assert_eq!(p.k_of_c, 0.5);
        assert!((p.a - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert_eq!(p.h, 0.0);
        assert_eq!(lambda_from_a(1.0), 2.0);
        assert!(poincare_constants(1.0, 2.0).is_err());
        let near = poincare_constants(1.0, 2.0 - 1e-9).unwrap();
        assert!(near.k_of_c > 1e15 && near.a < 1e-7);
    }

    #[test]
    fn kappas_at_one() {
        let (k1, k2) = kappas(1.0).unwrap();
        assert!((k1 - 0.018_205_590_871_310_264).abs() < 1e-15);
        assert!((k2 - 12.394_449_154_672_44).abs() < 1e-12);
    }

    #[test]
    fn brackets_dominated_by_kappas_for_alpha1() {
        for &h in &[0.1, 1.0, 3.0] {
            let alpha = CostFunction::alpha1(h);
            let (k1, k2) = kappas(h).unwrap();
            for &(d, l) in &[(1.0, 1.0), (0.3, 4.0), (2.0, 0.01)] {
                let m = f64::min(d, f64::sqrt(l));
                assert!(a_opt_lower(&alpha, h, d, l).unwrap() >= k1 * m * (1.0 - 1e-12));
                assert!(a_opt_upper(&alpha, h, d, l).unwrap() <= k2 * m * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn co_solution_examples() {
        let s = solve_co(1.0, 1.0).unwrap();
        assert!(s.residual.abs() <= 1e-10);
        assert!(s.bound_holds);
        assert!(s.a1 >= KAPPA / (1.0 + KAPPA));
        assert!(solve_co(1.0, 0.5).unwrap().c_o < s.c_o);
    }

    proptest! {
        #[test]
        fn chain_is_linear(a in 1e-3..1e3f64) {
            let r = equivalence_chain(&CostFunction::beta2(), a).unwrap();
            let r1 = equivalence_chain(&CostFunction::beta2(), 1.0).unwrap();
            prop_assert!((r.get("a_prime").unwrap() - a * r1.get("a_prime").unwrap()).abs() <= 1e-12 * a);
        }

        #[test]
        fn kappa_sandwich_is_non_vacuous(e in -3.0..3.0f64) {
            let (k1, k2) = kappas(10f64.powf(e)).unwrap();
            prop_assert!(k1 < k2);
        }

        #[test]
        fn co_residual_small(l in 0.05..20.0f64, h in 0.05..20.0f64) {
            let s = solve_co(l, h).unwrap();
            prop_assert!(s.residual.abs() <= 1e-10 * h.max(1.0), "{}", s.residual);
        }
    }
}
