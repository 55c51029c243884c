use super::MonotoneMap;
use crate::dist1d::{ln_sub_exp, Distribution1D};
use crate::error::{Error, Result};
use crate::quad::ln_add_exp;

/// `T = F_ν⁻¹ ∘ F_μ` for an atomless source.
pub fn transport_map(mu: &Distribution1D, nu: &Distribution1D) -> Result<MonotoneMap> {
    if mu.has_atoms() {
        return Err(Error::Precondition(
            "source measure has atoms; use hoeffding_map for the randomized coupling".into(),
        ));
    }
    Ok(MonotoneMap::QuantileComposition {
        source: Box::new(mu.clone()),
        target: Box::new(nu.clone()),
    })
}

/// `S(x, u) = F_ν⁻¹(μ(−∞, x) + μ({x})·u)`, with `u` clamped to `[0, 1]`.
pub fn hoeffding_map(mu: &Distribution1D, nu: &Distribution1D, x: f64, u: f64) -> f64 {
    HoeffdingCoupling::new(mu, nu).map(x, u)
}

/// The coupling with joint CDF `min(F_μ(x), F_ν(y))`.
#[derive(Debug, Clone, Copy)]
pub struct HoeffdingCoupling<'a> {
    source: &'a Distribution1D,
    target: &'a Distribution1D,
}

impl<'a> HoeffdingCoupling<'a> {
    pub fn new(source: &'a Distribution1D, target: &'a Distribution1D) -> Self {
        Self { source, target }
    }

    pub fn map(&self, x: f64, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        let s = self.source.split(x);
        let ln_u = if u == 0.0 { f64::NEG_INFINITY } else { u.ln() };
        let level = ln_add_exp(s.left, s.atom + ln_u);
        if level <= -std::f64::consts::LN_2 {
            self.target.quantile_lower_ext(level.exp())
        } else {
            // complementary level μ(x, ∞) + μ({x})(1 − u), kept accurate near 1
            let rest = if u == 1.0 { f64::NEG_INFINITY } else { (1.0 - u).ln() };
            let comp = ln_add_exp(s.right, s.atom + rest);
            self.target.quantile_upper_ext(comp.exp())
        }
    }

    /// `min(F_μ(x), F_ν(y))` for extended reals `x, y`.
    pub fn joint_cdf(&self, x: f64, y: f64) -> f64 {
        let fx = if x == f64::INFINITY { 1.0 } else { self.source.cdf(x) };
        let fy = if y == f64::INFINITY { 1.0 } else { self.target.cdf(y) };
        fx.min(fy)
    }

    /// Coupling mass of the rectangle `(a₁, b₁] × (a₂, b₂]`.
    pub fn rectangle_mass(&self, a1: f64, b1: f64, a2: f64, b2: f64) -> f64 {
        let h = |x, y| self.joint_cdf(x, y);
        (h(b1, b2) - h(a1, b2) - h(b1, a2) + h(a1, a2)).max(0.0)
    }

    /// Log-mass of the source atom at `x`; used by callers that split an
    /// atom across several target values.
    pub fn source_atom_ln(&self, x: f64) -> f64 {
        let s = self.source.split(x);
        ln_sub_exp(s.left_closed(), s.left)
    }
}
