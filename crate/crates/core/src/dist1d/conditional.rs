use serde::{Deserialize, Serialize};

use super::{ln_one_minus_exp, Distribution1D};
use crate::error::{Error, Result};
use crate::quad::{dyadic_levels, summarize_levels, DivergenceRule, TailIntegral};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Plus,
    Minus,
}

/// Law of `X − x` given `X > x` (`Plus`) or of `x − X` given `X < x`
/// (`Minus`), as a measure on `[0, ∞)`.
#[derive(Debug, Clone, Copy)]
pub struct ConditionalTail<'a> {
    parent: &'a Distribution1D,
    side: Side,
    anchor: f64,
    ln_mass: f64,
}

impl<'a> ConditionalTail<'a> {
    pub fn new(parent: &'a Distribution1D, anchor: f64, side: Side) -> Result<Self> {
        let s = parent.split(anchor);
        let ln_mass = match side {
            Side::Plus => s.right,
            Side::Minus => s.left,
        };
        if ln_mass == f64::NEG_INFINITY {
            return Err(Error::Domain(format!("conditioning set on side {side:?} of {anchor} has zero mass")));
        }
        Ok(Self {
            parent,
            side,
            anchor,
            ln_mass,
        })
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn anchor(&self) -> f64 {
        self.anchor
    }

    /// `ln μ(x, ∞)` or `ln μ(−∞, x)`.
    pub fn ln_conditioning_mass(&self) -> f64 {
        self.ln_mass
    }

    /// `ln P(Y > u)`.
    pub fn ln_sf(&self, u: f64) -> f64 {
        if u < 0.0 {
            return 0.0;
        }
        let v = match self.side {
            Side::Plus => self.parent.split(self.anchor + u).right,
            Side::Minus => self.parent.split(self.anchor - u).left,
        };
        (v - self.ln_mass).min(0.0)
    }

    pub fn sf(&self, u: f64) -> f64 {
        self.ln_sf(u).exp()
    }

    pub fn cdf(&self, u: f64) -> f64 {
        -self.ln_sf(u).exp_m1()
    }

    pub fn ln_cdf(&self, u: f64) -> f64 {
        ln_one_minus_exp(self.ln_sf(u))
    }

    /// `inf{u ≥ 0 : P(Y > u) ≤ e^{ln_s}}`.
    pub fn quantile_upper_ln(&self, ln_s: f64) -> f64 {
        let level = ln_s + self.ln_mass;
        let u = match self.side {
            Side::Plus => self.parent.quantile_upper_ln(level) - self.anchor,
            Side::Minus => self.anchor - self.parent.quantile_lower_ln(level),
        };
        u.max(0.0)
    }

    /// Generalized inverse of the conditional CDF, `u ∈ (0, 1)`.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::Domain(format!("quantile level {u} outside (0, 1)")));
        }
        Ok(self.quantile_upper_ln((1.0 - u).ln()))
    }

    /// `∫₀¹ g(Q(s)) ds`, where `Q(s)` is the level-`s` upper quantile;
    /// dyadic in `s` toward 0, where the conditional law has its tail.
    pub fn expect<G: Fn(f64) -> f64>(&self, g: G, depth: usize, rule: &DivergenceRule) -> TailIntegral {
        self.expect_with_breaks(g, &[], depth, rule)
    }

    /// As [`expect`](Self::expect), with panels also split where `g` has
    /// kinks (`u_breaks`, in the conditional variable) and where the
    /// conditional quantile jumps or kinks.
    pub fn expect_with_breaks<G: Fn(f64) -> f64>(
        &self,
        g: G,
        u_breaks: &[f64],
        depth: usize,
        rule: &DivergenceRule,
    ) -> TailIntegral {
        let mut breaks: Vec<f64> = u_breaks.iter().filter(|u| **u > 0.0).map(|&u| self.sf(u)).collect();
        for (u, s) in self.parent.quantile_breaks() {
            let level = match self.side {
                Side::Plus => s.ln(),
                Side::Minus => u.ln(),
            } - self.ln_mass;
            if level < 0.0 {
                breaks.push(level.exp());
            }
        }
        breaks.retain(|s| *s > 0.0 && *s < 1.0);
        breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        breaks.dedup();
        let f = |s: f64| g(self.quantile_upper_ln(s.ln()));
        let (levels, panels) = dyadic_levels(&f, 1.0, &breaks, depth);
        summarize_levels(&levels, panels, rule)
    }

    pub fn mean(&self, depth: usize) -> TailIntegral {
        self.expect(|u| u, depth, &DivergenceRule::default())
    }
}
