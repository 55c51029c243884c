//! One-dimensional probability measures.
//!
//! Every measure answers the same questions: the log-masses of
//! `(−∞, x)`, `{x}` and `(x, ∞)` (see [`Split`]), the two halves of the
//! generalized-inverse quantile, and the log-density of its absolutely
//! continuous part. Working with log-masses keeps tail queries such as
//! `μ[n, ∞) = ½e^{−n²}` exact far past the underflow point of plain
//! probabilities.

mod atoms;
mod conditional;
mod entropy;
mod gridded;
pub mod special;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

pub use atoms::AtomList;
pub use conditional::{ConditionalTail, Side};
pub use entropy::relative_entropy;
pub use gridded::{GriddedDensity, GriddedSource, TailDescriptor};

use crate::error::{Error, Result};
use crate::quad::{bisect_boundary, bracket_boundary, dyadic_levels, ln_add_exp, summarize_two_sided, DivergenceRule, TailIntegral};
use crate::transport::MonotoneMap;
use special::{ln_gamma_q, ln_norm_sf, norm_isf};

const LN_2: f64 = std::f64::consts::LN_2;
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DistKind {
    /// Density `e^{−|x|}/2`.
    TwoSidedExponential,
    Gaussian { mean: f64, sd: f64 },
    Cauchy { loc: f64, scale: f64 },
    /// Density `|x|^r e^{−|x|} / (2Γ(r+1))`.
    PowerExponential { r: f64 },
    Gridded(GriddedDensity),
    Atoms { atoms: AtomList },
    Pushforward { base: Box<Distribution1D>, map: MonotoneMap },
}

/// Log-masses of `(−∞, x)`, `{x}` and `(x, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Split {
    pub left: f64,
    pub atom: f64,
    pub right: f64,
}

impl Split {
    fn continuous(left: f64, right: f64) -> Self {
        Split {
            left,
            atom: f64::NEG_INFINITY,
            right,
        }
    }

    /// `ln μ(−∞, x]`.
    pub fn left_closed(&self) -> f64 {
        ln_add_exp(self.left, self.atom)
    }

    /// `ln μ[x, ∞)`.
    pub fn right_closed(&self) -> f64 {
        ln_add_exp(self.right, self.atom)
    }
}

/// `ln(e^a − e^b)`, `−∞` when `b ≥ a`.
pub(crate) fn ln_sub_exp(a: f64, b: f64) -> f64 {
    if !(b < a) {
        return f64::NEG_INFINITY;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    a + (-(b - a).exp_m1()).ln()
}

/// `ln(1 − e^a)` for `a ≤ 0`.
pub(crate) fn ln_one_minus_exp(a: f64) -> f64 {
    if a > -LN_2 {
        (-a.exp_m1()).ln()
    } else {
        (-a.exp()).ln_1p()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DistKind", into = "DistKind")]
pub struct Distribution1D {
    kind: DistKind,
    median: f64,
    support: (f64, f64),
}

impl TryFrom<DistKind> for Distribution1D {
    type Error = Error;

    fn try_from(kind: DistKind) -> Result<Self> {
        Distribution1D::new(kind)
    }
}

impl From<Distribution1D> for DistKind {
    fn from(d: Distribution1D) -> Self {
        d.kind
    }
}

impl Distribution1D {
    pub fn new(kind: DistKind) -> Result<Self> {
        match &kind {
            DistKind::Gaussian { mean, sd } => {
                if !(mean.is_finite() && sd.is_finite() && *sd > 0.0) {
                    return Err(Error::Construction(format!("gaussian needs finite mean and sd > 0, got ({mean}, {sd})")));
                }
            }
            DistKind::Cauchy { loc, scale } => {
                if !(loc.is_finite() && scale.is_finite() && *scale > 0.0) {
                    return Err(Error::Construction(format!("cauchy needs finite loc and scale > 0, got ({loc}, {scale})")));
                }
            }
            DistKind::PowerExponential { r } => {
                if !(r.is_finite() && *r >= 0.0) {
                    return Err(Error::Construction(format!("power-exponential needs r >= 0, got {r}")));
                }
            }
            DistKind::Pushforward { map, .. } => map.validate()?,
            _ => {}
        }
        let mut d = Distribution1D {
            kind,
            median: 0.0,
            support: (f64::NEG_INFINITY, f64::INFINITY),
        };
        d.support = d.compute_support();
        d.median = d.quantile_lower(0.5);
        Ok(d)
    }

    /// `μ₁(dx) = e^{−|x|} dx / 2`.
    pub fn two_sided_exponential() -> Self {
        Self::new(DistKind::TwoSidedExponential).expect("valid")
    }

    pub fn gaussian(mean: f64, sd: f64) -> Result<Self> {
        Self::new(DistKind::Gaussian { mean, sd })
    }

    pub fn cauchy(loc: f64, scale: f64) -> Result<Self> {
        Self::new(DistKind::Cauchy { loc, scale })
    }

    pub fn power_exponential(r: f64) -> Result<Self> {
        Self::new(DistKind::PowerExponential { r })
    }

    pub fn gridded(g: GriddedDensity) -> Self {
        Self::new(DistKind::Gridded(g)).expect("gridded densities are validated on construction")
    }

    pub fn atoms(points: Vec<(f64, f64)>) -> Result<Self> {
        Self::new(DistKind::Atoms {
            atoms: AtomList::new(points)?,
        })
    }

    pub fn pushforward(base: Distribution1D, map: MonotoneMap) -> Result<Self> {
        Self::new(DistKind::Pushforward {
            base: Box::new(base),
            map,
        })
    }

    pub fn kind(&self) -> &DistKind {
        &self.kind
    }

    /// `m = F⁻¹(1/2)`.
    pub fn median(&self) -> f64 {
        self.median
    }

    /// `(s_μ, t_μ)`: infimum and supremum of the support.
    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    fn compute_support(&self) -> (f64, f64) {
        match &self.kind {
            DistKind::Gridded(g) => g.support(),
            DistKind::Atoms { atoms } => atoms.support(),
            DistKind::Pushforward { base, map } => {
                let (a, b) = base.support();
                let lo = if a == f64::NEG_INFINITY { map.eval(-1e300) } else { map.eval(a) };
                let hi = if b == f64::INFINITY { map.eval(1e300) } else { map.eval(b) };
                let lo = if lo <= -1e150 { f64::NEG_INFINITY } else { lo };
                let hi = if hi >= 1e150 { f64::INFINITY } else { hi };
                (lo, hi)
            }
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    /// Log-masses of `(−∞, x)`, `{x}`, `(x, ∞)`.
    pub fn split(&self, x: f64) -> Split {
        match &self.kind {
            DistKind::TwoSidedExponential => {
                if x >= 0.0 {
                    let r = -x - LN_2;
                    Split::continuous((-r.exp()).ln_1p(), r)
                } else {
                    let l = x - LN_2;
                    Split::continuous(l, (-l.exp()).ln_1p())
                }
            }
            DistKind::Gaussian { mean, sd } => {
                let z = (x - mean) / sd;
                Split::continuous(ln_norm_sf(-z), ln_norm_sf(z))
            }
            DistKind::Cauchy { loc, scale } => {
                let z = (x - loc) / scale;
                let pi = std::f64::consts::PI;
                let upper = |z: f64| {
                    if z > 0.0 {
                        ((1.0 / z).atan() / pi).ln()
                    } else {
                        (0.5 + (-z).atan() / pi).ln()
                    }
                };
                Split::continuous(upper(-z), upper(z))
            }
            DistKind::PowerExponential { r } => {
                let tail = |z: f64| ln_gamma_q(r + 1.0, z) - LN_2;
                if x >= 0.0 {
                    let t = tail(x);
                    Split::continuous((-t.exp()).ln_1p(), t)
                } else {
                    let t = tail(-x);
                    Split::continuous(t, (-t.exp()).ln_1p())
                }
            }
            DistKind::Gridded(g) => Split::continuous(g.ln_cdf(x), g.ln_sf(x)),
            DistKind::Atoms { atoms } => atoms.split(x),
            DistKind::Pushforward { base, map } => {
                let (lo, hi) = map.preimage(x);
                let (right, left_closed) = if hi == f64::INFINITY {
                    (f64::NEG_INFINITY, 0.0)
                } else if hi == f64::NEG_INFINITY {
                    (0.0, f64::NEG_INFINITY)
                } else {
                    let s = base.split(hi);
                    (s.right, s.left_closed())
                };
                let (left, right_closed) = if lo == f64::NEG_INFINITY {
                    (f64::NEG_INFINITY, 0.0)
                } else if lo == f64::INFINITY {
                    (0.0, f64::NEG_INFINITY)
                } else {
                    let s = base.split(lo);
                    if map.eval(lo) >= x {
                        (s.left, s.right_closed())
                    } else {
                        (s.left_closed(), s.right)
                    }
                };
                let atom = if right_closed < -LN_2 {
                    ln_sub_exp(right_closed, right)
                } else {
                    ln_sub_exp(left_closed, left)
                };
                Split { left, atom, right }
            }
        }
    }

    /// `F(x) = μ(−∞, x]`.
    pub fn cdf(&self, x: f64) -> f64 {
        self.split(x).left_closed().exp()
    }

    /// `μ(−∞, x)`.
    pub fn cdf_open(&self, x: f64) -> f64 {
        self.split(x).left.exp()
    }

    /// `μ(x, ∞)`.
    pub fn sf(&self, x: f64) -> f64 {
        self.split(x).right.exp()
    }

    /// `μ[x, ∞)`.
    pub fn sf_closed(&self, x: f64) -> f64 {
        self.split(x).right_closed().exp()
    }

    pub fn atom_mass(&self, x: f64) -> f64 {
        self.split(x).atom.exp()
    }

    pub fn ln_cdf(&self, x: f64) -> f64 {
        self.split(x).left_closed()
    }

    pub fn ln_sf(&self, x: f64) -> f64 {
        self.split(x).right
    }

    /// `F⁻¹(u) = inf{x : F(x) ≥ u}` for `u ∈ (0, 1)`.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::Domain(format!("quantile level {u} outside (0, 1)")));
        }
        Ok(if u <= 0.5 {
            self.quantile_lower(u)
        } else {
            self.quantile_upper(1.0 - u)
        })
    }

    /// `F⁻¹(u)` evaluated from the left end; accurate for small `u`.
    pub fn quantile_lower(&self, u: f64) -> f64 {
        match &self.kind {
            DistKind::TwoSidedExponential => {
                if u <= 0.5 {
                    (2.0 * u).ln()
                } else {
                    -(2.0 * (1.0 - u)).ln()
                }
            }
            DistKind::Gaussian { mean, sd } => mean - sd * norm_isf(u),
            DistKind::Cauchy { loc, scale } => {
                let pi = std::f64::consts::PI;
                if u <= 0.5 {
                    loc - scale / (pi * u).tan()
                } else {
                    loc + scale / (pi * (1.0 - u)).tan()
                }
            }
            DistKind::PowerExponential { .. } => -self.quantile_upper(u),
            DistKind::Gridded(g) => g.quantile_lower(u),
            DistKind::Atoms { atoms } => atoms.quantile_lower(u),
            DistKind::Pushforward { base, map } => map.eval(base.quantile_lower(u)),
        }
    }

    /// `F⁻¹(1 − s) = inf{x : μ(x, ∞) ≤ s}`; accurate for small `s`.
    pub fn quantile_upper(&self, s: f64) -> f64 {
        match &self.kind {
            DistKind::TwoSidedExponential => {
                if s <= 0.5 {
                    -(2.0 * s).ln()
                } else {
                    (2.0 * (1.0 - s)).ln()
                }
            }
            DistKind::Gaussian { mean, sd } => mean + sd * norm_isf(s),
            DistKind::Cauchy { loc, scale } => {
                let pi = std::f64::consts::PI;
                if s <= 0.5 {
                    loc + scale / (pi * s).tan()
                } else {
                    loc - scale / (pi * (1.0 - s)).tan()
                }
            }
            DistKind::PowerExponential { .. } => {
                if s > 0.5 {
                    return -self.quantile_upper(1.0 - s);
                }
                if s == 0.5 {
                    return 0.0;
                }
                self.numeric_upper(s.ln(), 0.0)
            }
            DistKind::Gridded(g) => g.quantile_upper(s),
            DistKind::Atoms { atoms } => atoms.quantile_upper(s),
            DistKind::Pushforward { base, map } => map.eval(base.quantile_upper(s)),
        }
    }

    /// `inf{x : ln μ(x, ∞) ≤ ln_s}` by bisection on the log tail.
    fn numeric_upper(&self, ln_s: f64, start: f64) -> f64 {
        let pred = |x: f64| self.split(x).right > ln_s;
        match bracket_boundary(&pred, start) {
            Some((a, b)) => bisect_boundary(pred, a, b),
            None if pred(start) => f64::INFINITY,
            None => f64::NEG_INFINITY,
        }
    }

    /// `sup{x : ln μ(−∞, x) ≤ ln_u}` by bisection on the log tail.
    fn numeric_lower(&self, ln_u: f64, start: f64) -> f64 {
        let pred = |x: f64| self.split(x).left < ln_u;
        match bracket_boundary(&pred, start) {
            Some((a, b)) => bisect_boundary(pred, a, b),
            None if pred(start) => f64::INFINITY,
            None => f64::NEG_INFINITY,
        }
    }

    /// [`Self::quantile_upper`] for a level given by its logarithm, valid
    /// below the smallest positive double.
    pub fn quantile_upper_ln(&self, ln_s: f64) -> f64 {
        if ln_s > -700.0 {
            return self.quantile_upper(ln_s.exp());
        }
        match &self.kind {
            DistKind::TwoSidedExponential => -LN_2 - ln_s,
            DistKind::Pushforward { base, map } => map.eval(base.quantile_upper_ln(ln_s)),
            DistKind::Cauchy { loc, scale } => loc + scale * (-ln_s - std::f64::consts::PI.ln()).exp(),
            DistKind::Atoms { .. } => self.quantile_upper(0.0f64.max(ln_s.exp())),
            _ => self.numeric_upper(ln_s, self.median),
        }
    }

    /// [`Self::quantile_lower`] for a level given by its logarithm.
    pub fn quantile_lower_ln(&self, ln_u: f64) -> f64 {
        if ln_u > -700.0 {
            return self.quantile_lower(ln_u.exp());
        }
        match &self.kind {
            DistKind::TwoSidedExponential => LN_2 + ln_u,
            DistKind::Pushforward { base, map } => map.eval(base.quantile_lower_ln(ln_u)),
            DistKind::Cauchy { loc, scale } => loc - scale * (-ln_u - std::f64::consts::PI.ln()).exp(),
            DistKind::Atoms { .. } => self.quantile_lower(ln_u.exp()),
            _ => self.numeric_lower(ln_u, self.median),
        }
    }

    /// Quantile on the closed interval `[0, 1]`: `F⁻¹(0) = −∞`, `F⁻¹(1) = t_μ`.
    pub fn quantile_lower_ext(&self, u: f64) -> f64 {
        if u <= 0.0 {
            f64::NEG_INFINITY
        } else if u >= 1.0 {
            self.support.1
        } else {
            self.quantile_lower(u)
        }
    }

    pub fn quantile_upper_ext(&self, s: f64) -> f64 {
        if s <= 0.0 {
            self.support.1
        } else if s >= 1.0 {
            f64::NEG_INFINITY
        } else {
            self.quantile_upper(s)
        }
    }

    /// Log-density of the absolutely continuous part.
    pub fn ln_density(&self, x: f64) -> f64 {
        match &self.kind {
            DistKind::TwoSidedExponential => -x.abs() - LN_2,
            DistKind::Gaussian { mean, sd } => {
                let z = (x - mean) / sd;
                -0.5 * z * z - sd.ln() - LN_SQRT_2PI
            }
            DistKind::Cauchy { loc, scale } => {
                let z = (x - loc) / scale;
                -(std::f64::consts::PI * scale).ln() - (z * z).ln_1p()
            }
            DistKind::PowerExponential { r } => {
                let z = x.abs();
                if *r == 0.0 {
                    -z - LN_2
                } else {
                    r * z.ln() - z - LN_2 - ln_gamma(r + 1.0)
                }
            }
            DistKind::Gridded(g) => g.ln_density(x),
            DistKind::Atoms { .. } => f64::NEG_INFINITY,
            DistKind::Pushforward { base, map } => {
                let (lo, hi) = map.preimage(x);
                if !lo.is_finite() || !hi.is_finite() {
                    return f64::NEG_INFINITY;
                }
                let d = map.left_derivative(lo);
                // y outside the range of T (inside a jump) carries no density
                if !(d > 0.0) || map.eval(lo) < x - 1e-8 * (1.0 + x.abs()) {
                    return f64::NEG_INFINITY;
                }
                base.ln_density(lo) - d.ln()
            }
        }
    }

    pub fn density(&self, x: f64) -> f64 {
        self.ln_density(x).exp()
    }

    /// Points of `[lo, hi]` where the density may fail to be smooth.
    pub fn density_breakpoints(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut out = match &self.kind {
            DistKind::TwoSidedExponential | DistKind::PowerExponential { .. } => vec![0.0],
            DistKind::Gaussian { .. } | DistKind::Cauchy { .. } => Vec::new(),
            DistKind::Gridded(g) => g.breakpoints(lo, hi),
            DistKind::Atoms { atoms } => atoms.locations().to_vec(),
            DistKind::Pushforward { base, map } => {
                let a = map.preimage(lo).0.max(-1e12);
                let b = map.preimage(hi).1.min(1e12);
                if a > b {
                    Vec::new()
                } else {
                    let mut pts = map.breakpoints(a, b);
                    pts.extend(base.density_breakpoints(a, b));
                    pts.into_iter().map(|x| map.eval(x)).collect()
                }
            }
        };
        out.retain(|v| v.is_finite() && *v >= lo && *v <= hi);
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        out.dedup();
        out
    }

    pub fn has_atoms(&self) -> bool {
        match &self.kind {
            DistKind::Atoms { .. } => true,
            DistKind::Pushforward { base, map } => base.has_atoms() || map.has_flats(),
            _ => false,
        }
    }

    pub fn atom_list(&self) -> Option<&AtomList> {
        match &self.kind {
            DistKind::Atoms { atoms } => Some(atoms),
            _ => None,
        }
    }

    /// Levels `(u, 1 − u)` where the quantile function jumps or kinks.
    pub fn quantile_breaks(&self) -> Vec<(f64, f64)> {
        let mut out = match &self.kind {
            DistKind::Atoms { atoms } => atoms.quantile_breaks(),
            DistKind::Pushforward { base, map } => {
                let mut v = base.quantile_breaks();
                let a = base.quantile_lower(1e-300);
                let b = base.quantile_upper(1e-300);
                for x in map.breakpoints(a.max(-1e12), b.min(1e12)) {
                    let s = base.split(x);
                    v.push((s.left_closed().exp(), s.right.exp()));
                }
                v
            }
            _ => Vec::new(),
        };
        out.retain(|&(u, s)| u > 0.0 && s > 0.0);
        out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        out.dedup();
        out
    }

    /// `∫ g dμ` in quantile form, `∫₀¹ g(F⁻¹(u)) du`, with dyadic tail
    /// refinement toward both ends.
    pub fn expect<G: Fn(f64) -> f64>(&self, g: G, depth: usize, rule: &DivergenceRule) -> TailIntegral {
        self.expect_with_breaks(g, &[], depth, rule)
    }

    /// As [`expect`](Self::expect), with panels also split at the quantile
    /// levels of `x_breaks`, the points where `g` has kinks.
    pub fn expect_with_breaks<G: Fn(f64) -> f64>(
        &self,
        g: G,
        x_breaks: &[f64],
        depth: usize,
        rule: &DivergenceRule,
    ) -> TailIntegral {
        let mut breaks = self.quantile_breaks();
        for &x in x_breaks {
            let s = self.split(x);
            breaks.push((s.left.exp(), s.right_closed().exp()));
            breaks.push((s.left_closed().exp(), s.right.exp()));
        }
        let lower_breaks: Vec<f64> = breaks.iter().map(|b| b.0).filter(|&u| u < 0.5).collect();
        let upper_breaks: Vec<f64> = breaks.iter().map(|b| b.1).filter(|&s| s < 0.5).collect();
        let fl = |u: f64| g(self.quantile_lower(u));
        let fu = |s: f64| g(self.quantile_upper(s));
        let (lo, p1) = dyadic_levels(&fl, 0.5, &lower_breaks, depth);
        let (hi, p2) = dyadic_levels(&fu, 0.5, &upper_breaks, depth);
        summarize_two_sided(&lo, &hi, p1 + p2, rule)
    }

    /// Law of `X − x` given `X > x` (side `+`) or of `x − X` given `X < x`.
    pub fn conditional_tail(&self, x: f64, side: Side) -> Result<ConditionalTail<'_>> {
        ConditionalTail::new(self, x, side)
    }
}

#[cfg(test)]
mod tests;
