//! Checkable criteria for transport-entropy and functional inequalities
//! on the line.
//!
//! Every supremum is evaluated on geometric-plus-uniform nodes around the
//! median and re-evaluated after doubling the window
//! [`GridSpec::levels`](crate::grid::GridSpec) times. The running maxima form
//! a refinement trace; a trace that keeps multiplying by more than the
//! divergence rule's growth factor is reported as `+∞`, and the trace is
//! kept so the verdict can be audited.

mod hardy;
mod maps;
mod ratio;
mod tails;

pub use hardy::{bobkov_goetze, hardy_profile, muckenhoupt, BobkovGoetze, Muckenhoupt, ProfilePoint};
pub use maps::{
    contraction_constant, contraction_constant_on, growth_ratio, growth_ratio_sup, growth_ratio_sup_on, Contraction,
    GrowthRatio, Modulus,
};
pub use ratio::{central_difference, potential_cost_ratio, RatioRow, RatioTable};
pub use tails::{k_functionals, tail_exponential_moment, KFunctionals};

use serde::{Deserialize, Serialize};

use crate::costfn::CostFunction;
use crate::dist1d::Distribution1D;
use crate::error::Result;
use crate::grid::GridSpec;
use crate::quad::{sup_trace_diverges, DivergenceRule};
use crate::transport::transport_map;

/// A supremum over grid nodes with its refinement trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Supremum {
    #[serde(with = "crate::extended")]
    pub value: f64,
    /// Node attaining the largest finite value seen (or the first infinite
    /// one); `None` when no node was admissible.
    pub argsup: Option<f64>,
    /// Running supremum after each window-doubling level.
    #[serde(with = "crate::extended::vec")]
    pub trace: Vec<f64>,
    pub diverged: bool,
}

impl Supremum {
    /// Folds per-level `(best value, node)` pairs into a running supremum.
    pub fn from_levels(levels: impl Iterator<Item = (f64, Option<f64>)>, rule: &DivergenceRule) -> Self {
        let mut value = 0.0;
        let mut argsup = None;
        let mut trace = Vec::new();
        for (v, x) in levels {
            if v > value || (argsup.is_none() && x.is_some() && v >= value) {
                value = v;
                argsup = x;
            }
            trace.push(value);
        }
        let diverged = sup_trace_diverges(&trace, rule);
        Self {
            value: if diverged { f64::INFINITY } else { value },
            argsup,
            trace,
            diverged,
        }
    }
}

/// Per-criterion maximizing nodes.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Argsup {
    #[serde(rename = "A_plus")]
    pub a_plus: Option<f64>,
    #[serde(rename = "A_minus")]
    pub a_minus: Option<f64>,
    #[serde(rename = "D_plus")]
    pub d_plus: Option<f64>,
    #[serde(rename = "D_minus")]
    pub d_minus: Option<f64>,
    #[serde(rename = "K_plus")]
    pub k_plus: Option<f64>,
    #[serde(rename = "K_minus")]
    pub k_minus: Option<f64>,
    /// Pair attaining the contraction constant.
    pub d: Option<(f64, f64)>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Traces {
    #[serde(rename = "A_plus", with = "crate::extended::vec")]
    pub a_plus: Vec<f64>,
    #[serde(rename = "A_minus", with = "crate::extended::vec")]
    pub a_minus: Vec<f64>,
    #[serde(rename = "D_plus", with = "crate::extended::vec")]
    pub d_plus: Vec<f64>,
    #[serde(rename = "D_minus", with = "crate::extended::vec")]
    pub d_minus: Vec<f64>,
    #[serde(rename = "K_plus", with = "crate::extended::vec", default)]
    pub k_plus: Vec<f64>,
    #[serde(rename = "K_minus", with = "crate::extended::vec", default)]
    pub k_minus: Vec<f64>,
}

/// All criteria for one measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    #[serde(rename = "A_plus", with = "crate::extended")]
    pub a_plus: f64,
    #[serde(rename = "A_minus", with = "crate::extended")]
    pub a_minus: f64,
    #[serde(rename = "D_plus", with = "crate::extended")]
    pub d_plus: f64,
    #[serde(rename = "D_minus", with = "crate::extended")]
    pub d_minus: f64,
    /// Parameter `b` of the exponential-moment functionals, when requested.
    pub b: Option<f64>,
    #[serde(rename = "K_plus", with = "crate::extended::opt")]
    pub k_plus: Option<f64>,
    #[serde(rename = "K_minus", with = "crate::extended::opt")]
    pub k_minus: Option<f64>,
    /// Contraction constant of the map from the two-sided exponential
    /// measure, for the modulus `β⁻¹`; `0` encodes failure on the grid.
    #[serde(with = "crate::extended::opt")]
    pub d: Option<f64>,
    #[serde(with = "crate::extended")]
    pub lambda_lower: f64,
    #[serde(with = "crate::extended")]
    pub lambda_upper: f64,
    pub argsup: Argsup,
    pub traces: Traces,
    /// Names of the criteria whose refinement trace diverged.
    pub diverged: Vec<String>,
}

/// Evaluates the Hardy-type criteria and, when a cost `β` with parameter
/// `b` is supplied, the exponential-moment functionals `K±(b)` and the
/// contraction constant of `F_μ⁻¹ ∘ F_{μ₁}` for the modulus `β⁻¹`.
pub fn criterion_report(
    mu: &Distribution1D,
    beta: Option<(&CostFunction, f64)>,
    grid: &GridSpec,
) -> Result<CriterionReport> {
    let [ap, am, dp, dm] = hardy::hardy_suprema(mu, grid)?;
    let (lambda_lower, lambda_upper) = hardy::lambda_bracket(ap.value, am.value);
    let mut argsup = Argsup {
        a_plus: ap.argsup,
        a_minus: am.argsup,
        d_plus: dp.argsup,
        d_minus: dm.argsup,
        ..Argsup::default()
    };
    let mut traces = Traces {
        a_plus: ap.trace.clone(),
        a_minus: am.trace.clone(),
        d_plus: dp.trace.clone(),
        d_minus: dm.trace.clone(),
        ..Traces::default()
    };
    let mut diverged: Vec<String> = [("A_plus", &ap), ("A_minus", &am), ("D_plus", &dp), ("D_minus", &dm)]
        .iter()
        .filter(|(_, s)| s.diverged)
        .map(|(n, _)| n.to_string())
        .collect();
    let (mut k_plus, mut k_minus, mut d, mut b_out) = (None, None, None, None);
    if let Some((beta, b)) = beta {
        let k = k_functionals(mu, beta, b, grid)?;
        argsup.k_plus = k.k_plus.argsup;
        argsup.k_minus = k.k_minus.argsup;
        traces.k_plus = k.k_plus.trace.clone();
        traces.k_minus = k.k_minus.trace.clone();
        if k.k_plus.diverged {
            diverged.push("K_plus".into());
        }
        if k.k_minus.diverged {
            diverged.push("K_minus".into());
        }
        k_plus = Some(k.k_plus.value);
        k_minus = Some(k.k_minus.value);
        b_out = Some(b);
        let t = transport_map(&Distribution1D::two_sided_exponential(), mu)?;
        let c = contraction_constant(&t, &Modulus::BetaInverse { cost: beta.clone() }, grid);
        argsup.d = c.argmin;
        d = Some(c.d);
    }
    Ok(CriterionReport {
        a_plus: ap.value,
        a_minus: am.value,
        d_plus: dp.value,
        d_minus: dm.value,
        b: b_out,
        k_plus,
        k_minus,
        d,
        lambda_lower,
        lambda_upper,
        argsup,
        traces,
        diverged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn supremum_folds_levels() {
        let r = DivergenceRule::default();
        let s = Supremum::from_levels(vec![(1.0, Some(1.0)), (0.5, Some(2.0)), (3.0, Some(4.0))].into_iter(), &r);
        assert_eq!(s.value, 3.0);
        assert_eq!(s.argsup, Some(4.0));
        assert_eq!(s.trace, vec![1.0, 1.0, 3.0]);
        let empty = Supremum::from_levels(vec![(0.0, None); 3].into_iter(), &r);
        assert_eq!(empty.value, 0.0);
        assert_eq!(empty.argsup, None);
    }

    #[test]
    fn report_serializes_with_exact_field_names() {
        let g = GridSpec::default().with_nodes(40).with_levels(2);
        let r = criterion_report(&Distribution1D::gaussian(0.0, 1.0).unwrap(), None, &g).unwrap();
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        for key in [
            "A_plus", "A_minus", "D_plus", "D_minus", "K_plus", "K_minus", "d", "lambda_lower", "lambda_upper", "argsup",
            "traces",
        ] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert!(r.lambda_lower <= r.lambda_upper);
        let back: CriterionReport = serde_json::from_value(v).unwrap();
        assert_eq!(back, r);
    }
}
