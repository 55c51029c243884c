use super::{transport_map_agrees, worst_pair_excess, Claim, ClaimOutcome, ExampleBundle};
use crate::criteria::muckenhoupt;
use crate::dist1d::Distribution1D;
use crate::error::{Error, Result};
use crate::grid::{linspace, GridSpec};
use crate::quad::ln_integrate_exp;
use crate::transport::{transport_map, MonotoneMap};

/// Slope of the envelope `|T₁(x) − T₁(y)| ≤ a + b|x − y|` fitted on the grid.
const ENVELOPE_SLOPE: f64 = 2.0;

/// `ν(dx) ∝ |x|^r e^{−|x|} dx`, `T₁` the monotone map from the two-sided
/// exponential law to `ν`, `T₂(x) = sign(x)·min(|x|, √|x|)`, and the image
/// `T₂#ν`. The bundle map is `T₂ ∘ T₁`.
///
/// `T₁` is steep at the origin (`ν` has a vanishing density there), so
/// Cheeger-type bounds fail for `ν` while the Poincaré criterion holds.
pub fn section41_example(r: f64) -> Result<ExampleBundle> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Domain(format!("r = {r} must lie in (0, 1)")));
    }
    let nu = Distribution1D::power_exponential(r)?;
    let total = total_mass(&nu);
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::Construction(format!("density integrates to {total}, not 1")));
    }
    let t1 = transport_map(&Distribution1D::two_sided_exponential(), &nu)?;
    Ok(ExampleBundle {
        name: "section41",
        description: "composition of the map onto |x|^r e^-|x| with sign(x) min(|x|, sqrt|x|)",
        map: MonotoneMap::compose(t1, MonotoneMap::SignMin),
        measure: Distribution1D::pushforward(nu, MonotoneMap::SignMin)?,
        params: vec![("r".into(), r)],
        claims: vec![
            Claim {
                name: "map_values",
                description: "T2(4) = 2, T2(1/4) = 1/4, median of nu is 0",
                check: map_values,
            },
            Claim {
                name: "normalization",
                description: "the density of nu integrates to 1 within 1e-10",
                check: normalization,
            },
            Claim {
                name: "derivative_blowup",
                description: "difference quotients of T1 over (-delta, delta) increase as delta = 1e-2, 1e-3, 1e-4 (sampled)",
                check: derivative_blowup,
            },
            Claim {
                name: "muckenhoupt_finite",
                description: "A+ and A- of nu are finite",
                check: muckenhoupt_finite,
            },
            Claim {
                name: "composite_bound",
                description: "|T(x) - T(y)| <= 2 sqrt(a + b|x - y|) on a 500x500 grid, (a, b) an empirical envelope of T1",
                check: composite_bound,
            },
            Claim {
                name: "transport_map",
                description: "the quantile composition reproduces T2 o T1",
                check: |b, g| transport_map_agrees(b, g, |_| false),
            },
        ],
        table: None,
    })
}

fn nu_of(b: &ExampleBundle) -> Result<Distribution1D> {
    Distribution1D::power_exponential(b.param("r").expect("r is set"))
}

fn t1_of(b: &ExampleBundle) -> Result<MonotoneMap> {
    transport_map(&Distribution1D::two_sided_exponential(), &nu_of(b)?)
}

/// `∫ p` by adaptive quadrature of the density itself (not through the
/// quantile function), using symmetry.
fn total_mass(nu: &Distribution1D) -> f64 {
    let half = ln_integrate_exp(&|x: f64| nu.ln_density(x), 0.0, 800.0, &[1.0, 10.0, 50.0], 0.0);
    2.0 * half.exp()
}

fn map_values(b: &ExampleBundle, _: &GridSpec) -> Result<ClaimOutcome> {
    let t2 = MonotoneMap::SignMin;
    let (a, c) = (t2.eval(4.0), t2.eval(0.25));
    let m = nu_of(b)?.median();
    Ok(ClaimOutcome::new(a == 2.0 && c == 0.25 && m == 0.0)
        .witness("T2(4)", a)
        .witness("T2(1/4)", c)
        .witness("median", m))
}

fn normalization(b: &ExampleBundle, _: &GridSpec) -> Result<ClaimOutcome> {
    let total = total_mass(&nu_of(b)?);
    Ok(ClaimOutcome::new((total - 1.0).abs() <= 1e-10).witness("total_mass", total))
}

fn derivative_blowup(b: &ExampleBundle, _: &GridSpec) -> Result<ClaimOutcome> {
    let t1 = t1_of(b)?;
    let q: Vec<f64> = [1e-2, 1e-3, 1e-4]
        .iter()
        .map(|&d| (t1.eval(d) - t1.eval(-d)) / (2.0 * d))
        .collect();
    Ok(ClaimOutcome::new(q[0] < q[1] && q[1] < q[2])
        .witness("quotient_1e-2", q[0])
        .witness("quotient_1e-3", q[1])
        .witness("quotient_1e-4", q[2])
        .note("sampled, not a limit certificate"))
}

fn muckenhoupt_finite(b: &ExampleBundle, g: &GridSpec) -> Result<ClaimOutcome> {
    let m = muckenhoupt(&nu_of(b)?, g)?;
    Ok(ClaimOutcome::new(!m.a_plus.diverged && !m.a_minus.diverged && m.a_plus.value.is_finite())
        .witness("A_plus", m.a_plus.value)
        .witness("A_minus", m.a_minus.value)
        .witness("lambda_lower", m.lambda_lower))
}

fn composite_bound(b: &ExampleBundle, g: &GridSpec) -> Result<ClaimOutcome> {
    let nodes = linspace(g.window.0, g.window.1, 500);
    let t1 = t1_of(b)?;
    let a = worst_pair_excess(&t1, &nodes, |s| ENVELOPE_SLOPE * s).max(0.0);
    let excess = worst_pair_excess(&b.map, &nodes, |s| 2.0 * (a + ENVELOPE_SLOPE * s).sqrt());
    Ok(ClaimOutcome::new(excess <= 1e-12)
        .witness("a", a)
        .witness("b", ENVELOPE_SLOPE)
        .witness("max_excess", excess)
        .note("(a, b) is an empirical envelope on the grid"))
}
