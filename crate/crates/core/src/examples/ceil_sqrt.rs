use super::{transport_map_agrees, worst_pair_excess, Claim, ClaimOutcome, ExampleBundle};
use crate::constants::a_opt_bracket;
use crate::costfn::CostFunction;
use crate::criteria::{contraction_constant, k_functionals, Modulus};
use crate::dist1d::Distribution1D;
use crate::error::Result;
use crate::grid::{linspace, GridSpec};
use crate::transport::MonotoneMap;

/// `T(x) = ⌈√x⌉` for `x > 0`, `0` otherwise: a map with unit jumps whose
/// image of the two-sided exponential law still satisfies the `β₂`
/// transport inequality.
pub fn ceil_sqrt_example() -> ExampleBundle {
    let map = MonotoneMap::CeilSqrt;
    ExampleBundle {
        name: "ceil-sqrt",
        description: "ceiling of the square root on the positive half-line, zero elsewhere",
        measure: Distribution1D::pushforward(Distribution1D::two_sided_exponential(), map.clone()).expect("valid map"),
        map,
        params: Vec::new(),
        claims: vec![
            Claim {
                name: "map_values",
                description: "T(4) = 2 and T(4.01) = 3",
                check: map_values,
            },
            Claim {
                name: "growth_bound",
                description: "|T(x) - T(y)| <= 1 + sqrt|x - y| on a 500x500 grid and across the jumps",
                check: growth_bound,
            },
            Claim {
                name: "contraction",
                description: "contraction constant for the modulus 1 + sqrt(s) is at least 1",
                check: contraction,
            },
            Claim {
                name: "a_opt_bracket",
                description: "bracket of the optimal constant equals [1/(9(1+sqrt 2)), 8(1+sqrt(log 3))]",
                check: bracket,
            },
            Claim {
                name: "atom_at_zero",
                description: "the image measure has an atom of mass 1/2 at 0",
                check: atom_at_zero,
            },
            Claim {
                name: "k_functionals",
                description: "K+(a/2) and K-(a/2) are at most 3 at the lower bracket endpoint a",
                check: k_bound,
            },
            Claim {
                name: "transport_map",
                description: "the quantile composition reproduces T away from the jumps",
                check: |b, g| transport_map_agrees(b, g, near_square),
            },
        ],
        table: None,
    }
}

fn near_square(x: f64) -> bool {
    x > 0.0 && (x.sqrt() - x.sqrt().round()).abs() < 1e-9
}

fn map_values(b: &ExampleBundle, _: &GridSpec) -> Result<ClaimOutcome> {
    let (t4, t401) = (b.map.eval(4.0), b.map.eval(4.01));
    Ok(ClaimOutcome::new(t4 == 2.0 && t401 == 3.0)
        .witness("T(4)", t4)
        .witness("T(4.01)", t401))
}

fn growth_bound(b: &ExampleBundle, g: &GridSpec) -> Result<ClaimOutcome> {
    let bound = |s: f64| 1.0 + s.sqrt();
    let grid = worst_pair_excess(&b.map, &linspace(g.window.0, g.window.1, 500), bound);
    // both sides of every jump inside the window
    let mut jumps = vec![0.0, 1e-12];
    let top = g.window.1.max(0.0).sqrt().ceil() as i64;
    for k in 1..=top {
        let s = (k * k) as f64;
        jumps.extend([s - 1e-9, s, s + 1e-9]);
    }
    let near = worst_pair_excess(&b.map, &jumps, bound);
    Ok(ClaimOutcome::new(grid <= 1e-12 && near <= 1e-12)
        .witness("max_excess_grid", grid)
        .witness("max_excess_jumps", near))
}

fn contraction(b: &ExampleBundle, g: &GridSpec) -> Result<ClaimOutcome> {
    let c = contraction_constant(
        &b.map,
        &Modulus::BetaInverse {
            cost: CostFunction::beta2(),
        },
        g,
    );
    let mut out = ClaimOutcome::new(c.d >= 1.0).witness("d", c.d);
    if let Some((x, y)) = c.argmin {
        out = out.witness("argmin_x", x).witness("argmin_y", y);
    }
    Ok(out)
}

fn bracket(_: &ExampleBundle, _: &GridSpec) -> Result<ClaimOutcome> {
    let (lo, hi) = a_opt_bracket(&CostFunction::beta2(), 1.0)?;
    let want_lo = 1.0 / (9.0 * (1.0 + 2f64.sqrt()));
    let want_hi = 8.0 * (1.0 + 3f64.ln().sqrt());
    Ok(
        ClaimOutcome::new((lo - want_lo).abs() <= 1e-12 && (hi - want_hi).abs() <= 1e-12)
            .witness("lower", lo)
            .witness("upper", hi),
    )
}

fn atom_at_zero(b: &ExampleBundle, _: &GridSpec) -> Result<ClaimOutcome> {
    let m = b.measure.atom_mass(0.0);
    Ok(ClaimOutcome::new((m - 0.5).abs() <= 1e-15).witness("mass", m))
}

fn k_bound(b: &ExampleBundle, g: &GridSpec) -> Result<ClaimOutcome> {
    let (a, _) = a_opt_bracket(&CostFunction::beta2(), 1.0)?;
    let k = k_functionals(&b.measure, &CostFunction::beta2(), a / 2.0, g)?;
    Ok(ClaimOutcome::new(k.k_plus.value <= 3.0 && k.k_minus.value <= 3.0)
        .witness("a", a)
        .witness("K_plus", k.k_plus.value)
        .witness("K_minus", k.k_minus.value))
}
