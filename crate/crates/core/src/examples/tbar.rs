use super::{
    nodes_with_breaks, slope_range, transport_map_agrees, Claim, ClaimOutcome, ExampleBundle, Table, TableRow,
};
use crate::criteria::growth_ratio;
use crate::dist1d::Distribution1D;
use crate::error::Result;
use crate::grid::GridSpec;
use crate::quad::ln_integrate_exp;
use crate::transport::{triangular, MonotoneMap};

const WITNESSES: u32 = 8;

/// Odd map with `x_n = n(n+1)/2`: unit slope from `x_{n−1}` to `x_n` on
/// `[x_n² − n, x_n²]`, flat at `x_n` until the next ramp. It is 1-Lipschitz
/// with `|T̄(x)| ≤ √|x|`, yet `(T̄(y) − T̄(x))/√(1 + y − x)` is unbounded.
pub fn tbar_example() -> ExampleBundle {
    let map = MonotoneMap::WaitStep;
    ExampleBundle {
        name: "tbar",
        description: "odd map with unit ramps of length n ending at x_n^2, x_n = n(n+1)/2",
        measure: Distribution1D::pushforward(Distribution1D::two_sided_exponential(), map.clone()).expect("valid map"),
        map,
        params: Vec::new(),
        claims: vec![
            Claim {
                name: "lipschitz",
                description: "T is non-decreasing and 1-Lipschitz on 10^4 nodes plus its breakpoints",
                check: lipschitz,
            },
            Claim {
                name: "sqrt_envelope",
                description: "|T(x)| <= sqrt|x| on the same nodes",
                check: sqrt_envelope,
            },
            Claim {
                name: "growth_witnesses",
                description: "ratio at (x_n^2 - n, x_n^2) equals n/sqrt(1+n) for n = 1..8 and exceeds 2.5 at n = 8",
                check: witnesses,
            },
            Claim {
                name: "gaussian_moment",
                description: "the integral of exp(x^2/2) against the image measure is finite and stable under refinement",
                check: gaussian_moment,
            },
            Claim {
                name: "transport_map",
                description: "the quantile composition reproduces T",
                check: |b, g| transport_map_agrees(b, g, |_| false),
            },
        ],
        table: Some(ratio_table),
    }
}

/// Symmetric window wide enough to contain every witness pair.
fn check_nodes(b: &ExampleBundle, g: &GridSpec) -> Vec<f64> {
    let last = triangular(WITNESSES as f64 + 1.0).powi(2);
    let r = g.window.0.abs().max(g.window.1.abs()).max(last);
    nodes_with_breaks(&b.map, -r, r, 10_000)
}

fn lipschitz(b: &ExampleBundle, g: &GridSpec) -> Result<ClaimOutcome> {
    let nodes = check_nodes(b, g);
    let (hi, lo) = slope_range(&b.map, &nodes);
    Ok(ClaimOutcome::new(hi <= 1.0 + 1e-12 && lo >= 0.0)
        .witness("max_slope", hi)
        .witness("min_slope", lo)
        .witness("nodes", nodes.len() as f64))
}

fn sqrt_envelope(b: &ExampleBundle, g: &GridSpec) -> Result<ClaimOutcome> {
    let excess = check_nodes(b, g)
        .iter()
        .map(|&x| b.map.eval(x).abs() - x.abs().sqrt())
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(ClaimOutcome::new(excess <= 1e-12).witness("max_excess", excess))
}

/// `(n, ratio, n/√(1+n))` at the witness pairs.
fn witness_rows(b: &ExampleBundle) -> Vec<[f64; 3]> {
    (1..=WITNESSES)
        .map(|n| {
            let n = n as f64;
            let y = triangular(n).powi(2);
            let x = y - n;
            [n, growth_ratio(b.map.eval(x), b.map.eval(y), x, y), n / (1.0 + n).sqrt()]
        })
        .collect()
}

fn witnesses(b: &ExampleBundle, _: &GridSpec) -> Result<ClaimOutcome> {
    let rows = witness_rows(b);
    let worst = rows.iter().map(|r| (r[1] - r[2]).abs()).fold(0.0, f64::max);
    let last = rows.last().expect("witnesses")[1];
    Ok(ClaimOutcome::new(worst <= 1e-12 && last > 2.5)
        .witness("max_abs_error", worst)
        .witness("ratio_at_8", last))
}

/// `∫ e^{T̄(x)²/2} ½e^{−|x|} dx` over `[−R, R]` for doubling `R`; since
/// `T̄(x)² ≤ |x|`, the neglected tail is at most `2e^{−R/2}`.
fn gaussian_moment(b: &ExampleBundle, g: &GridSpec) -> Result<ClaimOutcome> {
    let ln_f = |x: f64| 0.5 * b.map.eval(x).powi(2) - x - std::f64::consts::LN_2;
    let radii = [100.0, 200.0, 400.0];
    // odd map, so both halves agree
    let values: Vec<f64> = radii
        .iter()
        .map(|&r| 2.0 * ln_integrate_exp(&ln_f, 0.0, r, &b.map.breakpoints(0.0, r), 0.0).exp())
        .collect();
    let change = (values[2] - values[1]).abs() / values[2];
    let quantile_form = b.measure.expect(|y| (0.5 * y * y).exp(), g.dyadic_depth(), &g.divergence);
    let agree = (quantile_form.value - values[2]).abs() / values[2];
    Ok(ClaimOutcome::new(values[2].is_finite() && change <= 1e-12 && agree <= 1e-6)
        .witness("integral", values[2])
        .witness("refinement_change", change)
        .witness("quantile_form", quantile_form.value)
        .note("refinement doubles the truncation radius"))
}

fn ratio_table(b: &ExampleBundle, _: &GridSpec) -> Result<Table> {
    Ok(Table {
        columns: vec!["n".into(), "ratio".into(), "n_over_sqrt_1_plus_n".into()],
        rows: witness_rows(b).into_iter().map(|r| TableRow(r.to_vec())).collect(),
    })
}
