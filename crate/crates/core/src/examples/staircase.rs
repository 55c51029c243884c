use std::f64::consts::LN_2;

use super::{
    nodes_with_breaks, slope_range, transport_map_agrees, worst_pair_excess, Claim, ClaimOutcome, ExampleBundle,
    Table, TableRow,
};
use crate::criteria::{bobkov_goetze, hardy_profile};
use crate::dist1d::{Distribution1D, Side};
use crate::error::Result;
use crate::grid::{linspace, GridSpec};
use crate::quad::{gk15, log_sum_exp};
use crate::transport::MonotoneMap;

/// `ln D_n⁺ = −n² + ln(n² + ln 2) + ln(1 − 1/e) + ln Σ_{k≤n} e^{k²}`.
pub fn ln_staircase_d_closed_form(n: u32) -> f64 {
    let squares: Vec<f64> = (1..=n).map(|k| (k * k) as f64).collect();
    let n2 = (n * n) as f64;
    -n2 + (n2 + LN_2).ln() + (-(-1f64).exp()).ln_1p() + log_sum_exp(&squares)
}

/// Odd map, flat at `k` on `[k², (k+1)² − 1]` and of unit slope between
/// flats. The image of the two-sided exponential law keeps its Poincaré
/// constant (the map is 1-Lipschitz) but has `μ[n, ∞) = ½e^{−n²}` with
/// too little mass just below each integer for a log-Sobolev inequality.
pub fn staircase_example() -> ExampleBundle {
    let map = MonotoneMap::Staircase;
    ExampleBundle {
        name: "staircase",
        description: "odd staircase map with flats [k^2, (k+1)^2 - 1] at height k",
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
                name: "growth_bound",
                description: "T(y) - T(x) <= 4 + 2 sqrt(y - x) on a 500x500 grid",
                check: growth_bound,
            },
            Claim {
                name: "tails",
                description: "mu[n, inf) = exp(-n^2)/2 for n = 1..30",
                check: tails,
            },
            Claim {
                name: "density",
                description: "density on (k, k+1) equals exp(-t)/2 * exp((k+1) - (k+1)^2)",
                check: density,
            },
            Claim {
                name: "d_plus_closed_form",
                description: "D_n+ at integer nodes matches the closed form for n = 1..5 and D_5+ > 10 D_1+",
                check: d_closed_form,
            },
            Claim {
                name: "d_plus_diverges",
                description: "the supremum D+ diverges under refinement",
                check: d_diverges,
            },
            Claim {
                name: "atoms",
                description: "atom at k >= 1 has mass (exp(-k^2) - exp(-(k+1)^2 + 1))/2",
                check: atoms,
            },
            Claim {
                name: "total_mass",
                description: "atoms plus integrated density give total mass 1 within 1e-10",
                check: total_mass,
            },
            Claim {
                name: "transport_map",
                description: "the quantile composition reproduces T",
                check: |b, g| transport_map_agrees(b, g, |_| false),
            },
        ],
        table: Some(d_table),
    }
}

fn lipschitz(b: &ExampleBundle, g: &GridSpec) -> Result<ClaimOutcome> {
    let nodes = nodes_with_breaks(&b.map, g.window.0, g.window.1, 10_000);
    let (hi, lo) = slope_range(&b.map, &nodes);
    Ok(ClaimOutcome::new(hi <= 1.0 + 1e-12 && lo >= 0.0)
        .witness("max_slope", hi)
        .witness("min_slope", lo))
}

fn growth_bound(b: &ExampleBundle, g: &GridSpec) -> Result<ClaimOutcome> {
    let e = worst_pair_excess(&b.map, &linspace(g.window.0, g.window.1, 500), |s| 4.0 + 2.0 * s.sqrt());
    Ok(ClaimOutcome::new(e <= 0.0).witness("max_excess", e))
}

fn tails(b: &ExampleBundle, _: &GridSpec) -> Result<ClaimOutcome> {
    let mut abs_err: f64 = 0.0;
    let mut rel_err: f64 = 0.0;
    for n in 1..=30 {
        let n = n as f64;
        let want_ln = -n * n - LN_2;
        let got_ln = b.measure.split(n).right_closed();
        rel_err = rel_err.max((got_ln - want_ln).abs() / want_ln.abs());
        abs_err = abs_err.max((got_ln.exp() - want_ln.exp()).abs());
    }
    Ok(ClaimOutcome::new(abs_err <= 1e-12 && rel_err <= 1e-12)
        .witness("max_abs_error", abs_err)
        .witness("max_rel_error_ln", rel_err)
        .witness("mu[2,inf)", b.measure.sf_closed(2.0)))
}

fn p_closed(t: f64) -> f64 {
    let k1 = t.abs().floor() + 1.0;
    (-t.abs()).exp() / 2.0 * (k1 - k1 * k1).exp()
}

fn density(b: &ExampleBundle, _: &GridSpec) -> Result<ClaimOutcome> {
    let mut worst: f64 = 0.0;
    for k in 0..8 {
        for frac in [0.1, 0.5, 0.9] {
            for sign in [1.0, -1.0] {
                let t = sign * (k as f64 + frac);
                worst = worst.max((b.measure.density(t) - p_closed(t)).abs() / p_closed(t));
            }
        }
    }
    Ok(ClaimOutcome::new(worst <= 1e-12).witness("max_rel_error", worst))
}

fn d_profile(b: &ExampleBundle, n_max: u32) -> Vec<f64> {
    let nodes: Vec<f64> = (1..=n_max).map(f64::from).collect();
    hardy_profile(&b.measure, Side::Plus, &nodes)
        .iter()
        .map(|p| p.bobkov_goetze())
        .collect()
}

fn d_closed_form(b: &ExampleBundle, _: &GridSpec) -> Result<ClaimOutcome> {
    let d = d_profile(b, 5);
    let mut out = ClaimOutcome::new(true);
    let mut worst: f64 = 0.0;
    for (n, &v) in (1..=5u32).zip(&d) {
        let want = ln_staircase_d_closed_form(n).exp();
        worst = worst.max((v - want).abs() / want);
        out = out.witness(format!("D_{n}"), v);
    }
    out.passed = worst <= 1e-6 && d[4] > 10.0 * d[0];
    Ok(out.witness("max_rel_error", worst))
}

fn d_diverges(b: &ExampleBundle, g: &GridSpec) -> Result<ClaimOutcome> {
    let bg = bobkov_goetze(&b.measure, g)?;
    let last = bg.d_plus.trace.last().copied().unwrap_or(f64::NAN);
    Ok(ClaimOutcome::new(bg.d_plus.diverged)
        .witness("D_plus", bg.d_plus.value)
        .witness("last_finite_level", last))
}

fn atoms(b: &ExampleBundle, _: &GridSpec) -> Result<ClaimOutcome> {
    let mut worst: f64 = 0.0;
    for k in 1..=6 {
        let kf = k as f64;
        let want = 0.5 * ((-kf * kf).exp() - (-(kf + 1.0) * (kf + 1.0) + 1.0).exp());
        for x in [kf, -kf] {
            worst = worst.max((b.measure.atom_mass(x) - want).abs() / want);
        }
    }
    Ok(ClaimOutcome::new(worst <= 1e-12).witness("max_rel_error", worst))
}

fn total_mass(b: &ExampleBundle, _: &GridSpec) -> Result<ClaimOutcome> {
    let (mut atoms, mut dens) = (0.0, 0.0);
    for k in (0..40).rev() {
        let kf = k as f64;
        for sign in [1.0, -1.0] {
            if k > 0 {
                atoms += b.measure.atom_mass(sign * kf);
            }
            dens += gk15(|t| b.measure.density(sign * t), kf, kf + 1.0).value;
        }
    }
    let total = atoms + dens;
    Ok(ClaimOutcome::new((total - 1.0).abs() <= 1e-10)
        .witness("atoms", atoms)
        .witness("density", dens)
        .witness("total", total))
}

fn d_table(b: &ExampleBundle, _: &GridSpec) -> Result<Table> {
    let d = d_profile(b, 8);
    Ok(Table {
        columns: vec!["n".into(), "D_n_plus".into(), "closed_form".into()],
        rows: (1..=8u32)
            .zip(d)
            .map(|(n, v)| TableRow(vec![n as f64, v, ln_staircase_d_closed_form(n).exp()]))
            .collect(),
    })
}
