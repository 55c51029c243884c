use otline::criteria::{bobkov_goetze, criterion_report, hardy_profile, k_functionals, muckenhoupt};
use otline::dist1d::{GriddedDensity, TailDescriptor};
use otline::{CostFunction, Distribution1D, GridSpec, MonotoneMap, Side};

fn staircase() -> Distribution1D {
    Distribution1D::pushforward(Distribution1D::two_sided_exponential(), MonotoneMap::Staircase).unwrap()
}

/// `ln D_n⁺` from the closed form, with the sum of `e^{k²}` in log space.
fn ln_staircase_d(n: u32) -> f64 {
    let ln_sum = (1..=n).map(|k| (k * k) as f64).fold(f64::NEG_INFINITY, |acc, v| {
        let m = acc.max(v);
        m + ((acc - m).exp() + (v - m).exp()).ln()
    });
    let n2 = (n * n) as f64;
    -n2 + (n2 + std::f64::consts::LN_2).ln() + (1.0 - (-1f64).exp()).ln() + ln_sum
}

#[test]
fn mu1_muckenhoupt_constants_are_one() {
    let m = muckenhoupt(&Distribution1D::two_sided_exponential(), &GridSpec::default()).unwrap();
    assert!((m.a_plus.value - 1.0).abs() < 1e-3, "{}", m.a_plus.value);
    assert!((m.a_minus.value - 1.0).abs() < 1e-3);
    assert!((m.lambda_lower - 0.25).abs() < 1e-3 && (m.lambda_upper - 1.0).abs() < 1e-3);
    assert!(!m.a_plus.diverged);
}

#[test]
fn mu1_log_sobolev_constant_diverges() {
    let d = bobkov_goetze(&Distribution1D::two_sided_exponential(), &GridSpec::default()).unwrap();
    assert!(d.d_plus.diverged && d.d_minus.diverged);
    assert_eq!(d.d_plus.value, f64::INFINITY);
    assert!(d.d_plus.trace.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn gaussian_criteria_are_finite() {
    let r = criterion_report(&Distribution1D::gaussian(0.0, 1.0).unwrap(), None, &GridSpec::default()).unwrap();
    for v in [r.a_plus, r.a_minus, r.d_plus, r.d_minus] {
        assert!(v.is_finite() && v > 0.0, "{v}");
    }
    assert!(r.diverged.is_empty());
    assert!((r.a_plus - r.a_minus).abs() < 1e-9);
}

#[test]
fn heavy_tails_break_muckenhoupt() {
    let cauchy = Distribution1D::cauchy(0.0, 1.0).unwrap();
    let m = muckenhoupt(&cauchy, &GridSpec::default()).unwrap();
    assert!(m.a_plus.diverged);
    assert_eq!(m.lambda_upper, 0.0);

    // the same density tabulated on a window, with power-law tails
    let xs: Vec<f64> = (0..=400).map(|i| -20.0 + 0.1 * i as f64).collect();
    let ps: Vec<f64> = xs.iter().map(|x| 1.0 / (std::f64::consts::PI * (1.0 + x * x))).collect();
    let tail = TailDescriptor::PowerLaw { exponent: 2.0 };
    let g = GriddedDensity::new(xs, ps, tail.clone(), tail).unwrap();
    let m = muckenhoupt(&Distribution1D::gridded(g), &GridSpec::default()).unwrap();
    assert!(m.a_plus.diverged, "{:?}", m.a_plus.trace);
}

#[test]
fn staircase_partial_values_match_closed_form() {
    let mu = staircase();
    let nodes: Vec<f64> = (1..=8).map(|n| n as f64).collect();
    let prof = hardy_profile(&mu, Side::Plus, &nodes);
    for (n, p) in (1..=8u32).zip(&prof) {
        let ln_d = p.bobkov_goetze().ln();
        assert!((ln_d - ln_staircase_d(n)).abs() < 1e-6, "n = {n}: {ln_d} vs {}", ln_staircase_d(n));
    }
    let d1 = prof[0].bobkov_goetze();
    assert!((d1 - (1.0 + std::f64::consts::LN_2) * (1.0 - (-1f64).exp())).abs() < 1e-9);
    assert!(prof[4].bobkov_goetze() > 10.0 * d1);
}

#[test]
fn staircase_log_sobolev_diverges_but_poincare_holds() {
    let r = criterion_report(&staircase(), None, &GridSpec::default()).unwrap();
    assert!(r.diverged.contains(&"D_plus".to_string()));
    assert!(r.traces.d_plus.windows(2).all(|w| w[1] > w[0]));
    assert!(r.a_plus.is_finite());
}

#[test]
fn k_functional_bound_on_ceil_sqrt_example() {
    let mu = Distribution1D::pushforward(Distribution1D::two_sided_exponential(), MonotoneMap::CeilSqrt).unwrap();
    let a = 1.0 / (9.0 * (1.0 + 2f64.sqrt()));
    let k = k_functionals(&mu, &CostFunction::beta2(), a / 2.0, &GridSpec::default()).unwrap();
    assert!(k.k_plus.value <= 3.0 && k.k_minus.value <= 3.0);
}

#[test]
fn markov_bound_from_k() {
    // μ_x⁺[u, ∞) ≤ K⁺(b) e^{−β(bu)}
    let mu = Distribution1D::gaussian(0.0, 1.0).unwrap();
    let beta = CostFunction::beta2();
    let g = GridSpec::default().with_nodes(40).with_levels(2);
    let k = k_functionals(&mu, &beta, 0.7, &g).unwrap().k_plus.value;
    for x in [0.0, 0.5, 2.0] {
        let tail = mu.conditional_tail(x, Side::Plus).unwrap();
        for i in 1..40 {
            let u = 0.25 * i as f64;
            let closed = (tail.ln_sf(u - 1e-12)).exp();
            assert!(closed <= k * (-beta.eval(0.7 * u).unwrap()).exp() + 1e-15);
        }
    }
}

#[test]
fn suprema_grow_under_window_enlargement() {
    let mu = Distribution1D::gaussian(0.0, 1.0).unwrap();
    let base = GridSpec::default().with_window(-1.0, 1.0);
    let mut prev = 0.0;
    for levels in 1..=4 {
        let m = muckenhoupt(&mu, &base.clone().with_levels(levels)).unwrap();
        assert!(m.a_plus.value >= prev);
        prev = m.a_plus.value;
    }
    let d = |levels| bobkov_goetze(&mu, &base.clone().with_levels(levels)).unwrap().d_plus.value;
    assert!(d(3) >= d(1));
}
