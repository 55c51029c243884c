use super::*;
use crate::grid::GridSpec;
use proptest::prelude::*;

fn mu1() -> Distribution1D {
    Distribution1D::two_sided_exponential()
}

#[test]
fn mu1_cdf_and_quantiles() {
    let m = mu1();
    assert_eq!(m.cdf(0.0), 0.5);
    for x in [0.0, 0.3, 2.0, 10.0] {
        assert!((m.cdf(x) - (1.0 - 0.5 * (-x).exp())).abs() < 1e-15);
    }
    assert!((m.quantile(0.75).unwrap() - 2f64.ln()).abs() < 1e-15);
    assert_eq!(m.quantile(0.5).unwrap(), 0.0);
    assert!((m.quantile(0.25).unwrap() + 2f64.ln()).abs() < 1e-15);
    assert!(matches!(m.quantile(0.0), Err(Error::Domain(_))));
    assert!(matches!(m.quantile(1.0), Err(Error::Domain(_))));
    assert_eq!(m.median(), 0.0);
}

#[test]
fn atom_list_basics() {
    let a = Distribution1D::atoms(vec![(1.0, 0.5), (0.0, 0.5)]).unwrap();
    assert_eq!(a.cdf(0.0), 0.5);
    assert_eq!(a.cdf_open(0.0), 0.0);
    assert_eq!(a.quantile(0.5).unwrap(), 0.0);
    assert_eq!(a.quantile(0.51).unwrap(), 1.0);
    assert_eq!(a.median(), 0.0);
    assert_eq!(a.support(), (0.0, 1.0));
    assert!(Distribution1D::atoms(vec![(0.0, 0.7)]).is_err());
}

#[test]
fn staircase_pushforward_tails() {
    let mu = Distribution1D::pushforward(mu1(), MonotoneMap::Staircase).unwrap();
    for n in 1..=30 {
        let n = n as f64;
        let ln_tail = mu.split(n).right_closed();
        assert!((ln_tail - (-n * n - LN_2)).abs() < 1e-12 * n * n, "n = {n}");
        let ln_atom = mu.split(n).atom;
        let expected = -n * n - LN_2 + (-(-2.0 * n).exp()).ln_1p();
        assert!((ln_atom - expected).abs() < 1e-10, "atom at {n}: {ln_atom} vs {expected}");
    }
    assert!((mu.sf_closed(2.0) - 0.5 * (-4f64).exp()).abs() < 1e-18);
    // density on (k, k+1)
    for (t, k) in [(1.5f64, 1.0f64), (2.25, 2.0), (-1.5, 1.0)] {
        let expected = (-t.abs()).exp() / 2.0 * ((k + 1.0) - (k + 1.0) * (k + 1.0)).exp();
        assert!((mu.density(t) - expected).abs() < 1e-15, "t {t}");
    }
}

#[test]
fn ceil_sqrt_pushforward_atoms() {
    let mu = Distribution1D::pushforward(mu1(), MonotoneMap::CeilSqrt).unwrap();
    assert!((mu.atom_mass(0.0) - 0.5).abs() < 1e-15);
    for k in 1..=6 {
        let k = k as f64;
        let expected = 0.5 * ((-(k - 1.0) * (k - 1.0)).exp() - (-k * k).exp());
        assert!((mu.atom_mass(k) - expected).abs() < 1e-15);
    }
    assert_eq!(mu.density(1.5), 0.0);
    assert_eq!(mu.support().0, 0.0);
}

#[test]
fn pushforward_identity_is_base() {
    let mu = Distribution1D::pushforward(mu1(), MonotoneMap::Identity).unwrap();
    for i in -50..=50 {
        let x = i as f64 * 0.37;
        assert!((mu.cdf(x) - mu1().cdf(x)).abs() < 1e-15);
    }
}

#[test]
fn conditional_tail_examples() {
    let m = mu1();
    let c = m.conditional_tail(0.0, Side::Plus).unwrap();
    assert!((c.mean(60).value - 1.0).abs() < 1e-9);
    for x in [0.0, 1.0, 7.5] {
        let c = m.conditional_tail(x, Side::Plus).unwrap();
        for u in [0.1, 1.0, 3.0] {
            assert!((c.cdf(u) - (1.0 - (-u).exp())).abs() < 1e-12);
        }
    }
    let a = Distribution1D::atoms(vec![(0.0, 0.5), (1.0, 0.5)]).unwrap();
    let c = a.conditional_tail(0.0, Side::Plus).unwrap();
    assert_eq!(c.cdf(0.999), 0.0);
    assert_eq!(c.cdf(1.0), 1.0);
    assert_eq!(c.quantile(0.3).unwrap(), 1.0);
    assert!(matches!(a.conditional_tail(1.0, Side::Plus), Err(Error::Domain(_))));
}

#[test]
fn relative_entropy_examples() {
    let g = GridSpec::default();
    let m = mu1();
    assert!(relative_entropy(&m, &m, &g).unwrap().abs() < 1e-12);
    for mean in [0.5, 2.0] {
        let nu = Distribution1D::gaussian(mean, 1.0).unwrap();
        let mu = Distribution1D::gaussian(0.0, 1.0).unwrap();
        let h = relative_entropy(&nu, &mu, &g).unwrap();
        assert!((h - mean * mean / 2.0).abs() < 1e-9, "{h}");
    }
    let nu = Distribution1D::atoms(vec![(0.0, 0.25), (1.0, 0.75)]).unwrap();
    let mu = Distribution1D::atoms(vec![(0.0, 0.5), (1.0, 0.5)]).unwrap();
    let expected = 0.25 * 0.5f64.ln() + 0.75 * 1.5f64.ln();
    assert!((relative_entropy(&nu, &mu, &g).unwrap() - expected).abs() < 1e-15);
    let off = Distribution1D::atoms(vec![(2.0, 1.0)]).unwrap();
    assert_eq!(relative_entropy(&off, &mu, &g).unwrap(), f64::INFINITY);
    assert!(matches!(relative_entropy(&nu, &m, &g), Err(Error::Unsupported(_))));
}

#[test]
fn entropy_against_bounded_support_is_infinite() {
    let g = GridSpec::default();
    let boxed = GriddedDensity::new(vec![-1.0, 1.0], vec![0.5, 0.5], TailDescriptor::None, TailDescriptor::None).unwrap();
    let mu = Distribution1D::gridded(boxed);
    assert_eq!(relative_entropy(&mu1(), &mu, &g).unwrap(), f64::INFINITY);
    assert!(relative_entropy(&mu, &mu1(), &g).unwrap().is_finite());
}

#[test]
fn expectation_of_square_under_mu1() {
    let r = mu1().expect(|x| x * x, 60, &DivergenceRule::default());
    assert!((r.value - 2.0).abs() < 1e-9, "{}", r.value);
    let c = Distribution1D::cauchy(0.0, 1.0).unwrap();
    assert!(c.expect(|x| x * x, 60, &DivergenceRule::default()).diverged);
}

#[test]
fn power_exponential_normalized_and_symmetric() {
    let nu = Distribution1D::power_exponential(0.5).unwrap();
    assert_eq!(nu.median(), 0.0);
    assert!((nu.cdf(0.0) - 0.5).abs() < 1e-15);
    for u in [1e-9, 0.01, 0.3] {
        let x = nu.quantile_lower(u);
        assert!((nu.cdf(x) - u).abs() < 1e-12 * u.max(1e-3) / 1e-3);
        assert!((x + nu.quantile_upper(u)).abs() < 1e-12 * (1.0 + x.abs()));
    }
}

#[test]
fn serde_roundtrip_all_kinds() {
    let kinds = vec![
        mu1(),
        Distribution1D::gaussian(1.0, 2.0).unwrap(),
        Distribution1D::cauchy(0.0, 1.0).unwrap(),
        Distribution1D::power_exponential(0.5).unwrap(),
        Distribution1D::atoms(vec![(0.0, 0.25), (1.0, 0.75)]).unwrap(),
        Distribution1D::pushforward(mu1(), MonotoneMap::Staircase).unwrap(),
        Distribution1D::gridded(
            GriddedDensity::new(vec![-1.0, 0.0, 1.0], vec![0.0, 1.0, 0.0], TailDescriptor::None, TailDescriptor::None)
                .unwrap(),
        ),
    ];
    for d in kinds {
        let s = serde_json::to_string(&d).unwrap();
        let back: Distribution1D = serde_json::from_str(&s).unwrap();
        assert_eq!(back, d, "{s}");
    }
    let parsed: Distribution1D = serde_json::from_str(r#"{"kind":"atoms","atoms":[[0,0.5],[1,0.5]]}"#).unwrap();
    assert_eq!(parsed.median(), 0.0);
}

fn test_measures() -> Vec<Distribution1D> {
    vec![
        mu1(),
        Distribution1D::gaussian(0.3, 1.7).unwrap(),
        Distribution1D::cauchy(-1.0, 0.5).unwrap(),
        Distribution1D::power_exponential(0.5).unwrap(),
        Distribution1D::atoms(vec![(0.0, 0.2), (1.0, 0.3), (4.0, 0.5)]).unwrap(),
        Distribution1D::pushforward(mu1(), MonotoneMap::Staircase).unwrap(),
        Distribution1D::pushforward(mu1(), MonotoneMap::CeilSqrt).unwrap(),
        Distribution1D::pushforward(mu1(), MonotoneMap::WaitStep).unwrap(),
    ]
}

proptest! {
    #[test]
    fn quantile_is_generalized_inverse(u in 1e-6f64..0.999_999, which in 0usize..8) {
        let m = &test_measures()[which];
        let x = m.quantile(u).unwrap();
        prop_assert!(m.cdf(x) >= u * (1.0 - 1e-12) - 1e-15);
        let below = x - 1e-7 * (1.0 + x.abs());
        prop_assert!(m.cdf(below) < u * (1.0 + 1e-9) + 1e-15, "{} at {}", m.cdf(below), below);
    }

    #[test]
    fn pushforward_quantile_is_map_of_base(u in 1e-9f64..0.5) {
        for map in [MonotoneMap::Staircase, MonotoneMap::WaitStep, MonotoneMap::CeilSqrt, MonotoneMap::SignMin] {
            let push = Distribution1D::pushforward(mu1(), map.clone()).unwrap();
            prop_assert_eq!(push.quantile_lower(u), map.eval(mu1().quantile_lower(u)));
            prop_assert_eq!(push.quantile_upper(u), map.eval(mu1().quantile_upper(u)));
        }
    }

    #[test]
    fn split_masses_sum_to_one(x in -30.0f64..30.0, which in 0usize..8) {
        let m = &test_measures()[which];
        let s = m.split(x);
        let total = s.left.exp() + s.atom.exp() + s.right.exp();
        prop_assert!((total - 1.0).abs() < 1e-12, "{total}");
    }

    #[test]
    fn conditional_tail_of_mu1_is_memoryless(x in 0.0f64..50.0, u in 0.0f64..20.0) {
        let m = mu1();
        let c = m.conditional_tail(x, Side::Plus).unwrap();
        prop_assert!((c.ln_sf(u) + u).abs() < 1e-10);
    }
}
