use otline::criteria::{contraction_constant, muckenhoupt, Modulus};
use otline::dist1d::{GriddedDensity, TailDescriptor};
use otline::examples::{ceil_sqrt_example, staircase_example, tbar_example};
use otline::verify::{
    bg_dual_check, dual_product_check, random_lipschitz_functions, run_suite, Suite, SuiteConfig,
};
use otline::constants::a_opt_bracket;
use otline::{CostFunction, Distribution1D, GridSpec};

fn density_measures() -> Vec<Distribution1D> {
    let xs: Vec<f64> = (0..=400).map(|i| -10.0 + 0.05 * i as f64).collect();
    let ps: Vec<f64> = xs.iter().map(|x| (-x * x / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt()).collect();
    let tabulated = GriddedDensity::new(xs, ps, TailDescriptor::None, TailDescriptor::None).unwrap();
    vec![
        Distribution1D::two_sided_exponential(),
        Distribution1D::gaussian(0.3, 1.7).unwrap(),
        Distribution1D::power_exponential(0.5).unwrap(),
        Distribution1D::gridded(tabulated),
    ]
}

#[test]
fn poincare_holds_at_the_muckenhoupt_lower_bound() {
    let g = GridSpec::default();
    for mu in density_measures() {
        let m = muckenhoupt(&mu, &g).unwrap();
        assert!(m.lambda_lower > 0.0);
        let mut cfg = SuiteConfig::new(Suite::Poincare, 100, 3);
        cfg.measure = Some(mu.clone());
        cfg.lambda = Some(m.lambda_lower);
        let r = run_suite(&cfg, &g).unwrap();
        assert!(r.min_margin >= -1e-6, "{:?}: {}", mu.kind(), r.min_margin);
    }
}

#[test]
fn one_lipschitz_images_keep_the_quarter_constant() {
    let g = GridSpec::default();
    for b in [staircase_example(), tbar_example()] {
        let mut cfg = SuiteConfig::new(Suite::Poincare, 100, 5);
        cfg.measure = Some(b.measure.clone());
        cfg.lambda = Some(0.25);
        let r = run_suite(&cfg, &g).unwrap();
        assert!(r.min_margin >= -1e-6, "{}: {}", b.name, r.min_margin);
    }
}

#[test]
fn margins_are_stable_under_grid_doubling() {
    let coarse = GridSpec::default();
    let fine = GridSpec::default().with_nodes(2 * coarse.nodes_per_side);
    for suite in [Suite::Maurey, Suite::BgDual, Suite::Dual, Suite::Poincare] {
        let cfg = SuiteConfig::new(suite, 10, 11);
        let a = run_suite(&cfg, &coarse).unwrap();
        let b = run_suite(&cfg, &fine).unwrap();
        for (x, y) in a.rows.iter().zip(&b.rows) {
            assert!((x.margin - y.margin).abs() < 1e-4, "{suite}: {} vs {}", x.margin, y.margin);
        }
    }
}

#[test]
fn product_dual_on_ceil_sqrt_at_certified_constant() {
    let g = GridSpec::default();
    let (a, _) = a_opt_bracket(&CostFunction::beta2(), 1.0).unwrap();
    let mut cfg = SuiteConfig::new(Suite::Dual, 50, 1);
    cfg.measure = Some(ceil_sqrt_example().measure);
    cfg.cost = Some(CostFunction::scaled(
        CostFunction::sum(CostFunction::beta2(), CostFunction::beta2()),
        a / 2.0,
    ));
    let r = run_suite(&cfg, &g).unwrap();
    assert!(r.min_margin >= -1e-6, "{}", r.min_margin);
}

#[test]
fn bg_dual_on_staircase_at_chained_constant() {
    let g = GridSpec::default();
    let b = staircase_example();
    let d = contraction_constant(
        &b.map,
        &Modulus::BetaInverse {
            cost: CostFunction::beta2(),
        },
        &g,
    )
    .d;
    assert!(d > 0.0 && d.is_finite());
    let (a, _) = a_opt_bracket(&CostFunction::beta2(), d).unwrap();
    let mut cfg = SuiteConfig::new(Suite::BgDual, 50, 1);
    cfg.measure = Some(b.measure);
    cfg.cost = Some(CostFunction::scaled(CostFunction::beta2(), a));
    let r = run_suite(&cfg, &g).unwrap();
    assert!(r.min_margin >= -1e-6, "d = {d}, a = {a}: {}", r.min_margin);
}

#[test]
fn margins_ignore_additive_constants() {
    let g = GridSpec::default();
    let mu = Distribution1D::gaussian(0.0, 1.5).unwrap();
    let beta = CostFunction::beta2();
    let c = |t: f64| beta.eval_unchecked(0.8 * t);
    for f in random_lipschitz_functions(6, 21) {
        let shifted = f.shifted(5.0);
        let (m1, m2) = (bg_dual_check(&mu, &f, c, &g).unwrap(), bg_dual_check(&mu, &shifted, c, &g).unwrap());
        assert!((m1 - m2).abs() < 1e-12, "{m1} vs {m2}");
        let (p1, p2) = (
            dual_product_check(&mu, &f, c, &g).unwrap(),
            dual_product_check(&mu, &shifted, c, &g).unwrap(),
        );
        assert!((p1 - p2).abs() < 1e-12, "{p1} vs {p2}");
    }
}
