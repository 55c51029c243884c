use super::function::{Extension, GridFunction};
use crate::costfn::CostFunction;
use crate::dist1d::Distribution1D;
use crate::error::{Error, Result};
use crate::grid::GridSpec;

/// `y ↦ inf_z {f(z) + cost(|y − z|)}` over the whole line, evaluable
/// anywhere.
///
/// `cost` must be convex and nondecreasing on `[0, ∞)` with `cost(0) = 0`.
/// Then `z ↦ f(z) + cost(|y − z|)` is convex on every linear piece of `f`, so
/// each piece is minimized by golden-section search. Pieces are visited
/// outward from `y` and the walk stops once `min f` beyond the current piece
/// plus the cost of reaching it cannot beat the best value found.
pub struct InfConvolution<'a, C> {
    f: &'a GridFunction,
    cost: C,
    // prefix_min[i] = min(values[..=i]), suffix_min[i] = min(values[i..])
    prefix_min: Vec<f64>,
    suffix_min: Vec<f64>,
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Minimum of a convex `phi` on `[a, b]`.
fn golden_min<P: Fn(f64) -> f64>(phi: P, mut a: f64, mut b: f64) -> f64 {
    let mut best = phi(a).min(phi(b));
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (phi(c), phi(d));
    for _ in 0..100 {
        if b - a <= 1e-13 * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = phi(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = phi(d);
        }
        best = best.min(fc).min(fd);
    }
    best.min(fc).min(fd)
}

impl<'a, C: Fn(f64) -> f64> InfConvolution<'a, C> {
    pub fn new(f: &'a GridFunction, cost: C) -> Result<Self> {
        if f.infimum() == f64::NEG_INFINITY {
            return Err(Error::Precondition("inf-convolution needs f bounded below".into()));
        }
        let v = f.values();
        let mut prefix_min = v.to_vec();
        for i in 1..v.len() {
            prefix_min[i] = prefix_min[i].min(prefix_min[i - 1]);
        }
        let mut suffix_min = v.to_vec();
        for i in (0..v.len().saturating_sub(1)).rev() {
            suffix_min[i] = suffix_min[i].min(suffix_min[i + 1]);
        }
        Ok(Self {
            f,
            cost,
            prefix_min,
            suffix_min,
        })
    }

    fn phi(&self, y: f64, z: f64) -> f64 {
        self.f.eval(z) + (self.cost)((y - z).abs())
    }

    /// Minimum over the linear piece `[z[i], z[i+1]]`.
    fn segment(&self, y: f64, i: usize) -> f64 {
        let z = self.f.nodes();
        golden_min(|t| self.phi(y, t), z[i], z[i + 1])
    }

    /// Minimum over `(−∞, z[0]]`, where `f` is nonincreasing in `z`, so the
    /// optimum lies between `y` and `z[0]`.
    fn left_ray(&self, y: f64) -> f64 {
        let z0 = self.f.nodes()[0];
        if y >= z0 {
            self.phi(y, z0)
        } else {
            golden_min(|t| self.phi(y, t), y, z0)
        }
    }

    fn right_ray(&self, y: f64) -> f64 {
        let zn = *self.f.nodes().last().unwrap();
        if y <= zn {
            self.phi(y, zn)
        } else {
            golden_min(|t| self.phi(y, t), zn, y)
        }
    }

    pub fn eval(&self, y: f64) -> f64 {
        self.eval_with_piece(y).0
    }

    /// `Qf(y)` and the piece of `f` attaining it: `0` for the left ray,
    /// `i + 1` for the segment starting at node `i`, `n` for the right ray.
    pub fn eval_with_piece(&self, y: f64) -> (f64, usize) {
        let z = self.f.nodes();
        let v = self.f.values();
        let n = z.len();
        // nodes[..k] <= y < nodes[k..], so y lies on piece k
        let k = z.partition_point(|&t| t <= y);
        let own = if k == 0 {
            self.left_ray(y)
        } else if k == n {
            self.right_ray(y)
        } else {
            self.segment(y, k - 1)
        };
        let mut best = (own.min(self.phi(y, y)), k);
        let take = |v: f64, piece: usize, best: &mut (f64, usize)| {
            if v < best.0 {
                *best = (v, piece);
            }
        };
        // leftwards: the piece left of node j, for z[j] <= y
        let mut j = k as isize - 1;
        while j >= 0 {
            let ju = j as usize;
            if self.prefix_min[ju] + (self.cost)(y - z[ju]) >= best.0 {
                break;
            }
            if ju == 0 {
                take(self.left_ray(y), 0, &mut best);
            } else {
                let lo = v[ju - 1].min(v[ju]);
                if lo + (self.cost)(y - z[ju]) < best.0 {
                    take(self.segment(y, ju - 1), ju, &mut best);
                }
            }
            j -= 1;
        }
        // rightwards: the piece right of node j, for z[j] > y
        let mut j = k;
        while j < n {
            if self.suffix_min[j] + (self.cost)(z[j] - y) >= best.0 {
                break;
            }
            if j + 1 == n {
                take(self.right_ray(y), n, &mut best);
            } else {
                let lo = v[j].min(v[j + 1]);
                if lo + (self.cost)(z[j] - y) < best.0 {
                    take(self.segment(y, j), j + 1, &mut best);
                }
            }
            j += 1;
        }
        best
    }

    /// Points where the minimizing piece changes between consecutive
    /// `samples`, located by bisection. `Qf` is smooth away from these and
    /// the nodes of `f` when the cost is.
    pub fn kinks(&self, samples: &[f64]) -> Vec<f64> {
        let mut out = Vec::new();
        let pieces: Vec<usize> = samples.iter().map(|&y| self.eval_with_piece(y).1).collect();
        for (w, p) in samples.windows(2).zip(pieces.windows(2)) {
            if p[0] == p[1] {
                continue;
            }
            let (mut lo, mut hi) = (w[0], w[1]);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if self.eval_with_piece(mid).1 == p[0] {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            out.push(0.5 * (lo + hi));
        }
        out
    }
}

/// `Qf` sampled on the nodes of `f` and interpolated linearly between them.
pub fn inf_convolution<C: Fn(f64) -> f64>(f: &GridFunction, cost: C) -> Result<GridFunction> {
    let q = InfConvolution::new(f, cost)?;
    GridFunction::from_fn(f.nodes().to_vec(), |y| q.eval(y), Extension::Constant)
}

/// `∫ g dμ` divided by the same quadrature of `1`, so constants integrate
/// exactly. Panels break at `kinks`. A bounded integrand cannot diverge against a probability
/// measure, so for those the growth heuristic is overridden and the last
/// partial sum is used (truncation error at most `2·sup|g|·eps`).
/// Panel breaks for integrands built from `Qf`: the nodes of `f`, the
/// grid's linear nodes, and the located kinks of `Qf`.
fn qf_breaks<C: Fn(f64) -> f64>(q: &InfConvolution<'_, C>, kinks: &[f64], grid: &GridSpec) -> Vec<f64> {
    let linear = grid.linear_nodes();
    let found = q.kinks(&linear);
    [kinks, &linear, &found].concat()
}

fn normalized_mean<G: Fn(f64) -> f64>(
    mu: &Distribution1D,
    g: G,
    kinks: &[f64],
    grid: &GridSpec,
    bounded: bool,
) -> Result<f64> {
    let depth = grid.dyadic_depth();
    let num = mu.expect_with_breaks(&g, kinks, depth, &grid.divergence);
    let den = mu.expect_with_breaks(|_| 1.0, kinks, depth, &grid.divergence);
    let value = match num.trace.last() {
        Some(&last) if bounded && num.diverged && last.is_finite() => last,
        _ => num.value,
    };
    if !value.is_finite() {
        return Err(Error::Divergence(format!("refinement trace {:?}", num.trace)));
    }
    Ok(value / den.value)
}

/// `1 − (∫ e^{Qf} dμ)(∫ e^{−f} dμ)`; non-negative exactly when the product
/// form of the dual inequality holds for this `f`.
pub fn dual_product_check<C: Fn(f64) -> f64>(
    mu: &Distribution1D,
    f: &GridFunction,
    cost: C,
    grid: &GridSpec,
) -> Result<f64> {
    let c0 = f.infimum();
    if c0 == f64::NEG_INFINITY {
        return Err(Error::Precondition("f must be bounded below".into()));
    }
    let g = f.shifted(-c0);
    let q = InfConvolution::new(&g, cost)?;
    let kinks = g.nodes();
    let q_kinks = qf_breaks(&q, kinks, grid);
    let a = normalized_mean(mu, |x| q.eval(x).exp(), &q_kinks, grid, g.is_bounded())?;
    let b = normalized_mean(mu, |x| (-g.eval(x)).exp(), kinks, grid, true)?;
    Ok(1.0 - a * b)
}

/// `e^{∫f dμ} − ∫ e^{Qf} dμ`, reported divided by `e^{∫f dμ}` so that the
/// margin is unchanged by `f ↦ f + const`.
pub fn bg_dual_check<C: Fn(f64) -> f64>(mu: &Distribution1D, f: &GridFunction, cost: C, grid: &GridSpec) -> Result<f64> {
    if !f.is_bounded() {
        return Err(Error::Precondition("f must be bounded".into()));
    }
    let g = f.shifted(-f.values()[0]);
    let kinks = g.nodes();
    let mean = normalized_mean(mu, |x| g.eval(x), kinks, grid, true)?;
    let q = InfConvolution::new(&g, cost)?;
    let q_kinks = qf_breaks(&q, kinks, grid);
    let a = normalized_mean(mu, |x| (q.eval(x) - mean).exp(), &q_kinks, grid, true)?;
    Ok(1.0 - a)
}

/// The dual inequality for the two-sided exponential measure and the cost
/// `x²/36` up to 4, `2(x − 2)/9` beyond.
pub fn maurey_check(g: &GridFunction, grid: &GridSpec) -> Result<f64> {
    let beta1 = CostFunction::maurey();
    bg_dual_check(&Distribution1D::two_sided_exponential(), g, |t| beta1.eval_unchecked(t), grid)
}

/// `∫ |∇f|² dμ − λ Var_μ(f)`, with `|∇f|` the larger one-sided slope at
/// nodes of `f`.
pub fn poincare_check(mu: &Distribution1D, lambda: f64, f: &GridFunction, grid: &GridSpec) -> Result<f64> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Domain(format!("lambda = {lambda} must be positive")));
    }
    let c0 = f.values()[0];
    let kinks = f.nodes();
    let bounded = f.is_bounded();
    let energy = normalized_mean(mu, |x| f.gradient_norm(x).powi(2), kinks, grid, true)?;
    let m1 = normalized_mean(mu, |x| f.eval(x) - c0, kinks, grid, bounded)?;
    let m2 = normalized_mean(mu, |x| (f.eval(x) - c0).powi(2), kinks, grid, bounded)?;
    let var = (m2 - m1 * m1).max(0.0);
    Ok(energy - lambda * var)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::linspace;

    fn grid() -> GridSpec {
        GridSpec::default().with_window(-20.0, 20.0).with_nodes(100)
    }

    #[test]
    fn zero_cost_gives_global_minimum() {
        let f = GridFunction::from_fn(linspace(-5.0, 5.0, 21), |x| (x - 1.0).powi(2), Extension::Constant).unwrap();
        let q = inf_convolution(&f, |_| 0.0).unwrap();
        assert!(q.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn penalty_surrogate_reproduces_the_cost() {
        let a = 0.8;
        let beta = CostFunction::beta2();
        let cost = |t: f64| 2.0 * beta.eval_unchecked(a * t / 2.0);
        let nodes = linspace(-10.0, 10.0, 201);
        let f = GridFunction::step_penalty(0.5, 50.0, &nodes).unwrap();
        let q = inf_convolution(&f, cost).unwrap();
        for (&y, &v) in q.nodes().iter().zip(q.values()) {
            let expected = if y <= 0.5 { 0.0 } else { cost(y - 0.5).min(50.0) };
            assert!((v - expected).abs() < 1e-12, "{y}: {v} vs {expected}");
        }
    }

    #[test]
    fn exact_minimization_matches_dense_brute_force() {
        let nodes = linspace(-4.0, 4.0, 9);
        let f = GridFunction::from_fn(nodes, |x| (2.0 * x).sin() * 3.0 + 0.3 * x, Extension::Constant).unwrap();
        let beta = CostFunction::beta2();
        let cost = |t: f64| beta.eval_unchecked(t);
        let q = InfConvolution::new(&f, cost).unwrap();
        let zs = linspace(-12.0, 12.0, 240_001);
        for y in linspace(-7.0, 7.0, 57) {
            let brute = zs.iter().map(|&z| f.eval(z) + cost((y - z).abs())).fold(f64::INFINITY, f64::min);
            let exact = q.eval(y);
            // brute force overshoots by at most slope · spacing
            assert!(exact <= brute + 1e-12 && brute - exact < 1e-3, "{y}: {exact} vs {brute}");
        }
    }

    #[test]
    fn linear_extensions_are_searched() {
        let f = GridFunction::from_fn(
            vec![0.0, 1.0],
            |x| (x - 0.5).abs(),
            Extension::Linear {
                left_slope: -2.0,
                right_slope: 2.0,
            },
        )
        .unwrap();
        let q = InfConvolution::new(&f, |t| t * t).unwrap();
        let y = 5.0;
        // minimize 0.5 + 2(z − 1) + (5 − z)² over z ≥ 1: z = 4
        assert!((q.eval(y) - (0.5 + 6.0 + 1.0)).abs() < 1e-12, "{}", q.eval(y));
    }

    #[test]
    fn metric_cost_is_idempotent_and_convex_cost_contracts() {
        let nodes = linspace(-5.0, 5.0, 41);
        let f = GridFunction::from_fn(nodes, |x| (3.0 * x).sin() * 2.0 + x.abs(), Extension::Constant).unwrap();
        let q1 = inf_convolution(&f, |t| 0.7 * t).unwrap();
        let q2 = inf_convolution(&q1, |t| 0.7 * t).unwrap();
        for (a, b) in q1.values().iter().zip(q2.values()) {
            assert!((a - b).abs() < 1e-12);
        }
        let alpha = CostFunction::alpha1(1.0);
        let q1 = inf_convolution(&f, |t| alpha.eval_unchecked(t)).unwrap();
        let q2 = inf_convolution(&q1, |t| alpha.eval_unchecked(t)).unwrap();
        for ((a, b), v) in q1.values().iter().zip(q2.values()).zip(f.values()) {
            assert!(b <= a && a <= v);
        }
    }

    #[test]
    fn constants_have_zero_margin() {
        let g = grid();
        let mu = Distribution1D::gaussian(0.3, 2.0).unwrap();
        let f = GridFunction::constant(1.7, linspace(-3.0, 3.0, 7)).unwrap();
        let beta = CostFunction::beta2();
        assert_eq!(dual_product_check(&mu, &f, |t| beta.eval_unchecked(t), &g).unwrap(), 0.0);
        assert_eq!(bg_dual_check(&mu, &f, |t| beta.eval_unchecked(t), &g).unwrap(), 0.0);
        assert_eq!(maurey_check(&f, &g).unwrap(), 0.0);
        assert_eq!(poincare_check(&mu, 3.0, &f, &g).unwrap(), 0.0);
    }

    #[test]
    fn poincare_identity_on_mu1() {
        let f = GridFunction::from_fn(
            vec![-1.0, 1.0],
            |x| x,
            Extension::Linear {
                left_slope: 1.0,
                right_slope: 1.0,
            },
        )
        .unwrap();
        let m = poincare_check(&Distribution1D::two_sided_exponential(), 0.25, &f, &grid()).unwrap();
        assert!((m - 0.5).abs() < 1e-9, "{m}");
    }

    #[test]
    fn maurey_examples() {
        let f = GridFunction::from_fn(linspace(-5.0, 5.0, 11), |x| x.abs(), Extension::Constant).unwrap();
        assert!(maurey_check(&f, &grid()).unwrap() >= 0.0);
        let beta1 = CostFunction::maurey();
        for x in linspace(0.0, 50.0, 501) {
            assert!(beta1.eval_unchecked(x) >= 2.0 / 9.0 * (x - 2.0).max(0.0) - 1e-14 * (1.0 + x));
        }
    }

    #[test]
    fn unbounded_inputs_rejected() {
        let f = GridFunction::from_fn(
            vec![0.0, 1.0],
            |x| x,
            Extension::Linear {
                left_slope: 1.0,
                right_slope: 1.0,
            },
        )
        .unwrap();
        let mu = Distribution1D::two_sided_exponential();
        assert!(matches!(dual_product_check(&mu, &f, |t| t * t, &grid()), Err(Error::Precondition(_))));
        assert!(matches!(bg_dual_check(&mu, &f, |t| t * t, &grid()), Err(Error::Precondition(_))));
    }
}
