use serde::{Deserialize, Serialize};

use crate::dist1d::Distribution1D;
use crate::error::{Error, Result};
use crate::quad::{bisect_boundary, bracket_boundary};

/// Non-decreasing, left-continuous maps `ℝ → ℝ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MonotoneMap {
    Identity,
    /// `x ↦ slope·x + offset`, `slope ≥ 0`.
    Affine { slope: f64, offset: f64 },
    /// `outer ∘ inner`.
    Composition {
        inner: Box<MonotoneMap>,
        outer: Box<MonotoneMap>,
    },
    /// `⌈√x⌉` for `x > 0`, `0` for `x ≤ 0`.
    CeilSqrt,
    /// Odd map, equal to `k` on `[k², (k+1)² − 1]` and of unit slope on
    /// `[(k+1)² − 1, (k+1)²]`.
    Staircase,
    /// Odd map with `x_n = n(n+1)/2`: unit slope from `x_{n−1}` to `x_n` on
    /// `[x_n² − n, x_n²]`, then flat at `x_n` until `x_{n+1}² − (n+1)`.
    WaitStep,
    /// `sign(x)·min(|x|, √|x|)`.
    SignMin,
    /// `F_target⁻¹ ∘ F_source`.
    QuantileComposition {
        source: Box<Distribution1D>,
        target: Box<Distribution1D>,
    },
    /// Linear interpolation through `(xs, ys)`, constant outside.
    PiecewiseLinear { xs: Vec<f64>, ys: Vec<f64> },
}

/// `n(n+1)/2`.
pub fn triangular(n: f64) -> f64 {
    0.5 * n * (n + 1.0)
}

/// Beyond this, consecutive integers are no longer distinguishable after
/// squaring and the integer corrections below are skipped.
const EXACT_LIMIT: f64 = 1e30;

fn floor_sqrt(x: f64) -> f64 {
    let mut j = x.sqrt().floor();
    if x > EXACT_LIMIT {
        return j;
    }
    while j * j > x {
        j -= 1.0;
    }
    while (j + 1.0) * (j + 1.0) <= x {
        j += 1.0;
    }
    j
}

fn ceil_sqrt(x: f64) -> f64 {
    let mut k = x.sqrt().ceil();
    if x > EXACT_LIMIT {
        return k;
    }
    while k * k < x {
        k += 1.0;
    }
    while k > 0.0 && (k - 1.0) * (k - 1.0) >= x {
        k -= 1.0;
    }
    k
}

/// Largest `n ≥ 1` with `x_n² − n ≤ x`, for `x ≥ 0`.
fn wait_step_index(x: f64) -> f64 {
    let start = |n: f64| triangular(n).powi(2) - n;
    let mut n = (4.0 * x).powf(0.25).floor().max(1.0);
    if x > EXACT_LIMIT {
        return n;
    }
    while n > 1.0 && start(n) > x {
        n -= 1.0;
    }
    while start(n + 1.0) <= x {
        n += 1.0;
    }
    n
}

/// Smallest `n ≥ 0` with `x_n ≥ y`, for `y ≥ 0`.
fn triangular_ceil_index(y: f64) -> f64 {
    let mut n = ((-1.0 + (1.0 + 8.0 * y).sqrt()) / 2.0).ceil().max(0.0);
    if y > EXACT_LIMIT {
        return n;
    }
    while triangular(n) < y {
        n += 1.0;
    }
    while n > 0.0 && triangular(n - 1.0) >= y {
        n -= 1.0;
    }
    n
}

fn odd_preimage(y: f64, pos: impl Fn(f64) -> (f64, f64)) -> (f64, f64) {
    if y >= 0.0 {
        pos(y)
    } else {
        let (lo, hi) = pos(-y);
        (-hi, -lo)
    }
}

impl MonotoneMap {
    pub fn affine(slope: f64, offset: f64) -> Result<Self> {
        let m = MonotoneMap::Affine { slope, offset };
        m.validate()?;
        Ok(m)
    }

    pub fn compose(inner: MonotoneMap, outer: MonotoneMap) -> Self {
        MonotoneMap::Composition {
            inner: Box::new(inner),
            outer: Box::new(outer),
        }
    }

    pub fn piecewise_linear(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        let m = MonotoneMap::PiecewiseLinear { xs, ys };
        m.validate()?;
        Ok(m)
    }

    /// Parameter checks plus a sampled monotonicity test.
    pub fn validate(&self) -> Result<()> {
        match self {
            MonotoneMap::Affine { slope, offset } => {
                if !(slope.is_finite() && *slope >= 0.0 && offset.is_finite()) {
                    return Err(Error::Construction(format!(
                        "affine map needs finite slope >= 0 and finite offset, got ({slope}, {offset})"
                    )));
                }
            }
            MonotoneMap::Composition { inner, outer } => {
                inner.validate()?;
                outer.validate()?;
            }
            MonotoneMap::PiecewiseLinear { xs, ys } => {
                if xs.is_empty() || xs.len() != ys.len() {
                    return Err(Error::Construction("piecewise-linear map needs matching non-empty tables".into()));
                }
                if xs.iter().chain(ys).any(|v| !v.is_finite()) {
                    return Err(Error::Construction("piecewise-linear map has non-finite entries".into()));
                }
                if xs.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::Construction("piecewise-linear nodes must be strictly increasing".into()));
                }
                if ys.windows(2).any(|w| w[0] > w[1]) {
                    return Err(Error::Construction("piecewise-linear values are not non-decreasing".into()));
                }
            }
            _ => {}
        }
        self.check_monotone(-1e3, 1e3, 4001)
    }

    /// Sampled monotonicity on `n` equally spaced points of `[lo, hi]`.
    pub fn check_monotone(&self, lo: f64, hi: f64, n: usize) -> Result<()> {
        let mut prev = f64::NEG_INFINITY;
        for i in 0..n {
            let x = lo + (hi - lo) * i as f64 / (n - 1) as f64;
            let y = self.eval(x);
            if y.is_nan() {
                return Err(Error::Construction(format!("map is undefined at {x}")));
            }
            if y < prev {
                return Err(Error::Construction(format!("map decreases near {x}")));
            }
            prev = y;
        }
        Ok(())
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NAN;
        }
        match self {
            MonotoneMap::Identity => x,
            MonotoneMap::Affine { slope, offset } => {
                if *slope == 0.0 {
                    *offset
                } else {
                    slope * x + offset
                }
            }
            MonotoneMap::Composition { inner, outer } => outer.eval(inner.eval(x)),
            MonotoneMap::CeilSqrt => {
                if x <= 0.0 {
                    0.0
                } else if x.is_infinite() {
                    x
                } else {
                    ceil_sqrt(x)
                }
            }
            MonotoneMap::Staircase => {
                if x.is_infinite() {
                    return x;
                }
                let z = x.abs();
                let j = floor_sqrt(z);
                let knee = (j + 1.0) * (j + 1.0) - 1.0;
                let v = if z <= knee { j } else { j + (z - knee) };
                v.copysign(x)
            }
            MonotoneMap::WaitStep => {
                if x.is_infinite() {
                    return x;
                }
                let z = x.abs();
                if z <= 1.0 {
                    return x;
                }
                let n = wait_step_index(z);
                let top = triangular(n).powi(2);
                let v = if z <= top {
                    triangular(n - 1.0) + (z - top + n)
                } else {
                    triangular(n)
                };
                v.copysign(x)
            }
            MonotoneMap::SignMin => {
                let z = x.abs();
                z.min(z.sqrt()).copysign(x)
            }
            MonotoneMap::QuantileComposition { source, target } => {
                if x.is_infinite() {
                    return x;
                }
                let s = source.split(x);
                let u = (s.left_closed()).exp();
                if u <= 0.5 {
                    target.quantile_lower_ext(u)
                } else {
                    target.quantile_upper_ext(s.right.exp())
                }
            }
            MonotoneMap::PiecewiseLinear { xs, ys } => pl_eval(xs, ys, x),
        }
    }

    /// Left derivative `T'(x−)`, where it exists; `0` on flats and at
    /// points reached from the left by a flat.
    pub fn left_derivative(&self, x: f64) -> f64 {
        match self {
            MonotoneMap::Identity => 1.0,
            MonotoneMap::Affine { slope, .. } => *slope,
            MonotoneMap::Composition { inner, outer } => {
                let d = inner.left_derivative(x);
                if d == 0.0 {
                    0.0
                } else {
                    d * outer.left_derivative(inner.eval(x))
                }
            }
            MonotoneMap::CeilSqrt => 0.0,
            MonotoneMap::Staircase => {
                if x > 0.0 {
                    let j = floor_sqrt(x);
                    if j >= 1.0 && x == j * j {
                        1.0
                    } else if x <= (j + 1.0) * (j + 1.0) - 1.0 {
                        0.0
                    } else {
                        1.0
                    }
                } else if x == 0.0 {
                    1.0
                } else {
                    // right derivative at |x|
                    let z = -x;
                    let j = floor_sqrt(z);
                    if z < (j + 1.0) * (j + 1.0) - 1.0 {
                        0.0
                    } else {
                        1.0
                    }
                }
            }
            MonotoneMap::WaitStep => {
                let z = x.abs();
                if z < 1.0 || x == 1.0 {
                    return 1.0;
                }
                let n = wait_step_index(z);
                let start = triangular(n).powi(2) - n;
                let top = triangular(n).powi(2);
                if x > 0.0 {
                    if z == start {
                        0.0
                    } else if z <= top {
                        1.0
                    } else {
                        0.0
                    }
                } else if z < top {
                    1.0
                } else {
                    0.0
                }
            }
            MonotoneMap::SignMin => {
                let z = x.abs();
                if z < 1.0 || x == 1.0 {
                    1.0
                } else {
                    0.5 / z.sqrt()
                }
            }
            MonotoneMap::QuantileComposition { source, target } => {
                let lp = source.ln_density(x);
                let lq = target.ln_density(self.eval(x));
                if lp == f64::NEG_INFINITY {
                    0.0
                } else {
                    (lp - lq).exp()
                }
            }
            MonotoneMap::PiecewiseLinear { xs, ys } => {
                if x <= xs[0] || x > *xs.last().unwrap() {
                    return 0.0;
                }
                let i = xs.partition_point(|&v| v < x);
                (ys[i] - ys[i - 1]) / (xs[i] - xs[i - 1])
            }
        }
    }

    /// `(inf{x : T(x) ≥ y}, sup{x : T(x) ≤ y})`, with the conventions
    /// `inf ∅ = +∞` and `sup ∅ = −∞`.
    pub fn preimage(&self, y: f64) -> (f64, f64) {
        if y == f64::INFINITY {
            return (f64::INFINITY, f64::INFINITY);
        }
        if y == f64::NEG_INFINITY {
            return (f64::NEG_INFINITY, f64::NEG_INFINITY);
        }
        match self {
            MonotoneMap::Identity => (y, y),
            MonotoneMap::Affine { slope, offset } => {
                if *slope > 0.0 {
                    let x = (y - offset) / slope;
                    (x, x)
                } else {
                    let lo = if *offset >= y { f64::NEG_INFINITY } else { f64::INFINITY };
                    let hi = if *offset <= y { f64::INFINITY } else { f64::NEG_INFINITY };
                    (lo, hi)
                }
            }
            MonotoneMap::Composition { inner, outer } => {
                let (lo2, hi2) = outer.preimage(y);
                let hi = inner.preimage(hi2).1;
                let closed = lo2.is_finite() && outer.eval(lo2) >= y;
                let lo = if closed || lo2 == f64::NEG_INFINITY {
                    inner.preimage(lo2).0
                } else if lo2 == f64::INFINITY {
                    f64::INFINITY
                } else {
                    inner.preimage(lo2).1
                };
                (lo, hi)
            }
            MonotoneMap::CeilSqrt => {
                if y < 0.0 {
                    (f64::NEG_INFINITY, f64::NEG_INFINITY)
                } else if y == 0.0 {
                    (f64::NEG_INFINITY, 0.0)
                } else {
                    let k = y.ceil();
                    let lo = (k - 1.0) * (k - 1.0);
                    let hi = if y == k { k * k } else { lo };
                    (lo, hi)
                }
            }
            MonotoneMap::Staircase => odd_preimage(y, |y| {
                let n = y.floor();
                if y == n {
                    if n == 0.0 {
                        (0.0, 0.0)
                    } else {
                        (n * n, (n + 1.0) * (n + 1.0) - 1.0)
                    }
                } else {
                    let x = (n + 1.0) * (n + 1.0) - 1.0 + (y - n);
                    (x, x)
                }
            }),
            MonotoneMap::WaitStep => odd_preimage(y, |y| {
                if y < 1.0 {
                    return (y, y);
                }
                let n = triangular_ceil_index(y);
                if triangular(n) == y {
                    let lo = triangular(n).powi(2);
                    let hi = triangular(n + 1.0).powi(2) - (n + 1.0);
                    (lo, hi)
                } else {
                    let x = triangular(n).powi(2) - n + (y - triangular(n - 1.0));
                    (x, x)
                }
            }),
            MonotoneMap::SignMin => {
                let z = y.abs();
                let x = if z <= 1.0 { y } else { (z * z).copysign(y) };
                (x, x)
            }
            _ => self.preimage_numeric(y),
        }
    }

    fn preimage_numeric(&self, y: f64) -> (f64, f64) {
        let le = |x: f64| self.eval(x) <= y;
        let hi = match bracket_boundary(&le, 0.0) {
            Some((a, b)) => bisect_boundary(le, a, b),
            None if le(0.0) => f64::INFINITY,
            None => f64::NEG_INFINITY,
        };
        let lt = |x: f64| self.eval(x) < y;
        let lo = match bracket_boundary(&lt, 0.0) {
            Some((a, b)) => {
                let b0 = bisect_boundary(lt, a, b);
                let next = f64::from_bits(if b0 >= 0.0 { b0.to_bits() + 1 } else { b0.to_bits() - 1 });
                if b0 == 0.0 {
                    if self.eval(b0) >= y { b0 } else { f64::MIN_POSITIVE }
                } else if self.eval(next) >= y {
                    next
                } else {
                    b0
                }
            }
            None if lt(0.0) => f64::INFINITY,
            None => f64::NEG_INFINITY,
        };
        (lo, hi)
    }

    /// Points of `[lo, hi]` where the map is not smooth (kinks and jumps).
    pub fn breakpoints(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut out = Vec::new();
        let reach = lo.abs().max(hi.abs()).min(1e300);
        match self {
            MonotoneMap::Identity | MonotoneMap::Affine { .. } => {}
            MonotoneMap::Composition { inner, outer } => {
                out.extend(inner.breakpoints(lo, hi));
                let (a, b) = (inner.eval(lo), inner.eval(hi));
                for z in outer.breakpoints(a, b) {
                    let (p, q) = inner.preimage(z);
                    out.push(p);
                    out.push(q);
                }
            }
            MonotoneMap::CeilSqrt => {
                out.push(0.0);
                let kmax = reach.sqrt().ceil() + 1.0;
                let mut k = 1.0;
                while k <= kmax && k < 1e7 {
                    out.push(k * k);
                    k += 1.0;
                }
            }
            MonotoneMap::Staircase => {
                out.push(0.0);
                let kmax = reach.sqrt().ceil() + 1.0;
                let mut k = 1.0;
                while k <= kmax && k < 1e7 {
                    for v in [k * k, k * k - 1.0] {
                        out.push(v);
                        out.push(-v);
                    }
                    k += 1.0;
                }
            }
            MonotoneMap::WaitStep => {
                let mut n = 1.0;
                while n < 1e5 {
                    let top = triangular(n).powi(2);
                    for v in [top - n, top] {
                        out.push(v);
                        out.push(-v);
                    }
                    if top - n > reach {
                        break;
                    }
                    n += 1.0;
                }
            }
            MonotoneMap::SignMin => out.extend([-1.0, 0.0, 1.0]),
            MonotoneMap::QuantileComposition { source, .. } => out.extend(source.density_breakpoints(lo, hi)),
            MonotoneMap::PiecewiseLinear { xs, .. } => out.extend(xs.iter().copied()),
        }
        out.retain(|v| v.is_finite() && *v >= lo && *v <= hi);
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        out.dedup();
        out
    }

    /// Whether the map may be constant on an interval, producing atoms in
    /// pushforwards.
    pub fn has_flats(&self) -> bool {
        match self {
            MonotoneMap::Identity | MonotoneMap::SignMin => false,
            MonotoneMap::Affine { slope, .. } => *slope == 0.0,
            MonotoneMap::Composition { inner, outer } => inner.has_flats() || outer.has_flats(),
            MonotoneMap::QuantileComposition { target, .. } => target.has_atoms(),
            _ => true,
        }
    }
}

fn pl_eval(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    if x <= xs[0] {
        return ys[0];
    }
    let n = xs.len();
    if x >= xs[n - 1] {
        return ys[n - 1];
    }
    let i = xs.partition_point(|&v| v < x);
    let t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
    ys[i - 1] + t * (ys[i] - ys[i - 1])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Vec<f64> {
        (-4000..=4000).map(|i| i as f64 * 0.0173).collect()
    }

    fn assert_preimage_consistent(t: &MonotoneMap, ys: &[f64]) {
        for &y in ys {
            let (lo, hi) = t.preimage(y);
            if lo.is_finite() {
                assert!(t.eval(lo) >= y - 1e-9 || t.eval(lo.next_up()) >= y, "lo {lo} for {y}");
                assert!(t.eval(lo - 1e-7 * (1.0 + lo.abs())) < y + 1e-12, "lo {lo} not minimal for {y}");
            }
            if hi.is_finite() {
                assert!(t.eval(hi) <= y + 1e-9, "hi {hi} for {y}");
                assert!(t.eval(hi + 1e-7 * (1.0 + hi.abs())) > y - 1e-12, "hi {hi} not maximal for {y}");
            }
        }
    }

    #[test]
    fn ceil_sqrt_values_and_jumps() {
        let t = MonotoneMap::CeilSqrt;
        assert_eq!(t.eval(4.0), 2.0);
        assert_eq!(t.eval(4.01), 3.0);
        assert_eq!(t.eval(-3.0), 0.0);
        assert_eq!(t.eval(0.25), 1.0);
        assert_eq!(t.preimage(2.0), (1.0, 4.0));
        assert_eq!(t.preimage(0.0), (f64::NEG_INFINITY, 0.0));
        assert_eq!(t.preimage(1.5), (1.0, 1.0));
    }

    #[test]
    fn staircase_shape() {
        let t = MonotoneMap::Staircase;
        assert_eq!(t.eval(0.5), 0.5);
        assert_eq!(t.eval(1.0), 1.0);
        assert_eq!(t.eval(3.0), 1.0);
        assert_eq!(t.eval(3.5), 1.5);
        assert_eq!(t.eval(4.0), 2.0);
        assert_eq!(t.eval(8.0), 2.0);
        assert_eq!(t.eval(-3.5), -1.5);
        assert_eq!(t.preimage(2.0), (4.0, 8.0));
        assert_eq!(t.preimage(-2.0), (-8.0, -4.0));
        assert_eq!(t.left_derivative(4.0), 1.0);
        assert_eq!(t.left_derivative(5.0), 0.0);
        assert_eq!(t.left_derivative(8.5), 1.0);
    }

    #[test]
    fn wait_step_shape() {
        let t = MonotoneMap::WaitStep;
        assert_eq!(triangular(3.0), 6.0);
        assert_eq!(triangular(4.0), 10.0);
        assert_eq!(t.eval(100.0) - t.eval(96.0), 4.0);
        assert_eq!(t.eval(100.0), 10.0);
        assert_eq!(t.eval(96.0), 6.0);
        assert_eq!(t.eval(120.0), 10.0);
        assert_eq!(t.eval(9.0), 3.0);
        assert_eq!(t.eval(0.5), 0.5);
        assert_eq!(t.eval(-100.0), -10.0);
        for x in grid() {
            let y = t.eval(x);
            assert!(y.abs() <= x.abs().sqrt() + 1e-12 || x.abs() <= 1.0);
        }
    }

    #[test]
    fn sign_min_values() {
        let t = MonotoneMap::SignMin;
        assert_eq!(t.eval(4.0), 2.0);
        assert_eq!(t.eval(0.25), 0.25);
        assert_eq!(t.eval(-9.0), -3.0);
        assert_eq!(t.preimage(-3.0), (-9.0, -9.0));
    }

    #[test]
    fn maps_are_monotone_and_preimages_consistent() {
        let pl = MonotoneMap::piecewise_linear(vec![-1.0, 0.0, 2.0], vec![0.0, 0.0, 3.0]).unwrap();
        let maps = [
            MonotoneMap::Identity,
            MonotoneMap::affine(2.0, 1.0).unwrap(),
            MonotoneMap::CeilSqrt,
            MonotoneMap::Staircase,
            MonotoneMap::WaitStep,
            MonotoneMap::SignMin,
            pl,
            MonotoneMap::compose(MonotoneMap::SignMin, MonotoneMap::Staircase),
            MonotoneMap::compose(MonotoneMap::CeilSqrt, MonotoneMap::affine(0.5, -1.0).unwrap()),
        ];
        let ys: Vec<f64> = (-60..=60).map(|i| i as f64 * 0.25).collect();
        for t in &maps {
            t.validate().unwrap();
            assert_preimage_consistent(t, &ys);
            // left continuity at breakpoints
            for b in t.breakpoints(-50.0, 50.0) {
                let d = t.eval(b) - t.eval(b - 1e-10);
                assert!(d.abs() < 1e-6, "{t:?} not left-continuous at {b}");
            }
        }
    }

    #[test]
    fn numeric_preimage_matches_analytic() {
        let t = MonotoneMap::compose(MonotoneMap::Identity, MonotoneMap::Staircase);
        let (lo, hi) = t.preimage(3.0);
        assert_eq!((lo, hi), (9.0, 15.0));
        let pl = MonotoneMap::piecewise_linear(vec![0.0, 1.0], vec![0.0, 2.0]).unwrap();
        let (lo, hi) = pl.preimage(1.0);
        assert!((lo - 0.5).abs() < 1e-15 && (hi - 0.5).abs() < 1e-15);
        assert_eq!(pl.preimage(0.0).0, f64::NEG_INFINITY);
    }

    #[test]
    fn decreasing_table_rejected() {
        assert!(MonotoneMap::piecewise_linear(vec![0.0, 1.0], vec![1.0, 0.0]).is_err());
        assert!(MonotoneMap::affine(-1.0, 0.0).is_err());
    }
}
