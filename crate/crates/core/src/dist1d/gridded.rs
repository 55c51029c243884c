use std::path::Path;

use serde::{Deserialize, Serialize};

use super::special::{ln_norm_sf, norm_isf};
use crate::error::{Error, Result};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// How a gridded density continues beyond the last node on one side.
/// Every tail is continuous with the boundary density value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TailDescriptor {
    /// No mass beyond the window.
    #[default]
    None,
    /// `p(b)·e^{−rate·|x − b|}`.
    Exponential { rate: f64 },
    /// `p(b)·e^{−(x² − b²)/(2σ²)}`.
    Gaussian { sigma: f64 },
    /// `p(b)·(|x|/|b|)^{−exponent}`, `exponent > 1`.
    PowerLaw { exponent: f64 },
}

impl TailDescriptor {
    fn validate(&self, boundary: f64) -> Result<()> {
        let ok = match *self {
            TailDescriptor::None => true,
            TailDescriptor::Exponential { rate } => rate > 0.0 && rate.is_finite(),
            TailDescriptor::Gaussian { sigma } => sigma > 0.0 && sigma.is_finite(),
            TailDescriptor::PowerLaw { exponent } => exponent > 1.0 && boundary > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Construction(format!("invalid tail descriptor {self:?} at boundary {}", boundary)))
        }
    }

    /// `ln ∫_y^∞ tail`, in the outward coordinate `y ≥ b` (for the left tail
    /// coordinates are mirrored so that `b = −x_0`).
    fn ln_mass_beyond(&self, ln_pb: f64, b: f64, y: f64) -> f64 {
        if ln_pb == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        match *self {
            TailDescriptor::None => f64::NEG_INFINITY,
            TailDescriptor::Exponential { rate } => ln_pb - rate.ln() - rate * (y - b),
            TailDescriptor::Gaussian { sigma } => {
                ln_pb + b * b / (2.0 * sigma * sigma) + sigma.ln() + LN_SQRT_2PI + ln_norm_sf(y / sigma)
            }
            TailDescriptor::PowerLaw { exponent } => {
                ln_pb + b.ln() - (exponent - 1.0).ln() + (1.0 - exponent) * (y.ln() - b.ln())
            }
        }
    }

    fn ln_density(&self, ln_pb: f64, b: f64, y: f64) -> f64 {
        match *self {
            TailDescriptor::None => f64::NEG_INFINITY,
            TailDescriptor::Exponential { rate } => ln_pb - rate * (y - b),
            TailDescriptor::Gaussian { sigma } => ln_pb - (y * y - b * b) / (2.0 * sigma * sigma),
            TailDescriptor::PowerLaw { exponent } => ln_pb - exponent * (y.ln() - b.ln()),
        }
    }

    /// Outward coordinate `y` with `ln_mass_beyond(y) = ln_s`.
    fn inverse(&self, ln_pb: f64, b: f64, ln_s: f64) -> f64 {
        match *self {
            TailDescriptor::None => b,
            TailDescriptor::Exponential { rate } => b + (ln_pb - rate.ln() - ln_s) / rate,
            TailDescriptor::Gaussian { sigma } => {
                let shift = ln_pb + b * b / (2.0 * sigma * sigma) + sigma.ln() + LN_SQRT_2PI;
                let target = ln_s - shift;
                let z = if target > -700.0 {
                    norm_isf(target.exp())
                } else {
                    // solve ln Φ̄(z) = target by Newton on the asymptotic form
                    let mut z = (-2.0 * target).sqrt();
                    for _ in 0..50 {
                        let f = ln_norm_sf(z) - target;
                        z += f / z.max(1.0);
                    }
                    z
                };
                (sigma * z).max(b)
            }
            TailDescriptor::PowerLaw { exponent } => {
                let ln_c = ln_pb + b.ln() - (exponent - 1.0).ln();
                (b.ln() + (ln_s - ln_c) / (1.0 - exponent)).exp()
            }
        }
    }
}

/// A density given by its values on a strictly increasing node set,
/// interpolated linearly inside the window and continued by tail formulas.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GriddedSource", into = "GriddedSource")]
pub struct GriddedDensity {
    x: Vec<f64>,
    p: Vec<f64>,
    left_tail: TailDescriptor,
    right_tail: TailDescriptor,
    csv: Option<String>,
    cell_mass: Vec<f64>,
    /// `μ(−∞, x_i]`.
    cum: Vec<f64>,
    /// `μ[x_i, ∞)`.
    rcum: Vec<f64>,
    ln_left_mass: f64,
    ln_right_mass: f64,
}

/// Serialized form: inline tables or a CSV path with header `x,p`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GriddedSource {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub x: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub p: Vec<f64>,
    #[serde(default)]
    pub left_tail: TailDescriptor,
    #[serde(default)]
    pub right_tail: TailDescriptor,
}

impl TryFrom<GriddedSource> for GriddedDensity {
    type Error = Error;

    fn try_from(src: GriddedSource) -> Result<Self> {
        let (x, p) = match &src.csv {
            Some(path) => read_csv(Path::new(path))?,
            None => (src.x, src.p),
        };
        let mut g = GriddedDensity::new(x, p, src.left_tail, src.right_tail)?;
        g.csv = src.csv;
        Ok(g)
    }
}

impl From<GriddedDensity> for GriddedSource {
    fn from(g: GriddedDensity) -> Self {
        match g.csv {
            Some(path) => GriddedSource {
                csv: Some(path),
                x: Vec::new(),
                p: Vec::new(),
                left_tail: g.left_tail,
                right_tail: g.right_tail,
            },
            None => GriddedSource {
                csv: None,
                x: g.x,
                p: g.p,
                left_tail: g.left_tail,
                right_tail: g.right_tail,
            },
        }
    }
}

fn read_csv(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    #[derive(Deserialize)]
    struct Row {
        x: f64,
        p: f64,
    }
    let mut rdr = csv::Reader::from_path(path)?;
    let headers = rdr.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["x", "p"] {
        return Err(Error::Construction(format!(
            "{}: expected header `x,p`, found `{}`",
            path.display(),
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut xs = Vec::new();
    let mut ps = Vec::new();
    for row in rdr.deserialize() {
        let r: Row = row?;
        xs.push(r.x);
        ps.push(r.p);
    }
    Ok((xs, ps))
}

/// Tolerance on the raw total mass before rescaling to 1.
const NORMALIZATION_TOL: f64 = 1e-3;

impl GriddedDensity {
    pub fn new(x: Vec<f64>, mut p: Vec<f64>, left_tail: TailDescriptor, right_tail: TailDescriptor) -> Result<Self> {
        if x.len() < 2 || x.len() != p.len() {
            return Err(Error::Construction("gridded density needs at least two (x, p) rows".into()));
        }
        if x.iter().chain(&p).any(|v| !v.is_finite()) {
            return Err(Error::Construction("gridded density has non-finite entries".into()));
        }
        if x.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Construction("gridded nodes must be strictly increasing".into()));
        }
        if p.iter().any(|&v| v < 0.0) {
            return Err(Error::Construction("gridded density must be non-negative".into()));
        }
        left_tail.validate(-x[0])?;
        right_tail.validate(*x.last().unwrap())?;
        let raw = Self::assemble(&x, &p, left_tail, right_tail);
        let total = raw.total();
        if !((total - 1.0).abs() <= NORMALIZATION_TOL) {
            return Err(Error::Construction(format!(
                "gridded density integrates to {total}, not 1 within {NORMALIZATION_TOL}"
            )));
        }
        for v in &mut p {
            *v /= total;
        }
        Ok(Self::assemble(&x, &p, left_tail, right_tail))
    }

    fn assemble(x: &[f64], p: &[f64], left_tail: TailDescriptor, right_tail: TailDescriptor) -> Self {
        let n = x.len();
        let cell_mass: Vec<f64> = (0..n - 1).map(|i| 0.5 * (p[i] + p[i + 1]) * (x[i + 1] - x[i])).collect();
        let ln_left_mass = left_tail.ln_mass_beyond(p[0].ln(), -x[0], -x[0]);
        let ln_right_mass = right_tail.ln_mass_beyond(p[n - 1].ln(), x[n - 1], x[n - 1]);
        let mut cum = vec![0.0; n];
        cum[0] = ln_left_mass.exp();
        for i in 1..n {
            cum[i] = cum[i - 1] + cell_mass[i - 1];
        }
        let mut rcum = vec![0.0; n];
        rcum[n - 1] = ln_right_mass.exp();
        for i in (0..n - 1).rev() {
            rcum[i] = rcum[i + 1] + cell_mass[i];
        }
        Self {
            x: x.to_vec(),
            p: p.to_vec(),
            left_tail,
            right_tail,
            csv: None,
            cell_mass,
            cum,
            rcum,
            ln_left_mass,
            ln_right_mass,
        }
    }

    fn total(&self) -> f64 {
        self.rcum[0] + self.ln_left_mass.exp()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.x
    }

    pub fn values(&self) -> &[f64] {
        &self.p
    }

    pub fn tails(&self) -> (TailDescriptor, TailDescriptor) {
        (self.left_tail, self.right_tail)
    }

    pub fn support(&self) -> (f64, f64) {
        let lo = if self.left_tail == TailDescriptor::None || self.p[0] == 0.0 {
            self.x[0]
        } else {
            f64::NEG_INFINITY
        };
        let n = self.x.len();
        let hi = if self.right_tail == TailDescriptor::None || self.p[n - 1] == 0.0 {
            self.x[n - 1]
        } else {
            f64::INFINITY
        };
        (lo, hi)
    }

    fn cell(&self, x: f64) -> usize {
        (self.x.partition_point(|&v| v <= x) - 1).min(self.x.len() - 2)
    }

    /// `ln μ(−∞, x]`.
    pub fn ln_cdf(&self, x: f64) -> f64 {
        let n = self.x.len();
        if x < self.x[0] {
            return self.left_tail.ln_mass_beyond(self.p[0].ln(), -self.x[0], -x);
        }
        if x >= self.x[n - 1] {
            return (-self.ln_sf(x).exp()).ln_1p();
        }
        let i = self.cell(x);
        let h = self.x[i + 1] - self.x[i];
        let t = x - self.x[i];
        let partial = self.p[i] * t + (self.p[i + 1] - self.p[i]) * t * t / (2.0 * h);
        let v = self.cum[i] + partial;
        if v > 0.5 {
            (-self.ln_sf(x).exp()).ln_1p()
        } else {
            v.ln()
        }
    }

    /// `ln μ(x, ∞)`.
    pub fn ln_sf(&self, x: f64) -> f64 {
        let n = self.x.len();
        if x >= self.x[n - 1] {
            return self.right_tail.ln_mass_beyond(self.p[n - 1].ln(), self.x[n - 1], x);
        }
        if x < self.x[0] {
            return (-self.ln_cdf(x).exp()).ln_1p();
        }
        let i = self.cell(x);
        let h = self.x[i + 1] - self.x[i];
        let t = self.x[i + 1] - x;
        let partial = self.p[i + 1] * t + (self.p[i] - self.p[i + 1]) * t * t / (2.0 * h);
        let v = self.rcum[i + 1] + partial;
        if v > 0.5 {
            let c = self.cum[i] + self.p[i] * (x - self.x[i]) + (self.p[i + 1] - self.p[i]) * (x - self.x[i]).powi(2) / (2.0 * h);
            (-c).ln_1p()
        } else {
            v.ln()
        }
    }

    pub fn ln_density(&self, x: f64) -> f64 {
        let n = self.x.len();
        if x < self.x[0] {
            return self.left_tail.ln_density(self.p[0].ln(), -self.x[0], -x);
        }
        if x > self.x[n - 1] {
            return self.right_tail.ln_density(self.p[n - 1].ln(), self.x[n - 1], x);
        }
        let i = self.cell(x);
        let t = (x - self.x[i]) / (self.x[i + 1] - self.x[i]);
        (self.p[i] + t * (self.p[i + 1] - self.p[i])).ln()
    }

    /// `inf{x : F(x) ≥ u}`.
    pub fn quantile_lower(&self, u: f64) -> f64 {
        let n = self.x.len();
        let idx = self.cum.partition_point(|&c| c < u);
        if idx == 0 {
            if self.left_tail == TailDescriptor::None {
                return self.x[0];
            }
            return -self.left_tail.inverse(self.p[0].ln(), -self.x[0], u.ln());
        }
        if idx == n {
            return self.quantile_upper(1.0 - u);
        }
        let i = idx - 1;
        let h = self.x[i + 1] - self.x[i];
        let r = u - self.cum[i];
        let a = (self.p[i + 1] - self.p[i]) / (2.0 * h);
        let b = self.p[i];
        let disc = (b * b + 4.0 * a * r).max(0.0);
        let den = b + disc.sqrt();
        let t = if den > 0.0 { 2.0 * r / den } else { 0.0 };
        (self.x[i] + t.min(h)).min(self.x[i + 1])
    }

    /// `inf{x : μ(x, ∞) ≤ s}`.
    pub fn quantile_upper(&self, s: f64) -> f64 {
        let n = self.x.len();
        let idx = self.rcum.partition_point(|&c| c > s);
        if idx == 0 {
            return self.quantile_lower(1.0 - s);
        }
        if idx == n {
            if self.right_tail == TailDescriptor::None {
                return self.x[n - 1];
            }
            return self.right_tail.inverse(self.p[n - 1].ln(), self.x[n - 1], s.ln());
        }
        let i = idx - 1;
        let h = self.x[idx] - self.x[i];
        let r = s - self.rcum[idx];
        let a = (self.p[i] - self.p[idx]) / (2.0 * h);
        let b = self.p[idx];
        let disc = (b * b + 4.0 * a * r).max(0.0);
        let den = b + disc.sqrt();
        let t = if den > 0.0 { 2.0 * r / den } else { 0.0 };
        (self.x[idx] - t.min(h)).max(self.x[i])
    }

    pub fn breakpoints(&self, lo: f64, hi: f64) -> Vec<f64> {
        self.x.iter().copied().filter(|&v| v >= lo && v <= hi).collect()
    }

    pub fn ln_tail_masses(&self) -> (f64, f64) {
        (self.ln_left_mass, self.ln_right_mass)
    }
}
