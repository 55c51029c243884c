use serde::{Deserialize, Serialize};

use super::Split;
use crate::error::{Error, Result};

/// Finitely many point masses, sorted by location, merged and normalized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>")]
pub struct AtomList {
    xs: Vec<f64>,
    ws: Vec<f64>,
    /// `cum[i] = Σ_{j ≤ i} w_j`.
    cum: Vec<f64>,
    /// `rcum[i] = Σ_{j ≥ i} w_j`, with a trailing 0.
    rcum: Vec<f64>,
}

/// Total weight may deviate from 1 by this much before rescaling.
const WEIGHT_TOL: f64 = 1e-9;

impl AtomList {
    pub fn new(mut points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Construction("atom list is empty".into()));
        }
        if points.iter().any(|(x, w)| !x.is_finite() || !w.is_finite() || *w < 0.0) {
            return Err(Error::Construction("atoms need finite locations and non-negative weights".into()));
        }
        points.retain(|p| p.1 > 0.0);
        points.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut xs: Vec<f64> = Vec::with_capacity(points.len());
        let mut ws: Vec<f64> = Vec::with_capacity(points.len());
        for (x, w) in points {
            if xs.last() == Some(&x) {
                *ws.last_mut().unwrap() += w;
            } else {
                xs.push(x);
                ws.push(w);
            }
        }
        let total: f64 = ws.iter().sum();
        if !((total - 1.0).abs() <= WEIGHT_TOL) {
            return Err(Error::Construction(format!("atom weights sum to {total}, not 1")));
        }
        for w in &mut ws {
            *w /= total;
        }
        let n = xs.len();
        let mut cum = vec![0.0; n];
        let mut acc = 0.0;
        for i in 0..n {
            acc += ws[i];
            cum[i] = acc;
        }
        let mut rcum = vec![0.0; n + 1];
        for i in (0..n).rev() {
            rcum[i] = rcum[i + 1] + ws[i];
        }
        Ok(Self { xs, ws, cum, rcum })
    }

    pub fn locations(&self) -> &[f64] {
        &self.xs
    }

    pub fn weights(&self) -> &[f64] {
        &self.ws
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs.iter().copied().zip(self.ws.iter().copied())
    }

    pub fn support(&self) -> (f64, f64) {
        (self.xs[0], *self.xs.last().unwrap())
    }

    pub fn mass_at(&self, x: f64) -> f64 {
        match self.xs.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
            Ok(i) => self.ws[i],
            Err(_) => 0.0,
        }
    }

    pub(crate) fn split(&self, x: f64) -> Split {
        let idx = self.xs.partition_point(|&v| v < x);
        let left = if idx == 0 { f64::NEG_INFINITY } else { self.cum[idx - 1].ln() };
        if idx < self.xs.len() && self.xs[idx] == x {
            Split {
                left,
                atom: self.ws[idx].ln(),
                right: self.rcum[idx + 1].ln(),
            }
        } else {
            Split {
                left,
                atom: f64::NEG_INFINITY,
                right: self.rcum[idx].ln(),
            }
        }
    }

    pub(crate) fn quantile_lower(&self, u: f64) -> f64 {
        let idx = self.cum.partition_point(|&c| c < u);
        self.xs[idx.min(self.xs.len() - 1)]
    }

    pub(crate) fn quantile_upper(&self, s: f64) -> f64 {
        let n = self.xs.len();
        let idx = (0..n).find(|&i| self.rcum[i + 1] <= s).unwrap_or(n - 1);
        self.xs[idx]
    }

    /// `(F(x_i), μ(x_i, ∞))` for every atom but the last.
    pub(crate) fn quantile_breaks(&self) -> Vec<(f64, f64)> {
        (0..self.xs.len() - 1).map(|i| (self.cum[i], self.rcum[i + 1])).collect()
    }

    /// Cumulative weights `F(x_i)`, computed from whichever end is closer.
    pub fn cumulative(&self) -> Vec<(f64, f64)> {
        (0..self.xs.len()).map(|i| (self.cum[i], self.rcum[i + 1])).collect()
    }
}

impl TryFrom<Vec<(f64, f64)>> for AtomList {
    type Error = Error;

    fn try_from(v: Vec<(f64, f64)>) -> Result<Self> {
        AtomList::new(v)
    }
}

impl From<AtomList> for Vec<(f64, f64)> {
    fn from(a: AtomList) -> Self {
        a.iter().collect()
    }
}
