use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::DivergenceRule;

/// Node sets, truncation levels and tolerances shared by every numerical
/// routine in the crate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub window: (f64, f64),
    pub nodes_per_side: usize,
    /// Geometric ratio for the nodes that refine toward the center.
    pub ratio: f64,
    /// Quantile-space truncation: dyadic panels stop below this level.
    pub eps: f64,
    pub tol: f64,
    /// Number of window-doubling levels used for suprema and their traces.
    pub levels: usize,
    pub divergence: DivergenceRule,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            window: (-40.0, 40.0),
            nodes_per_side: 400,
            ratio: 1.25,
            eps: 1e-12,
            tol: 1e-6,
            levels: 7,
            divergence: DivergenceRule::default(),
        }
    }
}

impl GridSpec {
    pub fn with_window(mut self, lo: f64, hi: f64) -> Self {
        self.window = (lo, hi);
        self
    }

    pub fn with_nodes(mut self, n: usize) -> Self {
        self.nodes_per_side = n;
        self
    }

    pub fn with_levels(mut self, levels: usize) -> Self {
        self.levels = levels;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.window;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::Domain(format!("degenerate window [{lo}, {hi}]")));
        }
        if self.nodes_per_side < 2 {
            return Err(Error::Domain("nodes_per_side must be at least 2".into()));
        }
        if !(self.ratio > 1.0) {
            return Err(Error::Domain(format!("ratio {} must exceed 1", self.ratio)));
        }
        if !(self.eps > 0.0 && self.eps < 1e-3) {
            return Err(Error::Domain(format!("eps {} must lie in (0, 1e-3)", self.eps)));
        }
        Ok(())
    }

    /// Number of dyadic levels needed to reach `eps` from 1/2.
    pub fn dyadic_depth(&self) -> usize {
        ((0.5 / self.eps).log2().ceil() as usize).clamp(8, 1000)
    }

    /// Offsets `(0, extent]` from a center: half uniform, half geometric
    /// toward the center with ratio `self.ratio`. Sorted and deduplicated.
    pub fn side_offsets(&self, extent: f64) -> Vec<f64> {
        let n = self.nodes_per_side;
        let uniform = n / 2;
        let geometric = n - uniform;
        let mut out: Vec<f64> = (1..=uniform)
            .map(|i| extent * i as f64 / uniform as f64)
            .collect();
        let mut g = extent;
        for _ in 0..geometric {
            g /= self.ratio;
            out.push(g);
        }
        out.retain(|&x| x > 0.0 && x.is_finite());
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        out.dedup();
        out
    }

    fn side_extents(&self, center: f64) -> (f64, f64) {
        let (lo, hi) = self.window;
        let width = hi - lo;
        let plus = if hi - center > 0.0 { hi - center } else { width };
        let minus = if center - lo > 0.0 { center - lo } else { width };
        (plus, minus)
    }

    /// Outward node positions on both sides of `center` at refinement
    /// `level` (the window extent is doubled once per level). Each vector is
    /// ordered from the center outward.
    pub fn sup_nodes(&self, center: f64, level: usize) -> (Vec<f64>, Vec<f64>) {
        let scale = 2f64.powi(level as i32);
        let (ep, em) = self.side_extents(center);
        let plus = self
            .side_offsets(ep * scale)
            .into_iter()
            .map(|d| center + d)
            .collect();
        let minus = self
            .side_offsets(em * scale)
            .into_iter()
            .map(|d| center - d)
            .collect();
        (plus, minus)
    }

    /// `2·nodes_per_side + 1` equally spaced nodes over the window.
    pub fn linear_nodes(&self) -> Vec<f64> {
        linspace(self.window.0, self.window.1, 2 * self.nodes_per_side + 1)
    }
}

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let step = (hi - lo) / (n - 1) as f64;
    (0..n)
        .map(|i| if i + 1 == n { hi } else { lo + step * i as f64 })
        .collect()
}
