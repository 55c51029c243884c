use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How a [`GridFunction`] continues beyond its outermost nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Extension {
    Constant,
    Linear { left_slope: f64, right_slope: f64 },
}

/// A piecewise-linear function through `(nodes[i], values[i])`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    nodes: Vec<f64>,
    values: Vec<f64>,
    extension: Extension,
}

impl GridFunction {
    pub fn new(nodes: Vec<f64>, values: Vec<f64>, extension: Extension) -> Result<Self> {
        if nodes.is_empty() || nodes.len() != values.len() {
            return Err(Error::Construction(format!(
                "need matching non-empty node and value lists, got {} and {}",
                nodes.len(),
                values.len()
            )));
        }
        if nodes.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Construction("nodes must be strictly increasing".into()));
        }
        if nodes.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(Error::Construction("nodes and values must be finite".into()));
        }
        if let Extension::Linear { left_slope, right_slope } = extension {
            if !(left_slope.is_finite() && right_slope.is_finite()) {
                return Err(Error::Construction("extension slopes must be finite".into()));
            }
        }
        Ok(Self {
            nodes,
            values,
            extension,
        })
    }

    pub fn from_fn<F: Fn(f64) -> f64>(nodes: Vec<f64>, f: F, extension: Extension) -> Result<Self> {
        let values = nodes.iter().map(|&x| f(x)).collect();
        Self::new(nodes, values, extension)
    }

    pub fn constant(c: f64, nodes: Vec<f64>) -> Result<Self> {
        Self::from_fn(nodes, |_| c, Extension::Constant)
    }

    /// Finite stand-in for the function that is `0` on `(−∞, x]` and `+∞`
    /// beyond: `0` up to `x`, `penalty` from the next node on.
    pub fn step_penalty(x: f64, penalty: f64, nodes: &[f64]) -> Result<Self> {
        let mut pts: Vec<f64> = nodes.to_vec();
        pts.push(x);
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts.dedup();
        let values = pts.iter().map(|&t| if t <= x { 0.0 } else { penalty }).collect();
        Self::new(pts, values, Extension::Constant)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn extension(&self) -> Extension {
        self.extension
    }

    fn outer_slopes(&self) -> (f64, f64) {
        match self.extension {
            Extension::Constant => (0.0, 0.0),
            Extension::Linear { left_slope, right_slope } => (left_slope, right_slope),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.nodes.len();
        let (ls, rs) = self.outer_slopes();
        if x <= self.nodes[0] {
            return self.values[0] + ls * (x - self.nodes[0]);
        }
        if x >= self.nodes[n - 1] {
            return self.values[n - 1] + rs * (x - self.nodes[n - 1]);
        }
        let i = self.nodes.partition_point(|&t| t <= x);
        let (x0, x1) = (self.nodes[i - 1], self.nodes[i]);
        let (y0, y1) = (self.values[i - 1], self.values[i]);
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    /// Slope of the piece containing `x`; at a node, the larger of the two
    /// one-sided slopes in absolute value (an upper gradient).
    pub fn gradient_norm(&self, x: f64) -> f64 {
        let n = self.nodes.len();
        let (ls, rs) = self.outer_slopes();
        let slope = |i: usize| -> f64 {
            // slope of the piece to the right of node i (i + 1 == n: extension)
            if i + 1 >= n {
                rs
            } else {
                (self.values[i + 1] - self.values[i]) / (self.nodes[i + 1] - self.nodes[i])
            }
        };
        if x < self.nodes[0] {
            return ls.abs();
        }
        if x > self.nodes[n - 1] {
            return rs.abs();
        }
        let i = self.nodes.partition_point(|&t| t < x);
        if i < n && self.nodes[i] == x {
            let left = if i == 0 { ls } else { slope(i - 1) };
            return left.abs().max(slope(i).abs());
        }
        slope(i - 1).abs()
    }

    /// Largest adjacent difference quotient, extensions included.
    pub fn lipschitz(&self) -> f64 {
        let (ls, rs) = self.outer_slopes();
        self.nodes
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(x, y)| ((y[1] - y[0]) / (x[1] - x[0])).abs())
            .fold(ls.abs().max(rs.abs()), f64::max)
    }

    /// `inf f` over the line, `-inf` when an extension decreases forever.
    pub fn infimum(&self) -> f64 {
        let (ls, rs) = self.outer_slopes();
        if ls > 0.0 || rs < 0.0 {
            return f64::NEG_INFINITY;
        }
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn is_bounded(&self) -> bool {
        self.outer_slopes() == (0.0, 0.0)
    }

    pub fn shifted(&self, c: f64) -> Self {
        Self {
            nodes: self.nodes.clone(),
            values: self.values.iter().map(|v| v + c).collect(),
            extension: self.extension,
        }
    }
}
