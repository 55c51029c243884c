//! Exact minimum-cost transport between two small atom lists, solved with
//! the transportation simplex. It never looks at quantile functions, so it
//! serves as an independent check of the monotone-coupling cost.

use serde::{Deserialize, Serialize};

use crate::costfn::CostFunction;
use crate::dist1d::Distribution1D;
use crate::error::{Error, Result};

pub const ORACLE_MAX_ATOMS: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransportPlan {
    pub cost: f64,
    /// `plan[i][j]`: mass moved from source atom `i` to target atom `j`.
    pub plan: Vec<Vec<f64>>,
    pub pivots: usize,
}

/// Minimum of `Σ π_ij α(|x_i − y_j|)` over all couplings of two atom lists
/// with at most [`ORACLE_MAX_ATOMS`] atoms each.
pub fn transport_cost_oracle(alpha: &CostFunction, mu: &Distribution1D, nu: &Distribution1D) -> Result<TransportPlan> {
    let (a, b) = match (mu.atom_list(), nu.atom_list()) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::Precondition("the oracle needs two atom lists".into())),
    };
    if a.len() > ORACLE_MAX_ATOMS || b.len() > ORACLE_MAX_ATOMS {
        return Err(Error::Size(format!(
            "oracle accepts at most {ORACLE_MAX_ATOMS} atoms per measure, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    let cost: Vec<Vec<f64>> = a
        .locations()
        .iter()
        .map(|x| b.locations().iter().map(|y| alpha.eval_unchecked((x - y).abs())).collect())
        .collect();
    Ok(solve(&cost, a.weights(), b.weights()))
}

fn solve(cost: &[Vec<f64>], supply: &[f64], demand: &[f64]) -> TransportPlan {
    let (m, n) = (supply.len(), demand.len());
    let mut flow = vec![vec![0.0; n]; m];
    let mut basic = vec![vec![false; n]; m];

    // northwest-corner start: m + n − 1 basic cells, zeros included
    let (mut s, mut d) = (supply.to_vec(), demand.to_vec());
    let (mut i, mut j) = (0, 0);
    loop {
        let q = s[i].min(d[j]);
        flow[i][j] = q;
        basic[i][j] = true;
        s[i] -= q;
        d[j] -= q;
        if i + 1 == m && j + 1 == n {
            break;
        }
        if (s[i] <= d[j] && i + 1 < m) || j + 1 == n {
            i += 1;
        } else {
            j += 1;
        }
    }

    let mut pivots = 0;
    let scale = cost.iter().flatten().fold(1.0f64, |acc, c| acc.max(c.abs()));
    loop {
        let (u, v) = potentials(cost, &basic);
        // Bland's rule: first improving cell in index order
        let entering = (0..m)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .find(|&(i, j)| !basic[i][j] && cost[i][j] - u[i] - v[j] < -1e-13 * scale);
        let Some((ei, ej)) = entering else { break };
        let cycle = cycle_through(&basic, ei, ej);
        // cells at odd positions lose mass
        let mut theta = f64::INFINITY;
        let mut leaving = cycle[1];
        for &(ci, cj) in cycle.iter().skip(1).step_by(2) {
            if flow[ci][cj] < theta || (flow[ci][cj] == theta && (ci, cj) < leaving) {
                theta = flow[ci][cj];
                leaving = (ci, cj);
            }
        }
        for (k, &(ci, cj)) in cycle.iter().enumerate() {
            if k % 2 == 0 {
                flow[ci][cj] += theta;
            } else {
                flow[ci][cj] -= theta;
            }
        }
        basic[ei][ej] = true;
        basic[leaving.0][leaving.1] = false;
        flow[leaving.0][leaving.1] = 0.0;
        pivots += 1;
        if pivots > 10_000 {
            break;
        }
    }

    let total = (0..m)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| flow[i][j].max(0.0) * cost[i][j])
        .sum();
    TransportPlan {
        cost: total,
        plan: flow,
        pivots,
    }
}

/// Dual potentials with `u_i + v_j = c_ij` on basic cells and `u_0 = 0`.
fn potentials(cost: &[Vec<f64>], basic: &[Vec<bool>]) -> (Vec<f64>, Vec<f64>) {
    let (m, n) = (basic.len(), basic[0].len());
    let mut u = vec![f64::NAN; m];
    let mut v = vec![f64::NAN; n];
    u[0] = 0.0;
    let mut changed = true;
    while changed {
        changed = false;
        for i in 0..m {
            for j in 0..n {
                if !basic[i][j] {
                    continue;
                }
                if !u[i].is_nan() && v[j].is_nan() {
                    v[j] = cost[i][j] - u[i];
                    changed = true;
                } else if u[i].is_nan() && !v[j].is_nan() {
                    u[i] = cost[i][j] - v[j];
                    changed = true;
                }
            }
        }
    }
    (u, v)
}

/// The unique cycle formed by adding `(ei, ej)` to the basis tree, starting
/// at the entering cell and alternating column and row moves.
fn cycle_through(basic: &[Vec<bool>], ei: usize, ej: usize) -> Vec<(usize, usize)> {
    let (m, n) = (basic.len(), basic[0].len());
    // bipartite tree: rows 0..m, columns m..m+n; search a path from
    // column ej to row ei
    let total = m + n;
    let mut parent = vec![usize::MAX; total];
    let start = m + ej;
    let goal = ei;
    parent[start] = start;
    let mut stack = vec![start];
    while let Some(node) = stack.pop() {
        if node == goal {
            break;
        }
        let neighbors: Vec<usize> = if node < m {
            (0..n).filter(|&j| basic[node][j]).map(|j| m + j).collect()
        } else {
            let j = node - m;
            (0..m).filter(|&i| basic[i][j]).collect()
        };
        for nb in neighbors {
            if parent[nb] == usize::MAX {
                parent[nb] = node;
                stack.push(nb);
            }
        }
    }
    let mut path = vec![goal];
    let mut cur = goal;
    while cur != start {
        cur = parent[cur];
        path.push(cur);
    }
    // path runs row ei → … → column ej; walk it from column ej back
    let mut cells = vec![(ei, ej)];
    for w in path.windows(2).rev() {
        let (p, q) = (w[0], w[1]);
        let cell = if p < m { (p, q - m) } else { (q, p - m) };
        cells.push(cell);
    }
    cells
}
