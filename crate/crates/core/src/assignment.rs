//! Linear assignment by shortest augmenting paths (Hungarian method),
//! keeping the dual potentials so reduced costs come out with the optimum.
//!
//! Costs are `f64` with `f64::INFINITY` encoding forbidden arcs. On integer
//! inputs every intermediate quantity stays integral, so reduced costs are
//! exact and equal reduced costs tie exactly.

use crate::error::{Error, Result};

/// Optimal assignment with dual-feasible potentials: `reduced[i][j] =
/// cost[i][j] - row_duals[i] - col_duals[j] >= 0`, zero on assignment arcs,
/// and `lower_bound` the assignment cost.
#[derive(Debug, Clone)]
pub struct ApSolution {
    pub assignment: Vec<usize>,
    pub lower_bound: i64,
    pub reduced: Vec<Vec<f64>>,
    pub row_duals: Vec<f64>,
    pub col_duals: Vec<f64>,
}

pub fn solve_assignment(cost: &[Vec<f64>]) -> Result<ApSolution> {
    let n = cost.len();
    if n == 0 {
        return Err(Error::InvalidArgument(
            "solve_assignment: empty matrix".into(),
        ));
    }
    for (i, row) in cost.iter().enumerate() {
        if row.len() != n {
            return Err(Error::InvalidArgument(format!(
                "solve_assignment: row {i} has length {} in a {n}x{n} problem",
                row.len()
            )));
        }
        if row.iter().any(|c| c.is_nan()) {
            return Err(Error::InvalidArgument(format!(
                "solve_assignment: NaN cost in row {i}"
            )));
        }
    }

    // 1-based with a virtual column 0 (e-maxx formulation).
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut p = vec![0usize; n + 1]; // row matched to column j
    let mut way = vec![0usize; n + 1];

    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            if !delta.is_finite() {
                return Err(Error::InfeasibleAssignment(format!(
                    "row {} has no finite arc left",
                    i0 - 1
                )));
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut assignment = vec![0usize; n];
    for j in 1..=n {
        assignment[p[j] - 1] = j - 1;
    }
    let row_duals: Vec<f64> = u[1..].to_vec();
    let col_duals: Vec<f64> = v[1..].to_vec();
    let reduced: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if cost[i][j].is_finite() {
                        cost[i][j] - row_duals[i] - col_duals[j]
                    } else {
                        f64::INFINITY
                    }
                })
                .collect()
        })
        .collect();
    let lower_bound = (0..n).map(|i| cost[i][assignment[i]]).sum::<f64>() as i64;

    Ok(ApSolution {
        assignment,
        lower_bound,
        reduced,
        row_duals,
        col_duals,
    })
}

/// Exact reduced costs: `exact[i][j]` is the increase of the optimal
/// assignment cost when arc `(i, j)` is forced into the solution. Zero on
/// assignment arcs, at least the dual reduced cost elsewhere, and
/// independent of the dual solution the Hungarian method happened to end
/// on, so equal entries are structural ties rather than dual degeneracy.
///
/// Computed from the residual graph: contracting each matched pair into one
/// node, re-matching row `r` to the column of row `s` costs the dual
/// reduced cost of that arc, and forcing `(i, j)` closes a cheapest cycle
/// through the matching.
pub fn exact_reduced_costs(cost: &[Vec<f64>], ap: &ApSolution) -> Vec<Vec<f64>> {
    let n = cost.len();
    let rc = |i: usize, j: usize| -> f64 {
        if cost[i][j].is_finite() {
            cost[i][j] - ap.row_duals[i] - ap.col_duals[j]
        } else {
            f64::INFINITY
        }
    };
    let mut owner = vec![0usize; n];
    for (row, &col) in ap.assignment.iter().enumerate() {
        owner[col] = row;
    }
    // all-pairs shortest paths over the contracted digraph, one Dijkstra
    // per source; arc s -> r costs rc(s, assignment[r])
    let mut dist = vec![vec![f64::INFINITY; n]; n];
    for source in 0..n {
        let d = &mut dist[source];
        let mut done = vec![false; n];
        d[source] = 0.0;
        for _ in 0..n {
            let mut best = f64::INFINITY;
            let mut node = usize::MAX;
            for (r, &dr) in d.iter().enumerate() {
                if !done[r] && dr < best {
                    best = dr;
                    node = r;
                }
            }
            if node == usize::MAX {
                break;
            }
            done[node] = true;
            for r in 0..n {
                if !done[r] {
                    let step = rc(node, ap.assignment[r]);
                    if best + step < d[r] {
                        d[r] = best + step;
                    }
                }
            }
        }
    }
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if !cost[i][j].is_finite() {
                        f64::INFINITY
                    } else if ap.assignment[i] == j {
                        0.0
                    } else {
                        rc(i, j) + dist[owner[j]][i]
                    }
                })
                .collect()
        })
        .collect()
}
