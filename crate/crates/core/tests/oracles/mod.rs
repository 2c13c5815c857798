//! Brute-force oracles shared by the integration suites. Each stays
//! independent of the implementation path it checks: plain enumeration
//! over tuples, permutations, or cell assignments.

#![allow(dead_code)]

use partsearch::domain::Domain;
use partsearch::pls::PlsInstance;

/// Values of each variable supported by at least one injective assignment
/// of all variables; `None` when no such assignment exists.
pub fn alldiff_supported(domains: &[Domain]) -> Option<Vec<Vec<i32>>> {
    let n = domains.len();
    let mut supported: Vec<std::collections::BTreeSet<i32>> = vec![Default::default(); n];
    let mut any = false;
    let mut tuple = vec![0i32; n];
    fn enumerate(
        domains: &[Domain],
        var: usize,
        tuple: &mut Vec<i32>,
        supported: &mut [std::collections::BTreeSet<i32>],
        any: &mut bool,
    ) {
        if var == domains.len() {
            *any = true;
            for (v, &value) in tuple.iter().enumerate() {
                supported[v].insert(value);
            }
            return;
        }
        for value in domains[var].iter() {
            if tuple[..var].contains(&value) {
                continue;
            }
            tuple[var] = value;
            enumerate(domains, var + 1, tuple, supported, any);
        }
    }
    enumerate(domains, 0, &mut tuple, &mut supported, &mut any);
    if any {
        Some(
            supported
                .into_iter()
                .map(|s| s.into_iter().collect())
                .collect(),
        )
    } else {
        None
    }
}

/// All successor vectors that form a single Hamiltonian cycle on n cities.
pub fn hamiltonian_successors(n: usize) -> std::collections::BTreeSet<Vec<usize>> {
    let mut out = std::collections::BTreeSet::new();
    let mut perm: Vec<usize> = (0..n).collect();
    permute(&mut perm, 0, &mut |p| {
        let mut succ = vec![0usize; n];
        for i in 0..n {
            succ[p[i]] = p[(i + 1) % n];
        }
        if is_single_cycle(&succ) {
            out.insert(succ);
        }
    });
    out
}

fn is_single_cycle(succ: &[usize]) -> bool {
    let n = succ.len();
    let mut seen = 1usize;
    let mut cur = succ[0];
    while cur != 0 && seen <= n {
        cur = succ[cur];
        seen += 1;
    }
    cur == 0 && seen == n
}

fn permute(items: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, visit);
        items.swap(k, i);
    }
}

/// Optimal tour cost by enumerating all city orders.
pub fn tour_optimum(cost: &[Vec<i64>]) -> i64 {
    let n = cost.len();
    let mut best = i64::MAX;
    let mut perm: Vec<usize> = (1..n).collect();
    permute(&mut perm, 0, &mut |p| {
        let mut total = cost[0][p[0]];
        for w in p.windows(2) {
            total += cost[w[0]][w[1]];
        }
        total += cost[*p.last().unwrap()][0];
        best = best.min(total);
    });
    best
}

/// Minimum assignment cost by enumerating all permutations; `f64::INFINITY`
/// marks forbidden arcs.
pub fn assignment_minimum(cost: &[Vec<f64>]) -> f64 {
    let n = cost.len();
    let mut best = f64::INFINITY;
    let mut perm: Vec<usize> = (0..n).collect();
    permute(&mut perm, 0, &mut |p| {
        let total: f64 = (0..n).map(|i| cost[i][p[i]]).sum();
        if total < best {
            best = total;
        }
    });
    best
}

/// Whether a partial Latin square extends to a complete one.
pub fn pls_completable(instance: &PlsInstance) -> bool {
    let n = instance.n;
    let mut grid: Vec<Vec<u32>> = instance.grid.clone();
    let mut row_used = vec![vec![false; n + 1]; n];
    let mut col_used = vec![vec![false; n + 1]; n];
    for r in 0..n {
        for c in 0..n {
            let v = grid[r][c] as usize;
            if v != 0 {
                row_used[r][v] = true;
                col_used[c][v] = true;
            }
        }
    }
    fn solve(
        grid: &mut Vec<Vec<u32>>,
        row_used: &mut Vec<Vec<bool>>,
        col_used: &mut Vec<Vec<bool>>,
        cell: usize,
        n: usize,
    ) -> bool {
        if cell == n * n {
            return true;
        }
        let (r, c) = (cell / n, cell % n);
        if grid[r][c] != 0 {
            return solve(grid, row_used, col_used, cell + 1, n);
        }
        for v in 1..=n {
            if !row_used[r][v] && !col_used[c][v] {
                grid[r][c] = v as u32;
                row_used[r][v] = true;
                col_used[c][v] = true;
                if solve(grid, row_used, col_used, cell + 1, n) {
                    grid[r][c] = 0;
                    row_used[r][v] = false;
                    col_used[c][v] = false;
                    return true;
                }
                grid[r][c] = 0;
                row_used[r][v] = false;
                col_used[c][v] = false;
            }
        }
        false
    }
    solve(&mut grid, &mut row_used, &mut col_used, 0, n)
}
