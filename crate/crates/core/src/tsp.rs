//! Symmetric TSP on the successor model.
//!
//! One variable per city holds its successor; `alldifferent` plus a
//! no-subtour propagator keep leaves Hamiltonian. The value heuristic ranks
//! successors by the reduced costs of a linear assignment relaxation
//! (re-solved at every node on the current domains), whose bound also
//! prunes: with a cost ceiling, nodes whose assignment bound exceeds it
//! fail, and arcs whose bound-plus-reduced-cost exceeds it are filtered
//! from the domains. Equal reduced costs tie exactly on integer data.
//!
//! Runs stop at a known optimum: a leaf is accepted iff its tour cost hits
//! the target, so finding the optimum is measured, not proving it.

use std::cell::RefCell;
use std::rc::Rc;

use crate::assignment::{solve_assignment, ApSolution};
use crate::brancher::RankedValue;
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::search::{self, BranchPolicy, Model, SearchLimits, SearchStats, StrategyKind};
use crate::state::{ProblemState, Propagator, Space, VarId, Wipeout};

/// A symmetric TSP instance: non-negative integer costs, zero diagonal.
#[derive(Debug, Clone)]
pub struct TspInstance {
    pub name: String,
    pub n: usize,
    pub cost: Vec<Vec<i64>>,
}

impl TspInstance {
    pub fn from_matrix(name: impl Into<String>, cost: Vec<Vec<i64>>) -> Result<Self> {
        let n = cost.len();
        if n == 0 {
            return Err(Error::InvalidArgument("TspInstance: empty matrix".into()));
        }
        for (i, row) in cost.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidArgument(format!(
                    "TspInstance: row {i} has length {}",
                    row.len()
                )));
            }
            if row[i] != 0 {
                return Err(Error::InvalidArgument(format!(
                    "TspInstance: nonzero diagonal at {i}"
                )));
            }
            for (j, &c) in row.iter().enumerate() {
                if c < 0 {
                    return Err(Error::InvalidArgument(format!(
                        "TspInstance: negative cost at ({i},{j})"
                    )));
                }
                if cost[j][i] != c {
                    return Err(Error::InvalidArgument(format!(
                        "TspInstance: asymmetric at ({i},{j})"
                    )));
                }
            }
        }
        Ok(TspInstance {
            name: name.into(),
            n,
            cost,
        })
    }

    /// Parses a TSPLIB file with explicit edge weights in one of the
    /// FULL_MATRIX, LOWER_DIAG_ROW, UPPER_ROW or UPPER_DIAG_ROW formats.
    pub fn parse_tsplib(text: &str) -> Result<Self> {
        let mut name = String::new();
        let mut problem_type: Option<String> = None;
        let mut dimension: Option<usize> = None;
        let mut weight_type: Option<String> = None;
        let mut weight_format: Option<String> = None;
        let mut weights: Vec<i64> = Vec::new();
        let mut section_line = 0;
        let mut in_weights = false;

        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let lineno = idx + 1;
            if line.is_empty() {
                continue;
            }
            let upper = line.to_ascii_uppercase();
            if in_weights {
                if upper.starts_with("EOF") || upper.ends_with("_SECTION") {
                    in_weights = false;
                    continue;
                }
                for token in line.split_whitespace() {
                    let value: i64 = token.parse().map_err(|_| Error::Parse {
                        line: lineno,
                        message: format!("expected an integer weight, got `{token}`"),
                    })?;
                    weights.push(value);
                }
                continue;
            }
            if let Some((key, value)) = line.split_once(':') {
                let key = key.trim().to_ascii_uppercase();
                let value = value.trim().to_string();
                match key.as_str() {
                    "NAME" => name = value,
                    "TYPE" => problem_type = Some(value.to_ascii_uppercase()),
                    "DIMENSION" => {
                        dimension = Some(value.parse().map_err(|_| Error::Parse {
                            line: lineno,
                            message: format!("bad DIMENSION `{value}`"),
                        })?)
                    }
                    "EDGE_WEIGHT_TYPE" => weight_type = Some(value.to_ascii_uppercase()),
                    "EDGE_WEIGHT_FORMAT" => weight_format = Some(value.to_ascii_uppercase()),
                    _ => {}
                }
            } else if upper.starts_with("EDGE_WEIGHT_SECTION") {
                in_weights = true;
                section_line = lineno;
                if dimension.is_none() {
                    return Err(Error::Parse {
                        line: lineno,
                        message: "missing DIMENSION before EDGE_WEIGHT_SECTION".into(),
                    });
                }
            } else if upper.starts_with("EOF") {
                break;
            }
        }

        match problem_type.as_deref() {
            Some("TSP") => {}
            Some(other) => return Err(Error::UnsupportedFormat(format!("TYPE {other}"))),
            None => {
                return Err(Error::Parse {
                    line: 1,
                    message: "missing TYPE".into(),
                });
            }
        }
        let n = dimension.ok_or(Error::Parse {
            line: 1,
            message: "missing DIMENSION".into(),
        })?;
        if n < 2 {
            return Err(Error::Parse {
                line: 1,
                message: format!("DIMENSION {n} too small"),
            });
        }
        match weight_type.as_deref() {
            Some("EXPLICIT") => {}
            Some(other) => {
                return Err(Error::UnsupportedFormat(format!(
                    "EDGE_WEIGHT_TYPE {other}"
                )))
            }
            None => {
                return Err(Error::Parse {
                    line: 1,
                    message: "missing EDGE_WEIGHT_TYPE".into(),
                })
            }
        }
        let format = weight_format.ok_or(Error::Parse {
            line: 1,
            message: "missing EDGE_WEIGHT_FORMAT".into(),
        })?;
        let expected = match format.as_str() {
            "FULL_MATRIX" => n * n,
            "LOWER_DIAG_ROW" | "UPPER_DIAG_ROW" => n * (n + 1) / 2,
            "UPPER_ROW" => n * (n - 1) / 2,
            other => {
                return Err(Error::UnsupportedFormat(format!(
                    "EDGE_WEIGHT_FORMAT {other}"
                )))
            }
        };
        if weights.len() != expected {
            return Err(Error::Parse {
                line: section_line,
                message: format!(
                    "EDGE_WEIGHT_SECTION has {} entries, {format} with n={n} needs {expected}",
                    weights.len()
                ),
            });
        }

        let mut cost = vec![vec![0i64; n]; n];
        let mut it = weights.into_iter();
        match format.as_str() {
            "FULL_MATRIX" => {
                for i in 0..n {
                    for j in 0..n {
                        cost[i][j] = it.next().unwrap();
                    }
                }
            }
            "LOWER_DIAG_ROW" => {
                for i in 0..n {
                    for j in 0..=i {
                        let w = it.next().unwrap();
                        cost[i][j] = w;
                        cost[j][i] = w;
                    }
                }
            }
            "UPPER_DIAG_ROW" => {
                for i in 0..n {
                    for j in i..n {
                        let w = it.next().unwrap();
                        cost[i][j] = w;
                        cost[j][i] = w;
                    }
                }
            }
            "UPPER_ROW" => {
                for i in 0..n {
                    for j in i + 1..n {
                        let w = it.next().unwrap();
                        cost[i][j] = w;
                        cost[j][i] = w;
                    }
                }
            }
            _ => unreachable!(),
        }
        TspInstance::from_matrix(name, cost)
    }

    /// Cost of the tour encoded as a successor permutation.
    pub fn tour_cost(&self, successor: &[usize]) -> i64 {
        successor
            .iter()
            .enumerate()
            .map(|(i, &j)| self.cost[i][j])
            .sum()
    }
}

/// Forbids closing a partial chain into a subtour: for every maximal chain
/// of bound successors covering fewer than `n` cities, the chain's head is
/// removed from the domain of its tail's successor variable.
pub struct NoCycle {
    vars: Vec<VarId>,
}

impl NoCycle {
    pub fn new(vars: Vec<VarId>) -> Self {
        NoCycle { vars }
    }
}

impl Propagator for NoCycle {
    fn vars(&self) -> &[VarId] {
        &self.vars
    }

    fn propagate(&mut self, state: &mut ProblemState) -> std::result::Result<(), Wipeout> {
        let n = self.vars.len();
        let succ: Vec<Option<usize>> = (0..n)
            .map(|i| state.domain(self.vars[i]).singleton().map(|v| v as usize))
            .collect();
        let mut pred: Vec<Option<usize>> = vec![None; n];
        for (i, s) in succ.iter().enumerate() {
            if let Some(j) = *s {
                if j < n && pred[j].is_none() {
                    pred[j] = Some(i);
                }
            }
        }
        let mut visited = vec![false; n];
        // chains: head has a bound successor but no predecessor
        for head in 0..n {
            if succ[head].is_none() || pred[head].is_some() || visited[head] {
                continue;
            }
            let mut cur = head;
            let mut cities = 1usize;
            while let Some(next) = succ[cur] {
                if visited[cur] {
                    break;
                }
                visited[cur] = true;
                cur = next;
                cities += 1;
            }
            // cur is the tail: its successor is unbound
            if cities < n {
                state.remove(self.vars[cur], head as i32)?;
            }
        }
        // whatever bound variables remain lie on cycles
        for start in 0..n {
            if succ[start].is_none() || visited[start] {
                continue;
            }
            let mut cur = start;
            let mut cities = 0usize;
            loop {
                visited[cur] = true;
                cities += 1;
                cur = succ[cur].expect("cycle nodes are bound");
                if cur == start || visited[cur] {
                    break;
                }
            }
            if cur == start && cities < n {
                return Err(Wipeout);
            }
        }
        Ok(())
    }
}

/// State shared between the assignment-bound propagator and the model: the
/// cost ceiling and the relaxation solved at the current node.
pub struct ApShared {
    pub threshold: Option<i64>,
    pub last: Option<ApSolution>,
}

/// Solves the assignment relaxation on the current domains. Fails the node
/// when the bound exceeds the ceiling and filters arcs that no admissible
/// tour can use (`bound + reduced cost > ceiling`).
struct ApBound {
    cost: Rc<Vec<Vec<i64>>>,
    shared: Rc<RefCell<ApShared>>,
    vars: Vec<VarId>,
}

impl Propagator for ApBound {
    fn vars(&self) -> &[VarId] {
        &self.vars
    }

    fn propagate(&mut self, state: &mut ProblemState) -> std::result::Result<(), Wipeout> {
        let n = self.vars.len();
        let matrix: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let dom = state.domain(self.vars[i]);
                (0..n)
                    .map(|j| {
                        if dom.contains(j as i32) {
                            self.cost[i][j] as f64
                        } else {
                            f64::INFINITY
                        }
                    })
                    .collect()
            })
            .collect();
        let mut ap = solve_assignment(&matrix).map_err(|_| Wipeout)?;
        // dual-independent arc regrets: sharper ranks, sharper filtering
        ap.reduced = crate::assignment::exact_reduced_costs(&matrix, &ap);
        let threshold = self.shared.borrow().threshold;
        if let Some(limit) = threshold {
            if ap.lower_bound > limit {
                return Err(Wipeout);
            }
            let slack = (limit - ap.lower_bound) as f64;
            for i in 0..n {
                let doomed: Vec<i32> = state
                    .domain(self.vars[i])
                    .iter()
                    .filter(|&v| ap.reduced[i][v as usize] > slack)
                    .collect();
                for value in doomed {
                    state.remove(self.vars[i], value)?;
                }
            }
        }
        self.shared.borrow_mut().last = Some(ap);
        Ok(())
    }
}

/// Ranks the domain values of a successor variable by its reduced-cost row:
/// smaller reduced cost is more promising, exact equality ties.
pub fn reduced_cost_ranks(domain: &Domain, reduced_row: &[f64]) -> Vec<RankedValue> {
    domain
        .iter()
        .map(|v| RankedValue::new(v, -reduced_row[v as usize]))
        .collect()
}

pub struct TspModel {
    instance: Rc<TspInstance>,
    shared: Rc<RefCell<ApShared>>,
    stop_at: Option<i64>,
    pub tour: Option<Vec<usize>>,
    pub tour_cost: Option<i64>,
}

impl TspModel {
    fn successors(&self, space: &Space) -> Vec<usize> {
        (0..self.instance.n)
            .map(|i| space.domain(i).singleton().expect("leaf is bound") as usize)
            .collect()
    }
}

impl Model for TspModel {
    /// Chain order: follows bound successors from city 0 and branches on
    /// the next of the last bound city. When the chain ends at a
    /// partitioned, still-unbound variable, the lowest eligible variable is
    /// taken instead.
    fn select_var(&mut self, space: &Space, eligible: &[bool]) -> Option<VarId> {
        let n = space.num_vars();
        let mut seen = vec![false; n];
        let mut cur = 0usize;
        loop {
            if eligible[cur] {
                return Some(cur);
            }
            if seen[cur] {
                break;
            }
            seen[cur] = true;
            match space.domain(cur).singleton() {
                Some(next) => cur = next as usize,
                None => break,
            }
        }
        eligible.iter().position(|&e| e)
    }

    fn rank_values(&mut self, space: &Space, var: VarId) -> Vec<RankedValue> {
        let shared = self.shared.borrow();
        let ap = shared
            .last
            .as_ref()
            .expect("assignment solved at this node");
        reduced_cost_ranks(space.domain(var), &ap.reduced[var])
    }

    fn is_solution(&mut self, space: &Space) -> bool {
        let successors = self.successors(space);
        let cost = self.instance.tour_cost(&successors);
        match self.stop_at {
            Some(target) => cost == target,
            None => true,
        }
    }

    fn on_solution(&mut self, space: &Space) {
        let successors = self.successors(space);
        self.tour_cost = Some(self.instance.tour_cost(&successors));
        self.tour = Some(successors);
    }
}

/// Builds the propagated successor-model space plus the shared assignment
/// state. `threshold` is the initial cost ceiling.
pub fn build_space(
    instance: &TspInstance,
    threshold: Option<i64>,
) -> (Space, Rc<RefCell<ApShared>>) {
    let n = instance.n;
    let domains: Vec<Domain> = (0..n)
        .map(|i| Domain::new((0..n as i32).filter(|&j| j != i as i32)))
        .collect();
    let mut space = Space::new(domains);
    let vars: Vec<VarId> = (0..n).collect();
    space.add_propagator(Box::new(crate::alldiff::AllDifferent::new(vars.clone())));
    space.add_propagator(Box::new(NoCycle::new(vars.clone())));
    let shared = Rc::new(RefCell::new(ApShared {
        threshold,
        last: None,
    }));
    space.add_propagator(Box::new(ApBound {
        cost: Rc::new(instance.cost.clone()),
        shared: shared.clone(),
        vars,
    }));
    (space, shared)
}

#[derive(Debug)]
pub struct TspRun {
    pub stats: SearchStats,
    pub tour: Option<Vec<usize>>,
    pub cost: Option<i64>,
}

/// Searches for a tour of cost exactly `stop_at` (the known optimum) and
/// stops the moment one is found. Nodes whose assignment bound exceeds
/// `stop_at` are pruned, so optimality is never proven, only reached.
pub fn solve_tsp(
    instance: &TspInstance,
    policy: &BranchPolicy,
    strategy: StrategyKind,
    stop_at: i64,
    limits: &SearchLimits,
) -> TspRun {
    let (mut space, shared) = build_space(instance, Some(stop_at));
    let mut model = TspModel {
        instance: Rc::new(instance.clone()),
        shared,
        stop_at: Some(stop_at),
        tour: None,
        tour_cost: None,
    };
    let mut limits = *limits;
    limits.stop_at_objective = Some(stop_at);
    let stats = search::run(
        &mut space,
        &mut model,
        policy,
        strategy.exhaustive(),
        &limits,
        None,
    );
    TspRun {
        stats,
        tour: model.tour,
        cost: model.tour_cost,
    }
}

#[derive(Debug)]
pub struct OptimumReport {
    pub cost: Option<i64>,
    pub proven: bool,
    pub stats: SearchStats,
}

/// Exhaustive bounded search for the optimal tour cost: depth-first
/// branch-and-bound on reduced costs, restarting with the ceiling one below
/// each incumbent until the tree is exhausted.
pub fn optimal_tour_cost(instance: &TspInstance, limits: &SearchLimits) -> OptimumReport {
    let (mut space, shared) = build_space(instance, None);
    let mut best: Option<i64> = None;
    let mut total = SearchStats::default();
    let started = std::time::Instant::now();
    loop {
        {
            let mut s = shared.borrow_mut();
            s.threshold = best.map(|c| c - 1);
            s.last = None;
        }
        let mut model = TspModel {
            instance: Rc::new(instance.clone()),
            shared: shared.clone(),
            stop_at: None,
            tour: None,
            tour_cost: None,
        };
        let mut remaining = *limits;
        if let Some(max_time) = limits.max_time {
            remaining.max_time = Some(max_time.saturating_sub(started.elapsed()));
        }
        if let Some(max_fails) = limits.max_fails {
            remaining.max_fails = Some(max_fails.saturating_sub(total.fails));
        }
        let stats = search::dfs(
            &mut space,
            &mut model,
            &BranchPolicy::labelling(),
            &remaining,
        );
        total.fails += stats.fails;
        total.leaves += stats.leaves;
        total.found |= stats.found;
        total.limit_reached |= stats.limit_reached;
        if stats.limit_reached {
            total.elapsed = started.elapsed();
            return OptimumReport {
                cost: best,
                proven: false,
                stats: total,
            };
        }
        match model.tour_cost {
            Some(cost) => best = Some(cost),
            None => break,
        }
    }
    total.elapsed = started.elapsed();
    OptimumReport {
        cost: best,
        proven: true,
        stats: total,
    }
}
