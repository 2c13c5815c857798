//! Depth-first based search strategies over branch lists.
//!
//! A search interleaves branching with propagation. Branching runs in two
//! phases: while some variable has neither been branched on nor become
//! bound, the brancher partitions its domain into weighted branches (phase
//! one); once every variable is branched or bound, any variables left
//! unbound form a sub-problem that is searched by plain depth-first
//! labelling and contributes nothing to the discrepancy (phase two).
//!
//! A branching decision consumes discrepancy equal to the number of
//! branches preceding it at its node, while the discrepancy *reported* for
//! a path accumulates the branch weights (one per preceding domain value,
//! so the two coincide under labelling). LDS runs iterations k = 0, 1, ...
//! and iteration k visits exactly the leaves whose consumed discrepancy is
//! k, in depth-first order, so every leaf is visited once per full run.
//! DDS iteration i admits non-heuristic branches only at decision depths
//! below i and requires the decision at depth i-1 to be non-heuristic, so
//! iterations partition the leaves by the depth of their deepest
//! discrepancy. Fails count backtracks from failed nodes, cumulatively
//! across iterations.

use std::time::{Duration, Instant};

use crate::brancher::{branches_for, group_ties, labelling_branches, BranchMode, RankedValue};
use crate::state::{Space, VarId};

/// How a value ranking is turned into branches.
#[derive(Debug, Clone, Copy)]
pub struct BranchPolicy {
    pub mode: BranchMode,
    pub equivalence_pct: f64,
}

impl BranchPolicy {
    pub fn labelling() -> Self {
        BranchPolicy {
            mode: BranchMode::Labelling,
            equivalence_pct: 0.0,
        }
    }

    pub fn partitioning() -> Self {
        BranchPolicy {
            mode: BranchMode::Partitioning,
            equivalence_pct: 0.0,
        }
    }
}

/// Search budget. `stop_at_objective` is interpreted by the problem model
/// (the TSP back-end stops on a tour of exactly that cost).
#[derive(Debug, Clone, Copy, Default)]
pub struct SearchLimits {
    pub max_fails: Option<u64>,
    pub max_time: Option<Duration>,
    pub stop_at_objective: Option<i64>,
}

/// What a run did: backtracks from failed nodes, leaves visited, the
/// discrepancy of the first solution, and wall time.
#[derive(Debug, Clone, Default)]
pub struct SearchStats {
    pub fails: u64,
    pub leaves: u64,
    pub solution_discrepancy: Option<u64>,
    pub elapsed: Duration,
    pub found: bool,
    pub limit_reached: bool,
}

/// Problem-specific hooks: variable order, value ranking, and solution
/// acceptance. Propagators live in the [`Space`].
pub trait Model {
    /// Picks the next variable among `eligible` (never called with an empty
    /// mask). In phase one a variable is eligible while unbranched and
    /// unbound; in phase two while unbound.
    fn select_var(&mut self, space: &Space, eligible: &[bool]) -> Option<VarId>;

    /// Ranks the current domain values of `var`, higher is better.
    fn rank_values(&mut self, space: &Space, var: VarId) -> Vec<RankedValue>;

    /// Called at leaves (every variable bound, propagators at fixpoint).
    fn is_solution(&mut self, space: &Space) -> bool;

    /// Called once when `is_solution` accepted a leaf, while the bound state
    /// is still live.
    fn on_solution(&mut self, space: &Space) {
        let _ = space;
    }
}

#[derive(Debug, Clone, Copy)]
pub enum Strategy {
    Dfs,
    Lds { max_discrepancy: u64 },
    Dds { max_iterations: usize },
}

/// Strategy selection without budgets. The engine itself caps LDS at the
/// largest weight any path can carry and DDS at the variable count, so the
/// unbounded forms run to exhaustion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrategyKind {
    Dfs,
    Lds,
    Dds,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 3] = [StrategyKind::Dfs, StrategyKind::Lds, StrategyKind::Dds];

    pub fn exhaustive(self) -> Strategy {
        match self {
            StrategyKind::Dfs => Strategy::Dfs,
            StrategyKind::Lds => Strategy::Lds {
                max_discrepancy: u64::MAX,
            },
            StrategyKind::Dds => Strategy::Dds {
                max_iterations: usize::MAX,
            },
        }
    }
}

impl std::fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StrategyKind::Dfs => write!(f, "dfs"),
            StrategyKind::Lds => write!(f, "lds"),
            StrategyKind::Dds => write!(f, "dds"),
        }
    }
}

#[derive(Clone, Copy)]
enum IterCtx {
    Dfs,
    Lds { remaining: u64 },
    Dds { iteration: usize },
}

#[derive(PartialEq)]
enum Flow {
    Continue,
    Stop,
}

/// Leaf observer for enumeration callers: receives the bound state and the
/// leaf's total discrepancy, returns false to stop the search.
pub type Observer<'a> = &'a mut dyn FnMut(&Space, u64) -> bool;

pub fn dfs<M: Model>(
    space: &mut Space,
    model: &mut M,
    policy: &BranchPolicy,
    limits: &SearchLimits,
) -> SearchStats {
    run(space, model, policy, Strategy::Dfs, limits, None)
}

pub fn lds<M: Model>(
    space: &mut Space,
    model: &mut M,
    policy: &BranchPolicy,
    limits: &SearchLimits,
    max_discrepancy: u64,
) -> SearchStats {
    run(
        space,
        model,
        policy,
        Strategy::Lds { max_discrepancy },
        limits,
        None,
    )
}

pub fn dds<M: Model>(
    space: &mut Space,
    model: &mut M,
    policy: &BranchPolicy,
    limits: &SearchLimits,
    max_iterations: usize,
) -> SearchStats {
    run(
        space,
        model,
        policy,
        Strategy::Dds { max_iterations },
        limits,
        None,
    )
}

/// Plain DFS labelling over the unbound variables, contributing zero
/// discrepancy: the search applied inside partitioning sub-problems,
/// exposed for solving one directly.
pub fn solve_subproblem<M: Model>(
    space: &mut Space,
    model: &mut M,
    limits: &SearchLimits,
) -> SearchStats {
    let mut engine = Engine::new(space, model, BranchPolicy::labelling(), limits, None);
    engine.branched.iter_mut().for_each(|b| *b = true);
    engine.run(Strategy::Dfs)
}

/// Runs a strategy with a leaf observer; the regular entry points are the
/// observer-free wrappers above.
pub fn run<'a, M: Model>(
    space: &'a mut Space,
    model: &'a mut M,
    policy: &BranchPolicy,
    strategy: Strategy,
    limits: &'a SearchLimits,
    observer: Option<Observer<'a>>,
) -> SearchStats {
    Engine::new(space, model, *policy, limits, observer).run(strategy)
}

struct Engine<'a, M: Model> {
    space: &'a mut Space,
    model: &'a mut M,
    policy: BranchPolicy,
    limits: &'a SearchLimits,
    observer: Option<Observer<'a>>,
    stats: SearchStats,
    branched: Vec<bool>,
    started: Instant,
}

impl<'a, M: Model> Engine<'a, M> {
    fn new(
        space: &'a mut Space,
        model: &'a mut M,
        policy: BranchPolicy,
        limits: &'a SearchLimits,
        observer: Option<Observer<'a>>,
    ) -> Self {
        let n = space.num_vars();
        Engine {
            space,
            model,
            policy,
            limits,
            observer,
            stats: SearchStats::default(),
            branched: vec![false; n],
            started: Instant::now(),
        }
    }

    fn run(mut self, strategy: Strategy) -> SearchStats {
        let root = self.space.propagate_fixpoint();
        if root.is_failure() {
            self.stats.fails = 1;
            self.stats.elapsed = self.started.elapsed();
            return self.stats;
        }
        match strategy {
            Strategy::Dfs => {
                self.descend(IterCtx::Dfs, 0, 0, None);
            }
            Strategy::Lds { max_discrepancy } => {
                // Iterations beyond the largest weight any root-to-leaf path
                // can accumulate are vacuous.
                let cap = max_discrepancy.min(self.root_weight_bound());
                for k in 0..=cap {
                    if k > 0 {
                        // refresh node-local propagator state at the root
                        self.space.propagate_fixpoint();
                    }
                    if self.descend(IterCtx::Lds { remaining: k }, 0, 0, None) == Flow::Stop {
                        break;
                    }
                }
            }
            Strategy::Dds { max_iterations } => {
                let cap = max_iterations.min(self.space.num_vars());
                for i in 0..=cap {
                    if i > 0 {
                        self.space.propagate_fixpoint();
                    }
                    if self.descend(IterCtx::Dds { iteration: i }, 0, 0, None) == Flow::Stop {
                        break;
                    }
                }
            }
        }
        self.stats.elapsed = self.started.elapsed();
        self.stats
    }

    /// Upper bound on the total weight of any path: every remaining branch
    /// decision can add at most |domain| - 1.
    fn root_weight_bound(&self) -> u64 {
        (0..self.space.num_vars())
            .filter(|&v| !self.branched[v])
            .map(|v| (self.space.domain(v).len() as u64).saturating_sub(1))
            .sum()
    }

    fn over_limits(&mut self) -> bool {
        if let Some(max_fails) = self.limits.max_fails {
            if self.stats.fails >= max_fails {
                self.stats.limit_reached = true;
                return true;
            }
        }
        if let Some(max_time) = self.limits.max_time {
            if self.started.elapsed() >= max_time {
                self.stats.limit_reached = true;
                return true;
            }
        }
        false
    }

    fn descend(
        &mut self,
        ctx: IterCtx,
        decision_depth: usize,
        path_weight: u64,
        deepest_nonzero: Option<usize>,
    ) -> Flow {
        if self.over_limits() {
            return Flow::Stop;
        }
        let n = self.space.num_vars();
        let mut eligible = vec![false; n];
        let mut any = false;
        let mut consumable = 0u64;
        for v in 0..n {
            let len = self.space.domain(v).len();
            if !self.branched[v] && len > 1 {
                eligible[v] = true;
                any = true;
                consumable += len as u64 - 1;
            }
        }

        if !any {
            // Branching boundary: only leaves whose discrepancy belongs to
            // the current iteration are visited below here.
            match ctx {
                IterCtx::Lds { remaining } if remaining > 0 => return Flow::Continue,
                IterCtx::Dds { iteration } => {
                    let home = match deepest_nonzero {
                        None => 0,
                        Some(d) => d + 1,
                    };
                    if home != iteration {
                        return Flow::Continue;
                    }
                }
                _ => {}
            }
            return self.subproblem(path_weight);
        }

        // An iteration's leftover budget must be consumable below this node.
        if let IterCtx::Lds { remaining } = ctx {
            if remaining > consumable {
                return Flow::Continue;
            }
        }

        let var = match self.model.select_var(self.space, &eligible) {
            Some(v) => v,
            None => return Flow::Continue,
        };
        debug_assert!(eligible[var]);
        let ranked = self.model.rank_values(self.space, var);
        let groups = group_ties(&ranked, self.policy.equivalence_pct)
            .expect("rank_values produced an ungroupable ranking");
        let branches = branches_for(self.policy.mode, &groups);

        for (index, branch) in branches.iter().enumerate() {
            // discrepancy consumed: branches preceding this one at the node
            let cost = index as u64;
            let (child_ctx, admissible) = match ctx {
                IterCtx::Dfs => (IterCtx::Dfs, true),
                IterCtx::Lds { remaining } => {
                    if cost <= remaining {
                        (
                            IterCtx::Lds {
                                remaining: remaining - cost,
                            },
                            true,
                        )
                    } else {
                        (ctx, false)
                    }
                }
                IterCtx::Dds { iteration } => {
                    let ok = if decision_depth + 1 < iteration {
                        true
                    } else if decision_depth + 1 == iteration {
                        index > 0
                    } else {
                        index == 0
                    };
                    (ctx, ok)
                }
            };
            if !admissible {
                continue;
            }
            self.space.push_level();
            let result = self
                .space
                .restrict(var, &branch.allowed)
                .expect("branch is a subset of the current domain");
            if result.is_failure() {
                self.space.pop_level();
                self.stats.fails += 1;
                if self.over_limits() {
                    return Flow::Stop;
                }
                continue;
            }
            self.branched[var] = true;
            let deepest = if index > 0 {
                Some(decision_depth)
            } else {
                deepest_nonzero
            };
            let flow = self.descend(
                child_ctx,
                decision_depth + 1,
                path_weight + branch.weight,
                deepest,
            );
            self.branched[var] = false;
            self.space.pop_level();
            if flow == Flow::Stop {
                return Flow::Stop;
            }
        }
        Flow::Continue
    }

    /// Depth-first labelling over the unbound variables; no branching
    /// decision in here increases the discrepancy.
    fn subproblem(&mut self, path_weight: u64) -> Flow {
        if self.over_limits() {
            return Flow::Stop;
        }
        let n = self.space.num_vars();
        let mut eligible = vec![false; n];
        let mut any = false;
        for v in 0..n {
            if self.space.domain(v).len() > 1 {
                eligible[v] = true;
                any = true;
            }
        }
        if !any {
            return self.leaf(path_weight);
        }
        let var = match self.model.select_var(self.space, &eligible) {
            Some(v) => v,
            None => return Flow::Continue,
        };
        let ranked = self.model.rank_values(self.space, var);
        let groups = group_ties(&ranked, self.policy.equivalence_pct)
            .expect("rank_values produced an ungroupable ranking");
        for branch in labelling_branches(&groups) {
            self.space.push_level();
            let result = self
                .space
                .restrict(var, &branch.allowed)
                .expect("branch is a subset of the current domain");
            if result.is_failure() {
                self.space.pop_level();
                self.stats.fails += 1;
                if self.over_limits() {
                    return Flow::Stop;
                }
                continue;
            }
            let flow = self.subproblem(path_weight);
            self.space.pop_level();
            if flow == Flow::Stop {
                return Flow::Stop;
            }
        }
        Flow::Continue
    }

    fn leaf(&mut self, path_weight: u64) -> Flow {
        self.stats.leaves += 1;
        if let Some(observer) = self.observer.as_mut() {
            if !observer(self.space, path_weight) {
                return Flow::Stop;
            }
        }
        if self.model.is_solution(self.space) {
            self.stats.found = true;
            self.stats.solution_discrepancy = Some(path_weight);
            self.model.on_solution(self.space);
            return Flow::Stop;
        }
        Flow::Continue
    }
}
