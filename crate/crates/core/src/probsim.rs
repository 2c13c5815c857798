//! Analytic comparison of labelling and partitioning trees.
//!
//! A [`ProbTreeSpec`] fixes, per level, the probability that each branch
//! (in heuristic order) leads toward a solution; probabilities are constant
//! over the tree and equal exactly where the heuristic ties. The probability
//! of a leaf is the product of its branch probabilities, and enumeration in
//! strategy order yields the cumulative probability-of-success curves. No
//! sampling is involved: curves are exact, constraint propagation is not
//! modelled.
//!
//! The dominance theorem compares the two trees at the granularity of their
//! depth-n nodes: labelling places a leaf at depth n where partitioning
//! places a sub-problem whose leaves all share one success probability.
//! After k such node visits, the partitioning traversal has accumulated at
//! least the success mass of the labelling one, for every k and any of the
//! three strategies. Per-leaf prefix sums do not dominate in general: a
//! sub-problem's trailing leaves can be overtaken by a high-probability
//! labelling leaf, which is visible already on width-3, depth-2 trees.

use std::io::Write;

use rand::Rng;

use crate::batch;
use crate::brancher::BranchMode;
use crate::domain::Domain;
use crate::error::{Error, Result};
pub use crate::search::StrategyKind;
use crate::search::{self, Model, SearchLimits, Strategy};
use crate::state::{Space, VarId};

const LEVEL_SUM_TOLERANCE: f64 = 1e-12;
/// Tolerance for the dominance inequality between prefix sums.
pub const DOMINANCE_TOLERANCE: f64 = 1e-12;

/// Per-level branch probabilities of a fixed-width search tree, in
/// heuristic (non-increasing) order. Equal adjacent probabilities are ties.
#[derive(Debug, Clone)]
pub struct ProbTreeSpec {
    probs: Vec<Vec<f64>>,
    width: usize,
    group_sizes: Vec<Vec<usize>>,
}

impl ProbTreeSpec {
    /// Validates and derives the tie structure: per level, probabilities
    /// must be non-increasing, non-negative, and sum to one within 1e-12.
    pub fn new(probs: Vec<Vec<f64>>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidArgument("ProbTreeSpec: zero depth".into()));
        }
        let width = probs[0].len();
        if width == 0 {
            return Err(Error::InvalidArgument("ProbTreeSpec: zero width".into()));
        }
        for (level, p) in probs.iter().enumerate() {
            if p.len() != width {
                return Err(Error::InvalidArgument(format!(
                    "ProbTreeSpec: level {level} has width {} != {width}",
                    p.len()
                )));
            }
            if p.iter().any(|x| !x.is_finite() || *x < 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "ProbTreeSpec: level {level} has an invalid probability"
                )));
            }
            if p.windows(2).any(|w| w[0] < w[1]) {
                return Err(Error::InvalidArgument(format!(
                    "ProbTreeSpec: level {level} is not in heuristic order"
                )));
            }
            let sum: f64 = p.iter().sum();
            if (sum - 1.0).abs() > LEVEL_SUM_TOLERANCE {
                return Err(Error::InvalidArgument(format!(
                    "ProbTreeSpec: level {level} sums to {sum}"
                )));
            }
        }
        let group_sizes = probs
            .iter()
            .map(|p| {
                let mut sizes = Vec::new();
                let mut run = 1;
                for i in 1..p.len() {
                    if p[i] == p[i - 1] {
                        run += 1;
                    } else {
                        sizes.push(run);
                        run = 1;
                    }
                }
                sizes.push(run);
                sizes
            })
            .collect();
        Ok(ProbTreeSpec {
            probs,
            width,
            group_sizes,
        })
    }

    pub fn depth(&self) -> usize {
        self.probs.len()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn level_probs(&self, level: usize) -> &[f64] {
        &self.probs[level]
    }

    /// Sizes of the tie groups of a level, in heuristic order.
    pub fn tie_groups(&self, level: usize) -> &[usize] {
        &self.group_sizes[level]
    }

    pub fn has_tie(&self) -> bool {
        self.group_sizes.iter().any(|g| g.iter().any(|&s| s > 1))
    }

    /// Index of the tie group that `value` belongs to at `level`.
    pub fn group_of(&self, level: usize, value: usize) -> usize {
        let mut covered = 0;
        for (gi, &size) in self.group_sizes[level].iter().enumerate() {
            covered += size;
            if value < covered {
                return gi;
            }
        }
        panic!("value {value} out of range at level {level}")
    }

    pub fn total_leaves(&self) -> Option<u64> {
        (self.width as u64).checked_pow(self.depth() as u32)
    }

    /// Largest total weight any root-to-leaf path can accumulate.
    pub fn max_total_discrepancy(&self) -> u64 {
        (self.width as u64 - 1) * self.depth() as u64
    }
}

/// Probability that the leaf reached by `path` (branch indices per level,
/// in heuristic order) is a solution: the product of its branch
/// probabilities.
pub fn leaf_probability(spec: &ProbTreeSpec, path: &[usize]) -> Result<f64> {
    if path.len() != spec.depth() {
        return Err(Error::InvalidArgument(format!(
            "leaf_probability: path length {} != depth {}",
            path.len(),
            spec.depth()
        )));
    }
    let mut p = 1.0;
    for (level, &choice) in path.iter().enumerate() {
        if choice >= spec.width() {
            return Err(Error::InvalidArgument(format!(
                "leaf_probability: branch {choice} out of range at level {level}"
            )));
        }
        p *= spec.probs[level][choice];
    }
    Ok(p)
}

fn strategy_for_spec(kind: StrategyKind, spec: &ProbTreeSpec) -> Strategy {
    match kind {
        StrategyKind::Dfs => Strategy::Dfs,
        StrategyKind::Lds => Strategy::Lds {
            max_discrepancy: spec.max_total_discrepancy(),
        },
        StrategyKind::Dds => Strategy::Dds {
            max_iterations: spec.depth(),
        },
    }
}

struct ProbModel<'s> {
    spec: &'s ProbTreeSpec,
}

impl Model for ProbModel<'_> {
    fn select_var(&mut self, _space: &Space, eligible: &[bool]) -> Option<VarId> {
        eligible.iter().position(|&e| e)
    }

    fn rank_values(&mut self, space: &Space, var: VarId) -> Vec<crate::brancher::RankedValue> {
        space
            .domain(var)
            .iter()
            .map(|v| crate::brancher::RankedValue::new(v, self.spec.probs[var][v as usize]))
            .collect()
    }

    fn is_solution(&mut self, _space: &Space) -> bool {
        false
    }
}

/// Success probabilities of the first `cap` leaves, in the exact order the
/// strategy visits them on the labelling or partitioning tree.
pub fn ordered_leaves(
    spec: &ProbTreeSpec,
    mode: BranchMode,
    strategy: StrategyKind,
    cap: usize,
) -> Vec<f64> {
    ordered_leaves_with_paths(spec, mode, strategy, cap)
        .into_iter()
        .map(|(_, p)| p)
        .collect()
}

/// Like [`ordered_leaves`], also reporting each leaf's path (the branch
/// index chosen at every level).
pub fn ordered_leaves_with_paths(
    spec: &ProbTreeSpec,
    mode: BranchMode,
    strategy: StrategyKind,
    cap: usize,
) -> Vec<(Vec<usize>, f64)> {
    let domains = vec![Domain::range(0, spec.width() as i32 - 1); spec.depth()];
    let mut space = Space::new(domains);
    let mut model = ProbModel { spec };
    let mut collected: Vec<(Vec<usize>, f64)> = Vec::new();
    let mut observer = |space: &Space, _disc: u64| {
        let path: Vec<usize> = (0..spec.depth())
            .map(|v| space.domain(v).singleton().expect("leaf is bound") as usize)
            .collect();
        let p = leaf_probability(spec, &path).expect("leaf path is valid");
        collected.push((path, p));
        collected.len() < cap
    };
    let policy = search::BranchPolicy {
        mode,
        equivalence_pct: 0.0,
    };
    search::run(
        &mut space,
        &mut model,
        &policy,
        strategy_for_spec(strategy, spec),
        &SearchLimits::default(),
        Some(&mut observer),
    );
    collected
}

/// Running prefix sums of leaf success probabilities; point `k` (1-based)
/// is the cumulative probability after `k` leaves.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    values: Vec<f64>,
}

impl Curve {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Cumulative probability after `k` leaves (`k` is 1-based).
    pub fn at(&self, k: usize) -> Option<f64> {
        if k == 0 {
            None
        } else {
            self.values.get(k - 1).copied()
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn final_value(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }
}

pub fn cumulative_curve(leaf_probs: &[f64]) -> Curve {
    let mut sum = 0.0;
    Curve {
        values: leaf_probs
            .iter()
            .map(|p| {
                sum += p;
                sum
            })
            .collect(),
    }
}

/// Success mass of each depth-n node in strategy visit order: the leaves
/// themselves for labelling, and whole sub-problem blocks (consecutive
/// leaves sharing every level's tie group) for partitioning.
pub fn ordered_depth_n_masses(
    spec: &ProbTreeSpec,
    mode: BranchMode,
    strategy: StrategyKind,
    cap: usize,
) -> Vec<f64> {
    let leaves = ordered_leaves_with_paths(spec, mode, strategy, cap);
    match mode {
        BranchMode::Labelling => leaves.into_iter().map(|(_, p)| p).collect(),
        BranchMode::Partitioning => {
            let mut masses: Vec<f64> = Vec::new();
            let mut previous: Option<Vec<usize>> = None;
            for (path, p) in leaves {
                let groups: Vec<usize> = path
                    .iter()
                    .enumerate()
                    .map(|(level, &v)| spec.group_of(level, v))
                    .collect();
                if previous.as_ref() == Some(&groups) {
                    *masses.last_mut().unwrap() += p;
                } else {
                    masses.push(p);
                    previous = Some(groups);
                }
            }
            masses
        }
    }
}

/// A prefix at which the labelling sum exceeded the partitioning sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DominanceViolation {
    pub k: usize,
    pub labelling_sum: f64,
    pub partitioning_sum: f64,
}

/// Checks the prefix-sum dominance of partitioning over labelling at every
/// k, within [`DOMINANCE_TOLERANCE`]. Both sides are indexed by depth-n
/// node visits: `labelling` holds one leaf probability per entry,
/// `partitioning_blocks` one sub-problem mass per entry (a shorter
/// sequence, since a block covers one or more leaves).
pub fn check_dominance(
    labelling: &[f64],
    partitioning_blocks: &[f64],
) -> Option<DominanceViolation> {
    let mut lab_sum = 0.0;
    let mut prt_sum = 0.0;
    for (i, lab) in labelling.iter().enumerate() {
        lab_sum += lab;
        if let Some(prt) = partitioning_blocks.get(i) {
            prt_sum += prt;
        }
        if prt_sum < lab_sum - DOMINANCE_TOLERANCE {
            return Some(DominanceViolation {
                k: i + 1,
                labelling_sum: lab_sum,
                partitioning_sum: prt_sum,
            });
        }
    }
    None
}

#[derive(Debug, Clone)]
pub enum TheoremVerdict {
    Pass,
    Violated(DominanceViolation),
}

impl TheoremVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, TheoremVerdict::Pass)
    }
}

/// Verifies the dominance inequality by full enumeration of both trees
/// under the given strategy: after k depth-n node visits (k leaves for
/// labelling, k sub-problem blocks for partitioning), the partitioning tree
/// has accumulated at least the labelling tree's success mass. Errs when
/// the tree has more than `enumeration_bound` leaves.
pub fn verify_theorem(
    spec: &ProbTreeSpec,
    strategy: StrategyKind,
    enumeration_bound: u64,
) -> Result<TheoremVerdict> {
    let total = spec.total_leaves().unwrap_or(u64::MAX);
    if total > enumeration_bound {
        return Err(Error::SizeBoundExceeded {
            total,
            bound: enumeration_bound,
        });
    }
    let lab = ordered_leaves(spec, BranchMode::Labelling, strategy, total as usize);
    let prt = ordered_depth_n_masses(spec, BranchMode::Partitioning, strategy, total as usize);
    debug_assert_eq!(lab.len(), total as usize);
    Ok(match check_dominance(&lab, &prt) {
        None => TheoremVerdict::Pass,
        Some(v) => TheoremVerdict::Violated(v),
    })
}

/// Levels that carry a tie when a fraction of the `depth` branching
/// decisions tie: `t = round(fraction * depth)` ties at indices
/// `floor(j * depth / t)`, evenly spread.
pub fn tie_levels(depth: usize, tie_fraction: f64) -> Vec<usize> {
    let t = (tie_fraction * depth as f64).round() as usize;
    let t = t.min(depth);
    (0..t).map(|j| j * depth / t.max(1)).collect()
}

/// Heuristic branch probabilities for one level. Width 3 without a tie is
/// (0.95, 0.04, 0.01); a tie averages the top two into an exact pair
/// (0.495, 0.495, 0.01). Other widths keep the 0.95 head and split the
/// rest in decreasing powers of four.
pub fn level_probabilities(width: usize, tie: bool) -> Vec<f64> {
    assert!(width >= 1);
    if width == 1 {
        return vec![1.0];
    }
    let mut probs = Vec::with_capacity(width);
    probs.push(0.95);
    let tail_weights: Vec<f64> = (0..width - 1)
        .map(|i| 4f64.powi((width - 2 - i) as i32))
        .collect();
    let total: f64 = tail_weights.iter().sum();
    for w in tail_weights {
        probs.push(0.05 * w / total);
    }
    if tie {
        let avg = (probs[0] + probs[1]) / 2.0;
        probs[0] = avg;
        probs[1] = avg;
    }
    probs
}

/// The fixed-width tree with ties spread evenly over the levels.
pub fn build_tree_spec(depth: usize, width: usize, tie_fraction: f64) -> Result<ProbTreeSpec> {
    let ties = tie_levels(depth, tie_fraction);
    let probs = (0..depth)
        .map(|level| level_probabilities(width, width >= 2 && ties.contains(&level)))
        .collect();
    ProbTreeSpec::new(probs)
}

/// Like [`build_tree_spec`] but placing the tie levels uniformly at random.
pub fn build_tree_spec_seeded(
    depth: usize,
    width: usize,
    tie_fraction: f64,
    seed: u64,
) -> Result<ProbTreeSpec> {
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    let t = ((tie_fraction * depth as f64).round() as usize).min(depth);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut levels: Vec<usize> = (0..depth).collect();
    levels.shuffle(&mut rng);
    let ties: Vec<usize> = levels.into_iter().take(t).collect();
    let probs = (0..depth)
        .map(|level| level_probabilities(width, width >= 2 && ties.contains(&level)))
        .collect();
    ProbTreeSpec::new(probs)
}

/// The depth-30, branch-width-3 comparison: cumulative curves for labelling
/// and partitioning under one strategy, enumerated lazily for the first
/// `cap` leaves.
pub fn curve_experiment(
    tie_fraction: f64,
    strategy: StrategyKind,
    cap: usize,
) -> Result<(Curve, Curve)> {
    let spec = build_tree_spec(30, 3, tie_fraction)?;
    let (lab, prt) = batch::join(
        || ordered_leaves(&spec, BranchMode::Labelling, strategy, cap),
        || ordered_leaves(&spec, BranchMode::Partitioning, strategy, cap),
    );
    Ok((cumulative_curve(&lab), cumulative_curve(&prt)))
}

/// CSV with one row per leaf index: `k,cum_prob_labelling,cum_prob_partitioning`.
pub fn write_curves_csv(
    out: &mut dyn Write,
    labelling: &Curve,
    partitioning: &Curve,
) -> std::io::Result<()> {
    writeln!(out, "k,cum_prob_labelling,cum_prob_partitioning")?;
    for (i, (lab, prt)) in labelling
        .values()
        .iter()
        .zip(partitioning.values().iter())
        .enumerate()
    {
        writeln!(out, "{},{},{}", i + 1, lab, prt)?;
    }
    Ok(())
}

/// Splittable per-trial seeding.
pub fn mix_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A random spec with integer-weight probabilities, so ties are exact and
/// distinct ranks are strictly ordered. With `force_tie` at least one level
/// carries a tie group of size >= 2.
pub fn random_spec<R: Rng>(
    rng: &mut R,
    max_depth: usize,
    max_width: usize,
    force_tie: bool,
) -> ProbTreeSpec {
    let depth = rng.gen_range(1..=max_depth.max(1));
    let min_width = if force_tie { 2 } else { 1 };
    let width = rng.gen_range(min_width..=max_width.max(min_width));
    let tie_level = if force_tie {
        rng.gen_range(0..depth)
    } else {
        depth
    };
    let mut probs = Vec::with_capacity(depth);
    for level in 0..depth {
        let mut sizes: Vec<usize> = Vec::new();
        let mut left = width;
        while left > 0 {
            let s = rng.gen_range(1..=left);
            sizes.push(s);
            left -= s;
        }
        if level == tie_level && sizes.iter().all(|&s| s < 2) {
            // merge the first two singleton groups into a tie
            sizes.remove(0);
            sizes[0] += 1;
        }
        // distinct integer weights, descending
        let mut weights: Vec<u32> = Vec::new();
        while weights.len() < sizes.len() {
            let w = rng.gen_range(1..=60u32);
            if !weights.contains(&w) {
                weights.push(w);
            }
        }
        weights.sort_unstable_by(|a, b| b.cmp(a));
        let total: f64 = sizes
            .iter()
            .zip(weights.iter())
            .map(|(&s, &w)| s as f64 * w as f64)
            .sum();
        let mut level_probs = Vec::with_capacity(width);
        for (&s, &w) in sizes.iter().zip(weights.iter()) {
            for _ in 0..s {
                level_probs.push(w as f64 / total);
            }
        }
        probs.push(level_probs);
    }
    ProbTreeSpec::new(probs).expect("random spec construction is valid")
}

/// A random spec guaranteed to rank at least one level strictly, so its
/// best and worst leaves differ; used as the negative control where a
/// corrupted order must produce a detectable violation.
pub fn random_nonuniform_spec<R: Rng>(
    rng: &mut R,
    max_depth: usize,
    max_width: usize,
) -> ProbTreeSpec {
    loop {
        let spec = random_spec(rng, max_depth, max_width.max(2), true);
        if (0..spec.depth()).any(|l| spec.tie_groups(l).len() >= 2) {
            return spec;
        }
    }
}

/// Outcome of a batch of randomized theorem checks.
#[derive(Debug, Clone)]
pub struct TrialReport {
    pub trials: u64,
    pub passes_per_strategy: [u64; 3],
    pub first_violation: Option<(u64, StrategyKind, DominanceViolation)>,
}

impl TrialReport {
    pub fn all_passed(&self) -> bool {
        self.first_violation.is_none()
    }
}

/// Runs `trials` random specs, each checked under DFS, LDS and DDS.
/// Deterministic in `seed`; trials run in parallel when enabled.
pub fn run_theorem_trials(
    trials: u64,
    max_depth: usize,
    max_width: usize,
    seed: u64,
    enumeration_bound: u64,
) -> Result<TrialReport> {
    use rand::SeedableRng;
    let outcomes = batch::map_indexed(trials as usize, |i| {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(mix_seed(seed, i as u64));
        let spec = random_spec(&mut rng, max_depth, max_width, i % 2 == 0);
        let mut per_strategy = [true; 3];
        let mut violation = None;
        for (s, strategy) in StrategyKind::ALL.iter().enumerate() {
            match verify_theorem(&spec, *strategy, enumeration_bound) {
                Ok(TheoremVerdict::Pass) => {}
                Ok(TheoremVerdict::Violated(v)) => {
                    per_strategy[s] = false;
                    if violation.is_none() {
                        violation = Some((i as u64, *strategy, v));
                    }
                }
                Err(e) => return Err(e),
            }
        }
        Ok((per_strategy, violation))
    });
    let mut report = TrialReport {
        trials,
        passes_per_strategy: [0; 3],
        first_violation: None,
    };
    for outcome in outcomes {
        let (per_strategy, violation) = outcome?;
        for (s, passed) in per_strategy.iter().enumerate() {
            if *passed {
                report.passes_per_strategy[s] += 1;
            }
        }
        if report.first_violation.is_none() {
            report.first_violation = violation;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example_spec() -> ProbTreeSpec {
        ProbTreeSpec::new(vec![vec![0.495, 0.495, 0.01], vec![0.95, 0.04, 0.01]]).unwrap()
    }

    #[test]
    fn leaf_probability_is_the_product() {
        let spec = example_spec();
        assert!((leaf_probability(&spec, &[0, 0]).unwrap() - 0.47025).abs() < 1e-15);
        assert!((leaf_probability(&spec, &[1, 1]).unwrap() - 0.0198).abs() < 1e-15);
    }

    #[test]
    fn width_one_tree_has_probability_one() {
        let spec = ProbTreeSpec::new(vec![vec![1.0], vec![1.0], vec![1.0]]).unwrap();
        assert_eq!(leaf_probability(&spec, &[0, 0, 0]).unwrap(), 1.0);
    }

    #[test]
    fn invalid_paths_are_rejected() {
        let spec = example_spec();
        assert!(leaf_probability(&spec, &[0]).is_err());
        assert!(leaf_probability(&spec, &[0, 3]).is_err());
    }

    #[test]
    fn tie_structure_is_derived() {
        let spec = example_spec();
        assert_eq!(spec.tie_groups(0), &[2, 1]);
        assert_eq!(spec.tie_groups(1), &[1, 1, 1]);
        assert!(spec.has_tie());
    }

    #[test]
    fn lds_labelling_order_on_example() {
        // leaf visit order by branch indices:
        // (0,0); (0,1),(1,0); (0,2),(1,1),(2,0); (1,2),(2,1); (2,2)
        let spec = example_spec();
        let leaves = ordered_leaves_with_paths(&spec, BranchMode::Labelling, StrategyKind::Lds, 9);
        let expect_paths = [
            [0, 0],
            [0, 1],
            [1, 0],
            [0, 2],
            [1, 1],
            [2, 0],
            [1, 2],
            [2, 1],
            [2, 2],
        ];
        for ((path, _), want) in leaves.iter().zip(expect_paths.iter()) {
            assert_eq!(path.as_slice(), want.as_slice());
        }
        let expect_probs = [0.47025, 0.0198, 0.47025];
        for ((_, p), want) in leaves.iter().zip(expect_probs.iter()) {
            assert!((p - want).abs() < 1e-15, "{p} vs {want}");
        }
    }

    #[test]
    fn lds_partitioning_first_subproblem_is_the_tie() {
        let spec = example_spec();
        let leaves = ordered_leaves(&spec, BranchMode::Partitioning, StrategyKind::Lds, 2);
        assert!((leaves[0] - 0.47025).abs() < 1e-15);
        assert!((leaves[1] - 0.47025).abs() < 1e-15);
    }

    #[test]
    fn lds_partitioning_subproblem_order_on_example() {
        // sub-problems (tie, 0); (tie, 1), (c, 0); (tie, 2), (c, 1); (c, 2)
        // carrying discrepancies 0; 1, 2; 2, 3; 4
        let spec = example_spec();
        let masses = ordered_depth_n_masses(&spec, BranchMode::Partitioning, StrategyKind::Lds, 9);
        let expected = [0.9405, 0.0396, 0.0095, 0.0099, 0.0004, 0.0001];
        assert_eq!(masses.len(), expected.len());
        for (got, want) in masses.iter().zip(expected.iter()) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
        let leaves =
            ordered_leaves_with_paths(&spec, BranchMode::Partitioning, StrategyKind::Lds, 9);
        // one discrepancy per sub-problem, in visit order
        let mut discs: Vec<u64> = Vec::new();
        let mut prev: Option<(usize, usize)> = None;
        for (path, _) in &leaves {
            let g0 = spec.group_of(0, path[0]);
            let key = (g0, path[1]);
            if prev != Some(key) {
                let weight0 = if g0 == 0 { 0u64 } else { 2 };
                discs.push(weight0 + path[1] as u64);
                prev = Some(key);
            }
        }
        assert_eq!(discs, vec![0, 1, 2, 2, 3, 4]);
    }

    #[test]
    fn no_ties_makes_the_trees_identical() {
        let spec = ProbTreeSpec::new(vec![vec![0.7, 0.2, 0.1], vec![0.5, 0.3, 0.2]]).unwrap();
        for strategy in StrategyKind::ALL {
            let lab = ordered_leaves(&spec, BranchMode::Labelling, strategy, 9);
            let prt = ordered_leaves(&spec, BranchMode::Partitioning, strategy, 9);
            assert_eq!(lab, prt);
        }
    }

    #[test]
    fn cumulative_curve_is_prefix_sums() {
        let curve = cumulative_curve(&[0.5, 0.25]);
        assert_eq!(curve.values(), &[0.5, 0.75]);
        assert!(cumulative_curve(&[]).is_empty());
    }

    #[test]
    fn theorem_passes_on_the_example() {
        let spec = example_spec();
        for strategy in StrategyKind::ALL {
            assert!(verify_theorem(&spec, strategy, 1 << 20).unwrap().passed());
        }
    }

    #[test]
    fn theorem_holds_with_equality_without_ties() {
        let spec = ProbTreeSpec::new(vec![vec![0.6, 0.3, 0.1]; 3]).unwrap();
        let lab = ordered_leaves(&spec, BranchMode::Labelling, StrategyKind::Lds, 27);
        let prt = ordered_leaves(&spec, BranchMode::Partitioning, StrategyKind::Lds, 27);
        assert_eq!(lab, prt);
        assert!(check_dominance(&lab, &prt).is_none());
    }

    #[test]
    fn strict_gap_at_k2_on_example() {
        let spec = example_spec();
        let lab = cumulative_curve(&ordered_leaves(
            &spec,
            BranchMode::Labelling,
            StrategyKind::Lds,
            9,
        ));
        let prt = cumulative_curve(&ordered_leaves(
            &spec,
            BranchMode::Partitioning,
            StrategyKind::Lds,
            9,
        ));
        assert!((prt.at(2).unwrap() - 0.9405).abs() < 1e-12);
        assert!((lab.at(2).unwrap() - 0.49005).abs() < 1e-12);
    }

    #[test]
    fn tie_levels_are_evenly_spread() {
        assert_eq!(tie_levels(30, 0.10), vec![0, 10, 20]);
        assert_eq!(tie_levels(30, 0.33).len(), 10);
        assert_eq!(tie_levels(30, 0.50).len(), 15);
        assert!(tie_levels(30, 0.0).is_empty());
    }

    #[test]
    fn width_three_probabilities_match_the_reference_values() {
        assert_eq!(level_probabilities(3, false), vec![0.95, 0.04, 0.01]);
        assert_eq!(level_probabilities(3, true), vec![0.495, 0.495, 0.01]);
    }

    #[test]
    fn random_specs_are_valid_and_tie_when_forced() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for i in 0..50 {
            let spec = random_spec(&mut rng, 4, 3, i % 2 == 0);
            if i % 2 == 0 {
                assert!(spec.has_tie());
            }
        }
    }
}
