//! Partial Latin square completion.
//!
//! One variable per hole, alldifferent on every row and column (hyper-arc
//! by default), min-domain variable order, and the first-fail value
//! heuristic: a value's rank is its current number of occurrences in the
//! square, higher first. Ties are equal counts; labelling breaks them
//! lexicographically, partitioning branches on the whole highest-count
//! group.
//!
//! The generator builds a random full Latin square (seeded permutations of
//! the cyclic square plus an intercalate-swap burn-in) and punches holes,
//! uniformly at random or spread evenly over rows and columns; instances
//! are therefore always completable.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::alldiff::{AllDifferent, NaiveAllDifferent};
use crate::brancher::RankedValue;
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::search::{self, BranchPolicy, Model, SearchLimits, SearchStats, StrategyKind};
use crate::state::{Space, VarId};

/// An order-`n` grid, `0` marking holes, values in `1..=n`, no repeats in
/// any row or column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlsInstance {
    pub n: usize,
    pub grid: Vec<Vec<u32>>,
}

impl PlsInstance {
    pub fn new(n: usize, grid: Vec<Vec<u32>>) -> Result<Self> {
        let inst = PlsInstance { n, grid };
        inst.validate()?;
        Ok(inst)
    }

    fn validate(&self) -> Result<()> {
        if self.grid.len() != self.n {
            return Err(Error::InvalidArgument(format!(
                "PlsInstance: {} rows in an order-{} square",
                self.grid.len(),
                self.n
            )));
        }
        for (r, row) in self.grid.iter().enumerate() {
            if row.len() != self.n {
                return Err(Error::InvalidArgument(format!(
                    "PlsInstance: row {r} has {} cells",
                    row.len()
                )));
            }
            for (c, &v) in row.iter().enumerate() {
                if v as usize > self.n {
                    return Err(Error::InvalidArgument(format!(
                        "PlsInstance: value {v} at ({r},{c}) exceeds order {}",
                        self.n
                    )));
                }
            }
        }
        for i in 0..self.n {
            let mut row_seen = vec![false; self.n + 1];
            let mut col_seen = vec![false; self.n + 1];
            for j in 0..self.n {
                let rv = self.grid[i][j] as usize;
                if rv != 0 {
                    if row_seen[rv] {
                        return Err(Error::InvalidArgument(format!(
                            "PlsInstance: value {rv} repeats in row {i}"
                        )));
                    }
                    row_seen[rv] = true;
                }
                let cv = self.grid[j][i] as usize;
                if cv != 0 {
                    if col_seen[cv] {
                        return Err(Error::InvalidArgument(format!(
                            "PlsInstance: value {cv} repeats in column {i}"
                        )));
                    }
                    col_seen[cv] = true;
                }
            }
        }
        Ok(())
    }

    pub fn hole_count(&self) -> usize {
        self.grid.iter().flatten().filter(|&&v| v == 0).count()
    }

    /// True when filled completely and every row and column is a
    /// permutation of `1..=n`.
    pub fn is_complete_latin_square(&self) -> bool {
        self.hole_count() == 0 && self.validate().is_ok()
    }

    /// True when this square agrees with `base` on every pre-assigned cell.
    pub fn extends(&self, base: &PlsInstance) -> bool {
        self.n == base.n
            && base
                .grid
                .iter()
                .zip(self.grid.iter())
                .all(|(br, sr)| br.iter().zip(sr.iter()).all(|(&b, &s)| b == 0 || b == s))
    }

    /// Reads the instance format: first line the order, then one line of
    /// space-separated cell values per row, `0` for a hole.
    pub fn read(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, first) = lines.next().ok_or(Error::Parse {
            line: 1,
            message: "empty file".into(),
        })?;
        let n: usize = first.trim().parse().map_err(|_| Error::Parse {
            line: 1,
            message: format!("expected the order, got `{}`", first.trim()),
        })?;
        let mut grid = Vec::with_capacity(n);
        for _ in 0..n {
            let (idx, line) = lines.next().ok_or(Error::Parse {
                line: n + 1,
                message: format!("expected {n} rows"),
            })?;
            let row: Vec<u32> = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse().map_err(|_| Error::Parse {
                        line: idx + 1,
                        message: format!("bad cell `{tok}`"),
                    })
                })
                .collect::<Result<_>>()?;
            if row.len() != n {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: format!("row has {} cells, expected {n}", row.len()),
                });
            }
            grid.push(row);
        }
        PlsInstance::new(n, grid)
    }

    /// Inverse of [`read`](Self::read), byte for byte.
    pub fn to_file_string(&self) -> String {
        let mut out = format!("{}\n", self.n);
        for row in &self.grid {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            out.push_str(&cells.join(" "));
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, Copy)]
pub struct GeneratorConfig {
    pub n: usize,
    pub holes: usize,
    pub balanced: bool,
    pub seed: u64,
}

/// Generates a completable partial Latin square, deterministic in the seed.
pub fn generate_pls(config: &GeneratorConfig) -> Result<PlsInstance> {
    let n = config.n;
    if n == 0 {
        return Err(Error::InvalidArgument("generate_pls: order zero".into()));
    }
    if config.holes > n * n {
        return Err(Error::InvalidArgument(format!(
            "generate_pls: {} holes in an order-{n} square",
            config.holes
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    // random permutations of the cyclic square
    let mut rows: Vec<usize> = (0..n).collect();
    let mut cols: Vec<usize> = (0..n).collect();
    let mut syms: Vec<u32> = (1..=n as u32).collect();
    rows.shuffle(&mut rng);
    cols.shuffle(&mut rng);
    syms.shuffle(&mut rng);
    let mut grid = vec![vec![0u32; n]; n];
    for i in 0..n {
        for j in 0..n {
            grid[i][j] = syms[(rows[i] + cols[j]) % n];
        }
    }

    // burn-in of intercalate swaps; pos[r][v] is the column of value v+1 in row r
    let mut pos = vec![vec![0usize; n]; n];
    for i in 0..n {
        for j in 0..n {
            pos[i][(grid[i][j] - 1) as usize] = j;
        }
    }
    if n >= 2 {
        let attempts = 2 * n * n * n;
        for _ in 0..attempts {
            let r1 = rng.gen_range(0..n);
            let r2 = rng.gen_range(0..n);
            if r1 == r2 {
                continue;
            }
            let c1 = rng.gen_range(0..n);
            let a = grid[r1][c1];
            let b = grid[r2][c1];
            if a == b {
                continue;
            }
            let c2 = pos[r1][(b - 1) as usize];
            if grid[r2][c2] != a {
                continue;
            }
            grid[r1][c1] = b;
            grid[r1][c2] = a;
            grid[r2][c1] = a;
            grid[r2][c2] = b;
            pos[r1][(a - 1) as usize] = c2;
            pos[r1][(b - 1) as usize] = c1;
            pos[r2][(a - 1) as usize] = c1;
            pos[r2][(b - 1) as usize] = c2;
        }
    }

    // punch holes
    if config.balanced {
        let quota_base = config.holes / n;
        let extra = config.holes % n;
        let mut row_map: Vec<usize> = (0..n).collect();
        let mut col_map: Vec<usize> = (0..n).collect();
        row_map.shuffle(&mut rng);
        col_map.shuffle(&mut rng);
        for i in 0..n {
            let quota = quota_base + usize::from(i < extra);
            for j in 0..quota {
                grid[row_map[i]][col_map[(i + j) % n]] = 0;
            }
        }
    } else {
        let mut cells: Vec<usize> = (0..n * n).collect();
        cells.shuffle(&mut rng);
        for &cell in cells.iter().take(config.holes) {
            grid[cell / n][cell % n] = 0;
        }
    }

    PlsInstance::new(n, grid)
}

/// First-fail value ranks: a value's rank is its occurrence count
/// (`counts[v - 1]` for value `v`), higher first.
pub fn occurrence_ranks(counts: &[u32], domain: &Domain) -> Vec<RankedValue> {
    domain
        .iter()
        .map(|v| RankedValue::new(v, counts[(v - 1) as usize] as f64))
        .collect()
}

/// Which alldifferent filtering the row/column constraints apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlldiffStrength {
    /// Matching-based hyper-arc consistency.
    HyperArc,
    /// Arc consistency on the pairwise not-equal decomposition.
    Pairwise,
}

struct PlsModel {
    n: usize,
    holes: Vec<(usize, usize)>,
    base: PlsInstance,
    completion: Option<PlsInstance>,
}

impl PlsModel {
    /// Occurrences of each value over the current square: pre-assigned
    /// cells plus holes already bound.
    fn counts(&self, space: &Space) -> Vec<u32> {
        let mut counts = vec![0u32; self.n];
        for row in &self.base.grid {
            for &v in row {
                if v != 0 {
                    counts[(v - 1) as usize] += 1;
                }
            }
        }
        for var in 0..self.holes.len() {
            if let Some(v) = space.domain(var).singleton() {
                counts[(v - 1) as usize] += 1;
            }
        }
        counts
    }
}

impl Model for PlsModel {
    fn select_var(&mut self, space: &Space, eligible: &[bool]) -> Option<VarId> {
        let mut best: Option<(usize, VarId)> = None;
        for (var, &ok) in eligible.iter().enumerate() {
            if !ok {
                continue;
            }
            let len = space.domain(var).len();
            if best.map_or(true, |(blen, _)| len < blen) {
                best = Some((len, var));
            }
        }
        best.map(|(_, var)| var)
    }

    fn rank_values(&mut self, space: &Space, var: VarId) -> Vec<RankedValue> {
        let counts = self.counts(space);
        occurrence_ranks(&counts, space.domain(var))
    }

    fn is_solution(&mut self, _space: &Space) -> bool {
        true
    }

    fn on_solution(&mut self, space: &Space) {
        let mut grid = self.base.grid.clone();
        for (var, &(r, c)) in self.holes.iter().enumerate() {
            grid[r][c] = space.domain(var).singleton().expect("leaf is bound") as u32;
        }
        self.completion = Some(PlsInstance { n: self.n, grid });
    }
}

#[derive(Debug)]
pub struct PlsRun {
    pub stats: SearchStats,
    pub completion: Option<PlsInstance>,
}

pub fn solve_pls(
    instance: &PlsInstance,
    policy: &BranchPolicy,
    strategy: StrategyKind,
    limits: &SearchLimits,
) -> Result<PlsRun> {
    solve_pls_with(
        instance,
        policy,
        strategy,
        limits,
        AlldiffStrength::HyperArc,
    )
}

pub fn solve_pls_with(
    instance: &PlsInstance,
    policy: &BranchPolicy,
    strategy: StrategyKind,
    limits: &SearchLimits,
    strength: AlldiffStrength,
) -> Result<PlsRun> {
    instance.validate()?;
    let n = instance.n;
    let mut holes: Vec<(usize, usize)> = Vec::new();
    for r in 0..n {
        for c in 0..n {
            if instance.grid[r][c] == 0 {
                holes.push((r, c));
            }
        }
    }

    let mut domains = Vec::with_capacity(holes.len());
    for &(r, c) in &holes {
        let mut allowed: Vec<i32> = (1..=n as i32).collect();
        allowed.retain(|&v| {
            (0..n).all(|j| instance.grid[r][j] != v as u32)
                && (0..n).all(|i| instance.grid[i][c] != v as u32)
        });
        domains.push(Domain::new(allowed));
    }
    let unsatisfiable = domains.iter().any(|d| d.is_empty());
    let mut space = Space::new(domains);

    let mut row_vars: Vec<Vec<VarId>> = vec![Vec::new(); n];
    let mut col_vars: Vec<Vec<VarId>> = vec![Vec::new(); n];
    for (var, &(r, c)) in holes.iter().enumerate() {
        row_vars[r].push(var);
        col_vars[c].push(var);
    }
    for vars in row_vars.into_iter().chain(col_vars) {
        if vars.is_empty() {
            continue;
        }
        match strength {
            AlldiffStrength::HyperArc => space.add_propagator(Box::new(AllDifferent::new(vars))),
            AlldiffStrength::Pairwise => {
                space.add_propagator(Box::new(NaiveAllDifferent::new(vars)))
            }
        }
    }

    let mut model = PlsModel {
        n,
        holes,
        base: instance.clone(),
        completion: None,
    };
    if unsatisfiable {
        return Ok(PlsRun {
            stats: SearchStats {
                fails: 1,
                ..SearchStats::default()
            },
            completion: None,
        });
    }
    let stats = search::run(
        &mut space,
        &mut model,
        policy,
        strategy.exhaustive(),
        limits,
        None,
    );
    Ok(PlsRun {
        stats,
        completion: model.completion,
    })
}
