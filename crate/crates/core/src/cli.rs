//! The `partsearch` command-line surface.
//!
//! Exit codes: 0 on success, 1 on a semantic failure (no solution found,
//! theorem violated), 2 on usage errors.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};

use crate::batch;
use crate::brancher::BranchMode;
use crate::error::Error;
use crate::pls::{self, GeneratorConfig, PlsInstance};
use crate::probsim;
use crate::search::{BranchPolicy, SearchLimits, SearchStats, StrategyKind};
use crate::tsp::{self, TspInstance};

#[derive(Parser)]
#[command(
    name = "partsearch",
    version,
    about = "Labelling versus tie-grouped domain partitioning under depth-first based search strategies"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Dfs,
    Lds,
    Dds,
}

impl From<StrategyArg> for StrategyKind {
    fn from(arg: StrategyArg) -> Self {
        match arg {
            StrategyArg::Dfs => StrategyKind::Dfs,
            StrategyArg::Lds => StrategyKind::Lds,
            StrategyArg::Dds => StrategyKind::Dds,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ProblemArg {
    Tsp,
    Pls,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Labelling,
    Partitioning,
    Both,
}

impl ModeArg {
    fn modes(self) -> Vec<BranchMode> {
        match self {
            ModeArg::Labelling => vec![BranchMode::Labelling],
            ModeArg::Partitioning => vec![BranchMode::Partitioning],
            ModeArg::Both => vec![BranchMode::Labelling, BranchMode::Partitioning],
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Emit the cumulative success-probability curves of labelling and
    /// partitioning on a synthetic heuristic-probability tree, as CSV.
    Simulate {
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        width: usize,
        /// Fraction of branching decisions that tie (0 to 1).
        #[arg(long)]
        ties: f64,
        #[arg(long)]
        strategy: StrategyArg,
        /// Number of leaves to enumerate.
        #[arg(long)]
        cap: usize,
        /// Place the tie levels uniformly at random instead of evenly.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Check the partitioning-dominates-labelling inequality on random
    /// trees by exhaustive enumeration, under DFS, LDS and DDS.
    VerifyTheorem {
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        max_depth: usize,
        #[arg(long)]
        max_width: usize,
        #[arg(long)]
        seed: u64,
        /// Negative control: corrupt the partitioning leaf order and expect
        /// a violation.
        #[arg(long)]
        perturb: bool,
    },
    /// Run labelling and/or partitioning on a TSP or PLS instance.
    Solve {
        #[arg(long)]
        problem: ProblemArg,
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        mode: ModeArg,
        #[arg(long, value_enum, default_value = "lds")]
        strategy: StrategyArg,
        /// Known optimum to stop at (required for TSP).
        #[arg(long)]
        stop_at: Option<i64>,
        /// Time limit per run, in seconds.
        #[arg(long, default_value_t = 900.0)]
        max_time: f64,
        /// Relative band within which ranks count as tied.
        #[arg(long, default_value_t = 0.0)]
        equiv_pct: f64,
        /// Also write the report as CSV to this file.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Generate a partial Latin square instance file.
    GenPls {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        holes: usize,
        #[arg(long)]
        balanced: bool,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

pub fn run() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Simulate {
            depth,
            width,
            ties,
            strategy,
            cap,
            seed,
        } => cmd_simulate(depth, width, ties, strategy.into(), cap, seed),
        Command::VerifyTheorem {
            trials,
            max_depth,
            max_width,
            seed,
            perturb,
        } => cmd_verify_theorem(trials, max_depth, max_width, seed, perturb),
        Command::Solve {
            problem,
            instance,
            mode,
            strategy,
            stop_at,
            max_time,
            equiv_pct,
            csv,
        } => cmd_solve(
            problem,
            instance,
            mode,
            strategy.into(),
            stop_at,
            max_time,
            equiv_pct,
            csv,
        ),
        Command::GenPls {
            n,
            holes,
            balanced,
            seed,
            out,
        } => cmd_generate(n, holes, balanced, seed, out),
    }
}

fn usage_error(message: &str) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(2)
}

fn cmd_simulate(
    depth: usize,
    width: usize,
    ties: f64,
    strategy: StrategyKind,
    cap: usize,
    seed: Option<u64>,
) -> ExitCode {
    if depth == 0 || width == 0 {
        return usage_error("--depth and --width must be at least 1");
    }
    if !(0.0..=1.0).contains(&ties) {
        return usage_error(&format!("--ties {ties} is not a fraction in [0, 1]"));
    }
    if cap == 0 {
        return usage_error("--cap must be at least 1");
    }
    let spec = match seed {
        None => probsim::build_tree_spec(depth, width, ties),
        Some(s) => probsim::build_tree_spec_seeded(depth, width, ties, s),
    };
    let spec = match spec {
        Ok(s) => s,
        Err(e) => return usage_error(&e.to_string()),
    };
    let (lab, prt) = batch::join(
        || probsim::ordered_leaves(&spec, BranchMode::Labelling, strategy, cap),
        || probsim::ordered_leaves(&spec, BranchMode::Partitioning, strategy, cap),
    );
    let lab = probsim::cumulative_curve(&lab);
    let prt = probsim::cumulative_curve(&prt);
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    if probsim::write_curves_csv(&mut out, &lab, &prt).is_err() {
        return ExitCode::from(1);
    }
    ExitCode::SUCCESS
}

fn cmd_verify_theorem(
    trials: u64,
    max_depth: usize,
    max_width: usize,
    seed: u64,
    perturb: bool,
) -> ExitCode {
    if max_depth == 0 || max_width == 0 {
        return usage_error("--max-depth and --max-width must be at least 1");
    }
    const BOUND: u64 = 1 << 20;
    if perturb {
        return cmd_verify_perturbed(trials, max_depth, max_width, seed, BOUND);
    }
    match probsim::run_theorem_trials(trials, max_depth, max_width, seed, BOUND) {
        Err(e) => usage_error(&e.to_string()),
        Ok(report) => {
            for (i, strategy) in StrategyKind::ALL.iter().enumerate() {
                println!(
                    "{strategy}: {}/{} trials satisfied the dominance inequality",
                    report.passes_per_strategy[i], report.trials
                );
            }
            match report.first_violation {
                None => ExitCode::SUCCESS,
                Some((trial, strategy, v)) => {
                    println!(
                        "violation: trial {trial} under {strategy} at k={}: labelling {} > partitioning {}",
                        v.k, v.labelling_sum, v.partitioning_sum
                    );
                    ExitCode::from(1)
                }
            }
        }
    }
}

fn cmd_verify_perturbed(
    trials: u64,
    max_depth: usize,
    max_width: usize,
    seed: u64,
    bound: u64,
) -> ExitCode {
    use rand::SeedableRng;
    let mut violations = 0u64;
    let mut first: Option<probsim::DominanceViolation> = None;
    for i in 0..trials.max(1) {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(probsim::mix_seed(seed, i));
        let spec = probsim::random_nonuniform_spec(&mut rng, max_depth, max_width.max(2));
        let total = spec.total_leaves().unwrap_or(u64::MAX).min(bound) as usize;
        let lab = probsim::ordered_leaves(&spec, BranchMode::Labelling, StrategyKind::Lds, total);
        // corrupted ordering: feed the checker the partitioning leaves
        // worst-first, an order no depth-first strategy produces
        let mut prt =
            probsim::ordered_leaves(&spec, BranchMode::Partitioning, StrategyKind::Lds, total);
        prt.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if let Some(v) = probsim::check_dominance(&lab, &prt) {
            violations += 1;
            if first.is_none() {
                first = Some(v);
            }
        }
    }
    match first {
        Some(v) => {
            println!(
                "perturbed order violated dominance in {violations} trial(s); first witness k={}: labelling {} > partitioning {}",
                v.k, v.labelling_sum, v.partitioning_sum
            );
            ExitCode::from(1)
        }
        None => {
            println!("perturbed order produced no violation");
            ExitCode::SUCCESS
        }
    }
}

struct ReportRow {
    instance: String,
    mode: &'static str,
    strategy: StrategyKind,
    stats: SearchStats,
}

fn mode_name(mode: BranchMode) -> &'static str {
    match mode {
        BranchMode::Labelling => "labelling",
        BranchMode::Partitioning => "partitioning",
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_solve(
    problem: ProblemArg,
    instance_path: PathBuf,
    mode: ModeArg,
    strategy: StrategyKind,
    stop_at: Option<i64>,
    max_time: f64,
    equiv_pct: f64,
    csv: Option<PathBuf>,
) -> ExitCode {
    if max_time <= 0.0 {
        return usage_error("--max-time must be positive");
    }
    if equiv_pct < 0.0 {
        return usage_error("--equiv-pct must be non-negative");
    }
    let text = match fs::read_to_string(&instance_path) {
        Ok(t) => t,
        Err(e) => return usage_error(&format!("cannot read {}: {e}", instance_path.display())),
    };
    let limits = SearchLimits {
        max_time: Some(Duration::from_secs_f64(max_time)),
        ..SearchLimits::default()
    };
    let instance_name = instance_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| instance_path.display().to_string());

    let mut rows: Vec<ReportRow> = Vec::new();
    match problem {
        ProblemArg::Tsp => {
            let stop_at = match stop_at {
                Some(v) => v,
                None => {
                    return usage_error(
                        "--stop-at is required for TSP (runs stop at the known optimum)",
                    )
                }
            };
            let inst = match TspInstance::parse_tsplib(&text) {
                Ok(i) => i,
                Err(e @ (Error::Parse { .. } | Error::UnsupportedFormat(_))) => {
                    return usage_error(&e.to_string())
                }
                Err(e) => return usage_error(&e.to_string()),
            };
            for m in mode.modes() {
                let policy = BranchPolicy {
                    mode: m,
                    equivalence_pct: equiv_pct,
                };
                let run = tsp::solve_tsp(&inst, &policy, strategy, stop_at, &limits);
                rows.push(ReportRow {
                    instance: instance_name.clone(),
                    mode: mode_name(m),
                    strategy,
                    stats: run.stats,
                });
            }
        }
        ProblemArg::Pls => {
            let inst = match PlsInstance::read(&text) {
                Ok(i) => i,
                Err(e) => return usage_error(&e.to_string()),
            };
            for m in mode.modes() {
                let policy = BranchPolicy {
                    mode: m,
                    equivalence_pct: equiv_pct,
                };
                match pls::solve_pls(&inst, &policy, strategy, &limits) {
                    Ok(run) => rows.push(ReportRow {
                        instance: instance_name.clone(),
                        mode: mode_name(m),
                        strategy,
                        stats: run.stats,
                    }),
                    Err(e) => return usage_error(&e.to_string()),
                }
            }
        }
    }

    println!(
        "{:<14} {:<13} {:<9} {:>9} {:>10} {:>10} {:>6} {:>6}",
        "instance", "mode", "strategy", "time_s", "fails", "leaves", "discr", "found"
    );
    for row in &rows {
        println!(
            "{:<14} {:<13} {:<9} {:>9.3} {:>10} {:>10} {:>6} {:>6}",
            row.instance,
            row.mode,
            row.strategy.to_string(),
            row.stats.elapsed.as_secs_f64(),
            row.stats.fails,
            row.stats.leaves,
            row.stats
                .solution_discrepancy
                .map(|d| d.to_string())
                .unwrap_or_else(|| "-".into()),
            if row.stats.found { "yes" } else { "no" }
        );
    }

    if let Some(path) = csv {
        let mut out = String::from("instance,mode,strategy,time_s,fails,leaves,discr,found\n");
        for row in &rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                row.instance,
                row.mode,
                row.strategy,
                row.stats.elapsed.as_secs_f64(),
                row.stats.fails,
                row.stats.leaves,
                row.stats
                    .solution_discrepancy
                    .map(|d| d.to_string())
                    .unwrap_or_default(),
                row.stats.found
            ));
        }
        if let Err(e) = fs::write(&path, out) {
            return usage_error(&format!("cannot write {}: {e}", path.display()));
        }
    }

    if rows.iter().all(|r| r.stats.found) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn cmd_generate(n: usize, holes: usize, balanced: bool, seed: u64, out: PathBuf) -> ExitCode {
    let config = GeneratorConfig {
        n,
        holes,
        balanced,
        seed,
    };
    let instance = match pls::generate_pls(&config) {
        Ok(i) => i,
        Err(e) => return usage_error(&e.to_string()),
    };
    match fs::File::create(&out).and_then(|mut f| f.write_all(instance.to_file_string().as_bytes()))
    {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => usage_error(&format!("cannot write {}: {e}", out.display())),
    }
}
