//! Acceptance suite: one test per criterion, each printing a single
//! PASS/FAIL line (run with `--nocapture` to see them), with every
//! tolerance pinned in code.

use std::time::{Duration, Instant};

use partsearch::batch;
use partsearch::brancher::BranchMode;
use partsearch::pls::{self, generate_pls, GeneratorConfig};
use partsearch::probsim::{self, StrategyKind};
use partsearch::search::{self, BranchPolicy, Model, SearchLimits};
use partsearch::state::Space;
use partsearch::tsp::{self, TspInstance};

mod oracles;

fn verdict(criterion: &str, pass: bool, detail: &str) -> bool {
    println!(
        "criterion {criterion}: {} - {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    pass
}

#[test]
fn criterion_1_theorem_property_suite() {
    let started = Instant::now();
    let report = probsim::run_theorem_trials(1000, 4, 3, 7, 1 << 20).unwrap();
    let elapsed = started.elapsed();
    let pass = report.all_passed()
        && report.passes_per_strategy == [1000, 1000, 1000]
        && elapsed < Duration::from_secs(10);
    let detail = format!(
        "1000 random trees x dfs/lds/dds, passes {:?}, {:.2}s (budget 10s)",
        report.passes_per_strategy,
        elapsed.as_secs_f64()
    );
    assert!(verdict("1 (dominance theorem, exhaustive)", pass, &detail));
}

#[test]
fn criterion_2_two_variable_tree_ordering() {
    let started = Instant::now();
    let spec =
        probsim::ProbTreeSpec::new(vec![vec![0.495, 0.495, 0.01], vec![0.95, 0.04, 0.01]]).unwrap();
    let lab = probsim::cumulative_curve(&probsim::ordered_leaves(
        &spec,
        BranchMode::Labelling,
        StrategyKind::Lds,
        9,
    ));
    let prt = probsim::cumulative_curve(&probsim::ordered_leaves(
        &spec,
        BranchMode::Partitioning,
        StrategyKind::Lds,
        9,
    ));
    let elapsed = started.elapsed();
    let prt_k2 = prt.at(2).unwrap();
    let lab_k2 = lab.at(2).unwrap();
    let pass = (prt_k2 - 0.9405).abs() <= 1e-12
        && (lab_k2 - 0.49005).abs() <= 1e-12
        && elapsed < Duration::from_secs(1);
    let detail = format!(
        "partitioning k=2 {prt_k2} (want 0.9405), labelling k=2 {lab_k2} (want 0.49005), {:.3}s",
        elapsed.as_secs_f64()
    );
    assert!(verdict("2 (two-variable tree ordering)", pass, &detail));
}

#[test]
fn criterion_3_depth30_curve_dominance() {
    let configs: Vec<(f64, StrategyKind)> = [0.10, 0.33, 0.50]
        .into_iter()
        .flat_map(|f| [(f, StrategyKind::Lds), (f, StrategyKind::Dfs)])
        .collect();
    let results = batch::map_indexed(configs.len(), |i| {
        let (fraction, strategy) = configs[i];
        let started = Instant::now();
        let (lab, prt) = probsim::curve_experiment(fraction, strategy, 50_000).unwrap();
        (fraction, strategy, lab, prt, started.elapsed())
    });
    let mut pass = true;
    let mut details = Vec::new();
    for (fraction, strategy, lab, prt, elapsed) in &results {
        let mut pointwise = true;
        let mut strict = false;
        for (l, p) in lab.values().iter().zip(prt.values().iter()) {
            if *p < *l - 1e-12 {
                pointwise = false;
            }
            if *p > *l + 1e-12 {
                strict = true;
            }
        }
        // no ties means no strict gap is required
        let strict_ok = *fraction == 0.0 || strict;
        let in_time = *elapsed < Duration::from_secs(60);
        if !(pointwise && strict_ok && in_time) {
            pass = false;
        }
        details.push(format!(
            "{:.0}%/{strategy}: pointwise {} strict {} {:.1}s",
            fraction * 100.0,
            pointwise,
            strict,
            elapsed.as_secs_f64()
        ));
    }
    assert!(verdict(
        "3a (depth-30 curves: dominance, strictness, runtime)",
        pass,
        &details.join("; ")
    ));
}

#[test]
fn criterion_3_labelling_curves_near_zero_under_dfs() {
    // The spec pins "below 1e-3 throughout" for the 33% and 50% labelling
    // curves under DFS. With ties spread evenly over the 30 levels (7 of 10
    // tie levels fall inside the first 20, which all of the first 50000
    // depth-first leaves share), the 33% curve tops out at
    // 0.95^13 * 0.495^7 ~= 3.7e-3, so that clause cannot hold; it is
    // asserted as stated rather than loosened.
    let results = batch::map_indexed(2, |i| {
        let fraction = [0.33, 0.50][i];
        let (lab, _) = probsim::curve_experiment(fraction, StrategyKind::Dfs, 50_000).unwrap();
        (fraction, lab.final_value())
    });
    let mut pass = true;
    let mut details = Vec::new();
    for (fraction, peak) in &results {
        let ok = *peak < 1e-3;
        if !ok {
            pass = false;
        }
        details.push(format!(
            "{:.0}% labelling DFS peak {peak:.6} (bound 1e-3)",
            fraction * 100.0
        ));
    }
    assert!(verdict(
        "3b (labelling curves near zero under DFS)",
        pass,
        &details.join("; ")
    ));
}

#[test]
fn criterion_4_propagator_oracle_suite() {
    use rand::Rng;
    use rand::SeedableRng;
    let started = Instant::now();

    // 500 alldifferent instances vs brute-force supports
    let alldiff_failures: usize = batch::map_indexed(500, |seed| {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(probsim::mix_seed(41, seed as u64));
        let n = rng.gen_range(1..=6);
        let domains: Vec<partsearch::Domain> = (0..n)
            .map(|_| {
                let values: Vec<i32> = (1..=7).filter(|_| rng.gen_bool(0.5)).collect();
                partsearch::Domain::new(if values.is_empty() { vec![1] } else { values })
            })
            .collect();
        let got = partsearch::alldiff::alldifferent_filter(&domains).unwrap();
        let expected = oracles::alldiff_supported(&domains);
        let agree = match (got, expected) {
            (None, None) => true,
            (Some(filtered), Some(supports)) => filtered
                .iter()
                .enumerate()
                .all(|(v, d)| d.iter().collect::<Vec<_>>() == supports[v]),
            _ => false,
        };
        usize::from(!agree)
    })
    .into_iter()
    .sum();

    // 200 assignment problems vs permutation minimum
    let assignment_failures: usize = batch::map_indexed(200, |seed| {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(probsim::mix_seed(42, seed as u64));
        let n = rng.gen_range(2..=8);
        let cost: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            f64::INFINITY
                        } else {
                            rng.gen_range(0..60) as f64
                        }
                    })
                    .collect()
            })
            .collect();
        let ap = partsearch::assignment::solve_assignment(&cost).unwrap();
        usize::from(ap.lower_bound as f64 != oracles::assignment_minimum(&cost))
    })
    .into_iter()
    .sum();

    // 100 successor models vs Hamiltonian-cycle sets
    let nocycle_failures: usize = batch::map_indexed(100, |seed| {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(probsim::mix_seed(43, seed as u64));
        let n = rng.gen_range(3..=6);
        let mut cost = vec![vec![0i64; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let c = rng.gen_range(1..=30);
                cost[i][j] = c;
                cost[j][i] = c;
            }
        }
        let inst = TspInstance::from_matrix("rand", cost).unwrap();
        usize::from(propagated_solutions(&inst) != oracles::hamiltonian_successors(n))
    })
    .into_iter()
    .sum();

    let elapsed = started.elapsed();
    let pass = alldiff_failures == 0
        && assignment_failures == 0
        && nocycle_failures == 0
        && elapsed < Duration::from_secs(30);
    let detail = format!(
        "alldifferent 500 ({} bad), assignment 200 ({} bad), successor-model 100 ({} bad), {:.2}s (budget 30s)",
        alldiff_failures, assignment_failures, nocycle_failures, elapsed.as_secs_f64()
    );
    assert!(verdict("4 (propagator oracle suite)", pass, &detail));
}

fn propagated_solutions(inst: &TspInstance) -> std::collections::BTreeSet<Vec<usize>> {
    struct Enumerate;
    impl Model for Enumerate {
        fn select_var(&mut self, _s: &Space, e: &[bool]) -> Option<usize> {
            e.iter().position(|&x| x)
        }
        fn rank_values(&mut self, s: &Space, v: usize) -> Vec<partsearch::RankedValue> {
            s.domain(v)
                .iter()
                .map(|x| partsearch::RankedValue::new(x, -(x as f64)))
                .collect()
        }
        fn is_solution(&mut self, _s: &Space) -> bool {
            false
        }
    }
    let (mut space, _shared) = tsp::build_space(inst, None);
    let mut out = std::collections::BTreeSet::new();
    let mut observer = |space: &Space, _d: u64| {
        out.insert(
            (0..space.num_vars())
                .map(|v| space.domain(v).singleton().unwrap() as usize)
                .collect::<Vec<_>>(),
        );
        true
    };
    search::run(
        &mut space,
        &mut Enumerate,
        &BranchPolicy::labelling(),
        search::Strategy::Dfs,
        &SearchLimits::default(),
        Some(&mut observer),
    );
    out
}

#[test]
fn criterion_5_tsp_end_to_end() {
    let names = ["gr17", "gr21", "gr24", "fri26"];
    let limits = SearchLimits {
        max_fails: Some(1_000_000),
        max_time: Some(Duration::from_secs(900)),
        ..SearchLimits::default()
    };
    let runs = batch::map_indexed(names.len(), |i| {
        let path = format!(
            "{}/../../instances/{}.tsp",
            env!("CARGO_MANIFEST_DIR"),
            names[i]
        );
        let inst = TspInstance::parse_tsplib(&std::fs::read_to_string(path).unwrap()).unwrap();
        let optimum = tsp::optimal_tour_cost(&inst, &limits);
        let opt = optimum.cost.expect("exhaustive search finds a tour");
        let lab = tsp::solve_tsp(
            &inst,
            &BranchPolicy::labelling(),
            StrategyKind::Lds,
            opt,
            &limits,
        );
        let prt = tsp::solve_tsp(
            &inst,
            &BranchPolicy::partitioning(),
            StrategyKind::Lds,
            opt,
            &limits,
        );
        (names[i], opt, optimum.proven, lab, prt)
    });
    let mut pass = true;
    let mut directional_violations = 0;
    let mut details = Vec::new();
    for (name, opt, proven, lab, prt) in &runs {
        let both_found = lab.stats.found && prt.stats.found;
        let within_budget = lab.stats.fails <= 1_000_000
            && prt.stats.fails <= 1_000_000
            && lab.stats.elapsed < Duration::from_secs(900)
            && prt.stats.elapsed < Duration::from_secs(900);
        let costs_ok = lab.cost == Some(*opt) && prt.cost == Some(*opt);
        if !(*proven && both_found && within_budget && costs_ok) {
            pass = false;
        }
        let directional = prt.stats.fails <= lab.stats.fails;
        if !directional {
            directional_violations += 1;
        }
        details.push(format!(
            "{name} opt {opt}: fails lab {} prt {} ({})",
            lab.stats.fails,
            prt.stats.fails,
            if directional { "prt<=lab" } else { "prt>lab" }
        ));
    }
    if directional_violations > 1 {
        pass = false;
    }
    let detail = format!(
        "{}; directional violations {directional_violations} of 4 (allowed: 1)",
        details.join("; ")
    );
    assert!(verdict("5 (TSP stop-at-optimum end-to-end)", pass, &detail));
}

#[test]
fn criterion_6_pls_end_to_end() {
    let n = 15;
    let holes = (0.38 * (n * n) as f64).round() as usize;
    let limits = SearchLimits {
        max_time: Some(Duration::from_secs(900)),
        ..SearchLimits::default()
    };
    let configs: Vec<GeneratorConfig> = (0..20)
        .map(|i| GeneratorConfig {
            n,
            holes,
            balanced: i < 10,
            seed: 1000 + i as u64,
        })
        .collect();
    let outcomes = batch::map_indexed(configs.len(), |i| {
        let inst = generate_pls(&configs[i]).unwrap();
        let lab = pls::solve_pls(
            &inst,
            &BranchPolicy::labelling(),
            StrategyKind::Lds,
            &limits,
        )
        .unwrap();
        let prt = pls::solve_pls(
            &inst,
            &BranchPolicy::partitioning(),
            StrategyKind::Lds,
            &limits,
        )
        .unwrap();
        let valid = |run: &pls::PlsRun| {
            run.stats.found
                && run.stats.elapsed < Duration::from_secs(900)
                && run
                    .completion
                    .as_ref()
                    .is_some_and(|c| c.is_complete_latin_square() && c.extends(&inst))
        };
        (valid(&lab) && valid(&prt), lab.stats.fails, prt.stats.fails)
    });
    let solved = outcomes.iter().filter(|(ok, _, _)| *ok).count();
    let lab_total: u64 = outcomes.iter().map(|(_, l, _)| l).sum();
    let prt_total: u64 = outcomes.iter().map(|(_, _, p)| p).sum();
    let pass = solved == configs.len();
    if prt_total > lab_total {
        // the aggregate comparison is informational; emit the report
        println!("  per-instance fails (labelling, partitioning):");
        for (i, (_, l, p)) in outcomes.iter().enumerate() {
            println!(
                "    {} seed {}: {l} vs {p}",
                if configs[i].balanced {
                    "balanced  "
                } else {
                    "unbalanced"
                },
                configs[i].seed
            );
        }
    }
    let detail = format!(
        "{solved}/20 solved with valid extending completions; aggregate fails: labelling {lab_total}, partitioning {prt_total}"
    );
    assert!(verdict("6 (PLS completion end-to-end)", pass, &detail));
}

#[test]
fn criterion_7_cli_determinism() {
    use std::process::Command;
    let bin = env!("CARGO_BIN_EXE_partsearch");
    let dir = std::env::temp_dir().join(format!("partsearch-acc-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();

    let simulate = |path: &std::path::Path| {
        let out = Command::new(bin)
            .args([
                "simulate",
                "--depth",
                "12",
                "--width",
                "3",
                "--ties",
                "0.5",
                "--strategy",
                "lds",
                "--cap",
                "2000",
                "--seed",
                "9",
            ])
            .output()
            .unwrap();
        std::fs::write(path, &out.stdout).unwrap();
    };
    simulate(&dir.join("sim1.csv"));
    simulate(&dir.join("sim2.csv"));
    let sim_ok = std::fs::read(dir.join("sim1.csv")).unwrap()
        == std::fs::read(dir.join("sim2.csv")).unwrap();

    for name in ["g1.pls", "g2.pls"] {
        let out = Command::new(bin)
            .args([
                "gen-pls",
                "--n",
                "15",
                "--holes",
                "86",
                "--balanced",
                "--seed",
                "3",
                "--out",
                dir.join(name).to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert!(out.status.success());
    }
    let gen_ok =
        std::fs::read(dir.join("g1.pls")).unwrap() == std::fs::read(dir.join("g2.pls")).unwrap();

    // solve twice, compare the CSV with the wall-clock column stripped
    let solve = |csv: &std::path::Path| {
        let out = Command::new(bin)
            .args([
                "solve",
                "--problem",
                "pls",
                "--instance",
                dir.join("g1.pls").to_str().unwrap(),
                "--mode",
                "both",
                "--csv",
                csv.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert!(out.status.success());
        let text = std::fs::read_to_string(csv).unwrap();
        text.lines()
            .map(|line| {
                let cells: Vec<&str> = line.split(',').collect();
                cells
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != 3) // time_s
                    .map(|(_, c)| *c)
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect::<Vec<_>>()
            .join("\n")
    };
    let solve_ok = solve(&dir.join("s1.csv")) == solve(&dir.join("s2.csv"));
    std::fs::remove_dir_all(&dir).ok();

    let pass = sim_ok && gen_ok && solve_ok;
    let detail = format!(
        "simulate bytes equal: {sim_ok}; gen-pls bytes equal: {gen_ok}; solve csv equal modulo time_s: {solve_ok}"
    );
    assert!(verdict("7 (seeded CLI determinism)", pass, &detail));
}
