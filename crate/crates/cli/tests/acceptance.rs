//! Release gate for the toolkit: one test per acceptance criterion.
//!
//! Each test prints exactly one `criterion N (...) ... PASS/FAIL/SKIP` line
//! so a full run reads as a checklist. Criteria 3 and 4 compare against the
//! published benchmark suites; the instance files are not bundled, so those
//! tests check whatever can be generated hermetically and report the rest
//! as skipped. Point `SHOPEVO_BENCH_DIR` at a directory of instance files
//! (TA01.txt, DMU03.txt, ...) to run them in full.

use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Instant;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use shopevo_core::cases::{
    CaseSource, DynamicGenParams, GeneratedDynamicCases, GeneratedStaticCases, StaticGenParams,
};
use shopevo_core::evolve::{run_seevo, EvolutionConfig, Origin, RunArtifacts};
use shopevo_core::llm::{
    extract_rule, offline_response, OfflineMutator, ReplayProvider, RequestContext, RequestKind,
};
use shopevo_core::oracle::{brute_force_optimal, DEFAULT_OP_BUDGET};
use shopevo_core::report::{cell_seed, run_baselines};
use shopevo_core::rule::{all_builtins, builtin, eval_rule, parse_rule, BinOp, Expr, Func};
use shopevo_core::seed::{derive_seed, stream};
use shopevo_core::taillard::{generate_taillard, TA01};
use shopevo_core::{
    parse_instance, simulate, validate_schedule, Feature, FeatureVector, Instance, RuleProgram,
    Time,
};

/// Serializes the tests that assert wall-clock budgets, so a parallel test
/// harness cannot starve them of CPU.
static TIMED: Mutex<()> = Mutex::new(());

fn timed_guard() -> std::sync::MutexGuard<'static, ()> {
    TIMED.lock().unwrap_or_else(|poisoned| poisoned.into_inner())
}

/// Prints the checklist line and panics when the criterion failed.
fn verdict(number: u32, name: &str, errors: &[String], detail: &str) {
    if errors.is_empty() {
        println!("criterion {number} ({name}) ... PASS  [{detail}]");
    } else {
        println!(
            "criterion {number} ({name}) ... FAIL  [{}]",
            errors.join("; ")
        );
        panic!("criterion {number} ({name}) failed: {}", errors.join("; "));
    }
}

fn offline_provider(seed: u64) -> OfflineMutator {
    OfflineMutator::new(derive_seed(seed, stream::PROVIDER, 0))
}

fn default_seeds() -> Vec<RuleProgram> {
    vec![builtin("SPT").unwrap(), builtin("SPT_TWKR").unwrap()]
}

fn run_offline(cfg: &EvolutionConfig) -> RunArtifacts {
    let mut provider = offline_provider(cfg.seed);
    let mut cases = GeneratedDynamicCases::new(DynamicGenParams {
        seed: cfg.seed,
        ..DynamicGenParams::default()
    });
    let (_, artifacts) =
        run_seevo(cfg, &mut provider, &mut cases, &default_seeds()).expect("offline run completes");
    artifacts
}

/// Directory of published benchmark instance files, when available.
fn bench_data_dir() -> Option<PathBuf> {
    if let Ok(dir) = std::env::var("SHOPEVO_BENCH_DIR") {
        let path = PathBuf::from(dir);
        return path.is_dir().then_some(path);
    }
    let fallback = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/benchmarks");
    fallback.is_dir().then_some(fallback)
}

/// Loads the instance file whose stem matches `name` case-insensitively.
fn load_named_instance(dir: &Path, name: &str) -> Option<Instance> {
    let entries = std::fs::read_dir(dir).ok()?;
    for entry in entries.flatten() {
        let path = entry.path();
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("");
        if stem.eq_ignore_ascii_case(name) && path.is_file() {
            let text = std::fs::read_to_string(&path).ok()?;
            return parse_instance(&text, name).ok();
        }
    }
    None
}

/// Best-known makespans for the Taillard 15x15 through 100x20 instances the
/// benchmark sweep targets. A correct simulator can never beat these.
const TA_UPPER_BOUNDS: [(&str, Time); 16] = [
    ("TA01", 1231),
    ("TA02", 1244),
    ("TA11", 1357),
    ("TA12", 1367),
    ("TA21", 1642),
    ("TA22", 1600),
    ("TA31", 1764),
    ("TA32", 1784),
    ("TA41", 2005),
    ("TA42", 1937),
    ("TA51", 2760),
    ("TA52", 2756),
    ("TA61", 2868),
    ("TA62", 2869),
    ("TA71", 5464),
    ("TA72", 5181),
];

/// Best-known makespans for the DMU instances in the same sweep.
const DMU_UPPER_BOUNDS: [(&str, Time); 16] = [
    ("DMU03", 2731),
    ("DMU04", 2669),
    ("DMU08", 3188),
    ("DMU09", 3092),
    ("DMU13", 3681),
    ("DMU14", 3394),
    ("DMU18", 3844),
    ("DMU19", 3768),
    ("DMU23", 4668),
    ("DMU24", 4648),
    ("DMU28", 4692),
    ("DMU29", 4691),
    ("DMU33", 5728),
    ("DMU34", 5385),
    ("DMU38", 5713),
    ("DMU39", 5747),
];

/// SPT makespans on the DMU set reported by an independent non-delay
/// dispatching implementation; used to cross-check the simulator.
const REFERENCE_SPT_DMU: [(&str, f64); 16] = [
    ("DMU03", 3630.0),
    ("DMU04", 3541.0),
    ("DMU08", 4714.0),
    ("DMU09", 4283.0),
    ("DMU13", 4813.0),
    ("DMU14", 4583.0),
    ("DMU18", 6231.0),
    ("DMU19", 5126.0),
    ("DMU23", 6250.0),
    ("DMU24", 5503.0),
    ("DMU28", 6558.0),
    ("DMU29", 6565.0),
    ("DMU33", 7361.0),
    ("DMU34", 7026.0),
    ("DMU38", 7954.0),
    ("DMU39", 7592.0),
];

const REFERENCE_SPT_MEAN: f64 = 5733.13;

#[test]
fn criterion_1_builtin_schedules_are_feasible() {
    let _guard = timed_guard();
    let start = Instant::now();
    let methods = all_builtins();

    let mut cases = GeneratedStaticCases::new(StaticGenParams {
        seed: 101,
        ..StaticGenParams::default()
    })
    .initial(1000);
    cases.extend(
        GeneratedDynamicCases::new(DynamicGenParams {
            seed: 202,
            ..DynamicGenParams::default()
        })
        .initial(1000),
    );

    use rayon::prelude::*;
    let violation_count: usize = cases
        .par_iter()
        .enumerate()
        .map(|(case_index, inst)| {
            let mut violations = 0usize;
            for (method_index, (name, rule)) in methods.iter().enumerate() {
                let seed = derive_seed(
                    7,
                    stream::EVALUATION,
                    (case_index * methods.len() + method_index) as u64,
                );
                let schedule = simulate(inst, rule, seed)
                    .unwrap_or_else(|e| panic!("builtin {name} failed on {}: {e}", inst.name));
                violations += validate_schedule(inst, &schedule).len();
            }
            violations
        })
        .sum();

    let elapsed = start.elapsed().as_secs_f64();
    let simulations = cases.len() * methods.len();
    let mut errors = Vec::new();
    if violation_count > 0 {
        errors.push(format!("{violation_count} constraint violations"));
    }
    if elapsed > 120.0 {
        errors.push(format!("took {elapsed:.1}s, budget 120s"));
    }
    verdict(
        1,
        "feasibility sweep",
        &errors,
        &format!("{simulations} simulations, 0 violations, {elapsed:.1}s"),
    );
}

#[test]
fn criterion_2_builtins_bounded_by_exhaustive_optimum() {
    let _guard = timed_guard();
    let start = Instant::now();
    let methods = all_builtins();
    let cases = GeneratedStaticCases::new(StaticGenParams {
        job_count_range: (2, 3),
        machine_count_range: (2, 3),
        processing_time_range: (1, 20),
        seed: 11,
    })
    .initial(50);

    let mut errors = Vec::new();
    let mut optimal_hits = vec![0usize; methods.len()];
    for (case_index, inst) in cases.iter().enumerate() {
        let optimal = brute_force_optimal(inst, DEFAULT_OP_BUDGET)
            .unwrap_or_else(|e| panic!("exhaustive search failed on {}: {e}", inst.name));
        for (method_index, (name, rule)) in methods.iter().enumerate() {
            let seed = derive_seed(11, stream::EVALUATION, case_index as u64);
            let makespan = simulate(inst, rule, seed).expect("builtins never fail").makespan;
            if makespan < optimal {
                errors.push(format!(
                    "{name} beat the optimum on {} ({makespan} < {optimal})",
                    inst.name
                ));
            }
            if makespan == optimal {
                optimal_hits[method_index] += 1;
            }
        }
    }

    let (best_index, best_hits) = optimal_hits
        .iter()
        .enumerate()
        .max_by_key(|(_, hits)| **hits)
        .map(|(i, hits)| (i, *hits))
        .unwrap();
    if best_hits < 15 {
        errors.push(format!(
            "best rule reached the optimum on only {best_hits}/50 instances, need 15"
        ));
    }
    let elapsed = start.elapsed().as_secs_f64();
    if elapsed > 30.0 {
        errors.push(format!("took {elapsed:.1}s, budget 30s"));
    }
    verdict(
        2,
        "exhaustive lower bound",
        &errors,
        &format!(
            "50 instances, {} optimal on {best_hits}/50, {elapsed:.1}s",
            methods[best_index].0
        ),
    );
}

#[test]
fn criterion_3_makespans_respect_best_known_bounds() {
    let methods = all_builtins();
    let mut errors = Vec::new();
    let mut checked = 0usize;
    let mut min_margin = f64::INFINITY;

    let mut check_instance = |inst: &Instance, bound: Time, errors: &mut Vec<String>| {
        for (method_index, (name, rule)) in methods.iter().enumerate() {
            let seed = derive_seed(3, stream::EVALUATION, method_index as u64);
            let makespan = simulate(inst, rule, seed).expect("builtins never fail").makespan;
            if makespan < bound {
                errors.push(format!(
                    "{name} on {} beat the best-known bound ({makespan} < {bound})",
                    inst.name
                ));
            }
            min_margin = min_margin.min(makespan as f64 / bound as f64);
        }
    };

    let ta01 = generate_taillard(&TA01);
    check_instance(&ta01, 1231, &mut errors);
    checked += 1;

    let all_bounds: Vec<(&str, Time)> = TA_UPPER_BOUNDS
        .iter()
        .chain(DMU_UPPER_BOUNDS.iter())
        .copied()
        .collect();
    let mut skipped: Vec<&str> = Vec::new();
    let data_dir = bench_data_dir();
    for (name, bound) in &all_bounds {
        if *name == "TA01" {
            continue;
        }
        let loaded = data_dir.as_deref().and_then(|dir| load_named_instance(dir, name));
        match loaded {
            Some(inst) => {
                check_instance(&inst, *bound, &mut errors);
                checked += 1;
            }
            None => skipped.push(name),
        }
    }

    let detail = if skipped.is_empty() {
        format!("{checked}/32 instances, min makespan/bound ratio {min_margin:.3}")
    } else {
        format!(
            "{checked}/32 instances (TA01 generated), min ratio {min_margin:.3}; \
             {} SKIPPED: instance files not bundled, set SHOPEVO_BENCH_DIR",
            skipped.len()
        )
    };
    verdict(3, "best-known bounds", &errors, &detail);
}

#[test]
fn criterion_4_spt_matches_reference_results() {
    let Some(dir) = bench_data_dir() else {
        println!(
            "criterion 4 (SPT reference mean) ... SKIP  [needs the 16 DMU instance files; \
             set SHOPEVO_BENCH_DIR to run]"
        );
        return;
    };
    let mut missing = Vec::new();
    let mut instances = Vec::new();
    for (name, _) in &REFERENCE_SPT_DMU {
        match load_named_instance(&dir, name) {
            Some(inst) => instances.push(inst),
            None => missing.push(*name),
        }
    }
    if !missing.is_empty() {
        println!(
            "criterion 4 (SPT reference mean) ... SKIP  [missing {} of 16 DMU files in {}: {}]",
            missing.len(),
            dir.display(),
            missing.join(", ")
        );
        return;
    }

    let spt = builtin("SPT").unwrap();
    let mut errors = Vec::new();
    let mut total = 0.0;
    for (inst, (name, reference)) in instances.iter().zip(&REFERENCE_SPT_DMU) {
        let makespan = simulate(inst, &spt, 0).expect("SPT never fails").makespan as f64;
        total += makespan;
        let deviation = (makespan - reference) / reference;
        if deviation.abs() > 0.05 {
            println!(
                "  note: SPT on {name} is {makespan} vs reference {reference} \
                 ({:+.1}%, tie-breaking differences)",
                deviation * 100.0
            );
        }
    }
    let mean = total / instances.len() as f64;
    let mean_deviation = (mean - REFERENCE_SPT_MEAN) / REFERENCE_SPT_MEAN;
    if mean_deviation.abs() > 0.05 {
        errors.push(format!(
            "SPT mean {mean:.2} deviates {:+.1}% from reference {REFERENCE_SPT_MEAN}",
            mean_deviation * 100.0
        ));
    }
    verdict(
        4,
        "SPT reference mean",
        &errors,
        &format!(
            "16 DMU instances, mean {mean:.2} vs reference {REFERENCE_SPT_MEAN} ({:+.2}%)",
            mean_deviation * 100.0
        ),
    );
}

#[test]
fn criterion_5_evolution_improves_on_seed_rules() {
    let _guard = timed_guard();
    let start = Instant::now();
    let cfg = EvolutionConfig {
        seed: 42,
        ..EvolutionConfig::default()
    };
    let artifacts = run_offline(&cfg);
    let elapsed = start.elapsed().as_secs_f64();

    let mut errors = Vec::new();
    if artifacts.iterations.len() != 20 {
        errors.push(format!(
            "expected 20 iterations, got {}",
            artifacts.iterations.len()
        ));
    }
    let mut previous = f64::INFINITY;
    for log in &artifacts.iterations {
        if log.best_fitness > previous {
            errors.push(format!(
                "best fitness regressed at iteration {} ({} > {previous})",
                log.iteration, log.best_fitness
            ));
        }
        previous = log.best_fitness;
    }

    let seed_best = artifacts
        .initial_population
        .iter()
        .filter(|ind| ind.origin == Origin::Seed)
        .filter_map(|ind| ind.fitness)
        .fold(f64::INFINITY, f64::min);
    let final_best = artifacts.best.fitness.unwrap_or(f64::INFINITY);
    if final_best > seed_best {
        errors.push(format!(
            "final best {final_best} did not reach the seed rules' best {seed_best}"
        ));
    }
    if elapsed > 300.0 {
        errors.push(format!("took {elapsed:.1}s, budget 300s"));
    }
    verdict(
        5,
        "evolution improves on seeds",
        &errors,
        &format!(
            "20 iterations in {elapsed:.1}s, best {final_best:.2} vs seed best {seed_best:.2}, \
             trace monotone"
        ),
    );
}

#[test]
fn criterion_6_replay_is_byte_identical() {
    let cfg = EvolutionConfig {
        population_size: 12,
        max_function_evaluations: 4,
        training_case_count: 6,
        seed: 42,
        ..EvolutionConfig::default()
    };
    let recorded = run_offline(&cfg);

    let replay_run = |transcript: &[shopevo_core::llm::ChatExchange]| -> RunArtifacts {
        let mut provider = ReplayProvider::from_exchanges(transcript);
        let mut cases = GeneratedDynamicCases::new(DynamicGenParams {
            seed: cfg.seed,
            ..DynamicGenParams::default()
        });
        let (_, artifacts) = run_seevo(&cfg, &mut provider, &mut cases, &default_seeds())
            .expect("replay run completes");
        artifacts
    };
    let first = replay_run(&recorded.transcript);
    let second = replay_run(&recorded.transcript);

    let iteration_bytes =
        |a: &RunArtifacts| serde_json::to_string(&a.iterations).expect("iterations serialize");
    let best_rule_bytes = |a: &RunArtifacts| format!("{}\n", a.best.source);

    let mut errors = Vec::new();
    if iteration_bytes(&first) != iteration_bytes(&second) {
        errors.push("two replays produced different iteration logs".to_string());
    }
    if best_rule_bytes(&first) != best_rule_bytes(&second) {
        errors.push("two replays produced different best rules".to_string());
    }
    if iteration_bytes(&first) != iteration_bytes(&recorded) {
        errors.push("replay iteration logs differ from the recorded run".to_string());
    }
    if best_rule_bytes(&first) != best_rule_bytes(&recorded) {
        errors.push("replay best rule differs from the recorded run".to_string());
    }
    verdict(
        6,
        "replay determinism",
        &errors,
        &format!(
            "{} iterations and best rule byte-identical across 2 replays",
            first.iterations.len()
        ),
    );
}

#[test]
fn criterion_7_self_evolution_stage_is_separable() {
    let base = EvolutionConfig {
        population_size: 10,
        max_function_evaluations: 4,
        training_case_count: 5,
        seed: 42,
        ..EvolutionConfig::default()
    };
    let full = run_offline(&base);
    let reduced = run_offline(&EvolutionConfig {
        self_evolution_enabled: false,
        ..base
    });

    let mut errors = Vec::new();
    for (a, b) in full.iterations.iter().zip(&reduced.iterations) {
        if a.generation_requests <= b.generation_requests {
            errors.push(format!(
                "iteration {}: full loop made {} generation requests, reduced made {}",
                a.iteration, a.generation_requests, b.generation_requests
            ));
        }
        if a.after_self_evolution.is_none() {
            errors.push(format!(
                "iteration {}: full loop recorded no self-evolution stage",
                a.iteration
            ));
        }
        if b.after_self_evolution.is_some() {
            errors.push(format!(
                "iteration {}: reduced loop recorded a self-evolution stage",
                b.iteration
            ));
        }
    }
    let self_reflections = |a: &RunArtifacts| {
        a.transcript
            .iter()
            .filter(|x| x.kind == RequestKind::SelfReflect)
            .count()
    };
    if self_reflections(&full) == 0 {
        errors.push("full loop transcript has no self-reflection calls".to_string());
    }
    if self_reflections(&reduced) != 0 {
        errors.push("reduced loop transcript has self-reflection calls".to_string());
    }

    let requests = |a: &RunArtifacts| -> Vec<u32> {
        a.iterations.iter().map(|l| l.generation_requests).collect()
    };
    verdict(
        7,
        "self-evolution ablation",
        &errors,
        &format!(
            "generation requests per iteration: full {:?} vs reduced {:?}",
            requests(&full),
            requests(&reduced)
        ),
    );
}

#[test]
fn criterion_8_benchmark_sweep_is_consistent() {
    let _guard = timed_guard();
    let builtin_names = [
        "SPT",
        "TWKR_MOST",
        "SRM",
        "SSO",
        "LPT",
        "LPT_TWK",
        "SPT_TWK",
        "SPT_PLUS_SSO",
        "SPT_LSO",
        "SPT_TWKR",
        "STPT",
    ];
    let mut methods: Vec<(String, RuleProgram)> = builtin_names
        .iter()
        .map(|name| (name.to_string(), builtin(name).unwrap()))
        .collect();

    let evolve_cfg = EvolutionConfig {
        population_size: 10,
        max_function_evaluations: 5,
        training_case_count: 10,
        seed: 11,
        ..EvolutionConfig::default()
    };
    let evolved_artifacts = run_offline(&evolve_cfg);
    let evolved =
        parse_rule(&evolved_artifacts.best.source).expect("evolved best rule parses back");
    methods.push(("EVOLVED".to_string(), evolved));

    let cases = GeneratedDynamicCases::new(DynamicGenParams {
        seed: 7,
        ..DynamicGenParams::default()
    })
    .initial(100);
    let sweep_seed = 7;
    let report = run_baselines(&cases, &methods, sweep_seed);

    let mut errors = Vec::new();
    if report.has_failed_cells() {
        errors.push("sweep has failed cells".to_string());
    }
    for (case_index, row) in report.gaps.iter().enumerate() {
        let gaps: Vec<f64> = row.iter().flatten().copied().collect();
        if !gaps.contains(&0.0) {
            errors.push(format!("case {case_index} has no zero-gap method"));
        }
        if gaps.iter().any(|g| *g < 0.0) {
            errors.push(format!("case {case_index} has a negative gap"));
        }
    }

    let mut mismatches = 0usize;
    for (case_index, inst) in cases.iter().enumerate() {
        for (method_index, (_, rule)) in methods.iter().enumerate() {
            let seed = cell_seed(sweep_seed, case_index, methods.len(), method_index);
            let expected = simulate(inst, rule, seed).ok().map(|s| s.makespan);
            if expected != report.makespans[case_index][method_index] {
                mismatches += 1;
            }
        }
    }
    if mismatches > 0 {
        errors.push(format!(
            "{mismatches} cells disagree with independent re-simulation"
        ));
    }

    let mean_gap = |name: &str| -> f64 {
        let index = report.method_index(name).expect("method present");
        report.mean_gap_per_method[index].expect("mean gap defined")
    };
    let evolved_gap = mean_gap("EVOLVED");
    let worst_builtin_gap = builtin_names
        .iter()
        .map(|name| mean_gap(name))
        .fold(f64::NEG_INFINITY, f64::max);
    if evolved_gap > worst_builtin_gap {
        errors.push(format!(
            "evolved rule mean gap {evolved_gap:.4} exceeds the worst baseline {worst_builtin_gap:.4}"
        ));
    }
    verdict(
        8,
        "benchmark sweep consistency",
        &errors,
        &format!(
            "100 cases x 12 methods, all cells re-verified, evolved mean gap {evolved_gap:.4} \
             vs worst baseline {worst_builtin_gap:.4}"
        ),
    );
}

/// Builds a random expression tree over the full grammar.
fn random_expr(rng: &mut ChaCha8Rng, depth: usize) -> Expr {
    const FEATURES: [Feature; 11] = shopevo_core::features::ALL_FEATURES;
    if depth == 0 || rng.random_ratio(1, 4) {
        return if rng.random_bool(0.5) {
            Expr::Feature(FEATURES[rng.random_range(0..FEATURES.len())])
        } else {
            Expr::Num(rng.random_range(0..16_000) as f64 / 16.0)
        };
    }
    match rng.random_range(0..3) {
        0 => {
            let op = match rng.random_range(0..4) {
                0 => BinOp::Add,
                1 => BinOp::Sub,
                2 => BinOp::Mul,
                _ => BinOp::Div,
            };
            Expr::Bin(
                op,
                Box::new(random_expr(rng, depth - 1)),
                Box::new(random_expr(rng, depth - 1)),
            )
        }
        1 => Expr::Neg(Box::new(random_expr(rng, depth - 1))),
        _ => {
            let func = match rng.random_range(0..6) {
                0 => Func::Min,
                1 => Func::Max,
                2 => Func::Abs,
                3 => Func::Sqrt,
                4 => Func::Log,
                _ => Func::Exp,
            };
            let args = (0..func.arity())
                .map(|_| random_expr(rng, depth - 1))
                .collect();
            Expr::Call(func, args)
        }
    }
}

fn random_features(rng: &mut ChaCha8Rng) -> FeatureVector {
    FeatureVector {
        pt: rng.random_range(0.0..1000.0),
        twk: rng.random_range(0.0..10_000.0),
        twkr: rng.random_range(0.0..10_000.0),
        srm: rng.random_range(0.0..10_000.0),
        nops_remaining: rng.random_range(0.0..50.0),
        sso: rng.random_range(0.0..1000.0),
        lso: rng.random_range(0.0..1000.0),
        arrival: rng.random_range(0.0..5000.0),
        wait: rng.random_range(0.0..5000.0),
        now: rng.random_range(0.0..20_000.0),
        rand: rng.random_range(0.0..1.0),
    }
}

#[test]
fn criterion_9_language_round_trips_and_evaluates_totally() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut errors = Vec::new();
    let mut eval_failures = 0usize;

    for i in 0..10_000 {
        let expr = random_expr(&mut rng, 4);
        let source = expr.print();
        let program = match parse_rule(&source) {
            Ok(program) => program,
            Err(err) => {
                if errors.len() < 3 {
                    errors.push(format!("printed tree {i} failed to re-parse: {err} ({source})"));
                }
                continue;
            }
        };
        if program.ast != expr && errors.len() < 3 {
            errors.push(format!("round-trip changed tree {i} ({source})"));
        }
        let features = random_features(&mut rng);
        match eval_rule(&program, &features) {
            Ok(value) if !value.is_finite() => {
                if errors.len() < 3 {
                    errors.push(format!("evaluation returned non-finite Ok on tree {i}"));
                }
            }
            Ok(_) => {}
            Err(_) => eval_failures += 1,
        }

        let mut mangled: Vec<u8> = source.clone().into_bytes();
        for _ in 0..rng.random_range(1..4) {
            if mangled.is_empty() {
                break;
            }
            let pos = rng.random_range(0..mangled.len());
            match rng.random_range(0..3) {
                0 => {
                    mangled.remove(pos);
                }
                1 => mangled.insert(pos, b"PTWK()+-*/.,0189 xq"[rng.random_range(0..19)]),
                _ => mangled[pos] = b"PTWK()+-*/.,0189 xq"[rng.random_range(0..19)],
            }
        }
        let _ = parse_rule(&String::from_utf8(mangled).unwrap());
    }

    let mut provider_rng = ChaCha8Rng::seed_from_u64(5);
    let pools: [Vec<String>; 3] = [
        vec!["-PT".to_string(), "-(PT / TWKR)".to_string()],
        vec!["not a rule @@@".to_string(), String::new()],
        vec![],
    ];
    let mut generated = 0usize;
    for i in 0..6000 {
        let kind = [RequestKind::Init, RequestKind::Crossover, RequestKind::Mutate][i % 3];
        let context = RequestContext {
            sources: pools[(i / 3) % pools.len()].clone(),
            improved: None,
        };
        let response = offline_response(kind, &context, &mut provider_rng);
        let source = extract_rule(&response);
        if parse_rule(&source).is_err() {
            if errors.len() < 3 {
                errors.push(format!("offline response {i} is not parseable ({source})"));
            }
        } else {
            generated += 1;
        }
    }

    verdict(
        9,
        "language robustness fuzz",
        &errors,
        &format!(
            "10000 trees round-tripped and evaluated ({eval_failures} overflow to Err), \
             10000 mangled parses, {generated} generated rules parsed"
        ),
    );
}
