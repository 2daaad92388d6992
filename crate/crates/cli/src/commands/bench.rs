//! `bench`: sweep rules over an instance set and report the results.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use shopevo_core::cases::{CaseSource, DynamicGenParams, GeneratedDynamicCases};
use shopevo_core::instance::{Instance, Time};
use shopevo_core::report::{cell_seed, BenchReport};
use shopevo_core::rule::{all_builtins, RuleProgram};
use shopevo_core::simulate;

use crate::io::{load_benchmark_set, load_instance, resolve_method};
use crate::table;
use crate::EXIT_RUN_FAILURE;

#[derive(clap::Args, Debug)]
pub struct Args {
    /// Directory of benchmark instance files
    #[arg(long, value_name = "DIR", conflicts_with = "dynamic")]
    pub dmu: Option<PathBuf>,

    /// Keep only files whose name contains this substring
    #[arg(long)]
    pub filter: Option<String>,

    /// Sweep seeded dynamic cases instead of files
    #[arg(long)]
    pub dynamic: bool,

    /// How many dynamic cases to generate
    #[arg(long, default_value_t = 100)]
    pub cases: usize,

    /// Root seed for case generation and tie-breaking
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// `all-builtins`, or a comma-separated list of catalog names and
    /// rule-file paths
    #[arg(long, default_value = "all-builtins")]
    pub rules: String,

    /// Directory for report.json, the CSV tables, and the plot data
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,

    /// Worker threads
    #[arg(long)]
    pub jobs: Option<usize>,

    /// Instance files to sweep (alternative to --dmu and --dynamic)
    #[arg(value_name = "INSTANCE")]
    pub instances: Vec<PathBuf>,
}

/// Resolves a `--rules` value into named programs.
pub fn parse_rules(spec: &str) -> Result<Vec<(String, RuleProgram)>> {
    if spec == "all-builtins" {
        return Ok(all_builtins()
            .into_iter()
            .map(|(name, rule)| (name.to_string(), rule))
            .collect());
    }
    spec.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(resolve_method)
        .collect()
}

/// Simulates every `(case, method)` cell, cases in parallel. Seeds match
/// the sequential sweep in the core crate cell for cell.
pub fn parallel_baselines(
    instances: &[Instance],
    methods: &[(String, RuleProgram)],
    sweep_seed: u64,
) -> BenchReport {
    let makespans: Vec<Vec<Option<Time>>> = instances
        .par_iter()
        .enumerate()
        .map(|(case_index, inst)| {
            methods
                .iter()
                .enumerate()
                .map(|(method_index, (_, rule))| {
                    let seed = cell_seed(sweep_seed, case_index, methods.len(), method_index);
                    simulate(inst, rule, seed).ok().map(|s| s.makespan)
                })
                .collect()
        })
        .collect();
    BenchReport::from_makespans(
        instances.iter().map(|i| i.name.clone()).collect(),
        methods.iter().map(|(name, _)| name.clone()).collect(),
        makespans,
    )
}

/// Writes report.json plus the rendered tables and plot data.
pub fn write_report_files(dir: &Path, report: &BenchReport) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let json = serde_json::to_string_pretty(report)?;
    fs::write(dir.join("report.json"), json + "\n")?;
    fs::write(dir.join("makespans.csv"), table::render_makespans_csv(report))?;
    fs::write(dir.join("gaps.csv"), table::render_gaps_csv(report))?;
    let plot = serde_json::to_string_pretty(&table::plot_data(report))?;
    fs::write(dir.join("plot_data.json"), plot + "\n")?;
    Ok(())
}

pub fn run(args: Args) -> Result<u8> {
    super::configure_jobs(args.jobs);

    let instances: Vec<Instance> = if let Some(dir) = &args.dmu {
        load_benchmark_set(dir, args.filter.as_deref())?
    } else if args.dynamic {
        GeneratedDynamicCases::new(DynamicGenParams {
            seed: args.seed,
            ..DynamicGenParams::default()
        })
        .initial(args.cases)
    } else if !args.instances.is_empty() {
        args.instances
            .iter()
            .map(|p| load_instance(p))
            .collect::<Result<_>>()?
    } else {
        bail!("pass --dmu DIR, --dynamic, or instance files");
    };
    if instances.is_empty() {
        println!("nothing to bench");
        return Ok(0);
    }

    let methods = parse_rules(&args.rules)?;
    if methods.is_empty() {
        bail!("--rules resolved to no methods");
    }

    let report = parallel_baselines(&instances, &methods, args.seed);
    print!("{}", table::render_text(&report));
    if let Some(dir) = &args.out {
        write_report_files(dir, &report)?;
        println!("report written to {}", dir.display());
    }

    if report.has_failed_cells() {
        eprintln!("error: some cells failed to simulate");
        Ok(EXIT_RUN_FAILURE)
    } else {
        Ok(0)
    }
}
