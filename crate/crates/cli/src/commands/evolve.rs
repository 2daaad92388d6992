//! `evolve`: run the full evolution loop and persist the run directory.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::ValueEnum;
use shopevo_core::cases::{DynamicGenParams, GeneratedDynamicCases};
use shopevo_core::evolve::EvolveError;
use shopevo_core::rule::{builtin, parse_rule, RuleProgram};

use crate::config::{ConfigOverlay, ProviderKind, RunConfig};
use crate::provider::build_provider;
use crate::rundir;
use crate::{EXIT_INPUT_ERROR, EXIT_RUN_FAILURE};

/// Stages that can be switched off to run a reduced loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Ablation {
    /// Skip the self-evolution stage; offspring go straight to mutation.
    NoSelfEvolution,
}

#[derive(clap::Args, Debug)]
pub struct Args {
    /// Config file with `key = value` lines
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Text-generation backend: offline, replay, or live
    #[arg(long)]
    pub provider: Option<ProviderKind>,

    /// Transcript to replay (JSONL of recorded exchanges)
    #[arg(long, value_name = "FILE")]
    pub transcript: Option<PathBuf>,

    /// Chat-completion endpoint base, e.g. https://host/v1
    #[arg(long)]
    pub base_url: Option<String>,

    /// Model name sent to the live endpoint
    #[arg(long)]
    pub model: Option<String>,

    /// Environment variable holding the API key
    #[arg(long)]
    pub api_key_env: Option<String>,

    /// Root seed for the whole run
    #[arg(long)]
    pub seed: Option<u64>,

    /// Population size
    #[arg(long)]
    pub population: Option<usize>,

    /// Iteration budget
    #[arg(long)]
    pub max_fe: Option<u32>,

    /// Training cases held at any one time
    #[arg(long)]
    pub cases: Option<usize>,

    /// Per-slot mutation probability
    #[arg(long)]
    pub mutation_prob: Option<f64>,

    /// Per-pair crossover probability
    #[arg(long)]
    pub crossover_prob: Option<f64>,

    /// Individuals preserved by elitism
    #[arg(long)]
    pub elite: Option<usize>,

    /// Sampling temperature passed to the provider
    #[arg(long)]
    pub temperature: Option<f64>,

    /// Run a reduced loop with one stage disabled
    #[arg(long, value_enum)]
    pub ablation: Option<Ablation>,

    /// Seed rules file, one expression per line ('#' lines are comments);
    /// defaults to the SPT and SPT/TWKR catalog rules
    #[arg(long, value_name = "FILE")]
    pub seed_rules: Option<PathBuf>,

    /// Run directory; defaults to runs/seed-<seed>
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,

    /// Worker threads for parallel sweeps
    #[arg(long)]
    pub jobs: Option<usize>,
}

impl Args {
    fn overlay(&self) -> ConfigOverlay {
        ConfigOverlay {
            provider: self.provider,
            transcript: self
                .transcript
                .as_ref()
                .map(|p| p.display().to_string()),
            base_url: self.base_url.clone(),
            model: self.model.clone(),
            api_key_env: self.api_key_env.clone(),
            seed: self.seed,
            population_size: self.population,
            max_function_evaluations: self.max_fe,
            training_case_count: self.cases,
            mutation_probability: self.mutation_prob,
            crossover_probability: self.crossover_prob,
            elite_count: self.elite,
            self_evolution_enabled: self.ablation.map(|_| false),
            temperature: self.temperature,
            jobs: self.jobs,
        }
    }
}

/// Loads seed rules: one expression per non-comment line.
pub fn load_seed_rules(path: &Path) -> Result<Vec<RuleProgram>> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut seeds = Vec::new();
    for (index, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let rule = parse_rule(line).map_err(|e| {
            anyhow!(
                "{} line {}: parse error at position {}: {}",
                path.display(),
                index + 1,
                e.position,
                e.message
            )
        })?;
        seeds.push(rule);
    }
    if seeds.is_empty() {
        bail!("{} holds no seed rules", path.display());
    }
    Ok(seeds)
}

fn default_seeds() -> Vec<RuleProgram> {
    vec![builtin("SPT").unwrap(), builtin("SPT_TWKR").unwrap()]
}

/// Exit code for an aborted run: configuration and input problems exit 2,
/// everything the run itself hit exits 1.
pub fn exit_for(error: &EvolveError) -> u8 {
    match error {
        EvolveError::Config(_) | EvolveError::NoSeeds | EvolveError::EmptyArtifacts => {
            EXIT_INPUT_ERROR
        }
        _ => EXIT_RUN_FAILURE,
    }
}

pub fn run(args: Args) -> Result<u8> {
    let overlay = args.overlay();
    let cfg = RunConfig::resolve(args.config.as_deref(), overlay)?;
    super::configure_jobs(cfg.jobs);
    let out = args
        .out
        .unwrap_or_else(|| PathBuf::from(format!("runs/seed-{}", cfg.seed)));

    let seeds = match &args.seed_rules {
        Some(path) => load_seed_rules(path)?,
        None => default_seeds(),
    };
    let mut provider = build_provider(&cfg)?;
    let mut source = GeneratedDynamicCases::new(DynamicGenParams {
        seed: cfg.seed,
        ..DynamicGenParams::default()
    });

    match shopevo_core::evolve::run_seevo(
        &cfg.evolution(),
        provider.as_mut(),
        &mut source,
        &seeds,
    ) {
        Ok((_, artifacts)) => {
            rundir::write_run(&out, &cfg, &artifacts)?;
            for log in &artifacts.iterations {
                println!(
                    "iteration {:>3}  best {:<12.4} {}",
                    log.iteration, log.best_fitness, log.best_source
                );
            }
            println!("best rule: {}", artifacts.best.source);
            match artifacts.best.fitness {
                Some(f) => println!("fitness:   {f:.4}"),
                None => println!("fitness:   invalid"),
            }
            println!("run dir:   {}", out.display());
            Ok(0)
        }
        Err(failure) => {
            rundir::write_failure(&out, &cfg, &failure)?;
            eprintln!("error: run aborted: {}", failure.error);
            eprintln!("partial record written to {}", out.display());
            Ok(exit_for(&failure.error))
        }
    }
}
