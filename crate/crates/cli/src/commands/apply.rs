//! `apply`: adapt a trained run to new cases with one evolution iteration.

use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use shopevo_core::cases::{CaseSource, DynamicGenParams, GeneratedDynamicCases};
use shopevo_core::evolve::apply_online;
use shopevo_core::instance::Instance;

use crate::config::ProviderKind;
use crate::io::load_instance;
use crate::provider::build_provider;
use crate::rundir;

use super::evolve::exit_for;

#[derive(clap::Args, Debug)]
pub struct Args {
    /// Run directory of a completed evolve run
    #[arg(long, value_name = "DIR")]
    pub run: PathBuf,

    /// Override the stored provider choice
    #[arg(long)]
    pub provider: Option<ProviderKind>,

    /// Transcript to replay (JSONL of recorded exchanges)
    #[arg(long, value_name = "FILE")]
    pub transcript: Option<PathBuf>,

    /// When no instance files are given, generate this many fresh dynamic
    /// cases to adapt on
    #[arg(long, default_value_t = 5)]
    pub cases: usize,

    /// Seed for the generated cases
    #[arg(long, default_value_t = 1)]
    pub seed: u64,

    /// Directory for the apply record
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,

    /// Case files to adapt on instead of generated ones
    #[arg(value_name = "INSTANCE")]
    pub instances: Vec<PathBuf>,
}

pub fn run(args: Args) -> Result<u8> {
    let mut cfg = rundir::load_config(&args.run)?;
    if let Some(kind) = args.provider {
        cfg.provider = kind;
    }
    if let Some(path) = &args.transcript {
        cfg.transcript = Some(path.display().to_string());
    }
    let artifacts = rundir::load_artifacts(&args.run)?;

    let cases: Vec<Instance> = if args.instances.is_empty() {
        GeneratedDynamicCases::new(DynamicGenParams {
            seed: args.seed,
            ..DynamicGenParams::default()
        })
        .initial(args.cases)
    } else {
        args.instances
            .iter()
            .map(|p| load_instance(p))
            .collect::<Result<_>>()?
    };

    let mut provider = build_provider(&cfg)?;
    match apply_online(&artifacts, provider.as_mut(), &cases) {
        Ok(outcome) => {
            println!("best rule: {}", outcome.best.source);
            match outcome.best.fitness {
                Some(f) => println!("fitness:   {f:.4}"),
                None => println!("fitness:   invalid"),
            }
            if let Some(dir) = &args.out {
                fs::create_dir_all(dir)
                    .with_context(|| format!("creating {}", dir.display()))?;
                fs::write(
                    dir.join(rundir::BEST_RULE_FILE),
                    format!("{}\n", outcome.best.source),
                )?;
                let iteration = serde_json::to_string_pretty(&outcome.iteration)?;
                fs::write(dir.join("iteration.json"), iteration + "\n")?;
                let mut transcript = String::new();
                for exchange in &outcome.transcript {
                    transcript.push_str(&serde_json::to_string(exchange)?);
                    transcript.push('\n');
                }
                fs::write(dir.join(rundir::TRANSCRIPT_FILE), transcript)?;
                let mut reflections = String::new();
                for record in &outcome.reflections {
                    reflections.push_str(&serde_json::to_string(record)?);
                    reflections.push('\n');
                }
                fs::write(dir.join(rundir::REFLECTIONS_FILE), reflections)?;
                println!("apply dir: {}", dir.display());
            }
            Ok(0)
        }
        Err(failure) => {
            if let Some(dir) = &args.out {
                rundir::write_failure(dir, &cfg, &failure)?;
                eprintln!("partial record written to {}", dir.display());
            }
            eprintln!("error: apply aborted: {}", failure.error);
            Ok(exit_for(&failure.error))
        }
    }
}
