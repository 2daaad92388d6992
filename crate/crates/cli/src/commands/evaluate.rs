//! `evaluate`: run one rule over instance files and print makespans.

use std::fs;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use shopevo_core::rule::{builtin, RuleProgram};
use shopevo_core::seed::{derive_seed, stream};
use shopevo_core::simulate;

use crate::io::{load_instance, load_rule_file, write_gantt_csv};

#[derive(clap::Args, Debug)]
pub struct Args {
    /// Catalog rule name, e.g. SPT
    #[arg(long, conflicts_with = "rule_file")]
    pub rule: Option<String>,

    /// Rule expression file ('#' lines are comments)
    #[arg(long, value_name = "FILE")]
    pub rule_file: Option<PathBuf>,

    /// Root seed for tie-breaking randomness; instance i simulates under a
    /// seed derived from (seed, i)
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Directory to write one Gantt CSV per instance
    #[arg(long, value_name = "DIR")]
    pub gantt: Option<PathBuf>,

    /// Instance files (standard text or dynamic sidecar JSON)
    #[arg(required = true, value_name = "INSTANCE")]
    pub instances: Vec<PathBuf>,
}

fn resolve_rule(args: &Args) -> Result<(String, RuleProgram)> {
    match (&args.rule, &args.rule_file) {
        (Some(name), None) => Ok((
            name.to_uppercase(),
            builtin(name).map_err(|e| anyhow!("{e}"))?,
        )),
        (None, Some(path)) => {
            let stem = path
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or("rule")
                .to_string();
            Ok((stem, load_rule_file(path)?))
        }
        _ => bail!("pass exactly one of --rule or --rule-file"),
    }
}

pub fn run(args: Args) -> Result<u8> {
    let (rule_name, rule) = resolve_rule(&args)?;
    if let Some(dir) = &args.gantt {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }

    let width = args
        .instances
        .iter()
        .filter_map(|p| p.file_stem().and_then(|s| s.to_str()).map(str::len))
        .max()
        .unwrap_or(4);
    let mut total: u64 = 0;
    for (index, path) in args.instances.iter().enumerate() {
        let inst = load_instance(path)?;
        let seed = derive_seed(args.seed, stream::EVALUATION, index as u64);
        let schedule = simulate(&inst, &rule, seed)
            .map_err(|e| anyhow!("rule `{rule_name}` failed on {}: {e}", inst.name))?;
        println!("{:<width$}  {}", inst.name, schedule.makespan);
        total += schedule.makespan;
        if let Some(dir) = &args.gantt {
            write_gantt_csv(&dir.join(format!("{}.csv", inst.name)), &schedule)?;
        }
    }
    println!(
        "{:<width$}  {:.2}",
        "mean",
        total as f64 / args.instances.len() as f64
    );
    Ok(0)
}
