//! Run-directory layout. A completed run writes everything needed to
//! inspect it, replay it, or apply its population to new cases; an aborted
//! run writes whatever was recorded up to the stop.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde::{de::DeserializeOwned, Deserialize, Serialize};
use shopevo_core::evolve::{IndividualSnapshot, RunArtifacts, RunFailure};

use crate::config::RunConfig;

pub const CONFIG_FILE: &str = "config.json";
pub const SUMMARY_FILE: &str = "summary.json";
pub const ITERATIONS_FILE: &str = "iterations.jsonl";
pub const TRANSCRIPT_FILE: &str = "transcript.jsonl";
pub const REFLECTIONS_FILE: &str = "reflections.jsonl";
pub const INITIAL_POPULATION_FILE: &str = "population_initial.json";
pub const FINAL_POPULATION_FILE: &str = "population_final.json";
pub const BEST_RULE_FILE: &str = "best_rule.txt";
pub const MEMORY_FILE: &str = "memory.json";
pub const ERROR_FILE: &str = "error.txt";

/// Everything from the run record that is not already in another file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunSummary {
    pub provider: String,
    pub seed_sources: Vec<String>,
    pub case_names: Vec<String>,
    pub best: IndividualSnapshot,
}

fn write_pretty<T: Serialize>(dir: &Path, file: &str, value: &T) -> Result<()> {
    let path = dir.join(file);
    let json = serde_json::to_string_pretty(value)?;
    fs::write(&path, json + "\n").with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn write_jsonl<T: Serialize>(dir: &Path, file: &str, items: &[T]) -> Result<()> {
    let path = dir.join(file);
    let mut out = String::new();
    for item in items {
        out.push_str(&serde_json::to_string(item)?);
        out.push('\n');
    }
    fs::write(&path, out).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn read_pretty<T: DeserializeOwned>(dir: &Path, file: &str) -> Result<T> {
    let path = dir.join(file);
    let text =
        fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Writes a completed run.
pub fn write_run(dir: &Path, cfg: &RunConfig, artifacts: &RunArtifacts) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    write_pretty(dir, CONFIG_FILE, cfg)?;
    write_pretty(
        dir,
        SUMMARY_FILE,
        &RunSummary {
            provider: artifacts.provider.clone(),
            seed_sources: artifacts.seed_sources.clone(),
            case_names: artifacts.case_names.clone(),
            best: artifacts.best.clone(),
        },
    )?;
    write_jsonl(dir, ITERATIONS_FILE, &artifacts.iterations)?;
    write_jsonl(dir, TRANSCRIPT_FILE, &artifacts.transcript)?;
    write_jsonl(dir, REFLECTIONS_FILE, &artifacts.reflections)?;
    write_pretty(dir, INITIAL_POPULATION_FILE, &artifacts.initial_population)?;
    write_pretty(dir, FINAL_POPULATION_FILE, &artifacts.final_population)?;
    write_pretty(dir, MEMORY_FILE, &artifacts.collective_memory)?;
    fs::write(dir.join(BEST_RULE_FILE), format!("{}\n", artifacts.best.source))
        .with_context(|| format!("writing {}", dir.join(BEST_RULE_FILE).display()))?;
    Ok(())
}

/// Writes the partial record of an aborted run: the config, everything
/// logged before the stop, and the error itself.
pub fn write_failure(dir: &Path, cfg: &RunConfig, failure: &RunFailure) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    write_pretty(dir, CONFIG_FILE, cfg)?;
    write_jsonl(dir, ITERATIONS_FILE, &failure.iterations)?;
    write_jsonl(dir, TRANSCRIPT_FILE, &failure.transcript)?;
    write_jsonl(dir, REFLECTIONS_FILE, &failure.reflections)?;
    fs::write(dir.join(ERROR_FILE), format!("{}\n", failure.error))
        .with_context(|| format!("writing {}", dir.join(ERROR_FILE).display()))?;
    Ok(())
}

/// Reads the stored config snapshot.
pub fn load_config(dir: &Path) -> Result<RunConfig> {
    read_pretty(dir, CONFIG_FILE)
}

/// Rebuilds the run record the apply stage needs: config, final population,
/// collective memory, and the summary. Transcripts and iteration logs stay
/// on disk.
pub fn load_artifacts(dir: &Path) -> Result<RunArtifacts> {
    let cfg = load_config(dir)?;
    let summary: RunSummary = read_pretty(dir, SUMMARY_FILE)?;
    let final_population: Vec<IndividualSnapshot> = read_pretty(dir, FINAL_POPULATION_FILE)?;
    let collective_memory: Vec<String> = read_pretty(dir, MEMORY_FILE)?;
    Ok(RunArtifacts {
        config: cfg.evolution(),
        provider: summary.provider,
        seed_sources: summary.seed_sources,
        case_names: summary.case_names,
        initial_population: Vec::new(),
        iterations: Vec::new(),
        final_population,
        transcript: Vec::new(),
        reflections: Vec::new(),
        collective_memory,
        best: summary.best,
    })
}
