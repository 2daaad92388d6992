//! File formats: standard job-shop text, dynamic-case sidecar JSON, rule
//! files, Gantt CSV export, and benchmark directory loading.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};
use shopevo_core::cases::{DynamicCase, DynamicGenParams};
use shopevo_core::instance::{parse_instance, Instance, Time};
use shopevo_core::rule::{builtin, parse_rule_file_text, RuleProgram};
use shopevo_core::schedule::Schedule;

/// Sidecar document describing a dynamic case: the batch structure that the
/// flat standard format cannot carry, plus the generator settings that
/// produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicSidecar {
    pub name: String,
    pub machine_count: usize,
    pub batches: Vec<SidecarBatch>,
    /// Seed the case was generated from; 0 for hand-written cases.
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub params: Option<DynamicGenParams>,
    /// Records the arrival convention baked into generated cases.
    pub note: String,
}

/// One job batch: a shared arrival time and the `(machine, duration)` route
/// of each job in the batch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SidecarBatch {
    pub arrival: Time,
    pub jobs: Vec<Vec<(usize, Time)>>,
}

/// The convention every generated sidecar records.
pub const ARRIVAL_NOTE: &str = "first batch arrival anchored at time 0";

impl DynamicSidecar {
    /// Builds the sidecar for a generated case.
    pub fn from_case(name: &str, case: &DynamicCase, params: DynamicGenParams) -> DynamicSidecar {
        DynamicSidecar {
            name: name.into(),
            machine_count: case.instance.machine_count,
            batches: case
                .batches
                .iter()
                .map(|b| SidecarBatch {
                    arrival: b.arrival,
                    jobs: b.routes.clone(),
                })
                .collect(),
            seed: params.seed,
            params: Some(params),
            note: ARRIVAL_NOTE.into(),
        }
    }

    /// Flattens the batches back into an instance, jobs in batch order.
    pub fn to_instance(&self) -> Result<Instance> {
        let mut routes = Vec::new();
        let mut arrivals = Vec::new();
        for batch in &self.batches {
            for job in &batch.jobs {
                routes.push(job.clone());
                arrivals.push(batch.arrival);
            }
        }
        Instance::from_routes(self.name.clone(), self.machine_count, &routes, arrivals)
            .map_err(|e| anyhow!("invalid case `{}`: {e}", self.name))
    }
}

/// Loads one instance file. `.json` files are dynamic-case sidecars; every
/// other extension is the standard text format with all arrivals at 0. The
/// instance is named after the file stem.
pub fn load_instance(path: &Path) -> Result<Instance> {
    let name = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("instance")
        .to_string();
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if path.extension().is_some_and(|e| e == "json") {
        let mut sidecar: DynamicSidecar = serde_json::from_str(&text)
            .with_context(|| format!("parsing sidecar {}", path.display()))?;
        sidecar.name = name;
        sidecar.to_instance()
    } else {
        parse_instance(&text, &name)
            .map_err(|e| anyhow!("{}: {e}", path.display()))
    }
}

/// Writes a dynamic case as a sidecar JSON file.
pub fn write_sidecar(path: &Path, sidecar: &DynamicSidecar) -> Result<()> {
    let json = serde_json::to_string_pretty(sidecar)?;
    fs::write(path, json + "\n").with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Loads a rule from a file: `#` lines are comments, the remaining non-empty
/// lines form one expression.
pub fn load_rule_file(path: &Path) -> Result<RuleProgram> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_rule_file_text(&text)
        .map_err(|e| anyhow!("{}: parse error at position {}: {}", path.display(), e.position, e.message))
}

/// Resolves one `--rules` entry: a catalog name like `SPT`, or a path to a
/// rule file (anything containing a path separator or a dot).
pub fn resolve_method(entry: &str) -> Result<(String, RuleProgram)> {
    if entry.contains('/') || entry.contains('.') {
        let path = PathBuf::from(entry);
        let name = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or(entry)
            .to_string();
        Ok((name, load_rule_file(&path)?))
    } else {
        let rule = builtin(entry).map_err(|e| anyhow!("{e}"))?;
        Ok((entry.to_uppercase(), rule))
    }
}

/// Writes a schedule as CSV, one committed operation per row.
pub fn write_gantt_csv(path: &Path, schedule: &Schedule) -> Result<()> {
    let mut rows = schedule.entries.clone();
    rows.sort_by_key(|e| (e.machine_id, e.start, e.job_id));
    let mut out = String::from("job,op,machine,start,end\n");
    for e in &rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            e.job_id, e.op_index, e.machine_id, e.start, e.end
        ));
    }
    fs::write(path, out).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Loads every instance file in a directory, sorted by name. `filter` keeps
/// only files whose stem contains the given substring (case-insensitive).
/// Parse failures are collected across all files and reported together; an
/// empty result is not an error, only a warning on stderr.
pub fn load_benchmark_set(dir: &Path, filter: Option<&str>) -> Result<Vec<Instance>> {
    let entries =
        fs::read_dir(dir).with_context(|| format!("reading directory {}", dir.display()))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.is_file())
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| !n.starts_with('.'))
        })
        .collect();
    if let Some(pattern) = filter {
        let pattern = pattern.to_lowercase();
        paths.retain(|p| {
            p.file_stem()
                .and_then(|s| s.to_str())
                .is_some_and(|s| s.to_lowercase().contains(&pattern))
        });
    }
    paths.sort_by_key(|p| p.file_stem().map(|s| s.to_os_string()));

    let mut instances = Vec::new();
    let mut errors = Vec::new();
    for path in &paths {
        match load_instance(path) {
            Ok(inst) => instances.push(inst),
            Err(e) => errors.push(format!("{e:#}")),
        }
    }
    if !errors.is_empty() {
        bail!(
            "{} of {} files failed to parse:\n  {}",
            errors.len(),
            paths.len(),
            errors.join("\n  ")
        );
    }
    if instances.is_empty() {
        eprintln!(
            "warning: no instance files found in {}{}",
            dir.display(),
            filter.map(|f| format!(" matching `{f}`")).unwrap_or_default()
        );
    }
    Ok(instances)
}
