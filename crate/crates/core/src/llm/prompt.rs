//! Prompt templates and rendering.
//!
//! Each evolution stage has a text template with `{slot}` placeholders. The
//! bundle of templates is swappable so a binary can load custom prompts
//! from disk, while [`default_bundle`](PromptBundle::default) embeds a
//! reasonable set at compile time.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use super::{Message, RequestKind};

/// The full set of prompt templates used by one run.
///
/// `task_specification` becomes the system message of every request.
/// `generation_instructions` is appended to the user message of stages that
/// must answer with a rule expression.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptBundle {
    pub task_specification: String,
    pub init: String,
    pub co_reflect: String,
    pub self_reflect_improved: String,
    pub self_reflect_regressed: String,
    pub collective: String,
    pub crossover: String,
    pub mutate: String,
    pub generation_instructions: String,
}

impl Default for PromptBundle {
    fn default() -> Self {
        PromptBundle {
            task_specification: include_str!("templates/task_spec.txt").to_string(),
            init: include_str!("templates/init.txt").to_string(),
            co_reflect: include_str!("templates/co_reflect.txt").to_string(),
            self_reflect_improved: include_str!("templates/self_reflect_improved.txt")
                .to_string(),
            self_reflect_regressed: include_str!("templates/self_reflect_regressed.txt")
                .to_string(),
            collective: include_str!("templates/collective.txt").to_string(),
            crossover: include_str!("templates/crossover.txt").to_string(),
            mutate: include_str!("templates/mutate.txt").to_string(),
            generation_instructions: include_str!("templates/output_format.txt").to_string(),
        }
    }
}

/// A rule text plus the fitness it scored, as shown to the model.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceInfo {
    pub source: String,
    pub fitness: Option<f64>,
}

impl SourceInfo {
    pub fn new(source: impl Into<String>, fitness: Option<f64>) -> Self {
        SourceInfo {
            source: source.into(),
            fitness,
        }
    }
}

/// Stage-specific inputs for one prompt.
///
/// Which fields matter depends on the kind: `sources` carries seeds for
/// `Init`, the (better, worse) pair for `CoReflect` and `Crossover`, the
/// (before, after) pair for `SelfReflect`, and the elite for `Mutate`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StageData {
    pub sources: Vec<SourceInfo>,
    /// Reflection text for `Crossover`, joined history for `Collective`.
    pub reflection: Option<String>,
    /// Collective memory text for `Mutate`.
    pub memory: Option<String>,
    /// Which self-reflection branch applies.
    pub improved: Option<bool>,
    /// Short description of the training cases, e.g. "20 generated cases".
    pub case_summary: String,
}

/// A template referenced a slot the stage data cannot fill.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("prompt for {kind} is missing {what}")]
pub struct RenderError {
    pub kind: &'static str,
    pub what: &'static str,
}

fn fitness_text(fitness: Option<f64>) -> String {
    match fitness {
        Some(value) => format!("{value:.4}"),
        None => "invalid".to_string(),
    }
}

fn fill(template: &str, slots: &[(&str, &str)]) -> String {
    let mut text = template.to_string();
    for (name, value) in slots {
        let pattern = format!("{{{name}}}");
        text = text.replace(&pattern, value);
    }
    text
}

fn need(
    sources: &[SourceInfo],
    index: usize,
    kind: &'static str,
    what: &'static str,
) -> Result<SourceInfo, RenderError> {
    sources.get(index).cloned().ok_or(RenderError { kind, what })
}

/// Render the chat messages for one stage.
///
/// Every prompt is a system message holding the task specification plus one
/// user message holding the stage instructions; generation stages also get
/// the output-format instructions appended.
pub fn render_prompt(
    kind: RequestKind,
    bundle: &PromptBundle,
    data: &StageData,
) -> Result<Vec<Message>, RenderError> {
    let name = kind.as_str();
    let body = match kind {
        RequestKind::Init => {
            if data.sources.is_empty() {
                return Err(RenderError {
                    kind: name,
                    what: "seed heuristics",
                });
            }
            let seeds = data
                .sources
                .iter()
                .map(|info| format!("  {}", info.source))
                .collect::<Vec<_>>()
                .join("\n");
            fill(&bundle.init, &[("seeds", seeds.as_str())])
        }
        RequestKind::CoReflect => {
            let better = need(&data.sources, 0, name, "the better parent")?;
            let worse = need(&data.sources, 1, name, "the worse parent")?;
            fill(
                &bundle.co_reflect,
                &[
                    ("cases", data.case_summary.as_str()),
                    ("better_source", better.source.as_str()),
                    ("better_fitness", fitness_text(better.fitness).as_str()),
                    ("worse_source", worse.source.as_str()),
                    ("worse_fitness", fitness_text(worse.fitness).as_str()),
                ],
            )
        }
        RequestKind::SelfReflect => {
            let before = need(&data.sources, 0, name, "the rule before the edit")?;
            let after = need(&data.sources, 1, name, "the rule after the edit")?;
            let improved = data.improved.ok_or(RenderError {
                kind: name,
                what: "the improved/regressed outcome",
            })?;
            let template = if improved {
                &bundle.self_reflect_improved
            } else {
                &bundle.self_reflect_regressed
            };
            fill(
                template,
                &[
                    ("before_source", before.source.as_str()),
                    ("before_fitness", fitness_text(before.fitness).as_str()),
                    ("after_source", after.source.as_str()),
                    ("after_fitness", fitness_text(after.fitness).as_str()),
                ],
            )
        }
        RequestKind::Collective => {
            let history = data.reflection.as_deref().ok_or(RenderError {
                kind: name,
                what: "reflection history",
            })?;
            fill(&bundle.collective, &[("history", history)])
        }
        RequestKind::Crossover => {
            let better = need(&data.sources, 0, name, "the better parent")?;
            let worse = need(&data.sources, 1, name, "the worse parent")?;
            let reflection = data.reflection.as_deref().unwrap_or("(none)");
            fill(
                &bundle.crossover,
                &[
                    ("better_source", better.source.as_str()),
                    ("better_fitness", fitness_text(better.fitness).as_str()),
                    ("worse_source", worse.source.as_str()),
                    ("worse_fitness", fitness_text(worse.fitness).as_str()),
                    ("reflection", reflection),
                ],
            )
        }
        RequestKind::Mutate => {
            let elite = need(&data.sources, 0, name, "the elite rule")?;
            let memory = data.memory.as_deref().ok_or(RenderError {
                kind: name,
                what: "collective memory",
            })?;
            fill(
                &bundle.mutate,
                &[
                    ("elite_source", elite.source.as_str()),
                    ("elite_fitness", fitness_text(elite.fitness).as_str()),
                    ("memory", memory),
                ],
            )
        }
    };

    let user = if kind.expects_rule() {
        format!(
            "{}\n\n{}",
            body.trim_end(),
            bundle.generation_instructions.trim_end()
        )
    } else {
        body.trim_end().to_string()
    };

    Ok(vec![
        Message::system(bundle.task_specification.trim_end()),
        Message::user(user),
    ])
}
