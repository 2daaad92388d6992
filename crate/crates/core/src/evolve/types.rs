//! Individuals, lineage, and the records a run leaves behind.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::llm::{extract_rule, ChatExchange};
use crate::rule::{parse_rule, RuleProgram};

use super::EvolutionConfig;

/// Which operator produced an individual.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Origin {
    /// Supplied as a seed heuristic, included verbatim.
    Seed,
    /// Generated by the initialization prompt.
    Init,
    /// Offspring of two parents.
    Crossover,
    /// Refinement of an offspring guided by self-reflection.
    SelfCrossover,
    /// Variant of the elite.
    Mutation,
}

impl Origin {
    pub fn as_str(self) -> &'static str {
        match self {
            Origin::Seed => "seed",
            Origin::Init => "init",
            Origin::Crossover => "crossover",
            Origin::SelfCrossover => "self_crossover",
            Origin::Mutation => "mutation",
        }
    }
}

/// Where an individual came from: the operator and its parents' ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lineage {
    pub origin: Origin,
    pub parents: Vec<u64>,
}

impl Lineage {
    pub fn root(origin: Origin) -> Self {
        Lineage {
            origin,
            parents: Vec::new(),
        }
    }
}

/// A rule slot: either a parsed program or the rejected text with its
/// parse diagnostic. Invalid individuals stay in the population so logs
/// show what the provider produced, but they never win selection.
#[derive(Debug, Clone, PartialEq)]
pub enum RuleSlot {
    Valid(RuleProgram),
    Invalid { source_text: String, diagnostic: String },
}

impl RuleSlot {
    /// Extract a rule from a raw provider response and parse it.
    pub fn from_response(response: &str) -> RuleSlot {
        let source = extract_rule(response);
        match parse_rule(&source) {
            Ok(program) => RuleSlot::Valid(program),
            Err(err) => RuleSlot::Invalid {
                source_text: source,
                diagnostic: err.to_string(),
            },
        }
    }

    pub fn source(&self) -> &str {
        match self {
            RuleSlot::Valid(program) => &program.source,
            RuleSlot::Invalid { source_text, .. } => source_text,
        }
    }

    pub fn program(&self) -> Option<&RuleProgram> {
        match self {
            RuleSlot::Valid(program) => Some(program),
            RuleSlot::Invalid { .. } => None,
        }
    }

    pub fn is_valid(&self) -> bool {
        matches!(self, RuleSlot::Valid(_))
    }
}

/// One member of the population.
///
/// `fitness` is the mean makespan over the training cases in force when the
/// individual was evaluated; `None` marks an invalid rule or one whose
/// evaluation hit a non-finite score, and sorts as positive infinity.
#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub id: u64,
    pub rule: RuleSlot,
    pub fitness: Option<f64>,
    /// Iteration index when the individual was created; 0 for the initial
    /// population.
    pub birth: u32,
    pub lineage: Lineage,
}

impl Individual {
    /// Fitness for comparisons: invalid sorts last.
    pub fn fitness_key(&self) -> f64 {
        self.fitness.unwrap_or(f64::INFINITY)
    }

    pub fn snapshot(&self) -> IndividualSnapshot {
        IndividualSnapshot {
            id: self.id,
            source: self.rule.source().to_string(),
            fitness: self.fitness,
            origin: self.lineage.origin,
            parents: self.lineage.parents.clone(),
            valid: self.rule.is_valid(),
        }
    }
}

/// The serializable view of an individual used in logs and artifacts.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IndividualSnapshot {
    pub id: u64,
    pub source: String,
    pub fitness: Option<f64>,
    pub origin: Origin,
    pub parents: Vec<u64>,
    pub valid: bool,
}

/// Which reflection stage produced a record.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ReflectionKind {
    CoEvolution,
    SelfEvolution,
    Collective,
}

/// One reflection: the prompt shown to the provider and what came back.
/// An empty response marks a degraded call whose stage proceeded without
/// reflection text.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ReflectionRecord {
    pub iteration: u32,
    pub kind: ReflectionKind,
    /// Ids of the individuals the reflection talks about.
    pub subjects: Vec<u64>,
    pub prompt: String,
    pub response: String,
}

/// Everything one iteration of the loop did, in execution order.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IterationLog {
    pub iteration: u32,
    /// Population after crossover offspring were evaluated and the elite
    /// carried over.
    pub after_crossover: Vec<IndividualSnapshot>,
    /// Population after the self-evolution stage; `None` when the stage is
    /// disabled.
    pub after_self_evolution: Option<Vec<IndividualSnapshot>>,
    /// Final population of the iteration, truncated to the configured size.
    pub after_mutation: Vec<IndividualSnapshot>,
    pub best_fitness: f64,
    pub best_source: String,
    /// Name of the training case rotated out at the end of the iteration.
    pub case_rotation: String,
    /// Provider calls that asked for a rule expression this iteration.
    pub generation_requests: u32,
}

/// The full recorded output of a run, sufficient to replay it.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RunArtifacts {
    pub config: EvolutionConfig,
    pub provider: String,
    pub seed_sources: Vec<String>,
    /// Names of the initial training cases; iteration logs track rotation.
    pub case_names: Vec<String>,
    pub initial_population: Vec<IndividualSnapshot>,
    pub iterations: Vec<IterationLog>,
    pub final_population: Vec<IndividualSnapshot>,
    pub transcript: Vec<ChatExchange>,
    pub reflections: Vec<ReflectionRecord>,
    pub collective_memory: Vec<String>,
    pub best: IndividualSnapshot,
}
