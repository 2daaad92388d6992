//! The evolutionary loop that breeds dispatching rules.
//!
//! Each iteration runs three stages over the population. Crossover pairs up
//! individuals, asks the provider to compare each pair (co-evolution
//! reflection) and to merge them into an offspring. The self-evolution stage
//! compares each offspring against its better parent, asks what the change
//! did (self-evolution reflection), and requests a refined offspring.
//! Finally a collective reflection condenses the iteration's notes into
//! long-term memory and the mutation stage breeds variants of the elite
//! under its guidance. Elitism carries the best individual through every
//! stage, so the best fitness never regresses; one training case is rotated
//! out after each iteration so rules cannot overfit a frozen case set.

mod engine;
mod types;

pub use engine::{
    apply_online, evaluate_population, run_seevo, select_pairs, ApplyOutcome, RunFailure,
    SelectionFailed, DEFAULT_COLLECTIVE_GUIDANCE,
};
pub use types::{
    Individual, IndividualSnapshot, IterationLog, Lineage, Origin, ReflectionKind,
    ReflectionRecord, RuleSlot, RunArtifacts,
};

use crate::llm::ProviderError;

/// Knobs of the evolutionary loop.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EvolutionConfig {
    /// Target population size; also the slot count for mutation coin flips.
    pub population_size: usize,
    /// Number of loop iterations.
    pub max_function_evaluations: u32,
    /// Per-slot probability of breeding an elite variant each iteration.
    pub mutation_probability: f64,
    /// Per-pair probability of requesting a crossover offspring.
    pub crossover_probability: f64,
    /// Training cases held at any time.
    pub training_case_count: usize,
    /// Best individuals carried unchanged through each stage.
    pub elite_count: usize,
    /// When false, the self-evolution stage is skipped entirely.
    pub self_evolution_enabled: bool,
    /// Root seed for selection, mutation coins, and evaluation streams.
    pub seed: u64,
    /// Sampling temperature forwarded to the provider.
    pub temperature: f64,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        EvolutionConfig {
            population_size: 20,
            max_function_evaluations: 20,
            mutation_probability: 0.5,
            crossover_probability: 1.0,
            training_case_count: 20,
            elite_count: 1,
            self_evolution_enabled: true,
            seed: 0,
            temperature: 1.0,
        }
    }
}

/// A configuration field is out of range.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConfigError {
    #[error("population_size must be at least 1")]
    PopulationSize,
    #[error("training_case_count must be at least 1")]
    TrainingCaseCount,
    #[error("elite_count must be between 1 and population_size")]
    EliteCount,
    #[error("{name} must be a probability in [0, 1]")]
    Probability { name: &'static str },
    #[error("temperature must be finite and non-negative")]
    Temperature,
}

impl EvolutionConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.population_size < 1 {
            return Err(ConfigError::PopulationSize);
        }
        if self.training_case_count < 1 {
            return Err(ConfigError::TrainingCaseCount);
        }
        if self.elite_count < 1 || self.elite_count > self.population_size {
            return Err(ConfigError::EliteCount);
        }
        for (name, value) in [
            ("mutation_probability", self.mutation_probability),
            ("crossover_probability", self.crossover_probability),
        ] {
            if !(0.0..=1.0).contains(&value) {
                return Err(ConfigError::Probability { name });
            }
        }
        if !self.temperature.is_finite() || self.temperature < 0.0 {
            return Err(ConfigError::Temperature);
        }
        Ok(())
    }
}

/// Why a run stopped without producing a best individual.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvolveError {
    #[error("invalid configuration: {0}")]
    Config(#[from] ConfigError),
    #[error("no seed heuristics were provided")]
    NoSeeds,
    #[error("all individuals are invalid")]
    AllIndividualsInvalid,
    #[error("selection failed: fewer than two valid individuals")]
    Selection,
    #[error("provider failed: {0}")]
    Provider(#[from] ProviderError),
    #[error("run artifacts hold no population to apply")]
    EmptyArtifacts,
}
