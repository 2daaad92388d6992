//! Run configuration resolved from four layers: built-in defaults, then a
//! key-value config file, then environment variables, then command-line
//! flags. The resolved snapshot is written into every run directory.

use std::env;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use shopevo_core::evolve::EvolutionConfig;

/// Which text-generation backend a run talks to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProviderKind {
    /// Seeded local mutator; no network, fully reproducible.
    Offline,
    /// Replays responses recorded in a transcript file.
    Replay,
    /// Live chat-completion HTTP endpoint.
    Live,
}

impl fmt::Display for ProviderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProviderKind::Offline => "offline",
            ProviderKind::Replay => "replay",
            ProviderKind::Live => "live",
        })
    }
}

impl FromStr for ProviderKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "offline" => Ok(ProviderKind::Offline),
            "replay" => Ok(ProviderKind::Replay),
            "live" => Ok(ProviderKind::Live),
            other => Err(format!(
                "unknown provider `{other}`; expected offline, replay, or live"
            )),
        }
    }
}

/// Fully resolved settings for one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub provider: ProviderKind,
    /// Transcript file to replay when `provider` is `replay`.
    pub transcript: Option<String>,
    /// Chat-completion endpoint base, e.g. `https://host/v1`.
    pub base_url: String,
    pub model: String,
    /// Name of the environment variable holding the API key.
    pub api_key_env: String,
    /// Root seed; every random stream in the run derives from it.
    pub seed: u64,
    pub population_size: usize,
    pub max_function_evaluations: u32,
    pub training_case_count: usize,
    pub mutation_probability: f64,
    pub crossover_probability: f64,
    pub elite_count: usize,
    pub self_evolution_enabled: bool,
    pub temperature: f64,
    /// Upper bound on worker threads for parallel simulation sweeps.
    pub jobs: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let evo = EvolutionConfig::default();
        RunConfig {
            provider: ProviderKind::Offline,
            transcript: None,
            base_url: String::new(),
            model: String::new(),
            api_key_env: "LLM_API_KEY".into(),
            seed: evo.seed,
            population_size: evo.population_size,
            max_function_evaluations: evo.max_function_evaluations,
            training_case_count: evo.training_case_count,
            mutation_probability: evo.mutation_probability,
            crossover_probability: evo.crossover_probability,
            elite_count: evo.elite_count,
            self_evolution_enabled: evo.self_evolution_enabled,
            temperature: evo.temperature,
            jobs: None,
        }
    }
}

/// One layer of optional overrides; unset fields leave the layer below
/// untouched.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigOverlay {
    pub provider: Option<ProviderKind>,
    pub transcript: Option<String>,
    pub base_url: Option<String>,
    pub model: Option<String>,
    pub api_key_env: Option<String>,
    pub seed: Option<u64>,
    pub population_size: Option<usize>,
    pub max_function_evaluations: Option<u32>,
    pub training_case_count: Option<usize>,
    pub mutation_probability: Option<f64>,
    pub crossover_probability: Option<f64>,
    pub elite_count: Option<usize>,
    pub self_evolution_enabled: Option<bool>,
    pub temperature: Option<f64>,
    pub jobs: Option<usize>,
}

impl ConfigOverlay {
    /// Reads a config file: flat `key = value` pairs in TOML syntax, keys
    /// matching the [`RunConfig`] field names. Unknown keys are errors.
    pub fn from_file(path: &Path) -> Result<ConfigOverlay> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading config file {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config file {}", path.display()))
    }

    /// Overrides picked up from the environment: `LLM_BASE_URL` and
    /// `LLM_MODEL`. The API key itself is read lazily when the live
    /// provider is built, from the variable named by `api_key_env`.
    pub fn from_env() -> ConfigOverlay {
        ConfigOverlay {
            base_url: env::var("LLM_BASE_URL").ok(),
            model: env::var("LLM_MODEL").ok(),
            ..ConfigOverlay::default()
        }
    }
}

macro_rules! apply_fields {
    ($cfg:expr, $layer:expr, direct: [$($direct:ident),*], option: [$($opt:ident),*]) => {
        $(if let Some(v) = $layer.$direct { $cfg.$direct = v; })*
        $(if $layer.$opt.is_some() { $cfg.$opt = $layer.$opt; })*
    };
}

impl RunConfig {
    /// Applies one overlay on top of this config.
    pub fn apply(&mut self, layer: ConfigOverlay) {
        apply_fields!(
            self,
            layer,
            direct: [
                provider, base_url, model, api_key_env, seed, population_size,
                max_function_evaluations, training_case_count,
                mutation_probability, crossover_probability, elite_count,
                self_evolution_enabled, temperature
            ],
            option: [transcript, jobs]
        );
    }

    /// Resolves the final config: defaults, then the config file (when
    /// given), then the environment, then command-line flags.
    pub fn resolve(file: Option<&Path>, flags: ConfigOverlay) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        if let Some(path) = file {
            cfg.apply(ConfigOverlay::from_file(path)?);
        }
        cfg.apply(ConfigOverlay::from_env());
        cfg.apply(flags);
        Ok(cfg)
    }

    /// The engine-facing slice of the config.
    pub fn evolution(&self) -> EvolutionConfig {
        EvolutionConfig {
            population_size: self.population_size,
            max_function_evaluations: self.max_function_evaluations,
            mutation_probability: self.mutation_probability,
            crossover_probability: self.crossover_probability,
            training_case_count: self.training_case_count,
            elite_count: self.elite_count,
            self_evolution_enabled: self.self_evolution_enabled,
            seed: self.seed,
            temperature: self.temperature,
        }
    }
}
