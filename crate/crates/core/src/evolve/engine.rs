//! The run loop: initialization, the three-stage iteration, and one-shot
//! application of trained artifacts to new cases.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cases::CaseSource;
use crate::instance::Instance;
use crate::llm::{
    complete_with_retries, render_prompt, CompletionRequest, PromptBundle, Provider,
    RequestContext, RequestKind, SourceInfo, StageData,
};
use crate::rule::RuleProgram;
use crate::seed::{derive_seed, stream};
use crate::sim::simulate;

use super::types::{
    Individual, IndividualSnapshot, IterationLog, Lineage, Origin, ReflectionKind,
    ReflectionRecord, RuleSlot, RunArtifacts,
};
use super::{ConfigError, EvolutionConfig, EvolveError};

/// Guidance used before any reflection has been synthesized, and as the
/// collective result for an iteration whose reflections all came back empty.
pub const DEFAULT_COLLECTIVE_GUIDANCE: &str = "Prefer rules that dispatch short operations \
quickly, keep a remaining-work term for look-ahead, bound every ingredient so no single \
term dominates, and keep any random component tiny relative to the heuristic core.";

/// Offsets the derived seed streams of one-shot application so they never
/// collide with the streams a training run used.
const APPLY_STREAM: u64 = 1 << 32;

/// Fewer than two individuals hold a finite fitness, so no pair can be drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("fewer than two valid individuals available for pairing")]
pub struct SelectionFailed;

/// Fill in the fitness of every not-yet-evaluated individual.
///
/// Fitness is the mean makespan over `cases`; the per-case simulation seed
/// is derived from `seed` and the case position, identically for every
/// individual, so rules are compared under the same random draws. Invalid
/// rules and rules whose evaluation hits a non-finite score keep `None`.
/// Individuals that already carry a fitness keep it unchanged, which is what
/// lets elitism guarantee a non-increasing best fitness while training cases
/// rotate.
pub fn evaluate_population(pop: &mut [Individual], cases: &[Instance], seed: u64) {
    for individual in pop.iter_mut() {
        if individual.fitness.is_some() {
            continue;
        }
        let fitness = match &individual.rule {
            RuleSlot::Valid(program) => mean_makespan(program, cases, seed),
            RuleSlot::Invalid { .. } => None,
        };
        individual.fitness = fitness;
    }
}

fn mean_makespan(program: &RuleProgram, cases: &[Instance], seed: u64) -> Option<f64> {
    if cases.is_empty() {
        return None;
    }
    let mut total = 0.0;
    for (case_index, case) in cases.iter().enumerate() {
        let sim_seed = derive_seed(seed, stream::EVALUATION, case_index as u64);
        match simulate(case, program, sim_seed) {
            Ok(schedule) => total += schedule.makespan as f64,
            Err(_) => return None,
        }
    }
    Some(total / cases.len() as f64)
}

fn rank(a: &Individual, b: &Individual) -> core::cmp::Ordering {
    a.fitness_key()
        .partial_cmp(&b.fitness_key())
        .unwrap_or(core::cmp::Ordering::Equal)
        .then(a.id.cmp(&b.id))
}

/// Draw `pair_count` parent pairs uniformly from the individuals with
/// finite fitness.
///
/// Members are distinct within a pair and ordered (better, worse); equal
/// fitness breaks toward the lower id. The same individual may appear in
/// several pairs.
pub fn select_pairs(
    pop: &[Individual],
    rng: &mut ChaCha8Rng,
    pair_count: usize,
) -> Result<Vec<(usize, usize)>, SelectionFailed> {
    if pair_count == 0 {
        return Ok(Vec::new());
    }
    let valid: Vec<usize> = pop
        .iter()
        .enumerate()
        .filter(|(_, individual)| individual.fitness.is_some())
        .map(|(index, _)| index)
        .collect();
    if valid.len() < 2 {
        return Err(SelectionFailed);
    }
    let mut pairs = Vec::with_capacity(pair_count);
    for _ in 0..pair_count {
        let first = *valid.choose(rng).expect("valid set is nonempty");
        let second = loop {
            let candidate = *valid.choose(rng).expect("valid set is nonempty");
            if candidate != first {
                break candidate;
            }
        };
        let ordered = if (pop[first].fitness_key(), pop[first].id)
            <= (pop[second].fitness_key(), pop[second].id)
        {
            (first, second)
        } else {
            (second, first)
        };
        pairs.push(ordered);
    }
    Ok(pairs)
}

/// A run that stopped early, with everything recorded up to the stop.
#[derive(Debug)]
pub struct RunFailure {
    pub error: EvolveError,
    pub transcript: Vec<crate::llm::ChatExchange>,
    pub reflections: Vec<ReflectionRecord>,
    pub iterations: Vec<IterationLog>,
}

impl core::fmt::Display for RunFailure {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}", self.error)
    }
}

impl core::error::Error for RunFailure {}

/// The result of applying trained artifacts to a fresh case set.
#[derive(Debug, Clone, PartialEq)]
pub struct ApplyOutcome {
    pub best: IndividualSnapshot,
    pub iteration: IterationLog,
    pub transcript: Vec<crate::llm::ChatExchange>,
    pub reflections: Vec<ReflectionRecord>,
}

/// Parent data kept alongside each offspring for the self-evolution stage.
struct ParentInfo {
    id: u64,
    source: String,
    fitness: Option<f64>,
}

impl ParentInfo {
    fn fitness_key(&self) -> f64 {
        self.fitness.unwrap_or(f64::INFINITY)
    }
}

struct Engine<'a> {
    cfg: EvolutionConfig,
    provider: &'a mut dyn Provider,
    bundle: PromptBundle,
    /// Consumed by pair selection and sub-unity crossover coins. Mutation
    /// coins come from a per-iteration stream instead, so runs that diverge
    /// in population content still draw the same mutation counts.
    rng: ChaCha8Rng,
    cases: Vec<Instance>,
    transcript: Vec<crate::llm::ChatExchange>,
    reflections: Vec<ReflectionRecord>,
    memory: Vec<String>,
    iterations: Vec<IterationLog>,
    next_id: u64,
    iteration: u32,
    generation_requests: u32,
}

const MEMORY_CAP: usize = 10;

impl<'a> Engine<'a> {
    fn new(cfg: &EvolutionConfig, provider: &'a mut dyn Provider, rng_index: u64) -> Self {
        Engine {
            cfg: cfg.clone(),
            provider,
            bundle: PromptBundle::default(),
            rng: ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, stream::ENGINE, rng_index)),
            cases: Vec::new(),
            transcript: Vec::new(),
            reflections: Vec::new(),
            memory: vec![DEFAULT_COLLECTIVE_GUIDANCE.to_string()],
            iterations: Vec::new(),
            next_id: 0,
            iteration: 0,
            generation_requests: 0,
        }
    }

    fn fresh_id(&mut self) -> u64 {
        let id = self.next_id;
        self.next_id += 1;
        id
    }

    fn case_summary(&self) -> String {
        format!("{} training cases", self.cases.len())
    }

    /// Issue one provider request with retries, recording the exchange.
    /// Returns the user prompt and the (possibly empty, degraded) response.
    fn request(
        &mut self,
        kind: RequestKind,
        data: &StageData,
        context: RequestContext,
    ) -> Result<(String, String), EvolveError> {
        let messages = render_prompt(kind, &self.bundle, data)
            .expect("engine supplies every required stage input");
        let prompt = messages.last().map(|m| m.content.clone()).unwrap_or_default();
        let request = CompletionRequest {
            kind,
            messages: messages.clone(),
            temperature: self.cfg.temperature,
            context,
        };
        if kind.expects_rule() {
            self.generation_requests += 1;
        }
        #[cfg(feature = "std")]
        let started = std::time::Instant::now();
        #[cfg(feature = "std")]
        let elapsed_ms = |started: std::time::Instant| started.elapsed().as_millis() as u64;
        #[cfg(not(feature = "std"))]
        let started = ();
        #[cfg(not(feature = "std"))]
        let elapsed_ms = |_: ()| 0u64;
        match complete_with_retries(self.provider, &request) {
            Ok(outcome) => {
                self.transcript.push(crate::llm::ChatExchange {
                    kind,
                    model: self.provider.name().to_string(),
                    temperature: self.cfg.temperature,
                    messages,
                    response: outcome.response.clone(),
                    latency_ms: elapsed_ms(started),
                    attempts: outcome.attempts,
                    error: outcome.error,
                });
                Ok((prompt, outcome.response))
            }
            Err(err) => {
                self.transcript.push(crate::llm::ChatExchange {
                    kind,
                    model: self.provider.name().to_string(),
                    temperature: self.cfg.temperature,
                    messages,
                    response: String::new(),
                    latency_ms: elapsed_ms(started),
                    attempts: 1,
                    error: Some(err.to_string()),
                });
                Err(EvolveError::Provider(err))
            }
        }
    }

    /// Like [`Engine::request`], also storing a [`ReflectionRecord`].
    fn reflect(
        &mut self,
        kind: RequestKind,
        reflection_kind: ReflectionKind,
        subjects: Vec<u64>,
        data: &StageData,
        context: RequestContext,
    ) -> Result<String, EvolveError> {
        let (prompt, response) = self.request(kind, data, context)?;
        self.reflections.push(ReflectionRecord {
            iteration: self.iteration,
            kind: reflection_kind,
            subjects,
            prompt,
            response: response.clone(),
        });
        Ok(response)
    }

    fn spawn(&mut self, response: &str, origin: Origin, parents: Vec<u64>) -> Individual {
        Individual {
            id: self.fresh_id(),
            rule: RuleSlot::from_response(response),
            fitness: None,
            birth: self.iteration,
            lineage: Lineage { origin, parents },
        }
    }

    fn evaluate(&self, pop: &mut [Individual], epoch: u64) {
        let seed = derive_seed(self.cfg.seed, stream::EVALUATION, epoch);
        evaluate_population(pop, &self.cases, seed);
    }

    /// The best `elite_count` individuals with finite fitness, cloned.
    fn elites(&self, pop: &[Individual]) -> Result<Vec<Individual>, EvolveError> {
        let mut sorted: Vec<&Individual> =
            pop.iter().filter(|ind| ind.fitness.is_some()).collect();
        if sorted.is_empty() {
            return Err(EvolveError::AllIndividualsInvalid);
        }
        sorted.sort_by(|a, b| rank(a, b));
        Ok(sorted
            .into_iter()
            .take(self.cfg.elite_count)
            .cloned()
            .collect())
    }

    fn best(&self, pop: &[Individual]) -> Result<Individual, EvolveError> {
        Ok(self.elites(pop)?.remove(0))
    }

    fn snapshots(pop: &[Individual]) -> Vec<IndividualSnapshot> {
        pop.iter().map(Individual::snapshot).collect()
    }

    fn source_info(individual: &Individual) -> SourceInfo {
        SourceInfo::new(individual.rule.source(), individual.fitness)
    }

    /// One full iteration: crossover, optional self-evolution, collective
    /// reflection, elite mutation, truncation, and case rotation. Returns
    /// the next population.
    fn iterate(
        &mut self,
        pop: Vec<Individual>,
        epoch: u64,
        coin_seed: u64,
        case_source: Option<&mut dyn CaseSource>,
    ) -> Result<Vec<Individual>, EvolveError> {
        self.generation_requests = 0;

        let pair_count = self.cfg.population_size / 2;
        let pairs =
            select_pairs(&pop, &mut self.rng, pair_count).map_err(|_| EvolveError::Selection)?;

        let mut coin_rng = ChaCha8Rng::seed_from_u64(coin_seed);
        let mutation_coins = (0..self.cfg.population_size)
            .filter(|_| coin_rng.random_bool(self.cfg.mutation_probability))
            .count();

        let mut offspring: Vec<Individual> = Vec::new();
        let mut parent_infos: Vec<ParentInfo> = Vec::new();
        for &(better_index, worse_index) in &pairs {
            if self.cfg.crossover_probability < 1.0
                && !self.rng.random_bool(self.cfg.crossover_probability)
            {
                continue;
            }
            let better = &pop[better_index];
            let worse = &pop[worse_index];
            let data = StageData {
                sources: vec![Self::source_info(better), Self::source_info(worse)],
                case_summary: self.case_summary(),
                ..StageData::default()
            };
            let context = RequestContext {
                sources: vec![
                    better.rule.source().to_string(),
                    worse.rule.source().to_string(),
                ],
                improved: None,
            };
            let subjects = vec![better.id, worse.id];
            let parent_info = ParentInfo {
                id: better.id,
                source: better.rule.source().to_string(),
                fitness: better.fitness,
            };
            let note = self.reflect(
                RequestKind::CoReflect,
                ReflectionKind::CoEvolution,
                subjects.clone(),
                &data,
                context.clone(),
            )?;
            let mut crossover_data = data;
            crossover_data.reflection = (!note.is_empty()).then_some(note);
            let (_, response) = self.request(RequestKind::Crossover, &crossover_data, context)?;
            let child = self.spawn(&response, Origin::Crossover, subjects);
            parent_infos.push(parent_info);
            offspring.push(child);
        }
        self.evaluate(&mut offspring, epoch);
        let offspring_count = offspring.len();
        let mut inter = offspring;
        inter.extend(self.elites(&pop)?);
        let after_crossover = Self::snapshots(&inter);

        let (mut population, after_self_evolution) = if self.cfg.self_evolution_enabled {
            let mut refined: Vec<Individual> = Vec::new();
            for index in 0..offspring_count {
                let child = &inter[index];
                let parent = &parent_infos[index];
                let improved = child.fitness_key() < parent.fitness_key();
                let reflect_data = StageData {
                    sources: vec![
                        SourceInfo::new(parent.source.clone(), parent.fitness),
                        Self::source_info(child),
                    ],
                    improved: Some(improved),
                    case_summary: self.case_summary(),
                    ..StageData::default()
                };
                let reflect_context = RequestContext {
                    sources: vec![parent.source.clone(), child.rule.source().to_string()],
                    improved: Some(improved),
                };
                let child_id = child.id;
                let parent_id = parent.id;
                let note = self.reflect(
                    RequestKind::SelfReflect,
                    ReflectionKind::SelfEvolution,
                    vec![parent_id, child_id],
                    &reflect_data,
                    reflect_context,
                )?;
                let child = &inter[index];
                let parent = &parent_infos[index];
                let (first, second) = if (child.fitness_key(), child.id)
                    <= (parent.fitness_key(), parent.id)
                {
                    (Self::source_info(child), SourceInfo::new(parent.source.clone(), parent.fitness))
                } else {
                    (SourceInfo::new(parent.source.clone(), parent.fitness), Self::source_info(child))
                };
                let cross_context = RequestContext {
                    sources: vec![first.source.clone(), second.source.clone()],
                    improved: None,
                };
                let cross_data = StageData {
                    sources: vec![first, second],
                    reflection: (!note.is_empty()).then_some(note),
                    case_summary: self.case_summary(),
                    ..StageData::default()
                };
                let (_, response) =
                    self.request(RequestKind::Crossover, &cross_data, cross_context)?;
                refined.push(self.spawn(&response, Origin::SelfCrossover, vec![child_id, parent_id]));
            }
            self.evaluate(&mut refined, epoch);
            let mut population = refined;
            population.extend(self.elites(&inter)?);
            let snapshot = Self::snapshots(&population);
            (population, Some(snapshot))
        } else {
            (inter, None)
        };

        self.collective_reflect()?;

        let elite = self.best(&population)?;
        let memory_text = self.memory.join("\n\n");
        let mut mutants: Vec<Individual> = Vec::new();
        for _ in 0..mutation_coins {
            let data = StageData {
                sources: vec![Self::source_info(&elite)],
                memory: Some(memory_text.clone()),
                case_summary: self.case_summary(),
                ..StageData::default()
            };
            let context = RequestContext {
                sources: vec![elite.rule.source().to_string()],
                improved: None,
            };
            let (_, response) = self.request(RequestKind::Mutate, &data, context)?;
            mutants.push(self.spawn(&response, Origin::Mutation, vec![elite.id]));
        }
        self.evaluate(&mut mutants, epoch);
        population.extend(mutants);
        population.sort_by(rank);
        population.truncate(self.cfg.population_size);
        let after_mutation = Self::snapshots(&population);

        let best = self.best(&population)?;
        let case_rotation = match case_source {
            Some(source) => {
                let removed = self.cases.remove(0);
                self.cases.push(source.replacement());
                removed.name
            }
            None => String::new(),
        };

        self.iterations.push(IterationLog {
            iteration: self.iteration,
            after_crossover,
            after_self_evolution,
            after_mutation,
            best_fitness: best.fitness.expect("the best individual has finite fitness"),
            best_source: best.rule.source().to_string(),
            case_rotation,
            generation_requests: self.generation_requests,
        });
        Ok(population)
    }

    /// Condense this iteration's reflections into the collective memory.
    ///
    /// An iteration without usable reflection text gets the predefined
    /// guidance without a provider call; a degraded provider call leaves
    /// the memory unchanged.
    fn collective_reflect(&mut self) -> Result<(), EvolveError> {
        let iteration = self.iteration;
        let notes: Vec<String> = self
            .reflections
            .iter()
            .filter(|record| {
                record.iteration == iteration
                    && record.kind != ReflectionKind::Collective
                    && !record.response.is_empty()
            })
            .map(|record| format!("- {}", record.response))
            .collect();
        if notes.is_empty() {
            self.reflections.push(ReflectionRecord {
                iteration,
                kind: ReflectionKind::Collective,
                subjects: Vec::new(),
                prompt: String::new(),
                response: DEFAULT_COLLECTIVE_GUIDANCE.to_string(),
            });
            return Ok(());
        }
        let data = StageData {
            reflection: Some(notes.join("\n")),
            case_summary: self.case_summary(),
            ..StageData::default()
        };
        let synthesis = self.reflect(
            RequestKind::Collective,
            ReflectionKind::Collective,
            Vec::new(),
            &data,
            RequestContext::default(),
        )?;
        if !synthesis.is_empty() {
            self.memory.push(synthesis);
            if self.memory.len() > MEMORY_CAP {
                let excess = self.memory.len() - MEMORY_CAP;
                self.memory.drain(..excess);
            }
        }
        Ok(())
    }

    fn into_failure(self, error: EvolveError) -> RunFailure {
        RunFailure {
            error,
            transcript: self.transcript,
            reflections: self.reflections,
            iterations: self.iterations,
        }
    }
}

/// Run the full evolutionary loop.
///
/// The population starts from `seeds` (included verbatim) plus
/// provider-generated rules, then iterates `max_function_evaluations` times,
/// rotating out the oldest training case after each iteration. Returns the
/// best individual and the complete run record. Fatal provider errors,
/// an all-invalid population, and failed pair selection abort with the
/// partial record.
pub fn run_seevo(
    cfg: &EvolutionConfig,
    provider: &mut dyn Provider,
    case_source: &mut dyn CaseSource,
    seeds: &[RuleProgram],
) -> Result<(Individual, RunArtifacts), RunFailure> {
    let mut engine = Engine::new(cfg, provider, 0);
    match run_inner(&mut engine, case_source, seeds) {
        Ok(result) => Ok(result),
        Err(error) => Err(engine.into_failure(error)),
    }
}

fn run_inner(
    engine: &mut Engine,
    case_source: &mut dyn CaseSource,
    seeds: &[RuleProgram],
) -> Result<(Individual, RunArtifacts), EvolveError> {
    engine.cfg.validate()?;
    if seeds.is_empty() {
        return Err(EvolveError::NoSeeds);
    }
    engine.cases = case_source.initial(engine.cfg.training_case_count);
    if engine.cases.is_empty() {
        return Err(EvolveError::Config(ConfigError::TrainingCaseCount));
    }
    let case_names: Vec<String> = engine.cases.iter().map(|case| case.name.clone()).collect();
    let seed_sources: Vec<String> = seeds.iter().map(|seed| seed.source.clone()).collect();

    let mut pop: Vec<Individual> = Vec::new();
    for seed_rule in seeds.iter().take(engine.cfg.population_size) {
        let id = engine.fresh_id();
        pop.push(Individual {
            id,
            rule: RuleSlot::Valid(seed_rule.clone()),
            fitness: None,
            birth: 0,
            lineage: Lineage::root(Origin::Seed),
        });
    }
    let seed_infos: Vec<SourceInfo> = seeds
        .iter()
        .map(|seed| SourceInfo::new(seed.source.clone(), None))
        .collect();
    while pop.len() < engine.cfg.population_size {
        let data = StageData {
            sources: seed_infos.clone(),
            case_summary: engine.case_summary(),
            ..StageData::default()
        };
        let context = RequestContext {
            sources: seed_sources.clone(),
            improved: None,
        };
        let (_, response) = engine.request(RequestKind::Init, &data, context)?;
        let individual = engine.spawn(&response, Origin::Init, Vec::new());
        pop.push(individual);
    }
    engine.evaluate(&mut pop, 0);
    engine.elites(&pop)?;
    let initial_population = Engine::snapshots(&pop);

    for i in 0..engine.cfg.max_function_evaluations {
        engine.iteration = i;
        let coin_seed = derive_seed(engine.cfg.seed, stream::ENGINE, 1 + i as u64);
        pop = engine.iterate(pop, i as u64, coin_seed, Some(&mut *case_source))?;
    }

    let best = engine.best(&pop)?;
    let artifacts = RunArtifacts {
        config: engine.cfg.clone(),
        provider: engine.provider.name().to_string(),
        seed_sources,
        case_names,
        initial_population,
        iterations: core::mem::take(&mut engine.iterations),
        final_population: Engine::snapshots(&pop),
        transcript: core::mem::take(&mut engine.transcript),
        reflections: core::mem::take(&mut engine.reflections),
        collective_memory: engine.memory.clone(),
        best: best.snapshot(),
    };
    Ok((best, artifacts))
}

/// Run exactly one iteration on new cases, starting from a trained run's
/// final population and collective memory, and return the individual that
/// performs best on those cases.
pub fn apply_online(
    artifacts: &RunArtifacts,
    provider: &mut dyn Provider,
    cases: &[Instance],
) -> Result<ApplyOutcome, RunFailure> {
    let mut engine = Engine::new(&artifacts.config, provider, APPLY_STREAM);
    match apply_inner(&mut engine, artifacts, cases) {
        Ok(outcome) => Ok(outcome),
        Err(error) => Err(engine.into_failure(error)),
    }
}

fn apply_inner(
    engine: &mut Engine,
    artifacts: &RunArtifacts,
    cases: &[Instance],
) -> Result<ApplyOutcome, EvolveError> {
    engine.cfg.validate()?;
    if artifacts.final_population.is_empty() {
        return Err(EvolveError::EmptyArtifacts);
    }
    if cases.is_empty() {
        return Err(EvolveError::Config(ConfigError::TrainingCaseCount));
    }
    engine.cases = cases.to_vec();
    engine.memory = artifacts.collective_memory.clone();
    if engine.memory.is_empty() {
        engine.memory.push(DEFAULT_COLLECTIVE_GUIDANCE.to_string());
    }

    let mut pop: Vec<Individual> = artifacts
        .final_population
        .iter()
        .map(|snapshot| Individual {
            id: snapshot.id,
            rule: RuleSlot::from_response(&snapshot.source),
            fitness: None,
            birth: 0,
            lineage: Lineage {
                origin: snapshot.origin,
                parents: snapshot.parents.clone(),
            },
        })
        .collect();
    engine.next_id = pop.iter().map(|ind| ind.id + 1).max().unwrap_or(0);

    engine.evaluate(&mut pop, APPLY_STREAM);
    engine.elites(&pop)?;
    engine.iteration = 0;
    let coin_seed = derive_seed(engine.cfg.seed, stream::ENGINE, APPLY_STREAM + 1);
    pop = engine.iterate(pop, APPLY_STREAM, coin_seed, None)?;
    let best = engine.best(&pop)?;
    Ok(ApplyOutcome {
        best: best.snapshot(),
        iteration: engine
            .iterations
            .pop()
            .expect("one iteration was just logged"),
        transcript: core::mem::take(&mut engine.transcript),
        reflections: core::mem::take(&mut engine.reflections),
    })
}
