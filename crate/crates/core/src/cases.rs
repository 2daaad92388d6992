//! Seeded random instance generators and the training-case feed.

use alloc::format;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::instance::{Instance, Time};
use crate::seed::{derive_seed, stream};

/// Parameters for static instances: every job visits every machine once in a
/// random order, all jobs present at time 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StaticGenParams {
    pub job_count_range: (usize, usize),
    pub machine_count_range: (usize, usize),
    pub processing_time_range: (Time, Time),
    pub seed: u64,
}

impl Default for StaticGenParams {
    fn default() -> Self {
        StaticGenParams {
            job_count_range: (20, 100),
            machine_count_range: (10, 20),
            processing_time_range: (50, 100),
            seed: 0,
        }
    }
}

/// Parameters for dynamic instances: 2 or 3 job batches, the first on the
/// floor at time 0, later batches arriving inside fixed windows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DynamicGenParams {
    pub machine_count: usize,
    pub batch_count_range: (usize, usize),
    pub batch_size_range: (usize, usize),
    pub arrival_window_1: (Time, Time),
    pub arrival_window_2: (Time, Time),
    pub processing_time_range: (Time, Time),
    pub seed: u64,
}

impl Default for DynamicGenParams {
    fn default() -> Self {
        DynamicGenParams {
            machine_count: 10,
            batch_count_range: (2, 3),
            batch_size_range: (20, 50),
            arrival_window_1: (1, 500),
            arrival_window_2: (501, 1000),
            processing_time_range: (50, 100),
            seed: 0,
        }
    }
}

fn random_route(
    rng: &mut ChaCha8Rng,
    machine_count: usize,
    pt_range: (Time, Time),
) -> Vec<(usize, Time)> {
    let mut machines: Vec<usize> = (0..machine_count).collect();
    machines.shuffle(rng);
    machines
        .into_iter()
        .map(|m| (m, rng.random_range(pt_range.0..=pt_range.1)))
        .collect()
}

/// Generates one static instance, deterministic per `params.seed`.
pub fn generate_static_case(params: &StaticGenParams) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let jobs = rng.random_range(params.job_count_range.0..=params.job_count_range.1);
    let machines = rng.random_range(params.machine_count_range.0..=params.machine_count_range.1);
    let routes: Vec<Vec<(usize, Time)>> = (0..jobs)
        .map(|_| random_route(&mut rng, machines, params.processing_time_range))
        .collect();
    Instance::static_from_routes(format!("static-{}", params.seed), machines, &routes)
        .expect("generated routes are valid")
}

/// One generated batch: shared arrival time plus its job routes.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Batch {
    pub arrival: Time,
    pub routes: Vec<Vec<(usize, Time)>>,
}

/// A dynamic instance along with its batch structure, for sidecar export.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DynamicCase {
    pub instance: Instance,
    pub batches: Vec<Batch>,
}

/// Generates one dynamic instance with its batch breakdown, deterministic per
/// `params.seed`. Batch 1 arrives at 0; batch 2 inside `arrival_window_1`;
/// batch 3, when drawn, inside `arrival_window_2`.
pub fn generate_dynamic_case_detailed(params: &DynamicGenParams) -> DynamicCase {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let batch_count = rng.random_range(params.batch_count_range.0..=params.batch_count_range.1);
    let mut batches = Vec::with_capacity(batch_count);
    for index in 0..batch_count {
        let arrival = match index {
            0 => 0,
            1 => rng.random_range(params.arrival_window_1.0..=params.arrival_window_1.1),
            _ => rng.random_range(params.arrival_window_2.0..=params.arrival_window_2.1),
        };
        let size = rng.random_range(params.batch_size_range.0..=params.batch_size_range.1);
        let routes: Vec<Vec<(usize, Time)>> = (0..size)
            .map(|_| random_route(&mut rng, params.machine_count, params.processing_time_range))
            .collect();
        batches.push(Batch { arrival, routes });
    }

    let mut routes = Vec::new();
    let mut arrivals = Vec::new();
    for batch in &batches {
        for route in &batch.routes {
            routes.push(route.clone());
            arrivals.push(batch.arrival);
        }
    }
    let instance = Instance::from_routes(
        format!("dyn-{}", params.seed),
        params.machine_count,
        &routes,
        arrivals,
    )
    .expect("generated routes are valid");
    DynamicCase { instance, batches }
}

/// Generates one dynamic instance, deterministic per `params.seed`.
pub fn generate_dynamic_case(params: &DynamicGenParams) -> Instance {
    generate_dynamic_case_detailed(params).instance
}

/// Feeds training cases to the evolution engine: the initial set plus one
/// replacement per iteration.
pub trait CaseSource {
    fn initial(&mut self, count: usize) -> Vec<Instance>;
    fn replacement(&mut self) -> Instance;
}

/// Generates an endless stream of dynamic cases; case `i` is generated from
/// a seed derived from `(params.seed, i)`, so the stream is reproducible and
/// insensitive to how many cases were drawn before.
#[derive(Debug, Clone)]
pub struct GeneratedDynamicCases {
    params: DynamicGenParams,
    next_index: u64,
}

impl GeneratedDynamicCases {
    pub fn new(params: DynamicGenParams) -> Self {
        GeneratedDynamicCases {
            params,
            next_index: 0,
        }
    }

    fn next_case(&mut self) -> Instance {
        let mut params = self.params;
        params.seed = derive_seed(self.params.seed, stream::CASE_GEN, self.next_index);
        self.next_index += 1;
        let mut instance = generate_dynamic_case(&params);
        instance.name = format!("dyn-{}-{}", self.params.seed, self.next_index - 1);
        instance
    }
}

impl CaseSource for GeneratedDynamicCases {
    fn initial(&mut self, count: usize) -> Vec<Instance> {
        (0..count).map(|_| self.next_case()).collect()
    }

    fn replacement(&mut self) -> Instance {
        self.next_case()
    }
}

/// Static-case analogue of [`GeneratedDynamicCases`].
#[derive(Debug, Clone)]
pub struct GeneratedStaticCases {
    params: StaticGenParams,
    next_index: u64,
}

impl GeneratedStaticCases {
    pub fn new(params: StaticGenParams) -> Self {
        GeneratedStaticCases {
            params,
            next_index: 0,
        }
    }

    fn next_case(&mut self) -> Instance {
        let mut params = self.params;
        params.seed = derive_seed(self.params.seed, stream::CASE_GEN, self.next_index);
        self.next_index += 1;
        let mut instance = generate_static_case(&params);
        instance.name = format!("static-{}-{}", self.params.seed, self.next_index - 1);
        instance
    }
}

impl CaseSource for GeneratedStaticCases {
    fn initial(&mut self, count: usize) -> Vec<Instance> {
        (0..count).map(|_| self.next_case()).collect()
    }

    fn replacement(&mut self) -> Instance {
        self.next_case()
    }
}

/// Cycles through a fixed list; replacements repeat the list in order.
#[derive(Debug, Clone)]
pub struct FixedCases {
    cases: Vec<Instance>,
    cursor: usize,
}

impl FixedCases {
    pub fn new(cases: Vec<Instance>) -> Self {
        FixedCases { cases, cursor: 0 }
    }
}

impl CaseSource for FixedCases {
    fn initial(&mut self, count: usize) -> Vec<Instance> {
        (0..count.min(self.cases.len()))
            .map(|_| {
                let case = self.cases[self.cursor].clone();
                self.cursor = (self.cursor + 1) % self.cases.len();
                case
            })
            .collect()
    }

    fn replacement(&mut self) -> Instance {
        let case = self.cases[self.cursor].clone();
        self.cursor = (self.cursor + 1) % self.cases.len();
        case
    }
}
