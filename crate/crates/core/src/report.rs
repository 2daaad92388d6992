//! Baseline sweeps and gap-ratio reports.

use alloc::string::String;
use alloc::vec::Vec;

use crate::instance::{Instance, Time};
use crate::rule::RuleProgram;
use crate::seed::{derive_seed, stream};
use crate::sim::simulate;

/// Results of simulating a set of methods over a set of cases.
///
/// `makespans[case][method]` is `None` when that simulation failed (the rule
/// went non-finite on some candidate); failed cells are excluded from the
/// per-case best and from the method means.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BenchReport {
    pub case_names: Vec<String>,
    pub method_names: Vec<String>,
    pub makespans: Vec<Vec<Option<Time>>>,
    pub best_per_case: Vec<Option<Time>>,
    /// `(makespan - best) / best`, per case and method.
    pub gaps: Vec<Vec<Option<f64>>>,
    pub mean_makespan_per_method: Vec<Option<f64>>,
    pub mean_gap_per_method: Vec<Option<f64>>,
}

impl BenchReport {
    /// Assembles a report from raw makespans, computing bests, gaps, and
    /// per-method means.
    pub fn from_makespans(
        case_names: Vec<String>,
        method_names: Vec<String>,
        makespans: Vec<Vec<Option<Time>>>,
    ) -> BenchReport {
        let best_per_case: Vec<Option<Time>> = makespans
            .iter()
            .map(|row| row.iter().flatten().min().copied())
            .collect();
        let gaps: Vec<Vec<Option<f64>>> = makespans
            .iter()
            .zip(&best_per_case)
            .map(|(row, best)| {
                row.iter()
                    .map(|cell| match (cell, best) {
                        (Some(makespan), Some(best)) => {
                            Some((makespan - best) as f64 / *best as f64)
                        }
                        _ => None,
                    })
                    .collect()
            })
            .collect();

        let method_count = method_names.len();
        let column_mean = |values: &dyn Fn(usize, usize) -> Option<f64>, method: usize| {
            let mut sum = 0.0;
            let mut count = 0usize;
            for case in 0..makespans.len() {
                if let Some(v) = values(case, method) {
                    sum += v;
                    count += 1;
                }
            }
            (count > 0).then(|| sum / count as f64)
        };
        let mean_makespan_per_method: Vec<Option<f64>> = (0..method_count)
            .map(|m| column_mean(&|case, m| makespans[case][m].map(|v| v as f64), m))
            .collect();
        let mean_gap_per_method: Vec<Option<f64>> = (0..method_count)
            .map(|m| column_mean(&|case, m| gaps[case][m], m))
            .collect();

        BenchReport {
            case_names,
            method_names,
            makespans,
            best_per_case,
            gaps,
            mean_makespan_per_method,
            mean_gap_per_method,
        }
    }

    /// Index of a method by name.
    pub fn method_index(&self, name: &str) -> Option<usize> {
        self.method_names.iter().position(|n| n == name)
    }

    /// True when any cell failed to simulate.
    pub fn has_failed_cells(&self) -> bool {
        self.makespans
            .iter()
            .any(|row| row.iter().any(Option::is_none))
    }
}

/// Deterministic seed for one `(case, method)` simulation of a sweep.
pub fn cell_seed(sweep_seed: u64, case_index: usize, method_count: usize, method_index: usize) -> u64 {
    derive_seed(
        sweep_seed,
        stream::BENCH,
        (case_index * method_count + method_index) as u64,
    )
}

/// Simulates every `(case, method)` cell and assembles the report.
pub fn run_baselines(
    instances: &[Instance],
    methods: &[(String, RuleProgram)],
    sweep_seed: u64,
) -> BenchReport {
    let makespans: Vec<Vec<Option<Time>>> = instances
        .iter()
        .enumerate()
        .map(|(case_index, inst)| {
            methods
                .iter()
                .enumerate()
                .map(|(method_index, (_, rule))| {
                    let seed = cell_seed(sweep_seed, case_index, methods.len(), method_index);
                    simulate(inst, rule, seed).ok().map(|s| s.makespan)
                })
                .collect()
        })
        .collect();
    BenchReport::from_makespans(
        instances.iter().map(|i| i.name.clone()).collect(),
        methods.iter().map(|(name, _)| name.clone()).collect(),
        makespans,
    )
}
