//! Generator for the classic Taillard job-shop benchmark instances.
//!
//! Reproduces the published two-seed procedure: a portable linear
//! congruential generator draws all durations from one seed, then shuffles
//! each job's machine order from the other, so the well-known instances can
//! be materialized from their seed pairs instead of shipping data files.

use alloc::string::String;
use alloc::vec::Vec;

use crate::instance::{Instance, Time};

const M: i64 = 2147483647;
const A: i64 = 16807;
const B: i64 = 127773;
const C: i64 = 2836;

/// Lehmer generator step returning a uniform value in `(0, 1)`.
fn next_unit(seed: &mut i64) -> f64 {
    let k = *seed / B;
    *seed = A * (*seed % B) - k * C;
    if *seed < 0 {
        *seed += M;
    }
    *seed as f64 / M as f64
}

/// Uniform integer in `[low, high]`, consuming one generator step.
fn unif(seed: &mut i64, low: i64, high: i64) -> i64 {
    low + (next_unit(seed) * (high - low + 1) as f64) as i64
}

/// Seed pair identifying one benchmark instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TaillardSpec {
    pub name: &'static str,
    pub jobs: usize,
    pub machines: usize,
    pub time_seed: i64,
    pub machine_seed: i64,
}

/// The first 15x15 instance of the published benchmark suite.
pub const TA01: TaillardSpec = TaillardSpec {
    name: "TA01",
    jobs: 15,
    machines: 15,
    time_seed: 840612802,
    machine_seed: 398197754,
};

/// Materializes a benchmark instance from its seed pair.
///
/// Durations are drawn job-major in `[1, 99]` from `time_seed`; each job's
/// machine order starts as the identity and is shuffled with swaps driven by
/// `machine_seed`, exactly as in the published procedure. Machine indices in
/// the result are 0-based.
pub fn generate_taillard(spec: &TaillardSpec) -> Instance {
    generate_taillard_sized(
        spec.name.into(),
        spec.jobs,
        spec.machines,
        spec.time_seed,
        spec.machine_seed,
    )
}

pub fn generate_taillard_sized(
    name: String,
    jobs: usize,
    machines: usize,
    time_seed: i64,
    machine_seed: i64,
) -> Instance {
    let mut t_seed = time_seed;
    let mut durations: Vec<Vec<Time>> = Vec::with_capacity(jobs);
    for _ in 0..jobs {
        durations.push((0..machines).map(|_| unif(&mut t_seed, 1, 99) as Time).collect());
    }

    let mut m_seed = machine_seed;
    let mut routes: Vec<Vec<(usize, Time)>> = Vec::with_capacity(jobs);
    for job_durations in &durations {
        let mut order: Vec<usize> = (0..machines).collect();
        for j in 0..machines {
            let swap_with = unif(&mut m_seed, (j + 1) as i64, machines as i64) as usize - 1;
            order.swap(j, swap_with);
        }
        routes.push(
            order
                .into_iter()
                .zip(job_durations.iter().copied())
                .collect(),
        );
    }

    Instance::static_from_routes(name, machines, &routes).expect("generated routes are valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ta01_shape() {
        let inst = generate_taillard(&TA01);
        assert_eq!(inst.job_count(), 15);
        assert_eq!(inst.machine_count, 15);
        for route in &inst.jobs {
            let mut seen = alloc::vec![false; 15];
            for op in route {
                assert!((1..=99).contains(&op.processing_time));
                assert!(!seen[op.machine_id]);
                seen[op.machine_id] = true;
            }
        }
    }

    #[test]
    fn ta01_first_job_matches_published_data() {
        let inst = generate_taillard(&TA01);
        let first: Vec<(usize, Time)> = inst.jobs[0]
            .iter()
            .map(|op| (op.machine_id, op.processing_time))
            .collect();
        let expected = [
            (6, 94),
            (12, 66),
            (4, 10),
            (7, 53),
            (3, 26),
            (2, 15),
            (10, 65),
            (11, 82),
            (8, 10),
            (14, 27),
            (9, 93),
            (13, 92),
            (5, 96),
            (0, 70),
            (1, 83),
        ];
        assert_eq!(first, expected);
    }

    #[test]
    fn lcg_stays_in_range() {
        let mut seed = 123456789;
        for _ in 0..1000 {
            let v = unif(&mut seed, 1, 99);
            assert!((1..=99).contains(&v));
        }
    }
}
