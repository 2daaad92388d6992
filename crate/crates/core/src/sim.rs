//! Non-delay dispatching simulation.
//!
//! Time advances event by event (machine release or job becoming ready). At
//! each event every free machine scans its ready candidates in ascending job
//! order, scores them with the rule, and starts the highest-scoring one
//! immediately; ties keep the lowest job id. A machine therefore never idles
//! while it has a ready candidate.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::features::FeatureVector;
use crate::instance::{Instance, Operation, Time};
use crate::rule::{eval_rule, RuleEvalError, RuleProgram};
use crate::schedule::{Schedule, ScheduledOp};

/// Per-job lookup tables so feature computation is O(1) per candidate.
#[derive(Debug, Clone)]
struct JobTables {
    /// Total work per job.
    twk: Vec<Time>,
    /// `twkr[job][op]`: work of ops `op..` of the job.
    twkr: Vec<Vec<Time>>,
    /// `lso_after[job][op]`: max processing time among ops strictly after `op`.
    lso_after: Vec<Vec<Time>>,
}

impl JobTables {
    fn new(inst: &Instance) -> Self {
        let mut twk = Vec::with_capacity(inst.job_count());
        let mut twkr = Vec::with_capacity(inst.job_count());
        let mut lso_after = Vec::with_capacity(inst.job_count());
        for route in &inst.jobs {
            let mut suffix_sum = alloc::vec![0; route.len()];
            let mut suffix_max = alloc::vec![0; route.len()];
            let mut sum = 0;
            let mut max_after = 0;
            for (i, op) in route.iter().enumerate().rev() {
                suffix_max[i] = max_after;
                sum += op.processing_time;
                suffix_sum[i] = sum;
                max_after = max_after.max(op.processing_time);
            }
            twk.push(sum);
            twkr.push(suffix_sum);
            lso_after.push(suffix_max);
        }
        JobTables { twk, twkr, lso_after }
    }
}

/// Mutable simulation state: the clock, machine and job frontiers, the
/// partial schedule, and the run-owned random stream feeding `RAND`.
#[derive(Debug, Clone)]
pub struct SimState {
    pub now: Time,
    pub machine_free_at: Vec<Time>,
    pub job_next_op: Vec<usize>,
    pub job_ready_at: Vec<Time>,
    pub committed: Vec<ScheduledOp>,
    tables: JobTables,
    rng: ChaCha8Rng,
}

impl SimState {
    pub fn new(inst: &Instance, seed: u64) -> Self {
        SimState {
            now: 0,
            machine_free_at: alloc::vec![0; inst.machine_count],
            job_next_op: alloc::vec![0; inst.job_count()],
            job_ready_at: inst.arrival_times.clone(),
            committed: Vec::with_capacity(inst.total_ops()),
            tables: JobTables::new(inst),
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    fn commit(&mut self, op: &Operation) {
        let start = self.now;
        let end = start + op.processing_time;
        self.committed.push(ScheduledOp {
            job_id: op.job_id,
            op_index: op.op_index,
            machine_id: op.machine_id,
            start,
            end,
        });
        self.machine_free_at[op.machine_id] = end;
        self.job_ready_at[op.job_id] = end;
        self.job_next_op[op.job_id] += 1;
    }

    /// Starts operations until no free machine has a ready candidate, then
    /// reports whether anything was dispatched at all.
    fn dispatch_at_now(&mut self, inst: &Instance, rule: &RuleProgram) -> Result<(), RuleEvalError> {
        loop {
            let mut dispatched = false;
            for machine in 0..inst.machine_count {
                if self.machine_free_at[machine] > self.now {
                    continue;
                }
                let mut best: Option<(f64, Operation)> = None;
                for job in 0..inst.job_count() {
                    let next = self.job_next_op[job];
                    let Some(op) = inst.jobs[job].get(next) else {
                        continue;
                    };
                    if op.machine_id != machine || self.job_ready_at[job] > self.now {
                        continue;
                    }
                    let fv = compute_features(self, inst, op);
                    let score = eval_rule(rule, &fv)?;
                    if best.as_ref().is_none_or(|(top, _)| score > *top) {
                        best = Some((score, *op));
                    }
                }
                if let Some((_, op)) = best {
                    self.commit(&op);
                    dispatched = true;
                }
            }
            if !dispatched {
                return Ok(());
            }
        }
    }

    /// Moves the clock to the next machine release or job-ready event.
    fn advance(&mut self, inst: &Instance) {
        let mut next: Option<Time> = None;
        let mut consider = |t: Time| {
            if t > self.now && next.is_none_or(|n| t < n) {
                next = Some(t);
            }
        };
        for &t in &self.machine_free_at {
            consider(t);
        }
        for job in 0..inst.job_count() {
            if self.job_next_op[job] < inst.jobs[job].len() {
                consider(self.job_ready_at[job]);
            }
        }
        self.now = next.expect("pending work always has a future event");
    }
}

/// Observes one ready candidate. Consumes one `RAND` draw from the state's
/// stream, so call it once per candidate per decision point, in candidate
/// iteration order.
pub fn compute_features(state: &mut SimState, inst: &Instance, candidate: &Operation) -> FeatureVector {
    let job = candidate.job_id;
    let op = candidate.op_index;
    let route_len = inst.jobs[job].len();
    let twkr = state.tables.twkr[job][op];
    let sso = if op + 1 < route_len {
        inst.jobs[job][op + 1].processing_time
    } else {
        0
    };
    FeatureVector {
        pt: candidate.processing_time as f64,
        twk: state.tables.twk[job] as f64,
        twkr: twkr as f64,
        srm: (twkr - candidate.processing_time) as f64,
        nops_remaining: (route_len - op) as f64,
        sso: sso as f64,
        lso: state.tables.lso_after[job][op] as f64,
        arrival: inst.arrival_times[job] as f64,
        wait: state.now.saturating_sub(state.job_ready_at[job]) as f64,
        now: state.now as f64,
        rand: state.rng.random::<f64>(),
    }
}

/// Runs the rule over the whole instance and returns the resulting schedule.
///
/// Deterministic for a given `(inst, rule, seed)`. Fails only when the rule
/// produces a non-finite score for some candidate; the error carries that
/// candidate's feature vector.
pub fn simulate(inst: &Instance, rule: &RuleProgram, seed: u64) -> Result<Schedule, RuleEvalError> {
    let mut state = SimState::new(inst, seed);
    let total_ops = inst.total_ops();
    loop {
        state.dispatch_at_now(inst, rule)?;
        if state.committed.len() == total_ops {
            break;
        }
        state.advance(inst);
    }
    Ok(Schedule::from_entries(state.committed).expect("instances have at least one operation"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rule::{builtin, parse_rule};
    use crate::schedule::validate_schedule;

    fn two_by_two() -> Instance {
        Instance::static_from_routes(
            "2x2",
            2,
            &[alloc::vec![(0, 3), (1, 2)], alloc::vec![(1, 4), (0, 1)]],
        )
        .unwrap()
    }

    fn find(sched: &Schedule, job: usize, op: usize) -> ScheduledOp {
        *sched
            .entries
            .iter()
            .find(|e| e.job_id == job && e.op_index == op)
            .unwrap()
    }

    #[test]
    fn single_op_instance_any_rule() {
        let inst = Instance::static_from_routes("one", 1, &[alloc::vec![(0, 5)]]).unwrap();
        for (_, rule) in crate::rule::all_builtins() {
            let sched = simulate(&inst, &rule, 1).unwrap();
            assert_eq!(sched.makespan, 5);
        }
    }

    #[test]
    fn spt_on_two_by_two() {
        let inst = two_by_two();
        let sched = simulate(&inst, &builtin("SPT").unwrap(), 0).unwrap();
        assert_eq!(sched.makespan, 6);
        assert_eq!((find(&sched, 0, 0).start, find(&sched, 0, 0).end), (0, 3));
        assert_eq!((find(&sched, 1, 0).start, find(&sched, 1, 0).end), (0, 4));
        assert_eq!((find(&sched, 1, 1).start, find(&sched, 1, 1).end), (4, 5));
        assert_eq!((find(&sched, 0, 1).start, find(&sched, 0, 1).end), (4, 6));
        assert!(validate_schedule(&inst, &sched).is_empty());
    }

    #[test]
    fn arrival_delays_first_op() {
        let inst = Instance::from_routes(
            "late",
            2,
            &[alloc::vec![(0, 3), (1, 2)], alloc::vec![(1, 4), (0, 1)]],
            alloc::vec![0, 10],
        )
        .unwrap();
        let sched = simulate(&inst, &builtin("SPT").unwrap(), 0).unwrap();
        assert!(find(&sched, 1, 0).start >= 10);
        assert!(validate_schedule(&inst, &sched).is_empty());
    }

    #[test]
    fn spt_and_lpt_pick_opposite_candidates() {
        let inst = Instance::static_from_routes(
            "pick",
            1,
            &[alloc::vec![(0, 3)], alloc::vec![(0, 5)]],
        )
        .unwrap();
        let spt = simulate(&inst, &builtin("SPT").unwrap(), 0).unwrap();
        assert_eq!(spt.entries[0].job_id, 0);
        let lpt = simulate(&inst, &builtin("LPT").unwrap(), 0).unwrap();
        assert_eq!(lpt.entries[0].job_id, 1);
    }

    #[test]
    fn ties_go_to_lowest_job_id() {
        let inst = Instance::static_from_routes(
            "tie",
            1,
            &[alloc::vec![(0, 4)], alloc::vec![(0, 4)]],
        )
        .unwrap();
        let sched = simulate(&inst, &builtin("SPT").unwrap(), 0).unwrap();
        assert_eq!(sched.entries[0].job_id, 0);
    }

    #[test]
    fn random_rule_is_deterministic_per_seed() {
        let inst = two_by_two();
        let rule = builtin("RANDOM").unwrap();
        let a = simulate(&inst, &rule, 7).unwrap();
        let b = simulate(&inst, &rule, 7).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn zero_duration_ops_complete() {
        let inst = Instance::static_from_routes(
            "zero",
            2,
            &[alloc::vec![(0, 0), (1, 0), (0, 2)], alloc::vec![(0, 1)]],
        )
        .unwrap();
        let sched = simulate(&inst, &builtin("SPT").unwrap(), 0).unwrap();
        assert_eq!(sched.entries.len(), 4);
        assert!(validate_schedule(&inst, &sched).is_empty());
    }

    #[test]
    fn feature_snapshot_matches_route_arithmetic() {
        let inst = Instance::static_from_routes(
            "feat",
            3,
            &[alloc::vec![(0, 5), (1, 3), (2, 9)]],
        )
        .unwrap();
        let mut state = SimState::new(&inst, 0);
        let op = inst.jobs[0][0];
        let fv = compute_features(&mut state, &inst, &op);
        assert_eq!(fv.pt, 5.0);
        assert_eq!(fv.twk, 17.0);
        assert_eq!(fv.twkr, 17.0);
        assert_eq!(fv.srm, 12.0);
        assert_eq!(fv.nops_remaining, 3.0);
        assert_eq!(fv.sso, 3.0);
        assert_eq!(fv.lso, 9.0);
        assert!((0.0..1.0).contains(&fv.rand));
    }

    #[test]
    fn last_op_has_zero_subsequent_features() {
        let inst = Instance::static_from_routes("last", 1, &[alloc::vec![(0, 7)]]).unwrap();
        let mut state = SimState::new(&inst, 0);
        let fv = compute_features(&mut state, &inst, &inst.jobs[0][0]);
        assert_eq!(fv.pt, 7.0);
        assert_eq!(fv.sso, 0.0);
        assert_eq!(fv.lso, 0.0);
        assert_eq!(fv.srm, 0.0);
        assert_eq!(fv.nops_remaining, 1.0);
    }

    #[test]
    fn wait_measures_time_since_ready() {
        let inst = Instance::static_from_routes("wait", 1, &[alloc::vec![(0, 7)]]).unwrap();
        let mut state = SimState::new(&inst, 0);
        state.now = 12;
        state.job_ready_at[0] = 10;
        let fv = compute_features(&mut state, &inst, &inst.jobs[0][0]);
        assert_eq!(fv.wait, 2.0);
        assert_eq!(fv.now, 12.0);
    }

    #[test]
    fn non_finite_score_aborts_with_offending_vector() {
        let inst = two_by_two();
        let rule = parse_rule("exp(1e9)").unwrap();
        let err = simulate(&inst, &rule, 0).unwrap_err();
        assert!(err.score.is_infinite());
        assert_eq!(err.fv.pt, 3.0);
    }
}
