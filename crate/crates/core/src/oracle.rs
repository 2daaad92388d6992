//! Exhaustive optimal-makespan oracle for desk-scale instances.
//!
//! Branches over active schedules: at each step it finds the candidate with
//! the earliest possible completion and tries every candidate on that machine
//! that could start before this completion. The set of active schedules
//! always contains an optimal one, so the search returns the true minimum
//! makespan. Lower-bound and dominance pruning keep it fast at the supported
//! sizes.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::instance::{Instance, Time};

/// Instances above this many operations are refused by default.
pub const DEFAULT_OP_BUDGET: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("instance has {total_ops} operations, over the exhaustive-search budget of {budget}")]
pub struct OpBudgetExceeded {
    pub total_ops: usize,
    pub budget: usize,
}

struct Search<'a> {
    inst: &'a Instance,
    total_ops: usize,
    /// Remaining work per machine, kept in step with `job_next_op`.
    rem_machine: Vec<Time>,
    job_next_op: Vec<usize>,
    job_ready: Vec<Time>,
    machine_free: Vec<Time>,
    best: Time,
    /// Dominance memo: per operation frontier, the undominated
    /// `(machine_free, job_ready, max_end)` signatures seen so far.
    seen: BTreeMap<Vec<usize>, Vec<Vec<Time>>>,
}

impl Search<'_> {
    fn signature(&self, max_end: Time) -> Vec<Time> {
        let mut sig = Vec::with_capacity(self.machine_free.len() + self.job_ready.len() + 1);
        sig.extend_from_slice(&self.machine_free);
        sig.extend_from_slice(&self.job_ready);
        sig.push(max_end);
        sig
    }

    fn dominated(&mut self, max_end: Time) -> bool {
        let sig = self.signature(max_end);
        let entry = self.seen.entry(self.job_next_op.clone()).or_default();
        if entry
            .iter()
            .any(|old| old.iter().zip(&sig).all(|(o, n)| o <= n))
        {
            return true;
        }
        entry.retain(|old| !old.iter().zip(&sig).all(|(o, n)| n <= o));
        entry.push(sig);
        false
    }

    fn lower_bound(&self, ops_done: usize, max_end: Time) -> Time {
        let mut lb = max_end;
        if ops_done < self.total_ops {
            for (k, &rem) in self.rem_machine.iter().enumerate() {
                lb = lb.max(self.machine_free[k] + rem);
            }
            for job in 0..self.inst.job_count() {
                let next = self.job_next_op[job];
                let route = &self.inst.jobs[job];
                if next < route.len() {
                    let rem: Time = route[next..].iter().map(|op| op.processing_time).sum();
                    lb = lb.max(self.job_ready[job] + rem);
                }
            }
        }
        lb
    }

    fn explore(&mut self, ops_done: usize, max_end: Time) {
        if ops_done == self.total_ops {
            self.best = self.best.min(max_end);
            return;
        }
        if self.lower_bound(ops_done, max_end) >= self.best || self.dominated(max_end) {
            return;
        }

        let mut conflict_machine = usize::MAX;
        let mut earliest_completion = Time::MAX;
        for job in 0..self.inst.job_count() {
            let next = self.job_next_op[job];
            let Some(op) = self.inst.jobs[job].get(next) else {
                continue;
            };
            let start = self.job_ready[job].max(self.machine_free[op.machine_id]);
            let completion = start + op.processing_time;
            if completion < earliest_completion
                || (completion == earliest_completion && op.machine_id < conflict_machine)
            {
                earliest_completion = completion;
                conflict_machine = op.machine_id;
            }
        }

        for job in 0..self.inst.job_count() {
            let next = self.job_next_op[job];
            let Some(op) = self.inst.jobs[job].get(next).copied() else {
                continue;
            };
            if op.machine_id != conflict_machine {
                continue;
            }
            let start = self.job_ready[job].max(self.machine_free[op.machine_id]);
            if start > earliest_completion {
                continue;
            }
            let end = start + op.processing_time;

            let saved_ready = self.job_ready[job];
            let saved_free = self.machine_free[op.machine_id];
            self.job_next_op[job] += 1;
            self.job_ready[job] = end;
            self.machine_free[op.machine_id] = end;
            self.rem_machine[op.machine_id] -= op.processing_time;

            self.explore(ops_done + 1, max_end.max(end));

            self.rem_machine[op.machine_id] += op.processing_time;
            self.machine_free[op.machine_id] = saved_free;
            self.job_ready[job] = saved_ready;
            self.job_next_op[job] -= 1;
        }
    }
}

/// Minimum makespan over all schedules of the instance.
pub fn brute_force_optimal(inst: &Instance, op_budget: usize) -> Result<Time, OpBudgetExceeded> {
    let total_ops = inst.total_ops();
    if total_ops > op_budget {
        return Err(OpBudgetExceeded {
            total_ops,
            budget: op_budget,
        });
    }
    let mut rem_machine = alloc::vec![0; inst.machine_count];
    for route in &inst.jobs {
        for op in route {
            rem_machine[op.machine_id] += op.processing_time;
        }
    }
    let mut search = Search {
        inst,
        total_ops,
        rem_machine,
        job_next_op: alloc::vec![0; inst.job_count()],
        job_ready: inst.arrival_times.clone(),
        machine_free: alloc::vec![0; inst.machine_count],
        best: Time::MAX,
        seen: BTreeMap::new(),
    };
    search.explore(0, 0);
    Ok(search.best)
}
