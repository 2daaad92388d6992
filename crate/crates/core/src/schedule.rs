//! Schedules and feasibility checking.

use alloc::vec::Vec;

use crate::instance::{Instance, Time};

/// One operation placed on its machine with committed start and end times.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScheduledOp {
    pub job_id: usize,
    pub op_index: usize,
    pub machine_id: usize,
    pub start: Time,
    pub end: Time,
}

/// A complete assignment of start times, one entry per operation.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Schedule {
    pub entries: Vec<ScheduledOp>,
    pub makespan: Time,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("schedule has no entries")]
pub struct EmptySchedule;

impl Schedule {
    /// Wraps entries and computes the makespan (maximum end time).
    pub fn from_entries(entries: Vec<ScheduledOp>) -> Result<Self, EmptySchedule> {
        let makespan = entries.iter().map(|e| e.end).max().ok_or(EmptySchedule)?;
        Ok(Schedule { entries, makespan })
    }
}

/// Maximum completion time over all entries.
pub fn makespan(sched: &Schedule) -> Time {
    sched.makespan
}

/// One feasibility breach found by [`validate_schedule`].
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Violation {
    #[error("job {job} op {op}: missing from schedule")]
    MissingOp { job: usize, op: usize },
    #[error("job {job} op {op}: scheduled more than once")]
    DuplicateOp { job: usize, op: usize },
    #[error("job {job} op {op}: not part of the instance")]
    UnknownOp { job: usize, op: usize },
    #[error("job {job} op {op}: duration mismatch (expected {expected}, entry spans {actual})")]
    DurationMismatch {
        job: usize,
        op: usize,
        expected: Time,
        actual: Time,
    },
    #[error("job {job} op {op}: wrong machine (expected {expected}, entry on {actual})")]
    WrongMachine {
        job: usize,
        op: usize,
        expected: usize,
        actual: usize,
    },
    #[error("job {job} op {op}: starts at {start} before previous op ends at {prev_end}")]
    PrecedenceViolation {
        job: usize,
        op: usize,
        prev_end: Time,
        start: Time,
    },
    #[error("machine {machine}: overlap between job {first_job} op {first_op} and job {second_job} op {second_op}")]
    MachineOverlap {
        machine: usize,
        first_job: usize,
        first_op: usize,
        second_job: usize,
        second_op: usize,
    },
    #[error("job {job}: first op starts at {start} before arrival at {arrival}")]
    ArrivalViolation { job: usize, arrival: Time, start: Time },
    #[error("makespan mismatch (stated {stated}, entries end at {actual})")]
    MakespanMismatch { stated: Time, actual: Time },
}

/// Checks a schedule against the instance's constraints.
///
/// An empty report means the schedule is feasible: every operation appears
/// exactly once with its own duration and machine, job routes run in order,
/// machines process one operation at a time, no job starts before it arrives,
/// and the stated makespan matches the entries.
pub fn validate_schedule(inst: &Instance, sched: &Schedule) -> Vec<Violation> {
    let mut violations = Vec::new();

    let mut seen: Vec<Vec<u32>> = inst.jobs.iter().map(|route| alloc::vec![0; route.len()]).collect();
    for entry in &sched.entries {
        match seen.get_mut(entry.job_id).and_then(|route| route.get_mut(entry.op_index)) {
            Some(count) => *count += 1,
            None => violations.push(Violation::UnknownOp {
                job: entry.job_id,
                op: entry.op_index,
            }),
        }
    }
    for (job, route) in seen.iter().enumerate() {
        for (op, &count) in route.iter().enumerate() {
            match count {
                0 => violations.push(Violation::MissingOp { job, op }),
                1 => {}
                _ => violations.push(Violation::DuplicateOp { job, op }),
            }
        }
    }

    for entry in &sched.entries {
        let Some(op) = inst
            .jobs
            .get(entry.job_id)
            .and_then(|route| route.get(entry.op_index))
        else {
            continue;
        };
        let actual = entry.end.saturating_sub(entry.start);
        if entry.end < entry.start || actual != op.processing_time {
            violations.push(Violation::DurationMismatch {
                job: entry.job_id,
                op: entry.op_index,
                expected: op.processing_time,
                actual,
            });
        }
        if entry.machine_id != op.machine_id {
            violations.push(Violation::WrongMachine {
                job: entry.job_id,
                op: entry.op_index,
                expected: op.machine_id,
                actual: entry.machine_id,
            });
        }
        if entry.op_index == 0 {
            let arrival = inst.arrival_times[entry.job_id];
            if entry.start < arrival {
                violations.push(Violation::ArrivalViolation {
                    job: entry.job_id,
                    arrival,
                    start: entry.start,
                });
            }
        }
    }

    let mut by_job: Vec<Vec<Option<&ScheduledOp>>> =
        inst.jobs.iter().map(|route| alloc::vec![None; route.len()]).collect();
    for entry in &sched.entries {
        if let Some(slot) = by_job
            .get_mut(entry.job_id)
            .and_then(|route| route.get_mut(entry.op_index))
        {
            *slot = Some(entry);
        }
    }
    for route in &by_job {
        for pair in route.windows(2) {
            if let (Some(prev), Some(next)) = (pair[0], pair[1]) {
                if next.start < prev.end {
                    violations.push(Violation::PrecedenceViolation {
                        job: next.job_id,
                        op: next.op_index,
                        prev_end: prev.end,
                        start: next.start,
                    });
                }
            }
        }
    }

    let mut by_machine: Vec<Vec<&ScheduledOp>> = alloc::vec![Vec::new(); inst.machine_count];
    for entry in &sched.entries {
        if let Some(slot) = by_machine.get_mut(entry.machine_id) {
            slot.push(entry);
        }
    }
    for (machine, entries) in by_machine.iter_mut().enumerate() {
        entries.sort_by_key(|e| (e.start, e.end, e.job_id, e.op_index));
        for pair in entries.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            if b.start < a.end {
                violations.push(Violation::MachineOverlap {
                    machine,
                    first_job: a.job_id,
                    first_op: a.op_index,
                    second_job: b.job_id,
                    second_op: b.op_index,
                });
            }
        }
    }

    let actual = sched.entries.iter().map(|e| e.end).max().unwrap_or(0);
    if sched.makespan != actual {
        violations.push(Violation::MakespanMismatch {
            stated: sched.makespan,
            actual,
        });
    }

    violations
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Instance;

    fn single_op_instance() -> Instance {
        Instance::static_from_routes("one", 1, &[alloc::vec![(0, 5)]]).unwrap()
    }

    fn entry(job: usize, op: usize, machine: usize, start: Time, end: Time) -> ScheduledOp {
        ScheduledOp {
            job_id: job,
            op_index: op,
            machine_id: machine,
            start,
            end,
        }
    }

    #[test]
    fn accepts_feasible_single_op() {
        let inst = single_op_instance();
        let sched = Schedule::from_entries(alloc::vec![entry(0, 0, 0, 0, 5)]).unwrap();
        assert_eq!(sched.makespan, 5);
        assert!(validate_schedule(&inst, &sched).is_empty());
    }

    #[test]
    fn flags_duration_mismatch() {
        let inst = single_op_instance();
        let sched = Schedule {
            entries: alloc::vec![entry(0, 0, 0, 0, 4)],
            makespan: 4,
        };
        let violations = validate_schedule(&inst, &sched);
        assert!(violations
            .iter()
            .any(|v| matches!(v, Violation::DurationMismatch { expected: 5, actual: 4, .. })));
    }

    #[test]
    fn flags_machine_overlap() {
        let inst =
            Instance::static_from_routes("ov", 1, &[alloc::vec![(0, 5)], alloc::vec![(0, 5)]])
                .unwrap();
        let sched = Schedule {
            entries: alloc::vec![entry(0, 0, 0, 0, 5), entry(1, 0, 0, 3, 8)],
            makespan: 8,
        };
        let violations = validate_schedule(&inst, &sched);
        assert!(violations
            .iter()
            .any(|v| matches!(v, Violation::MachineOverlap { machine: 0, .. })));
    }

    #[test]
    fn flags_precedence_and_arrival() {
        let inst = Instance::from_routes(
            "pa",
            2,
            &[alloc::vec![(0, 3), (1, 2)]],
            alloc::vec![10],
        )
        .unwrap();
        let sched = Schedule {
            entries: alloc::vec![entry(0, 0, 0, 0, 3), entry(0, 1, 1, 2, 4)],
            makespan: 4,
        };
        let violations = validate_schedule(&inst, &sched);
        assert!(violations
            .iter()
            .any(|v| matches!(v, Violation::PrecedenceViolation { prev_end: 3, start: 2, .. })));
        assert!(violations
            .iter()
            .any(|v| matches!(v, Violation::ArrivalViolation { arrival: 10, start: 0, .. })));
    }

    #[test]
    fn flags_coverage_gaps() {
        let inst =
            Instance::static_from_routes("cov", 1, &[alloc::vec![(0, 2), (0, 3)]]).unwrap();
        let sched = Schedule {
            entries: alloc::vec![
                entry(0, 0, 0, 0, 2),
                entry(0, 0, 0, 2, 4),
                entry(3, 0, 0, 0, 2),
            ],
            makespan: 4,
        };
        let violations = validate_schedule(&inst, &sched);
        assert!(violations.iter().any(|v| matches!(v, Violation::DuplicateOp { job: 0, op: 0 })));
        assert!(violations.iter().any(|v| matches!(v, Violation::MissingOp { job: 0, op: 1 })));
        assert!(violations.iter().any(|v| matches!(v, Violation::UnknownOp { job: 3, op: 0 })));
    }

    #[test]
    fn flags_makespan_mismatch() {
        let inst = single_op_instance();
        let sched = Schedule {
            entries: alloc::vec![entry(0, 0, 0, 0, 5)],
            makespan: 7,
        };
        let violations = validate_schedule(&inst, &sched);
        assert_eq!(
            violations,
            alloc::vec![Violation::MakespanMismatch { stated: 7, actual: 5 }]
        );
    }

    #[test]
    fn makespan_is_max_end() {
        let sched = Schedule::from_entries(alloc::vec![
            entry(0, 0, 0, 0, 6),
            entry(1, 0, 1, 0, 5),
        ])
        .unwrap();
        assert_eq!(makespan(&sched), 6);
    }

    #[test]
    fn rejects_empty_schedule() {
        assert_eq!(Schedule::from_entries(alloc::vec![]), Err(EmptySchedule));
    }
}
