//! Job-shop problem data: operations, instances, and the standard text format.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

/// Integer time unit used for durations, start times, and makespans.
pub type Time = u64;

/// One processing step of a job on a fixed machine.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Operation {
    pub job_id: usize,
    /// 0-based position in the job's route.
    pub op_index: usize,
    pub machine_id: usize,
    pub processing_time: Time,
}

/// A job-shop instance: fixed machine routes per job plus per-job arrival times.
///
/// Static instances have all arrivals at 0; dynamic instances carry the batch
/// arrival times of their jobs.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Instance {
    pub name: String,
    pub machine_count: usize,
    /// One route per job; routes are non-empty and ordered by `op_index`.
    pub jobs: Vec<Vec<Operation>>,
    /// One arrival time per job.
    pub arrival_times: Vec<Time>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InstanceError {
    #[error("instance has no jobs")]
    NoJobs,
    #[error("machine count must be positive")]
    NoMachines,
    #[error("job {job} has an empty route")]
    EmptyRoute { job: usize },
    #[error("job {job} op {op}: machine index {machine} out of range (machine count {machine_count})")]
    MachineOutOfRange {
        job: usize,
        op: usize,
        machine: usize,
        machine_count: usize,
    },
    #[error("job {job} op {op}: inconsistent job/op indices")]
    BadIndices { job: usize, op: usize },
    #[error("arrival count {arrivals} does not match job count {jobs}")]
    ArrivalCountMismatch { arrivals: usize, jobs: usize },
}

impl Instance {
    /// Builds an instance from routes given as `(machine, duration)` pairs,
    /// validating machine indices and filling in job/op indices.
    pub fn from_routes(
        name: impl Into<String>,
        machine_count: usize,
        routes: &[Vec<(usize, Time)>],
        arrival_times: Vec<Time>,
    ) -> Result<Self, InstanceError> {
        if machine_count == 0 {
            return Err(InstanceError::NoMachines);
        }
        if routes.is_empty() {
            return Err(InstanceError::NoJobs);
        }
        if arrival_times.len() != routes.len() {
            return Err(InstanceError::ArrivalCountMismatch {
                arrivals: arrival_times.len(),
                jobs: routes.len(),
            });
        }
        let mut jobs = Vec::with_capacity(routes.len());
        for (job_id, route) in routes.iter().enumerate() {
            if route.is_empty() {
                return Err(InstanceError::EmptyRoute { job: job_id });
            }
            let mut ops = Vec::with_capacity(route.len());
            for (op_index, &(machine_id, processing_time)) in route.iter().enumerate() {
                if machine_id >= machine_count {
                    return Err(InstanceError::MachineOutOfRange {
                        job: job_id,
                        op: op_index,
                        machine: machine_id,
                        machine_count,
                    });
                }
                ops.push(Operation {
                    job_id,
                    op_index,
                    machine_id,
                    processing_time,
                });
            }
            jobs.push(ops);
        }
        Ok(Instance {
            name: name.into(),
            machine_count,
            jobs,
            arrival_times,
        })
    }

    /// Static variant of [`Instance::from_routes`]: all arrivals at 0.
    pub fn static_from_routes(
        name: impl Into<String>,
        machine_count: usize,
        routes: &[Vec<(usize, Time)>],
    ) -> Result<Self, InstanceError> {
        let arrivals = alloc::vec![0; routes.len()];
        Self::from_routes(name, machine_count, routes, arrivals)
    }

    pub fn job_count(&self) -> usize {
        self.jobs.len()
    }

    pub fn total_ops(&self) -> usize {
        self.jobs.iter().map(Vec::len).sum()
    }

    /// Total processing time of one job over its whole route.
    pub fn job_work(&self, job: usize) -> Time {
        self.jobs[job].iter().map(|op| op.processing_time).sum()
    }

    pub fn is_static(&self) -> bool {
        self.arrival_times.iter().all(|&t| t == 0)
    }

    /// Renders the instance in the standard job-shop text format.
    ///
    /// Arrival times are not representable in this format; dynamic instances
    /// serialize through their sidecar document instead.
    pub fn to_standard_format(&self) -> String {
        let mut out = format!("{} {}\n", self.job_count(), self.machine_count);
        for route in &self.jobs {
            let line: Vec<String> = route
                .iter()
                .map(|op| format!("{} {}", op.machine_id, op.processing_time))
                .collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

/// Error from [`parse_instance`], carrying the 1-based offending line.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct ParseInstanceError {
    pub line: usize,
    pub message: String,
}

fn parse_err(line: usize, message: impl Into<String>) -> ParseInstanceError {
    ParseInstanceError {
        line,
        message: message.into(),
    }
}

/// Parses the standard job-shop text format.
///
/// Line 1 holds `<n_jobs> <n_machines>`; each of the following `n_jobs` lines
/// holds `n_machines` whitespace-separated `<machine> <duration>` pairs with
/// 0-based machine indices, as distributed with the public TA/DMU sets.
/// All arrival times are 0.
pub fn parse_instance(text: &str, name: &str) -> Result<Instance, ParseInstanceError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty());

    let (header_line, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let header_tokens: Vec<&str> = header.split_whitespace().collect();
    if header_tokens.len() != 2 {
        return Err(parse_err(
            header_line,
            format!(
                "malformed header: expected \"<n_jobs> <n_machines>\", found {} token(s)",
                header_tokens.len()
            ),
        ));
    }
    let n_jobs: usize = header_tokens[0]
        .parse()
        .map_err(|_| parse_err(header_line, format!("malformed job count `{}`", header_tokens[0])))?;
    let n_machines: usize = header_tokens[1].parse().map_err(|_| {
        parse_err(
            header_line,
            format!("malformed machine count `{}`", header_tokens[1]),
        )
    })?;
    if n_jobs == 0 {
        return Err(parse_err(header_line, "job count must be positive"));
    }
    if n_machines == 0 {
        return Err(parse_err(header_line, "machine count must be positive"));
    }

    let mut routes: Vec<Vec<(usize, Time)>> = Vec::with_capacity(n_jobs);
    for _ in 0..n_jobs {
        let (line_no, line) = lines
            .next()
            .ok_or_else(|| parse_err(n_jobs + 1, format!("expected {n_jobs} job lines")))?;
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 2 * n_machines {
            return Err(parse_err(
                line_no,
                format!(
                    "wrong token count: expected {} (one <machine> <duration> pair per machine), found {}",
                    2 * n_machines,
                    tokens.len()
                ),
            ));
        }
        let mut route = Vec::with_capacity(n_machines);
        for pair in tokens.chunks(2) {
            let machine: i64 = pair[0]
                .parse()
                .map_err(|_| parse_err(line_no, format!("malformed machine index `{}`", pair[0])))?;
            if machine < 0 {
                return Err(parse_err(line_no, format!("negative machine index {machine}")));
            }
            let machine = machine as usize;
            if machine >= n_machines {
                return Err(parse_err(
                    line_no,
                    format!("machine index {machine} out of range (machine count {n_machines})"),
                ));
            }
            let duration: i64 = pair[1]
                .parse()
                .map_err(|_| parse_err(line_no, format!("malformed duration `{}`", pair[1])))?;
            if duration < 0 {
                return Err(parse_err(line_no, format!("negative duration {duration}")));
            }
            route.push((machine, duration as Time));
        }
        routes.push(route);
    }

    if let Some((line_no, _)) = lines.next() {
        return Err(parse_err(line_no, "trailing content after last job line"));
    }

    Instance::static_from_routes(name, n_machines, &routes)
        .map_err(|e| parse_err(1, e.to_string()))
}
