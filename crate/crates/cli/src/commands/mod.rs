//! Subcommand implementations. Every `run` returns the process exit code:
//! 0 for success, 1 for a run-level failure (an aborted evolution run, a
//! sweep with failed cells), while input and configuration errors surface as
//! `Err` and exit with 2.

pub mod apply;
pub mod bench;
pub mod evaluate;
pub mod evolve;
pub mod generate;
pub mod report;
pub mod validate;

/// Caps the global worker pool; later calls are ignored, so the first
/// command to configure it wins.
pub fn configure_jobs(jobs: Option<usize>) {
    if let Some(n) = jobs {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}
