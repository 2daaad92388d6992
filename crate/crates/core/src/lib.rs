//! Dynamic job-shop scheduling core: problem model, dispatching simulation,
//! a small priority-rule expression language, and a population engine that
//! evolves rules through a pluggable text-generation provider.
//!
//! The crate is `no_std`-compatible (with `alloc`); everything here is pure
//! computation. File formats, HTTP providers, and the command-line front end
//! live in the companion `shopevo` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod cases;
pub mod evolve;
pub mod features;
pub mod instance;
pub mod llm;
pub mod oracle;
pub mod report;
pub mod rule;
pub mod schedule;
pub mod seed;
pub mod sim;
pub mod taillard;

pub use features::{Feature, FeatureVector};
pub use instance::{parse_instance, Instance, InstanceError, Operation, ParseInstanceError, Time};
pub use rule::{builtin, parse_rule, ParseRuleError, RuleEvalError, RuleProgram};
pub use schedule::{validate_schedule, Schedule, ScheduledOp, Violation};
pub use sim::{simulate, SimState};
