//! `validate`: check that instance and rule files parse.

use std::path::PathBuf;

use anyhow::Result;
use shopevo_core::rule::builtin;

use crate::io::{load_instance, load_rule_file};
use crate::EXIT_INPUT_ERROR;

#[derive(clap::Args, Debug)]
pub struct Args {
    /// Rule expression file to check
    #[arg(long, value_name = "FILE")]
    pub rule_file: Option<PathBuf>,

    /// Catalog rule name to check
    #[arg(long)]
    pub rule: Option<String>,

    /// Instance files to check
    #[arg(value_name = "INSTANCE")]
    pub instances: Vec<PathBuf>,
}

pub fn run(args: Args) -> Result<u8> {
    let mut checks = 0usize;
    let mut failures = 0usize;

    for path in &args.instances {
        checks += 1;
        match load_instance(path) {
            Ok(inst) => {
                let kind = if inst.is_static() { "static" } else { "dynamic" };
                println!(
                    "{}: OK  {} jobs x {} machines, {kind}",
                    path.display(),
                    inst.job_count(),
                    inst.machine_count
                );
            }
            Err(e) => {
                eprintln!("{e:#}");
                failures += 1;
            }
        }
    }

    if let Some(path) = &args.rule_file {
        checks += 1;
        match load_rule_file(path) {
            Ok(rule) => println!("{}: OK  {}", path.display(), rule.canonical()),
            Err(e) => {
                eprintln!("{e:#}");
                failures += 1;
            }
        }
    }
    if let Some(name) = &args.rule {
        checks += 1;
        match builtin(name) {
            Ok(rule) => println!("{name}: OK  {}", rule.canonical()),
            Err(e) => {
                eprintln!("{e}");
                failures += 1;
            }
        }
    }

    if checks == 0 {
        println!("nothing to validate");
    }
    if failures > 0 {
        eprintln!("{failures} of {checks} inputs failed");
        return Ok(EXIT_INPUT_ERROR);
    }
    Ok(0)
}
