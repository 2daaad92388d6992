//! `generate`: write seeded instance files.

use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use shopevo_core::cases::{
    generate_dynamic_case_detailed, generate_static_case, DynamicGenParams, StaticGenParams,
};
use shopevo_core::instance::Time;
use shopevo_core::seed::{derive_seed, stream};

use crate::io::{write_sidecar, DynamicSidecar};

fn parse_range(s: &str) -> Result<(u64, u64), String> {
    let (lo, hi) = s
        .split_once("..")
        .ok_or_else(|| format!("expected LO..HI, got `{s}`"))?;
    let lo: u64 = lo.trim().parse().map_err(|e| format!("bad lower bound: {e}"))?;
    let hi: u64 = hi.trim().parse().map_err(|e| format!("bad upper bound: {e}"))?;
    if lo == 0 || hi < lo {
        return Err(format!("range `{s}` must satisfy 1 <= LO <= HI"));
    }
    Ok((lo, hi))
}

#[derive(clap::Args, Debug)]
pub struct Args {
    /// Output directory for the generated files
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,

    /// How many instances to generate
    #[arg(long, default_value_t = 10)]
    pub count: usize,

    /// Root seed; instance i is generated from a seed derived from (seed, i)
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Generate static instances (all jobs at time 0, standard text format)
    /// instead of dynamic ones (batch arrivals, sidecar JSON)
    #[arg(long = "static")]
    pub static_instances: bool,

    /// Machines per dynamic instance
    #[arg(long, default_value_t = 10)]
    pub machines: usize,

    /// Batches per dynamic instance, as LO..HI
    #[arg(long, value_parser = parse_range, default_value = "2..3")]
    pub batch_range: (u64, u64),

    /// Jobs per batch, as LO..HI
    #[arg(long, value_parser = parse_range, default_value = "20..50")]
    pub batch_size_range: (u64, u64),

    /// Arrival window of the second batch, as LO..HI
    #[arg(long, value_parser = parse_range, default_value = "1..500")]
    pub window1: (u64, u64),

    /// Arrival window of the third batch, as LO..HI
    #[arg(long, value_parser = parse_range, default_value = "501..1000")]
    pub window2: (u64, u64),

    /// Jobs per static instance, as LO..HI
    #[arg(long, value_parser = parse_range, default_value = "20..100")]
    pub job_range: (u64, u64),

    /// Machines per static instance, as LO..HI
    #[arg(long, value_parser = parse_range, default_value = "10..20")]
    pub machine_range: (u64, u64),

    /// Operation durations, as LO..HI
    #[arg(long, value_parser = parse_range, default_value = "50..100")]
    pub pt_range: (u64, u64),
}

pub fn run(args: Args) -> Result<u8> {
    fs::create_dir_all(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))?;
    let pt = (args.pt_range.0 as Time, args.pt_range.1 as Time);

    for i in 0..args.count {
        let seed = derive_seed(args.seed, stream::CASE_GEN, i as u64);
        let name = format!("case{i:04}");
        if args.static_instances {
            let params = StaticGenParams {
                job_count_range: (args.job_range.0 as usize, args.job_range.1 as usize),
                machine_count_range: (args.machine_range.0 as usize, args.machine_range.1 as usize),
                processing_time_range: pt,
                seed,
            };
            let inst = generate_static_case(&params);
            let path = args.out.join(format!("{name}.txt"));
            fs::write(&path, inst.to_standard_format())
                .with_context(|| format!("writing {}", path.display()))?;
        } else {
            let params = DynamicGenParams {
                machine_count: args.machines,
                batch_count_range: (args.batch_range.0 as usize, args.batch_range.1 as usize),
                batch_size_range: (args.batch_size_range.0 as usize, args.batch_size_range.1 as usize),
                arrival_window_1: (args.window1.0 as Time, args.window1.1 as Time),
                arrival_window_2: (args.window2.0 as Time, args.window2.1 as Time),
                processing_time_range: pt,
                seed,
            };
            let case = generate_dynamic_case_detailed(&params);
            let sidecar = DynamicSidecar::from_case(&name, &case, params);
            write_sidecar(&args.out.join(format!("{name}.json")), &sidecar)?;
        }
    }

    let kind = if args.static_instances { "static" } else { "dynamic" };
    println!(
        "wrote {} {kind} instances to {}",
        args.count,
        args.out.display()
    );
    Ok(0)
}
