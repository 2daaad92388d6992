//! `report`: re-render a saved bench report.

use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use shopevo_core::report::BenchReport;

use crate::table;

use super::bench::write_report_files;

#[derive(clap::Args, Debug)]
pub struct Args {
    /// Saved report.json from a bench run
    #[arg(long, value_name = "FILE")]
    pub from: PathBuf,

    /// Directory for the rendered CSV tables and plot data
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

pub fn run(args: Args) -> Result<u8> {
    let text = fs::read_to_string(&args.from)
        .with_context(|| format!("reading {}", args.from.display()))?;
    let report: BenchReport = serde_json::from_str(&text)
        .with_context(|| format!("parsing {}", args.from.display()))?;
    print!("{}", table::render_text(&report));
    if let Some(dir) = &args.out {
        write_report_files(dir, &report)?;
        println!("report written to {}", dir.display());
    }
    Ok(0)
}
