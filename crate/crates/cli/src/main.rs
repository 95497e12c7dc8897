use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use tcim_cli::commands::{cmd_count, cmd_stats, cmd_sweep, load_input, RunOptions};
use tcim_cli::report::{write_reports, Mode, ReportFormat, RunReport, SWEEP_HEADER};
use tcim_cli::units::parse_size;
use tcim_core::graph::RelabelMode;
use tcim_core::slicing::SliceSize;

#[derive(Parser)]
#[command(
    name = "tcim",
    version,
    about = "Triangle counting with sliced bitwise AND + BitCount"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count triangles.
    Count {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "pim")]
        mode: Mode,
        /// Slice size in bits: 4, 8, 16, 32, 64 or 128.
        #[arg(long, default_value = "64", value_parser = parse_slice_size)]
        slice_size: SliceSize,
        /// Array capacity, e.g. 16MiB.
        #[arg(long, default_value = "16MiB", value_parser = parse_size)]
        capacity: u64,
    },
    /// Slicing statistics without counting.
    Stats {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "64", value_parser = parse_slice_size)]
        slice_size: SliceSize,
    },
    /// Simulate every combination of slice size and capacity.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Comma-separated slice sizes.
        #[arg(long, value_delimiter = ',', default_value = "64", value_parser = parse_slice_size)]
        slice_size: Vec<SliceSize>,
        /// Comma-separated capacities.
        #[arg(long, value_delimiter = ',', default_value = "16MiB", value_parser = parse_size)]
        capacity: Vec<u64>,
    },
}

#[derive(Args)]
struct Common {
    /// Edge-list file, `er:<n>:<p>` or `complete:<n>`.
    input: String,
    /// Vertex relabeling: identity, dense or degree-descending.
    #[arg(long, default_value = "dense")]
    relabel: RelabelMode,
    /// Slots reserved for row slices.
    #[arg(long, default_value_t = 1024)]
    row_slots: usize,
    /// Per-operation cost file (`op latency energy` lines).
    #[arg(long)]
    cost_model: Option<String>,
    /// Write a machine-readable report.
    #[arg(long, value_enum)]
    report: Option<ReportFormat>,
    /// Report destination; `-` or absent means stdout.
    #[arg(long)]
    out: Option<String>,
    /// Seed for synthetic inputs.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn parse_slice_size(text: &str) -> Result<SliceSize, String> {
    let bits: u32 = text
        .trim()
        .parse()
        .map_err(|_| format!("`{text}` is not a number"))?;
    SliceSize::new(bits).map_err(|e| e.to_string())
}

impl Common {
    fn options(&self) -> RunOptions {
        RunOptions {
            input: self.input.clone(),
            relabel: self.relabel,
            seed: self.seed,
            row_region_slots: self.row_slots,
            cost_model: self.cost_model.clone(),
        }
    }

    fn report_to_stdout(&self) -> bool {
        self.report.is_some() && self.out.as_deref().is_none_or(|o| o == "-")
    }
}

fn emit(common: &Common, reports: &[RunReport], notes: &[String], sweep: bool) -> Result<()> {
    // Keep stdout clean when it carries the report.
    let mut summary: Box<dyn Write> = if common.report_to_stdout() {
        Box::new(io::stderr())
    } else {
        Box::new(io::stdout())
    };
    if sweep {
        if let Some(first) = reports.first() {
            writeln!(
                summary,
                "sweep {}: n = {}, |E| = {}",
                first.dataset, first.num_vertices, first.num_edges
            )?;
        }
        writeln!(summary, "{SWEEP_HEADER}")?;
        for r in reports {
            writeln!(summary, "{}", r.sweep_line())?;
        }
    } else {
        for r in reports {
            write!(summary, "{}", r.summary())?;
        }
    }
    for n in notes {
        writeln!(summary, "note: {n}")?;
    }
    summary.flush()?;
    if let Some(format) = common.report {
        match common.out.as_deref() {
            None | Some("-") => write_reports(reports, format, io::stdout().lock())?,
            Some(path) => {
                let file = File::create(path).with_context(|| format!("cannot create {path}"))?;
                let mut w = BufWriter::new(file);
                write_reports(reports, format, &mut w)?;
                w.flush()?;
            }
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Count {
            common,
            mode,
            slice_size,
            capacity,
        } => {
            let input = load_input(&common.input, common.relabel, common.seed)?;
            let report = cmd_count(&input, &common.options(), mode, slice_size, capacity)?;
            emit(&common, &[report], &[], false)
        }
        Command::Stats { common, slice_size } => {
            let input = load_input(&common.input, common.relabel, common.seed)?;
            let report = cmd_stats(&input, &common.options(), slice_size)?;
            emit(&common, &[report], &[], false)
        }
        Command::Sweep {
            common,
            slice_size,
            capacity,
        } => {
            let input = load_input(&common.input, common.relabel, common.seed)?;
            let outcome = cmd_sweep(&input, &common.options(), &slice_size, &capacity);
            emit(&common, &outcome.reports, &outcome.notes, true)?;
            match outcome.error {
                Some(e) => Err(e),
                None => Ok(()),
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
