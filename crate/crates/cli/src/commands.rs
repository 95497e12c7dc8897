//! `count`, `stats` and `sweep`.

use std::fs::File;
use std::io::BufReader;
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, ensure, Context, Result};
use rayon::prelude::*;

use tcim_core::graph::{parse_edge_list, Graph, RelabelMode};
use tcim_core::sim::{run_tcim, ArrayConfig, CostModel};
use tcim_core::slicing::{
    compress, compressed_size, valid_slice_fraction, CompressedGraph, SliceSize,
};
use tcim_core::tc::{count_triangles_bitwise, oracle_edge_intersection, oracle_trace_a3};
use tcim_core::to_bitmatrix;

use crate::report::{ConfigEcho, Mode, RunReport, SimReport, SliceReport};

const MIB_F: f64 = (1u64 << 20) as f64;

/// Settings shared by every command.
#[derive(Debug, Clone)]
pub struct RunOptions {
    pub input: String,
    pub relabel: RelabelMode,
    pub seed: u64,
    pub row_region_slots: usize,
    pub cost_model: Option<String>,
}

/// A loaded input with its display name.
#[derive(Debug, Clone)]
pub struct Input {
    pub name: String,
    pub graph: Graph,
}

/// Loads an edge-list file, or a synthetic graph: `er:<n>:<p>` (seeded by
/// `seed`) or `complete:<n>`.
pub fn load_input(spec: &str, relabel: RelabelMode, seed: u64) -> Result<Input> {
    if let Some(rest) = spec.strip_prefix("er:") {
        let (n, p) = rest
            .split_once(':')
            .with_context(|| format!("expected er:<n>:<p>, got `{spec}`"))?;
        let n: usize = n
            .parse()
            .with_context(|| format!("bad vertex count in `{spec}`"))?;
        let p: f64 = p
            .parse()
            .with_context(|| format!("bad probability in `{spec}`"))?;
        ensure!(
            (0.0..=1.0).contains(&p),
            "probability {p} is outside [0, 1]"
        );
        return Ok(Input {
            name: spec.to_string(),
            graph: Graph::erdos_renyi(n, p, seed),
        });
    }
    if let Some(n) = spec.strip_prefix("complete:") {
        let n: usize = n
            .parse()
            .with_context(|| format!("bad vertex count in `{spec}`"))?;
        return Ok(Input {
            name: spec.to_string(),
            graph: Graph::complete(n),
        });
    }
    let path = Path::new(spec);
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    let graph = parse_edge_list(BufReader::new(file), relabel)
        .with_context(|| format!("cannot read {}", path.display()))?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| spec.to_string());
    Ok(Input { name, graph })
}

pub fn load_cost_model(path: Option<&str>) -> Result<CostModel> {
    match path {
        None => Ok(CostModel::default()),
        Some(p) => CostModel::from_file(Path::new(p))
            .with_context(|| format!("cannot load cost model {p}")),
    }
}

fn slice_report(cg: &CompressedGraph, num_edges: u64, and_ops: Option<u64>) -> SliceReport {
    let bytes = compressed_size(cg);
    let windows = cg.windows_per_line() as u64;
    let pairs = num_edges.saturating_mul(windows);
    SliceReport {
        slice_size: cg.slice_size().bits(),
        n_vs: cg.num_valid_slices() as u64,
        row_slices: cg.num_row_slices() as u64,
        col_slices: cg.num_col_slices() as u64,
        windows_per_line: windows,
        valid_fraction: valid_slice_fraction(cg),
        compressed_bytes: bytes,
        compressed_mib: bytes as f64 / MIB_F,
        and_ops,
        pair_fraction: and_ops
            .filter(|_| pairs > 0)
            .map(|ops| ops as f64 / pairs as f64),
    }
}

struct Job<'a> {
    command: &'static str,
    input: &'a Input,
    cg: &'a CompressedGraph,
    mode: Option<Mode>,
    cfg: ArrayConfig,
    costs: &'a CostModel,
    opts: &'a RunOptions,
}

fn run_job(job: Job<'_>) -> Result<RunReport> {
    let start = Instant::now();
    let g = &job.input.graph;
    let mut triangle_count = None;
    let mut and_ops = None;
    let mut sim = None;
    match job.mode {
        None => {}
        Some(Mode::Bitwise) => {
            let r = count_triangles_bitwise(job.cg);
            triangle_count = Some(r.triangle_count);
            and_ops = Some(r.and_ops);
        }
        Some(Mode::Pim) => {
            let (r, stats) = run_tcim(job.cg, job.cfg, *job.costs)?;
            triangle_count = Some(r.triangle_count);
            and_ops = Some(r.and_ops);
            sim = Some(SimReport::new(stats));
        }
        Some(Mode::OracleMatmul) => triangle_count = Some(oracle_trace_a3(g)?),
        Some(Mode::OracleIntersect) => triangle_count = Some(oracle_edge_intersection(g)),
    }
    Ok(RunReport {
        command: job.command.to_string(),
        dataset: job.input.name.clone(),
        num_vertices: g.num_vertices() as u64,
        num_edges: g.num_edges() as u64,
        mode: job.mode,
        triangle_count,
        slices: slice_report(job.cg, g.num_edges() as u64, and_ops),
        sim,
        wall_seconds: start.elapsed().as_secs_f64(),
        config: ConfigEcho {
            input: job.opts.input.clone(),
            slice_size: job.cfg.slice_size.bits(),
            capacity_bytes: job.cfg.capacity_bytes,
            row_region_slots: job.cfg.row_region_slots,
            relabel: job.opts.relabel,
            cost_model: job.opts.cost_model.clone(),
            seed: job.opts.seed,
        },
    })
}

fn array_config(opts: &RunOptions, slice_size: SliceSize, capacity_bytes: u64) -> ArrayConfig {
    ArrayConfig {
        capacity_bytes,
        slice_size,
        row_region_slots: opts.row_region_slots,
        ..ArrayConfig::default()
    }
}

fn compress_input(input: &Input, slice_size: SliceSize) -> Result<CompressedGraph> {
    let m = to_bitmatrix(&input.graph)?;
    Ok(compress(&m, slice_size))
}

/// Counts triangles once in the given mode.
pub fn cmd_count(
    input: &Input,
    opts: &RunOptions,
    mode: Mode,
    slice_size: SliceSize,
    capacity_bytes: u64,
) -> Result<RunReport> {
    let cfg = array_config(opts, slice_size, capacity_bytes);
    if mode == Mode::Pim {
        cfg.validate()?;
    }
    let costs = load_cost_model(opts.cost_model.as_deref())?;
    let start = Instant::now();
    let cg = compress_input(input, slice_size)?;
    let mut report = run_job(Job {
        command: "count",
        input,
        cg: &cg,
        mode: Some(mode),
        cfg,
        costs: &costs,
        opts,
    })?;
    report.wall_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

/// Slicing statistics only; no counting.
pub fn cmd_stats(input: &Input, opts: &RunOptions, slice_size: SliceSize) -> Result<RunReport> {
    let start = Instant::now();
    let cg = compress_input(input, slice_size)?;
    let costs = CostModel::default();
    let mut report = run_job(Job {
        command: "stats",
        input,
        cg: &cg,
        mode: None,
        cfg: array_config(opts, slice_size, ArrayConfig::default().capacity_bytes),
        costs: &costs,
        opts,
    })?;
    report.wall_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

/// Outcome of a sweep: the reports that completed, in grid order, and the
/// first failure if any.
pub struct SweepOutcome {
    pub reports: Vec<RunReport>,
    pub error: Option<anyhow::Error>,
    pub notes: Vec<String>,
}

/// Runs the simulator over every (slice size, capacity) pair. Reports are in
/// slice-size-major grid order regardless of scheduling.
pub fn cmd_sweep(
    input: &Input,
    opts: &RunOptions,
    slice_sizes: &[SliceSize],
    capacities: &[u64],
) -> SweepOutcome {
    let mut outcome = SweepOutcome {
        reports: Vec::new(),
        error: None,
        notes: Vec::new(),
    };
    let costs = match load_cost_model(opts.cost_model.as_deref()) {
        Ok(c) => c,
        Err(e) => {
            outcome.error = Some(e);
            return outcome;
        }
    };
    let compressed: Vec<Result<CompressedGraph>> = slice_sizes
        .par_iter()
        .map(|&s| compress_input(input, s))
        .collect();
    let mut graphs = Vec::new();
    for c in compressed {
        match c {
            Ok(cg) => graphs.push(cg),
            Err(e) => {
                outcome.error = Some(e);
                return outcome;
            }
        }
    }
    let grid: Vec<(usize, u64)> = (0..graphs.len())
        .flat_map(|si| capacities.iter().map(move |&c| (si, c)))
        .collect();
    let results: Vec<Result<RunReport>> = grid
        .par_iter()
        .map(|&(si, capacity)| {
            let cg = &graphs[si];
            let cfg = array_config(opts, cg.slice_size(), capacity);
            cfg.validate()
                .with_context(|| format!("|S| = {}, capacity {capacity} bytes", cg.slice_size()))?;
            run_job(Job {
                command: "sweep",
                input,
                cg,
                mode: Some(Mode::Pim),
                cfg,
                costs: &costs,
                opts,
            })
        })
        .collect();
    for r in results {
        match r {
            Ok(report) => outcome.reports.push(report),
            Err(e) => {
                outcome.error.get_or_insert(e);
            }
        }
    }
    if outcome.error.is_none() {
        if let Err(e) = check_counts_agree(&outcome.reports) {
            outcome.error = Some(e);
        }
    }
    outcome.notes = hit_ratio_notes(&outcome.reports);
    outcome
}

fn check_counts_agree(reports: &[RunReport]) -> Result<()> {
    let Some(first) = reports.first() else {
        return Ok(());
    };
    for r in reports {
        if r.triangle_count != first.triangle_count {
            bail!(
                "triangle count changed with configuration: {:?} at |S| = {}, capacity {} vs {:?}",
                r.triangle_count,
                r.config.slice_size,
                r.config.capacity_bytes,
                first.triangle_count
            );
        }
    }
    Ok(())
}

/// Flags capacity steps where the hit ratio went down. Slice-granular LRU
/// does not guarantee monotonicity, so these are observations, not errors.
fn hit_ratio_notes(reports: &[RunReport]) -> Vec<String> {
    let mut notes = Vec::new();
    for pair in reports.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        if a.config.slice_size != b.config.slice_size
            || b.config.capacity_bytes <= a.config.capacity_bytes
        {
            continue;
        }
        let (Some(sa), Some(sb)) = (&a.sim, &b.sim) else {
            continue;
        };
        if sb.derived.hit_ratio < sa.derived.hit_ratio {
            notes.push(format!(
                "hit ratio fell from {:.6} to {:.6} when capacity grew from {} to {} bytes at |S| = {}",
                sa.derived.hit_ratio,
                sb.derived.hit_ratio,
                a.config.capacity_bytes,
                b.config.capacity_bytes,
                a.config.slice_size
            ));
        }
    }
    notes
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> RunOptions {
        RunOptions {
            input: "complete:6".into(),
            relabel: RelabelMode::Dense,
            seed: 1,
            row_region_slots: 16,
            cost_model: None,
        }
    }

    #[test]
    fn synthetic_inputs() {
        let k = load_input("complete:6", RelabelMode::Dense, 0).unwrap();
        assert_eq!(k.graph.num_edges(), 15);
        let er = load_input("er:30:0.5", RelabelMode::Dense, 3).unwrap();
        assert_eq!(er.graph, Graph::erdos_renyi(30, 0.5, 3));
        assert!(load_input("er:30", RelabelMode::Dense, 0).is_err());
        assert!(load_input("er:30:1.5", RelabelMode::Dense, 0).is_err());
    }

    #[test]
    fn every_mode_counts_k6() {
        let input = load_input("complete:6", RelabelMode::Dense, 0).unwrap();
        for mode in [
            Mode::Bitwise,
            Mode::Pim,
            Mode::OracleMatmul,
            Mode::OracleIntersect,
        ] {
            let r = cmd_count(&input, &opts(), mode, SliceSize::new(8).unwrap(), 1 << 20).unwrap();
            assert_eq!(r.triangle_count, Some(20), "{mode}");
            assert_eq!(r.sim.is_some(), mode == Mode::Pim);
        }
    }

    #[test]
    fn sweep_is_in_grid_order() {
        let input = load_input("er:80:0.3", RelabelMode::Dense, 5).unwrap();
        let sizes = [SliceSize::new(16).unwrap(), SliceSize::new(64).unwrap()];
        let caps = [1024, 4096, 1 << 20];
        let out = cmd_sweep(&input, &opts(), &sizes, &caps);
        assert!(out.error.is_none());
        let order: Vec<(u32, u64)> = out
            .reports
            .iter()
            .map(|r| (r.config.slice_size, r.config.capacity_bytes))
            .collect();
        assert_eq!(
            order,
            [
                (16, 1024),
                (16, 4096),
                (16, 1 << 20),
                (64, 1024),
                (64, 4096),
                (64, 1 << 20)
            ]
        );
        let tc = oracle_edge_intersection(&input.graph);
        assert!(out.reports.iter().all(|r| r.triangle_count == Some(tc)));
    }

    #[test]
    fn sweep_keeps_partial_results() {
        let input = load_input("complete:10", RelabelMode::Dense, 0).unwrap();
        // 16 row slots at 64 bits need more than 128 bytes.
        let out = cmd_sweep(
            &input,
            &opts(),
            &[SliceSize::new(64).unwrap()],
            &[64, 1 << 20],
        );
        assert!(out.error.is_some());
        assert_eq!(out.reports.len(), 1);
        assert_eq!(out.reports[0].config.capacity_bytes, 1 << 20);
    }
}
