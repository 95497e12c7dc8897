//! Run reports and their JSON / CSV encodings.
//!
//! The CSV layout is fixed per [`CSV_SCHEMA_VERSION`]; see `docs/FORMATS.md`.

use std::fmt;
use std::io::Write;

use anyhow::Result;
use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use tcim_core::graph::RelabelMode;
use tcim_core::sim::{DerivedRatios, SimStats};

use crate::units::format_size;

pub const CSV_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// AND + BitCount over valid slice pairs, no array model.
    Bitwise,
    /// Same computation on the simulated computational array.
    Pim,
    /// Dense trace(A^3) / 6.
    OracleMatmul,
    /// Forward-neighbour intersection per edge.
    OracleIntersect,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Bitwise => "bitwise",
            Mode::Pim => "pim",
            Mode::OracleMatmul => "oracle-matmul",
            Mode::OracleIntersect => "oracle-intersect",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceReport {
    pub slice_size: u32,
    /// Valid row slices plus valid column slices.
    pub n_vs: u64,
    pub row_slices: u64,
    pub col_slices: u64,
    pub windows_per_line: u64,
    pub valid_fraction: f64,
    pub compressed_bytes: u64,
    pub compressed_mib: f64,
    /// Slice pairs ANDed; absent when no count was run.
    pub and_ops: Option<u64>,
    /// `and_ops / (|E| * windows_per_line)`.
    pub pair_fraction: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub stats: SimStats,
    pub derived: DerivedRatios,
}

impl SimReport {
    pub fn new(stats: SimStats) -> Self {
        SimReport {
            derived: stats.derived(),
            stats,
        }
    }
}

/// Everything needed to repeat a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub input: String,
    pub slice_size: u32,
    pub capacity_bytes: u64,
    pub row_region_slots: usize,
    pub relabel: RelabelMode,
    pub cost_model: Option<String>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub dataset: String,
    pub num_vertices: u64,
    pub num_edges: u64,
    pub mode: Option<Mode>,
    pub triangle_count: Option<u64>,
    pub slices: SliceReport,
    pub sim: Option<SimReport>,
    pub wall_seconds: f64,
    pub config: ConfigEcho,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Multi-line human-readable summary.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        let mode = self
            .mode
            .map(|m| m.to_string())
            .unwrap_or_else(|| "-".into());
        out.push_str(&format!(
            "{} [{}] {}: n = {}, |E| = {}\n",
            self.command, mode, self.dataset, self.num_vertices, self.num_edges
        ));
        if let Some(tc) = self.triangle_count {
            out.push_str(&format!("  triangles        {tc}\n"));
        }
        let s = &self.slices;
        out.push_str(&format!(
            "  slices           |S| = {}, N_VS = {} ({} row + {} col), valid {:.3}%\n",
            s.slice_size,
            s.n_vs,
            s.row_slices,
            s.col_slices,
            100.0 * s.valid_fraction
        ));
        out.push_str(&format!(
            "  compressed size  {} bytes ({:.3} MiB)\n",
            s.compressed_bytes, s.compressed_mib
        ));
        if let (Some(ops), Some(frac)) = (s.and_ops, s.pair_fraction) {
            out.push_str(&format!(
                "  slice pairs      {ops} ANDs, {:.4}% of all aligned pairs\n",
                100.0 * frac
            ));
        }
        if let Some(sim) = &self.sim {
            let st = &sim.stats;
            let d = &sim.derived;
            out.push_str(&format!(
                "  array            {} capacity, {} row slots\n",
                format_size(self.config.capacity_bytes),
                self.config.row_region_slots
            ));
            out.push_str(&format!(
                "  column requests  {} (hit {:.2}%, miss {:.2}%), evictions {}\n",
                d.col_requests,
                100.0 * d.hit_ratio,
                100.0 * d.miss_ratio,
                st.evictions
            ));
            out.push_str(&format!(
                "  writes           {} ({} row, {} col), reads {}, LUT {}\n",
                st.writes, st.row_writes, st.col_writes, st.reads, st.lut_accesses
            ));
            out.push_str(&format!(
                "  cost             latency {}, energy {}\n",
                st.total_latency, st.total_energy
            ));
        }
        out.push_str(&format!("  wall time        {:.3} s\n", self.wall_seconds));
        out
    }

    /// One row of the sweep table; see [`SWEEP_HEADER`].
    pub fn sweep_line(&self) -> String {
        let (hit, evictions, latency, energy) = match &self.sim {
            Some(s) => (
                format!("{:.4}", s.derived.hit_ratio),
                s.stats.evictions.to_string(),
                s.stats.total_latency.to_string(),
                s.stats.total_energy.to_string(),
            ),
            None => ("-".into(), "-".into(), "-".into(), "-".into()),
        };
        format!(
            "{:>4} {:>10} {:>14} {:>8} {:>12} {:>14} {:>14}",
            self.slices.slice_size,
            format_size(self.config.capacity_bytes),
            self.triangle_count
                .map(|t| t.to_string())
                .unwrap_or_default(),
            hit,
            evictions,
            latency,
            energy
        )
    }
}

pub const SWEEP_HEADER: &str =
    " |S|   capacity      triangles      hit    evictions        latency         energy";

pub const CSV_COLUMNS: [&str; 36] = [
    "schema_version",
    "command",
    "dataset",
    "mode",
    "num_vertices",
    "num_edges",
    "triangle_count",
    "slice_size",
    "n_vs",
    "row_slices",
    "col_slices",
    "valid_fraction",
    "compressed_bytes",
    "compressed_mib",
    "and_ops",
    "pair_fraction",
    "capacity_bytes",
    "row_region_slots",
    "relabel",
    "cost_model",
    "seed",
    "writes",
    "row_writes",
    "col_writes",
    "reads",
    "lut_accesses",
    "buffer_accesses",
    "col_hits",
    "col_misses",
    "evictions",
    "hit_ratio",
    "evictions_per_miss",
    "evictions_per_request",
    "total_latency",
    "total_energy",
    "wall_seconds",
];

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn csv_row(r: &RunReport) -> Vec<String> {
    let s = &r.slices;
    let st = r.sim.as_ref().map(|x| &x.stats);
    let d = r.sim.as_ref().map(|x| &x.derived);
    vec![
        CSV_SCHEMA_VERSION.to_string(),
        r.command.clone(),
        r.dataset.clone(),
        opt(r.mode),
        r.num_vertices.to_string(),
        r.num_edges.to_string(),
        opt(r.triangle_count),
        s.slice_size.to_string(),
        s.n_vs.to_string(),
        s.row_slices.to_string(),
        s.col_slices.to_string(),
        s.valid_fraction.to_string(),
        s.compressed_bytes.to_string(),
        s.compressed_mib.to_string(),
        opt(s.and_ops),
        opt(s.pair_fraction),
        r.config.capacity_bytes.to_string(),
        r.config.row_region_slots.to_string(),
        r.config.relabel.to_string(),
        r.config.cost_model.clone().unwrap_or_default(),
        r.config.seed.to_string(),
        opt(st.map(|x| x.writes)),
        opt(st.map(|x| x.row_writes)),
        opt(st.map(|x| x.col_writes)),
        opt(st.map(|x| x.reads)),
        opt(st.map(|x| x.lut_accesses)),
        opt(st.map(|x| x.buffer_accesses)),
        opt(st.map(|x| x.col_hits)),
        opt(st.map(|x| x.col_misses)),
        opt(st.map(|x| x.evictions)),
        opt(d.map(|x| x.hit_ratio)),
        opt(d.map(|x| x.evictions_per_miss)),
        opt(d.map(|x| x.evictions_per_request)),
        opt(st.map(|x| x.total_latency)),
        opt(st.map(|x| x.total_energy)),
        r.wall_seconds.to_string(),
    ]
}

/// Writes reports in the requested format. A single JSON report is an
/// object; several are an array.
pub fn write_reports<W: Write>(reports: &[RunReport], format: ReportFormat, out: W) -> Result<()> {
    match format {
        ReportFormat::Json => {
            let mut out = out;
            if let [single] = reports {
                serde_json::to_writer_pretty(&mut out, single)?;
            } else {
                serde_json::to_writer_pretty(&mut out, reports)?;
            }
            writeln!(out)?;
        }
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(CSV_COLUMNS)?;
            for r in reports {
                w.write_record(csv_row(r))?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn sample() -> RunReport {
        let stats = SimStats {
            writes: 6,
            row_writes: 3,
            col_writes: 3,
            col_hits: 2,
            col_misses: 3,
            and_ops: 5,
            total_latency: 0.1 + 0.2,
            triangle_count: 2,
            ..SimStats::default()
        };
        RunReport {
            command: "count".into(),
            dataset: "diamond".into(),
            num_vertices: 4,
            num_edges: 5,
            mode: Some(Mode::Pim),
            triangle_count: Some(2),
            slices: SliceReport {
                slice_size: 4,
                n_vs: 6,
                row_slices: 3,
                col_slices: 3,
                windows_per_line: 1,
                valid_fraction: 0.75,
                compressed_bytes: 27,
                compressed_mib: 27.0 / 1048576.0,
                and_ops: Some(5),
                pair_fraction: Some(1.0),
            },
            sim: Some(SimReport::new(stats)),
            wall_seconds: 0.001234,
            config: ConfigEcho {
                input: "diamond.txt".into(),
                slice_size: 4,
                capacity_bytes: 16 << 20,
                row_region_slots: 1024,
                relabel: RelabelMode::Dense,
                cost_model: None,
                seed: 7,
            },
        }
    }

    #[test]
    fn json_round_trip() {
        let r = sample();
        assert_eq!(RunReport::from_json(&r.to_json()).unwrap(), r);
    }

    #[test]
    fn csv_has_fixed_columns() {
        let mut buf = Vec::new();
        write_reports(&[sample(), sample()], ReportFormat::Csv, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], CSV_COLUMNS.join(","));
        assert_eq!(lines[1].split(',').count(), CSV_COLUMNS.len());
        assert!(lines[1].starts_with("1,count,diamond,pim,4,5,2,4,6,"));
    }

    #[test]
    fn json_single_is_object_many_is_array() {
        let mut one = Vec::new();
        write_reports(&[sample()], ReportFormat::Json, &mut one).unwrap();
        assert!(serde_json::from_slice::<serde_json::Value>(&one)
            .unwrap()
            .is_object());
        let mut two = Vec::new();
        write_reports(&[sample(), sample()], ReportFormat::Json, &mut two).unwrap();
        let parsed: Vec<RunReport> = serde_json::from_slice(&two).unwrap();
        assert_eq!(parsed.len(), 2);
    }

    #[test]
    fn summary_mentions_count() {
        let text = sample().summary();
        assert!(text.contains("triangles        2"));
        assert!(text.contains("hit 40.00%"));
    }
}
