//! Computational memory array simulator.
//!
//! The array holds a row region (slices of the row being processed, overwritten
//! row by row) and a column region managed with LRU replacement at slice
//! granularity. The driver walks oriented edges row by row and, for each valid
//! slice pair, requests the column slice and issues one in-array AND whose
//! sensed result is counted by the 8-bit lookup-table bit counter.

mod config;
mod cost;
mod lru;
mod stats;

pub use config::{ArrayConfig, ReplacementPolicy, MIB};
pub use cost::{estimate_cost, CostModel, OpCost, OP_NAMES};
pub use stats::{DerivedRatios, SimStats};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::VertexId;
use crate::slicing::{CompressedGraph, LineKind, Payload, SliceEntry, SliceKey};
use crate::tc::{for_each_pair, BitCounter, TcResult};

use lru::LruSlots;

/// Outcome of a column slice request.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Access {
    Hit,
    Miss { evicted: Option<SliceKey> },
}

/// One simulator event, recorded when tracing is enabled.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum TraceEvent {
    RowLoad {
        row: VertexId,
        slices: usize,
        overwrite: bool,
    },
    ColumnRequest {
        key: SliceKey,
        access: Access,
    },
    And {
        row: SliceKey,
        col: SliceKey,
        row_payload: Payload,
        col_payload: Payload,
        ones: u64,
    },
}

#[derive(Debug, Clone)]
struct ResidentRow {
    index: VertexId,
    slices: Vec<SliceEntry>,
}

pub struct Simulator {
    cfg: ArrayConfig,
    costs: CostModel,
    row: Option<ResidentRow>,
    last_row: Option<VertexId>,
    columns: LruSlots<(VertexId, u32)>,
    stats: SimStats,
    trace: Option<Vec<TraceEvent>>,
}

impl Simulator {
    pub fn new(cfg: ArrayConfig, costs: CostModel) -> Result<Self> {
        cfg.validate()?;
        costs.validate()?;
        let column_slots = usize::try_from(cfg.column_slots())
            .map_err(|_| Error::Config("column region too large".into()))?;
        Ok(Simulator {
            cfg,
            costs,
            row: None,
            last_row: None,
            columns: LruSlots::new(column_slots),
            stats: SimStats::default(),
            trace: None,
        })
    }

    /// Records every event; see [`trace`](Self::trace).
    pub fn with_trace(mut self) -> Self {
        self.trace = Some(Vec::new());
        self
    }

    pub fn config(&self) -> &ArrayConfig {
        &self.cfg
    }

    pub fn stats(&self) -> &SimStats {
        &self.stats
    }

    pub fn trace(&self) -> Option<&[TraceEvent]> {
        self.trace.as_deref()
    }

    pub fn total_slots(&self) -> u64 {
        self.cfg.total_slots()
    }

    /// Resident column slices, most recently used first.
    pub fn resident_columns(&self) -> Vec<SliceKey> {
        self.columns
            .order()
            .into_iter()
            .map(|(j, k)| SliceKey::column(j, k))
            .collect()
    }

    pub fn resident_row(&self) -> Option<VertexId> {
        self.row.as_ref().map(|r| r.index)
    }

    /// Writes the valid slices of row `i` over the previous row.
    ///
    /// Rows must arrive in ascending order, each at most once. A row with no
    /// valid slices writes nothing and leaves the array untouched.
    pub fn load_row_slices(&mut self, i: VertexId, slices: &[SliceEntry]) -> Result<()> {
        if slices.len() > self.cfg.row_region_slots {
            return Err(Error::Contract(format!(
                "row {i} has {} valid slices but the row region holds {}",
                slices.len(),
                self.cfg.row_region_slots
            )));
        }
        self.install_row(i, slices, false)
    }

    fn install_row(
        &mut self,
        i: VertexId,
        slices: &[SliceEntry],
        continuation: bool,
    ) -> Result<()> {
        if continuation {
            if self.last_row != Some(i) {
                return Err(Error::Contract(format!(
                    "row {i} continued before it started"
                )));
            }
        } else if self.last_row.is_some_and(|last| i <= last) {
            return Err(Error::Contract(format!(
                "row {i} loaded after row {}",
                self.last_row.unwrap_or_default()
            )));
        }
        self.last_row = Some(i);
        if slices.is_empty() {
            return Ok(());
        }
        let overwrite = self.row.is_some();
        if overwrite {
            self.stats.row_overwrites += 1;
        }
        let n = slices.len() as u64;
        self.stats.writes += n;
        self.stats.row_writes += n;
        self.row = Some(ResidentRow {
            index: i,
            slices: slices.to_vec(),
        });
        self.record(|| TraceEvent::RowLoad {
            row: i,
            slices: slices.len(),
            overwrite,
        });
        self.accrue();
        Ok(())
    }

    /// Makes column slice `(j, k)` resident, reusing it when already loaded.
    pub fn request_column_slice(&mut self, j: VertexId, k: u32, payload: Payload) -> Access {
        let access = if self.columns.touch(&(j, k)).is_some() {
            self.stats.col_hits += 1;
            self.stats.buffer_accesses += 1;
            Access::Hit
        } else {
            self.stats.col_misses += 1;
            let evicted = self.columns.insert((j, k), payload);
            if evicted.is_some() {
                self.stats.evictions += 1;
            }
            self.stats.writes += 1;
            self.stats.col_writes += 1;
            Access::Miss {
                evicted: evicted.map(|(ej, ek)| SliceKey::column(ej, ek)),
            }
        };
        self.record(|| TraceEvent::ColumnRequest {
            key: SliceKey::column(j, k),
            access,
        });
        self.accrue();
        access
    }

    /// ANDs two resident, aligned slices and counts the result.
    pub fn compute_and(&mut self, row: SliceKey, col: SliceKey) -> Result<u64> {
        if row.line != LineKind::Row || col.line != LineKind::Column || row.k != col.k {
            return Err(Error::Contract(format!(
                "AND operands {row} and {col} are not an aligned row/column pair"
            )));
        }
        let row_payload = self
            .row
            .as_ref()
            .filter(|r| r.index == row.index)
            .and_then(|r| {
                r.slices
                    .binary_search_by_key(&row.k, |e| e.k)
                    .ok()
                    .map(|p| r.slices[p].payload)
            })
            .ok_or_else(|| Error::Contract(format!("row slice {row} is not resident")))?;
        let col_payload = self
            .columns
            .peek(&(col.index, col.k))
            .ok_or_else(|| Error::Contract(format!("column slice {col} is not resident")))?;

        let width = self.cfg.slice_size;
        let count = BitCounter.count_payload(row_payload & col_payload, width);
        self.stats.and_ops += 1;
        self.stats.reads += 1;
        self.stats.lut_accesses += count.lut_accesses;
        self.stats.triangle_count += count.ones;
        self.record(|| TraceEvent::And {
            row,
            col,
            row_payload,
            col_payload,
            ones: count.ones,
        });
        self.accrue();
        Ok(count.ones)
    }

    /// Runs the whole compressed graph through the array.
    pub fn run(&mut self, cg: &CompressedGraph) -> Result<TcResult> {
        if cg.slice_size() != self.cfg.slice_size {
            return Err(Error::Config(format!(
                "compressed graph uses {}-bit slices but the array is configured for {}",
                cg.slice_size(),
                self.cfg.slice_size
            )));
        }
        let start = self.stats.triangle_count;
        let region = self.cfg.row_region_slots;
        for row_edges in cg.edges().chunk_by(|a, b| a.0 == b.0) {
            let i = row_edges[0].0;
            let slices = cg.row_slices(i as usize);
            if slices.len() > region {
                self.stats.row_spills += 1;
            }
            for (chunk_no, chunk) in slices.chunks(region.max(1)).enumerate() {
                self.install_row(i, chunk, chunk_no > 0)?;
                for &(_, j) in row_edges {
                    let mut pairs = Vec::new();
                    for_each_pair(chunk, cg.col_slices(j as usize), |k, _, c| {
                        pairs.push((k, c))
                    });
                    for (k, col_payload) in pairs {
                        self.request_column_slice(j, k, col_payload);
                        self.compute_and(SliceKey::row(i, k), SliceKey::column(j, k))?;
                    }
                }
            }
        }
        Ok(TcResult {
            triangle_count: self.stats.triangle_count - start,
            per_edge_counts: None,
            and_ops: self.stats.and_ops,
            lut_accesses: self.stats.lut_accesses,
        })
    }

    pub fn into_stats(self) -> SimStats {
        self.stats
    }

    fn accrue(&mut self) {
        let (latency, energy) = estimate_cost(&self.stats, &self.costs);
        self.stats.total_latency = latency;
        self.stats.total_energy = energy;
    }

    fn record<F: FnOnce() -> TraceEvent>(&mut self, event: F) {
        if let Some(trace) = self.trace.as_mut() {
            trace.push(event());
        }
    }
}

/// Counts triangles of `cg` on a fresh simulated array.
pub fn run_tcim(
    cg: &CompressedGraph,
    cfg: ArrayConfig,
    costs: CostModel,
) -> Result<(TcResult, SimStats)> {
    let mut sim = Simulator::new(cfg, costs)?;
    let result = sim.run(cg)?;
    Ok((result, sim.into_stats()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitmatrix::to_bitmatrix;
    use crate::graph::{parse_edge_list, Graph, RelabelMode};
    use crate::slicing::{compress, SliceSize};

    fn diamond_cg(bits: u32) -> CompressedGraph {
        let g = parse_edge_list("0 1\n0 2\n1 2\n1 3\n2 3".as_bytes(), RelabelMode::Dense).unwrap();
        compress(&to_bitmatrix(&g).unwrap(), SliceSize::new(bits).unwrap())
    }

    fn cfg(bits: u32, capacity_bytes: u64, row_region_slots: usize) -> ArrayConfig {
        ArrayConfig {
            capacity_bytes,
            slice_size: SliceSize::new(bits).unwrap(),
            row_region_slots,
            replacement_policy: ReplacementPolicy::Lru,
        }
    }

    #[test]
    fn fresh_simulator_is_zeroed() {
        let sim = Simulator::new(ArrayConfig::default(), CostModel::default()).unwrap();
        assert_eq!(sim.total_slots(), 2_097_152);
        assert_eq!(*sim.stats(), SimStats::default());
        assert!(sim.resident_columns().is_empty());
    }

    #[test]
    fn invalid_config() {
        assert!(matches!(
            Simulator::new(cfg(64, 8, 1), CostModel::default()),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn diamond_hits_and_misses() {
        let (r, stats) = run_tcim(&diamond_cg(4), cfg(4, 1024, 4), CostModel::default()).unwrap();
        assert_eq!(r.triangle_count, 2);
        assert_eq!(stats.triangle_count, 2);
        assert_eq!(stats.col_misses, 3);
        assert_eq!(stats.col_hits, 2);
        assert_eq!(stats.evictions, 0);
        assert_eq!(stats.row_writes, 3);
        assert_eq!(stats.row_overwrites, 2);
        assert_eq!(stats.writes, 6);
        assert_eq!(stats.and_ops, 5);
        assert_eq!(stats.lut_accesses, 5);
        assert_eq!(stats.buffer_accesses, 2);
    }

    #[test]
    fn diamond_request_sequence() {
        let mut sim = Simulator::new(cfg(4, 1024, 4), CostModel::default())
            .unwrap()
            .with_trace();
        sim.run(&diamond_cg(4)).unwrap();
        let requests: Vec<(u32, bool)> = sim
            .trace()
            .unwrap()
            .iter()
            .filter_map(|e| match e {
                TraceEvent::ColumnRequest { key, access } => {
                    Some((key.index, *access == Access::Hit))
                }
                _ => None,
            })
            .collect();
        assert_eq!(
            requests,
            vec![(1, false), (2, false), (2, true), (3, false), (3, true)]
        );
    }

    #[test]
    fn row_load_rules() {
        let mut sim = Simulator::new(cfg(64, 1024, 4), CostModel::default()).unwrap();
        let three = [
            SliceEntry { k: 0, payload: 1 },
            SliceEntry { k: 2, payload: 4 },
            SliceEntry { k: 5, payload: 8 },
        ];
        sim.load_row_slices(0, &three).unwrap();
        assert_eq!(sim.stats().writes, 3);
        sim.load_row_slices(1, &[]).unwrap();
        assert_eq!(sim.stats().writes, 3);
        assert_eq!(sim.resident_row(), Some(0));
        sim.load_row_slices(2, &three[..1]).unwrap();
        assert_eq!(sim.stats().row_overwrites, 1);
        assert_eq!(sim.stats().evictions, 0);
        assert!(sim.load_row_slices(2, &three).is_err());
        assert!(sim.load_row_slices(1, &three).is_err());

        let too_many: Vec<SliceEntry> = (0..5).map(|k| SliceEntry { k, payload: 1 }).collect();
        assert!(sim.load_row_slices(9, &too_many).is_err());
    }

    #[test]
    fn lru_sequence_a_b_c_a() {
        // Two column slots: 3 slots total minus one row slot, 64-bit slices.
        let mut sim = Simulator::new(cfg(64, 24, 1), CostModel::default()).unwrap();
        let a = sim.request_column_slice(1, 0, 1);
        let b = sim.request_column_slice(2, 0, 1);
        let c = sim.request_column_slice(3, 0, 1);
        let a2 = sim.request_column_slice(1, 0, 1);
        assert_eq!(a, Access::Miss { evicted: None });
        assert_eq!(b, Access::Miss { evicted: None });
        assert_eq!(
            c,
            Access::Miss {
                evicted: Some(SliceKey::column(1, 0))
            }
        );
        assert_eq!(
            a2,
            Access::Miss {
                evicted: Some(SliceKey::column(2, 0))
            }
        );
        assert_eq!(sim.stats().col_hits, 0);
        assert_eq!(sim.stats().col_misses, 4);
        assert_eq!(sim.stats().evictions, 2);
    }

    #[test]
    fn compute_and_requires_residency() {
        let mut sim = Simulator::new(cfg(4, 1024, 4), CostModel::default()).unwrap();
        sim.load_row_slices(
            0,
            &[SliceEntry {
                k: 0,
                payload: 0b0110,
            }],
        )
        .unwrap();
        let err = sim.compute_and(SliceKey::row(0, 0), SliceKey::column(2, 0));
        assert!(matches!(err, Err(Error::Contract(_))));
        sim.request_column_slice(2, 0, 0b0011);
        assert_eq!(
            sim.compute_and(SliceKey::row(0, 0), SliceKey::column(2, 0))
                .unwrap(),
            1
        );
        assert!(sim
            .compute_and(SliceKey::row(1, 0), SliceKey::column(2, 0))
            .is_err());
        assert!(sim
            .compute_and(SliceKey::row(0, 1), SliceKey::column(2, 1))
            .is_err());
        assert!(sim
            .compute_and(SliceKey::column(0, 0), SliceKey::column(2, 0))
            .is_err());
        assert_eq!(sim.stats().and_ops, 1);
    }

    #[test]
    fn compute_and_counts_lookups() {
        let mut sim = Simulator::new(cfg(64, 1024, 4), CostModel::default()).unwrap();
        sim.load_row_slices(
            0,
            &[SliceEntry {
                k: 3,
                payload: 0xF0,
            }],
        )
        .unwrap();
        sim.request_column_slice(9, 3, 0x0F);
        assert_eq!(
            sim.compute_and(SliceKey::row(0, 3), SliceKey::column(9, 3))
                .unwrap(),
            0
        );
        assert_eq!(sim.stats().lut_accesses, 8);
        assert_eq!(sim.stats().and_ops, 1);
    }

    #[test]
    fn slice_size_mismatch() {
        let err = run_tcim(&diamond_cg(8), cfg(4, 1024, 4), CostModel::default());
        assert!(matches!(err, Err(Error::Config(_))));
    }

    #[test]
    fn empty_graph_leaves_counters_zero() {
        let m = to_bitmatrix(&Graph::empty(7)).unwrap();
        let cg = compress(&m, SliceSize::default());
        let (r, stats) = run_tcim(&cg, ArrayConfig::default(), CostModel::default()).unwrap();
        assert_eq!(r.triangle_count, 0);
        assert_eq!(stats, SimStats::default());
    }

    #[test]
    fn row_spill_keeps_count() {
        let g = Graph::erdos_renyi(64, 0.6, 1);
        let cg = compress(&to_bitmatrix(&g).unwrap(), SliceSize::new(4).unwrap());
        let expected = crate::tc::count_triangles_bitwise(&cg).triangle_count;
        let (r, stats) = run_tcim(&cg, cfg(4, 64, 2), CostModel::default()).unwrap();
        assert_eq!(r.triangle_count, expected);
        assert!(stats.row_spills > 0);
        assert_eq!(stats.row_writes as usize, cg.num_row_slices());
    }

    #[test]
    fn accrued_cost_matches_estimate() {
        let g = Graph::erdos_renyi(40, 0.3, 9);
        let cg = compress(&to_bitmatrix(&g).unwrap(), SliceSize::new(8).unwrap());
        let costs = CostModel {
            slice_write: OpCost::new(3.0, 0.5),
            and_compute: OpCost::new(0.25, 2.0),
            ..CostModel::default()
        };
        let (_, stats) = run_tcim(&cg, cfg(8, 64, 4), costs).unwrap();
        assert_eq!(
            (stats.total_latency, stats.total_energy),
            estimate_cost(&stats, &costs)
        );
        assert_eq!(stats.writes, stats.row_writes + stats.col_writes);
    }
}
