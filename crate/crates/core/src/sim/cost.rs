//! Per-operation (latency, energy) table.
//!
//! Text format, one entry per line: `op_name latency energy`. Blank lines
//! and lines starting with `#` are ignored; omitted operations cost zero.
//! Units are whatever the user calibrates against; the shipped defaults
//! are placeholders (all 1.0).

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::stats::SimStats;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct OpCost {
    pub latency: f64,
    pub energy: f64,
}

impl OpCost {
    pub const fn new(latency: f64, energy: f64) -> Self {
        OpCost { latency, energy }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostModel {
    pub slice_write: OpCost,
    pub slice_read: OpCost,
    /// One simultaneous two-word-line activation plus sensing.
    pub and_compute: OpCost,
    pub lut_access: OpCost,
    pub buffer_access: OpCost,
}

pub const OP_NAMES: [&str; 5] = [
    "slice_write",
    "slice_read",
    "and_compute",
    "lut_access",
    "buffer_access",
];

impl Default for CostModel {
    fn default() -> Self {
        CostModel::uniform(OpCost::new(1.0, 1.0))
    }
}

impl CostModel {
    pub fn uniform(cost: OpCost) -> Self {
        CostModel {
            slice_write: cost,
            slice_read: cost,
            and_compute: cost,
            lut_access: cost,
            buffer_access: cost,
        }
    }

    pub fn zero() -> Self {
        CostModel::uniform(OpCost::default())
    }

    fn entries(&self) -> [(&'static str, OpCost); 5] {
        [
            ("slice_write", self.slice_write),
            ("slice_read", self.slice_read),
            ("and_compute", self.and_compute),
            ("lut_access", self.lut_access),
            ("buffer_access", self.buffer_access),
        ]
    }

    fn entry_mut(&mut self, name: &str) -> Option<&mut OpCost> {
        match name {
            "slice_write" => Some(&mut self.slice_write),
            "slice_read" => Some(&mut self.slice_read),
            "and_compute" => Some(&mut self.and_compute),
            "lut_access" => Some(&mut self.lut_access),
            "buffer_access" => Some(&mut self.buffer_access),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, c) in self.entries() {
            for v in [c.latency, c.energy] {
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::Config(format!(
                        "cost for `{name}` must be finite and non-negative, got {v}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut model = CostModel::zero();
        let mut seen = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_ascii_whitespace().collect();
            let [name, latency, energy] = fields[..] else {
                return Err(Error::parse(line_no, "expected `op_name latency energy`"));
            };
            if seen.contains(&name) {
                return Err(Error::parse(line_no, format!("duplicate entry `{name}`")));
            }
            let number = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| Error::parse(line_no, format!("malformed number `{s}`")))
            };
            let cost = OpCost::new(number(latency)?, number(energy)?);
            let slot = model
                .entry_mut(name)
                .ok_or_else(|| Error::parse(line_no, format!("unknown operation `{name}`")))?;
            *slot = cost;
            seen.push(name);
        }
        model.validate()?;
        Ok(model)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        CostModel::parse(&std::fs::read_to_string(path)?)
    }
}

impl fmt::Display for CostModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, c) in self.entries() {
            writeln!(f, "{name} {} {}", c.latency, c.energy)?;
        }
        Ok(())
    }
}

/// `(latency, energy)` as the counter-weighted sum of operation costs.
pub fn estimate_cost(stats: &SimStats, costs: &CostModel) -> (f64, f64) {
    let terms = [
        (stats.writes, costs.slice_write),
        (stats.reads, costs.slice_read),
        (stats.and_ops, costs.and_compute),
        (stats.lut_accesses, costs.lut_access),
        (stats.buffer_accesses, costs.buffer_access),
    ];
    terms.iter().fold((0.0, 0.0), |(lat, en), &(count, c)| {
        (lat + count as f64 * c.latency, en + count as f64 * c.energy)
    })
}
