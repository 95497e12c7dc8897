use serde::{Deserialize, Serialize};

/// Counters collected by the simulator.
///
/// `writes = row_writes + col_writes`. Column requests are split into
/// `col_hits` and `col_misses`; `evictions` counts misses that had to
/// displace a resident column slice.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SimStats {
    pub writes: u64,
    pub row_writes: u64,
    pub col_writes: u64,
    /// AND results sensed out of the array and handed to the bit counter.
    pub reads: u64,
    pub and_ops: u64,
    pub lut_accesses: u64,
    pub buffer_accesses: u64,
    pub col_hits: u64,
    pub col_misses: u64,
    pub evictions: u64,
    /// Row loads that replaced a previously resident row.
    pub row_overwrites: u64,
    /// Rows whose valid slices did not fit the row region at once.
    pub row_spills: u64,
    pub total_latency: f64,
    pub total_energy: f64,
    pub triangle_count: u64,
}

/// Ratios derived from [`SimStats`]; each is zero when its denominator is.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DerivedRatios {
    pub col_requests: u64,
    /// Fraction of column requests served without a write.
    pub hit_ratio: f64,
    pub miss_ratio: f64,
    pub evictions_per_miss: f64,
    pub evictions_per_request: f64,
    /// Share of all slice writes (rows and columns) avoided by column hits.
    pub total_write_savings: f64,
}

impl SimStats {
    pub fn col_requests(&self) -> u64 {
        self.col_hits + self.col_misses
    }

    pub fn hit_ratio(&self) -> f64 {
        ratio(self.col_hits, self.col_requests())
    }

    pub fn derived(&self) -> DerivedRatios {
        let requests = self.col_requests();
        DerivedRatios {
            col_requests: requests,
            hit_ratio: ratio(self.col_hits, requests),
            miss_ratio: ratio(self.col_misses, requests),
            evictions_per_miss: ratio(self.evictions, self.col_misses),
            evictions_per_request: ratio(self.evictions, requests),
            total_write_savings: ratio(self.col_hits, self.writes + self.col_hits),
        }
    }

    /// JSON object with every counter plus a `derived` block.
    pub fn to_json(&self) -> serde_json::Value {
        let mut value = serde_json::to_value(self).expect("stats serialize");
        value["derived"] = serde_json::to_value(self.derived()).expect("ratios serialize");
        value
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}
