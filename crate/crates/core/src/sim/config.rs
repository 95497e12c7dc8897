use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::slicing::SliceSize;

pub const MIB: u64 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReplacementPolicy {
    #[default]
    Lru,
}

/// Capacity and layout of the simulated computational array.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrayConfig {
    pub capacity_bytes: u64,
    pub slice_size: SliceSize,
    /// Slots reserved for the slices of the row being processed.
    pub row_region_slots: usize,
    pub replacement_policy: ReplacementPolicy,
}

impl Default for ArrayConfig {
    fn default() -> Self {
        ArrayConfig {
            capacity_bytes: 16 * MIB,
            slice_size: SliceSize::default(),
            row_region_slots: 1024,
            replacement_policy: ReplacementPolicy::Lru,
        }
    }
}

impl ArrayConfig {
    pub fn with_capacity(capacity_bytes: u64) -> Self {
        ArrayConfig {
            capacity_bytes,
            ..ArrayConfig::default()
        }
    }

    /// Slots of `|S|` bits that fit in the array.
    pub fn total_slots(&self) -> u64 {
        self.capacity_bytes.saturating_mul(8) / self.slice_size.bits() as u64
    }

    /// Slots left for column slices after the row region.
    pub fn column_slots(&self) -> u64 {
        self.total_slots()
            .saturating_sub(self.row_region_slots as u64)
    }

    pub fn validate(&self) -> Result<()> {
        if self.capacity_bytes.checked_mul(8).is_none() {
            return Err(Error::Config(format!(
                "capacity {} bytes is too large",
                self.capacity_bytes
            )));
        }
        if self.row_region_slots == 0 {
            return Err(Error::Config("row region needs at least one slot".into()));
        }
        if self.total_slots() < self.row_region_slots as u64 + 1 {
            return Err(Error::Config(format!(
                "capacity of {} bytes holds {} slices of {} bits; need {} row slots plus at least one column slot",
                self.capacity_bytes,
                self.total_slots(),
                self.slice_size,
                self.row_region_slots
            )));
        }
        Ok(())
    }
}
