//! Byte-wise population count through a 256-entry lookup table.

use crate::bitmatrix::BitLine;
use crate::error::{Error, Result};
use crate::slicing::{Payload, SlicePayload, SliceSize};

static LUT: [u8; 256] = build_lut();

const fn build_lut() -> [u8; 256] {
    let mut lut = [0u8; 256];
    let mut b = 1;
    while b < 256 {
        lut[b] = (b & 1) as u8 + lut[b >> 1];
        b += 1;
    }
    lut
}

/// Set-bit count plus the number of 8-bit table lookups spent on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BitCount {
    pub ones: u64,
    pub lut_accesses: u64,
}

/// Bit counter that splits its input into bytes and sums table lookups.
#[derive(Debug, Clone, Copy, Default)]
pub struct BitCounter;

impl BitCounter {
    pub fn lut(&self) -> &'static [u8; 256] {
        &LUT
    }

    pub fn count_bytes(&self, bytes: &[u8]) -> BitCount {
        BitCount {
            ones: bytes.iter().map(|&b| LUT[b as usize] as u64).sum(),
            lut_accesses: bytes.len() as u64,
        }
    }

    /// Counts the low `width` bits of a payload (`ceil(width / 8)` lookups).
    pub fn count_payload(&self, payload: Payload, width: SliceSize) -> BitCount {
        let bytes = payload.to_le_bytes();
        self.count_bytes(&bytes[..width.payload_bytes()])
    }

    pub fn count_word(&self, word: u64) -> u64 {
        word.to_le_bytes()
            .iter()
            .map(|&b| LUT[b as usize] as u64)
            .sum()
    }
}

/// Popcount of a whole line; lookups are charged for every byte of its
/// length, zero bytes included.
pub fn bitcount(line: &BitLine) -> BitCount {
    let counter = BitCounter;
    BitCount {
        ones: line
            .words()
            .iter()
            .map(|&(_, w)| counter.count_word(w))
            .sum(),
        lut_accesses: line.len().div_ceil(8) as u64,
    }
}

/// Popcount of `a AND b`; both payloads must have the same width.
pub fn and_bitcount(a: SlicePayload, b: SlicePayload) -> Result<u64> {
    if a.width() != b.width() {
        return Err(Error::Contract(format!(
            "AND of slices with different widths ({} and {})",
            a.width(),
            b.width()
        )));
    }
    Ok(BitCounter
        .count_payload(a.bits() & b.bits(), a.width())
        .ones)
}
