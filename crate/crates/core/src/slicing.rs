//! Fixed-width slicing of matrix lines and the valid-slice compressed graph.
//!
//! A line of length `n` is cut into `ceil(n / |S|)` windows of `|S|` bits;
//! window `k` covers positions `k * |S| .. (k + 1) * |S|`. Only windows with
//! at least one set bit ("valid" slices) are kept, each with a 4-byte index
//! and `|S| / 8` bytes of payload.

use std::fmt;
use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bitmatrix::{BitLine, BitMatrix, Word};
use crate::error::{Error, Result};
use crate::graph::VertexId;

/// Slice payload; bit `t` is position `k * |S| + t` on the line. Bits at or
/// above the slice width are always zero.
pub type Payload = u128;

/// Bytes charged per valid slice for its index.
pub const INDEX_BYTES: u64 = 4;

/// Slice width in bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct SliceSize(u32);

impl SliceSize {
    pub const SUPPORTED: [u32; 6] = [4, 8, 16, 32, 64, 128];

    pub const fn default_size() -> Self {
        SliceSize(64)
    }

    pub fn new(bits: u32) -> Result<Self> {
        if Self::SUPPORTED.contains(&bits) {
            Ok(SliceSize(bits))
        } else {
            Err(Error::Config(format!(
                "unsupported slice size {bits}; expected one of {:?}",
                Self::SUPPORTED
            )))
        }
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    /// Bytes one payload occupies on disk and in the array, rounded up.
    pub fn payload_bytes(self) -> usize {
        self.0.div_ceil(8) as usize
    }

    /// 8-bit lookups needed to count one payload.
    pub fn lut_accesses(self) -> u64 {
        self.0.div_ceil(8) as u64
    }

    /// Windows per line of length `n`.
    pub fn windows(self, n: usize) -> usize {
        n.div_ceil(self.0 as usize)
    }

    pub fn mask(self) -> Payload {
        if self.0 == 128 {
            Payload::MAX
        } else {
            (1 << self.0) - 1
        }
    }
}

impl Default for SliceSize {
    fn default() -> Self {
        SliceSize::default_size()
    }
}

impl TryFrom<u32> for SliceSize {
    type Error = Error;

    fn try_from(bits: u32) -> Result<Self> {
        SliceSize::new(bits)
    }
}

impl From<SliceSize> for u32 {
    fn from(s: SliceSize) -> u32 {
        s.0
    }
}

impl fmt::Display for SliceSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Whether a slice comes from a row or a column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LineKind {
    Row,
    Column,
}

/// One stored (valid) slice of a line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SliceEntry {
    pub k: u32,
    pub payload: Payload,
}

/// Address of a slice: `R_i S_k` or `C_j S_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SliceKey {
    pub line: LineKind,
    pub index: VertexId,
    pub k: u32,
}

impl SliceKey {
    pub fn row(index: VertexId, k: u32) -> Self {
        SliceKey {
            line: LineKind::Row,
            index,
            k,
        }
    }

    pub fn column(index: VertexId, k: u32) -> Self {
        SliceKey {
            line: LineKind::Column,
            index,
            k,
        }
    }
}

impl fmt::Display for SliceKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self.line {
            LineKind::Row => 'R',
            LineKind::Column => 'C',
        };
        write!(f, "{c}{}S{}", self.index, self.k)
    }
}

/// A payload tagged with its width.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SlicePayload {
    bits: Payload,
    width: SliceSize,
}

impl SlicePayload {
    pub fn new(bits: Payload, width: SliceSize) -> Result<Self> {
        if bits & !width.mask() != 0 {
            return Err(Error::Contract(format!(
                "payload {bits:#x} does not fit in {width} bits"
            )));
        }
        Ok(SlicePayload { bits, width })
    }

    /// Parses a `0`/`1` string whose length is a supported slice width;
    /// the leftmost character is bit 0.
    pub fn parse(text: &str) -> Result<Self> {
        let width = SliceSize::new(text.len() as u32)?;
        let mut bits: Payload = 0;
        for (t, c) in text.chars().enumerate() {
            match c {
                '1' => bits |= 1 << t,
                '0' => {}
                other => return Err(Error::Contract(format!("invalid bit character `{other}`"))),
            }
        }
        Ok(SlicePayload { bits, width })
    }

    pub fn bits(self) -> Payload {
        self.bits
    }

    pub fn width(self) -> SliceSize {
        self.width
    }
}

impl fmt::Display for SlicePayload {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_payload(self.bits, self.width))
    }
}

/// Renders the low `width` bits of a payload, position 0 first.
pub fn format_payload(payload: Payload, width: SliceSize) -> String {
    (0..width.bits())
        .map(|t| if payload >> t & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Returns the valid slices of `line`, ascending in `k`.
pub fn slice_line(line: &BitLine, slice_size: u32) -> Result<Vec<SliceEntry>> {
    let s = SliceSize::new(slice_size)?;
    Ok(slice_words(line.words(), s))
}

pub(crate) fn slice_words(words: &[Word], s: SliceSize) -> Vec<SliceEntry> {
    let mut out = Vec::new();
    slice_words_into(words, s, &mut out);
    out
}

fn slice_words_into(words: &[Word], s: SliceSize, out: &mut Vec<SliceEntry>) {
    let width = s.bits();
    if width == 128 {
        let mut current: Option<SliceEntry> = None;
        for &(w, bits) in words {
            let k = w / 2;
            let part = (bits as Payload) << (64 * (w % 2));
            match current.as_mut() {
                Some(entry) if entry.k == k => entry.payload |= part,
                _ => {
                    out.extend(current.take());
                    current = Some(SliceEntry { k, payload: part });
                }
            }
        }
        out.extend(current);
    } else {
        let per_word = 64 / width;
        let mask = s.mask() as u64;
        for &(w, bits) in words {
            for c in 0..per_word {
                let chunk = (bits >> (c * width)) & mask;
                if chunk != 0 {
                    out.push(SliceEntry {
                        k: w * per_word + c,
                        payload: chunk as Payload,
                    });
                }
            }
        }
    }
}

/// Valid-slice representation of an oriented bit matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompressedGraph {
    n: usize,
    slice_size: SliceSize,
    row_ptr: Vec<usize>,
    row_slices: Vec<SliceEntry>,
    col_ptr: Vec<usize>,
    col_slices: Vec<SliceEntry>,
    edges: Vec<(VertexId, VertexId)>,
}

/// Slices every row and column of `m` and keeps the valid slices.
pub fn compress(m: &BitMatrix, slice_size: SliceSize) -> CompressedGraph {
    let n = m.n();
    let (row_ptr, row_slices) = slice_all(n, |i| m.row_words(i), slice_size);
    let (col_ptr, col_slices) = slice_all(n, |j| m.col_words(j), slice_size);
    CompressedGraph {
        n,
        slice_size,
        row_ptr,
        row_slices,
        col_ptr,
        col_slices,
        edges: m.oriented_edges().collect(),
    }
}

fn slice_all<'a, F>(n: usize, words: F, s: SliceSize) -> (Vec<usize>, Vec<SliceEntry>)
where
    F: Fn(usize) -> &'a [Word] + Sync,
{
    let per_line: Vec<Vec<SliceEntry>> = (0..n)
        .into_par_iter()
        .map(|i| slice_words(words(i), s))
        .collect();
    let mut ptr = Vec::with_capacity(n + 1);
    ptr.push(0);
    let total = per_line.iter().map(Vec::len).sum();
    let mut flat = Vec::with_capacity(total);
    for line in per_line {
        flat.extend(line);
        ptr.push(flat.len());
    }
    (ptr, flat)
}

/// Bytes needed to hold the compressed graph: `N_VS * (|S| / 8 + 4)`,
/// rounded up to a whole byte for sub-byte slice widths.
pub fn compressed_size(cg: &CompressedGraph) -> u64 {
    size_for(cg.num_valid_slices() as u64, cg.slice_size())
}

pub fn size_for(num_valid_slices: u64, slice_size: SliceSize) -> u64 {
    (num_valid_slices * (slice_size.bits() as u64 + 8 * INDEX_BYTES)).div_ceil(8)
}

/// `N_VS / (2 * n * ceil(n / |S|))`; zero for an empty graph.
pub fn valid_slice_fraction(cg: &CompressedGraph) -> f64 {
    let total = cg.total_windows();
    if total == 0 {
        0.0
    } else {
        cg.num_valid_slices() as f64 / total as f64
    }
}

/// Rebuilds the bit matrix from the stored row slices, checking that the
/// column slices describe the same matrix.
pub fn decompress(cg: &CompressedGraph) -> Result<BitMatrix> {
    let width = cg.slice_size.bits() as usize;
    let mut entries = Vec::new();
    for i in 0..cg.n {
        for e in cg.row_slices(i) {
            for t in 0..width {
                if e.payload >> t & 1 == 1 {
                    entries.push((i as VertexId, (e.k as usize * width + t) as VertexId));
                }
            }
        }
    }
    let m = BitMatrix::from_oriented_edges(cg.n, entries)?;
    let check = compress(&m, cg.slice_size);
    if check.col_ptr != cg.col_ptr || check.col_slices != cg.col_slices {
        return Err(Error::Format(
            "column slices disagree with row slices".to_string(),
        ));
    }
    Ok(m)
}

impl CompressedGraph {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn slice_size(&self) -> SliceSize {
        self.slice_size
    }

    /// Valid slices of `R_i`, ascending in `k`.
    pub fn row_slices(&self, i: usize) -> &[SliceEntry] {
        &self.row_slices[self.row_ptr[i]..self.row_ptr[i + 1]]
    }

    /// Valid slices of `C_j`, ascending in `k`.
    pub fn col_slices(&self, j: usize) -> &[SliceEntry] {
        &self.col_slices[self.col_ptr[j]..self.col_ptr[j + 1]]
    }

    pub fn row_slice(&self, i: usize, k: u32) -> Option<Payload> {
        lookup(self.row_slices(i), k)
    }

    pub fn col_slice(&self, j: usize, k: u32) -> Option<Payload> {
        lookup(self.col_slices(j), k)
    }

    /// Oriented edges `(i, j)`, `i < j`, in row-major order.
    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    pub fn num_row_slices(&self) -> usize {
        self.row_slices.len()
    }

    pub fn num_col_slices(&self) -> usize {
        self.col_slices.len()
    }

    /// `N_VS`: valid row slices plus valid column slices.
    pub fn num_valid_slices(&self) -> usize {
        self.row_slices.len() + self.col_slices.len()
    }

    pub fn windows_per_line(&self) -> usize {
        self.slice_size.windows(self.n)
    }

    /// Row plus column slice windows, valid or not.
    pub fn total_windows(&self) -> u64 {
        2 * self.n as u64 * self.windows_per_line() as u64
    }

    /// Largest number of valid slices in any single row.
    pub fn max_row_slices(&self) -> usize {
        self.row_ptr
            .windows(2)
            .map(|w| w[1] - w[0])
            .max()
            .unwrap_or(0)
    }

    /// Writes the binary format documented in `docs/FORMATS.md`.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(&MAGIC)?;
        w.write_all(&FORMAT_VERSION.to_le_bytes())?;
        w.write_all(&(self.slice_size.bits() as u16).to_le_bytes())?;
        w.write_all(&(self.n as u64).to_le_bytes())?;
        w.write_all(&(self.num_valid_slices() as u64).to_le_bytes())?;
        let nbytes = self.slice_size.payload_bytes();
        for (kind, ptr, slices) in [
            (LineKind::Row, &self.row_ptr, &self.row_slices),
            (LineKind::Column, &self.col_ptr, &self.col_slices),
        ] {
            for line in 0..self.n {
                for e in &slices[ptr[line]..ptr[line + 1]] {
                    w.write_all(&[kind as u8])?;
                    w.write_all(&(line as u32).to_le_bytes())?;
                    w.write_all(&e.k.to_le_bytes())?;
                    w.write_all(&e.payload.to_le_bytes()[..nbytes])?;
                }
            }
        }
        Ok(())
    }

    /// Reads and validates the binary format written by [`write_to`](Self::write_to).
    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if magic != MAGIC {
            return Err(Error::Format("bad magic".to_string()));
        }
        let version = u16::from_le_bytes(read_array(&mut r)?);
        if version != FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported version {version}")));
        }
        let s = SliceSize::new(u16::from_le_bytes(read_array(&mut r)?) as u32)
            .map_err(|e| Error::Format(e.to_string()))?;
        let n = u64::from_le_bytes(read_array(&mut r)?);
        if n > crate::graph::MAX_VERTICES {
            return Err(Error::TooLarge(format!("{n} vertices")));
        }
        let n = n as usize;
        let n_vs = u64::from_le_bytes(read_array(&mut r)?);
        let windows = s.windows(n) as u32;
        let nbytes = s.payload_bytes();

        let mut rows: Vec<(u32, SliceEntry)> = Vec::new();
        let mut cols: Vec<(u32, SliceEntry)> = Vec::new();
        let mut last: Option<(u8, u32, u32)> = None;
        for _ in 0..n_vs {
            let [kind] = read_array::<1, _>(&mut r)?;
            let line = u32::from_le_bytes(read_array(&mut r)?);
            let k = u32::from_le_bytes(read_array(&mut r)?);
            let mut buf = [0u8; 16];
            r.read_exact(&mut buf[..nbytes])?;
            let payload = Payload::from_le_bytes(buf);
            if kind > 1 || line as usize >= n || k >= windows {
                return Err(Error::Format(format!(
                    "record ({kind}, {line}, {k}) out of range"
                )));
            }
            if payload == 0 || payload & !s.mask() != 0 {
                return Err(Error::Format(format!(
                    "record ({kind}, {line}, {k}) has an invalid payload"
                )));
            }
            if last.is_some_and(|prev| prev >= (kind, line, k)) {
                return Err(Error::Format("records out of order".to_string()));
            }
            last = Some((kind, line, k));
            let target = if kind == 0 { &mut rows } else { &mut cols };
            target.push((line, SliceEntry { k, payload }));
        }
        let mut trailing = [0u8; 1];
        if r.read(&mut trailing)? != 0 {
            return Err(Error::Format("trailing bytes after records".to_string()));
        }

        let (row_ptr, row_slices) = unflatten(n, rows);
        let (col_ptr, col_slices) = unflatten(n, cols);
        let mut cg = CompressedGraph {
            n,
            slice_size: s,
            row_ptr,
            row_slices,
            col_ptr,
            col_slices,
            edges: Vec::new(),
        };
        let m = decompress(&cg)?;
        cg.edges = m.oriented_edges().collect();
        Ok(cg)
    }
}

const MAGIC: [u8; 4] = *b"TCSG";
const FORMAT_VERSION: u16 = 1;

fn read_array<const N: usize, R: Read>(r: &mut R) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf)?;
    Ok(buf)
}

fn unflatten(n: usize, entries: Vec<(u32, SliceEntry)>) -> (Vec<usize>, Vec<SliceEntry>) {
    let mut ptr = vec![0usize; n + 1];
    for &(line, _) in &entries {
        ptr[line as usize + 1] += 1;
    }
    for i in 0..n {
        ptr[i + 1] += ptr[i];
    }
    (ptr, entries.into_iter().map(|(_, e)| e).collect())
}

fn lookup(slices: &[SliceEntry], k: u32) -> Option<Payload> {
    slices
        .binary_search_by_key(&k, |e| e.k)
        .ok()
        .map(|pos| slices[pos].payload)
}
