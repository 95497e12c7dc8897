//! Oriented (strictly upper-triangular) adjacency as bit rows and bit columns.
//!
//! Each line keeps only its nonzero 64-bit words, so the matrix costs
//! `O(|E|)` memory while still behaving as `n` bit vectors of length `n`.

use std::fmt;

use crate::error::{try_reserve, Error, Result};
use crate::graph::{Graph, VertexId};

/// Word index within a line and the 64 bits it holds; bit `t` of word `w`
/// is position `64 * w + t`.
pub type Word = (u32, u64);

/// A bit vector of length `len` stored as its nonzero words.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BitLine {
    len: usize,
    words: Vec<Word>,
}

impl BitLine {
    pub fn zeros(len: usize) -> Self {
        BitLine {
            len,
            words: Vec::new(),
        }
    }

    /// Builds a line from set positions (any order, duplicates allowed).
    pub fn from_positions<I>(len: usize, positions: I) -> Result<Self>
    where
        I: IntoIterator<Item = usize>,
    {
        let mut pos: Vec<usize> = positions.into_iter().collect();
        if let Some(&bad) = pos.iter().find(|&&p| p >= len) {
            return Err(Error::Contract(format!(
                "bit position {bad} out of range for length {len}"
            )));
        }
        pos.sort_unstable();
        pos.dedup();
        Ok(BitLine {
            len,
            words: pack_positions(pos.into_iter()),
        })
    }

    /// Parses a `0`/`1` string; the leftmost character is position 0.
    pub fn parse(bits: &str) -> Result<Self> {
        let mut positions = Vec::new();
        for (t, c) in bits.chars().enumerate() {
            match c {
                '1' => positions.push(t),
                '0' => {}
                other => return Err(Error::Contract(format!("invalid bit character `{other}`"))),
            }
        }
        BitLine::from_positions(bits.chars().count(), positions)
    }

    pub(crate) fn from_words(len: usize, words: Vec<Word>) -> Self {
        BitLine { len, words }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn get(&self, t: usize) -> bool {
        word_bit(&self.words, t)
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|&(_, w)| w.count_ones() as u64).sum()
    }

    pub fn positions(&self) -> impl Iterator<Item = usize> + '_ {
        word_positions(&self.words)
    }
}

impl fmt::Display for BitLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in 0..self.len {
            f.write_str(if self.get(t) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Strictly upper-triangular bit matrix with materialized row and column views.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    row_words: Vec<Word>,
    col_ptr: Vec<usize>,
    col_words: Vec<Word>,
}

/// Builds the oriented adjacency `A[i][j] = 1` iff `{i, j}` is an edge and `i < j`.
pub fn to_bitmatrix(g: &Graph) -> Result<BitMatrix> {
    // Graph edges are already canonical (i < j), sorted and unique.
    BitMatrix::from_sorted_oriented(g.num_vertices(), g.edges())
}

impl BitMatrix {
    /// Builds a matrix from oriented entries `(i, j)`; every entry needs `i < j < n`.
    pub fn from_oriented_edges<I>(n: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (VertexId, VertexId)>,
    {
        let mut edges: Vec<(VertexId, VertexId)> = Vec::new();
        for (i, j) in entries {
            if i >= j {
                return Err(Error::Contract(format!(
                    "entry ({i}, {j}) is not strictly upper-triangular"
                )));
            }
            if j as usize >= n {
                return Err(Error::Contract(format!(
                    "entry ({i}, {j}) out of range for n = {n}"
                )));
            }
            edges.push((i, j));
        }
        edges.sort_unstable();
        edges.dedup();
        BitMatrix::from_sorted_oriented(n, &edges)
    }

    fn from_sorted_oriented(n: usize, edges: &[(VertexId, VertexId)]) -> Result<Self> {
        let (row_ptr, row_words) = pack_lines(n, edges.iter().copied())?;

        let mut transposed = Vec::new();
        try_reserve(&mut transposed, edges.len(), "column view")?;
        transposed.extend(edges.iter().map(|&(i, j)| (j, i)));
        transposed.sort_unstable();
        let (col_ptr, col_words) = pack_lines(n, transposed.into_iter())?;

        Ok(BitMatrix {
            n,
            row_ptr,
            row_words,
            col_ptr,
            col_words,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        i < self.n && word_bit(self.row_words(i), j)
    }

    /// Nonzero words of row `R_i`.
    pub fn row_words(&self, i: usize) -> &[Word] {
        &self.row_words[self.row_ptr[i]..self.row_ptr[i + 1]]
    }

    /// Nonzero words of column `C_j` (bit `i` set iff `A[i][j] = 1`).
    pub fn col_words(&self, j: usize) -> &[Word] {
        &self.col_words[self.col_ptr[j]..self.col_ptr[j + 1]]
    }

    pub fn row(&self, i: usize) -> BitLine {
        BitLine::from_words(self.n, self.row_words(i).to_vec())
    }

    pub fn col(&self, j: usize) -> BitLine {
        BitLine::from_words(self.n, self.col_words(j).to_vec())
    }

    /// Number of set entries, equal to `|E|` for a matrix built from a graph.
    pub fn count_ones(&self) -> u64 {
        self.row_words
            .iter()
            .map(|&(_, w)| w.count_ones() as u64)
            .sum()
    }

    /// Set entries `(i, j)` in row-major order.
    pub fn oriented_edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        (0..self.n).flat_map(move |i| {
            word_positions(self.row_words(i)).map(move |j| (i as VertexId, j as VertexId))
        })
    }
}

/// Packs `(line, position)` pairs, sorted by line then position, into CSR words.
fn pack_lines<I>(n: usize, entries: I) -> Result<(Vec<usize>, Vec<Word>)>
where
    I: Iterator<Item = (VertexId, VertexId)>,
{
    let mut ptr = Vec::new();
    try_reserve(&mut ptr, n + 1, "line offsets")?;
    ptr.push(0);
    let mut words: Vec<Word> = Vec::new();
    let mut current_line = 0usize;
    for (line, pos) in entries {
        let line = line as usize;
        while current_line < line {
            ptr.push(words.len());
            current_line += 1;
        }
        let w = pos / 64;
        let bit = 1u64 << (pos % 64);
        let line_started = words.len() > ptr[current_line];
        match words.last_mut() {
            Some((last_w, bits)) if line_started && *last_w == w => *bits |= bit,
            _ => {
                if words.len() == words.capacity() {
                    let grow = words.len().max(1024);
                    try_reserve(&mut words, grow, "line words")?;
                }
                words.push((w, bit));
            }
        }
    }
    while current_line < n {
        ptr.push(words.len());
        current_line += 1;
    }
    Ok((ptr, words))
}

fn pack_positions(positions: impl Iterator<Item = usize>) -> Vec<Word> {
    let mut words: Vec<Word> = Vec::new();
    for p in positions {
        let w = (p / 64) as u32;
        let bit = 1u64 << (p % 64);
        match words.last_mut() {
            Some((last, bits)) if *last == w => *bits |= bit,
            _ => words.push((w, bit)),
        }
    }
    words
}

fn word_bit(words: &[Word], t: usize) -> bool {
    let w = (t / 64) as u32;
    words
        .binary_search_by_key(&w, |&(idx, _)| idx)
        .map(|pos| words[pos].1 >> (t % 64) & 1 == 1)
        .unwrap_or(false)
}

fn word_positions(words: &[Word]) -> impl Iterator<Item = usize> + '_ {
    words.iter().flat_map(|&(w, bits)| {
        let base = w as usize * 64;
        (0..64)
            .filter(move |t| bits >> t & 1 == 1)
            .map(move |t| base + t)
    })
}
