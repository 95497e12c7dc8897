//! Triangle counting with AND + BitCount over oriented adjacency slices.
//!
//! For every set entry `A[i][j]` (`i < j`) the engine ANDs row `R_i` with
//! column `C_j` and counts the result. Bit `k` survives iff `i < k < j` and
//! both `{i, k}` and `{k, j}` are edges, so every triangle is counted once,
//! at its (smallest, largest) edge, via its middle vertex.

mod bitcount;
mod oracle;

pub use bitcount::{and_bitcount, bitcount, BitCount, BitCounter};
pub use oracle::{
    oracle_edge_intersection, oracle_trace_a3, oracle_trace_a3_with_limit, DENSE_ORACLE_LIMIT,
};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bitmatrix::{BitMatrix, Word};
use crate::graph::VertexId;
use crate::slicing::{CompressedGraph, SliceEntry};

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TcResult {
    pub triangle_count: u64,
    /// `((i, j), triangles closed through edge (i, j))` in row-major order.
    pub per_edge_counts: Option<Vec<((VertexId, VertexId), u64)>>,
    /// Slice pairs ANDed.
    pub and_ops: u64,
    pub lut_accesses: u64,
}

/// Work done for one edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EdgeWork {
    pub triangles: u64,
    pub and_ops: u64,
    pub lut_accesses: u64,
}

impl std::ops::Add for EdgeWork {
    type Output = EdgeWork;

    fn add(self, rhs: EdgeWork) -> EdgeWork {
        EdgeWork {
            triangles: self.triangles + rhs.triangles,
            and_ops: self.and_ops + rhs.and_ops,
            lut_accesses: self.lut_accesses + rhs.lut_accesses,
        }
    }
}

/// Counts triangles over the valid slice pairs of a compressed graph.
pub fn count_triangles_bitwise(cg: &CompressedGraph) -> TcResult {
    count_compressed(cg, false)
}

/// As [`count_triangles_bitwise`], also recording each edge's contribution.
pub fn count_triangles_bitwise_per_edge(cg: &CompressedGraph) -> TcResult {
    count_compressed(cg, true)
}

/// Contribution of the oriented edge `(i, j)`: ANDs each aligned pair
/// `(R_i S_k, C_j S_k)` where both slices are valid.
pub fn edge_contribution(cg: &CompressedGraph, i: VertexId, j: VertexId) -> EdgeWork {
    let width = cg.slice_size();
    let counter = BitCounter;
    let mut work = EdgeWork::default();
    for_each_pair(
        cg.row_slices(i as usize),
        cg.col_slices(j as usize),
        |_, r, c| {
            let count = counter.count_payload(r & c, width);
            work.triangles += count.ones;
            work.lut_accesses += count.lut_accesses;
            work.and_ops += 1;
        },
    );
    work
}

fn count_compressed(cg: &CompressedGraph, per_edge: bool) -> TcResult {
    let edges = cg.edges();
    if per_edge {
        let works: Vec<EdgeWork> = edges
            .par_iter()
            .map(|&(i, j)| edge_contribution(cg, i, j))
            .collect();
        let total = works
            .iter()
            .copied()
            .fold(EdgeWork::default(), |a, b| a + b);
        TcResult {
            triangle_count: total.triangles,
            per_edge_counts: Some(
                edges
                    .iter()
                    .zip(&works)
                    .map(|(&e, w)| (e, w.triangles))
                    .collect(),
            ),
            and_ops: total.and_ops,
            lut_accesses: total.lut_accesses,
        }
    } else {
        let total = edges
            .par_iter()
            .map(|&(i, j)| edge_contribution(cg, i, j))
            .reduce(EdgeWork::default, |a, b| a + b);
        TcResult {
            triangle_count: total.triangles,
            per_edge_counts: None,
            and_ops: total.and_ops,
            lut_accesses: total.lut_accesses,
        }
    }
}

/// Counts triangles directly on the uncompressed matrix, one AND per
/// aligned pair of nonzero 64-bit words.
pub fn count_triangles_matrix(m: &BitMatrix) -> TcResult {
    let counter = BitCounter;
    let total = (0..m.n())
        .into_par_iter()
        .map(|i| {
            let row = m.row_words(i);
            let mut work = EdgeWork::default();
            for j in row_positions(row) {
                merge_words(row, m.col_words(j), |a, b| {
                    work.triangles += counter.count_word(a & b);
                    work.lut_accesses += 8;
                    work.and_ops += 1;
                });
            }
            work
        })
        .reduce(EdgeWork::default, |a, b| a + b);
    TcResult {
        triangle_count: total.triangles,
        per_edge_counts: None,
        and_ops: total.and_ops,
        lut_accesses: total.lut_accesses,
    }
}

/// Calls `f` for every `k` present in both sorted slice lists.
pub(crate) fn for_each_pair<F>(row: &[SliceEntry], col: &[SliceEntry], mut f: F)
where
    F: FnMut(u32, u128, u128),
{
    let (mut a, mut b) = (0, 0);
    while a < row.len() && b < col.len() {
        match row[a].k.cmp(&col[b].k) {
            std::cmp::Ordering::Less => a += 1,
            std::cmp::Ordering::Greater => b += 1,
            std::cmp::Ordering::Equal => {
                f(row[a].k, row[a].payload, col[b].payload);
                a += 1;
                b += 1;
            }
        }
    }
}

fn merge_words<F: FnMut(u64, u64)>(x: &[Word], y: &[Word], mut f: F) {
    let (mut a, mut b) = (0, 0);
    while a < x.len() && b < y.len() {
        match x[a].0.cmp(&y[b].0) {
            std::cmp::Ordering::Less => a += 1,
            std::cmp::Ordering::Greater => b += 1,
            std::cmp::Ordering::Equal => {
                f(x[a].1, y[b].1);
                a += 1;
                b += 1;
            }
        }
    }
}

fn row_positions(words: &[Word]) -> impl Iterator<Item = usize> + '_ {
    words.iter().flat_map(|&(w, bits)| {
        let mut rest = bits;
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let t = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(w as usize * 64 + t)
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitmatrix::to_bitmatrix;
    use crate::graph::{parse_edge_list, Graph, RelabelMode};
    use crate::slicing::{compress, SliceSize};

    fn diamond() -> Graph {
        parse_edge_list("0 1\n0 2\n1 2\n1 3\n2 3".as_bytes(), RelabelMode::Dense).unwrap()
    }

    fn compressed(g: &Graph, bits: u32) -> CompressedGraph {
        compress(&to_bitmatrix(g).unwrap(), SliceSize::new(bits).unwrap())
    }

    #[test]
    fn diamond_per_edge() {
        let r = count_triangles_bitwise_per_edge(&compressed(&diamond(), 4));
        assert_eq!(r.triangle_count, 2);
        assert_eq!(
            r.per_edge_counts.unwrap(),
            vec![
                ((0, 1), 0),
                ((0, 2), 1),
                ((1, 2), 0),
                ((1, 3), 1),
                ((2, 3), 0)
            ]
        );
        assert_eq!(r.and_ops, 5);
        assert_eq!(r.lut_accesses, 5);
    }

    #[test]
    fn complete_graphs() {
        for (n, expected) in [(3, 1), (4, 4), (5, 10), (20, 1140)] {
            let g = Graph::complete(n);
            assert_eq!(
                count_triangles_bitwise(&compressed(&g, 64)).triangle_count,
                expected
            );
            assert_eq!(
                count_triangles_matrix(&to_bitmatrix(&g).unwrap()).triangle_count,
                expected
            );
        }
    }

    #[test]
    fn matrix_and_compressed_agree() {
        for seed in 0..10 {
            let g = Graph::erdos_renyi(150, 0.15, seed);
            let m = to_bitmatrix(&g).unwrap();
            let a = count_triangles_matrix(&m);
            let b = count_triangles_bitwise(&compress(&m, SliceSize::new(64).unwrap()));
            assert_eq!(a.triangle_count, b.triangle_count);
            assert_eq!(a.and_ops, b.and_ops);
        }
    }

    #[test]
    fn per_edge_sums_to_total() {
        let g = Graph::erdos_renyi(60, 0.3, 5);
        let r = count_triangles_bitwise_per_edge(&compressed(&g, 16));
        let sum: u64 = r
            .per_edge_counts
            .as_ref()
            .unwrap()
            .iter()
            .map(|&(_, c)| c)
            .sum();
        assert_eq!(sum, r.triangle_count);
    }

    #[test]
    fn empty_graph() {
        let r = count_triangles_bitwise(&compressed(&Graph::empty(5), 64));
        assert_eq!(r, TcResult::default());
    }
}
