//! Reference triangle counts that share no code with the bitwise engine.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Largest vertex count the dense `trace(A^3) / 6` oracle accepts by default.
pub const DENSE_ORACLE_LIMIT: usize = 4096;

/// `trace(A^3) / 6` over the symmetric adjacency matrix.
pub fn oracle_trace_a3(g: &Graph) -> Result<u64> {
    oracle_trace_a3_with_limit(g, DENSE_ORACLE_LIMIT)
}

pub fn oracle_trace_a3_with_limit(g: &Graph, limit: usize) -> Result<u64> {
    let n = g.num_vertices();
    if n > limit {
        return Err(Error::TooLarge(format!(
            "dense trace oracle refuses n = {n} (limit {limit}); use the edge-intersection oracle"
        )));
    }
    // f32 is exact here: every entry of A^2 is an integer no larger than n.
    let mut a = Array2::<f32>::zeros((n, n));
    for &(u, v) in g.edges() {
        a[[u as usize, v as usize]] = 1.0;
        a[[v as usize, u as usize]] = 1.0;
    }
    let a2 = a.dot(&a);
    let mut trace: u64 = 0;
    for i in 0..n {
        for j in 0..n {
            if a[[i, j]] != 0.0 {
                let paths = a2[[j, i]];
                if paths.fract() != 0.0 {
                    return Err(Error::Internal(format!("non-integral A^2 entry {paths}")));
                }
                trace += paths as u64;
            }
        }
    }
    if !trace.is_multiple_of(6) {
        return Err(Error::Internal(format!(
            "trace(A^3) = {trace} is not divisible by 6"
        )));
    }
    Ok(trace / 6)
}

/// Sum over edges `(u, v)`, `u < v`, of the common forward neighbours
/// (`w > v`) of `u` and `v`.
pub fn oracle_edge_intersection(g: &Graph) -> u64 {
    let n = g.num_vertices();
    let mut offsets = vec![0usize; n + 1];
    for &(u, _) in g.edges() {
        offsets[u as usize + 1] += 1;
    }
    for i in 0..n {
        offsets[i + 1] += offsets[i];
    }
    // Graph edges are sorted by (u, v), so forward lists come out sorted.
    let targets: Vec<u32> = g.edges().iter().map(|&(_, v)| v).collect();
    let forward = |x: u32| &targets[offsets[x as usize]..offsets[x as usize + 1]];

    let mut total = 0u64;
    for &(u, v) in g.edges() {
        let (a, b) = (forward(u), forward(v));
        let (mut p, mut q) = (0, 0);
        while p < a.len() && q < b.len() {
            match a[p].cmp(&b[q]) {
                std::cmp::Ordering::Less => p += 1,
                std::cmp::Ordering::Greater => q += 1,
                std::cmp::Ordering::Equal => {
                    total += 1;
                    p += 1;
                    q += 1;
                }
            }
        }
    }
    total
}
