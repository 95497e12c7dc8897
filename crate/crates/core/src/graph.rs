//! Undirected graph ingestion.
//!
//! Reads SNAP-style plain-text edge lists (`u v` per line, `#` comments,
//! arbitrary ASCII whitespace), drops self-loops, merges duplicate and
//! reversed edges, and relabels vertex ids into a dense `[0, n)` range.

use std::fmt;
use std::io::BufRead;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{try_reserve, Error, Result};

pub type VertexId = u32;

/// Largest vertex count accepted by the loader.
pub const MAX_VERTICES: u64 = 1 << 31;

/// Simple undirected graph. Edges are stored once as `(min, max)`, sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    num_vertices: usize,
    edges: Vec<(VertexId, VertexId)>,
}

impl Graph {
    /// Builds a graph from arbitrary pairs. Self-loops are dropped and
    /// duplicate or reversed pairs merged; ids must be below `num_vertices`.
    pub fn from_edges<I>(num_vertices: usize, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (VertexId, VertexId)>,
    {
        if num_vertices as u64 > MAX_VERTICES {
            return Err(Error::TooLarge(format!(
                "{num_vertices} vertices exceeds the cap of {MAX_VERTICES}"
            )));
        }
        let mut edges = Vec::new();
        for (u, v) in pairs {
            if u as usize >= num_vertices || v as usize >= num_vertices {
                return Err(Error::Contract(format!(
                    "edge ({u}, {v}) out of range for {num_vertices} vertices"
                )));
            }
            if u != v {
                edges.push((u.min(v), u.max(v)));
            }
        }
        edges.sort_unstable();
        edges.dedup();
        Ok(Graph {
            num_vertices,
            edges,
        })
    }

    pub fn empty(num_vertices: usize) -> Self {
        Graph {
            num_vertices,
            edges: Vec::new(),
        }
    }

    /// The complete graph `K_n`.
    pub fn complete(n: usize) -> Self {
        let n32 = n as VertexId;
        let edges = (0..n32)
            .flat_map(|u| (u + 1..n32).map(move |v| (u, v)))
            .collect();
        Graph {
            num_vertices: n,
            edges,
        }
    }

    /// `G(n, p)` with a fixed seed; identical arguments give identical graphs.
    pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = p.clamp(0.0, 1.0);
        let n32 = n as VertexId;
        let mut edges = Vec::new();
        for u in 0..n32 {
            for v in u + 1..n32 {
                if rng.random_bool(p) {
                    edges.push((u, v));
                }
            }
        }
        Graph {
            num_vertices: n,
            edges,
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Canonical `(min, max)` edges in ascending order.
    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.num_vertices];
        for &(u, v) in &self.edges {
            deg[u as usize] += 1;
            deg[v as usize] += 1;
        }
        deg
    }

    /// Same edges with `extra` isolated vertices appended.
    pub fn with_isolated_vertices(&self, extra: usize) -> Result<Self> {
        Graph::from_edges(self.num_vertices + extra, self.edges.iter().copied())
    }
}

/// Vertex id assignment applied while loading.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RelabelMode {
    /// Keep file ids; `n = max id + 1`.
    Identity,
    /// Sorted distinct ids become `0..n`.
    #[default]
    Dense,
    /// Highest degree first, ties broken by ascending file id.
    DegreeDescending,
}

impl RelabelMode {
    pub fn as_str(self) -> &'static str {
        match self {
            RelabelMode::Identity => "identity",
            RelabelMode::Dense => "dense",
            RelabelMode::DegreeDescending => "degree-descending",
        }
    }
}

impl fmt::Display for RelabelMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RelabelMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identity" => Ok(RelabelMode::Identity),
            "dense" | "dense-compaction" => Ok(RelabelMode::Dense),
            "degree" | "degree-descending" => Ok(RelabelMode::DegreeDescending),
            other => Err(Error::Config(format!("unknown relabel mode `{other}`"))),
        }
    }
}

/// Bijection between file ids and graph ids `[0, n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexRelabeling {
    mode: RelabelMode,
    /// `new_to_old[new] = old`.
    new_to_old: Vec<u64>,
    /// `(old, new)` sorted by `old`.
    old_to_new: Vec<(u64, VertexId)>,
}

impl VertexRelabeling {
    fn from_order(mode: RelabelMode, new_to_old: Vec<u64>) -> Self {
        let mut old_to_new: Vec<(u64, VertexId)> = new_to_old
            .iter()
            .enumerate()
            .map(|(new, &old)| (old, new as VertexId))
            .collect();
        old_to_new.sort_unstable();
        VertexRelabeling {
            mode,
            new_to_old,
            old_to_new,
        }
    }

    pub fn mode(&self) -> RelabelMode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.new_to_old.len()
    }

    pub fn is_empty(&self) -> bool {
        self.new_to_old.is_empty()
    }

    pub fn new_id(&self, old: u64) -> Option<VertexId> {
        self.old_to_new
            .binary_search_by_key(&old, |&(o, _)| o)
            .ok()
            .map(|pos| self.old_to_new[pos].1)
    }

    pub fn old_id(&self, new: VertexId) -> Option<u64> {
        self.new_to_old.get(new as usize).copied()
    }
}

/// Parses an edge list with the given relabeling.
pub fn parse_edge_list<R: BufRead>(reader: R, mode: RelabelMode) -> Result<Graph> {
    parse_edge_list_with_mapping(reader, mode).map(|(g, _)| g)
}

/// Like [`parse_edge_list`], also returning the id mapping that was applied.
pub fn parse_edge_list_with_mapping<R: BufRead>(
    mut reader: R,
    mode: RelabelMode,
) -> Result<(Graph, VertexRelabeling)> {
    let mut raw: Vec<(u64, u64)> = Vec::new();
    let mut buf = Vec::new();
    let mut line_no = 0usize;
    loop {
        buf.clear();
        if reader.read_until(b'\n', &mut buf)? == 0 {
            break;
        }
        line_no += 1;
        let line = std::str::from_utf8(&buf)
            .map_err(|_| Error::parse(line_no, "line is not valid UTF-8"))?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_ascii_whitespace();
        let u = parse_id(tokens.next(), line_no)?;
        let v = parse_id(tokens.next(), line_no)?;
        if let Some(extra) = tokens.next() {
            return Err(Error::parse(
                line_no,
                format!("expected two vertex ids, found extra token `{extra}`"),
            ));
        }
        if raw.len() == raw.capacity() {
            let grow = raw.len().max(1024);
            try_reserve(&mut raw, grow, "edge buffer")?;
        }
        raw.push((u, v));
    }
    build_graph(raw, mode)
}

fn parse_id(token: Option<&str>, line: usize) -> Result<u64> {
    let token = token.ok_or_else(|| Error::parse(line, "expected two vertex ids"))?;
    if token.starts_with('-') {
        return Err(Error::parse(line, format!("negative vertex id `{token}`")));
    }
    token
        .parse::<u64>()
        .map_err(|_| Error::parse(line, format!("malformed vertex id `{token}`")))
}

fn build_graph(raw: Vec<(u64, u64)>, mode: RelabelMode) -> Result<(Graph, VertexRelabeling)> {
    let relabeling = match mode {
        RelabelMode::Identity => {
            let n = raw.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
            check_vertex_cap(n)?;
            VertexRelabeling::from_order(mode, (0..n).collect())
        }
        RelabelMode::Dense => {
            let ids = distinct_ids(&raw);
            check_vertex_cap(ids.len() as u64)?;
            VertexRelabeling::from_order(mode, ids)
        }
        RelabelMode::DegreeDescending => {
            let ids = distinct_ids(&raw);
            check_vertex_cap(ids.len() as u64)?;
            // Degrees over the deduplicated, loop-free edge set.
            let mut canon: Vec<(u64, u64)> = raw
                .iter()
                .filter(|&&(u, v)| u != v)
                .map(|&(u, v)| (u.min(v), u.max(v)))
                .collect();
            canon.sort_unstable();
            canon.dedup();
            let mut degree = vec![0usize; ids.len()];
            for &(u, v) in &canon {
                for x in [u, v] {
                    let pos = ids.binary_search(&x).expect("id collected above");
                    degree[pos] += 1;
                }
            }
            let mut order: Vec<usize> = (0..ids.len()).collect();
            order.sort_by(|&a, &b| degree[b].cmp(&degree[a]).then(ids[a].cmp(&ids[b])));
            VertexRelabeling::from_order(mode, order.into_iter().map(|p| ids[p]).collect())
        }
    };

    let mut edges = Vec::new();
    try_reserve(&mut edges, raw.len(), "edge list")?;
    for &(u, v) in &raw {
        if u == v {
            continue;
        }
        let a = relabeling.new_id(u).expect("every id is mapped");
        let b = relabeling.new_id(v).expect("every id is mapped");
        edges.push((a.min(b), a.max(b)));
    }
    drop(raw);
    edges.sort_unstable();
    edges.dedup();
    let graph = Graph {
        num_vertices: relabeling.len(),
        edges,
    };
    Ok((graph, relabeling))
}

fn distinct_ids(raw: &[(u64, u64)]) -> Vec<u64> {
    let mut ids: Vec<u64> = raw.iter().flat_map(|&(u, v)| [u, v]).collect();
    ids.sort_unstable();
    ids.dedup();
    ids
}

fn check_vertex_cap(n: u64) -> Result<()> {
    if n > MAX_VERTICES {
        Err(Error::TooLarge(format!(
            "{n} vertices exceeds the cap of {MAX_VERTICES}"
        )))
    } else {
        Ok(())
    }
}
