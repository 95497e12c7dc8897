//! Triangle counting with bitwise AND + BitCount over sliced adjacency data,
//! and a simulator for running the same computation on a computational
//! memory array.
//!
//! Pipeline: [`graph::parse_edge_list`] → [`bitmatrix::to_bitmatrix`] →
//! [`slicing::compress`] → [`tc::count_triangles_bitwise`] or
//! [`sim::run_tcim`].

pub mod bitmatrix;
pub mod error;
pub mod graph;
pub mod sim;
pub mod slicing;
pub mod tc;

pub use bitmatrix::{to_bitmatrix, BitLine, BitMatrix};
pub use error::{Error, Result};
pub use graph::{parse_edge_list, Graph, RelabelMode, VertexId, VertexRelabeling};
pub use sim::{estimate_cost, run_tcim, ArrayConfig, CostModel, SimStats, Simulator};
pub use slicing::{
    compress, compressed_size, decompress, valid_slice_fraction, CompressedGraph, SliceSize,
};
pub use tc::{count_triangles_bitwise, oracle_edge_intersection, oracle_trace_a3, TcResult};
