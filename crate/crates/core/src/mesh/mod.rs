//! Halfedge connectivity, topology utilities, dual cycles and cutting.

mod cut;
mod cycle;
mod halfedge;
mod topology;

pub use cut::{build_cut_graph, cut_graph_from_dual_tree, cut_mesh, cut_mesh_from_wedges, CutGraph, CutMesh};
pub use cycle::{DualCycle, Step};
pub use halfedge::{build_mesh, FlipRecord, HalfedgeMesh};
pub use topology::{dual_loop, homology_loops, tree_cotree, TreeCotree};

pub type VertexId = usize;
pub type HalfedgeId = usize;
pub type FaceId = usize;
pub type EdgeId = usize;
