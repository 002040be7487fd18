use thiserror::Error;

use crate::mesh::{EdgeId, FaceId, HalfedgeId, VertexId};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    // mesh construction and topology
    #[error("face {face} references vertex {vertex}, but the mesh has {vertex_count} vertices")]
    InvalidVertex {
        face: FaceId,
        vertex: usize,
        vertex_count: usize,
    },
    #[error("face {face} repeats a vertex")]
    DegenerateFace { face: FaceId },
    #[error("edge ({0}, {1}) is used by {2} faces; a closed manifold needs exactly two")]
    NonManifold(VertexId, VertexId, usize),
    #[error("vertex {0} has a non-manifold neighbourhood")]
    NonManifoldVertex(VertexId),
    #[error("edge ({0}, {1}) appears twice with the same orientation")]
    InconsistentOrientation(VertexId, VertexId),
    #[error("vertex {0} is not referenced by any face")]
    IsolatedVertex(VertexId),
    #[error("Euler characteristic {0} is odd")]
    OddCharacteristic(i64),
    #[error("operation requires a closed mesh; halfedge {0} has no sibling")]
    NotClosed(HalfedgeId),
    #[error("dual cycle is not a valid triangle strip: {0}")]
    DegenerateStrip(String),
    #[error("cutting did not produce a disk (euler characteristic {euler}, {boundary_loops} boundary loops)")]
    NotADisk { euler: i64, boundary_loops: usize },

    // forms
    #[error("1-form is not antisymmetric on halfedge {halfedge} (deviation {deviation:e})")]
    NotAntisymmetric { halfedge: HalfedgeId, deviation: f64 },
    #[error("1-form is not closed on face {face} (deviation {deviation:e})")]
    NotClosedForm { face: FaceId, deviation: f64 },
    #[error("corner values do not describe a 1-form: halfedge {halfedge} deviates by {deviation:e}")]
    SiblingMismatch { halfedge: HalfedgeId, deviation: f64 },
    #[error("loop basis is degenerate: P^T P is not positive definite")]
    RankDeficient,
    #[error("expected a vector of length {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("integration is inconsistent on halfedge {halfedge} (deviation {deviation:e})")]
    InconsistentPeriods { halfedge: HalfedgeId, deviation: f64 },

    // metric
    #[error("non-positive edge length {length} on edge {edge}")]
    NonPositiveLength { edge: EdgeId, length: f64 },
    #[error("triangle {face} violates the triangle inequality (margin {margin:e})")]
    TriangleInequalityViolated { face: FaceId, margin: f64 },
    #[error("flip of edge {0} blocked: the new diagonal would leave the quad")]
    FlipBlocked(EdgeId),
    #[error("flip of edge {0} would create a zero-length diagonal")]
    ZeroLengthDiagonal(EdgeId),
    #[error("dual loop {loop_index} cannot be rerouted through the flipped quad of edge {edge}")]
    LoopThroughDegenerateQuad { loop_index: usize, edge: EdgeId },
    #[error("loop {loop_index} changed curvature by {deviation:e} across a flip")]
    LoopCurvatureChanged { loop_index: usize, deviation: f64 },

    // energy and solver
    #[error("Lobachevsky argument {0} outside [0, pi]")]
    DomainError(f64),
    #[error("infeasible signature: {0}")]
    InfeasibleSignature(String),
    #[error("Newton system is singular (condition estimate {condition:e})")]
    SingularSystem { condition: f64 },
    #[error("no convergence after {0} iterations")]
    MaxIterations(usize),
    #[error("flip budget of {0} exhausted; an infinite flip sequence is suspected")]
    InfiniteFlipSuspected(usize),
    #[error("line search stalled at step {0:e} without triggering a flip")]
    LineSearchStalled(f64),

    // layout
    #[error("metric is not flat at interior vertex {vertex} (angle sum {angle_sum})")]
    NotFlat { vertex: VertexId, angle_sum: f64 },
    #[error("layout folds over at face {0}")]
    FoldOver(FaceId),
    #[error("cut edge {0} has a zero-length image")]
    DegenerateEdgeImage(EdgeId),

    // file formats
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("mesh has no texture coordinates")]
    MissingUVs,
    #[error("{0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}
