//! Discrete conformal seamless similarity maps with prescribed holonomy.
//!
//! A closed triangle mesh with edge lengths is conformally rescaled so that
//! vertex angle sums and the geodesic curvature of a homology basis of dual
//! loops hit integer multiples of a quarter turn. The resulting metric,
//! flattened over a cut to a disk, yields a map whose transitions across the
//! cut are similarities with rotations in multiples of `π/2`.
//!
//! The pipeline: [`mesh`] connectivity and dual loops, [`forms`] for closed
//! 1-forms and the coefficient basis, [`metric`] for corner log-lengths,
//! angles and intrinsic flips, [`energy`] and [`solver`] for the Newton
//! iteration, and [`layout`] for flattening and seamlessness checks.

// Negated comparisons are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod energy;
pub mod error;
pub mod fixtures;
pub mod forms;
pub mod io;
pub mod layout;
pub mod linalg;
pub mod lobachevsky;
pub mod mesh;
pub mod metric;
pub mod solver;

pub use energy::HolonomySignature;
pub use error::{Error, Result};
pub use forms::{ClosedOneForm, CornerField, FormBasis, ZeroForm};
pub use layout::{PlanarLayout, SeamlessReport, SimilarityTransform};
pub use mesh::{build_mesh, CutGraph, CutMesh, DualCycle, HalfedgeMesh};
pub use metric::{AngleField, CornerMetric, CurvatureState, EdgeMetric};
pub use solver::{solve, SolveOptions, Solution, SolverState, Trace};
