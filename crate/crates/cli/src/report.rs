use serde::Serialize;
use simmap::layout::SeamlessReport;
use simmap::mesh::{DualCycle, FaceId, VertexId};
use simmap::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Converged,
    MaxIterations,
    FlipBudget,
    Singular,
    InfeasibleSignature,
}

impl Status {
    pub fn of_error(e: &Error) -> Self {
        match e {
            Error::MaxIterations(_) | Error::LineSearchStalled(_) => Self::MaxIterations,
            Error::InfiniteFlipSuspected(_)
            | Error::FlipBlocked(_)
            | Error::ZeroLengthDiagonal(_)
            | Error::LoopThroughDegenerateQuad { .. }
            | Error::LoopCurvatureChanged { .. } => Self::FlipBudget,
            Error::InfeasibleSignature(_) => Self::InfeasibleSignature,
            _ => Self::Singular,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LoopEntry {
    pub index: usize,
    pub faces: Vec<FaceId>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<i64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BasisDescription {
    pub genus: usize,
    pub excluded_vertex: VertexId,
    pub loops: Vec<LoopEntry>,
}

impl BasisDescription {
    pub fn new(genus: usize, excluded_vertex: VertexId, loops: &[DualCycle], k: Option<&[i64]>) -> Self {
        Self {
            genus,
            excluded_vertex,
            loops: loops
                .iter()
                .enumerate()
                .map(|(index, l)| LoopEntry {
                    index,
                    faces: l.faces(),
                    k: k.map(|k| k[index]),
                })
                .collect(),
        }
    }
}

/// Condensed [`SeamlessReport`].
#[derive(Debug, Clone, Serialize)]
pub struct SeamlessSummary {
    pub passes: bool,
    pub tolerance: f64,
    pub cut_edges: usize,
    pub max_quarter_turn_residual: f64,
    pub max_cycle_residual: f64,
    pub max_signature_deviation: f64,
    pub signature_matches: bool,
    pub folded_faces: usize,
}

impl SeamlessSummary {
    pub fn new(r: &SeamlessReport, tolerance: f64) -> Self {
        Self {
            passes: r.passes(tolerance),
            tolerance,
            cut_edges: r.transforms.len(),
            max_quarter_turn_residual: r.max_quarter_turn_residual,
            max_cycle_residual: r.max_cycle_residual,
            max_signature_deviation: r.max_signature_deviation,
            signature_matches: r.signature_matches,
            folded_faces: r.folded_faces.len(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Cone {
    pub vertex: VertexId,
    pub k: i64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Timing {
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub iterations: usize,
    pub flips: usize,
    pub residual_inf: Option<f64>,
    pub energy: Option<f64>,
    pub cones: Vec<Cone>,
    pub basis: Option<BasisDescription>,
    pub seamless: Option<SeamlessSummary>,
    pub timing: Timing,
}
