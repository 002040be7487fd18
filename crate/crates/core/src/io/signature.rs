use std::f64::consts::FRAC_PI_2;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::energy::HolonomySignature;
use crate::error::{Error, Result};
use crate::mesh::{DualCycle, VertexId};
use crate::metric::{curvatures, CornerMetric};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeTarget {
    pub vertex: VertexId,
    pub k: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoopTarget {
    pub index: usize,
    pub k: i64,
}

fn default_k() -> i64 {
    4
}

/// Sparse signature description as stored in JSON.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignatureSpec {
    #[serde(default)]
    pub cones: Vec<ConeTarget>,
    #[serde(default)]
    pub loops: Vec<LoopTarget>,
    #[serde(default = "default_k")]
    pub default_k: i64,
    #[serde(default)]
    pub excluded_vertex: Option<VertexId>,
}

impl Default for SignatureSpec {
    fn default() -> Self {
        Self {
            cones: Vec::new(),
            loops: Vec::new(),
            default_k: default_k(),
            excluded_vertex: None,
        }
    }
}

impl SignatureSpec {
    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Parse {
            line: e.line(),
            message: e.to_string(),
        })
    }

    /// Expands to a full signature. Loops without a target get the nearest
    /// quarter-turn multiple of their curvature under `initial`; the excluded
    /// vertex defaults to the last one.
    pub fn resolve(&self, initial: &CornerMetric, loops: &[DualCycle]) -> Result<HolonomySignature> {
        let n = initial.mesh.vertex_count();
        let mut vertex_k = vec![self.default_k; n];
        for c in &self.cones {
            if c.vertex >= n {
                return Err(Error::InfeasibleSignature(format!("cone vertex {} out of range", c.vertex)));
            }
            vertex_k[c.vertex] = c.k;
        }
        let kappa = curvatures(&initial.angles()?, &initial.mesh, loops).kappa;
        let mut loop_k: Vec<i64> = kappa.iter().map(|k| (k / FRAC_PI_2).round() as i64).collect();
        for l in &self.loops {
            let slot = loop_k
                .get_mut(l.index)
                .ok_or_else(|| Error::InfeasibleSignature(format!("loop index {} out of range", l.index)))?;
            *slot = l.k;
        }
        Ok(HolonomySignature {
            vertex_k,
            loop_k,
            excluded: self.excluded_vertex.unwrap_or(n.saturating_sub(1)),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_in() {
        let spec: SignatureSpec = serde_json::from_str(r#"{"cones":[{"vertex":0,"k":1}]}"#).unwrap();
        let f = crate::fixtures::tetrahedron();
        let sig = spec.resolve(&CornerMetric::from_edge_metric(&f.mesh, &f.metric()), &[]).unwrap();
        assert_eq!(sig.vertex_k, vec![1, 4, 4, 4]);
        assert_eq!(sig.excluded, 3);
    }
}
