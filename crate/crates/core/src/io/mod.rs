//! Reading and writing meshes, loops and signatures.

mod obj;
mod signature;

pub use obj::{parse_obj, read_obj, write_obj, write_textured_obj, ObjMesh};
pub use signature::{ConeTarget, LoopTarget, SignatureSpec};

use crate::error::{Error, Result};
use crate::layout::{fit_cut_transforms, verify_seamless, PlanarLayout, SeamlessReport};
use crate::mesh::{cut_mesh_from_wedges, CutMesh, DualCycle, HalfedgeMesh};
use crate::metric::CornerMetric;

/// A mesh with per-corner texture coordinates, split into its cut mesh.
#[derive(Debug, Clone)]
pub struct TexturedMesh {
    pub mesh: HalfedgeMesh,
    pub cut: CutMesh,
    pub layout: PlanarLayout,
    pub loops: Vec<DualCycle>,
}

impl TexturedMesh {
    pub fn from_obj(obj: &ObjMesh) -> Result<Self> {
        let face_uvs = obj.face_uvs.as_ref().ok_or(Error::MissingUVs)?;
        let mesh = obj.build()?;
        let corner_wedge: Vec<usize> = face_uvs.iter().flatten().copied().collect();
        let cut = cut_mesh_from_wedges(&mesh, &corner_wedge)?;
        let mut uv = vec![[0.0; 2]; cut.mesh.vertex_count()];
        for (h, &w) in corner_wedge.iter().enumerate() {
            uv[cut.mesh.tail(h)] = obj.uvs[w];
        }
        let layout = PlanarLayout::from_vertex_uv(&cut.mesh, &uv);
        let loops = obj
            .loop_faces()
            .iter()
            .map(|faces| DualCycle::from_faces(&mesh, faces))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            mesh,
            cut,
            layout,
            loops,
        })
    }

    /// Metric induced by the texture coordinates.
    pub fn uv_metric(&self) -> Result<CornerMetric> {
        let lengths: Vec<f64> = (0..self.mesh.halfedge_count())
            .map(|h| (self.layout.corners[self.cut.mesh.next(h)] - self.layout.corners[h]).norm())
            .collect();
        CornerMetric::from_halfedge_lengths(&self.mesh, &lengths)
    }

    /// Checks the texture coordinates against a signature.
    pub fn verify(&self, spec: &SignatureSpec) -> Result<SeamlessReport> {
        let sig = spec.resolve(&self.uv_metric()?, &self.loops)?;
        sig.validate(self.mesh.vertex_count(), self.mesh.genus()?, self.loops.len())?;
        let transforms = fit_cut_transforms(&self.layout, &self.cut, &self.mesh)?;
        Ok(verify_seamless(&self.layout, &transforms, &self.cut, &self.mesh, &self.loops, &sig))
    }
}
