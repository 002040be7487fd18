//! Edge lengths, corner log-lengths, triangle angles and curvatures.
//!
//! The metric state is a [`CornerMetric`]: a log-length `μ_h` per halfedge
//! that fixes each triangle up to similarity. Side lengths are `e^{μ/2}`, and
//! adding a constant to the three values of one triangle changes nothing but
//! its scale.

mod flip;

pub use flip::{intrinsic_flip, FlipOutcome};

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::forms::{psi_from_xi, ClosedOneForm, ZeroForm};
use crate::mesh::{CutMesh, DualCycle, EdgeId, FaceId, HalfedgeMesh};

/// Positive length per edge.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeMetric {
    lengths: Vec<f64>,
}

impl EdgeMetric {
    pub fn new(mesh: &HalfedgeMesh, lengths: Vec<f64>) -> Result<Self> {
        if lengths.len() != mesh.edge_count() {
            return Err(Error::DimensionMismatch {
                expected: mesh.edge_count(),
                actual: lengths.len(),
            });
        }
        if let Some(edge) = lengths.iter().position(|&l| !(l > 0.0 && l.is_finite())) {
            return Err(Error::NonPositiveLength {
                edge,
                length: lengths[edge],
            });
        }
        Ok(Self { lengths })
    }

    pub fn from_positions(mesh: &HalfedgeMesh, positions: &[[f64; 3]]) -> Result<Self> {
        let lengths = (0..mesh.edge_count())
            .map(|e| {
                let (u, v) = mesh.edge_vertices(e);
                let (p, q) = (positions[u], positions[v]);
                ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2)).sqrt()
            })
            .collect();
        Self::new(mesh, lengths)
    }

    pub fn length(&self, e: EdgeId) -> f64 {
        self.lengths[e]
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    /// `λ_e = 2 ln l_e`.
    pub fn lambda(&self, e: EdgeId) -> f64 {
        2.0 * self.lengths[e].ln()
    }
}

/// Log-length per halfedge on a given connectivity.
#[derive(Debug, Clone, PartialEq)]
pub struct CornerMetric {
    pub mesh: HalfedgeMesh,
    pub mu: Vec<f64>,
}

impl CornerMetric {
    pub fn new(mesh: HalfedgeMesh, mu: Vec<f64>) -> Result<Self> {
        if mu.len() != mesh.halfedge_count() {
            return Err(Error::DimensionMismatch {
                expected: mesh.halfedge_count(),
                actual: mu.len(),
            });
        }
        Ok(Self { mesh, mu })
    }

    /// `μ = λ^G` on every halfedge.
    pub fn from_edge_metric(mesh: &HalfedgeMesh, metric: &EdgeMetric) -> Self {
        let mu = (0..mesh.halfedge_count()).map(|h| metric.lambda(mesh.edge(h))).collect();
        Self {
            mesh: mesh.clone(),
            mu,
        }
    }

    /// `μ = 2 ln l` from per-halfedge lengths.
    pub fn from_halfedge_lengths(mesh: &HalfedgeMesh, lengths: &[f64]) -> Result<Self> {
        if let Some(h) = lengths.iter().position(|&l| !(l > 0.0)) {
            return Err(Error::NonPositiveLength {
                edge: mesh.edge(h),
                length: lengths[h],
            });
        }
        Self::new(mesh.clone(), lengths.iter().map(|l| 2.0 * l.ln()).collect())
    }

    /// The three log-lengths of face `f` in the order of `face_halfedges`.
    pub fn face_mu(&self, f: FaceId) -> [f64; 3] {
        self.mesh.face_halfedges(f).map(|h| self.mu[h])
    }

    pub fn triangle_margin(&self, f: FaceId) -> f64 {
        margin_from_mu(self.face_mu(f))
    }

    pub fn min_margin(&self) -> (FaceId, f64) {
        (0..self.mesh.face_count())
            .map(|f| (f, self.triangle_margin(f)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap_or((0, f64::INFINITY))
    }

    /// Angle opposite every halfedge; fails on the first triangle that is
    /// not strictly non-degenerate.
    pub fn angles(&self) -> Result<AngleField> {
        let mut alpha = vec![0.0; self.mesh.halfedge_count()];
        for f in 0..self.mesh.face_count() {
            let hs = self.mesh.face_halfedges(f);
            let a = triangle_angles(self.face_mu(f)).map_err(|margin| Error::TriangleInequalityViolated {
                face: f,
                margin,
            })?;
            for k in 0..3 {
                alpha[hs[k]] = a[k];
            }
        }
        Ok(AngleField { alpha })
    }

    /// Angles with degenerate triangles clamped to `0` and `π`.
    pub fn angles_clamped(&self) -> AngleField {
        let mut alpha = vec![0.0; self.mesh.halfedge_count()];
        for f in 0..self.mesh.face_count() {
            let hs = self.mesh.face_halfedges(f);
            let a = triangle_angles_clamped(self.face_mu(f));
            for k in 0..3 {
                alpha[hs[k]] = a[k];
            }
        }
        AngleField { alpha }
    }

    /// Adds `t · delta` to every log-length.
    pub fn stepped(&self, delta: &[f64], t: f64) -> Self {
        let mu = self.mu.iter().zip(delta).map(|(m, d)| m + t * d).collect();
        Self {
            mesh: self.mesh.clone(),
            mu,
        }
    }
}

/// `μ_h = λ^G_h + ψ_h` with `ψ` the corner field of `xi`.
pub fn corner_mu(mesh: &HalfedgeMesh, metric: &EdgeMetric, xi: &ClosedOneForm) -> CornerMetric {
    let psi = psi_from_xi(mesh, xi);
    let mu = (0..mesh.halfedge_count())
        .map(|h| metric.lambda(mesh.edge(h)) + psi.values()[h])
        .collect();
    CornerMetric {
        mesh: mesh.clone(),
        mu,
    }
}

/// Rescaled lengths `l^G · e^{(φ_v + φ_w)/2}` per halfedge of the cut mesh.
pub fn conformal_lengths(original: &HalfedgeMesh, metric: &EdgeMetric, phi: &ZeroForm, cut: &CutMesh) -> Vec<f64> {
    let m = &cut.mesh;
    (0..m.halfedge_count())
        .map(|h| {
            let l = metric.length(original.edge(cut.halfedge_origin(h)));
            l * ((phi.values[m.tail(h)] + phi.values[m.head(h)]) / 2.0).exp()
        })
        .collect()
}

/// Side lengths of a triangle from its log-lengths, scaled so the longest
/// side is one.
pub fn side_lengths(mu: [f64; 3]) -> [f64; 3] {
    let top = mu[0].max(mu[1]).max(mu[2]);
    mu.map(|m| ((m - top) / 2.0).exp())
}

/// `min_side (l_j + l_k − l_i) / (l_i + l_j + l_k)`.
pub fn margin_from_lengths(l: [f64; 3]) -> f64 {
    let p = l[0] + l[1] + l[2];
    let m = (l[1] + l[2] - l[0]).min(l[0] + l[2] - l[1]).min(l[0] + l[1] - l[2]);
    m / p
}

pub fn margin_from_mu(mu: [f64; 3]) -> f64 {
    margin_from_lengths(side_lengths(mu))
}

/// Angles opposite each side by the half-angle formula
/// `α_i = 2 atan2(√((p−l_j)(p−l_k)), √(p(p−l_i)))`, clamping degenerate
/// triangles to angles `0` and `π`.
pub fn triangle_angles_clamped(mu: [f64; 3]) -> [f64; 3] {
    let l = side_lengths(mu);
    let p = (l[0] + l[1] + l[2]) / 2.0;
    // p − l_i computed from differences to avoid cancellation.
    let d = [
        ((l[1] + l[2] - l[0]) / 2.0).max(0.0),
        ((l[0] + l[2] - l[1]) / 2.0).max(0.0),
        ((l[0] + l[1] - l[2]) / 2.0).max(0.0),
    ];
    let angle = |i: usize, j: usize, k: usize| 2.0 * (d[j] * d[k]).sqrt().atan2((p * d[i]).sqrt());
    [angle(0, 1, 2), angle(1, 2, 0), angle(2, 0, 1)]
}

/// Angles of a strictly non-degenerate triangle, or its margin on failure.
pub fn triangle_angles(mu: [f64; 3]) -> std::result::Result<[f64; 3], f64> {
    let margin = margin_from_mu(mu);
    if !(margin > 0.0) {
        return Err(margin);
    }
    Ok(triangle_angles_clamped(mu))
}

/// Angle opposite each halfedge.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleField {
    pub alpha: Vec<f64>,
}

impl AngleField {
    /// Largest deviation of a triangle's angle sum from `π`.
    pub fn max_sum_error(&self, mesh: &HalfedgeMesh) -> f64 {
        (0..mesh.face_count())
            .map(|f| (mesh.face_halfedges(f).iter().map(|&h| self.alpha[h]).sum::<f64>() - PI).abs())
            .fold(0.0, f64::max)
    }
}

/// Vertex angle sums `Θ_r` and loop curvatures `κ_s`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureState {
    pub theta: Vec<f64>,
    pub kappa: Vec<f64>,
}

impl CurvatureState {
    /// `Σ_r (2π − Θ_r)`.
    pub fn total_curvature(&self) -> f64 {
        self.theta.iter().map(|t| 2.0 * PI - t).sum()
    }
}

pub fn curvatures(angles: &AngleField, mesh: &HalfedgeMesh, loops: &[DualCycle]) -> CurvatureState {
    let mut theta = vec![0.0; mesh.vertex_count()];
    for h in 0..mesh.halfedge_count() {
        theta[mesh.opposite_vertex(h)] += angles.alpha[h];
    }
    let kappa = loops.iter().map(|l| l.curvature(&angles.alpha)).collect();
    CurvatureState { theta, kappa }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn mu_of(l: [f64; 3]) -> [f64; 3] {
        l.map(|x: f64| 2.0 * x.ln())
    }

    #[test]
    fn equilateral_and_right_angles() {
        let a = triangle_angles([0.0; 3]).unwrap();
        assert!(a.iter().all(|x| (x - PI / 3.0).abs() < 1e-15));
        let r = triangle_angles(mu_of([3.0, 4.0, 5.0])).unwrap();
        assert!((r[2] - PI / 2.0).abs() < 1e-14);
    }

    #[test]
    fn margins() {
        assert!((margin_from_mu([0.0; 3]) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(margin_from_mu(mu_of([1.0, 1.0, 2.0])), 0.0);
        assert!(margin_from_mu(mu_of([1.0, 1.0, 3.0])) < 0.0);
        assert!(triangle_angles(mu_of([1.0, 1.0, 3.0])).is_err());
    }

    #[test]
    fn conformal_scaling_of_unit_triangle() {
        let m = crate::mesh::build_mesh(
            4,
            &[[0, 1, 2], [0, 2, 3], [0, 3, 1], [1, 3, 2]],
        )
        .unwrap();
        let g = EdgeMetric::new(&m, vec![1.0; 6]).unwrap();
        let cut = crate::mesh::build_cut_graph(&m, &[0, 1, 2, 3]).unwrap();
        let cm = crate::mesh::cut_mesh(&m, &cut).unwrap();
        let phi_orig = [0.0, 0.0, 2.0 * 2f64.ln(), 0.0];
        let phi = ZeroForm {
            values: cm.vertex_origin.iter().map(|&v| phi_orig[v]).collect(),
            root: 0,
        };
        let lens = conformal_lengths(&m, &g, &phi, &cm);
        let mut face0: Vec<f64> = cm.mesh.face_halfedges(0).iter().map(|&h| lens[h]).collect();
        face0.sort_by(f64::total_cmp);
        assert!((face0[0] - 1.0).abs() < 1e-15 && (face0[1] - 2.0).abs() < 1e-15 && (face0[2] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn regular_tetrahedron_curvature() {
        let f = fixtures::tetrahedron();
        let cm = CornerMetric::from_edge_metric(&f.mesh, &f.metric());
        let c = curvatures(&cm.angles().unwrap(), &f.mesh, &[]);
        assert!(c.theta.iter().all(|t| (t - PI).abs() < 1e-14));
        assert!((c.total_curvature() - 4.0 * PI).abs() < 1e-12);
    }
}
