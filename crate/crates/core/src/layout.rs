//! Flattening over a cut, cut-edge similarity transforms and seamlessness
//! checks.

use std::collections::VecDeque;
use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::Complex;
use serde::{Deserialize, Serialize};

use crate::energy::HolonomySignature;
use crate::error::{Error, Result};
use crate::mesh::{build_cut_graph, cut_mesh, CutMesh, DualCycle, EdgeId, FaceId, HalfedgeId, HalfedgeMesh, VertexId};
use crate::metric::CornerMetric;
use crate::solver::Solution;

type C64 = Complex<f64>;

/// Interior cut-mesh vertices must have angle sums within this of `2π`.
pub const FLATNESS_TOLERANCE: f64 = 1e-8;
/// Default bound on transition residuals for a map to count as seamless.
pub const SEAMLESS_TOLERANCE: f64 = 1e-8;

/// Planar positions of every corner of a cut mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarLayout {
    /// Position of `tail(h)` as a corner of `face(h)`.
    pub corners: Vec<C64>,
    /// Position of each cut-mesh vertex.
    pub vertices: Vec<C64>,
}

impl PlanarLayout {
    /// Layout from per-vertex texture coordinates of a cut mesh.
    pub fn from_vertex_uv(mesh: &HalfedgeMesh, uv: &[[f64; 2]]) -> Self {
        let vertices: Vec<C64> = uv.iter().map(|p| C64::new(p[0], p[1])).collect();
        let corners = (0..mesh.halfedge_count()).map(|h| vertices[mesh.tail(h)]).collect();
        Self { corners, vertices }
    }

    /// Angle opposite each halfedge, measured in the plane.
    pub fn corner_angles(&self, mesh: &HalfedgeMesh) -> Vec<f64> {
        (0..mesh.halfedge_count())
            .map(|h| {
                let apex = self.corners[mesh.prev(h)];
                let u = self.corners[h] - apex;
                let v = self.corners[mesh.next(h)] - apex;
                (u.conj() * v).arg().abs()
            })
            .collect()
    }

    pub fn signed_area(&self, mesh: &HalfedgeMesh, f: FaceId) -> f64 {
        let [a, b, c] = mesh.face_halfedges(f).map(|h| self.corners[h]);
        0.5 * ((b - a).conj() * (c - a)).im
    }

    /// Diagonal of the bounding box of all corners.
    pub fn diameter(&self) -> f64 {
        let (mut lo, mut hi) = (C64::new(f64::INFINITY, f64::INFINITY), C64::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
        for p in &self.corners {
            lo = C64::new(lo.re.min(p.re), lo.im.min(p.im));
            hi = C64::new(hi.re.max(p.re), hi.im.max(p.im));
        }
        (hi - lo).norm()
    }
}

/// Lays out a cut mesh whose connectivity matches `metric`.
///
/// The lowest face is placed with its first halfedge along the positive
/// real axis; every other face is attached across a dual spanning tree and
/// scaled to match the shared edge.
pub fn layout(metric: &CornerMetric, cut: &CutMesh) -> Result<PlanarLayout> {
    let mesh = &cut.mesh;
    if metric.mesh.halfedge_count() != mesh.halfedge_count() {
        return Err(Error::DimensionMismatch {
            expected: mesh.halfedge_count(),
            actual: metric.mesh.halfedge_count(),
        });
    }
    let alpha = metric.angles()?.alpha;

    let mut interior = vec![true; mesh.vertex_count()];
    for h in 0..mesh.halfedge_count() {
        if mesh.is_boundary(h) {
            interior[mesh.tail(h)] = false;
            interior[mesh.head(h)] = false;
        }
    }
    let mut theta = vec![0.0; mesh.vertex_count()];
    for h in 0..mesh.halfedge_count() {
        theta[mesh.opposite_vertex(h)] += alpha[h];
    }
    if let Some(v) = (0..theta.len()).find(|&v| interior[v] && (theta[v] - 2.0 * PI).abs() > FLATNESS_TOLERANCE) {
        return Err(Error::NotFlat {
            vertex: cut.vertex_origin[v],
            angle_sum: theta[v],
        });
    }

    let mu = &metric.mu;
    let mut corners = vec![C64::new(f64::NAN, f64::NAN); mesh.halfedge_count()];
    let place = |corners: &mut Vec<C64>, h: HalfedgeId, p: C64, q: C64| {
        let ratio = ((mu[mesh.prev(h)] - mu[h]) / 2.0).exp();
        let r = p + (q - p) * C64::from_polar(ratio, alpha[mesh.next(h)]);
        corners[h] = p;
        corners[mesh.next(h)] = q;
        corners[mesh.prev(h)] = r;
    };

    let mut placed = vec![false; mesh.face_count()];
    for root in 0..mesh.face_count() {
        if placed[root] {
            continue;
        }
        let h0 = mesh.face_halfedge(root);
        place(&mut corners, h0, C64::new(0.0, 0.0), C64::new((mu[h0] / 2.0).exp(), 0.0));
        placed[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(f) = queue.pop_front() {
            for h in mesh.face_halfedges(f) {
                let Some(s) = mesh.sibling(h) else { continue };
                let g = mesh.face(s);
                if placed[g] {
                    continue;
                }
                placed[g] = true;
                let (p, q) = (corners[mesh.next(h)], corners[h]);
                place(&mut corners, s, p, q);
                queue.push_back(g);
            }
        }
    }

    for h in 0..mesh.halfedge_count() {
        let Some(s) = mesh.sibling(h) else { continue };
        let scale = (corners[mesh.next(h)] - corners[h]).norm();
        let gap = (corners[h] - corners[mesh.next(s)])
            .norm()
            .max((corners[mesh.next(h)] - corners[s]).norm());
        if gap > FLATNESS_TOLERANCE * scale {
            let v = mesh.tail(h);
            return Err(Error::NotFlat {
                vertex: cut.vertex_origin[v],
                angle_sum: theta[v],
            });
        }
    }

    let layout = PlanarLayout {
        vertices: vertex_positions(mesh, &corners),
        corners,
    };
    if let Some(f) = (0..mesh.face_count()).find(|&f| !(layout.signed_area(mesh, f) > 0.0)) {
        return Err(Error::FoldOver(f));
    }
    Ok(layout)
}

fn vertex_positions(mesh: &HalfedgeMesh, corners: &[C64]) -> Vec<C64> {
    let mut out = vec![C64::new(f64::NAN, f64::NAN); mesh.vertex_count()];
    for h in (0..mesh.halfedge_count()).rev() {
        out[mesh.tail(h)] = corners[h];
    }
    out
}

/// Lays out the cut mesh from per-halfedge lengths, such as those produced
/// by integrating a 0-form and rescaling.
pub fn layout_via_phi(lengths: &[f64], cut: &CutMesh) -> Result<PlanarLayout> {
    let metric = CornerMetric::from_halfedge_lengths(&cut.mesh, lengths)?;
    layout(&metric, cut)
}

/// `x ↦ s R x + t`, stored as log-scale, rotation angle and translation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimilarityTransform {
    pub log_scale: f64,
    /// Rotation angle in `(−π, π]`.
    pub rotation: f64,
    pub translation: [f64; 2],
}

impl SimilarityTransform {
    pub fn identity() -> Self {
        Self::from_complex(C64::new(1.0, 0.0), C64::new(0.0, 0.0))
    }

    /// The map `z ↦ a z + b`.
    pub fn from_complex(a: C64, b: C64) -> Self {
        Self {
            log_scale: a.norm().ln(),
            rotation: a.arg(),
            translation: [b.re, b.im],
        }
    }

    pub fn linear(&self) -> C64 {
        C64::from_polar(self.log_scale.exp(), self.rotation)
    }

    pub fn offset(&self) -> C64 {
        C64::new(self.translation[0], self.translation[1])
    }

    pub fn apply(&self, z: C64) -> C64 {
        self.linear() * z + self.offset()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        let a = self.linear();
        Self::from_complex(a * other.linear(), a * other.offset() + self.offset())
    }

    pub fn inverse(&self) -> Self {
        let a = self.linear().inv();
        Self::from_complex(a, -a * self.offset())
    }

    /// Distance of the rotation angle to the nearest multiple of `π/2`.
    pub fn quarter_turn_residual(&self) -> f64 {
        let k = (self.rotation / FRAC_PI_2).round();
        (self.rotation - k * FRAC_PI_2).abs()
    }

    /// Largest of `|ln s|`, `|θ|` and `|t| / length_scale`.
    pub fn distance_to_identity(&self, length_scale: f64) -> f64 {
        let t = self.offset().norm() / length_scale.max(f64::MIN_POSITIVE);
        self.log_scale.abs().max(self.rotation.abs()).max(t)
    }
}

/// Transition across one cut edge: maps the image on the side of
/// `halfedge_a` (the lower halfedge id) onto the image on the side of
/// `halfedge_b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutTransform {
    pub edge: EdgeId,
    pub halfedge_a: HalfedgeId,
    pub halfedge_b: HalfedgeId,
    pub transform: SimilarityTransform,
    /// Mismatch of the mapped segment endpoints.
    pub fit_residual: f64,
}

/// Fits the similarity across every cut edge of `original`.
pub fn fit_cut_transforms(layout: &PlanarLayout, cut: &CutMesh, original: &HalfedgeMesh) -> Result<Vec<CutTransform>> {
    let mesh = &cut.mesh;
    let mut out = Vec::new();
    for e in 0..original.edge_count() {
        let (ha, hb) = original.edge_halfedges(e);
        let Some(hb) = hb else { continue };
        if !mesh.is_boundary(ha) {
            continue;
        }
        // Side A: tail(ha) = u, head(ha) = v. Side B runs v → u.
        let (au, av) = (layout.corners[ha], layout.corners[mesh.next(ha)]);
        let (bv, bu) = (layout.corners[hb], layout.corners[mesh.next(hb)]);
        let (da, db) = (av - au, bv - bu);
        if !(da.norm() > 0.0 && db.norm() > 0.0) {
            return Err(Error::DegenerateEdgeImage(e));
        }
        let a = db / da;
        let b = bu - a * au;
        let fit_residual = (a * au + b - bu).norm().max((a * av + b - bv).norm());
        out.push(CutTransform {
            edge: e,
            halfedge_a: ha,
            halfedge_b: hb,
            transform: SimilarityTransform::from_complex(a, b),
            fit_residual,
        });
    }
    Ok(out)
}

/// Outcome of checking a layout for seamlessness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeamlessReport {
    pub transforms: Vec<CutTransform>,
    /// Per cut edge, in the order of `transforms`.
    pub quarter_turn_residuals: Vec<f64>,
    /// `(vertex, residual)` for every regular vertex on the cut.
    pub cycle_residuals: Vec<(VertexId, f64)>,
    pub achieved_vertex_k: Vec<i64>,
    pub achieved_loop_k: Vec<i64>,
    pub max_quarter_turn_residual: f64,
    pub max_cycle_residual: f64,
    /// Largest deviation of an angle sum or loop curvature from its target,
    /// in radians.
    pub max_signature_deviation: f64,
    pub signature_matches: bool,
    /// Faces whose image has non-positive signed area.
    pub folded_faces: Vec<FaceId>,
}

impl SeamlessReport {
    pub fn passes(&self, tolerance: f64) -> bool {
        self.signature_matches
            && self.folded_faces.is_empty()
            && self.max_quarter_turn_residual <= tolerance && self.max_cycle_residual <= tolerance
    }
}

/// Composes cut transitions around each regular cut vertex, measures
/// quarter-turn residuals and recomputes the signature from layout angles.
pub fn verify_seamless(
    layout: &PlanarLayout,
    transforms: &[CutTransform],
    cut: &CutMesh,
    original: &HalfedgeMesh,
    loops: &[DualCycle],
    sig: &HolonomySignature,
) -> SeamlessReport {
    let quarter_turn_residuals: Vec<f64> = transforms.iter().map(|t| t.transform.quarter_turn_residual()).collect();

    let mut by_edge = vec![None; original.edge_count()];
    for t in transforms {
        by_edge[t.edge] = Some(*t);
    }
    let scale = layout.diameter();
    let mut on_cut = vec![false; original.vertex_count()];
    for t in transforms {
        let (u, v) = original.edge_vertices(t.edge);
        on_cut[u] = true;
        on_cut[v] = true;
    }
    let mut cycle_residuals = Vec::new();
    for v in 0..original.vertex_count() {
        if !on_cut[v] || sig.vertex_k.get(v) != Some(&4) {
            continue;
        }
        let ring = original.outgoing(v);
        let mut total = SimilarityTransform::identity();
        for i in 0..ring.len() {
            let incoming = original.prev(ring[i]);
            let Some(t) = by_edge[original.edge(incoming)] else { continue };
            let step = if incoming == t.halfedge_a {
                t.transform
            } else {
                t.transform.inverse()
            };
            total = step.compose(&total);
        }
        cycle_residuals.push((v, total.distance_to_identity(scale)));
    }

    let alpha = layout.corner_angles(&cut.mesh);
    let mut theta = vec![0.0; original.vertex_count()];
    for h in 0..original.halfedge_count() {
        theta[original.opposite_vertex(h)] += alpha[h];
    }
    let kappa: Vec<f64> = loops.iter().map(|l| l.curvature(&alpha)).collect();
    let quarter = |x: f64| (x / FRAC_PI_2).round() as i64;
    let achieved_vertex_k: Vec<i64> = theta.iter().map(|&t| quarter(t)).collect();
    let achieved_loop_k: Vec<i64> = kappa.iter().map(|&k| quarter(k)).collect();
    let mut max_signature_deviation: f64 = 0.0;
    for (t, &k) in theta.iter().zip(&sig.vertex_k) {
        max_signature_deviation = max_signature_deviation.max((t - k as f64 * FRAC_PI_2).abs());
    }
    for (t, &k) in kappa.iter().zip(&sig.loop_k) {
        max_signature_deviation = max_signature_deviation.max((t - k as f64 * FRAC_PI_2).abs());
    }
    let signature_matches = achieved_vertex_k == sig.vertex_k && achieved_loop_k == sig.loop_k;
    let folded_faces = (0..cut.mesh.face_count())
        .filter(|&f| !(layout.signed_area(&cut.mesh, f) > 0.0))
        .collect();

    SeamlessReport {
        max_quarter_turn_residual: quarter_turn_residuals.iter().copied().fold(0.0, f64::max),
        max_cycle_residual: cycle_residuals.iter().map(|c| c.1).fold(0.0, f64::max),
        transforms: transforms.to_vec(),
        quarter_turn_residuals,
        cycle_residuals,
        achieved_vertex_k,
        achieved_loop_k,
        max_signature_deviation,
        signature_matches,
        folded_faces,
    }
}

/// Cut, layout and seamlessness report for a solved state.
#[derive(Debug, Clone)]
pub struct Parametrization {
    pub cut: CutMesh,
    pub layout: PlanarLayout,
    pub report: SeamlessReport,
}

/// Cuts through every cone of `signature`, lays out `metric` and verifies.
pub fn parametrize(metric: &CornerMetric, loops: &[DualCycle], signature: &HolonomySignature) -> Result<Parametrization> {
    let mesh = &metric.mesh;
    let cones: Vec<VertexId> = (0..mesh.vertex_count()).filter(|&v| signature.vertex_k[v] != 4).collect();
    let graph = build_cut_graph(mesh, &cones)?;
    let cut = cut_mesh(mesh, &graph)?;
    let layout = layout(metric, &cut)?;
    let transforms = fit_cut_transforms(&layout, &cut, mesh)?;
    let report = verify_seamless(&layout, &transforms, &cut, mesh, loops, signature);
    Ok(Parametrization { cut, layout, report })
}

impl Solution {
    pub fn parametrize(&self) -> Result<Parametrization> {
        parametrize(&self.metric, &self.loops, &self.signature)
    }
}
