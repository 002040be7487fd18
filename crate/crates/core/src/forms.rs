//! Closed discrete 1-forms, corner variables and the coefficient basis.
//!
//! A 1-form assigns `ξ_h` to every halfedge; it is closed when it is
//! antisymmetric across siblings and sums to zero around each triangle. In a
//! triangle `(i, j, k)` with `next(i) = j`, the corner variable is
//! `ψ_i = (ξ_k − ξ_j)/3`, and conversely `ξ_i = ψ_j − ψ_k`.
//!
//! The basis `W` spans the closed forms with one column per vertex (except an
//! excluded one) followed by one column per homology loop. It factors as
//! `W = Z P`, where `Z` maps corner values to halfedge values and the columns
//! of `P` hold the coefficients of the angle constraints: `+1` on the corners
//! opposite a vertex, `±1` on the pivot corners of a loop.

use std::collections::VecDeque;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::linalg::{CscMatrix, SpdFactor};
use crate::mesh::{CutMesh, DualCycle, HalfedgeId, HalfedgeMesh, VertexId};

/// Absolute tolerance for closedness and antisymmetry checks.
pub const FORM_TOLERANCE: f64 = 1e-12;

/// A closed 1-form, one value per halfedge.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedOneForm {
    values: Vec<f64>,
}

impl ClosedOneForm {
    pub fn zero(halfedge_count: usize) -> Self {
        Self {
            values: vec![0.0; halfedge_count],
        }
    }

    pub(crate) fn from_values_unchecked(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// The exact form `dφ` with `ξ_h = φ(head) − φ(tail)`.
    pub fn exact(mesh: &HalfedgeMesh, phi: &[f64]) -> Self {
        Self {
            values: (0..mesh.halfedge_count())
                .map(|h| phi[mesh.head(h)] - phi[mesh.tail(h)])
                .collect(),
        }
    }
}

/// Checks antisymmetry and per-triangle closedness, reporting the worst
/// offender.
pub fn validate_closed(mesh: &HalfedgeMesh, xi: Vec<f64>) -> Result<ClosedOneForm> {
    if xi.len() != mesh.halfedge_count() {
        return Err(Error::DimensionMismatch {
            expected: mesh.halfedge_count(),
            actual: xi.len(),
        });
    }
    let worst_sibling = (0..xi.len())
        .filter_map(|h| mesh.sibling(h).map(|s| (h, (xi[h] + xi[s]).abs())))
        .max_by(|a, b| a.1.total_cmp(&b.1));
    if let Some((halfedge, deviation)) = worst_sibling {
        if !(deviation <= FORM_TOLERANCE) {
            return Err(Error::NotAntisymmetric { halfedge, deviation });
        }
    }
    let worst_face = (0..mesh.face_count())
        .map(|f| (f, mesh.face_halfedges(f).iter().map(|&h| xi[h]).sum::<f64>().abs()))
        .max_by(|a, b| a.1.total_cmp(&b.1));
    if let Some((face, deviation)) = worst_face {
        if !(deviation <= FORM_TOLERANCE) {
            return Err(Error::NotClosedForm { face, deviation });
        }
    }
    Ok(ClosedOneForm { values: xi })
}

/// Corner values `ψ`, one per halfedge (the corner opposite it).
#[derive(Debug, Clone, PartialEq)]
pub struct CornerField {
    values: Vec<f64>,
}

impl CornerField {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

pub fn psi_from_xi(mesh: &HalfedgeMesh, xi: &ClosedOneForm) -> CornerField {
    let x = &xi.values;
    let values = (0..mesh.halfedge_count())
        .map(|i| (x[mesh.prev(i)] - x[mesh.next(i)]) / 3.0)
        .collect();
    CornerField { values }
}

/// Recovers `ξ_i = ψ_j − ψ_k`, failing when the result is not antisymmetric.
pub fn xi_from_psi(mesh: &HalfedgeMesh, psi: &CornerField) -> Result<ClosedOneForm> {
    let p = &psi.values;
    if p.len() != mesh.halfedge_count() {
        return Err(Error::DimensionMismatch {
            expected: mesh.halfedge_count(),
            actual: p.len(),
        });
    }
    let values: Vec<f64> = (0..p.len()).map(|i| p[mesh.next(i)] - p[mesh.prev(i)]).collect();
    let worst = (0..values.len())
        .filter_map(|h| mesh.sibling(h).map(|s| (h, (values[h] + values[s]).abs())))
        .max_by(|a, b| a.1.total_cmp(&b.1));
    if let Some((halfedge, deviation)) = worst {
        if !(deviation <= FORM_TOLERANCE) {
            return Err(Error::SiblingMismatch { halfedge, deviation });
        }
    }
    Ok(ClosedOneForm { values })
}

/// The matrices `Z`, `P` and `W = Z P` for a given connectivity and loop set.
#[derive(Debug, Clone)]
pub struct FormBasis {
    z: CscMatrix,
    p: CscMatrix,
    w: CscMatrix,
    excluded: VertexId,
    vertex_column: Vec<Option<usize>>,
    column_vertex: Vec<VertexId>,
    loop_count: usize,
    ptp: SpdFactor,
    wtw: OnceLock<std::result::Result<SpdFactor, Error>>,
}

/// The corner-to-halfedge map `Z`: column `j` is `+1` on `prev(j)` and `−1`
/// on `next(j)`.
pub fn corner_to_form_matrix(mesh: &HalfedgeMesh) -> CscMatrix {
    let n = mesh.halfedge_count();
    let mut t = Vec::with_capacity(2 * n);
    for j in 0..n {
        t.push((mesh.prev(j), j, 1.0));
        t.push((mesh.next(j), j, -1.0));
    }
    CscMatrix::from_triplets(n, n, &t)
}

/// Builds the basis with vertex columns in increasing vertex order (skipping
/// `excluded`) followed by one column per loop.
pub fn build_basis(mesh: &HalfedgeMesh, loops: &[DualCycle], excluded: VertexId) -> Result<FormBasis> {
    let nv = mesh.vertex_count();
    if excluded >= nv {
        return Err(Error::InvalidVertex {
            face: 0,
            vertex: excluded,
            vertex_count: nv,
        });
    }
    let mut vertex_column = vec![None; nv];
    let mut column_vertex = Vec::with_capacity(nv - 1);
    for v in (0..nv).filter(|&v| v != excluded) {
        vertex_column[v] = Some(column_vertex.len());
        column_vertex.push(v);
    }
    let cols = column_vertex.len() + loops.len();
    let n = mesh.halfedge_count();

    let mut t = Vec::with_capacity(n + loops.iter().map(DualCycle::len).sum::<usize>());
    for i in 0..n {
        if let Some(c) = vertex_column[mesh.opposite_vertex(i)] {
            t.push((i, c, 1.0));
        }
    }
    for (s, cycle) in loops.iter().enumerate() {
        let c = column_vertex.len() + s;
        for step in cycle.steps() {
            t.push((step.pivot_halfedge, c, f64::from(step.sign)));
        }
    }
    let p = CscMatrix::from_triplets(n, cols, &t);
    let z = corner_to_form_matrix(mesh);
    let w = z.mul(&p);

    let ptp = SpdFactor::new(&p.gram()).map_err(|_| Error::RankDeficient)?;
    Ok(FormBasis {
        z,
        p,
        w,
        excluded,
        vertex_column,
        column_vertex,
        loop_count: loops.len(),
        ptp,
        wtw: OnceLock::new(),
    })
}

impl FormBasis {
    pub fn z(&self) -> &CscMatrix {
        &self.z
    }

    pub fn p(&self) -> &CscMatrix {
        &self.p
    }

    pub fn w(&self) -> &CscMatrix {
        &self.w
    }

    pub fn excluded_vertex(&self) -> VertexId {
        self.excluded
    }

    /// Number of coefficients, `|V| − 1 + 2g`.
    pub fn len(&self) -> usize {
        self.column_vertex.len() + self.loop_count
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn vertex_column(&self, v: VertexId) -> Option<usize> {
        self.vertex_column[v]
    }

    pub fn loop_column(&self, s: usize) -> usize {
        self.column_vertex.len() + s
    }

    /// Vertex of each vertex column, in column order.
    pub fn column_vertices(&self) -> &[VertexId] {
        &self.column_vertex
    }

    pub fn loop_count(&self) -> usize {
        self.loop_count
    }

    fn check_len(&self, y: &[f64]) -> Result<()> {
        if y.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                actual: y.len(),
            });
        }
        Ok(())
    }

    /// `ξ = W y`.
    pub fn expand(&self, y: &[f64]) -> Result<ClosedOneForm> {
        self.check_len(y)?;
        Ok(ClosedOneForm::from_values_unchecked(self.w.mul_vec(y)))
    }

    /// Corner increments `P y`. They agree with `psi_from_xi(W y)` up to a
    /// constant per triangle, which leaves angles unchanged.
    pub fn corner_increment(&self, y: &[f64]) -> Result<Vec<f64>> {
        self.check_len(y)?;
        Ok(self.p.mul_vec(y))
    }

    /// `P⁺ x = (PᵀP)⁻¹ Pᵀ x`.
    pub fn pinv_apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.p.nrows() {
            return Err(Error::DimensionMismatch {
                expected: self.p.nrows(),
                actual: x.len(),
            });
        }
        Ok(self.ptp.solve(&self.p.tr_mul_vec(x)))
    }

    /// Least-squares coefficients of `xi` in the basis.
    pub fn coefficients_of(&self, xi: &ClosedOneForm) -> Result<Vec<f64>> {
        if xi.values.len() != self.w.nrows() {
            return Err(Error::DimensionMismatch {
                expected: self.w.nrows(),
                actual: xi.values.len(),
            });
        }
        let factor = self
            .wtw
            .get_or_init(|| SpdFactor::new(&self.w.gram()).map_err(|_| Error::RankDeficient))
            .as_ref()
            .map_err(Clone::clone)?;
        Ok(factor.solve(&self.w.tr_mul_vec(&xi.values)))
    }
}

/// Scale factors per cut-mesh vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroForm {
    pub values: Vec<f64>,
    pub root: VertexId,
}

/// Order in which [`integrate_with`] visits the cut mesh.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Traversal {
    BreadthFirst,
    DepthFirst,
}

/// Integrates a closed form over a cut mesh, fixing `φ(root) = 0`.
pub fn integrate(xi: &ClosedOneForm, cut: &CutMesh, root: VertexId) -> Result<ZeroForm> {
    integrate_with(xi, cut, root, Traversal::BreadthFirst)
}

pub fn integrate_with(xi: &ClosedOneForm, cut: &CutMesh, root: VertexId, order: Traversal) -> Result<ZeroForm> {
    let mesh = &cut.mesh;
    let x = &xi.values;
    if x.len() != mesh.halfedge_count() {
        return Err(Error::DimensionMismatch {
            expected: mesh.halfedge_count(),
            actual: x.len(),
        });
    }
    let nv = mesh.vertex_count();
    let mut adjacency: Vec<Vec<(VertexId, HalfedgeId, f64)>> = vec![Vec::new(); nv];
    for h in 0..mesh.halfedge_count() {
        adjacency[mesh.tail(h)].push((mesh.head(h), h, 1.0));
        adjacency[mesh.head(h)].push((mesh.tail(h), h, -1.0));
    }

    let mut phi = vec![f64::NAN; nv];
    let mut depth = vec![0usize; nv];
    phi[root] = 0.0;
    let mut frontier = VecDeque::from([root]);
    while let Some(v) = match order {
        Traversal::BreadthFirst => frontier.pop_front(),
        Traversal::DepthFirst => frontier.pop_back(),
    } {
        for &(w, h, sign) in &adjacency[v] {
            if phi[w].is_nan() {
                phi[w] = phi[v] + sign * x[h];
                depth[w] = depth[v] + 1;
                frontier.push_back(w);
            }
        }
    }

    let diameter = depth.iter().copied().max().unwrap_or(0).max(1) as f64;
    let scale = x.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    let tol = FORM_TOLERANCE * diameter * scale;
    for h in 0..mesh.halfedge_count() {
        let deviation = (phi[mesh.head(h)] - phi[mesh.tail(h)] - x[h]).abs();
        if !(deviation <= tol) {
            return Err(Error::InconsistentPeriods { halfedge: h, deviation });
        }
    }
    Ok(ZeroForm { values: phi, root })
}
