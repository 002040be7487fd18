use super::{FaceId, FlipRecord, HalfedgeId, HalfedgeMesh, VertexId};
use crate::error::{Error, Result};

/// One triangle of a dual cycle.
///
/// The strip enters `face` through `crossing` (a halfedge of `face`) and
/// leaves through `exit`. The two share the pivot vertex; `pivot_halfedge` is
/// the halfedge of `face` opposite it, and `sign` is `+1` when the pivot lies
/// to the left of the direction of travel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Step {
    pub face: FaceId,
    pub crossing: HalfedgeId,
    pub exit: HalfedgeId,
    pub pivot: VertexId,
    pub pivot_halfedge: HalfedgeId,
    pub sign: i8,
}

/// A directed cyclic strip of triangles.
///
/// Stored as the cyclic sequence of crossing halfedges: `crossings[m]` lies in
/// the triangle entered at step `m`, oriented from the left side of the strip
/// to the right. Each triangle is left through the sibling of the next
/// crossing.
#[derive(Debug, Clone, PartialEq)]
pub struct DualCycle {
    crossings: Vec<HalfedgeId>,
    steps: Vec<Step>,
}

impl DualCycle {
    pub(crate) fn strip_error(msg: impl Into<String>) -> Error {
        Error::DegenerateStrip(msg.into())
    }

    pub fn new(mesh: &HalfedgeMesh, crossings: Vec<HalfedgeId>) -> Result<Self> {
        let n = crossings.len();
        if n < 3 {
            return Err(Self::strip_error(format!("strip has {n} triangles, need at least 3")));
        }
        let mut steps = Vec::with_capacity(n);
        for m in 0..n {
            let c = crossings[m];
            let exit = mesh
                .sibling(crossings[(m + 1) % n])
                .ok_or_else(|| Self::strip_error(format!("crossing {} is a boundary halfedge", crossings[(m + 1) % n])))?;
            if mesh.face(exit) != mesh.face(c) {
                return Err(Self::strip_error(format!(
                    "crossings {} and {} do not share a triangle",
                    c,
                    crossings[(m + 1) % n]
                )));
            }
            let (pivot, pivot_halfedge, sign) = if exit == mesh.next(c) {
                (mesh.head(c), mesh.prev(c), -1)
            } else if exit == mesh.prev(c) {
                (mesh.tail(c), mesh.next(c), 1)
            } else {
                return Err(Self::strip_error(format!("strip turns back through halfedge {c}")));
            };
            steps.push(Step {
                face: mesh.face(c),
                crossing: c,
                exit,
                pivot,
                pivot_halfedge,
                sign,
            });
        }
        Ok(Self { crossings, steps })
    }

    /// Counterclockwise loop around vertex `r` through its incident triangles.
    pub fn around_vertex(mesh: &HalfedgeMesh, r: VertexId) -> Result<Self> {
        // Entering the face of each outgoing halfedge through that halfedge
        // and leaving through its predecessor keeps r on the left.
        Self::new(mesh, mesh.outgoing(r))
    }

    /// Builds a cycle from its cyclic face sequence. Consecutive faces must
    /// share an edge.
    pub fn from_faces(mesh: &HalfedgeMesh, faces: &[FaceId]) -> Result<Self> {
        let n = faces.len();
        if n < 3 {
            return Err(Self::strip_error(format!("strip has {n} triangles, need at least 3")));
        }
        if let Some(&f) = faces.iter().find(|&&f| f >= mesh.face_count()) {
            return Err(Self::strip_error(format!("face {f} does not exist")));
        }
        let mut crossings = Vec::with_capacity(n);
        for m in 0..n {
            let prev_face = faces[(m + n - 1) % n];
            let c = mesh
                .face_halfedges(faces[m])
                .into_iter()
                .find(|&h| mesh.sibling(h).map(|s| mesh.face(s)) == Some(prev_face))
                .ok_or_else(|| Self::strip_error(format!("faces {prev_face} and {} are not adjacent", faces[m])))?;
            crossings.push(c);
        }
        Self::new(mesh, crossings)
    }

    /// The same strip traversed in the opposite direction.
    pub fn reversed(&self, mesh: &HalfedgeMesh) -> Result<Self> {
        let n = self.crossings.len();
        let crossings = (0..n)
            .map(|j| {
                let c = self.crossings[(n - j) % n];
                mesh.sibling(c).ok_or(Error::NotClosed(c))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(mesh, crossings)
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn crossings(&self) -> &[HalfedgeId] {
        &self.crossings
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn faces(&self) -> Vec<FaceId> {
        self.steps.iter().map(|s| s.face).collect()
    }

    /// Signed sum of pivot angles, given angles indexed by halfedge.
    pub fn curvature(&self, alpha: &[f64]) -> f64 {
        self.steps.iter().map(|s| f64::from(s.sign) * alpha[s.pivot_halfedge]).sum()
    }

    /// Reroutes the strip after `record` flipped an edge of `mesh` (which
    /// already holds the new connectivity). `loop_index` is only used for
    /// error reporting.
    pub fn repair(&self, mesh: &HalfedgeMesh, record: &FlipRecord, loop_index: usize) -> Result<Self> {
        let r = record;
        let fail = || Error::LoopThroughDegenerateQuad {
            loop_index,
            edge: r.edge,
        };
        let touches = self
            .crossings
            .iter()
            .any(|&c| [r.h, r.twin, r.n1, r.p1, r.n2, r.p2].contains(&c));
        if !touches {
            return Ok(self.clone());
        }

        let kept: Vec<HalfedgeId> = self.crossings.iter().copied().filter(|&c| c != r.h && c != r.twin).collect();
        if kept.is_empty() {
            return Err(fail());
        }
        let in_t1 = |x: HalfedgeId| x == r.h || x == r.p1 || x == r.n2;
        let boundary = [r.n1, r.p1, r.n2, r.p2];
        let n = kept.len();
        let mut crossings = Vec::with_capacity(n + 2);
        for m in 0..n {
            let c = kept[m];
            crossings.push(c);
            if !boundary.contains(&c) {
                continue;
            }
            let exit = mesh.sibling(kept[(m + 1) % n]).ok_or_else(fail)?;
            if exit == c || !boundary.contains(&exit) {
                return Err(fail());
            }
            match (in_t1(c), in_t1(exit)) {
                (true, false) => crossings.push(r.twin),
                (false, true) => crossings.push(r.h),
                _ => {}
            }
        }
        Self::new(mesh, crossings).map_err(|_| fail())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn vertex_loop_pivots_are_corner_set() {
        let m = fixtures::torus_grid(4, 4).mesh;
        for r in 0..m.vertex_count() {
            let l = DualCycle::around_vertex(&m, r).unwrap();
            assert!(l.steps().iter().all(|s| s.sign == 1 && s.pivot == r));
            let mut pivots: Vec<_> = l.steps().iter().map(|s| s.pivot_halfedge).collect();
            let mut corners = m.vertex_corner_set(r);
            pivots.sort();
            corners.sort();
            assert_eq!(pivots, corners);
        }
    }

    #[test]
    fn reversal_flips_signs() {
        let m = fixtures::torus_grid(4, 4).mesh;
        let l = DualCycle::around_vertex(&m, 5).unwrap();
        let r = l.reversed(&m).unwrap();
        let mut a: Vec<_> = l.steps().iter().map(|s| (s.face, s.pivot_halfedge, s.sign)).collect();
        let mut b: Vec<_> = r.steps().iter().map(|s| (s.face, s.pivot_halfedge, -s.sign)).collect();
        a.sort();
        b.sort();
        assert_eq!(a, b);
        for c in r.crossings() {
            assert!(l.crossings().contains(&m.twin(*c)));
        }
    }

    #[test]
    fn from_faces_round_trips() {
        let m = fixtures::torus_grid(4, 4).mesh;
        let l = DualCycle::around_vertex(&m, 7).unwrap();
        let again = DualCycle::from_faces(&m, &l.faces()).unwrap();
        assert_eq!(again, l);
    }
}
