use std::collections::HashMap;

use super::{EdgeId, FaceId, HalfedgeId, VertexId};
use crate::error::{Error, Result};

/// Triangle mesh connectivity stored as halfedges.
///
/// Every face owns three halfedges linked by `next`. A closed mesh pairs every
/// halfedge with a sibling of opposite direction; cut meshes leave boundary
/// halfedges unpaired. Halfedge ids stay stable across edge flips, which
/// only rewire the two halfedges of the flipped edge.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfedgeMesh {
    next: Vec<HalfedgeId>,
    sibling: Vec<Option<HalfedgeId>>,
    tail: Vec<VertexId>,
    face: Vec<FaceId>,
    edge: Vec<EdgeId>,
    edge_halfedge: Vec<HalfedgeId>,
    face_halfedge: Vec<HalfedgeId>,
    vertex_halfedge: Vec<HalfedgeId>,
}

/// Halfedges touched by a flip of edge `edge`.
///
/// Before the flip `h = a→b` lies in triangle `(h, n1, p1)` with third vertex
/// `c`, and `twin = b→a` lies in `(twin, n2, p2)` with third vertex `d`.
/// Afterwards `h = d→c` lies in `(h, p1, n2)` and `twin = c→d` in
/// `(twin, p2, n1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FlipRecord {
    pub edge: EdgeId,
    pub h: HalfedgeId,
    pub twin: HalfedgeId,
    pub n1: HalfedgeId,
    pub p1: HalfedgeId,
    pub n2: HalfedgeId,
    pub p2: HalfedgeId,
    pub a: VertexId,
    pub b: VertexId,
    pub c: VertexId,
    pub d: VertexId,
}

/// Builds a closed, consistently oriented triangle mesh.
///
/// Face `f` owns halfedges `3f`, `3f+1`, `3f+2`, where halfedge `3f+k` runs
/// from `faces[f][k]` to `faces[f][(k+1) % 3]`.
pub fn build_mesh(vertex_count: usize, faces: &[[VertexId; 3]]) -> Result<HalfedgeMesh> {
    for (f, tri) in faces.iter().enumerate() {
        if let Some(&v) = tri.iter().find(|&&v| v >= vertex_count) {
            return Err(Error::InvalidVertex {
                face: f,
                vertex: v,
                vertex_count,
            });
        }
        if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
            return Err(Error::DegenerateFace { face: f });
        }
    }

    let n = 3 * faces.len();
    let mut tail = Vec::with_capacity(n);
    let mut next = Vec::with_capacity(n);
    let mut face = Vec::with_capacity(n);
    for (f, tri) in faces.iter().enumerate() {
        for k in 0..3 {
            tail.push(tri[k]);
            next.push(3 * f + (k + 1) % 3);
            face.push(f);
        }
    }

    let mut undirected: HashMap<(VertexId, VertexId), usize> = HashMap::new();
    for h in 0..n {
        let (u, v) = (tail[h], tail[next[h]]);
        *undirected.entry((u.min(v), u.max(v))).or_default() += 1;
    }
    let mut overused: Vec<_> = undirected.iter().filter(|(_, &c)| c > 2).collect();
    overused.sort();
    if let Some((&(u, v), &c)) = overused.first() {
        return Err(Error::NonManifold(u, v, c));
    }

    let mut directed: HashMap<(VertexId, VertexId), HalfedgeId> = HashMap::with_capacity(n);
    for h in 0..n {
        let key = (tail[h], tail[next[h]]);
        if directed.insert(key, h).is_some() {
            return Err(Error::InconsistentOrientation(key.0, key.1));
        }
    }
    let mut sibling = vec![None; n];
    for h in 0..n {
        let (u, v) = (tail[h], tail[next[h]]);
        match directed.get(&(v, u)) {
            Some(&s) => sibling[h] = Some(s),
            None => return Err(Error::NonManifold(u.min(v), u.max(v), 1)),
        }
    }

    let mut used = vec![false; vertex_count];
    for &v in &tail {
        used[v] = true;
    }
    if let Some(v) = used.iter().position(|&u| !u) {
        return Err(Error::IsolatedVertex(v));
    }

    let mesh = HalfedgeMesh::from_raw(vertex_count, next, sibling, tail, face);
    let mut outgoing_count = vec![0usize; vertex_count];
    for h in 0..n {
        outgoing_count[mesh.tail[h]] += 1;
    }
    for v in 0..vertex_count {
        if mesh.outgoing(v).len() != outgoing_count[v] {
            return Err(Error::NonManifoldVertex(v));
        }
    }
    Ok(mesh)
}

impl HalfedgeMesh {
    /// Assembles a mesh from raw halfedge arrays, deriving edges and the
    /// per-vertex and per-face anchors. No validation is performed.
    pub(crate) fn from_raw(
        vertex_count: usize,
        next: Vec<HalfedgeId>,
        sibling: Vec<Option<HalfedgeId>>,
        tail: Vec<VertexId>,
        face: Vec<FaceId>,
    ) -> Self {
        let n = next.len();
        let mut edge = vec![usize::MAX; n];
        let mut edge_halfedge = Vec::new();
        for h in 0..n {
            if edge[h] != usize::MAX {
                continue;
            }
            let e = edge_halfedge.len();
            edge[h] = e;
            if let Some(s) = sibling[h] {
                edge[s] = e;
            }
            edge_halfedge.push(h);
        }

        let face_count = face.iter().map(|&f| f + 1).max().unwrap_or(0);
        let mut face_halfedge = vec![usize::MAX; face_count];
        for h in (0..n).rev() {
            face_halfedge[face[h]] = h;
        }

        let mut vertex_halfedge = vec![usize::MAX; vertex_count];
        for h in (0..n).rev() {
            vertex_halfedge[tail[h]] = h;
        }
        // Boundary vertices are anchored at their most clockwise outgoing
        // halfedge so that ring traversal covers the whole fan.
        for h in 0..n {
            if sibling[h].is_none() {
                vertex_halfedge[tail[h]] = h;
            }
        }

        Self {
            next,
            sibling,
            tail,
            face,
            edge,
            edge_halfedge,
            face_halfedge,
            vertex_halfedge,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_halfedge.len()
    }

    pub fn face_count(&self) -> usize {
        self.face_halfedge.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_halfedge.len()
    }

    pub fn halfedge_count(&self) -> usize {
        self.next.len()
    }

    pub fn next(&self, h: HalfedgeId) -> HalfedgeId {
        self.next[h]
    }

    pub fn prev(&self, h: HalfedgeId) -> HalfedgeId {
        self.next[self.next[h]]
    }

    pub fn sibling(&self, h: HalfedgeId) -> Option<HalfedgeId> {
        self.sibling[h]
    }

    /// Sibling of an interior halfedge.
    ///
    /// # Panics
    /// Panics on a boundary halfedge.
    pub fn twin(&self, h: HalfedgeId) -> HalfedgeId {
        self.sibling[h].unwrap_or_else(|| panic!("halfedge {h} lies on the boundary"))
    }

    pub fn is_boundary(&self, h: HalfedgeId) -> bool {
        self.sibling[h].is_none()
    }

    pub fn tail(&self, h: HalfedgeId) -> VertexId {
        self.tail[h]
    }

    pub fn head(&self, h: HalfedgeId) -> VertexId {
        self.tail[self.next[h]]
    }

    pub fn face(&self, h: HalfedgeId) -> FaceId {
        self.face[h]
    }

    pub fn edge(&self, h: HalfedgeId) -> EdgeId {
        self.edge[h]
    }

    /// A halfedge of edge `e`; the interior one with the lower id.
    pub fn edge_halfedge(&self, e: EdgeId) -> HalfedgeId {
        self.edge_halfedge[e]
    }

    /// Both halfedges of an edge (the second is absent on the boundary).
    pub fn edge_halfedges(&self, e: EdgeId) -> (HalfedgeId, Option<HalfedgeId>) {
        let h = self.edge_halfedge[e];
        (h, self.sibling[h])
    }

    pub fn edge_vertices(&self, e: EdgeId) -> (VertexId, VertexId) {
        let h = self.edge_halfedge[e];
        (self.tail(h), self.head(h))
    }

    pub fn face_halfedge(&self, f: FaceId) -> HalfedgeId {
        self.face_halfedge[f]
    }

    /// The three halfedges of face `f` in cyclic order.
    pub fn face_halfedges(&self, f: FaceId) -> [HalfedgeId; 3] {
        let h = self.face_halfedge[f];
        [h, self.next[h], self.prev(h)]
    }

    pub fn face_vertices(&self, f: FaceId) -> [VertexId; 3] {
        self.face_halfedges(f).map(|h| self.tail[h])
    }

    /// Vertex opposite halfedge `h` in its face.
    pub fn opposite_vertex(&self, h: HalfedgeId) -> VertexId {
        self.tail[self.prev(h)]
    }

    pub fn vertex_halfedge(&self, v: VertexId) -> HalfedgeId {
        self.vertex_halfedge[v]
    }

    /// Outgoing halfedges of `v` in counterclockwise order. On a boundary
    /// vertex the ring starts at the most clockwise outgoing halfedge.
    pub fn outgoing(&self, v: VertexId) -> Vec<HalfedgeId> {
        let start = self.vertex_halfedge[v];
        let mut ring = vec![start];
        let mut h = start;
        loop {
            match self.sibling[self.prev(h)] {
                Some(s) if s != start => {
                    ring.push(s);
                    h = s;
                }
                _ => break,
            }
            if ring.len() > self.next.len() {
                break;
            }
        }
        ring
    }

    pub fn valence(&self, v: VertexId) -> usize {
        self.outgoing(v).len()
    }

    /// Halfedges opposite the corners at `r`, one per incident triangle, in
    /// counterclockwise order.
    pub fn vertex_corner_set(&self, r: VertexId) -> Vec<HalfedgeId> {
        self.outgoing(r).into_iter().map(|h| self.next[h]).collect()
    }

    pub fn is_closed(&self) -> bool {
        self.sibling.iter().all(Option::is_some)
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count() as i64 - self.edge_count() as i64 + self.face_count() as i64
    }

    /// Genus of a closed mesh from its Euler characteristic.
    pub fn genus(&self) -> Result<usize> {
        if let Some(h) = self.sibling.iter().position(Option::is_none) {
            return Err(Error::NotClosed(h));
        }
        let chi = self.euler_characteristic();
        if chi % 2 != 0 || chi > 2 {
            return Err(Error::OddCharacteristic(chi));
        }
        Ok(((2 - chi) / 2) as usize)
    }

    /// Boundary loops as cyclic sequences of boundary halfedges.
    pub fn boundary_loops(&self) -> Vec<Vec<HalfedgeId>> {
        let mut seen = vec![false; self.next.len()];
        let mut loops = Vec::new();
        for start in 0..self.next.len() {
            if self.sibling[start].is_some() || seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut h = start;
            while !seen[h] {
                seen[h] = true;
                cycle.push(h);
                // Advance to the boundary halfedge leaving head(h).
                let mut g = self.next[h];
                while let Some(s) = self.sibling[g] {
                    g = self.next[s];
                }
                h = g;
            }
            loops.push(cycle);
        }
        loops
    }

    /// Flips interior edge `e`, rewiring its two halfedges onto the other
    /// diagonal of the surrounding quad. Edge, face and halfedge ids persist.
    pub fn flip_edge(&mut self, e: EdgeId) -> Result<FlipRecord> {
        let h = self.edge_halfedge[e];
        let twin = self.sibling[h].ok_or(Error::NotClosed(h))?;
        let (n1, p1) = (self.next[h], self.prev(h));
        let (n2, p2) = (self.next[twin], self.prev(twin));
        let (a, b) = (self.tail[h], self.tail[twin]);
        let (c, d) = (self.tail[p1], self.tail[p2]);
        if c == d || self.valence(a) < 3 || self.valence(b) < 3 {
            return Err(Error::FlipBlocked(e));
        }
        let (f1, f2) = (self.face[h], self.face[twin]);

        self.tail[h] = d;
        self.tail[twin] = c;
        self.next[h] = p1;
        self.next[p1] = n2;
        self.next[n2] = h;
        self.next[twin] = p2;
        self.next[p2] = n1;
        self.next[n1] = twin;
        self.face[n2] = f1;
        self.face[n1] = f2;
        self.face_halfedge[f1] = h;
        self.face_halfedge[f2] = twin;
        if self.vertex_halfedge[a] == h {
            self.vertex_halfedge[a] = n2;
        }
        if self.vertex_halfedge[b] == twin {
            self.vertex_halfedge[b] = n1;
        }
        Ok(FlipRecord {
            edge: e,
            h,
            twin,
            n1,
            p1,
            n2,
            p2,
            a,
            b,
            c,
            d,
        })
    }
}
