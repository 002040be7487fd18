use std::collections::VecDeque;

use super::{EdgeId, HalfedgeId, HalfedgeMesh, VertexId};
use crate::error::{Error, Result};

/// A set of edges whose complement is a topological disk.
#[derive(Debug, Clone, PartialEq)]
pub struct CutGraph {
    edges: Vec<EdgeId>,
    is_cut: Vec<bool>,
    vertices: Vec<VertexId>,
}

impl CutGraph {
    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn contains(&self, e: EdgeId) -> bool {
        self.is_cut[e]
    }

    /// Vertices touched by the cut, in increasing order.
    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    fn from_mask(mesh: &HalfedgeMesh, is_cut: Vec<bool>) -> Self {
        let edges: Vec<EdgeId> = (0..is_cut.len()).filter(|&e| is_cut[e]).collect();
        let mut on_cut = vec![false; mesh.vertex_count()];
        for &e in &edges {
            let (u, v) = mesh.edge_vertices(e);
            on_cut[u] = true;
            on_cut[v] = true;
        }
        let vertices = (0..on_cut.len()).filter(|&v| on_cut[v]).collect();
        Self {
            edges,
            is_cut,
            vertices,
        }
    }
}

/// Builds a cut graph through every vertex in `irregular`.
///
/// The complement of a breadth-first dual spanning tree is a connected graph
/// through all vertices whose complement is a disk. Dangling branches that do
/// not end in an irregular vertex are pruned.
pub fn build_cut_graph(mesh: &HalfedgeMesh, irregular: &[VertexId]) -> Result<CutGraph> {
    if let Some(h) = (0..mesh.halfedge_count()).find(|&h| mesh.is_boundary(h)) {
        return Err(Error::NotClosed(h));
    }
    let mut in_tree = vec![false; mesh.edge_count()];
    let mut seen = vec![false; mesh.face_count()];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    while let Some(f) = queue.pop_front() {
        for h in mesh.face_halfedges(f) {
            let g = mesh.face(mesh.twin(h));
            if !seen[g] {
                seen[g] = true;
                in_tree[mesh.edge(h)] = true;
                queue.push_back(g);
            }
        }
    }
    let tree: Vec<EdgeId> = (0..in_tree.len()).filter(|&e| in_tree[e]).collect();
    cut_graph_from_dual_tree(mesh, irregular, &tree)
}

/// Builds a cut graph from an explicit dual spanning tree (given by the edges
/// it crosses), keeping every vertex in `irregular` on the cut.
pub fn cut_graph_from_dual_tree(
    mesh: &HalfedgeMesh,
    irregular: &[VertexId],
    dual_tree: &[EdgeId],
) -> Result<CutGraph> {
    let mut is_cut = vec![true; mesh.edge_count()];
    for &e in dual_tree {
        is_cut[e] = false;
    }
    let mut keep = vec![false; mesh.vertex_count()];
    for &v in irregular {
        keep[v] = true;
    }

    let mut degree = vec![0usize; mesh.vertex_count()];
    for e in (0..is_cut.len()).filter(|&e| is_cut[e]) {
        let (u, v) = mesh.edge_vertices(e);
        degree[u] += 1;
        degree[v] += 1;
    }
    let mut leaves: VecDeque<VertexId> = (0..degree.len()).filter(|&v| degree[v] == 1 && !keep[v]).collect();
    while let Some(v) = leaves.pop_front() {
        if degree[v] != 1 {
            continue;
        }
        let Some(h) = mesh.outgoing(v).into_iter().find(|&h| is_cut[mesh.edge(h)]) else {
            continue;
        };
        is_cut[mesh.edge(h)] = false;
        degree[v] = 0;
        let w = mesh.head(h);
        degree[w] -= 1;
        if degree[w] == 1 && !keep[w] {
            leaves.push_back(w);
        }
    }

    if !is_cut.iter().any(|&c| c) {
        // A sphere needs at least one cut edge to open into a disk.
        let e = irregular
            .first()
            .map(|&v| mesh.edge(mesh.vertex_halfedge(v)))
            .unwrap_or(0);
        is_cut[e] = true;
    }
    Ok(CutGraph::from_mask(mesh, is_cut))
}

/// A mesh cut open along a [`CutGraph`].
///
/// Halfedge and face ids coincide with the uncut mesh; only vertices are
/// split into wedges, and halfedges along the cut lose their siblings.
#[derive(Debug, Clone, PartialEq)]
pub struct CutMesh {
    pub mesh: HalfedgeMesh,
    /// Original vertex of each cut-mesh vertex.
    pub vertex_origin: Vec<VertexId>,
}

impl CutMesh {
    /// Original halfedge of a cut-mesh halfedge (the identity).
    pub fn halfedge_origin(&self, h: HalfedgeId) -> HalfedgeId {
        h
    }
}

/// Cuts a closed mesh open along `cut`.
pub fn cut_mesh(mesh: &HalfedgeMesh, cut: &CutGraph) -> Result<CutMesh> {
    let n = mesh.halfedge_count();
    let mut tail = vec![usize::MAX; n];
    let mut vertex_origin = Vec::new();
    for v in 0..mesh.vertex_count() {
        let ring = mesh.outgoing(v);
        let k = ring.len();
        let start = (0..k).find(|&i| cut.contains(mesh.edge(ring[i]))).unwrap_or(0);
        let mut wedge = vertex_origin.len();
        vertex_origin.push(v);
        for step in 0..k {
            let h = ring[(start + step) % k];
            if step > 0 && cut.contains(mesh.edge(h)) {
                wedge = vertex_origin.len();
                vertex_origin.push(v);
            }
            tail[h] = wedge;
        }
    }

    let next: Vec<HalfedgeId> = (0..n).map(|h| mesh.next(h)).collect();
    let face = (0..n).map(|h| mesh.face(h)).collect();
    let sibling = (0..n)
        .map(|h| {
            if cut.contains(mesh.edge(h)) {
                None
            } else {
                mesh.sibling(h)
            }
        })
        .collect();
    let cut_mesh = HalfedgeMesh::from_raw(vertex_origin.len(), next, sibling, tail, face);

    let euler = cut_mesh.euler_characteristic();
    let boundary_loops = cut_mesh.boundary_loops().len();
    if euler != 1 || boundary_loops != 1 {
        return Err(Error::NotADisk { euler, boundary_loops });
    }
    Ok(CutMesh {
        mesh: cut_mesh,
        vertex_origin,
    })
}

/// Rebuilds a cut mesh from a wedge index per halfedge tail, as given by
/// per-corner texture indices. Edges whose two sides disagree on their
/// wedges become boundary; wedges are renumbered in order of first use.
pub fn cut_mesh_from_wedges(mesh: &HalfedgeMesh, corner_wedge: &[usize]) -> Result<CutMesh> {
    let n = mesh.halfedge_count();
    if corner_wedge.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: corner_wedge.len(),
        });
    }
    let mut renumber = std::collections::HashMap::new();
    let mut vertex_origin = Vec::new();
    let mut tail = vec![0; n];
    for h in 0..n {
        let w = *renumber.entry(corner_wedge[h]).or_insert_with(|| {
            vertex_origin.push(mesh.tail(h));
            vertex_origin.len() - 1
        });
        if vertex_origin[w] != mesh.tail(h) {
            return Err(Error::NonManifoldVertex(mesh.tail(h)));
        }
        tail[h] = w;
    }
    let next: Vec<HalfedgeId> = (0..n).map(|h| mesh.next(h)).collect();
    let face = (0..n).map(|h| mesh.face(h)).collect();
    let sibling = (0..n)
        .map(|h| {
            mesh.sibling(h)
                .filter(|&s| tail[s] == tail[next[h]] && tail[next[s]] == tail[h])
        })
        .collect();
    let cut_mesh = HalfedgeMesh::from_raw(vertex_origin.len(), next, sibling, tail, face);
    for v in 0..cut_mesh.vertex_count() {
        let fan = cut_mesh.outgoing(v).len();
        let used = (0..n).filter(|&h| cut_mesh.tail(h) == v).count();
        if fan != used {
            return Err(Error::NonManifoldVertex(vertex_origin[v]));
        }
    }
    let euler = cut_mesh.euler_characteristic();
    let boundary_loops = cut_mesh.boundary_loops().len();
    if euler != 1 || boundary_loops != 1 {
        return Err(Error::NotADisk { euler, boundary_loops });
    }
    Ok(CutMesh {
        mesh: cut_mesh,
        vertex_origin,
    })
}
