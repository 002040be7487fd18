use std::collections::VecDeque;

use super::{DualCycle, EdgeId, FaceId, HalfedgeId, HalfedgeMesh, VertexId};
use crate::error::{Error, Result};

/// Partition of the edges of a closed mesh into a primal spanning tree, a
/// dual spanning tree of the remaining edges, and `2g` leftover edges.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeCotree {
    pub primal: Vec<EdgeId>,
    pub dual: Vec<EdgeId>,
    pub leftover: Vec<EdgeId>,
    /// For each face, the halfedge inside it that crosses to its dual-tree
    /// parent; `None` at the root face.
    pub dual_parent: Vec<Option<HalfedgeId>>,
    pub dual_depth: Vec<usize>,
}

/// Breadth-first tree–cotree decomposition rooted at vertex `root` and face 0.
pub fn tree_cotree(mesh: &HalfedgeMesh, root: VertexId) -> Result<TreeCotree> {
    if let Some(h) = (0..mesh.halfedge_count()).find(|&h| mesh.is_boundary(h)) {
        return Err(Error::NotClosed(h));
    }
    let ne = mesh.edge_count();
    let mut in_primal = vec![false; ne];
    let mut visited = vec![false; mesh.vertex_count()];
    let mut queue = VecDeque::from([root]);
    visited[root] = true;
    while let Some(v) = queue.pop_front() {
        for h in mesh.outgoing(v) {
            let w = mesh.head(h);
            if !visited[w] {
                visited[w] = true;
                in_primal[mesh.edge(h)] = true;
                queue.push_back(w);
            }
        }
    }

    let nf = mesh.face_count();
    let mut in_dual = vec![false; ne];
    let mut dual_parent = vec![None; nf];
    let mut dual_depth = vec![0; nf];
    let mut seen = vec![false; nf];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    while let Some(f) = queue.pop_front() {
        for h in mesh.face_halfedges(f) {
            if in_primal[mesh.edge(h)] {
                continue;
            }
            let s = mesh.twin(h);
            let g = mesh.face(s);
            if !seen[g] {
                seen[g] = true;
                in_dual[mesh.edge(h)] = true;
                dual_parent[g] = Some(s);
                dual_depth[g] = dual_depth[f] + 1;
                queue.push_back(g);
            }
        }
    }

    let mut primal = Vec::new();
    let mut dual = Vec::new();
    let mut leftover = Vec::new();
    for e in 0..ne {
        if in_primal[e] {
            primal.push(e);
        } else if in_dual[e] {
            dual.push(e);
        } else {
            leftover.push(e);
        }
    }
    Ok(TreeCotree {
        primal,
        dual,
        leftover,
        dual_parent,
        dual_depth,
    })
}

/// Closes leftover edge `leftover_edge` into a dual cycle through the dual
/// spanning tree.
///
/// The strip crosses the leftover edge from the face of its lower halfedge
/// into the face of its sibling, then returns along the unique tree path.
pub fn dual_loop(mesh: &HalfedgeMesh, leftover_edge: EdgeId, tree: &TreeCotree) -> Result<DualCycle> {
    let (h, twin) = mesh.edge_halfedges(leftover_edge);
    let twin = twin.ok_or(Error::NotClosed(h))?;
    let (f1, f2) = (mesh.face(h), mesh.face(twin));
    if f1 == f2 {
        return Err(Error::DegenerateStrip(format!(
            "edge {leftover_edge} borders face {f1} on both sides"
        )));
    }

    // Walk f2 and f1 up to their lowest common ancestor.
    let parent_face = |f: FaceId| tree.dual_parent[f].map(|p| mesh.face(mesh.twin(p)));
    let mut up = Vec::new();
    let mut down = Vec::new();
    let (mut a, mut b) = (f2, f1);
    while a != b {
        if tree.dual_depth[a] >= tree.dual_depth[b] {
            let p = tree.dual_parent[a].ok_or_else(|| DualCycle::strip_error("dual tree is disconnected"))?;
            up.push(mesh.twin(p));
            a = parent_face(a).unwrap();
        } else {
            let p = tree.dual_parent[b].ok_or_else(|| DualCycle::strip_error("dual tree is disconnected"))?;
            down.push(p);
            b = parent_face(b).unwrap();
        }
    }
    let mut crossings = vec![twin];
    crossings.extend(up);
    crossings.extend(down.into_iter().rev());
    DualCycle::new(mesh, crossings)
}

/// The `2g` homology dual loops of a closed mesh, one per leftover edge.
pub fn homology_loops(mesh: &HalfedgeMesh, tree: &TreeCotree) -> Result<Vec<DualCycle>> {
    tree.leftover.iter().map(|&e| dual_loop(mesh, e, tree)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn tetrahedron_has_no_leftovers() {
        let m = fixtures::tetrahedron().mesh;
        let t = tree_cotree(&m, 0).unwrap();
        assert_eq!((t.primal.len(), t.dual.len(), t.leftover.len()), (3, 3, 0));
    }

    #[test]
    fn torus_and_genus_two_leftovers() {
        let torus = fixtures::torus_grid(3, 3).mesh;
        let t = tree_cotree(&torus, 0).unwrap();
        assert_eq!(t.leftover.len(), 2);
        assert_eq!(t.primal.len() + t.dual.len() + t.leftover.len(), torus.edge_count());
        for l in homology_loops(&torus, &t).unwrap() {
            assert!(l.len() >= 3);
        }
        let g2 = fixtures::genus_two().mesh;
        assert_eq!(g2.genus().unwrap(), 2);
        assert_eq!(tree_cotree(&g2, 0).unwrap().leftover.len(), 4);
    }
}
