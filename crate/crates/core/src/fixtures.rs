//! Small closed meshes used by tests, benchmarks and the CLI.

use std::collections::HashMap;
use std::f64::consts::PI;

use crate::mesh::{build_mesh, FaceId, HalfedgeMesh, VertexId};
use crate::metric::EdgeMetric;

/// A mesh with vertex positions and an edge length per edge.
///
/// Lengths usually come from the positions, but flat tori carry intrinsic
/// lengths that no embedding in space reproduces.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub mesh: HalfedgeMesh,
    pub faces: Vec<[VertexId; 3]>,
    pub positions: Vec<[f64; 3]>,
    pub lengths: Vec<f64>,
}

impl Fixture {
    fn from_positions(positions: Vec<[f64; 3]>, faces: Vec<[VertexId; 3]>) -> Self {
        let mesh = build_mesh(positions.len(), &faces).expect("fixture must be a closed manifold");
        let lengths = (0..mesh.edge_count())
            .map(|e| {
                let (u, v) = mesh.edge_vertices(e);
                distance(positions[u], positions[v])
            })
            .collect();
        Self {
            mesh,
            faces,
            positions,
            lengths,
        }
    }

    pub fn metric(&self) -> EdgeMetric {
        EdgeMetric::new(&self.mesh, self.lengths.clone()).expect("fixture lengths are positive")
    }

    /// Same connectivity with every edge of length one.
    pub fn equilateral(mut self) -> Self {
        self.lengths.iter_mut().for_each(|l| *l = 1.0);
        self
    }
}

fn distance(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

/// Regular tetrahedron.
pub fn tetrahedron() -> Fixture {
    Fixture::from_positions(
        vec![[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]],
        vec![[0, 1, 2], [0, 2, 3], [0, 3, 1], [1, 3, 2]],
    )
}

fn torus_faces(n: usize, m: usize) -> Vec<[VertexId; 3]> {
    assert!(n >= 3 && m >= 3, "torus grid needs at least 3x3 vertices");
    let v = |i: usize, j: usize| (i % n) * m + (j % m);
    let mut faces = Vec::with_capacity(2 * n * m);
    for i in 0..n {
        for j in 0..m {
            faces.push([v(i, j), v(i + 1, j), v(i + 1, j + 1)]);
            faces.push([v(i, j), v(i + 1, j + 1), v(i, j + 1)]);
        }
    }
    faces
}

/// Torus triangulated as an `n × m` grid with diagonals, embedded as a ring
/// torus in space. Vertex `(i, j)` has id `i·m + j`; cell `(i, j)` owns the
/// faces `2(i·m + j)` (lower) and `2(i·m + j) + 1` (upper).
pub fn torus_grid(n: usize, m: usize) -> Fixture {
    let (big, small) = (2.0, 1.0);
    let mut positions = Vec::with_capacity(n * m);
    for i in 0..n {
        for j in 0..m {
            let (u, w) = (2.0 * PI * i as f64 / n as f64, 2.0 * PI * j as f64 / m as f64);
            let r = big + small * w.cos();
            positions.push([r * u.cos(), r * u.sin(), small * w.sin()]);
        }
    }
    Fixture::from_positions(positions, torus_faces(n, m))
}

/// Flat torus from the periodic equilateral lattice, optionally with one
/// vertex displaced by a planar offset (in lattice units). Edge lengths are
/// intrinsic; positions are those of [`torus_grid`].
pub fn flat_torus(n: usize, m: usize, displaced: Option<(VertexId, [f64; 2])>) -> Fixture {
    let mut fixture = torus_grid(n, m);
    let e1 = [1.0, 0.0];
    let e2 = [-0.5, 3f64.sqrt() / 2.0];
    let offset = |v: VertexId| match displaced {
        Some((d, o)) if d == v => o,
        _ => [0.0, 0.0],
    };
    let point = |i: usize, j: usize| {
        let o = offset((i % n) * m + (j % m));
        [
            i as f64 * e1[0] + j as f64 * e2[0] + o[0],
            i as f64 * e1[1] + j as f64 * e2[1] + o[1],
        ]
    };
    let mesh = &fixture.mesh;
    for i in 0..n {
        for j in 0..m {
            for (k, corners) in [[(i, j), (i + 1, j), (i + 1, j + 1)], [(i, j), (i + 1, j + 1), (i, j + 1)]]
                .into_iter()
                .enumerate()
            {
                let f = 2 * (i * m + j) + k;
                for (slot, h) in mesh.face_halfedges(f).into_iter().enumerate() {
                    let (a, b) = (corners[slot], corners[(slot + 1) % 3]);
                    let (p, q) = (point(a.0, a.1), point(b.0, b.1));
                    fixture.lengths[mesh.edge(h)] = ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt();
                }
            }
        }
    }
    fixture
}

/// Face sequence of the strip of cells in row `j` of a torus grid, running in
/// increasing `i`.
pub fn torus_row_strip(n: usize, m: usize, j: usize) -> Vec<FaceId> {
    (0..n).flat_map(|i| [2 * (i * m + j) + 1, 2 * (i * m + j)]).collect()
}

/// Face sequence of the strip of cells in column `i` of a torus grid, running
/// in increasing `j`.
pub fn torus_column_strip(_n: usize, m: usize, i: usize) -> Vec<FaceId> {
    (0..m).flat_map(|j| [2 * (i * m + j), 2 * (i * m + j) + 1]).collect()
}

/// Two 3×3 torus grids joined by a triangulated tube (genus 2).
pub fn genus_two() -> Fixture {
    let a = torus_grid(3, 3);
    let nb = a.positions.len();
    let mut positions = a.positions.clone();
    positions.extend(a.positions.iter().map(|p| [p[0] + 7.0, p[1], p[2]]));
    let mut faces: Vec<[VertexId; 3]> = Vec::new();
    for (k, f) in a.faces.iter().enumerate() {
        if k != 0 {
            faces.push(*f);
            faces.push(f.map(|v| v + nb));
        }
    }
    let ta = a.faces[0];
    let tb = ta.map(|v| v + nb);
    let b = |k: isize| tb[k.rem_euclid(3) as usize];
    for k in 0..3isize {
        let (ak, ak1) = (ta[k as usize], ta[((k + 1) % 3) as usize]);
        faces.push([ak, ak1, b(-k - 1)]);
        faces.push([ak, b(-k - 1), b(-k)]);
    }
    Fixture::from_positions(positions, faces)
}

/// Six-face sphere built around a quad `a, b, c, d` whose upper triangle
/// `(a, b, c)` is nearly degenerate: `c` sits at height `delta` above the
/// midpoint of `ab`. Vertices are `a = 0, b = 1, c = 2, d = 3, p = 4`; face 0
/// is the near-degenerate triangle and face 1 its partner across `ab`.
pub fn pillow(delta: f64) -> Fixture {
    let positions = vec![
        [0.0, 0.0, 0.0],
        [2.0, 0.0, 0.0],
        [1.0, delta, 0.0],
        [1.0, -1.0, 0.0],
        [1.0, 0.0, -1.0],
    ];
    let faces = vec![[0, 1, 2], [1, 0, 3], [2, 1, 4], [0, 2, 4], [3, 0, 4], [1, 3, 4]];
    Fixture::from_positions(positions, faces)
}

/// Icosahedron refined `subdivisions` times with vertices projected to the
/// unit sphere. Three subdivisions give 642 vertices and 1280 faces.
pub fn icosphere(subdivisions: usize) -> Fixture {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut positions: Vec<[f64; 3]> = [
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ]
    .into_iter()
    .map(normalize)
    .collect();
    let mut faces: Vec<[VertexId; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..subdivisions {
        let mut midpoints: HashMap<(VertexId, VertexId), VertexId> = HashMap::new();
        let mut midpoint = |a: VertexId, b: VertexId, positions: &mut Vec<[f64; 3]>| {
            *midpoints.entry((a.min(b), a.max(b))).or_insert_with(|| {
                let (p, q) = (positions[a], positions[b]);
                positions.push(normalize([p[0] + q[0], p[1] + q[1], p[2] + q[2]]));
                positions.len() - 1
            })
        };
        let mut refined = Vec::with_capacity(4 * faces.len());
        for [a, b, c] in faces {
            let ab = midpoint(a, b, &mut positions);
            let bc = midpoint(b, c, &mut positions);
            let ca = midpoint(c, a, &mut positions);
            refined.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = refined;
    }
    Fixture::from_positions(positions, faces)
}

/// The vertices of `fixture` nearest to the eight corners of the cube
/// `[-1, 1]³`, in corner order.
pub fn cube_corner_vertices(fixture: &Fixture) -> Vec<VertexId> {
    let mut chosen = Vec::with_capacity(8);
    for corner in 0..8 {
        let target = normalize([
            if corner & 1 == 0 { -1.0 } else { 1.0 },
            if corner & 2 == 0 { -1.0 } else { 1.0 },
            if corner & 4 == 0 { -1.0 } else { 1.0 },
        ]);
        let best = (0..fixture.positions.len())
            .filter(|v| !chosen.contains(v))
            .min_by(|&u, &v| {
                distance(fixture.positions[u], target).total_cmp(&distance(fixture.positions[v], target))
            })
            .expect("fixture has at least eight vertices");
        chosen.push(best);
    }
    chosen
}

fn normalize(p: [f64; 3]) -> [f64; 3] {
    let n = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
    [p[0] / n, p[1] / n, p[2] / n]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        let t = torus_grid(3, 3);
        assert_eq!((t.mesh.vertex_count(), t.mesh.edge_count(), t.mesh.face_count()), (9, 27, 18));
        assert_eq!(t.mesh.genus().unwrap(), 1);
        let s = icosphere(3);
        assert_eq!((s.mesh.vertex_count(), s.mesh.face_count()), (642, 1280));
        assert_eq!(s.mesh.genus().unwrap(), 0);
        assert_eq!(pillow(1e-3).mesh.genus().unwrap(), 0);
    }

    #[test]
    fn flat_torus_is_equilateral() {
        let t = flat_torus(4, 5, None);
        assert!(t.lengths.iter().all(|l| (l - 1.0).abs() < 1e-14));
    }
}
