#![allow(dead_code)]

use std::f64::consts::{FRAC_PI_2, PI};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use simmap::fixtures::{self, Fixture};
use simmap::io::SignatureSpec;
use simmap::mesh::{DualCycle, EdgeId, HalfedgeMesh};
use simmap::metric::CornerMetric;
use simmap::solver::{default_loops, SolverState};
use simmap::HolonomySignature;

/// Signature with `k` at the cube corners of an icosphere and 4 elsewhere.
pub fn cube_signature(f: &Fixture, k: i64) -> HolonomySignature {
    let mut vertex_k = vec![4; f.mesh.vertex_count()];
    for v in fixtures::cube_corner_vertices(f) {
        vertex_k[v] = k;
    }
    HolonomySignature {
        vertex_k,
        loop_k: vec![],
        excluded: f.mesh.vertex_count() - 1,
    }
}

/// Flat signature on a torus, with loop targets rounded from the initial
/// curvature and shifted by `shift`.
pub fn torus_signature(f: &Fixture, loops: &[DualCycle], shift: &[i64]) -> HolonomySignature {
    let initial = CornerMetric::from_edge_metric(&f.mesh, &f.metric());
    let mut sig = SignatureSpec::default().resolve(&initial, loops).unwrap();
    for (k, s) in sig.loop_k.iter_mut().zip(shift) {
        *k += s;
    }
    sig
}

pub fn strip_loops(f: &Fixture, n: usize, m: usize) -> Vec<DualCycle> {
    vec![
        DualCycle::from_faces(&f.mesh, &fixtures::torus_row_strip(n, m, 0)).unwrap(),
        DualCycle::from_faces(&f.mesh, &fixtures::torus_column_strip(n, m, 0)).unwrap(),
    ]
}

/// The three sample states used by the derivative and convexity checks.
pub fn sample_state(kind: usize) -> SolverState {
    match kind % 3 {
        0 => {
            let f = fixtures::tetrahedron();
            let sig = HolonomySignature {
                vertex_k: vec![2; 4],
                loop_k: vec![],
                excluded: 3,
            };
            SolverState::new(&f.mesh, &f.metric(), vec![], sig).unwrap()
        }
        1 => {
            let f = fixtures::torus_grid(6, 6);
            let loops = default_loops(&f.mesh).unwrap();
            let sig = torus_signature(&f, &loops, &[0, 0]);
            SolverState::new(&f.mesh, &f.metric(), loops, sig).unwrap()
        }
        _ => {
            let f = fixtures::icosphere(1);
            let sig = cube_signature(&f, 3);
            SolverState::new(&f.mesh, &f.metric(), vec![], sig).unwrap()
        }
    }
}

/// A random coefficient vector at which every triangle is valid.
pub fn random_feasible_y(state: &SolverState, rng: &mut ChaCha8Rng, scale: f64) -> Vec<f64> {
    let mut s = scale;
    loop {
        let y: Vec<f64> = (0..state.basis.len()).map(|_| rng.random_range(-s..s)).collect();
        if let Ok(m) = state.metric_at(&y) {
            if m.min_margin().1 > 1e-3 {
                return y;
            }
        }
        s *= 0.5;
    }
}

/// Edges crossed by a random spanning tree of the dual graph.
pub fn random_dual_tree(mesh: &HalfedgeMesh, rng: &mut ChaCha8Rng) -> Vec<EdgeId> {
    let mut parent: Vec<usize> = (0..mesh.face_count()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut edges: Vec<EdgeId> = (0..mesh.edge_count()).collect();
    edges.shuffle(rng);
    let mut tree = Vec::new();
    for e in edges {
        let (h, s) = mesh.edge_halfedges(e);
        let (a, b) = (find(&mut parent, mesh.face(h)), find(&mut parent, mesh.face(s.unwrap())));
        if a != b {
            parent[a] = b;
            tree.push(e);
        }
    }
    tree
}

pub fn quarter(x: f64) -> f64 {
    x / FRAC_PI_2
}

/// 20-point Gauss–Legendre nodes and weights on `[−1, 1]`.
fn gauss_legendre() -> Vec<(f64, f64)> {
    const N: usize = 20;
    let mut out = Vec::with_capacity(N);
    for i in 1..=N {
        let mut x = (PI * (i as f64 - 0.25) / (N as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=N {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = N as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-17 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

fn gl(f: &dyn Fn(f64) -> f64, a: f64, b: f64, rule: &[(f64, f64)]) -> f64 {
    let (c, r) = (0.5 * (a + b), 0.5 * (b - a));
    r * rule.iter().map(|&(x, w)| w * f(c + r * x)).sum::<f64>()
}

fn adaptive(f: &dyn Fn(f64) -> f64, a: f64, b: f64, whole: f64, rule: &[(f64, f64)], depth: usize) -> f64 {
    let m = 0.5 * (a + b);
    let (l, r) = (gl(f, a, m, rule), gl(f, m, b, rule));
    if depth == 0 || ((l + r) - whole).abs() <= 1e-16 {
        return l + r;
    }
    adaptive(f, a, m, l, rule, depth - 1) + adaptive(f, m, b, r, rule, depth - 1)
}

/// `−∫₀^θ ln|2 sin t| dt` by splitting off the logarithmic singularities in
/// closed form and integrating the smooth remainder adaptively.
pub fn lobachevsky_quadrature(theta: f64) -> f64 {
    let xlogx = |x: f64| if x == 0.0 { 0.0 } else { x * x.ln() };
    let smooth = |t: f64| {
        let u = t.min(PI - t);
        (u.sin() / u).ln() - (PI - u).ln()
    };
    let rule = gauss_legendre();
    let integral = if theta == 0.0 {
        0.0
    } else {
        adaptive(&smooth, 0.0, theta, gl(&smooth, 0.0, theta, &rule), &rule, 30)
    };
    let rest = PI - theta;
    let log_t = xlogx(theta) - theta;
    let log_rest = xlogx(PI) - PI - (xlogx(rest) - rest);
    -(theta * 2f64.ln() + log_t + log_rest + integral)
}
