//! Reference values computed independently at high precision.

mod common;

use std::f64::consts::PI;

use simmap::fixtures;
use simmap::lobachevsky::{lobachevsky, lobachevsky_unchecked};
use simmap::metric::{curvatures, triangle_angles, triangle_angles_clamped, CornerMetric};

use common::lobachevsky_quadrature;

const REFERENCE: [(f64, f64); 7] = [
    (PI / 6.0, 0.507_470_803_204_826_8),
    (PI / 3.0, 0.338_313_868_803_217_9),
    (PI / 4.0, 0.457_982_797_088_609_5),
    (PI / 2.0, 0.0),
    (1.0, 0.363_573_025_431_639_6),
    (2.0, -0.284_071_972_214_934_9),
    (3.0, -0.320_391_332_850_861_6),
];

#[test]
fn lobachevsky_reference_values() {
    for (theta, expected) in REFERENCE {
        let v = lobachevsky(theta).unwrap();
        assert!((v - expected).abs() <= 1e-14, "Λ({theta}) = {v}, expected {expected}");
        assert!((lobachevsky_quadrature(theta) - expected).abs() <= 1e-13);
    }
}

#[test]
fn lobachevsky_symmetries() {
    for i in 1..50 {
        let t = PI * i as f64 / 50.0;
        assert!((lobachevsky_unchecked(t) + lobachevsky_unchecked(PI - t)).abs() <= 1e-15);
        // Λ(2θ) = 2Λ(θ) + 2Λ(θ + π/2).
        let t = t / 2.0;
        let lhs = lobachevsky_unchecked(2.0 * t);
        let rhs = 2.0 * lobachevsky_unchecked(t) + 2.0 * lobachevsky_unchecked(t + PI / 2.0);
        assert!((lhs - rhs).abs() <= 1e-14);
    }
}

#[test]
fn equilateral_energy_term() {
    let three = 3.0 * lobachevsky(PI / 3.0).unwrap();
    assert!((three - 1.014_941_606_409_653_6).abs() <= 1e-14);
}

#[test]
fn nearly_flat_triangle_angle() {
    let l = [1.0f64, 1.0, 2.0 - 1e-9];
    let mu = l.map(|x| 2.0 * x.ln());
    let a = triangle_angles(mu).unwrap();
    assert!((a[2] - 3.141_529_408_036_587).abs() <= 1e-9);
    assert_eq!(triangle_angles_clamped([0.0, 0.0, 2.0 * 2f64.ln()]), [0.0, 0.0, PI]);
}

#[test]
fn regular_tetrahedron_angle_sums() {
    let f = fixtures::tetrahedron();
    let m = CornerMetric::from_edge_metric(&f.mesh, &f.metric());
    let c = curvatures(&m.angles().unwrap(), &m.mesh, &[]);
    for t in c.theta {
        assert!((t - PI).abs() <= 1e-14);
    }
}
