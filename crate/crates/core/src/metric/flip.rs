use std::f64::consts::PI;

use nalgebra::Complex;

use super::{triangle_angles_clamped, CornerMetric};
use crate::energy::triangle_energy_clamped;
use crate::error::{Error, Result};
use crate::mesh::{EdgeId, FlipRecord};

/// Angle sums at the endpoints of the flipped edge must stay this far below
/// `π` for the new diagonal to lie inside the quad.
const CONVEXITY_SLACK: f64 = 1e-12;
/// New diagonals shorter than this, relative to the old one, are rejected.
const MIN_DIAGONAL: f64 = 1e-12;

/// Result of an intrinsic flip.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlipOutcome {
    pub record: FlipRecord,
    /// Constant added to the six log-lengths of the new triangles so the
    /// summed triangle energy is unchanged.
    pub gauge_shift: f64,
}

/// Flips edge `e` intrinsically.
///
/// Both triangles are laid out in one chart with the shared edge from
/// `(0, 0)` to `(1, 0)`; the new diagonal's length is measured there, and the
/// new triangles take their log-lengths from the same chart. A common shift
/// of those log-lengths then restores the summed energy of the two
/// triangles, which otherwise depends on the per-triangle scale.
pub fn intrinsic_flip(metric: &mut CornerMetric, e: EdgeId) -> Result<FlipOutcome> {
    let mesh = &metric.mesh;
    let h = mesh.edge_halfedge(e);
    let twin = mesh.sibling(h).ok_or(Error::NotClosed(h))?;
    let (n1, p1, n2, p2) = (mesh.next(h), mesh.prev(h), mesh.next(twin), mesh.prev(twin));
    let mu = &metric.mu;
    let t1 = [mu[h], mu[n1], mu[p1]];
    let t2 = [mu[twin], mu[n2], mu[p2]];
    let [_, at_a1, at_b1] = triangle_angles_clamped(t1);
    let [_, at_b2, at_a2] = triangle_angles_clamped(t2);
    if at_a1 + at_a2 >= PI - CONVEXITY_SLACK || at_b1 + at_b2 >= PI - CONVEXITY_SLACK {
        return Err(Error::FlipBlocked(e));
    }

    let len1 = |x: f64| ((x - t1[0]) / 2.0).exp();
    let len2 = |x: f64| ((x - t2[0]) / 2.0).exp();
    let (ca, bc) = (len1(t1[2]), len1(t1[1]));
    let (ad, db) = (len2(t2[1]), len2(t2[2]));
    let c = Complex::from_polar(ca, at_a1);
    let d = Complex::from_polar(ad, -at_a2);
    let cd = (c - d).norm();
    if !(cd > MIN_DIAGONAL) {
        return Err(Error::ZeroLengthDiagonal(e));
    }

    let energy_before = triangle_energy_clamped(t1) + triangle_energy_clamped(t2);
    let base = t1[0];
    let log = |l: f64| base + 2.0 * l.ln();
    // New triangles (h, p1, n2) and (twin, p2, n1); h runs d→c.
    let new1 = [log(cd), log(ca), log(ad)];
    let new2 = [log(cd), log(db), log(bc)];
    let energy_after = triangle_energy_clamped(new1) + triangle_energy_clamped(new2);
    // Shifting all six log-lengths by s changes the summed energy by π s.
    let gauge_shift = (energy_before - energy_after) / PI;

    let record = metric.mesh.flip_edge(e)?;
    let mu = &mut metric.mu;
    for (slot, x) in [h, p1, n2].into_iter().enumerate() {
        mu[x] = new1[slot] + gauge_shift;
    }
    for (slot, x) in [twin, p2, n1].into_iter().enumerate() {
        mu[x] = new2[slot] + gauge_shift;
    }
    Ok(FlipOutcome { record, gauge_shift })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::metric::{curvatures, EdgeMetric};

    #[test]
    fn rhombus_diagonal_is_sqrt_three() {
        let f = fixtures::tetrahedron();
        let g = EdgeMetric::new(&f.mesh, vec![1.0; 6]).unwrap();
        let mut m = CornerMetric::from_edge_metric(&f.mesh, &g);
        let theta = curvatures(&m.angles().unwrap(), &m.mesh, &[]).theta;
        let out = intrinsic_flip(&mut m, 0).unwrap();
        let r = out.record;
        let l = |x: usize| (m.mu[x] / 2.0).exp();
        assert!((l(r.h) / l(r.p1) - 3f64.sqrt()).abs() < 1e-14);
        let after = curvatures(&m.angles().unwrap(), &m.mesh, &[]).theta;
        for (a, b) in theta.iter().zip(&after) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
