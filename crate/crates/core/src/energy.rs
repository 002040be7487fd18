//! Angle constraints, their Jacobian, and the convex energy behind them.
//!
//! With corner log-lengths `μ`, the per-triangle energy
//! `g(μ) = Σ_ℓ ½ μ_ℓ α_ℓ + Λ(α_ℓ)` has gradient `½ α`. Writing
//! `μ = μ₀ + P y`, the sum over triangles minus `½ bᵀy` has gradient `½ L`,
//! where `L = Pᵀα − b` stacks the vertex angle-sum and loop curvature
//! residuals. Its Hessian `½ Pᵀ D P` uses the per-triangle cotangent blocks
//! `D = ∂α/∂μ`, so Newton's method on `L = 0` minimizes a convex energy.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::FormBasis;
use crate::linalg::CscMatrix;
use crate::lobachevsky::lobachevsky_unchecked;
use crate::mesh::{DualCycle, VertexId};
use crate::metric::{curvatures, triangle_angles, triangle_angles_clamped, CornerMetric};

/// Target quarter-turn counts per vertex and per homology loop.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HolonomySignature {
    pub vertex_k: Vec<i64>,
    pub loop_k: Vec<i64>,
    pub excluded: VertexId,
}

impl HolonomySignature {
    /// Checks sizes, positivity of vertex targets and the Gauss–Bonnet
    /// identity `Σ_r (4 − k_r) = 8 − 8g`.
    pub fn validate(&self, vertex_count: usize, genus: usize, loop_count: usize) -> Result<()> {
        if self.vertex_k.len() != vertex_count {
            return Err(Error::InfeasibleSignature(format!(
                "{} vertex targets for {} vertices",
                self.vertex_k.len(),
                vertex_count
            )));
        }
        if self.loop_k.len() != loop_count {
            return Err(Error::InfeasibleSignature(format!(
                "{} loop targets for {} loops",
                self.loop_k.len(),
                loop_count
            )));
        }
        if self.excluded >= vertex_count {
            return Err(Error::InfeasibleSignature(format!(
                "excluded vertex {} out of range",
                self.excluded
            )));
        }
        if let Some(v) = self.vertex_k.iter().position(|&k| k < 1) {
            return Err(Error::InfeasibleSignature(format!(
                "vertex {v} has k = {}; targets must be at least 1",
                self.vertex_k[v]
            )));
        }
        let total: i64 = self.vertex_k.iter().map(|k| 4 - k).sum();
        let expected = 8 - 8 * genus as i64;
        if total != expected {
            return Err(Error::InfeasibleSignature(format!(
                "Gauss-Bonnet violated: sum of (4 - k) is {total}, expected {expected} for genus {genus}"
            )));
        }
        Ok(())
    }

    /// Right-hand side `b`: `k π/2` per basis column.
    pub fn targets(&self, basis: &FormBasis) -> Vec<f64> {
        let mut b: Vec<f64> = basis
            .column_vertices()
            .iter()
            .map(|&v| self.vertex_k[v] as f64 * PI / 2.0)
            .collect();
        b.extend(self.loop_k.iter().map(|&k| k as f64 * PI / 2.0));
        b
    }
}

/// `∂α_a/∂μ_b` for one triangle: `½(cot α_b' + cot α_b'')` on the diagonal
/// and `−½ cot α_c` off it, `c` being the third corner.
pub fn angle_jacobian(alpha: [f64; 3]) -> [[f64; 3]; 3] {
    let cot = alpha.map(|a| 1.0 / a.tan());
    let mut d = [[0.0; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            d[a][b] = if a == b {
                0.5 * (cot[(a + 1) % 3] + cot[(a + 2) % 3])
            } else {
                -0.5 * cot[3 - a - b]
            };
        }
    }
    d
}

/// Triangle energy and its gradient `½ α` for a strictly valid triangle.
pub fn triangle_energy(mu: [f64; 3]) -> Result<(f64, [f64; 3])> {
    let alpha = triangle_angles(mu).map_err(|margin| Error::TriangleInequalityViolated { face: 0, margin })?;
    Ok((energy_from_angles(mu, alpha), alpha.map(|a| 0.5 * a)))
}

/// Triangle energy extended continuously to degenerate triangles.
pub fn triangle_energy_clamped(mu: [f64; 3]) -> f64 {
    energy_from_angles(mu, triangle_angles_clamped(mu))
}

fn energy_from_angles(mu: [f64; 3], alpha: [f64; 3]) -> f64 {
    (0..3).map(|l| 0.5 * mu[l] * alpha[l] + lobachevsky_unchecked(alpha[l])).sum()
}

/// `Σ_T g(μ_T)` over all faces.
pub fn triangle_energy_sum(metric: &CornerMetric) -> Result<f64> {
    let mut total = 0.0;
    for f in 0..metric.mesh.face_count() {
        let (g, _) = triangle_energy(metric.face_mu(f)).map_err(|e| match e {
            Error::TriangleInequalityViolated { margin, .. } => Error::TriangleInequalityViolated { face: f, margin },
            other => other,
        })?;
        total += g;
    }
    Ok(total)
}

/// Residual `L`: vertex rows `Θ_r − Θ̂_r` in basis order, then loop rows
/// `κ_s − κ̂_s`.
pub fn residual(
    metric: &CornerMetric,
    loops: &[DualCycle],
    basis: &FormBasis,
    sig: &HolonomySignature,
) -> Result<Vec<f64>> {
    let angles = metric.angles()?;
    let state = curvatures(&angles, &metric.mesh, loops);
    let b = sig.targets(basis);
    let mut l: Vec<f64> = basis.column_vertices().iter().map(|&v| state.theta[v]).collect();
    l.extend(state.kappa);
    Ok(l.iter().zip(&b).map(|(x, t)| x - t).collect())
}

/// The same residual assembled as `Pᵀ α − b`.
pub fn residual_via_basis(metric: &CornerMetric, basis: &FormBasis, sig: &HolonomySignature) -> Result<Vec<f64>> {
    let angles = metric.angles()?;
    let b = sig.targets(basis);
    Ok(basis.p().tr_mul_vec(&angles.alpha).iter().zip(&b).map(|(x, t)| x - t).collect())
}

/// Block-diagonal matrix of per-triangle angle derivatives `∂α/∂μ`.
pub fn angle_derivatives(metric: &CornerMetric) -> Result<CscMatrix> {
    let angles = metric.angles()?;
    let mesh = &metric.mesh;
    let mut t = Vec::with_capacity(9 * mesh.face_count());
    for f in 0..mesh.face_count() {
        let hs = mesh.face_halfedges(f);
        let d = angle_jacobian(hs.map(|h| angles.alpha[h]));
        for a in 0..3 {
            for b in 0..3 {
                t.push((hs[a], hs[b], d[a][b]));
            }
        }
    }
    let n = mesh.halfedge_count();
    Ok(CscMatrix::from_triplets(n, n, &t))
}

/// Jacobian `A = Pᵀ D P` of the residual with respect to the basis
/// coefficients.
pub fn jacobian(metric: &CornerMetric, basis: &FormBasis) -> Result<CscMatrix> {
    let d = angle_derivatives(metric)?;
    Ok(basis.p().transpose().mul(&d.mul(basis.p())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn right_triangle_derivatives() {
        // Sides (3, 4, 5): angles opposite are asin(3/5), asin(4/5), π/2.
        let alpha = [(0.6f64).asin(), (0.8f64).asin(), PI / 2.0];
        let d = angle_jacobian(alpha);
        let mu = [2.0 * 3f64.ln(), 2.0 * 4f64.ln(), 2.0 * 5f64.ln()];
        let h = 1e-6;
        for b in 0..3 {
            let mut up = mu;
            let mut down = mu;
            up[b] += h;
            down[b] -= h;
            let (au, ad) = (triangle_angles(up).unwrap(), triangle_angles(down).unwrap());
            for a in 0..3 {
                let fd = (au[a] - ad[a]) / (2.0 * h);
                assert!((fd - d[a][b]).abs() < 1e-8, "d[{a}][{b}] = {} vs {fd}", d[a][b]);
            }
        }
    }

    #[test]
    fn gauss_bonnet_message() {
        let sig = HolonomySignature {
            vertex_k: vec![2, 2, 2, 3],
            loop_k: vec![],
            excluded: 3,
        };
        let err = sig.validate(4, 0, 0).unwrap_err();
        assert!(err.to_string().contains("Gauss-Bonnet"));
    }
}
