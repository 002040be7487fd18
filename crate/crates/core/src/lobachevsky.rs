//! Milnor's Lobachevsky function `Λ(θ) = −∫₀^θ ln|2 sin t| dt`.
//!
//! `Λ` is odd and π-periodic, so arguments are folded into `[0, π/2]` and
//! evaluated as `½ Cl₂(2θ)` with the Clausen function expanded around zero:
//!
//! `Cl₂(x) = x − x ln x + Σ_{n≥1} ζ(2n) x^{2n+1} / (n (2n+1) (2π)^{2n})`.
//!
//! On `[0, π]` the terms shrink at least like `4⁻ⁿ`, so a fixed number of
//! terms reaches full double precision.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};

const TERMS: usize = 30;

/// Series coefficients `ζ(2n) / (n (2n+1) (2π)^{2n})` for `n = 1..=TERMS`.
fn coefficients() -> &'static [f64; TERMS] {
    static COEFFS: OnceLock<[f64; TERMS]> = OnceLock::new();
    COEFFS.get_or_init(|| {
        let pi2 = PI * PI;
        let known = [
            pi2 / 6.0,
            pi2 * pi2 / 90.0,
            pi2 * pi2 * pi2 / 945.0,
            pi2 * pi2 * pi2 * pi2 / 9450.0,
        ];
        let mut out = [0.0; TERMS];
        let two_pi_sq = 4.0 * pi2;
        let mut scale = 1.0;
        for (i, c) in out.iter_mut().enumerate() {
            let n = i + 1;
            scale *= two_pi_sq;
            let zeta = known.get(i).copied().unwrap_or_else(|| zeta_even(2 * n));
            *c = zeta / (n as f64 * (2 * n + 1) as f64 * scale);
        }
        out
    })
}

/// `ζ(s)` for even `s ≥ 10`, where direct summation converges quickly.
fn zeta_even(s: usize) -> f64 {
    let tail: f64 = (2..=60).rev().map(|k| (k as f64).powi(-(s as i32))).sum();
    1.0 + tail
}

/// Clausen function `Cl₂(x)` for `x ∈ [0, π]`.
fn clausen_small(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let x2 = x * x;
    let mut sum = 0.0;
    for &c in coefficients().iter().rev() {
        sum = sum * x2 + c;
    }
    x - x * x.ln() + x * x2 * sum
}

/// Evaluates `Λ(θ)` for any finite θ by periodicity and oddness.
pub fn lobachevsky_unchecked(theta: f64) -> f64 {
    let mut t = theta.rem_euclid(PI);
    let mut sign = 1.0;
    if t > PI / 2.0 {
        t = PI - t;
        sign = -1.0;
    }
    sign * 0.5 * clausen_small(2.0 * t)
}

/// `Λ(θ)` for `θ ∈ [0, π]`.
pub fn lobachevsky(theta: f64) -> Result<f64> {
    if !(0.0..=PI).contains(&theta) {
        return Err(Error::DomainError(theta));
    }
    if theta == PI {
        return Ok(0.0);
    }
    Ok(lobachevsky_unchecked(theta))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_are_exact_zero() {
        assert_eq!(lobachevsky(0.0).unwrap(), 0.0);
        assert_eq!(lobachevsky(PI).unwrap(), 0.0);
    }

    #[test]
    fn rejects_outside_domain() {
        assert!(matches!(lobachevsky(-0.1), Err(Error::DomainError(_))));
        assert!(matches!(lobachevsky(3.2), Err(Error::DomainError(_))));
    }

    #[test]
    fn maximum_at_sixth_turn() {
        // Λ peaks at π/6, where Λ'(θ) = −ln(2 sin θ) vanishes.
        let h = 1e-4;
        let c = lobachevsky(PI / 6.0).unwrap();
        assert!(c > lobachevsky(PI / 6.0 - h).unwrap());
        assert!(c > lobachevsky(PI / 6.0 + h).unwrap());
    }
}
