//! Newton iteration on the angle constraints with truncation and flips.
//!
//! The solver works in basis coefficients `y`. Each iteration solves
//! `A Δy = −L`, then searches along `μ + t PΔy`. Steps that would break a
//! triangle inequality are cut short where the first triangle degenerates;
//! that triangle's longest edge is flipped intrinsically, the dual loops are
//! rerouted, and the basis is rebuilt for the new connectivity.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::energy::{jacobian, residual, triangle_energy_sum, HolonomySignature};
use crate::error::{Error, Result};
use crate::forms::{build_basis, ClosedOneForm, FormBasis};
use crate::linalg::{solve_spd, CscMatrix};
use crate::mesh::{homology_loops, tree_cotree, DualCycle, EdgeId, HalfedgeMesh};
use crate::metric::{intrinsic_flip, margin_from_mu, CornerMetric, EdgeMetric, FlipOutcome};

/// Samples per triangle when locating the first degeneracy along a step.
const FEASIBILITY_SAMPLES: usize = 16;
/// Steps shorter than this without a flip count as a stalled search.
const MIN_STEP: f64 = 1e-14;
/// Tolerance on loop curvature changes across a flip.
const FLIP_CURVATURE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    /// Stop when `‖L‖∞` falls to this value (radians).
    pub tolerance: f64,
    pub max_iterations: usize,
    pub armijo: f64,
    pub backtrack: f64,
    /// Triangles whose margin drops to this value are treated as degenerate.
    pub degeneracy_margin: f64,
    /// Maximum number of flips; `None` means `100 · |E|`.
    pub flip_budget: Option<usize>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            max_iterations: 100,
            armijo: 1e-4,
            backtrack: 0.5,
            degeneracy_margin: 1e-10,
            flip_budget: None,
        }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return Err(Error::InfeasibleSignature(format!("tolerance {} must be positive", self.tolerance)));
        }
        if !(self.backtrack > 0.0 && self.backtrack < 1.0) {
            return Err(Error::InfeasibleSignature(format!(
                "backtrack factor {} must lie in (0, 1)",
                self.backtrack
            )));
        }
        Ok(())
    }
}

/// One row of the solver trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub iteration: usize,
    pub residual_inf: f64,
    pub energy: f64,
    pub step_length: f64,
    pub flips: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub records: Vec<TraceRecord>,
}

impl Trace {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("iteration,residual_inf,energy,step_length,flips\n");
        for r in &self.records {
            out.push_str(&format!(
                "{},{:e},{:.17e},{:e},{}\n",
                r.iteration, r.residual_inf, r.energy, r.step_length, r.flips
            ));
        }
        out
    }
}

/// A Newton direction in basis coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct NewtonStep {
    pub dy: Vec<f64>,
    /// `‖L‖∞`, the residual the linear model expects to remove.
    pub predicted_residual_decrease: f64,
}

/// What a line search did.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub step_length: f64,
    pub flips: usize,
}

#[derive(Debug, Clone)]
pub struct SolverState {
    pub metric: CornerMetric,
    pub loops: Vec<DualCycle>,
    pub basis: FormBasis,
    pub signature: HolonomySignature,
    /// Accumulated closed form on the current connectivity.
    pub xi: Vec<f64>,
    /// Accumulated `−½ bᵀy` part of the energy.
    pub energy_offset: f64,
    pub iterations: usize,
    pub flips: usize,
    pub trace: Trace,
}

impl SolverState {
    /// Starts from `μ = λ^G`, validating the signature first.
    pub fn new(
        mesh: &HalfedgeMesh,
        metric: &EdgeMetric,
        loops: Vec<DualCycle>,
        signature: HolonomySignature,
    ) -> Result<Self> {
        let genus = mesh.genus()?;
        signature.validate(mesh.vertex_count(), genus, loops.len())?;
        if loops.len() != 2 * genus {
            return Err(Error::InfeasibleSignature(format!(
                "{} loops given for genus {genus}; a homology basis has {}",
                loops.len(),
                2 * genus
            )));
        }
        let basis = build_basis(mesh, &loops, signature.excluded)?;
        Ok(Self {
            metric: CornerMetric::from_edge_metric(mesh, metric),
            loops,
            basis,
            signature,
            xi: vec![0.0; mesh.halfedge_count()],
            energy_offset: 0.0,
            iterations: 0,
            flips: 0,
            trace: Trace::default(),
        })
    }

    pub fn mesh(&self) -> &HalfedgeMesh {
        &self.metric.mesh
    }

    pub fn targets(&self) -> Vec<f64> {
        self.signature.targets(&self.basis)
    }

    pub fn residual(&self) -> Result<Vec<f64>> {
        residual(&self.metric, &self.loops, &self.basis, &self.signature)
    }

    pub fn jacobian(&self) -> Result<CscMatrix> {
        jacobian(&self.metric, &self.basis)
    }

    /// `E′ = Σ_T g(μ_T) − ½ bᵀy` at the current state.
    pub fn energy(&self) -> Result<f64> {
        Ok(triangle_energy_sum(&self.metric)? + self.energy_offset)
    }

    /// Metric after moving by `y` in coefficient space.
    pub fn metric_at(&self, y: &[f64]) -> Result<CornerMetric> {
        let dmu = self.basis.corner_increment(y)?;
        Ok(self.metric.stepped(&dmu, 1.0))
    }

    /// `E′` after moving by `y`.
    pub fn energy_at(&self, y: &[f64]) -> Result<f64> {
        let b = self.targets();
        let linear: f64 = b.iter().zip(y).map(|(b, y)| b * y).sum();
        Ok(triangle_energy_sum(&self.metric_at(y)?)? + self.energy_offset - 0.5 * linear)
    }

    /// Residual after moving by `y`.
    pub fn residual_at(&self, y: &[f64]) -> Result<Vec<f64>> {
        residual(&self.metric_at(y)?, &self.loops, &self.basis, &self.signature)
    }

    /// Moves the state by `t · dy`.
    pub fn apply_step(&mut self, dy: &[f64], t: f64) -> Result<()> {
        let dmu = self.basis.corner_increment(dy)?;
        self.metric = self.metric.stepped(&dmu, t);
        let dxi = self.basis.w().mul_vec(dy);
        for (x, d) in self.xi.iter_mut().zip(dxi) {
            *x += t * d;
        }
        let b = self.targets();
        self.energy_offset -= 0.5 * t * b.iter().zip(dy).map(|(b, y)| b * y).sum::<f64>();
        Ok(())
    }

    /// Solves `A Δy = −L`.
    pub fn newton_step(&self) -> Result<NewtonStep> {
        let l = self.residual()?;
        let a = self.jacobian()?;
        let rhs: Vec<f64> = l.iter().map(|x| -x).collect();
        let dy = if rhs.is_empty() { Vec::new() } else { solve_spd(&a, &rhs)? };
        Ok(NewtonStep {
            dy,
            predicted_residual_decrease: inf_norm(&l),
        })
    }

    /// Largest `t ≤ 1` keeping every triangle margin at least `threshold`
    /// along `μ + t dμ` (or at its current value, if that is smaller).
    pub fn feasible_step(&self, dmu: &[f64], threshold: f64) -> f64 {
        let mesh = &self.metric.mesh;
        let mut t_max = 1.0_f64;
        for f in 0..mesh.face_count() {
            let hs = mesh.face_halfedges(f);
            let mu0 = hs.map(|h| self.metric.mu[h]);
            let d = hs.map(|h| dmu[h]);
            if d[0] == d[1] && d[1] == d[2] {
                continue;
            }
            let margin = |t: f64| margin_from_mu([mu0[0] + t * d[0], mu0[1] + t * d[1], mu0[2] + t * d[2]]);
            let limit = threshold.min(margin(0.0));
            let mut lo = 0.0;
            for k in 1..=FEASIBILITY_SAMPLES {
                let t = k as f64 / FEASIBILITY_SAMPLES as f64;
                if t >= t_max {
                    break;
                }
                if margin(t) < limit {
                    let mut hi = t;
                    for _ in 0..60 {
                        let mid = 0.5 * (lo + hi);
                        if margin(mid) >= limit {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                    }
                    t_max = t_max.min(lo);
                    break;
                }
                lo = t;
            }
        }
        t_max
    }

    /// Backtracking line search along `dy`, truncated at the first
    /// degeneracy; degenerate triangles at the accepted point are flipped.
    pub fn line_search_and_flip(&mut self, dy: &[f64], options: &SolveOptions) -> Result<StepOutcome> {
        let l0 = self.residual()?;
        let mut dy = dy.to_vec();
        let mut slope = 0.5 * dot(&l0, &dy);
        if !(slope < 0.0) {
            dy = l0.iter().map(|x| -x).collect();
            slope = -0.5 * dot(&l0, &l0);
        }
        let e0 = self.energy()?;
        let noise = energy_noise(&self.metric, self.energy_offset);
        let r0 = inf_norm(&l0);
        let dmu = self.basis.corner_increment(&dy)?;
        let t_max = self.feasible_step(&dmu, options.degeneracy_margin);

        let scaled = |t: f64| dy.iter().map(|d| t * d).collect::<Vec<_>>();
        let acceptable = |state: &Self, t: f64, strict: bool| -> bool {
            let y = scaled(t);
            let Ok(e) = state.energy_at(&y) else {
                return false;
            };
            let bound = e0 + options.armijo * t * slope;
            if e <= bound {
                return true;
            }
            if !strict && e <= e0 {
                return true;
            }
            // Below the resolution of the energy, fall back to the residual.
            if -slope * t <= noise {
                return state.residual_at(&y).map(|l| inf_norm(&l) <= r0).unwrap_or(false);
            }
            false
        };

        if t_max < 1.0 && (t_max == 0.0 || acceptable(self, t_max, false)) {
            self.apply_step(&dy, t_max)?;
            let flips = self.flip_degenerate(options)?;
            if flips == 0 && t_max < MIN_STEP {
                return Err(Error::LineSearchStalled(t_max));
            }
            return Ok(StepOutcome {
                step_length: t_max,
                flips,
            });
        }

        let mut t = if t_max < 1.0 { t_max * options.backtrack } else { 1.0 };
        while !acceptable(self, t, true) {
            t *= options.backtrack;
            if t < MIN_STEP {
                return Err(Error::LineSearchStalled(t));
            }
        }
        self.apply_step(&dy, t)?;
        Ok(StepOutcome { step_length: t, flips: 0 })
    }

    /// Flips the longest edge of every triangle whose margin is at most twice
    /// the degeneracy margin, in ascending face order.
    pub fn flip_degenerate(&mut self, options: &SolveOptions) -> Result<usize> {
        let budget = options.flip_budget.unwrap_or(100 * self.mesh().edge_count());
        let mut count = 0;
        for f in 0..self.mesh().face_count() {
            if self.metric.triangle_margin(f) > 2.0 * options.degeneracy_margin {
                continue;
            }
            let hs = self.mesh().face_halfedges(f);
            let longest = hs
                .into_iter()
                .max_by(|&a, &b| self.metric.mu[a].total_cmp(&self.metric.mu[b]))
                .unwrap();
            if self.flips >= budget {
                return Err(Error::InfiniteFlipSuspected(budget));
            }
            let e = self.mesh().edge(longest);
            self.flip_edge(e)?;
            count += 1;
        }
        Ok(count)
    }

    /// Intrinsically flips edge `e`, reroutes the loops, checks that their
    /// curvature is unchanged, updates `ξ` and rebuilds the basis.
    pub fn flip_edge(&mut self, e: EdgeId) -> Result<FlipOutcome> {
        let before = self.metric.angles_clamped();
        let kappa_before: Vec<f64> = self.loops.iter().map(|l| l.curvature(&before.alpha)).collect();

        let outcome = intrinsic_flip(&mut self.metric, e)?;
        let r = outcome.record;
        let mesh = &self.metric.mesh;
        let loops = self
            .loops
            .iter()
            .enumerate()
            .map(|(s, l)| l.repair(mesh, &r, s))
            .collect::<Result<Vec<_>>>()?;
        let after = self.metric.angles_clamped();
        for (s, l) in loops.iter().enumerate() {
            let deviation = (l.curvature(&after.alpha) - kappa_before[s]).abs();
            if !(deviation <= FLIP_CURVATURE_TOLERANCE) {
                return Err(Error::LoopCurvatureChanged { loop_index: s, deviation });
            }
        }
        self.loops = loops;
        self.xi[r.h] = -(self.xi[r.p1] + self.xi[r.n2]);
        self.xi[r.twin] = -self.xi[r.h];
        self.basis = build_basis(&self.metric.mesh, &self.loops, self.signature.excluded)?;
        self.flips += 1;
        Ok(outcome)
    }

    fn record(&mut self, step_length: f64, flips: usize) -> Result<f64> {
        let r = inf_norm(&self.residual()?);
        let energy = self.energy()?;
        self.trace.records.push(TraceRecord {
            iteration: self.iterations,
            residual_inf: r,
            energy,
            step_length,
            flips,
        });
        Ok(r)
    }
}

/// Rough absolute precision of `E′` in floating point.
fn energy_noise(metric: &CornerMetric, offset: f64) -> f64 {
    let scale: f64 = (0..metric.mesh.face_count())
        .map(|f| {
            let mu = metric.face_mu(f);
            mu.iter().map(|m| m.abs()).sum::<f64>() + 1.0
        })
        .sum::<f64>()
        + offset.abs();
    64.0 * f64::EPSILON * scale
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// A converged solve.
#[derive(Debug, Clone)]
pub struct Solution {
    pub metric: CornerMetric,
    pub loops: Vec<DualCycle>,
    pub basis: FormBasis,
    pub signature: HolonomySignature,
    pub xi: ClosedOneForm,
    /// Least-squares coefficients of `xi` in the final basis.
    pub y: Vec<f64>,
    pub iterations: usize,
    pub flips: usize,
    pub residual_inf: f64,
    pub energy: f64,
    pub trace: Trace,
}

/// A failed solve, with whatever state and trace were reached.
#[derive(Debug, Clone)]
pub struct SolveFailure {
    pub error: Error,
    pub trace: Trace,
    pub state: Option<Box<SolverState>>,
}

impl fmt::Display for SolveFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.error)
    }
}

impl std::error::Error for SolveFailure {}

impl From<Error> for SolveFailure {
    fn from(error: Error) -> Self {
        Self {
            error,
            trace: Trace::default(),
            state: None,
        }
    }
}

/// Homology loops from a tree–cotree decomposition rooted at vertex 0.
pub fn default_loops(mesh: &HalfedgeMesh) -> Result<Vec<DualCycle>> {
    homology_loops(mesh, &tree_cotree(mesh, 0)?)
}

/// Runs Newton's method from `μ = λ^G` until `‖L‖∞ ≤ tolerance`.
pub fn solve(
    mesh: &HalfedgeMesh,
    metric: &EdgeMetric,
    loops: Vec<DualCycle>,
    signature: &HolonomySignature,
    options: &SolveOptions,
) -> std::result::Result<Solution, SolveFailure> {
    options.validate()?;
    let state = SolverState::new(mesh, metric, loops, signature.clone())?;
    run(state, options)
}

/// Continues Newton's method from an existing state.
pub fn run(mut state: SolverState, options: &SolveOptions) -> std::result::Result<Solution, SolveFailure> {
    let fail = |state: SolverState, error: Error| SolveFailure {
        error,
        trace: state.trace.clone(),
        state: Some(Box::new(state)),
    };
    let mut residual_inf = match state.record(0.0, 0) {
        Ok(r) => r,
        Err(e) => return Err(fail(state, e)),
    };
    while residual_inf > options.tolerance {
        if state.iterations >= options.max_iterations {
            return Err(fail(state, Error::MaxIterations(options.max_iterations)));
        }
        let step = match state.newton_step() {
            Ok(s) => s,
            Err(e) => return Err(fail(state, e)),
        };
        let outcome = match state.line_search_and_flip(&step.dy, options) {
            Ok(o) => o,
            Err(e) => return Err(fail(state, e)),
        };
        state.iterations += 1;
        residual_inf = match state.record(outcome.step_length, outcome.flips) {
            Ok(r) => r,
            Err(e) => return Err(fail(state, e)),
        };
    }

    let xi = ClosedOneForm::from_values_unchecked(state.xi.clone());
    let y = match state.basis.coefficients_of(&xi) {
        Ok(y) => y,
        Err(e) => return Err(fail(state, e)),
    };
    let energy = state.trace.records.last().map_or(0.0, |r| r.energy);
    Ok(Solution {
        metric: state.metric,
        loops: state.loops,
        basis: state.basis,
        signature: state.signature,
        xi,
        y,
        iterations: state.iterations,
        flips: state.flips,
        residual_inf,
        energy,
        trace: state.trace,
    })
}
