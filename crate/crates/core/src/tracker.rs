//! Real path tracking from the toric limit to the target system.
//!
//! The homotopy multiplies each coefficient by `t^{-omega(a)}` with
//! `omega = Log|C|`, then rescales equation `i` by `t^{max omega}` so every
//! exponent `w_a = max_i omega - omega(a)` is nonnegative:
//!
//! ```text
//! H_i(t, x) = sum_a c_a t^{w_a} x^a,    t = exp(-lambda)
//! ```
//!
//! At `t = 1` this is the input system. As `t -> 0` the terms on each mixed
//! cell dominate and the branch through a binomial solution `x*` behaves like
//! `x*  t^nu` with `nu` the cell normal.
//!
//! A real path never leaves its orthant, so each path is tracked in
//! `y = log|x|` with the sign vector fixed at the start. Equations are
//! evaluated with every term divided by the largest one, which keeps the
//! arithmetic in range for tiny `t`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::binomial::RealOrthantSolution;
use crate::error::Result;
use crate::lattice::{log_abs_lifting, Lifting, SupportSystem};
use crate::mixed_cells::MixedCell;

/// Candidate start parameters, tried from largest to smallest.
pub const T0_CANDIDATES: [f64; 8] = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8];
/// Normalized start residual accepted when picking `t0`.
pub const START_RESIDUAL: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackerSettings {
    /// Fixed start parameter; `None` picks it per path from [`T0_CANDIDATES`].
    pub t0: Option<f64>,
    /// Endpoint residual bound (relative to the largest term per equation).
    pub final_tolerance: f64,
    pub corrector_tolerance: f64,
    pub max_newton_iterations: usize,
    /// Consecutive failed steps (each followed by halving) before giving up.
    pub max_consecutive_failures: usize,
    pub initial_step_fraction: f64,
    /// Successful steps in a row before the step is doubled.
    pub easy_steps_to_double: usize,
    pub min_step: f64,
    /// Largest factor by which a coordinate may drift from its toric start.
    pub max_magnitude: f64,
    pub max_steps: usize,
}

impl Default for TrackerSettings {
    fn default() -> Self {
        Self {
            t0: None,
            final_tolerance: 1e-8,
            corrector_tolerance: 1e-10,
            max_newton_iterations: 3,
            max_consecutive_failures: 3,
            initial_step_fraction: 0.1,
            easy_steps_to_double: 4,
            min_step: 1e-14,
            max_magnitude: 1e12,
            max_steps: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error, Serialize, Deserialize)]
pub enum TrackError {
    #[error("path diverged at t = {t:e}: {reason}")]
    PathDiverged { t: f64, reason: String },
    #[error("corrector stalled at t = {t:e}")]
    CorrectorStalled { t: f64 },
}

/// The deformation `c_a t^{w_a} x^a` of a target system.
#[derive(Debug, Clone)]
pub struct HomotopySystem {
    system: SupportSystem,
    lifting: Lifting,
    /// Per equation, per term: `w_a >= 0`.
    exponents: Vec<Vec<f64>>,
    log_coeffs: Vec<Vec<f64>>,
}

impl HomotopySystem {
    /// Deforms along `Log|C|`.
    pub fn new(system: &SupportSystem) -> Result<Self> {
        let lifting = log_abs_lifting(system)?;
        Ok(Self::with_lifting(system, lifting))
    }

    /// Deforms along an arbitrary lifting (block-major, one value per term).
    pub fn with_lifting(system: &SupportSystem, lifting: Lifting) -> Self {
        let mut exponents = Vec::with_capacity(system.n());
        let mut log_coeffs = Vec::with_capacity(system.n());
        let mut offset = 0;
        for c in system.coefficients() {
            let w = &lifting.values()[offset..offset + c.len()];
            let top = w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            exponents.push(w.iter().map(|v| top - v).collect());
            log_coeffs.push(c.iter().map(|v| v.abs().ln()).collect());
            offset += c.len();
        }
        Self { system: system.clone(), lifting, exponents, log_coeffs }
    }

    pub fn system(&self) -> &SupportSystem {
        &self.system
    }

    /// Deformation direction, one value per Cayley point.
    pub fn v(&self) -> &Lifting {
        &self.lifting
    }

    /// Coefficients of the deformed system at `t`.
    pub fn coefficients_at(&self, t: f64) -> Vec<Vec<f64>> {
        self.system
            .coefficients()
            .iter()
            .zip(&self.exponents)
            .map(|(c, w)| c.iter().zip(w).map(|(c, w)| c * t.powf(*w)).collect())
            .collect()
    }

    /// Scaled evaluation at `lambda = -log t`, `x = signs * exp(y)`.
    fn eval(&self, lambda: f64, y: &[f64], signs: &[i8], want_jacobian: bool) -> Eval {
        let n = y.len();
        let mut value = vec![0.0; n];
        let mut d_lambda = vec![0.0; n];
        let mut jac = if want_jacobian { vec![vec![0.0; n]; n] } else { Vec::new() };
        for (i, support) in self.system.supports().iter().enumerate() {
            let coeffs = &self.system.coefficients()[i];
            let logs: Vec<f64> = support
                .points()
                .iter()
                .zip(&self.exponents[i])
                .zip(&self.log_coeffs[i])
                .map(|((a, w), lc)| {
                    a.iter().zip(y).map(|(&ai, yi)| ai as f64 * yi).sum::<f64>() - lambda * w + lc
                })
                .collect();
            let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            for (k, a) in support.points().iter().enumerate() {
                let mut negative = coeffs[k] < 0.0;
                for (&ai, &s) in a.iter().zip(signs) {
                    if s < 0 && ai % 2 != 0 {
                        negative = !negative;
                    }
                }
                let mag = (logs[k] - top).exp();
                let term = if negative { -mag } else { mag };
                value[i] += term;
                d_lambda[i] -= term * self.exponents[i][k];
                if want_jacobian {
                    for (j, &aj) in a.iter().enumerate() {
                        jac[i][j] += term * aj as f64;
                    }
                }
            }
        }
        Eval { value, jac, d_lambda }
    }

    /// Normalized residual `max_i |H_i| / max_a |term_a|` at `(t, x)`.
    pub fn residual(&self, t: f64, x: &[f64]) -> f64 {
        let (y, signs) = to_log(x);
        let lambda = -t.ln();
        norm_inf(&self.eval(lambda, &y, &signs, false).value)
    }
}

struct Eval {
    value: Vec<f64>,
    jac: Vec<Vec<f64>>,
    d_lambda: Vec<f64>,
}

fn to_log(x: &[f64]) -> (Vec<f64>, Vec<i8>) {
    let y = x.iter().map(|v| v.abs().ln()).collect();
    let s = x.iter().map(|v| if *v < 0.0 { -1 } else { 1 }).collect();
    (y, s)
}

fn from_log(y: &[f64], signs: &[i8]) -> Vec<f64> {
    y.iter().zip(signs).map(|(v, &s)| f64::from(s) * v.exp()).collect()
}

fn norm_inf(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

/// Gaussian elimination with partial pivoting; `None` if numerically singular.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))?;
        if a[p][k] == 0.0 || !a[p][k].is_finite() {
            return None;
        }
        a.swap(k, p);
        b.swap(k, p);
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                a[i][j] -= f * a[k][j];
            }
            b[i] -= f * b[k];
        }
    }
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| a[k][j] * b[j]).sum();
        b[k] = (b[k] - s) / a[k][k];
    }
    b.iter().all(|v| v.is_finite()).then_some(b)
}

/// `x* t0^nu`: the leading term of the Puiseux branch through `x*`.
pub fn start_point(cell: &MixedCell, sol: &RealOrthantSolution, t0: f64) -> Vec<f64> {
    sol.point
        .iter()
        .zip(&cell.normal)
        .map(|(x, nu)| x * t0.powf(*nu))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PathStatus {
    Tracking,
    Converged,
    Diverged,
    Failed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathState {
    pub t: f64,
    pub x: Vec<f64>,
    /// Index of the originating mixed cell.
    pub cell: usize,
    pub normal: Vec<f64>,
    pub status: PathStatus,
}

impl PathState {
    /// Start state for the binomial solution `sol` of `cell`, with `t0` from
    /// the settings or picked adaptively.
    pub fn start(
        h: &HomotopySystem,
        cell_index: usize,
        cell: &MixedCell,
        sol: &RealOrthantSolution,
        settings: &TrackerSettings,
    ) -> Self {
        let t0 = settings.t0.unwrap_or_else(|| choose_t0(h, cell, sol));
        Self {
            t: t0,
            x: start_point(cell, sol, t0),
            cell: cell_index,
            normal: cell.normal.clone(),
            status: PathStatus::Tracking,
        }
    }
}

/// Largest candidate `t0` whose start residual is below [`START_RESIDUAL`].
/// Returns `1.0` when the binomial solution already solves the target.
pub fn choose_t0(h: &HomotopySystem, cell: &MixedCell, sol: &RealOrthantSolution) -> f64 {
    if h.system().relative_residual(&sol.point) < 1e-13 {
        return 1.0;
    }
    for &t0 in &T0_CANDIDATES {
        if h.residual(t0, &start_point(cell, sol, t0)) < START_RESIDUAL {
            return t0;
        }
    }
    T0_CANDIDATES[T0_CANDIDATES.len() - 1]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackedSolution {
    pub point: Vec<f64>,
    /// Max-norm residual of the target, relative to the largest term.
    pub residual: f64,
    pub cell: usize,
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathFailure {
    pub cell: usize,
    pub start: Vec<f64>,
    pub error: TrackError,
}

enum Correction {
    Converged(Vec<f64>),
    Failed,
}

fn correct(
    h: &HomotopySystem,
    lambda: f64,
    mut y: Vec<f64>,
    signs: &[i8],
    tol: f64,
    max_iter: usize,
) -> Correction {
    let mut last_step = f64::INFINITY;
    for it in 0..=max_iter {
        let e = h.eval(lambda, &y, signs, true);
        if norm_inf(&e.value) < tol {
            return Correction::Converged(y);
        }
        if it == max_iter {
            break;
        }
        let Some(dy) = solve_dense(e.jac, e.value.iter().map(|v| -v).collect()) else {
            return Correction::Failed;
        };
        let step = norm_inf(&dy);
        // insist on contraction to stay on the current branch
        if step > 0.5 * last_step.max(1e-300) && it > 0 || step > 0.5 {
            return Correction::Failed;
        }
        last_step = step;
        for (yi, d) in y.iter_mut().zip(&dy) {
            *yi += d;
        }
    }
    Correction::Failed
}

/// Tracks one path from `state.t` to `t = 1`.
pub fn track_path(
    h: &HomotopySystem,
    state: &PathState,
    settings: &TrackerSettings,
) -> std::result::Result<TrackedSolution, PathFailure> {
    let (mut y, signs) = to_log(&state.x);
    let fail = |error| PathFailure { cell: state.cell, start: state.x.clone(), error };
    let log_max = settings.max_magnitude.ln();
    // drift of the cell-frame point x t^{-nu} away from its start value; the
    // frame is the binomial solution at t0 and the point itself at t = 1
    let mut lambda = -state.t.ln();
    let frame = |y: &[f64], lambda: f64| -> Vec<f64> {
        y.iter().zip(&state.normal).map(|(v, nu)| v + nu * lambda).collect()
    };
    let anchor = frame(&y, lambda);
    let out_of_range = |y: &[f64], lambda: f64| {
        frame(y, lambda).iter().zip(&anchor).any(|(v, a)| !v.is_finite() || (v - a).abs() > log_max)
    };
    if anchor.iter().any(|v| !v.is_finite()) {
        return Err(fail(TrackError::PathDiverged {
            t: state.t,
            reason: "start point out of range".into(),
        }));
    }

    let mut step = settings.initial_step_fraction * lambda;
    let mut steps = 0usize;
    let mut easy = 0usize;
    let mut failures = 0usize;

    while lambda > 0.0 {
        if steps + failures > settings.max_steps {
            return Err(fail(TrackError::CorrectorStalled { t: (-lambda).exp() }));
        }
        let h_step = step.min(lambda);
        let target = if h_step >= lambda { 0.0 } else { lambda - h_step };

        let e = h.eval(lambda, &y, &signs, true);
        // dy/dlambda = -J^{-1} H_lambda; lambda decreases by h_step
        let predicted = solve_dense(e.jac, e.d_lambda.clone()).map(|v| {
            y.iter().zip(&v).map(|(yi, vi)| yi + h_step * vi).collect::<Vec<f64>>()
        });
        let corrected = predicted.map(|p| {
            correct(h, target, p, &signs, settings.corrector_tolerance, settings.max_newton_iterations)
        });

        match corrected {
            Some(Correction::Converged(next)) if !out_of_range(&next, target) => {
                y = next;
                lambda = target;
                steps += 1;
                failures = 0;
                easy += 1;
                if easy >= settings.easy_steps_to_double {
                    step *= 2.0;
                    easy = 0;
                }
            }
            Some(Correction::Converged(_)) => {
                return Err(fail(TrackError::PathDiverged {
                    t: (-target).exp(),
                    reason: format!("coordinate moved by more than a factor {:e}", settings.max_magnitude),
                }));
            }
            _ => {
                step *= 0.5;
                easy = 0;
                failures += 1;
                if step < settings.min_step {
                    return Err(fail(TrackError::PathDiverged {
                        t: (-lambda).exp(),
                        reason: "step size underflow".into(),
                    }));
                }
                if failures > settings.max_consecutive_failures {
                    return Err(fail(TrackError::CorrectorStalled { t: (-lambda).exp() }));
                }
            }
        }
    }

    // polish at t = 1
    for _ in 0..8 {
        let e = h.eval(0.0, &y, &signs, true);
        if norm_inf(&e.value) < 1e-15 {
            break;
        }
        let Some(dy) = solve_dense(e.jac, e.value.iter().map(|v| -v).collect()) else { break };
        if norm_inf(&dy) > 1e-2 {
            break;
        }
        for (yi, d) in y.iter_mut().zip(&dy) {
            *yi += d;
        }
    }
    let point = from_log(&y, &signs);
    let residual = h.system().relative_residual(&point);
    if residual.is_nan() || residual >= settings.final_tolerance {
        return Err(fail(TrackError::CorrectorStalled { t: 1.0 }));
    }
    Ok(TrackedSolution { point, residual, cell: state.cell, steps })
}

/// Tracks every path; results come back in input order.
pub fn track(
    h: &HomotopySystem,
    paths: &[PathState],
    settings: &TrackerSettings,
) -> Vec<std::result::Result<TrackedSolution, PathFailure>> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        paths.par_iter().map(|p| track_path(h, p, settings)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        paths.iter().map(|p| track_path(h, p, settings)).collect()
    }
}
