//! Log-sum-exp smoothing of the intersect objective and the
//! majorization-minimization solver built on it.
//!
//! For intersect targets Omega_i under the Euclidean dynamic, the
//! smoothed objective with parameter p > 0 is
//!
//! ```text
//! D_p(x) = p ln sum_i exp( G_i(x) / p ),   G_i(x) = sqrt(d(x; Omega_i)^2 + p^2)
//! ```
//!
//! which over-approximates the true objective max_i d(x; Omega_i) by at
//! most p (1 + ln m). Freezing the per-target projections at a point y
//! yields a smooth convex majorant with 2/p-Lipschitz gradient that
//! touches D_p at y; each outer iteration minimizes that majorant with an
//! accelerated projected gradient method, then shrinks p geometrically.
//!
//! All exponentials are max-shifted, so the evaluation stays finite for
//! arbitrarily small p. Per-target passes run chunk-parallel under the
//! `parallel` feature; the `_seq` variants run the identical chunking
//! sequentially and return bitwise identical results.

use crate::geometry::ConvexSet;
use crate::parallel;
use crate::report::{SolverReport, StopReason};
use crate::timefns::SylvesterInstance;
use crate::vecops;
use std::ops::Range;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SmoothingError {
    #[error("smoothed solver supports only the Euclidean unit-ball dynamic")]
    UnsupportedDynamic,
    #[error("smoothed solver handles intersect targets only; instance has enclose targets")]
    EncloseTargetsPresent,
    #[error("instance has no intersect targets")]
    NoIntersectTargets,
    #[error("invalid smoothing parameter: {0}")]
    BadParameters(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothingOptions {
    /// Initial smoothing parameter.
    pub p0: f64,
    /// Geometric shrink factor per outer iteration, in (0, 1).
    pub sigma: f64,
    /// Outer loop stops once p falls below this.
    pub p_min: f64,
    /// Inner solver stops when the majorant gradient norm drops below
    /// this.
    pub grad_tol: f64,
    /// Inner solver iteration cap.
    pub inner_max_iters: usize,
}

impl Default for SmoothingOptions {
    fn default() -> Self {
        SmoothingOptions {
            p0: 0.1,
            sigma: 0.5,
            p_min: 1e-6,
            grad_tol: 1e-5,
            inner_max_iters: 10_000,
        }
    }
}

impl SmoothingOptions {
    fn validate(&self) -> Result<(), SmoothingError> {
        let bad = |msg: String| Err(SmoothingError::BadParameters(msg));
        if !(self.p0 > 0.0 && self.p0.is_finite()) {
            return bad(format!("p0 must be positive, got {}", self.p0));
        }
        if !(self.sigma > 0.0 && self.sigma < 1.0) {
            return bad(format!("sigma must lie in (0, 1), got {}", self.sigma));
        }
        if !(self.p_min > 0.0) {
            return bad(format!("p_min must be positive, got {}", self.p_min));
        }
        if !(self.grad_tol > 0.0) {
            return bad(format!("grad_tol must be positive, got {}", self.grad_tol));
        }
        Ok(())
    }
}

fn check_smoothable(inst: &SylvesterInstance) -> Result<(), SmoothingError> {
    if !matches!(inst.dynamic(), crate::geometry::Dynamic::EuclideanBall) {
        return Err(SmoothingError::UnsupportedDynamic);
    }
    if !inst.enclose_targets().is_empty() {
        return Err(SmoothingError::EncloseTargetsPresent);
    }
    if inst.intersect_targets().is_empty() {
        return Err(SmoothingError::NoIntersectTargets);
    }
    Ok(())
}

/// Per-target projections frozen at a base point. Evaluating at the base
/// point reproduces the smoothed objective exactly; elsewhere the value
/// majorizes it.
#[derive(Debug, Clone)]
pub struct MajorizationAnchor {
    /// Row-major m x n anchor points.
    anchors: Vec<f64>,
    m: usize,
    n: usize,
}

impl MajorizationAnchor {
    /// Project the base point onto every intersect target.
    pub fn freeze(inst: &SylvesterInstance, y: &[f64]) -> Result<Self, SmoothingError> {
        check_smoothable(inst)?;
        assert_eq!(y.len(), inst.dim(), "base point dimension mismatch");
        let targets = inst.intersect_targets();
        let (m, n) = (targets.len(), inst.dim());
        let chunks = parallel::map_chunks(m, |range: Range<usize>| {
            let mut flat = Vec::with_capacity(range.len() * n);
            for i in range {
                flat.extend_from_slice(&targets[i].project(y));
            }
            flat
        });
        Ok(MajorizationAnchor { anchors: chunks.concat(), m, n })
    }

    pub fn count(&self) -> usize {
        self.m
    }

    pub fn anchor(&self, i: usize) -> &[f64] {
        &self.anchors[i * self.n..(i + 1) * self.n]
    }

    /// Majorant value at x.
    pub fn value(&self, x: &[f64], p: f64) -> f64 {
        self.value_gradient(x, p).0
    }

    /// Majorant gradient at x.
    pub fn gradient(&self, x: &[f64], p: f64) -> Vec<f64> {
        self.value_gradient(x, p).1
    }

    pub fn value_gradient(&self, x: &[f64], p: f64) -> (f64, Vec<f64>) {
        self.eval(x, p, true)
    }

    /// Sequential reference evaluation; bitwise identical to
    /// [`value_gradient`](Self::value_gradient).
    pub fn value_gradient_seq(&self, x: &[f64], p: f64) -> (f64, Vec<f64>) {
        self.eval(x, p, false)
    }

    /// Softmax weights Lambda_i of the shifted exponentials; they sum to
    /// one by construction.
    pub fn weights(&self, x: &[f64], p: f64) -> Vec<f64> {
        let g = self.term_values(x, p, true);
        let gmax = g.iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v));
        let exps: Vec<f64> = g.iter().map(|gi| ((gi - gmax) / p).exp()).collect();
        let total: f64 = exps.iter().sum();
        vecops::scale(&exps, 1.0 / total)
    }

    /// G_i values: sqrt(|x - anchor_i|^2 + p^2).
    fn term_values(&self, x: &[f64], p: f64, par: bool) -> Vec<f64> {
        let n = self.n;
        let chunks = route_chunks(par, self.m, |range: Range<usize>| {
            let mut g = Vec::with_capacity(range.len());
            for i in range {
                let a = &self.anchors[i * n..(i + 1) * n];
                let d2: f64 = x.iter().zip(a).map(|(xj, aj)| (xj - aj) * (xj - aj)).sum();
                g.push((d2 + p * p).sqrt());
            }
            g
        });
        chunks.concat()
    }

    fn eval(&self, x: &[f64], p: f64, par: bool) -> (f64, Vec<f64>) {
        assert_eq!(x.len(), self.n, "point dimension mismatch");
        assert!(p > 0.0, "smoothing parameter must be positive");
        let n = self.n;
        let g = self.term_values(x, p, par);
        let gmax = g.iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v));

        // Weighted sums of exp((G_i - gmax)/p): the scalar total and the
        // vector sum of (e_i / G_i)(x - anchor_i). Chunk partials combine
        // in index order.
        let partials = route_chunks(par, self.m, |range: Range<usize>| {
            let mut sum_e = 0.0;
            let mut wsum = vec![0.0; n];
            for i in range {
                let e = ((g[i] - gmax) / p).exp();
                sum_e += e;
                let coeff = e / g[i];
                let a = &self.anchors[i * n..(i + 1) * n];
                for j in 0..n {
                    wsum[j] += coeff * (x[j] - a[j]);
                }
            }
            (sum_e, wsum)
        });
        let mut sum_e = 0.0;
        let mut wsum = vec![0.0; n];
        for (s, w) in partials {
            sum_e += s;
            vecops::axpy(&mut wsum, 1.0, &w);
        }
        (gmax + p * sum_e.ln(), vecops::scale(&wsum, 1.0 / sum_e))
    }
}

fn route_chunks<T, F>(par: bool, len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(Range<usize>) -> T + Sync + Send,
{
    if par {
        parallel::map_chunks(len, f)
    } else {
        parallel::map_chunks_seq(len, f)
    }
}

/// Smoothed objective D_p at x.
pub fn smooth_value(inst: &SylvesterInstance, x: &[f64], p: f64) -> Result<f64, SmoothingError> {
    Ok(smooth_value_gradient(inst, x, p)?.0)
}

/// Gradient of D_p at x.
pub fn smooth_gradient(
    inst: &SylvesterInstance,
    x: &[f64],
    p: f64,
) -> Result<Vec<f64>, SmoothingError> {
    Ok(smooth_value_gradient(inst, x, p)?.1)
}

/// Smoothed objective and gradient at x. The gradient is the
/// weight-averaged sum of (x - proj_i(x)) / G_i(x), the exact gradient of
/// D_p wherever the per-target projections are unique.
pub fn smooth_value_gradient(
    inst: &SylvesterInstance,
    x: &[f64],
    p: f64,
) -> Result<(f64, Vec<f64>), SmoothingError> {
    let anchor = MajorizationAnchor::freeze(inst, x)?;
    Ok(anchor.value_gradient(x, p))
}

/// Sequential reference for [`smooth_value_gradient`]; bitwise identical.
pub fn smooth_value_gradient_seq(
    inst: &SylvesterInstance,
    x: &[f64],
    p: f64,
) -> Result<(f64, Vec<f64>), SmoothingError> {
    let anchor = MajorizationAnchor::freeze(inst, x)?;
    Ok(anchor.value_gradient_seq(x, p))
}

/// Softmax weights of the smoothed objective at x; nonnegative, summing
/// to one.
pub fn smooth_weights(
    inst: &SylvesterInstance,
    x: &[f64],
    p: f64,
) -> Result<Vec<f64>, SmoothingError> {
    let anchor = MajorizationAnchor::freeze(inst, x)?;
    Ok(anchor.weights(x, p))
}

/// Result of one accelerated projected gradient run.
#[derive(Debug, Clone)]
pub struct InnerSolve {
    /// Best gradient-step point encountered.
    pub point: Vec<f64>,
    /// Majorant value at that point.
    pub value: f64,
    /// Iterations used.
    pub iterations: usize,
    /// Majorant gradient norm at the last gradient-step point.
    pub grad_norm: f64,
}

/// Accelerated projected gradient descent on the anchored majorant over
/// the constraint, with step constant ell = 2/p and prox center x0.
///
/// Each iteration takes the projected gradient step y_k from the current
/// combination point, the weighted-history step z_k from the prox center,
/// and combines them with weights 2/(k+3) and (k+1)/(k+3). Returns the
/// best y_k by majorant value; stops when the gradient norm at y_k drops
/// below `grad_tol` or after `max_iters` iterations.
pub fn nesterov_minimize(
    anchor: &MajorizationAnchor,
    constraint: &ConvexSet,
    x0: &[f64],
    p: f64,
    grad_tol: f64,
    max_iters: usize,
) -> InnerSolve {
    let ell = 2.0 / p;
    let x0 = constraint.project(x0);
    let mut x_cur = x0.clone();
    let mut grad_accum = vec![0.0; x0.len()];

    let mut best_point = x0.clone();
    let mut best_value = f64::INFINITY;
    let mut grad_norm = f64::INFINITY;
    let mut iterations = 0;

    for k in 0..max_iters {
        let (_, g_x) = anchor.value_gradient(&x_cur, p);
        let y = constraint.project(&vecops::add_scaled(&x_cur, -1.0 / ell, &g_x));
        let (val_y, g_y) = anchor.value_gradient(&y, p);
        iterations = k + 1;
        if val_y < best_value {
            best_value = val_y;
            best_point = y.clone();
        }
        grad_norm = vecops::norm(&g_y);
        if grad_norm < grad_tol {
            break;
        }
        vecops::axpy(&mut grad_accum, (k + 1) as f64 / 2.0, &g_x);
        let z = constraint.project(&vecops::add_scaled(&x0, -1.0 / ell, &grad_accum));
        let wk = 2.0 / (k as f64 + 3.0);
        x_cur = (0..x0.len()).map(|j| wk * z[j] + (1.0 - wk) * y[j]).collect();
    }

    InnerSolve { point: best_point, value: best_value, iterations, grad_norm }
}

/// Majorization-minimization with geometric smoothing decay: freeze
/// projections at the current point, minimize the resulting majorant with
/// [`nesterov_minimize`], shrink p by sigma, and stop once p < p_min.
///
/// The report's `value_trace` tracks the running best of the true
/// objective across outer iterates; `smoothed_trace` records D_p(x_k)
/// after each outer step at that step's p; `iterations` counts inner
/// iterations across all outer steps.
pub fn solve_mm(
    inst: &SylvesterInstance,
    x0: &[f64],
    opts: &SmoothingOptions,
) -> Result<SolverReport, SmoothingError> {
    check_smoothable(inst)?;
    opts.validate()?;
    assert_eq!(x0.len(), inst.dim(), "start point dimension mismatch");

    let mut x = inst.constraint().project(x0);
    let projected_start = x != x0;
    let mut p = opts.p0;

    let mut best_value = inst.objective_s(&x);
    let mut best_point = x.clone();
    let mut value_trace = vec![best_value];
    let mut smoothed_trace = Vec::new();
    let mut total_inner = 0;

    loop {
        let anchor = MajorizationAnchor::freeze(inst, &x)?;
        let inner =
            nesterov_minimize(&anchor, inst.constraint(), &x, p, opts.grad_tol, opts.inner_max_iters);
        x = inner.point;
        total_inner += inner.iterations;

        smoothed_trace.push(smooth_value(inst, &x, p)?);
        let s = inst.objective_s(&x);
        if s < best_value {
            best_value = s;
            best_point = x.clone();
        }
        value_trace.push(best_value);

        p *= opts.sigma;
        if p < opts.p_min {
            break;
        }
    }

    Ok(SolverReport {
        best_point,
        best_value,
        iterations: total_inner,
        value_trace,
        smoothed_trace,
        stop_reason: StopReason::SmoothingExhausted,
        projected_start,
    })
}

/// Fixed-p majorization-minimization returning the iterate sequence
/// (projected start first). Each step minimizes the majorant anchored at
/// the previous iterate, so the smoothed objective is nonincreasing along
/// the result.
pub fn mm_fixed_p(
    inst: &SylvesterInstance,
    x0: &[f64],
    p: f64,
    outer_iters: usize,
    grad_tol: f64,
    inner_max_iters: usize,
) -> Result<Vec<Vec<f64>>, SmoothingError> {
    check_smoothable(inst)?;
    if !(p > 0.0) {
        return Err(SmoothingError::BadParameters(format!(
            "smoothing parameter must be positive, got {p}"
        )));
    }
    let mut x = inst.constraint().project(x0);
    let mut iterates = vec![x.clone()];
    for _ in 0..outer_iters {
        let anchor = MajorizationAnchor::freeze(inst, &x)?;
        x = nesterov_minimize(&anchor, inst.constraint(), &x, p, grad_tol, inner_max_iters)
            .point;
        iterates.push(x.clone());
    }
    Ok(iterates)
}
