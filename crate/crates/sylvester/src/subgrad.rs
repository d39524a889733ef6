//! Projected subgradient solver for the max-type objective.
//!
//! Each iteration evaluates every component value at the current point,
//! picks the first component attaining the maximum (intersect targets
//! first, then enclose targets, each in instance order), steps against
//! that component's subgradient selection with the scheduled step size,
//! and projects back onto the constraint. The running best value V_k is
//! tracked separately from the iterate because the raw objective values
//! need not decrease monotonically.

use crate::report::{SolverReport, StepSchedule, StopReason};
use crate::timefns::{SylvesterInstance, TargetKind, TimeFnError};
use crate::vecops;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubgradOptions {
    pub schedule: StepSchedule,
    pub max_iters: usize,
    /// Best-value improvement below this over a full window stops the run.
    pub stall_tol: f64,
    pub stall_window: usize,
    /// Distance within which an iterate counts as a member of a target.
    pub membership_tol: f64,
}

impl Default for SubgradOptions {
    fn default() -> Self {
        SubgradOptions {
            schedule: StepSchedule::default(),
            max_iters: 200_000,
            stall_tol: 1e-9,
            stall_window: 1000,
            membership_tol: 1e-9,
        }
    }
}

/// Snapshot handed to the iteration observer before the step is taken.
#[derive(Debug)]
pub struct IterationEvent<'a> {
    /// Iteration counter, from 1.
    pub k: usize,
    /// Current iterate x_k.
    pub x: &'a [f64],
    /// Objective value S(x_k).
    pub value: f64,
    /// Chosen component (first maximizer in fixed order).
    pub target: (TargetKind, usize),
    /// Subgradient selection w_k (zero when x_k sits in the chosen
    /// intersect target).
    pub direction: &'a [f64],
    /// Scheduled step size.
    pub step: f64,
}

/// A-priori bound on min_k S(x_k) - S* after k iterations from a start at
/// distance `d1` from the solution set, for an `lipschitz`-Lipschitz
/// objective: (d1^2 + L^2 sum alpha_i^2) / (2 sum alpha_i), partial sums
/// through k.
pub fn error_bound(d1: f64, lipschitz: f64, schedule: StepSchedule, k: usize) -> f64 {
    assert!(k >= 1, "bound needs at least one iteration");
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for i in 1..=k {
        let a = schedule.step(i);
        sum += a;
        sum_sq += a * a;
    }
    (d1 * d1 + lipschitz * lipschitz * sum_sq) / (2.0 * sum)
}

pub fn solve_subgradient(
    inst: &SylvesterInstance,
    x1: &[f64],
    opts: &SubgradOptions,
) -> SolverReport {
    solve_subgradient_observed(inst, x1, opts, |_| {})
}

/// As [`solve_subgradient`], invoking `observer` once per iteration with
/// the pre-step state. Used by diagnostic and validation harnesses.
pub fn solve_subgradient_observed(
    inst: &SylvesterInstance,
    x1: &[f64],
    opts: &SubgradOptions,
    mut observer: impl FnMut(&IterationEvent),
) -> SolverReport {
    assert_eq!(x1.len(), inst.dim(), "start point dimension mismatch");
    let n = inst.dim();
    let mut x = inst.constraint().project(x1);
    let projected_start = x != x1;

    let (mut t_vals, mut c_vals) = inst.component_values(&x);
    let mut best_value = max_component(&t_vals, &c_vals).0;
    let mut best_point = x.clone();
    let mut trace = Vec::with_capacity(opts.max_iters.min(1 << 22) + 1);
    trace.push(best_value);

    let mut iterations = 0;
    let mut stop_reason = StopReason::MaxIters;

    for k in 1..=opts.max_iters {
        let (s_cur, kind, idx) = {
            let (s, (kind, idx)) = max_component(&t_vals, &c_vals);
            (s, kind, idx)
        };

        let w = match kind {
            TargetKind::Intersect => {
                if inst.intersect_targets()[idx].contains(&x, opts.membership_tol) {
                    // The largest component is already (tolerance-)zero, so
                    // every component is: the point solves the problem.
                    if s_cur <= opts.membership_tol {
                        stop_reason = StopReason::FoundZero;
                        break;
                    }
                    vec![0.0; n]
                } else {
                    inst.subgradient_t(idx, &x)
                }
            }
            TargetKind::Enclose => match inst.subgradient_c(idx, &x) {
                Ok(w) => w,
                Err(TimeFnError::DegenerateFarthest) => {
                    if s_cur <= opts.membership_tol {
                        stop_reason = StopReason::FoundZero;
                        break;
                    }
                    vec![0.0; n]
                }
            },
        };

        let step = opts.schedule.step(k);
        observer(&IterationEvent {
            k,
            x: &x,
            value: s_cur,
            target: (kind, idx),
            direction: &w,
            step,
        });

        x = inst.constraint().project(&vecops::add_scaled(&x, -step, &w));
        iterations = k;

        let (t_next, c_next) = inst.component_values(&x);
        let s_next = max_component(&t_next, &c_next).0;
        if s_next < best_value {
            best_value = s_next;
            best_point = x.clone();
        }
        trace.push(best_value);
        t_vals = t_next;
        c_vals = c_next;

        let len = trace.len();
        if len > opts.stall_window
            && trace[len - 1 - opts.stall_window] - trace[len - 1] < opts.stall_tol
        {
            stop_reason = StopReason::ValueStall;
            break;
        }
    }

    SolverReport {
        best_point,
        best_value,
        iterations,
        value_trace: trace,
        smoothed_trace: Vec::new(),
        stop_reason,
        projected_start,
    }
}

/// Maximum component value and the first attaining index in fixed order.
fn max_component(t_vals: &[f64], c_vals: &[f64]) -> (f64, (TargetKind, usize)) {
    let mut best = f64::NEG_INFINITY;
    let mut which = (TargetKind::Intersect, 0);
    for (i, v) in t_vals.iter().enumerate() {
        if *v > best {
            best = *v;
            which = (TargetKind::Intersect, i);
        }
    }
    for (j, v) in c_vals.iter().enumerate() {
        if *v > best {
            best = *v;
            which = (TargetKind::Enclose, j);
        }
    }
    (best, which)
}
