//! Single-direction reach times and their subgradient solver.
//!
//! Each target pairs a set Omega_i with a fixed direction v_i; the
//! component value is the smallest t >= 0 with x + t v_i in Omega_i,
//! infinite (NotInDomain) when the ray never meets the set. The
//! objective is the pointwise maximum, with NotInDomain absorbing.
//!
//! Subgradients follow the entry-point normal cone: for the entry point
//! p = x + t v and a cone generator w with <w, v> < 0, the selection is
//! -w / <w, v>, which satisfies <g, v> = -1 and certifies the unit decay
//! of the reach time along the direction.

use crate::geometry::{ConvexSet, GeomError};
use crate::report::{SolverReport, StopReason};
use crate::subgrad::SubgradOptions;
use crate::vecops;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DirectionalError {
    #[error("the ray along the target direction never meets the target")]
    NotInDomain,
    #[error("no normal cone generator at the entry point has negative inner product with the direction")]
    NoValidGenerator,
    #[error("start point is outside the objective domain")]
    StartNotInDomain,
    #[error("iterate left the objective domain at iteration {iteration}")]
    IterateLeftDomain {
        iteration: usize,
        /// Last iterate with a finite objective value.
        last_feasible: Vec<f64>,
        /// Progress up to the failure.
        report: Box<SolverReport>,
    },
    #[error("{context} has dimension {got}, instance dimension is {expected}")]
    DimensionMismatch { context: String, expected: usize, got: usize },
    #[error("target direction must be a nonzero finite vector")]
    BadDirection,
    #[error("instance has no targets")]
    NoTargets,
    #[error(transparent)]
    Geometry(#[from] GeomError),
}

/// Reach time along a fixed direction; NotInDomain plays the role of
/// +infinity and absorbs under max.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DirectionalValue {
    Finite(f64),
    NotInDomain,
}

impl DirectionalValue {
    pub fn finite(self) -> Option<f64> {
        match self {
            DirectionalValue::Finite(t) => Some(t),
            DirectionalValue::NotInDomain => None,
        }
    }

    pub fn max(self, other: DirectionalValue) -> DirectionalValue {
        match (self, other) {
            (DirectionalValue::Finite(a), DirectionalValue::Finite(b)) => {
                DirectionalValue::Finite(a.max(b))
            }
            _ => DirectionalValue::NotInDomain,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirectionalTarget {
    set: ConvexSet,
    direction: Vec<f64>,
}

impl DirectionalTarget {
    pub fn new(set: ConvexSet, direction: Vec<f64>) -> Result<Self, DirectionalError> {
        set.validate()?;
        if !vecops::all_finite(&direction) || vecops::norm(&direction) == 0.0 {
            return Err(DirectionalError::BadDirection);
        }
        if direction.len() != set.dim() {
            return Err(DirectionalError::DimensionMismatch {
                context: "target direction".into(),
                expected: set.dim(),
                got: direction.len(),
            });
        }
        Ok(DirectionalTarget { set, direction })
    }

    pub fn set(&self) -> &ConvexSet {
        &self.set
    }

    pub fn direction(&self) -> &[f64] {
        &self.direction
    }

    /// T_v(x): smallest t >= 0 with x + t v in the set.
    pub fn time(&self, x: &[f64]) -> DirectionalValue {
        match self.set.ray_entry_time(x, &self.direction) {
            Some(t) => DirectionalValue::Finite(t),
            None => DirectionalValue::NotInDomain,
        }
    }

    /// Entry point x + T_v(x) v.
    pub fn projection(&self, x: &[f64]) -> Result<Vec<f64>, DirectionalError> {
        match self.time(x) {
            DirectionalValue::Finite(t) => Ok(vecops::add_scaled(x, t, &self.direction)),
            DirectionalValue::NotInDomain => Err(DirectionalError::NotInDomain),
        }
    }

    /// Subgradient selection of T_v at x: zero inside the set, otherwise
    /// -w / <w, v> for the first entry-point normal cone generator w with
    /// <w, v> < 0.
    pub fn subgradient(&self, x: &[f64], tol: f64) -> Result<Vec<f64>, DirectionalError> {
        if self.set.contains(x, tol) {
            return Ok(vec![0.0; x.len()]);
        }
        let p = self.projection(x)?;
        // Scale-aware membership slack: the entry point is computed in
        // floating point and may sit slightly off large-coordinate sets.
        let cone_tol = tol * (1.0 + vecops::norm(&p));
        let cone = self.set.normal_cone(&p, cone_tol)?;
        for w in &cone.generators {
            let wv = vecops::dot(w, &self.direction);
            if wv < 0.0 {
                return Ok(vecops::scale(w, -1.0 / wv));
            }
        }
        Err(DirectionalError::NoValidGenerator)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirectionalInstance {
    constraint: ConvexSet,
    targets: Vec<DirectionalTarget>,
}

impl DirectionalInstance {
    pub fn new(
        constraint: ConvexSet,
        targets: Vec<DirectionalTarget>,
    ) -> Result<Self, DirectionalError> {
        constraint.validate()?;
        if targets.is_empty() {
            return Err(DirectionalError::NoTargets);
        }
        let dim = constraint.dim();
        for (i, t) in targets.iter().enumerate() {
            if t.set.dim() != dim {
                return Err(DirectionalError::DimensionMismatch {
                    context: format!("target {i}"),
                    expected: dim,
                    got: t.set.dim(),
                });
            }
        }
        Ok(DirectionalInstance { constraint, targets })
    }

    pub fn dim(&self) -> usize {
        self.constraint.dim()
    }

    pub fn constraint(&self) -> &ConvexSet {
        &self.constraint
    }

    pub fn targets(&self) -> &[DirectionalTarget] {
        &self.targets
    }

    /// S_1(x) = max_i T_{v_i}(x), NotInDomain absorbing.
    pub fn objective(&self, x: &[f64]) -> DirectionalValue {
        let mut acc = DirectionalValue::Finite(f64::NEG_INFINITY);
        for t in &self.targets {
            acc = acc.max(t.time(x));
        }
        acc
    }

    /// Component values at x, in target order.
    pub fn component_values(&self, x: &[f64]) -> Vec<DirectionalValue> {
        self.targets.iter().map(|t| t.time(x)).collect()
    }

    /// Indices with value >= S_1(x) - tie_tol; meaningful only where the
    /// objective is finite (empty otherwise).
    pub fn active_set(&self, x: &[f64], tie_tol: f64) -> Vec<usize> {
        let vals = self.component_values(x);
        let mut s = f64::NEG_INFINITY;
        for v in &vals {
            match v.finite() {
                Some(t) => s = s.max(t),
                None => return Vec::new(),
            }
        }
        vals.iter()
            .enumerate()
            .filter(|(_, v)| v.finite().is_some_and(|t| t >= s - tie_tol))
            .map(|(i, _)| i)
            .collect()
    }

    /// Default start: constraint projection of the centroid of target
    /// representative points.
    pub fn default_start(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.dim()];
        for t in &self.targets {
            vecops::axpy(&mut c, 1.0, &t.set.representative_point());
        }
        self.constraint.project(&vecops::scale(&c, 1.0 / self.targets.len() as f64))
    }
}

/// Projected subgradient iteration on S_1. Stops with
/// [`StopReason::MembershipBreak`] when the iterate enters the active
/// target's set, and errors when an iterate leaves the objective domain.
pub fn solve_directional(
    inst: &DirectionalInstance,
    x1: &[f64],
    opts: &SubgradOptions,
) -> Result<SolverReport, DirectionalError> {
    assert_eq!(x1.len(), inst.dim(), "start point dimension mismatch");
    let mut x = inst.constraint().project(x1);
    let projected_start = x != x1;

    let mut vals = finite_values(inst, &x).ok_or(DirectionalError::StartNotInDomain)?;
    let mut best_value = fold_max(&vals);
    let mut best_point = x.clone();
    let mut trace = vec![best_value];

    let mut iterations = 0;
    let mut stop_reason = StopReason::MaxIters;

    for k in 1..=opts.max_iters {
        let (_, idx) = argmax(&vals);
        let target = &inst.targets()[idx];

        if target.set().contains(&x, opts.membership_tol) {
            stop_reason = StopReason::MembershipBreak;
            break;
        }
        let w = target.subgradient(&x, opts.membership_tol)?;

        let step = opts.schedule.step(k);
        let x_next = inst.constraint().project(&vecops::add_scaled(&x, -step, &w));
        let vals_next = match finite_values(inst, &x_next) {
            Some(v) => v,
            None => {
                let report = SolverReport {
                    best_point,
                    best_value,
                    iterations,
                    value_trace: trace,
                    smoothed_trace: Vec::new(),
                    stop_reason: StopReason::MaxIters,
                    projected_start,
                };
                return Err(DirectionalError::IterateLeftDomain {
                    iteration: k,
                    last_feasible: x,
                    report: Box::new(report),
                });
            }
        };
        x = x_next;
        iterations = k;

        let s_next = fold_max(&vals_next);
        if s_next < best_value {
            best_value = s_next;
            best_point = x.clone();
        }
        trace.push(best_value);
        vals = vals_next;

        let len = trace.len();
        if len > opts.stall_window
            && trace[len - 1 - opts.stall_window] - trace[len - 1] < opts.stall_tol
        {
            stop_reason = StopReason::ValueStall;
            break;
        }
    }

    Ok(SolverReport {
        best_point,
        best_value,
        iterations,
        value_trace: trace,
        smoothed_trace: Vec::new(),
        stop_reason,
        projected_start,
    })
}

fn finite_values(inst: &DirectionalInstance, x: &[f64]) -> Option<Vec<f64>> {
    inst.component_values(x).into_iter().map(DirectionalValue::finite).collect()
}

fn fold_max(vals: &[f64]) -> f64 {
    vals.iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v))
}

fn argmax(vals: &[f64]) -> (f64, usize) {
    let mut best = f64::NEG_INFINITY;
    let mut idx = 0;
    for (i, v) in vals.iter().enumerate() {
        if *v > best {
            best = *v;
            idx = i;
        }
    }
    (best, idx)
}
